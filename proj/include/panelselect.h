/* panelselect C API
 *
 * Shared-library surface for the panel selection-model toolkit: a
 * three-equation system (non-attrition, employment, wages) estimated by
 * maximum simulated likelihood plus a double-selection-corrected pooled
 * wage regression, with a synthetic-panel generator for recovery studies.
 *
 * All functions return ps_status; PS_OK is zero. On failure a thread-local
 * message is available from ps_last_error(). Strings returned through
 * char** out-parameters are owned by the caller and must be released with
 * ps_string_free().
 */
#ifndef PANELSELECT_H
#define PANELSELECT_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ps_status {
  PS_OK = 0,
  /* config / data problems (process exit class 1) */
  PS_ERR_IO = 1,
  PS_ERR_SCHEMA = 2,
  PS_ERR_PARSE = 3,
  PS_ERR_INTEGRITY = 4,
  PS_ERR_VALIDATION = 5,
  PS_ERR_CONFIG = 6,
  PS_ERR_CONTRACT = 7,
  PS_ERR_PARAMETER = 8,
  PS_ERR_INVALID_ARGUMENT = 9,
  /* numerical failures (process exit class 2) */
  PS_ERR_DOMAIN = 20,
  PS_ERR_NUMERIC = 21,
  PS_ERR_SINGULAR = 22,
  PS_ERR_NOT_IDENTIFIED = 23,
  PS_ERR_NO_CONVERGENCE = 24,
  PS_ERR_INTERNAL = 25
} ps_status;

typedef struct ps_config ps_config; /* parsed run configuration */
typedef struct ps_panel ps_panel;   /* loaded panel dataset */

const char* ps_version(void);

/* Message for the most recent failure on this thread; never NULL. */
const char* ps_last_error(void);

/* 0 on success, 1 for config/validation errors, 2 for numerical failures. */
int ps_status_exit_code(ps_status status);

void ps_string_free(char* s);

/* --- configuration ------------------------------------------------- */

ps_status ps_config_load(const char* path, ps_config** out_config);
ps_status ps_config_load_string(const char* json_text, ps_config** out_config);
void ps_config_free(ps_config* config);

/* Override a value by dotted key, e.g. "output.dir" or "seed" or
 * "estimation.bootstrap_b". Intermediate objects are created as needed. */
ps_status ps_config_set_string(ps_config* config, const char* dotted_key,
                               const char* value);
ps_status ps_config_set_int(ps_config* config, const char* dotted_key,
                            long long value);

/* --- pipeline commands ---------------------------------------------- */
/* Each command writes its artifact files under output.dir. out_summary
 * (optional) receives a short human-readable summary. */

ps_status ps_run_simulate(const ps_config* config, char** out_summary);
ps_status ps_run_estimate(const ps_config* config, int stage1_only,
                          char** out_summary);
ps_status ps_run_describe(const ps_config* config, char** out_summary);
ps_status ps_run_report(const ps_config* config, char** out_summary);

/* --- panel data ------------------------------------------------------ */

ps_status ps_panel_load_csv(const char* path, ps_panel** out_panel);
void ps_panel_free(ps_panel* panel);

int64_t ps_panel_num_rows(const ps_panel* panel);
int64_t ps_panel_num_persons(const ps_panel* panel);
int ps_panel_t_max(const ps_panel* panel);

/* Invariant-violation report, one line per violation; empty string when the
 * panel is valid. */
ps_status ps_panel_validate(const ps_panel* panel, char** out_report);

#ifdef __cplusplus
}
#endif

#endif /* PANELSELECT_H */
