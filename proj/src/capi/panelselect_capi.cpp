#include "panelselect.h"

#include <cstring>
#include <new>
#include <string>

#include "core/config.hpp"
#include "core/errors.hpp"
#include "core/panel.hpp"
#include "core/pipeline.hpp"

using panelselect::Error;
using panelselect::ErrorCode;

struct ps_config {
  nlohmann::json json;
};

struct ps_panel {
  panelselect::PanelDataset dataset;
};

namespace {

thread_local std::string g_last_error;

ps_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::io:
      return PS_ERR_IO;
    case ErrorCode::schema:
      return PS_ERR_SCHEMA;
    case ErrorCode::parse:
      return PS_ERR_PARSE;
    case ErrorCode::integrity:
      return PS_ERR_INTEGRITY;
    case ErrorCode::validation:
      return PS_ERR_VALIDATION;
    case ErrorCode::config:
      return PS_ERR_CONFIG;
    case ErrorCode::contract:
      return PS_ERR_CONTRACT;
    case ErrorCode::parameter:
      return PS_ERR_PARAMETER;
    case ErrorCode::domain:
      return PS_ERR_DOMAIN;
    case ErrorCode::numeric:
      return PS_ERR_NUMERIC;
    case ErrorCode::singular:
      return PS_ERR_SINGULAR;
    case ErrorCode::not_identified:
      return PS_ERR_NOT_IDENTIFIED;
    case ErrorCode::no_convergence:
      return PS_ERR_NO_CONVERGENCE;
    case ErrorCode::internal:
      return PS_ERR_INTERNAL;
  }
  return PS_ERR_INTERNAL;
}

template <typename Fn>
ps_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return PS_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return PS_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PS_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

nlohmann::json* navigate(ps_config* config, const char* dotted_key) {
  std::string key(dotted_key);
  nlohmann::json* node = &config->json;
  std::size_t start = 0;
  while (true) {
    std::size_t dot = key.find('.', start);
    std::string part = key.substr(start, dot - start);
    if (part.empty()) {
      throw Error(ErrorCode::config,
                  "config: empty key segment in '" + key + "'");
    }
    if (dot == std::string::npos) {
      return &(*node)[part];
    }
    node = &(*node)[part];
    if (!node->is_object() && !node->is_null()) {
      throw Error(ErrorCode::config, "config: '" + part + "' is not an object");
    }
    start = dot + 1;
  }
}

ps_status run_command(const ps_config* config, char** out_summary,
                      std::string (*runner)(const panelselect::RunConfig&)) {
  if (!config) {
    g_last_error = "config is NULL";
    return PS_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    panelselect::RunConfig cfg = panelselect::parse_run_config(config->json);
    std::string summary = runner(cfg);
    if (out_summary) *out_summary = dup_string(summary);
  });
}

}  // namespace

extern "C" {

const char* ps_version(void) { return "0.1.0"; }

const char* ps_last_error(void) { return g_last_error.c_str(); }

int ps_status_exit_code(ps_status status) {
  if (status == PS_OK) return 0;
  return status >= PS_ERR_DOMAIN ? 2 : 1;
}

void ps_string_free(char* s) { delete[] s; }

ps_status ps_config_load(const char* path, ps_config** out_config) {
  if (!path || !out_config) {
    g_last_error = "NULL argument";
    return PS_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    nlohmann::json j = panelselect::load_config_json(path);
    // Parse once for early schema feedback; overrides re-validate at run.
    panelselect::parse_run_config(j);
    *out_config = new ps_config{std::move(j)};
  });
}

ps_status ps_config_load_string(const char* json_text, ps_config** out_config) {
  if (!json_text || !out_config) {
    g_last_error = "NULL argument";
    return PS_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    nlohmann::json j = nlohmann::json::parse(json_text, nullptr, false);
    if (j.is_discarded()) {
      throw Error(ErrorCode::config, "config: not valid JSON");
    }
    panelselect::parse_run_config(j);
    *out_config = new ps_config{std::move(j)};
  });
}

void ps_config_free(ps_config* config) { delete config; }

ps_status ps_config_set_string(ps_config* config, const char* dotted_key,
                               const char* value) {
  if (!config || !dotted_key || !value) {
    g_last_error = "NULL argument";
    return PS_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] { *navigate(config, dotted_key) = value; });
}

ps_status ps_config_set_int(ps_config* config, const char* dotted_key,
                            long long value) {
  if (!config || !dotted_key) {
    g_last_error = "NULL argument";
    return PS_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] { *navigate(config, dotted_key) = value; });
}

ps_status ps_run_simulate(const ps_config* config, char** out_summary) {
  return run_command(config, out_summary, &panelselect::run_simulate);
}

ps_status ps_run_estimate(const ps_config* config, int stage1_only,
                          char** out_summary) {
  if (!config) {
    g_last_error = "config is NULL";
    return PS_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    panelselect::RunConfig cfg = panelselect::parse_run_config(config->json);
    std::string summary = panelselect::run_estimate(cfg, stage1_only != 0);
    if (out_summary) *out_summary = dup_string(summary);
  });
}

ps_status ps_run_describe(const ps_config* config, char** out_summary) {
  return run_command(config, out_summary, &panelselect::run_describe);
}

ps_status ps_run_report(const ps_config* config, char** out_summary) {
  return run_command(config, out_summary, &panelselect::run_report);
}

ps_status ps_panel_load_csv(const char* path, ps_panel** out_panel) {
  if (!path || !out_panel) {
    g_last_error = "NULL argument";
    return PS_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    *out_panel = new ps_panel{panelselect::load_panel_csv(path)};
  });
}

void ps_panel_free(ps_panel* panel) { delete panel; }

int64_t ps_panel_num_rows(const ps_panel* panel) {
  return panel ? static_cast<int64_t>(panel->dataset.rows.size()) : 0;
}

int64_t ps_panel_num_persons(const ps_panel* panel) {
  return panel ? static_cast<int64_t>(panel->dataset.persons.size()) : 0;
}

int ps_panel_t_max(const ps_panel* panel) {
  return panel ? panel->dataset.t_max : 0;
}

ps_status ps_panel_validate(const ps_panel* panel, char** out_report) {
  if (!panel || !out_report) {
    g_last_error = "NULL argument";
    return PS_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    panelselect::ValidationReport report =
        panelselect::validate_panel(panel->dataset);
    *out_report = dup_string(report.to_string());
  });
}

}  // extern "C"
