// panelselect command-line front end. Links the C API only.

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#include <CLI11.hpp>

#include "panelselect.h"

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  long long seed = -1;
  long long bootstrap = -1;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "Run configuration (JSON)")
      ->required();
  cmd->add_option("--out", opts.out_dir, "Override output directory");
  cmd->add_option("--seed", opts.seed, "Override master seed");
}

bool quiet_logging() {
  const char* level = std::getenv("PANELSELECT_LOG");
  return level && std::strcmp(level, "quiet") == 0;
}

int fail(ps_status status) {
  std::fprintf(stderr, "error: %s\n", ps_last_error());
  return ps_status_exit_code(status);
}

int run(const CommonOptions& opts,
        ps_status (*runner)(const ps_config*, char**), int stage1_only,
        bool estimate) {
  ps_config* config = nullptr;
  ps_status status = ps_config_load(opts.config_path.c_str(), &config);
  if (status != PS_OK) return fail(status);
  if (!opts.out_dir.empty()) {
    status = ps_config_set_string(config, "output.dir", opts.out_dir.c_str());
    if (status != PS_OK) {
      ps_config_free(config);
      return fail(status);
    }
  }
  if (opts.seed >= 0) {
    status = ps_config_set_int(config, "seed", opts.seed);
    if (status != PS_OK) {
      ps_config_free(config);
      return fail(status);
    }
  }
  if (opts.bootstrap >= 0) {
    status = ps_config_set_int(config, "estimation.bootstrap_b",
                               opts.bootstrap);
    if (status != PS_OK) {
      ps_config_free(config);
      return fail(status);
    }
  }

  char* summary = nullptr;
  status = estimate ? ps_run_estimate(config, stage1_only, &summary)
                    : runner(config, &summary);
  ps_config_free(config);
  if (status != PS_OK) return fail(status);
  if (summary && !quiet_logging()) {
    std::fputs(summary, stdout);
  }
  ps_string_free(summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"panel selection model toolkit (simulate / estimate / "
               "describe / report)"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ps_version()));

  CommonOptions sim_opts, est_opts, desc_opts, rep_opts;
  bool stage1_only = false;

  CLI::App* sim = app.add_subcommand("simulate",
                                     "Generate a synthetic panel + truth sidecar");
  add_common(sim, sim_opts);

  CLI::App* est = app.add_subcommand("estimate",
                                     "Two-stage estimation on a panel CSV");
  add_common(est, est_opts);
  est->add_flag("--stage1-only", stage1_only, "Stop after stage 1");
  est->add_option("--bootstrap", est_opts.bootstrap,
                  "Bootstrap replicates for stage-2 standard errors");

  CLI::App* desc = app.add_subcommand("describe",
                                      "Weighted group means by next-wave status");
  add_common(desc, desc_opts);

  CLI::App* rep = app.add_subcommand("report",
                                     "Naive vs corrected comparison from saved artifacts");
  add_common(rep, rep_opts);

  CLI11_PARSE(app, argc, argv);

  if (sim->parsed()) return run(sim_opts, &ps_run_simulate, 0, false);
  if (est->parsed()) return run(est_opts, nullptr, stage1_only ? 1 : 0, true);
  if (desc->parsed()) return run(desc_opts, &ps_run_describe, 0, false);
  if (rep->parsed()) return run(rep_opts, &ps_run_report, 0, false);
  return 1;
}
