#include "core/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "core/describe.hpp"
#include "core/design.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"
#include "core/stage1.hpp"
#include "core/stage2.hpp"
#include "core/tables.hpp"

namespace panelselect {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string out_path(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.output.dir);
  return (fs::path(cfg.output.dir) / name).string();
}

void write_table(const RunConfig& cfg, const Table& table,
                 const std::string& stem, const std::string& title) {
  write_text_file(out_path(cfg, stem + ".txt"), table.pretty(title));
  write_text_file(out_path(cfg, stem + cfg.output.twin_extension()),
                  table.delimited(cfg.output.delimiter()));
}

json coef_block(const std::vector<std::string>& names,
                const Eigen::VectorXd& values) {
  json j;
  j["names"] = names;
  std::vector<double> v(values.data(), values.data() + values.size());
  j["values"] = v;
  return j;
}

std::vector<std::string> with_const(const std::vector<std::string>& names) {
  std::vector<std::string> out{"const"};
  out.insert(out.end(), names.begin(), names.end());
  return out;
}

std::string status_name(FitStatus status) {
  switch (status) {
    case FitStatus::converged:
      return "converged";
    case FitStatus::max_iter:
      return "max-iter";
    case FitStatus::line_search_failure:
      return "line-search-failure";
  }
  return "unknown";
}

json load_json_file(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::io,
                std::string("cannot open ") + what + " '" + path + "'");
  }
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    throw Error(ErrorCode::parse,
                std::string(what) + " '" + path + "' is not valid JSON");
  }
  return j;
}

// Truth sidecar lookup: explicit path, else a truth.json next to the panel.
std::string find_truth_json(const RunConfig& cfg) {
  if (!cfg.input.truth_json.empty()) return cfg.input.truth_json;
  if (!cfg.input.panel_csv.empty()) {
    fs::path probe = fs::path(cfg.input.panel_csv).parent_path() / "truth.json";
    if (fs::exists(probe)) return probe.string();
  }
  return "";
}

std::map<std::string, double> truth_coef_map(const json& truth,
                                             const char* block) {
  std::map<std::string, double> out;
  if (!truth.contains("true_params")) return out;
  const json& tp = truth["true_params"];
  if (!tp.contains(block)) return out;
  const json& b = tp[block];
  const auto& names = b["names"];
  const auto& values = b["values"];
  for (std::size_t i = 0; i < names.size(); ++i) {
    out[names[i].get<std::string>()] = values[i].get<double>();
  }
  return out;
}

}  // namespace

std::string run_simulate(const RunConfig& cfg) {
  if (!cfg.dgp) {
    throw Error(ErrorCode::config, "config: simulate needs a 'dgp' block");
  }
  const DgpConfig& dgp = *cfg.dgp;
  SimulationResult sim =
      simulate_panel(dgp.params, dgp.n, mix_seed(cfg.seed, kStreamSimulate));

  std::string panel_path = out_path(cfg, "panel.csv");
  write_panel_csv(sim.panel, panel_path);

  json truth;
  truth["schema_version"] = 1;
  truth["n"] = dgp.n;
  truth["t_max"] = dgp.params.t_max;
  truth["seed"] = cfg.seed;
  json tp;
  tp["theta"] = coef_block(with_const(dgp.params.z_names()), dgp.params.theta);
  tp["alpha"] = coef_block(with_const(dgp.params.x_names()), dgp.params.alpha);
  tp["beta"] = coef_block(with_const(dgp.params.w_names()), dgp.params.beta);
  tp["s1"] = dgp.params.s1;
  tp["s2"] = dgp.params.s2;
  tp["s3"] = dgp.params.s3;
  tp["sigma13"] = dgp.params.sigma13;
  tp["sigma23"] = dgp.params.sigma23;
  tp["sd_u3"] = dgp.params.sd_u3;
  tp["sd_v3"] = dgp.params.sd_v3;
  truth["true_params"] = tp;
  Eigen::Matrix3d sigma = dgp.params.implied_sigma();
  truth["implied_sigma"] = {
      {sigma(0, 0), sigma(0, 1), sigma(0, 2)},
      {sigma(1, 0), sigma(1, 1), sigma(1, 2)},
      {sigma(2, 0), sigma(2, 1), sigma(2, 2)}};
  json latent;
  latent["mean_log_wage"] = sim.latent_mean_log_wage();
  latent["mean_log_wage_employed"] = sim.latent_mean_log_wage_employed();
  latent["observed_mean_log_wage"] = sim.observed_mean_log_wage();
  latent["response_rate_by_wave"] = sim.response_rate_by_wave();
  truth["latent"] = latent;
  write_text_file(out_path(cfg, "truth.json"), truth.dump(2) + "\n");

  std::ostringstream os;
  os << "simulated " << dgp.n << " persons over " << dgp.params.t_max
     << " waves (" << sim.panel.rows.size() << " rows)\n"
     << "wrote " << panel_path << " and " << out_path(cfg, "truth.json")
     << "\n";
  return os.str();
}

std::string run_estimate(const RunConfig& cfg, bool stage1_only) {
  if (cfg.input.panel_csv.empty()) {
    throw Error(ErrorCode::config, "config: estimate needs input.panel_csv");
  }
  if (!cfg.model) {
    throw Error(ErrorCode::config, "config: estimate needs a 'model' block");
  }
  ModelSpec spec = *cfg.model;
  spec.validate();  // refuse missing exclusion restrictions before fitting

  PanelDataset panel = load_panel_csv(cfg.input.panel_csv, &spec);
  ValidationReport report = validate_panel(panel);
  if (!report.ok()) {
    throw Error(ErrorCode::validation,
                "panel failed validation with " +
                    std::to_string(report.violations.size()) +
                    " violation(s):\n" + report.to_string());
  }

  std::string truth_path = find_truth_json(cfg);
  json truth;
  if (!truth_path.empty()) truth = load_json_file(truth_path, "truth sidecar");

  DesignSet design = build_design_matrices(panel, spec);

  Stage1Config s1cfg;
  s1cfg.r_draws = cfg.estimation.r_draws;
  s1cfg.seed = mix_seed(cfg.seed, kStreamEstimate);
  s1cfg.max_iter = cfg.estimation.max_iter;
  s1cfg.gtol = cfg.estimation.gtol;
  s1cfg.freeze_s = cfg.estimation.freeze_s;
  s1cfg.antithetic = cfg.estimation.antithetic;
  s1cfg.weight_mode = cfg.estimation.weight_mode;
  Stage1Fit s1 = fit_stage1(design, s1cfg);

  // Stage-1 table, Table-3 style: both equations then the random-term block.
  auto truth_theta = truth_coef_map(truth, "theta");
  auto truth_alpha = truth_coef_map(truth, "alpha");
  bool has_truth = !truth.is_null();
  std::vector<std::string> headers{"equation", "term", "estimate", "std_err"};
  if (has_truth) headers.push_back("truth");
  Table t1(headers);
  Eigen::VectorXd se1 = s1.std_errors();
  int idx = 0;
  t1.add_section("Non-attrition equation");
  if (s1.theta_fitted) {
    for (std::size_t j = 0; j < design.attrition.colnames.size(); ++j) {
      const std::string& term = design.attrition.colnames[j];
      std::vector<std::string> row{"attrition", term,
                                   fmt_num(s1.params.theta(j)),
                                   fmt_num(se1(idx))};
      if (has_truth) {
        auto it = truth_theta.find(term);
        row.push_back(it != truth_theta.end() ? fmt_num(it->second) : "");
      }
      t1.add_row(std::move(row));
      ++idx;
    }
  }
  t1.add_section("Employment equation");
  for (std::size_t j = 0; j < design.employment.colnames.size(); ++j) {
    const std::string& term = design.employment.colnames[j];
    std::vector<std::string> row{"employment", term,
                                 fmt_num(s1.params.alpha(j)),
                                 fmt_num(se1(idx))};
    if (has_truth) {
      auto it = truth_alpha.find(term);
      row.push_back(it != truth_alpha.end() ? fmt_num(it->second) : "");
    }
    t1.add_row(std::move(row));
    ++idx;
  }
  t1.add_section("Parameters for the random terms");
  const char* s_names[3] = {"s1", "s2", "s3"};
  double s_values[3] = {s1.params.s1, s1.params.s2, s1.params.s3};
  for (int k = 0; k < 3; ++k) {
    std::vector<std::string> row{"random-terms", s_names[k],
                                 fmt_num(s_values[k]),
                                 cfg.estimation.freeze_s
                                     ? std::string("(frozen)")
                                     : fmt_num(se1(idx + k))};
    if (has_truth) {
      row.push_back(truth.contains("true_params")
                        ? fmt_num(truth["true_params"][s_names[k]].get<double>())
                        : "");
    }
    t1.add_row(std::move(row));
  }
  write_table(cfg, t1, "stage1_table", "Stage 1: censored bivariate selection model");

  double rho = implied_error_correlation(s1.params);

  json out;
  out["schema_version"] = 1;
  out["input_csv"] = cfg.input.panel_csv;
  out["truth_json"] = truth_path;
  out["weight_mode"] = cfg.estimation.weight_mode ==
                               ModelSpec::WeightMode::per_person
                           ? "per_person"
                           : "unweighted";
  json js1;
  js1["param_names"] = s1.param_names;
  js1["se"] = std::vector<double>(se1.data(), se1.data() + se1.size());
  js1["theta"] = coef_block(design.attrition.colnames, s1.params.theta);
  js1["alpha"] = coef_block(design.employment.colnames, s1.params.alpha);
  js1["s1"] = s1.params.s1;
  js1["s2"] = s1.params.s2;
  js1["s3"] = s1.params.s3;
  js1["loglik"] = s1.loglik;
  js1["r_draws"] = s1.r_used;
  js1["draw_seed"] = s1.seed;
  js1["status"] = status_name(s1.status);
  js1["iterations"] = s1.iterations;
  js1["sign_flipped"] = s1.sign_flipped;
  js1["covariance_projected"] = s1.covariance_projected;
  json implied;
  implied["sigma11"] = s1.params.sigma11();
  implied["sigma12"] = s1.params.sigma12();
  implied["sigma22"] = s1.params.sigma22();
  implied["rho"] = rho;
  implied["corr_u1_u2"] = person_effect_correlation(s1.params);
  js1["implied"] = implied;
  out["stage1"] = js1;

  std::ostringstream summary;
  for (const auto& w : panel.load_warnings) summary << "warning: " << w << "\n";
  summary << "stage 1: " << status_name(s1.status) << " after "
          << s1.iterations << " iterations, loglik " << fmt_num(s1.loglik)
          << "\n";
  summary << "implied error correlation rho = " << fmt_num(rho) << "\n";

  if (!stage1_only) {
    CorrectionTerms terms = correction_terms(design, s1.params);
    Stage2Fit corrected = fit_stage2(design, &terms, cfg.estimation.weight_mode);
    Stage2Fit naive = fit_stage2(design, nullptr, cfg.estimation.weight_mode);

    std::optional<BootstrapResult> boot;
    if (cfg.estimation.bootstrap_b > 0) {
      boot = two_stage_bootstrap_se(design, s1, s1cfg,
                                    cfg.estimation.bootstrap_b,
                                    mix_seed(cfg.seed, kStreamBootstrap));
      corrected.se = boot->se;
      corrected.se_is_bootstrap = true;
    }

    SelectionGap gap1 = selection_gap(corrected.coef_lambda1,
                                      terms.mean_lambda1());
    SelectionGap gap2 = selection_gap(corrected.coef_lambda2,
                                      terms.mean_lambda2());

    auto truth_beta = truth_coef_map(truth, "beta");
    std::vector<std::string> h2{"term", "estimate",
                                boot ? "se_bootstrap" : "se_robust"};
    if (boot) h2.push_back("se_robust");
    if (has_truth) h2.push_back("truth");
    Table t2(h2);
    Eigen::VectorXd full = corrected.coefficients();
    for (std::size_t j = 0; j < corrected.colnames.size(); ++j) {
      std::string term = corrected.colnames[j];
      if (term == "lambda_attrition") term = "Correction term from attrition";
      if (term == "lambda_employment") term = "Correction term from employment";
      std::vector<std::string> row{term, fmt_num(full(j)),
                                   fmt_num(corrected.se(j))};
      if (boot) row.push_back(fmt_num(corrected.se_naive(j)));
      if (has_truth) {
        auto it = truth_beta.find(corrected.colnames[j]);
        row.push_back(it != truth_beta.end() ? fmt_num(it->second) : "");
      }
      t2.add_row(std::move(row));
    }
    t2.add_section("Fit");
    t2.add_row({"Adj. R-squared", fmt_num(corrected.r_squared_adj), ""});
    for (const auto& [wave, count] : corrected.n_by_wave) {
      t2.add_row({"N wave " + std::to_string(wave),
                  std::to_string(count), ""});
    }
    write_table(cfg, t2, "stage2_table", "Stage 2: selection-adjusted wage equation");

    Table diag({"metric", "value"});
    diag.add_row({"rho", fmt_num(terms.rho)});
    diag.add_row({"rho_clamp_events", std::to_string(terms.clamp_events)});
    diag.add_row({"corr_u1_u2", fmt_num(person_effect_correlation(s1.params))});
    diag.add_row({"mean_lambda_attrition", fmt_num(terms.mean_lambda1())});
    diag.add_row({"mean_lambda_employment", fmt_num(terms.mean_lambda2())});
    diag.add_row({"coef_lambda_attrition", fmt_num(corrected.coef_lambda1)});
    diag.add_row({"coef_lambda_employment", fmt_num(corrected.coef_lambda2)});
    diag.add_row({"sigma13_hat", fmt_num(-corrected.coef_lambda1)});
    diag.add_row({"sigma23_hat", fmt_num(-corrected.coef_lambda2)});
    diag.add_row({"gap_attrition_pct", fmt_num(gap1.percent)});
    diag.add_row({"gap_employment_pct", fmt_num(gap2.percent)});
    diag.add_row({"stage1_loglik", fmt_num(s1.loglik)});
    diag.add_row({"stage1_status", status_name(s1.status)});
    diag.add_row({"stage2_n", std::to_string(corrected.n_obs)});
    diag.add_row({"sigma2_resid", fmt_num(corrected.sigma2_resid)});
    if (boot) {
      diag.add_row({"bootstrap_b_used", std::to_string(boot->b_used)});
      diag.add_row({"bootstrap_dropped", std::to_string(boot->n_dropped)});
    }
    write_table(cfg, diag, "diagnostics", "Diagnostics");

    json js2;
    js2["colnames"] = corrected.colnames;
    Eigen::VectorXd coefs = corrected.coefficients();
    js2["coef"] = std::vector<double>(coefs.data(), coefs.data() + coefs.size());
    js2["se_naive"] = std::vector<double>(corrected.se_naive.data(),
                                          corrected.se_naive.data() +
                                              corrected.se_naive.size());
    if (boot) {
      js2["se_bootstrap"] =
          std::vector<double>(boot->se.data(), boot->se.data() + boot->se.size());
      js2["bootstrap_b_used"] = boot->b_used;
      js2["bootstrap_dropped"] = boot->n_dropped;
    }
    js2["coef_lambda1"] = corrected.coef_lambda1;
    js2["coef_lambda2"] = corrected.coef_lambda2;
    js2["sigma13_hat"] = -corrected.coef_lambda1;
    js2["sigma23_hat"] = -corrected.coef_lambda2;
    js2["r_squared_adj"] = corrected.r_squared_adj;
    js2["sigma2_resid"] = corrected.sigma2_resid;
    js2["n_obs"] = corrected.n_obs;
    json nbw;
    for (const auto& [wave, count] : corrected.n_by_wave) {
      nbw[std::to_string(wave)] = count;
    }
    js2["n_by_wave"] = nbw;
    js2["mean_lambda1"] = terms.mean_lambda1();
    js2["mean_lambda2"] = terms.mean_lambda2();
    js2["clamp_events"] = terms.clamp_events;
    json gaps;
    gaps["attrition"] = {{"log_points", gap1.log_points},
                         {"percent", gap1.percent}};
    gaps["employment"] = {{"log_points", gap2.log_points},
                          {"percent", gap2.percent}};
    js2["gaps"] = gaps;
    out["stage2"] = js2;

    json jn;
    jn["colnames"] = naive.colnames;
    jn["coef"] = std::vector<double>(naive.beta.data(),
                                     naive.beta.data() + naive.beta.size());
    jn["se"] = std::vector<double>(naive.se_naive.data(),
                                   naive.se_naive.data() + naive.se_naive.size());
    jn["r_squared_adj"] = naive.r_squared_adj;
    out["naive_ols"] = jn;

    summary << "stage 2: " << corrected.n_obs << " wage observations, adj R2 "
            << fmt_num(corrected.r_squared_adj) << "\n";
    summary << "selection gaps: attrition " << fmt_num(gap1.percent)
            << "%, employment " << fmt_num(gap2.percent) << "%\n";
  }

  write_text_file(out_path(cfg, "estimate.json"), out.dump(2) + "\n");
  summary << "wrote artifacts to " << cfg.output.dir << "\n";

  if (s1.status != FitStatus::converged) {
    throw Error(ErrorCode::no_convergence,
                "stage 1 did not converge (status: " + status_name(s1.status) +
                    " after " + std::to_string(s1.iterations) +
                    " iterations); partial artifacts were written to " +
                    cfg.output.dir);
  }
  return summary.str();
}

std::string run_describe(const RunConfig& cfg) {
  if (cfg.input.panel_csv.empty()) {
    throw Error(ErrorCode::config, "config: describe needs input.panel_csv");
  }
  PanelDataset panel = load_panel_csv(cfg.input.panel_csv);
  ValidationReport report = validate_panel(panel);
  if (!report.ok()) {
    throw Error(ErrorCode::validation,
                "panel failed validation with " +
                    std::to_string(report.violations.size()) +
                    " violation(s):\n" + report.to_string());
  }
  if (cfg.describe.variables.empty()) {
    throw Error(ErrorCode::config,
                "config: describe needs describe.variables");
  }
  DescribeOptions options;
  options.variables = cfg.describe.variables;
  options.replicate_weight_prefix = cfg.describe.replicate_weight_prefix;
  options.brr_scale = cfg.describe.brr_scale;
  options.bootstrap_b = cfg.describe.bootstrap_b;
  options.seed = mix_seed(cfg.seed, kStreamDescribe);
  DescribeTable table = describe_panel(panel, options);

  Table t({"variable", "wave", "group", "mean", "se", "n", "diff_sig_5pct"});
  for (const auto& row : table.rows) {
    t.add_row({row.variable, std::to_string(row.wave), "respondents",
               fmt_num(row.respondents.mean), fmt_num(row.respondents.se),
               std::to_string(row.respondents.n),
               row.significant_5pct ? "*" : ""});
    t.add_row({row.variable, std::to_string(row.wave), "attritors",
               fmt_num(row.attritors.mean), fmt_num(row.attritors.se),
               std::to_string(row.attritors.n),
               row.significant_5pct ? "*" : ""});
  }
  write_table(cfg, t, "describe_table",
              "Group means by next-wave response status (se: " +
                  table.se_method + ")");

  std::ostringstream os;
  os << "described " << cfg.describe.variables.size() << " variable(s) over "
     << (panel.t_max - 1) << " wave transitions (se method: "
     << table.se_method << ")\n"
     << "wrote describe_table to " << cfg.output.dir << "\n";
  return os.str();
}

std::string run_report(const RunConfig& cfg) {
  std::string est_path = cfg.input.estimate_json.empty()
                             ? out_path(cfg, "estimate.json")
                             : cfg.input.estimate_json;
  if (!fs::exists(est_path)) {
    throw Error(ErrorCode::io,
                "missing estimate artifact '" + est_path +
                    "' (run estimate first)");
  }
  json est = load_json_file(est_path, "estimate artifact");
  if (!est.contains("stage2")) {
    throw Error(ErrorCode::io,
                "estimate artifact has no stage-2 block (stage1-only run?)");
  }

  json truth;
  std::string truth_path = cfg.input.truth_json;
  if (truth_path.empty() && est.contains("truth_json")) {
    truth_path = est["truth_json"].get<std::string>();
  }
  if (!truth_path.empty() && fs::exists(truth_path)) {
    truth = load_json_file(truth_path, "truth sidecar");
  }
  bool has_truth = !truth.is_null();
  auto truth_beta = truth_coef_map(truth, "beta");

  const json& s2 = est["stage2"];
  const json& naive = est["naive_ols"];
  std::vector<std::string> corrected_names =
      s2["colnames"].get<std::vector<std::string>>();
  std::vector<double> corrected_coef = s2["coef"].get<std::vector<double>>();
  std::vector<std::string> naive_names =
      naive["colnames"].get<std::vector<std::string>>();
  std::vector<double> naive_coef = naive["coef"].get<std::vector<double>>();

  std::vector<std::string> headers{"term", "naive_ols", "corrected"};
  if (has_truth) {
    headers.push_back("truth");
    headers.push_back("bias_naive");
    headers.push_back("bias_corrected");
  }
  Table t(headers);
  for (std::size_t j = 0; j < corrected_names.size(); ++j) {
    const std::string& name = corrected_names[j];
    std::string naive_cell;
    for (std::size_t k = 0; k < naive_names.size(); ++k) {
      if (naive_names[k] == name) {
        naive_cell = fmt_num(naive_coef[k]);
        break;
      }
    }
    std::vector<std::string> row{name, naive_cell, fmt_num(corrected_coef[j])};
    if (has_truth) {
      auto it = truth_beta.find(name);
      if (it != truth_beta.end()) {
        row.push_back(fmt_num(it->second));
        if (!naive_cell.empty()) {
          for (std::size_t k = 0; k < naive_names.size(); ++k) {
            if (naive_names[k] == name) {
              row.push_back(fmt_num(naive_coef[k] - it->second));
              break;
            }
          }
        } else {
          row.push_back("");
        }
        row.push_back(fmt_num(corrected_coef[j] - it->second));
      } else {
        row.push_back("");
        row.push_back("");
        row.push_back("");
      }
    }
    t.add_row(std::move(row));
  }
  t.add_section("Selection diagnostics");
  t.add_row({"mean lambda (attrition)", "", fmt_num(s2["mean_lambda1"].get<double>())});
  t.add_row({"mean lambda (employment)", "", fmt_num(s2["mean_lambda2"].get<double>())});
  t.add_row({"rho", "", fmt_num(est["stage1"]["implied"]["rho"].get<double>())});
  t.add_row({"gap attrition (pct)", "",
             fmt_num(s2["gaps"]["attrition"]["percent"].get<double>())});
  t.add_row({"gap employment (pct)", "",
             fmt_num(s2["gaps"]["employment"]["percent"].get<double>())});
  if (has_truth && truth.contains("latent")) {
    t.add_row({"observed mean log wage", "",
               fmt_num(truth["latent"]["observed_mean_log_wage"].get<double>())});
    t.add_row({"latent mean log wage", "",
               fmt_num(truth["latent"]["mean_log_wage"].get<double>())});
  }
  write_table(cfg, t, "report_table", "Naive vs selection-corrected wage equation");

  std::ostringstream os;
  os << "report over " << corrected_names.size() << " coefficient(s)"
     << (has_truth ? " with truth comparison" : "") << "\n"
     << "wrote report_table to " << cfg.output.dir << "\n";
  return os.str();
}

}  // namespace panelselect
