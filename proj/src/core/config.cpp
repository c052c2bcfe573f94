#include "core/config.hpp"

#include <fstream>

#include "core/errors.hpp"

namespace panelselect {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) {
  throw Error(ErrorCode::config, "config: " + msg);
}

const json& need(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(std::string("missing required key '") + key + "'");
  return *it;
}

Eigen::VectorXd to_vector(const json& j, const char* key) {
  if (!j.is_array()) fail(std::string("'") + key + "' must be an array");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(std::string("'") + key + "' must be numeric");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

ModelSpec::WeightMode parse_weight_mode(const std::string& s) {
  if (s == "unweighted") return ModelSpec::WeightMode::unweighted;
  if (s == "per_person") return ModelSpec::WeightMode::per_person;
  fail("weight_mode must be 'unweighted' or 'per_person'");
}

ModelSpec parse_model(const json& j) {
  ModelSpec spec;
  spec.z_vars = need(j, "z_vars").get<std::vector<std::string>>();
  spec.x_vars = need(j, "x_vars").get<std::vector<std::string>>();
  spec.w_vars = need(j, "w_vars").get<std::vector<std::string>>();
  if (auto it = j.find("wave_dummies"); it != j.end()) {
    spec.wave_dummies_attrition = it->value("attrition", false);
    spec.wave_dummies_employment = it->value("employment", false);
    spec.wave_dummies_wage = it->value("wage", false);
  }
  spec.weight_mode = parse_weight_mode(j.value("weight_mode", "unweighted"));
  spec.allow_no_exclusions = j.value("allow_no_exclusions", false);
  return spec;
}

DgpConfig parse_dgp(const json& j) {
  DgpConfig dgp;
  if (!need(j, "n").is_number_integer() || j["n"].get<std::int64_t>() < 1) {
    fail("dgp.n must be a positive integer");
  }
  dgp.n = j["n"].get<std::int64_t>();
  TrueParams& p = dgp.params;
  p.t_max = need(j, "t_max").get<int>();
  p.theta = to_vector(need(j, "theta"), "dgp.theta");
  p.alpha = to_vector(need(j, "alpha"), "dgp.alpha");
  p.beta = to_vector(need(j, "beta"), "dgp.beta");
  p.s1 = j.value("s1", 0.0);
  p.s2 = j.value("s2", 0.0);
  p.s3 = j.value("s3", 0.0);
  p.sigma13 = j.value("sigma13", 0.0);
  p.sigma23 = j.value("sigma23", 0.0);
  p.sd_u3 = j.value("sd_u3", 0.0);
  p.sd_v3 = j.value("sd_v3", 1.0);
  for (const json& cj : need(j, "covariates")) {
    CovariateSpec cov;
    cov.name = need(cj, "name").get<std::string>();
    std::string dist = cj.value("dist", "normal");
    if (dist == "normal") {
      cov.dist = CovariateSpec::Dist::normal;
      cov.mean = cj.value("mean", 0.0);
      cov.sd = cj.value("sd", 1.0);
    } else if (dist == "bernoulli") {
      cov.dist = CovariateSpec::Dist::bernoulli;
      cov.p = cj.value("p", 0.5);
    } else {
      fail("covariate '" + cov.name + "': dist must be normal or bernoulli");
    }
    cov.in_z = cj.value("in_z", false);
    cov.in_x = cj.value("in_x", false);
    cov.in_w = cj.value("in_w", false);
    dgp.params.covariates.push_back(std::move(cov));
  }
  return dgp;
}

}  // namespace

RunConfig parse_run_config(const nlohmann::json& j) {
  if (!j.is_object()) fail("top level must be an object");
  int version = need(j, "schema_version").get<int>();
  if (version != 1) {
    fail("unsupported schema_version " + std::to_string(version));
  }
  RunConfig cfg;
  const json& seed = need(j, "seed");
  if (!seed.is_number_integer() || seed.get<std::int64_t>() < 0) {
    fail("'seed' must be a nonnegative integer (no wall-clock default)");
  }
  cfg.seed = seed.get<std::uint64_t>();

  if (auto it = j.find("input"); it != j.end()) {
    cfg.input.panel_csv = it->value("panel_csv", "");
    cfg.input.truth_json = it->value("truth_json", "");
    cfg.input.estimate_json = it->value("estimate_json", "");
  }
  if (auto it = j.find("output"); it != j.end()) {
    cfg.output.dir = it->value("dir", "out");
    cfg.output.format = it->value("format", "csv");
    if (cfg.output.format != "csv" && cfg.output.format != "tsv" &&
        cfg.output.format != "pretty") {
      fail("output.format must be csv, tsv or pretty");
    }
  }
  if (auto it = j.find("model"); it != j.end()) {
    cfg.model = parse_model(*it);
  }
  if (auto it = j.find("dgp"); it != j.end()) {
    cfg.dgp = parse_dgp(*it);
  }
  if (auto it = j.find("estimation"); it != j.end()) {
    const json& e = *it;
    cfg.estimation.r_draws = e.value("r_draws", 50);
    if (cfg.estimation.r_draws < 1) fail("estimation.r_draws must be >= 1");
    cfg.estimation.max_iter = e.value("max_iter", 300);
    cfg.estimation.gtol = e.value("gtol", 1e-5);
    cfg.estimation.bootstrap_b = e.value("bootstrap_b", 0);
    cfg.estimation.antithetic = e.value("antithetic", false);
    cfg.estimation.freeze_s = e.value("freeze_s", false);
    cfg.estimation.weight_mode =
        parse_weight_mode(e.value("weight_mode", "unweighted"));
  }
  if (auto it = j.find("describe"); it != j.end()) {
    const json& d = *it;
    cfg.describe.variables =
        d.value("variables", std::vector<std::string>{});
    cfg.describe.replicate_weight_prefix =
        d.value("replicate_weight_prefix", "");
    cfg.describe.brr_scale = d.value("brr_scale", 1.0);
    cfg.describe.bootstrap_b = d.value("bootstrap_b", 200);
  }
  return cfg;
}

nlohmann::json load_config_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::io, "cannot open config '" + path + "'");
  }
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    throw Error(ErrorCode::config, "config: '" + path + "' is not valid JSON");
  }
  return j;
}

RunConfig load_run_config(const std::string& path) {
  return parse_run_config(load_config_json(path));
}

}  // namespace panelselect
