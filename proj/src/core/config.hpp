#ifndef PANELSELECT_CORE_CONFIG_HPP
#define PANELSELECT_CORE_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "core/dgp.hpp"
#include "core/panel.hpp"

namespace panelselect {

struct InputConfig {
  std::string panel_csv;
  std::string truth_json;     // optional; probed next to panel_csv if empty
  std::string estimate_json;  // optional; defaults to <output.dir>/estimate.json
};

struct OutputConfig {
  std::string dir = "out";
  std::string format = "csv";  // csv | tsv | pretty (twin stays csv)

  char delimiter() const { return format == "tsv" ? '\t' : ','; }
  std::string twin_extension() const { return format == "tsv" ? ".tsv" : ".csv"; }
};

struct EstimationConfig {
  int r_draws = 50;
  int max_iter = 300;
  double gtol = 1e-5;
  int bootstrap_b = 0;  // 0 = no bootstrap
  bool antithetic = false;
  bool freeze_s = false;
  ModelSpec::WeightMode weight_mode = ModelSpec::WeightMode::unweighted;
};

struct DescribeConfig {
  std::vector<std::string> variables;
  std::string replicate_weight_prefix;
  double brr_scale = 1.0;
  int bootstrap_b = 200;
};

struct DgpConfig {
  TrueParams params;
  std::int64_t n = 0;
};

// Seed substreams per command so one master seed pins the whole tree.
inline constexpr std::uint64_t kStreamSimulate = 1;
inline constexpr std::uint64_t kStreamEstimate = 2;
inline constexpr std::uint64_t kStreamBootstrap = 3;
inline constexpr std::uint64_t kStreamDescribe = 4;

struct RunConfig {
  std::uint64_t seed = 0;  // required in the file; no wall-clock default
  InputConfig input;
  OutputConfig output;
  std::optional<ModelSpec> model;
  std::optional<DgpConfig> dgp;
  EstimationConfig estimation;
  DescribeConfig describe;
};

// Parses and validates the versioned JSON config (schema_version 1).
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);
nlohmann::json load_config_json(const std::string& path);

}  // namespace panelselect

#endif
