#ifndef PANELSELECT_CORE_DESCRIBE_HPP
#define PANELSELECT_CORE_DESCRIBE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/panel.hpp"

namespace panelselect {

double weighted_mean(std::span<const double> values,
                     std::span<const double> weights);

// Mean-of-squared-deviations replicate variance with an optional BRR scale
// factor (default 1).
double replicate_se(double full_estimate,
                    std::span<const double> replicate_estimates, double scale);

struct DescribeOptions {
  std::vector<std::string> variables;
  std::string replicate_weight_prefix;  // empty: bootstrap SEs instead
  double brr_scale = 1.0;
  int bootstrap_b = 200;
  std::uint64_t seed = 0;
};

struct GroupCell {
  double mean = 0.0;
  double se = 0.0;
  std::int64_t n = 0;
};

// Weighted means at wave t split by the response status at wave t+1.
struct DescribeRow {
  std::string variable;
  int wave = 0;
  GroupCell respondents;
  GroupCell attritors;
  bool significant_5pct = false;
};

struct DescribeTable {
  std::vector<DescribeRow> rows;
  std::string se_method;  // "brr" or "bootstrap"
};

// Variables may be covariate names or the built-ins employed / log_wage /
// weight; missing cells are excluded pairwise.
DescribeTable describe_panel(const PanelDataset& ds,
                             const DescribeOptions& options);

}  // namespace panelselect

#endif
