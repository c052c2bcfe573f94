#ifndef PANELSELECT_CORE_STAGE2_HPP
#define PANELSELECT_CORE_STAGE2_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "core/design.hpp"
#include "core/stage1.hpp"

namespace panelselect {

// Double-selection correction pair at scaled indexes (z1, z2):
//   lambda1 = phi(z1) Phi((z2 - rho z1)/sqrt(1-rho^2)) / P
//   lambda2 = phi(z2) Phi((z1 - rho z2)/sqrt(1-rho^2)) / P
//   P = F(z1, z2, rho)
struct LambdaPair {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double p_joint = 1.0;
};

LambdaPair selection_lambdas(double z1, double z2, double rho);

struct CorrectionTerms {
  std::vector<double> lambda1;  // per wage observation
  std::vector<double> lambda2;
  std::vector<double> p_joint;
  std::vector<std::int32_t> wave;
  double rho = 0.0;
  int clamp_events = 0;

  double mean_lambda1() const;
  double mean_lambda2() const;
};

// Terms for every wage observation. Wave 1 has a single selection source:
// lambda1 = 0 and lambda2 = inverse Mills of the scaled employment index.
CorrectionTerms correction_terms(const DesignSet& ds,
                                 const Stage1Params& params);

struct Stage2Fit {
  Eigen::VectorXd beta;  // coefficients on the wage design columns
  double coef_lambda1 = 0.0;  // estimate of -sigma13 under the Eq-13 convention
  double coef_lambda2 = 0.0;
  Eigen::VectorXd se;         // bootstrap when available, else se_naive
  Eigen::VectorXd se_naive;   // heteroskedasticity-robust (HC1)
  bool se_is_bootstrap = false;
  double r_squared_adj = 0.0;
  double sigma2_resid = 0.0;  // absorbs var(u3) + var(v3); not separable
  std::vector<std::pair<int, std::int64_t>> n_by_wave;
  std::vector<std::string> colnames;  // wage columns + correction terms
  std::int64_t n_obs = 0;
  bool has_corrections = false;

  // [beta; coef_lambda1; coef_lambda2] when corrections are present.
  Eigen::VectorXd coefficients() const;
};

// Pooled (weighted) least squares of log wage on the wage design plus the
// two correction regressors. terms == nullptr runs the naive regression.
Stage2Fit fit_stage2(const DesignSet& ds, const CorrectionTerms* terms,
                     ModelSpec::WeightMode weight_mode =
                         ModelSpec::WeightMode::unweighted);

struct BootstrapResult {
  Eigen::VectorXd se;
  Eigen::MatrixXd covariance;
  std::vector<std::string> colnames;
  int b_used = 0;
  int n_dropped = 0;
};

// Nonparametric cluster bootstrap over persons: each replicate reruns the
// stage-1 fit (warm-started at the point estimate, same draws) and the
// corrected stage-2 regression. Replicates that fail to converge are dropped;
// more than 10% dropped is a failure.
BootstrapResult two_stage_bootstrap_se(const DesignSet& ds,
                                       const Stage1Fit& point_fit,
                                       const Stage1Config& stage1_config,
                                       int b, std::uint64_t seed);

struct SelectionGap {
  double log_points = 0.0;
  double percent = 0.0;
};

// -coef * mean correction term, in log points and percent.
SelectionGap selection_gap(double coef, double mean_term);

}  // namespace panelselect

#endif
