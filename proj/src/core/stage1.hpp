#ifndef PANELSELECT_CORE_STAGE1_HPP
#define PANELSELECT_CORE_STAGE1_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/design.hpp"
#include "core/rng.hpp"

namespace panelselect {

// Index coefficients of the two selection equations plus the factor loadings
// of the person effects: u1 = s1*eta1 + s2*eta2, u2 = s3*eta2.
struct Stage1Params {
  Eigen::VectorXd theta;
  Eigen::VectorXd alpha;
  double s1 = 0.0;
  double s2 = 0.0;
  double s3 = 0.0;

  double sigma11() const { return s1 * s1 + s2 * s2; }
  double sigma12() const { return s2 * s3; }
  double sigma22() const { return s3 * s3; }
};

// corr of the pooled per-wave errors of the two equations,
// s2*s3 / sqrt((1+s1^2+s2^2)(1+s3^2)).
double implied_error_correlation(double s1, double s2, double s3);
double implied_error_correlation(const Stage1Params& params);

// corr(u1, u2) from the factor algebra; +/-1 when rank one.
double person_effect_correlation(const Stage1Params& params);

enum class FitStatus { converged, max_iter, line_search_failure };

struct Stage1Config {
  int r_draws = 50;
  std::uint64_t seed = 0;
  int max_iter = 300;
  double gtol = 1e-5;
  bool freeze_s = false;  // pin loadings at 0 (factorizes into two probits)
  bool antithetic = false;
  bool compute_covariance = true;
  ModelSpec::WeightMode weight_mode = ModelSpec::WeightMode::unweighted;
  std::optional<Stage1Params> start;  // default: separate pooled probits
  const DrawMatrix* draws = nullptr;  // reuse an existing matrix (bootstrap)
};

struct Stage1Fit {
  Stage1Params params;
  double loglik = 0.0;
  Eigen::MatrixXd covariance;            // over the free parameters
  std::vector<std::string> param_names;  // free-parameter order
  int r_used = 0;
  std::uint64_t seed = 0;
  FitStatus status = FitStatus::max_iter;
  int iterations = 0;
  bool theta_fitted = true;  // false when the data has no attrition waves
  bool covariance_projected = false;
  bool sign_flipped = false;

  Eigen::VectorXd std_errors() const {
    return covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  }
};

// Eq-level building blocks. u = (u1, u2) person effects.
double conditional_person_loglik(const DesignSet& ds, int person, double u1,
                                 double u2, const Stage1Params& params);
double conditional_person_likelihood(const DesignSet& ds, int person,
                                     double u1, double u2,
                                     const Stage1Params& params);

// Simulated mean over the person's draw slice, (1/R) sum_r L_i(u_r).
double simulated_person_likelihood(const DesignSet& ds, int person,
                                   const DrawMatrix& draws,
                                   const Stage1Params& params);

// sum_i w_i log L_is, accumulated in log space with a per-person
// log-sum-exp over draws. Deterministic under any thread count (fixed-order
// chunked compensated reduction). weights may be null (unweighted).
double simulated_loglik(const DesignSet& ds, const DrawMatrix& draws,
                        const Stage1Params& params,
                        const std::vector<double>* weights = nullptr);

// Covariance as the inverse of the negative numerical Hessian of the
// simulated log-likelihood (central differences). Flat directions raise a
// singular error; small negative curvature is projected away and flagged.
Eigen::MatrixXd stage1_standard_errors(const DesignSet& ds,
                                       const DrawMatrix& draws,
                                       const Stage1Params& params,
                                       const Stage1Config& config,
                                       bool* projected = nullptr);

// Maximum simulated likelihood for both selection equations jointly, draws
// held fixed across iterations.
Stage1Fit fit_stage1(const DesignSet& ds, const Stage1Config& config);

}  // namespace panelselect

#endif
