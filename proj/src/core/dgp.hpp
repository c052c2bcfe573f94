#ifndef PANELSELECT_CORE_DGP_HPP
#define PANELSELECT_CORE_DGP_HPP

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "core/panel.hpp"

namespace panelselect {

struct CovariateSpec {
  std::string name;
  enum class Dist { normal, bernoulli };
  Dist dist = Dist::normal;
  double mean = 0.0;
  double sd = 1.0;
  double p = 0.5;
  bool in_z = false;
  bool in_x = false;
  bool in_w = false;
};

// Full generating process: latent indexes with person effects
//   u1 = s1*eta1 + s2*eta2,  u2 = s3*eta2,
//   u3 = c1*u1 + c2*u2 + c3*eta3  with (c1,c2,c3) solved from
//   (sigma13, sigma23, sd_u3) against the implied 2x2 block.
// Transient shocks: v1, v2 standard normal (scale normalization), v3 with
// sd_v3. Coefficient vectors carry the intercept first, then the covariates
// flagged for the equation, in declaration order.
struct TrueParams {
  Eigen::VectorXd theta;
  Eigen::VectorXd alpha;
  Eigen::VectorXd beta;
  double s1 = 0.0, s2 = 0.0, s3 = 0.0;
  double sigma13 = 0.0, sigma23 = 0.0;
  double sd_u3 = 0.0;
  double sd_v3 = 1.0;
  int t_max = 2;
  std::vector<CovariateSpec> covariates;

  Eigen::Matrix3d implied_sigma() const;
  // c1, c2, c3 for the u3 construction; fails when the implied covariance
  // is not positive semidefinite.
  std::array<double, 3> u3_coefficients() const;
  void validate() const;

  std::vector<std::string> z_names() const;
  std::vector<std::string> x_names() const;
  std::vector<std::string> w_names() const;
  // Spec over the same covariate roles, no wave dummies.
  ModelSpec model_spec() const;
};

// Latent outcomes for every person-wave, attrition ignored. a_latent at
// wave 1 is always true (the sample conditions on first-wave response).
struct LatentRecord {
  double y_latent = 0.0;
  bool e_latent = false;
  bool a_latent = true;
};

struct SimulationResult {
  PanelDataset panel;
  std::vector<std::array<double, 3>> person_effects;  // realized (u1,u2,u3)
  std::vector<LatentRecord> latent;                   // n * t_max, person-major
  std::int64_t n = 0;
  int t_max = 0;

  const LatentRecord& latent_at(std::int64_t person, int wave) const {
    return latent[static_cast<std::size_t>(person) * t_max + (wave - 1)];
  }
  double latent_mean_log_wage() const;           // over all person-waves
  double latent_mean_log_wage_employed() const;  // over e_latent = 1
  double observed_mean_log_wage() const;         // over censored sample
  std::vector<double> response_rate_by_wave() const;
};

// Deterministic in (params, n, seed); person-level substreams make the
// output independent of simulation order.
SimulationResult simulate_panel(const TrueParams& params, std::int64_t n,
                                std::uint64_t seed);

}  // namespace panelselect

#endif
