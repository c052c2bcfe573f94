#include "core/dgp.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "core/errors.hpp"
#include "core/rng.hpp"
#include "core/summation.hpp"

namespace panelselect {

namespace {

std::string padded_id(std::int64_t i, std::int64_t n) {
  int width = 1;
  for (std::int64_t v = n - 1; v >= 10; v /= 10) ++width;
  if (width > 19) width = 19;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "p%0*lld", width,
                static_cast<long long>(i));
  return buf;
}

}  // namespace

Eigen::Matrix3d TrueParams::implied_sigma() const {
  Eigen::Matrix3d sigma;
  sigma(0, 0) = s1 * s1 + s2 * s2;
  sigma(0, 1) = sigma(1, 0) = s2 * s3;
  sigma(1, 1) = s3 * s3;
  sigma(0, 2) = sigma(2, 0) = sigma13;
  sigma(1, 2) = sigma(2, 1) = sigma23;
  sigma(2, 2) = sd_u3 * sd_u3;
  return sigma;
}

std::array<double, 3> TrueParams::u3_coefficients() const {
  Eigen::Matrix2d block;
  block << s1 * s1 + s2 * s2, s2 * s3, s2 * s3, s3 * s3;
  Eigen::Vector2d rhs(sigma13, sigma23);

  // Pseudo-solve so degenerate factor structures (s2 = 0 or s3 = 0) work as
  // long as the full covariance stays PSD.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(block);
  double lmax = std::max(eig.eigenvalues().maxCoeff(), 1.0);
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (int k = 0; k < 2; ++k) {
    double lambda = eig.eigenvalues()(k);
    double proj = eig.eigenvectors().col(k).dot(rhs);
    if (lambda > 1e-12 * lmax) {
      c += eig.eigenvectors().col(k) * (proj / lambda);
    } else if (std::abs(proj) > 1e-9 * (1.0 + rhs.norm())) {
      throw Error(ErrorCode::parameter,
                  "implied covariance is not positive semidefinite: "
                  "(sigma13, sigma23) incompatible with the factor structure");
    }
  }
  double c3sq = sd_u3 * sd_u3 - c.dot(rhs);
  if (c3sq < -1e-9 * std::max(1.0, sd_u3 * sd_u3)) {
    throw Error(ErrorCode::parameter,
                "implied covariance is not positive semidefinite: "
                "var(u3) too small for the requested cross-covariances");
  }
  return {c(0), c(1), std::sqrt(std::max(c3sq, 0.0))};
}

void TrueParams::validate() const {
  if (t_max < 2) {
    throw Error(ErrorCode::parameter, "t_max must be at least 2");
  }
  if (!(sd_u3 >= 0.0) || !(sd_v3 > 0.0)) {
    throw Error(ErrorCode::parameter, "need sd_u3 >= 0 and sd_v3 > 0");
  }
  auto check_dim = [](const Eigen::VectorXd& v, std::size_t k,
                      const char* name) {
    if (static_cast<std::size_t>(v.size()) != k + 1) {
      throw Error(ErrorCode::parameter,
                  std::string(name) + " must have length 1 + #covariates (" +
                      std::to_string(k + 1) + ")");
    }
  };
  check_dim(theta, z_names().size(), "theta");
  check_dim(alpha, x_names().size(), "alpha");
  check_dim(beta, w_names().size(), "beta");
  for (const auto& cov : covariates) {
    if (cov.dist == CovariateSpec::Dist::bernoulli &&
        (cov.p < 0.0 || cov.p > 1.0)) {
      throw Error(ErrorCode::parameter,
                  "covariate '" + cov.name + "': p must be in [0,1]");
    }
    if (cov.dist == CovariateSpec::Dist::normal && !(cov.sd >= 0.0)) {
      throw Error(ErrorCode::parameter,
                  "covariate '" + cov.name + "': sd must be nonnegative");
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(implied_sigma());
  double lmax = std::max(eig.eigenvalues().maxCoeff(), 1.0);
  if (eig.eigenvalues().minCoeff() < -1e-9 * lmax) {
    throw Error(ErrorCode::parameter,
                "implied covariance is not positive semidefinite");
  }
  u3_coefficients();
}

std::vector<std::string> TrueParams::z_names() const {
  std::vector<std::string> out;
  for (const auto& c : covariates) {
    if (c.in_z) out.push_back(c.name);
  }
  return out;
}

std::vector<std::string> TrueParams::x_names() const {
  std::vector<std::string> out;
  for (const auto& c : covariates) {
    if (c.in_x) out.push_back(c.name);
  }
  return out;
}

std::vector<std::string> TrueParams::w_names() const {
  std::vector<std::string> out;
  for (const auto& c : covariates) {
    if (c.in_w) out.push_back(c.name);
  }
  return out;
}

ModelSpec TrueParams::model_spec() const {
  ModelSpec spec;
  spec.z_vars = z_names();
  spec.x_vars = x_names();
  spec.w_vars = w_names();
  return spec;
}

double SimulationResult::latent_mean_log_wage() const {
  KahanSum s;
  for (const auto& rec : latent) s.add(rec.y_latent);
  return s.value() / static_cast<double>(latent.size());
}

double SimulationResult::latent_mean_log_wage_employed() const {
  KahanSum s;
  std::int64_t count = 0;
  for (const auto& rec : latent) {
    if (rec.e_latent) {
      s.add(rec.y_latent);
      ++count;
    }
  }
  return count > 0 ? s.value() / static_cast<double>(count) : 0.0;
}

double SimulationResult::observed_mean_log_wage() const {
  KahanSum s;
  std::int64_t count = 0;
  for (const auto& row : panel.rows) {
    if (row.log_wage) {
      s.add(*row.log_wage);
      ++count;
    }
  }
  return count > 0 ? s.value() / static_cast<double>(count) : 0.0;
}

std::vector<double> SimulationResult::response_rate_by_wave() const {
  std::vector<std::int64_t> counts(t_max, 0);
  for (const auto& row : panel.rows) {
    if (row.responded) ++counts[row.wave - 1];
  }
  std::vector<double> rates(t_max);
  for (int t = 0; t < t_max; ++t) {
    rates[t] = static_cast<double>(counts[t]) / static_cast<double>(n);
  }
  return rates;
}

SimulationResult simulate_panel(const TrueParams& params, std::int64_t n,
                                std::uint64_t seed) {
  params.validate();
  if (n < 1) {
    throw Error(ErrorCode::parameter, "simulate_panel: n must be >= 1");
  }
  const int T = params.t_max;
  const auto [c1, c2, c3] = params.u3_coefficients();
  const std::size_t n_cov = params.covariates.size();

  std::vector<int> z_idx, x_idx, w_idx;
  for (std::size_t k = 0; k < n_cov; ++k) {
    if (params.covariates[k].in_z) z_idx.push_back(static_cast<int>(k));
    if (params.covariates[k].in_x) x_idx.push_back(static_cast<int>(k));
    if (params.covariates[k].in_w) w_idx.push_back(static_cast<int>(k));
  }
  auto index_of = [](const Eigen::VectorXd& coef, const std::vector<int>& idx,
                     const std::vector<double>& cov) {
    double v = coef(0);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      v += coef(static_cast<Eigen::Index>(k) + 1) * cov[idx[k]];
    }
    return v;
  };

  SimulationResult result;
  result.n = n;
  result.t_max = T;
  result.person_effects.resize(n);
  result.latent.resize(static_cast<std::size_t>(n) * T);
  for (const auto& cov : params.covariates) {
    result.panel.covariate_names.push_back(cov.name);
  }

  std::vector<std::vector<double>> cov_values(T,
                                              std::vector<double>(n_cov, 0.0));
  for (std::int64_t i = 0; i < n; ++i) {
    // Per-person substream; draw order is fixed (effects, then per wave:
    // covariates in declaration order, then v1, v2, v3) so the stream layout
    // does not depend on realized outcomes.
    NormalSampler rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
    double eta1 = rng.next_normal();
    double eta2 = rng.next_normal();
    double eta3 = rng.next_normal();
    double u1 = params.s1 * eta1 + params.s2 * eta2;
    double u2 = params.s3 * eta2;
    double u3 = c1 * u1 + c2 * u2 + c3 * eta3;
    result.person_effects[i] = {u1, u2, u3};

    std::vector<std::array<double, 3>> shocks(T);
    for (int t = 0; t < T; ++t) {
      for (std::size_t k = 0; k < n_cov; ++k) {
        const CovariateSpec& cov = params.covariates[k];
        if (cov.dist == CovariateSpec::Dist::bernoulli) {
          cov_values[t][k] = rng.next_uniform() < cov.p ? 1.0 : 0.0;
        } else {
          cov_values[t][k] = cov.mean + cov.sd * rng.next_normal();
        }
      }
      shocks[t] = {rng.next_normal(), rng.next_normal(), rng.next_normal()};
    }

    std::string id = padded_id(i, n);
    bool in_sample = true;
    for (int t = 1; t <= T; ++t) {
      const std::vector<double>& cov = cov_values[t - 1];
      double emp_index = index_of(params.alpha, x_idx, cov) + u2;
      bool e_latent = emp_index + shocks[t - 1][1] >= 0.0;
      double y_latent = index_of(params.beta, w_idx, cov) + u3 +
                        params.sd_v3 * shocks[t - 1][2];
      bool a_latent = true;
      if (t >= 2) {
        double att_index =
            index_of(params.theta, z_idx, cov_values[t - 2]) + u1;
        a_latent = att_index + shocks[t - 1][0] >= 0.0;
      }
      result.latent[static_cast<std::size_t>(i) * T + (t - 1)] = {
          y_latent, e_latent, a_latent};

      if (!in_sample) continue;
      ObservationRow row;
      row.person_id = id;
      row.wave = t;
      row.weight = 1.0;
      if (t >= 2 && !a_latent) {
        // First non-response wave: emitted with censored fields, then the
        // person is absorbed.
        row.responded = false;
        row.covariates.assign(n_cov,
                              std::numeric_limits<double>::quiet_NaN());
        in_sample = false;
      } else {
        row.responded = true;
        row.covariates = cov;
        row.employed = e_latent;
        if (e_latent) row.log_wage = y_latent;
      }
      result.panel.rows.push_back(std::move(row));
    }
  }
  result.panel.reindex();
  return result;
}

}  // namespace panelselect
