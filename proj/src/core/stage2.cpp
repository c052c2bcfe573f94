#include "core/stage2.hpp"

#include <cmath>
#include <random>

#include "core/dist.hpp"
#include "core/errors.hpp"
#include "core/summation.hpp"

namespace panelselect {

namespace {

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  KahanSum s;
  for (double x : v) s.add(x);
  return s.value() / static_cast<double>(v.size());
}

}  // namespace

LambdaPair selection_lambdas(double z1, double z2, double rho) {
  LambdaPair out;
  if (rho == 0.0) {
    // Independent selections factorize into two Mills ratios.
    out.p_joint = std_normal_cdf(z1) * std_normal_cdf(z2);
    out.lambda1 = inverse_mills(z1);
    out.lambda2 = inverse_mills(z2);
    return out;
  }
  double denom = std::sqrt(1.0 - rho * rho);
  double z1_star = (z2 - rho * z1) / denom;
  double z2_star = (z1 - rho * z2) / denom;
  out.p_joint = bivariate_normal_cdf(z1, z2, rho);
  out.lambda1 = std_normal_pdf(z1) * std_normal_cdf(z1_star) / out.p_joint;
  out.lambda2 = std_normal_pdf(z2) * std_normal_cdf(z2_star) / out.p_joint;
  return out;
}

double CorrectionTerms::mean_lambda1() const { return mean_of(lambda1); }
double CorrectionTerms::mean_lambda2() const { return mean_of(lambda2); }

CorrectionTerms correction_terms(const DesignSet& ds,
                                 const Stage1Params& params) {
  CorrectionTerms terms;
  const double scale1 = std::sqrt(1.0 + params.sigma11());
  const double scale2 = std::sqrt(1.0 + params.sigma22());
  bool clamped = false;
  terms.rho = clamp_correlation(implied_error_correlation(params), &clamped);
  if (clamped) terms.clamp_events = 1;

  const Eigen::Index n = ds.wage.n_rows();
  terms.lambda1.reserve(n);
  terms.lambda2.reserve(n);
  terms.p_joint.reserve(n);
  terms.wave.reserve(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    int wave = ds.wage.wave[i];
    std::int32_t emp_row = ds.wage_employment_row[i];
    double z2 = ds.employment.x.row(emp_row).dot(params.alpha) / scale2;
    double lambda1, lambda2, p;
    if (wave == 1) {
      lambda1 = 0.0;
      lambda2 = inverse_mills(z2);
      p = std_normal_cdf(z2);
    } else {
      std::int32_t att_row = ds.wage_attrition_row[i];
      double z1 = ds.attrition.x.row(att_row).dot(params.theta) / scale1;
      LambdaPair pair = selection_lambdas(z1, z2, terms.rho);
      lambda1 = pair.lambda1;
      lambda2 = pair.lambda2;
      p = pair.p_joint;
    }
    if (!(p >= 1e-300)) {
      throw Error(ErrorCode::numeric,
                  "joint selection probability underflowed for person " +
                      ds.person_ids[ds.wage.person[i]] + " at wave " +
                      std::to_string(wave));
    }
    terms.lambda1.push_back(lambda1);
    terms.lambda2.push_back(lambda2);
    terms.p_joint.push_back(p);
    terms.wave.push_back(wave);
  }
  return terms;
}

Eigen::VectorXd Stage2Fit::coefficients() const {
  if (!has_corrections) return beta;
  Eigen::VectorXd out(beta.size() + 2);
  out.head(beta.size()) = beta;
  out(beta.size()) = coef_lambda1;
  out(beta.size() + 1) = coef_lambda2;
  return out;
}

Stage2Fit fit_stage2(const DesignSet& ds, const CorrectionTerms* terms,
                     ModelSpec::WeightMode weight_mode) {
  const Eigen::Index n = ds.wage.n_rows();
  if (n == 0) {
    throw Error(ErrorCode::contract, "wage sample is empty");
  }
  const Eigen::Index kw = ds.wage.x.cols();
  const Eigen::Index k = kw + (terms ? 2 : 0);

  Stage2Fit fit;
  fit.has_corrections = terms != nullptr;
  fit.colnames = ds.wage.colnames;
  if (terms) {
    fit.colnames.push_back("lambda_attrition");
    fit.colnames.push_back("lambda_employment");
  }

  Eigen::MatrixXd x(n, k);
  x.leftCols(kw) = ds.wage.x;
  if (terms) {
    for (Eigen::Index i = 0; i < n; ++i) {
      x(i, kw) = terms->lambda1[i];
      x(i, kw + 1) = terms->lambda2[i];
    }
  }
  Eigen::VectorXd y = ds.wage.y;

  Eigen::VectorXd sqrt_w;
  if (weight_mode == ModelSpec::WeightMode::per_person) {
    sqrt_w.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      sqrt_w(i) = std::sqrt(ds.person_weight[ds.wage.person[i]]);
    }
    x.array().colwise() *= sqrt_w.array();
    y.array() *= sqrt_w.array();
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-9);
  if (qr.rank() < k) {
    std::string cols;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index j = qr.rank(); j < k; ++j) {
      if (!cols.empty()) cols += ", ";
      cols += fit.colnames[perm(j)];
    }
    throw Error(ErrorCode::singular,
                "wage design is rank deficient; collinear column(s): " + cols +
                    " (check the exclusion restrictions)");
  }
  Eigen::VectorXd coef = qr.solve(y);
  Eigen::VectorXd resid = y - x * coef;

  // HC1 robust covariance on the (possibly weight-transformed) rows.
  Eigen::MatrixXd xtx_inv =
      (x.transpose() * x).ldlt().solve(Eigen::MatrixXd::Identity(k, k));
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    double e2 = resid(i) * resid(i);
    meat.noalias() += e2 * (x.row(i).transpose() * x.row(i));
  }
  double dof_scale =
      n > k ? static_cast<double>(n) / static_cast<double>(n - k) : 1.0;
  Eigen::MatrixXd robust = dof_scale * xtx_inv * meat * xtx_inv;
  fit.se_naive = robust.diagonal().cwiseMax(0.0).cwiseSqrt();
  fit.se = fit.se_naive;

  double ss_resid = resid.squaredNorm();
  double y_mean = y.mean();
  double ss_total = (y.array() - y_mean).matrix().squaredNorm();
  double r2 = ss_total > 0.0 ? 1.0 - ss_resid / ss_total : 0.0;
  fit.r_squared_adj =
      n > k ? 1.0 - (1.0 - r2) * static_cast<double>(n - 1) /
                        static_cast<double>(n - k)
            : r2;
  fit.sigma2_resid = n > k ? ss_resid / static_cast<double>(n - k) : 0.0;

  fit.beta = coef.head(kw);
  if (terms) {
    fit.coef_lambda1 = coef(kw);
    fit.coef_lambda2 = coef(kw + 1);
  }
  fit.n_obs = n;
  std::vector<std::int64_t> counts(ds.t_max + 1, 0);
  for (Eigen::Index i = 0; i < n; ++i) ++counts[ds.wage.wave[i]];
  for (int t = 1; t <= ds.t_max; ++t) {
    if (counts[t] > 0) fit.n_by_wave.emplace_back(t, counts[t]);
  }
  return fit;
}

BootstrapResult two_stage_bootstrap_se(const DesignSet& ds,
                                       const Stage1Fit& point_fit,
                                       const Stage1Config& stage1_config,
                                       int b, std::uint64_t seed) {
  if (b < 50) {
    throw Error(ErrorCode::config, "bootstrap needs B >= 50 replicates");
  }
  const int n = ds.n_persons;
  // All replicates share the point-estimate draw matrix: draw j belongs to
  // sample position j, so identical resamples give identical estimates.
  DrawMatrix draws =
      generate_draws(point_fit.seed, n, point_fit.r_used,
                     stage1_config.antithetic);

  Stage1Config rep_config = stage1_config;
  rep_config.compute_covariance = false;
  rep_config.start = point_fit.params;
  rep_config.draws = &draws;

  std::vector<Eigen::VectorXd> estimates;
  int dropped = 0;
  std::vector<int> sample(n);
  for (int rep = 0; rep < b; ++rep) {
    std::mt19937_64 engine(mix_seed(seed, static_cast<std::uint64_t>(rep)));
    for (int i = 0; i < n; ++i) {
      sample[i] = static_cast<int>(engine() % static_cast<std::uint64_t>(n));
    }
    DesignSet rep_ds = subsample_persons(ds, sample);
    try {
      Stage1Fit s1 = fit_stage1(rep_ds, rep_config);
      if (s1.status != FitStatus::converged) {
        ++dropped;
        continue;
      }
      CorrectionTerms terms = correction_terms(rep_ds, s1.params);
      Stage2Fit s2 = fit_stage2(rep_ds, &terms, stage1_config.weight_mode);
      estimates.push_back(s2.coefficients());
    } catch (const Error&) {
      ++dropped;
    }
  }
  if (dropped * 10 > b) {
    throw Error(ErrorCode::no_convergence,
                "bootstrap failed: " + std::to_string(dropped) + " of " +
                    std::to_string(b) + " replicates did not converge");
  }

  BootstrapResult out;
  out.colnames = ds.wage.colnames;
  out.colnames.push_back("lambda_attrition");
  out.colnames.push_back("lambda_employment");
  out.b_used = static_cast<int>(estimates.size());
  out.n_dropped = dropped;
  const Eigen::Index k = estimates.front().size();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(k);
  for (const auto& e : estimates) mean += e;
  mean /= static_cast<double>(out.b_used);
  out.covariance = Eigen::MatrixXd::Zero(k, k);
  for (const auto& e : estimates) {
    Eigen::VectorXd d = e - mean;
    out.covariance.noalias() += d * d.transpose();
  }
  if (out.b_used > 1) {
    out.covariance /= static_cast<double>(out.b_used - 1);
  }
  out.se = out.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  return out;
}

SelectionGap selection_gap(double coef, double mean_term) {
  SelectionGap gap;
  gap.log_points = -coef * mean_term;
  gap.percent = 100.0 * gap.log_points;
  return gap;
}

}  // namespace panelselect
