#include "core/stage1.hpp"

#include <cmath>
#include <limits>

#include "core/dist.hpp"
#include "core/errors.hpp"
#include "core/optim.hpp"
#include "core/probit.hpp"
#include "core/summation.hpp"

namespace panelselect {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kChunk = 64;  // persons per reduction chunk

// Per-draw log-likelihood terms for one person, accumulated into buf[0..R).
// buf must be zeroed by the caller.
void accumulate_person(const DesignSet& ds, int person,
                       const Eigen::VectorXd& zlin,
                       const Eigen::VectorXd& xlin, const double* u1,
                       const double* u2, int r, double* buf) {
  auto [ab, ae] = ds.a_span[person];
  for (std::int32_t row = ab; row < ae; ++row) {
    double lin = zlin(row);
    double sign = ds.attrition.outcome[row] ? 1.0 : -1.0;
    for (int j = 0; j < r; ++j) {
      buf[j] += log_std_normal_cdf(sign * (lin + u1[j]));
    }
  }
  auto [eb, ee] = ds.e_span[person];
  for (std::int32_t row = eb; row < ee; ++row) {
    double lin = xlin(row);
    double sign = ds.employment.outcome[row] ? 1.0 : -1.0;
    for (int j = 0; j < r; ++j) {
      buf[j] += log_std_normal_cdf(sign * (lin + u2[j]));
    }
  }
}

double log_sum_exp(const double* buf, int r) {
  double m = kNegInf;
  for (int j = 0; j < r; ++j) m = std::max(m, buf[j]);
  if (m == kNegInf) return kNegInf;
  double acc = 0.0;
  for (int j = 0; j < r; ++j) acc += std::exp(buf[j] - m);
  return m + std::log(acc);
}

Eigen::VectorXd linear_index(const EquationDesign& eq,
                             const Eigen::VectorXd& coef) {
  if (eq.n_rows() == 0) return Eigen::VectorXd();
  return eq.x * coef;
}

}  // namespace

double implied_error_correlation(double s1, double s2, double s3) {
  return (s2 * s3) /
         std::sqrt((1.0 + s1 * s1 + s2 * s2) * (1.0 + s3 * s3));
}

double implied_error_correlation(const Stage1Params& params) {
  return implied_error_correlation(params.s1, params.s2, params.s3);
}

double person_effect_correlation(const Stage1Params& params) {
  double denom = std::sqrt(params.sigma11() * params.sigma22());
  if (denom == 0.0) return 0.0;
  return params.sigma12() / denom;
}

double conditional_person_loglik(const DesignSet& ds, int person, double u1,
                                 double u2, const Stage1Params& params) {
  double ll = 0.0;
  auto [ab, ae] = ds.a_span[person];
  for (std::int32_t row = ab; row < ae; ++row) {
    double lin = ds.attrition.x.row(row).dot(params.theta);
    double sign = ds.attrition.outcome[row] ? 1.0 : -1.0;
    ll += log_std_normal_cdf(sign * (lin + u1));
  }
  auto [eb, ee] = ds.e_span[person];
  for (std::int32_t row = eb; row < ee; ++row) {
    double lin = ds.employment.x.row(row).dot(params.alpha);
    double sign = ds.employment.outcome[row] ? 1.0 : -1.0;
    ll += log_std_normal_cdf(sign * (lin + u2));
  }
  return ll;
}

double conditional_person_likelihood(const DesignSet& ds, int person,
                                     double u1, double u2,
                                     const Stage1Params& params) {
  return std::exp(conditional_person_loglik(ds, person, u1, u2, params));
}

double simulated_person_likelihood(const DesignSet& ds, int person,
                                   const DrawMatrix& draws,
                                   const Stage1Params& params) {
  const int r = draws.r;
  std::vector<double> buf(r, 0.0), u1(r), u2(r);
  for (int j = 0; j < r; ++j) {
    double e1 = draws.eta1(person, j);
    double e2 = draws.eta2(person, j);
    u1[j] = params.s1 * e1 + params.s2 * e2;
    u2[j] = params.s3 * e2;
  }
  Eigen::VectorXd zlin = linear_index(ds.attrition, params.theta);
  Eigen::VectorXd xlin = linear_index(ds.employment, params.alpha);
  accumulate_person(ds, person, zlin, xlin, u1.data(), u2.data(), r,
                    buf.data());
  return std::exp(log_sum_exp(buf.data(), r) - std::log(r));
}

double simulated_loglik(const DesignSet& ds, const DrawMatrix& draws,
                        const Stage1Params& params,
                        const std::vector<double>* weights) {
  const int n = ds.n_persons;
  const int r = draws.r;
  if (draws.n < n) {
    throw Error(ErrorCode::contract,
                "draw matrix covers fewer persons than the design");
  }
  const Eigen::VectorXd zlin = linear_index(ds.attrition, params.theta);
  const Eigen::VectorXd xlin = linear_index(ds.employment, params.alpha);
  const double log_r = std::log(r);

  const int n_chunks = (n + kChunk - 1) / kChunk;
  std::vector<double> chunk_sums(n_chunks, 0.0);
  std::vector<int> bad_person(n_chunks, -1);

#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < n_chunks; ++c) {
    std::vector<double> buf(r), u1(r), u2(r);
    KahanSum local;
    const int end = std::min(n, (c + 1) * kChunk);
    for (int i = c * kChunk; i < end; ++i) {
      for (int j = 0; j < r; ++j) {
        double e1 = draws.eta1(i, j);
        double e2 = draws.eta2(i, j);
        u1[j] = params.s1 * e1 + params.s2 * e2;
        u2[j] = params.s3 * e2;
        buf[j] = 0.0;
      }
      accumulate_person(ds, i, zlin, xlin, u1.data(), u2.data(), r,
                        buf.data());
      double log_li = log_sum_exp(buf.data(), r) - log_r;
      if (!std::isfinite(log_li)) {
        if (bad_person[c] < 0) bad_person[c] = i;
        continue;
      }
      local.add((weights ? (*weights)[i] : 1.0) * log_li);
    }
    chunk_sums[c] = local.value();
  }

  for (int c = 0; c < n_chunks; ++c) {
    if (bad_person[c] >= 0) {
      throw Error(ErrorCode::numeric,
                  "simulated likelihood is zero for person " +
                      ds.person_ids[bad_person[c]] +
                      " (all draw contributions underflowed)");
    }
  }
  KahanSum total;
  for (double s : chunk_sums) total.add(s);
  return total.value();
}

namespace {

struct ParamPacking {
  int kz = 0;  // 0 when the attrition block is absent
  int kx = 0;
  bool fit_s = false;
  std::vector<std::string> names;

  int size() const { return kz + kx + (fit_s ? 3 : 0); }

  Eigen::VectorXd pack(const Stage1Params& p) const {
    Eigen::VectorXd v(size());
    if (kz > 0) v.head(kz) = p.theta;
    v.segment(kz, kx) = p.alpha;
    if (fit_s) {
      v(kz + kx) = p.s1;
      v(kz + kx + 1) = p.s2;
      v(kz + kx + 2) = p.s3;
    }
    return v;
  }

  Stage1Params unpack(const Eigen::VectorXd& v, const Stage1Params& base) const {
    Stage1Params p = base;
    if (kz > 0) p.theta = v.head(kz);
    p.alpha = v.segment(kz, kx);
    if (fit_s) {
      p.s1 = v(kz + kx);
      p.s2 = v(kz + kx + 1);
      p.s3 = v(kz + kx + 2);
    }
    return p;
  }
};

ParamPacking make_packing(const DesignSet& ds, bool freeze_s) {
  ParamPacking pk;
  pk.kz = ds.attrition.n_rows() > 0
              ? static_cast<int>(ds.attrition.x.cols())
              : 0;
  pk.kx = static_cast<int>(ds.employment.x.cols());
  pk.fit_s = !freeze_s;
  for (int j = 0; j < pk.kz; ++j) {
    pk.names.push_back("attrition:" + ds.attrition.colnames[j]);
  }
  for (int j = 0; j < pk.kx; ++j) {
    pk.names.push_back("employment:" + ds.employment.colnames[j]);
  }
  if (pk.fit_s) {
    pk.names.push_back("s1");
    pk.names.push_back("s2");
    pk.names.push_back("s3");
  }
  return pk;
}

const std::vector<double>* weight_vector(const DesignSet& ds,
                                         const Stage1Config& config) {
  return config.weight_mode == ModelSpec::WeightMode::per_person
             ? &ds.person_weight
             : nullptr;
}

Eigen::MatrixXd invert_information(const Eigen::MatrixXd& hessian,
                                   const std::vector<std::string>& names,
                                   bool* projected) {
  Eigen::MatrixXd sym = 0.5 * (hessian + hessian.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  double lmax = lambda.maxCoeff();
  double flat_tol = 1e-12 * std::max(lmax, 1.0);
  std::string flat;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    if (std::abs(lambda(k)) <= flat_tol) {
      Eigen::Index dominant;
      eig.eigenvectors().col(k).cwiseAbs().maxCoeff(&dominant);
      if (!flat.empty()) flat += ", ";
      flat += names[dominant];
    }
  }
  if (!flat.empty()) {
    throw Error(ErrorCode::singular,
                "singular Hessian: flat direction(s) along " + flat);
  }
  bool any_negative = false;
  Eigen::VectorXd inv_lambda(lambda.size());
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    double l = lambda(k);
    if (l <= 0.0) {
      any_negative = true;
      l = flat_tol;
    }
    inv_lambda(k) = 1.0 / l;
  }
  if (projected) *projected = any_negative;
  Eigen::MatrixXd cov = eig.eigenvectors() * inv_lambda.asDiagonal() *
                        eig.eigenvectors().transpose();
  return 0.5 * (cov + cov.transpose());
}

}  // namespace

Eigen::MatrixXd stage1_standard_errors(const DesignSet& ds,
                                       const DrawMatrix& draws,
                                       const Stage1Params& params,
                                       const Stage1Config& config,
                                       bool* projected) {
  ParamPacking pk = make_packing(ds, config.freeze_s);
  const std::vector<double>* w = weight_vector(ds, config);
  ObjectiveFn neg_ll = [&](const Eigen::VectorXd& v) {
    return -simulated_loglik(ds, draws, pk.unpack(v, params), w);
  };
  Eigen::MatrixXd hess = fd_hessian(neg_ll, pk.pack(params), 1e-4);
  return invert_information(hess, pk.names, projected);
}

Stage1Fit fit_stage1(const DesignSet& ds, const Stage1Config& config) {
  if (ds.employment.n_rows() == 0) {
    throw Error(ErrorCode::contract, "no employment observations to fit");
  }
  ParamPacking pk = make_packing(ds, config.freeze_s);

  Stage1Params start;
  start.theta = Eigen::VectorXd::Zero(ds.attrition.x.cols());
  start.alpha = Eigen::VectorXd::Zero(ds.employment.x.cols());
  if (config.start) {
    start = *config.start;
    if ((pk.kz > 0 && start.theta.size() != pk.kz) ||
        start.alpha.size() != pk.kx) {
      throw Error(ErrorCode::contract, "start values have wrong dimensions");
    }
  } else {
    // Separate pooled probits are near the joint optimum; loadings start
    // small with s3 on the positive branch.
    const Eigen::VectorXd* pw = nullptr;
    Eigen::VectorXd wa, we;
    if (config.weight_mode == ModelSpec::WeightMode::per_person) {
      wa.resize(ds.attrition.n_rows());
      for (Eigen::Index i = 0; i < wa.size(); ++i) {
        wa(i) = ds.person_weight[ds.attrition.person[i]];
      }
      we.resize(ds.employment.n_rows());
      for (Eigen::Index i = 0; i < we.size(); ++i) {
        we(i) = ds.person_weight[ds.employment.person[i]];
      }
      pw = &wa;
    }
    if (pk.kz > 0) {
      start.theta = fit_probit(ds.attrition.x, ds.attrition.outcome,
                               ds.attrition.colnames, pw)
                        .beta;
    }
    if (config.weight_mode == ModelSpec::WeightMode::per_person) pw = &we;
    start.alpha = fit_probit(ds.employment.x, ds.employment.outcome,
                             ds.employment.colnames, pw)
                      .beta;
    if (!config.freeze_s) {
      start.s1 = 0.1;
      start.s2 = 0.1;
      start.s3 = 0.5;
    }
  }
  if (config.freeze_s) {
    start.s1 = start.s2 = start.s3 = 0.0;
  }

  DrawMatrix local_draws;
  const DrawMatrix* draws = config.draws;
  if (!draws) {
    local_draws = generate_draws(config.seed, ds.n_persons, config.r_draws,
                                 config.antithetic);
    draws = &local_draws;
  }
  const std::vector<double>* w = weight_vector(ds, config);

  ObjectiveFn neg_ll = [&](const Eigen::VectorXd& v) {
    return -simulated_loglik(ds, *draws, pk.unpack(v, start), w);
  };

  OptimOptions opts;
  opts.max_iter = config.max_iter;
  opts.gtol = config.gtol;
  OptimResult opt = minimize_bfgs(neg_ll, pk.pack(start), opts);

  Stage1Fit fit;
  fit.params = pk.unpack(opt.x, start);
  fit.param_names = pk.names;
  fit.r_used = draws->r;
  fit.seed = draws->seed;
  fit.iterations = opt.iterations;
  fit.theta_fitted = pk.kz > 0;
  switch (opt.status) {
    case OptimStatus::converged:
      fit.status = FitStatus::converged;
      break;
    case OptimStatus::max_iter:
      fit.status = FitStatus::max_iter;
      break;
    case OptimStatus::line_search_failure:
      fit.status = FitStatus::line_search_failure;
      break;
  }
  fit.loglik = -opt.f;

  // The joint sign of (s1, s2, s3) is unidentified; report the s3 >= 0
  // representative.
  if (!config.freeze_s && fit.params.s3 < 0.0) {
    fit.params.s1 = -fit.params.s1;
    fit.params.s2 = -fit.params.s2;
    fit.params.s3 = -fit.params.s3;
    fit.sign_flipped = true;
    fit.loglik = simulated_loglik(ds, *draws, fit.params, w);
  }

  if (config.compute_covariance) {
    fit.covariance = stage1_standard_errors(ds, *draws, fit.params, config,
                                            &fit.covariance_projected);
  } else {
    fit.covariance = Eigen::MatrixXd::Zero(pk.size(), pk.size());
  }
  return fit;
}

}  // namespace panelselect
