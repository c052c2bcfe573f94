#include "core/optim.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace panelselect {

Eigen::VectorXd fd_gradient(const ObjectiveFn& f, const Eigen::VectorXd& x,
                            double rel_step, int* n_evals) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    double h = rel_step * std::max(1.0, std::abs(x(j)));
    double xj = x(j);
    xp(j) = xj + h;
    double fp = f(xp);
    xp(j) = xj - h;
    double fm = f(xp);
    xp(j) = xj;
    g(j) = (fp - fm) / (2.0 * h);
    if (n_evals) *n_evals += 2;
  }
  return g;
}

Eigen::MatrixXd fd_hessian(const ObjectiveFn& f, const Eigen::VectorXd& x,
                           double rel_step) {
  const Eigen::Index p = x.size();
  Eigen::VectorXd h(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    h(j) = rel_step * std::max(1.0, std::abs(x(j)));
  }
  const double f0 = f(x);
  Eigen::MatrixXd hess(p, p);
  Eigen::VectorXd xp = x;
  std::vector<double> fplus(p), fminus(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    xp(j) = x(j) + h(j);
    fplus[j] = f(xp);
    xp(j) = x(j) - h(j);
    fminus[j] = f(xp);
    xp(j) = x(j);
    hess(j, j) = (fplus[j] - 2.0 * f0 + fminus[j]) / (h(j) * h(j));
  }
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      xp(i) = x(i) + h(i);
      xp(j) = x(j) + h(j);
      double fpp = f(xp);
      xp(j) = x(j) - h(j);
      double fpm = f(xp);
      xp(i) = x(i) - h(i);
      double fmm = f(xp);
      xp(j) = x(j) + h(j);
      double fmp = f(xp);
      xp(i) = x(i);
      xp(j) = x(j);
      hess(i, j) = hess(j, i) =
          (fpp - fpm - fmp + fmm) / (4.0 * h(i) * h(j));
    }
  }
  return hess;
}

OptimResult minimize_bfgs(const ObjectiveFn& f, const Eigen::VectorXd& x0,
                          const OptimOptions& opts) {
  const Eigen::Index p = x0.size();
  OptimResult res;
  res.x = x0;
  res.f = f(x0);
  res.n_evals = 1;
  if (!std::isfinite(res.f)) {
    throw Error(ErrorCode::numeric,
                "objective is not finite at the starting point");
  }
  Eigen::VectorXd g = fd_gradient(f, res.x, opts.fd_step, &res.n_evals);
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(p, p);
  bool first_update = true;

  for (res.iterations = 0; res.iterations < opts.max_iter; ++res.iterations) {
    if (g.lpNorm<Eigen::Infinity>() <= opts.gtol) {
      res.status = OptimStatus::converged;
      res.gradient = g;
      return res;
    }
    Eigen::VectorXd dir = -(hinv * g);
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      // Reset a corrupted curvature estimate to steepest descent.
      hinv.setIdentity();
      dir = -g;
      slope = g.dot(dir);
      first_update = true;
    }

    double step = 1.0;
    double f_new = 0.0;
    Eigen::VectorXd x_new;
    bool accepted = false;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      x_new = res.x + step * dir;
      f_new = f(x_new);
      ++res.n_evals;
      if (std::isfinite(f_new) &&
          f_new <= res.f + opts.armijo_c * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      res.status = OptimStatus::line_search_failure;
      res.gradient = g;
      return res;
    }

    Eigen::VectorXd g_new = fd_gradient(f, x_new, opts.fd_step, &res.n_evals);
    Eigen::VectorXd s = x_new - res.x;
    Eigen::VectorXd y = g_new - g;
    double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (first_update) {
        hinv *= sy / y.squaredNorm();
        first_update = false;
      }
      Eigen::VectorXd hy = hinv * y;
      double yhy = y.dot(hy);
      // BFGS inverse update
      hinv += ((sy + yhy) / (sy * sy)) * (s * s.transpose()) -
              (hy * s.transpose() + s * hy.transpose()) / sy;
    }
    res.x = x_new;
    res.f = f_new;
    g = g_new;
  }
  res.status = OptimStatus::max_iter;
  res.gradient = g;
  return res;
}

}  // namespace panelselect
