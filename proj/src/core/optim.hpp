#ifndef PANELSELECT_CORE_OPTIM_HPP
#define PANELSELECT_CORE_OPTIM_HPP

#include <Eigen/Dense>
#include <functional>

namespace panelselect {

using ObjectiveFn = std::function<double(const Eigen::VectorXd&)>;

enum class OptimStatus { converged, max_iter, line_search_failure };

struct OptimResult {
  Eigen::VectorXd x;
  double f = 0.0;
  Eigen::VectorXd gradient;
  OptimStatus status = OptimStatus::max_iter;
  int iterations = 0;
  int n_evals = 0;
};

struct OptimOptions {
  int max_iter = 300;
  double gtol = 1e-5;          // on the max-norm of the gradient
  double fd_step = 6.0e-6;     // relative central-difference step
  double armijo_c = 1e-4;
  int max_backtracks = 60;
};

Eigen::VectorXd fd_gradient(const ObjectiveFn& f, const Eigen::VectorXd& x,
                            double rel_step, int* n_evals = nullptr);

// Central second differences; symmetric by construction.
Eigen::MatrixXd fd_hessian(const ObjectiveFn& f, const Eigen::VectorXd& x,
                           double rel_step = 1e-4);

// Quasi-Newton minimizer: inverse-Hessian BFGS updates on finite-difference
// gradients with a backtracking Armijo line search. Accepted steps are
// monotone in f.
OptimResult minimize_bfgs(const ObjectiveFn& f, const Eigen::VectorXd& x0,
                          const OptimOptions& opts);

}  // namespace panelselect

#endif
