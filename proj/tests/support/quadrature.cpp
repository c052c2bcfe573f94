#include "support/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace testsupport {

std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_hermite(int n) {
  // Jacobi matrix of the (physicists') Hermite recurrence; eigenvalues are
  // the nodes, weights follow from the first eigenvector components.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    double off = std::sqrt(k / 2.0);
    jacobi(k, k - 1) = off;
    jacobi(k - 1, k) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  Eigen::VectorXd nodes = eig.eigenvalues();
  Eigen::VectorXd weights(n);
  double sqrt_pi = std::sqrt(std::numbers::pi);
  for (int k = 0; k < n; ++k) {
    double v0 = eig.eigenvectors()(0, k);
    weights(k) = sqrt_pi * v0 * v0;
  }
  return {nodes, weights};
}

namespace {

double cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

// Direct product-form person likelihood at person effects (u1, u2).
double person_likelihood(const panelselect::DesignSet& ds, int person,
                         double u1, double u2,
                         const panelselect::Stage1Params& params) {
  double lik = 1.0;
  auto [ab, ae] = ds.a_span[person];
  for (std::int32_t row = ab; row < ae; ++row) {
    double lin = ds.attrition.x.row(row).dot(params.theta) + u1;
    double p = cdf(lin);
    lik *= ds.attrition.outcome[row] ? p : 1.0 - p;
  }
  auto [eb, ee] = ds.e_span[person];
  for (std::int32_t row = eb; row < ee; ++row) {
    double lin = ds.employment.x.row(row).dot(params.alpha) + u2;
    double p = cdf(lin);
    lik *= ds.employment.outcome[row] ? p : 1.0 - p;
  }
  return lik;
}

}  // namespace

double quadrature_loglik(const panelselect::DesignSet& ds,
                         const panelselect::Stage1Params& params,
                         int n_nodes) {
  auto [nodes, weights] = gauss_hermite(n_nodes);
  const double sqrt2 = std::sqrt(2.0);
  const double inv_pi = 1.0 / std::numbers::pi;
  double total = 0.0;
  for (int i = 0; i < ds.n_persons; ++i) {
    double li = 0.0;
    for (int a = 0; a < n_nodes; ++a) {
      double eta1 = sqrt2 * nodes(a);
      double wa = weights(a);
      for (int b = 0; b < n_nodes; ++b) {
        double eta2 = sqrt2 * nodes(b);
        double u1 = params.s1 * eta1 + params.s2 * eta2;
        double u2 = params.s3 * eta2;
        li += wa * weights(b) * person_likelihood(ds, i, u1, u2, params);
      }
    }
    total += std::log(li * inv_pi);
  }
  return total;
}

}  // namespace testsupport
