#ifndef PANELSELECT_TESTS_SUPPORT_QUADRATURE_HPP
#define PANELSELECT_TESTS_SUPPORT_QUADRATURE_HPP

#include <Eigen/Dense>
#include <utility>

#include "core/design.hpp"
#include "core/stage1.hpp"

namespace testsupport {

// Physicists' Gauss-Hermite nodes/weights by Golub-Welsch.
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_hermite(int n);

// Exact (quadrature) log-likelihood of the stage-1 model, integrating the
// person effects with an n_nodes^2 Gauss-Hermite rule. Independent of the
// simulation path: its own normal CDF and a direct product-form person
// likelihood.
double quadrature_loglik(const panelselect::DesignSet& ds,
                         const panelselect::Stage1Params& params, int n_nodes);

}  // namespace testsupport

#endif
