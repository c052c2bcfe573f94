#ifndef PANELSELECT_CORE_PROBIT_HPP
#define PANELSELECT_CORE_PROBIT_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace panelselect {

struct ProbitFit {
  Eigen::VectorXd beta;
  Eigen::MatrixXd covariance;  // inverse observed information
  double loglik = 0.0;
  int iterations = 0;
};

// Pooled probit MLE by Newton-Raphson with analytic score and information.
// Observations may be weighted. Throws a not_identified error when the
// parameter norm diverges with a flattening gradient (separation), and a
// singular error when the design is collinear.
ProbitFit fit_probit(const Eigen::MatrixXd& x,
                     const std::vector<std::int8_t>& outcome,
                     const std::vector<std::string>& colnames,
                     const Eigen::VectorXd* weights = nullptr);

}  // namespace panelselect

#endif
