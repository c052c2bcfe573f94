#include "core/probit.hpp"

#include <cmath>

#include "core/dist.hpp"
#include "core/errors.hpp"
#include "core/summation.hpp"

namespace panelselect {

namespace {

std::string collinear_columns(const Eigen::MatrixXd& x,
                              const std::vector<std::string>& colnames) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  Eigen::Index rank = qr.rank();
  std::string msg;
  const auto& perm = qr.colsPermutation().indices();
  for (Eigen::Index k = rank; k < x.cols(); ++k) {
    if (!msg.empty()) msg += ", ";
    msg += colnames[perm(k)];
  }
  return msg;
}

}  // namespace

ProbitFit fit_probit(const Eigen::MatrixXd& x,
                     const std::vector<std::int8_t>& outcome,
                     const std::vector<std::string>& colnames,
                     const Eigen::VectorXd* weights) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  if (n == 0) {
    throw Error(ErrorCode::contract, "probit: empty design");
  }
  {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    if (qr.rank() < p) {
      throw Error(ErrorCode::singular, "probit design is rank deficient; "
                                       "collinear column(s): " +
                                           collinear_columns(x, colnames));
    }
  }

  ProbitFit fit;
  fit.beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd q(n);
  for (Eigen::Index i = 0; i < n; ++i) q(i) = outcome[i] ? 1.0 : -1.0;
  if (std::abs(q.sum()) == static_cast<double>(n)) {
    throw Error(ErrorCode::not_identified,
                "probit did not identify: all outcomes are " +
                    std::string(outcome[0] ? "1" : "0") +
                    " (degenerate, the MLE diverges)");
  }

  Eigen::MatrixXd info(p, p);
  Eigen::VectorXd score(p);
  for (fit.iterations = 0; fit.iterations < 60; ++fit.iterations) {
    Eigen::VectorXd z = x * fit.beta;
    score.setZero();
    info.setZero();
    KahanSum ll;
    for (Eigen::Index i = 0; i < n; ++i) {
      double w = weights ? (*weights)(i) : 1.0;
      double zi = q(i) * z(i);
      double mills = inverse_mills(zi);
      ll.add(w * log_std_normal_cdf(zi));
      score.noalias() += (w * q(i) * mills) * x.row(i).transpose();
      // -d mills/dz = mills (z + mills) > 0: observed information
      info.noalias() +=
          (w * mills * (zi + mills)) * (x.row(i).transpose() * x.row(i));
    }
    fit.loglik = ll.value();

    double gnorm = score.lpNorm<Eigen::Infinity>();
    if (fit.beta.lpNorm<Eigen::Infinity>() > 30.0) {
      throw Error(ErrorCode::not_identified,
                  "probit did not identify: parameter norm diverged (" +
                      std::to_string(fit.beta.lpNorm<Eigen::Infinity>()) +
                      ") with gradient max-norm " + std::to_string(gnorm) +
                      " (separation or degenerate outcome)");
    }
    if (gnorm < 1e-9 * std::max(1.0, static_cast<double>(n))) {
      Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
      fit.covariance = ldlt.solve(Eigen::MatrixXd::Identity(p, p));
      return fit;
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    if (ldlt.info() != Eigen::Success) {
      throw Error(ErrorCode::singular, "probit information matrix is singular");
    }
    Eigen::VectorXd delta = ldlt.solve(score);
    // Dampen very large Newton steps; keeps separation divergence gradual
    // enough for the norm guard to fire with a useful message.
    double dn = delta.lpNorm<Eigen::Infinity>();
    if (dn > 5.0) delta *= 5.0 / dn;
    fit.beta += delta;
  }
  throw Error(ErrorCode::no_convergence,
              "probit did not converge in 60 iterations");
}

}  // namespace panelselect
