#include <doctest.h>

#include <cmath>

#include "core/dgp.hpp"
#include "core/errors.hpp"
#include "core/panel.hpp"
#include "support/builders.hpp"

using namespace panelselect;

namespace {

TrueParams loadings_only(double s1, double s2, double s3, double sd_u3 = 1.0,
                         double sigma13 = 0.0, double sigma23 = 0.0) {
  TrueParams p;
  p.t_max = 3;
  p.theta = Eigen::VectorXd::Zero(1);
  p.alpha = Eigen::VectorXd::Zero(1);
  p.beta = Eigen::VectorXd::Zero(1);
  p.s1 = s1;
  p.s2 = s2;
  p.s3 = s3;
  p.sd_u3 = sd_u3;
  p.sigma13 = sigma13;
  p.sigma23 = sigma23;
  return p;
}

}  // namespace

TEST_CASE("implied_sigma identity case") {
  TrueParams p = loadings_only(1.0, 0.0, 1.0);
  Eigen::Matrix3d sigma = p.implied_sigma();
  CHECK(sigma.isApprox(Eigen::Matrix3d::Identity(), 1e-14));
}

TEST_CASE("implied_sigma from the published loadings") {
  TrueParams p = loadings_only(-0.0025, 0.0286, 2.2024, 1.0);
  Eigen::Matrix3d sigma = p.implied_sigma();
  CHECK(sigma(0, 0) == doctest::Approx(8.242e-4).epsilon(1e-3));
  CHECK(sigma(0, 1) == doctest::Approx(6.299e-2).epsilon(1e-3));
  CHECK(sigma(1, 1) == doctest::Approx(4.8506).epsilon(1e-4));
  // exact algebra
  CHECK(sigma(0, 0) == doctest::Approx(0.0025 * 0.0025 + 0.0286 * 0.0286)
                           .epsilon(1e-14));
}

TEST_CASE("rank-one factor structure gives |corr| = 1") {
  TrueParams p = loadings_only(0.0, 0.7, 1.3);
  Eigen::Matrix3d sigma = p.implied_sigma();
  double corr = sigma(0, 1) / std::sqrt(sigma(0, 0) * sigma(1, 1));
  CHECK(corr == doctest::Approx(1.0).epsilon(1e-12));
  TrueParams m = loadings_only(0.0, -0.7, 1.3);
  Eigen::Matrix3d sm = m.implied_sigma();
  CHECK(sm(0, 1) / std::sqrt(sm(0, 0) * sm(1, 1)) ==
        doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("non-PSD covariance is rejected") {
  // sigma13 far beyond what sd_u3 allows
  TrueParams p = loadings_only(0.5, 0.5, 0.5, 0.1, 2.0, 0.0);
  CHECK_THROWS_AS(p.validate(), Error);
  CHECK_THROWS_AS(simulate_panel(p, 10, 1), Error);

  // rank-deficient block with incompatible cross-covariance: u2 = 0 but
  // sigma23 != 0
  TrueParams q = loadings_only(1.0, 0.0, 0.0, 1.0, 0.0, 0.5);
  CHECK_THROWS_AS(q.validate(), Error);
}

TEST_CASE("u3 coefficients reproduce the requested covariances") {
  TrueParams p = testsupport::small_dgp();
  auto [c1, c2, c3] = p.u3_coefficients();
  double s11 = p.s1 * p.s1 + p.s2 * p.s2;
  double s12 = p.s2 * p.s3;
  double s22 = p.s3 * p.s3;
  CHECK(c1 * s11 + c2 * s12 == doctest::Approx(p.sigma13).epsilon(1e-12));
  CHECK(c1 * s12 + c2 * s22 == doctest::Approx(p.sigma23).epsilon(1e-12));
  double var = c1 * c1 * s11 + c2 * c2 * s22 + 2 * c1 * c2 * s12 + c3 * c3;
  CHECK(var == doctest::Approx(p.sd_u3 * p.sd_u3).epsilon(1e-12));
}

TEST_CASE("simulation is reproducible bit for bit") {
  TrueParams p = testsupport::small_dgp();
  SimulationResult a = simulate_panel(p, 50, 99);
  SimulationResult b = simulate_panel(p, 50, 99);
  REQUIRE(a.panel.rows.size() == b.panel.rows.size());
  for (std::size_t i = 0; i < a.panel.rows.size(); ++i) {
    CHECK(a.panel.rows[i].person_id == b.panel.rows[i].person_id);
    CHECK(a.panel.rows[i].responded == b.panel.rows[i].responded);
    if (a.panel.rows[i].log_wage) {
      CHECK(*a.panel.rows[i].log_wage == *b.panel.rows[i].log_wage);
    }
  }
  SimulationResult c = simulate_panel(p, 50, 100);
  CHECK(a.person_effects != c.person_effects);
  CHECK(a.person_effects == b.person_effects);
}

TEST_CASE("simulated output passes validation and censoring structure") {
  TrueParams p = testsupport::small_dgp(4);
  SimulationResult sim = simulate_panel(p, 400, 7);
  CHECK(validate_panel(sim.panel).ok());
  for (const auto& row : sim.panel.rows) {
    if (row.log_wage) {
      CHECK(row.responded);
      CHECK(row.employed.has_value());
      CHECK(*row.employed);
    }
    if (row.employed) CHECK(row.responded);
  }
}

TEST_CASE("huge positive attrition intercept removes attrition") {
  TrueParams p = loadings_only(0.0, 0.0, 0.0);
  p.theta(0) = 10.0;
  SimulationResult sim = simulate_panel(p, 4000, 3);
  for (const auto& row : sim.panel.rows) CHECK(row.responded);
}

TEST_SUITE("slow") {
  TEST_CASE("geometric survival under all-zero coefficients") {
    TrueParams p = loadings_only(0.0, 0.0, 0.0);
    p.t_max = 6;
    SimulationResult sim = simulate_panel(p, 50000, 11);
    std::vector<double> rates = sim.response_rate_by_wave();
    for (int t = 1; t <= 6; ++t) {
      double expected = std::pow(0.5, t - 1);
      CHECK(std::abs(rates[t - 1] - expected) <= 0.01);
    }
  }

  TEST_CASE("employment rate Phi(0) = 0.5 among respondents") {
    TrueParams p = loadings_only(0.0, 0.0, 0.0);
    p.t_max = 6;
    SimulationResult sim = simulate_panel(p, 50000, 13);
    std::int64_t employed = 0, respondents = 0;
    for (const auto& row : sim.panel.rows) {
      if (row.responded) {
        ++respondents;
        if (*row.employed) ++employed;
      }
    }
    double rate = static_cast<double>(employed) / respondents;
    CHECK(std::abs(rate - 0.5) <= 0.01);
  }

  TEST_CASE("realized person effects match the implied covariance") {
    TrueParams p = testsupport::small_dgp();
    SimulationResult sim = simulate_panel(p, 50000, 17);
    Eigen::Matrix3d sample = Eigen::Matrix3d::Zero();
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto& u : sim.person_effects) {
      mean += Eigen::Vector3d(u[0], u[1], u[2]);
    }
    mean /= static_cast<double>(sim.person_effects.size());
    for (const auto& u : sim.person_effects) {
      Eigen::Vector3d d = Eigen::Vector3d(u[0], u[1], u[2]) - mean;
      sample += d * d.transpose();
    }
    sample /= static_cast<double>(sim.person_effects.size() - 1);
    Eigen::Matrix3d implied = p.implied_sigma();
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        CHECK(std::abs(sample(i, j) - implied(i, j)) <= 0.05);
      }
    }
  }

  TEST_CASE("no selection on unobservables: censored OLS recovers beta") {
    TrueParams p = testsupport::small_dgp();
    p.s2 = 0.0;  // u1 independent of u2
    p.sigma13 = 0.0;
    p.sigma23 = 0.0;
    SimulationResult sim = simulate_panel(p, 50000, 23);
    // OLS of observed y on [1, wc]
    std::vector<double> y;
    std::vector<double> wc;
    int wc_idx = sim.panel.covariate_index("wc");
    for (const auto& row : sim.panel.rows) {
      if (row.log_wage) {
        y.push_back(*row.log_wage);
        wc.push_back(row.covariates[wc_idx]);
      }
    }
    const std::size_t n = y.size();
    Eigen::MatrixXd x(n, 2);
    Eigen::VectorXd yv(n);
    for (std::size_t i = 0; i < n; ++i) {
      x(i, 0) = 1.0;
      x(i, 1) = wc[i];
      yv(i) = y[i];
    }
    Eigen::Vector2d coef =
        (x.transpose() * x).ldlt().solve(x.transpose() * yv);
    Eigen::VectorXd resid = yv - x * coef;
    double s2 = resid.squaredNorm() / (n - 2);
    Eigen::Matrix2d cov = s2 * (x.transpose() * x).inverse();
    for (int j = 0; j < 2; ++j) {
      double se = std::sqrt(cov(j, j));
      CHECK(std::abs(coef(j) - p.beta(j)) <= 3.0 * se);
    }
  }
}
