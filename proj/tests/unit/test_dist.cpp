#include <doctest.h>

#include <cmath>
#include <random>

#include "core/dist.hpp"
#include "core/errors.hpp"
#include "support/oracles.hpp"

using namespace panelselect;

TEST_CASE("std_normal_pdf closed-form values") {
  CHECK(std_normal_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-12));
  CHECK(std_normal_pdf(1.0) == doctest::Approx(0.2419707245191434).epsilon(1e-12));
  CHECK(std_normal_pdf(-1.0) == doctest::Approx(std_normal_pdf(1.0)).epsilon(1e-15));
  CHECK(std_normal_pdf(10.0) == doctest::Approx(7.694598626706419e-23).epsilon(1e-10));
  CHECK(std_normal_pdf(10.0) < 1e-21);
}

TEST_CASE("std_normal_cdf reference values") {
  CHECK(std_normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std_normal_cdf(1.959964) == doctest::Approx(0.975).epsilon(1e-6));
  // frozen high-precision oracle values
  CHECK(std_normal_cdf(-8.0) ==
        doctest::Approx(6.220960574271784e-16).epsilon(1e-10));
  CHECK(std_normal_cdf(1.0) ==
        doctest::Approx(0.8413447460685429).epsilon(1e-13));
  CHECK(std_normal_cdf(-37.0) ==
        doctest::Approx(5.725571222524577e-300).epsilon(1e-9));
}

TEST_CASE("std_normal_cdf symmetry and oracle error on a grid") {
  for (double x = -8.0; x <= 8.0; x += 0.173) {
    CHECK(std::abs(std_normal_cdf(x) + std_normal_cdf(-x) - 1.0) <= 1e-15);
    double oracle = static_cast<double>(testsupport::normal_cdf_ld(x));
    CHECK(std::abs(std_normal_cdf(x) - oracle) <= 1e-12);
  }
}

TEST_CASE("cdf derivative matches pdf under central differences") {
  const double h = 1e-5;
  for (double x = -6.0; x <= 6.0; x += 0.371) {
    double fd = (std_normal_cdf(x + h) - std_normal_cdf(x - h)) / (2.0 * h);
    CHECK(std::abs(fd - std_normal_pdf(x)) <= 1e-6);
  }
}

TEST_CASE("log_std_normal_cdf stays finite and consistent") {
  for (double x = -300.0; x <= 8.0; x += 1.7) {
    double lv = log_std_normal_cdf(x);
    CHECK(std::isfinite(lv));
    if (x > -36.0) {
      CHECK(lv == doctest::Approx(std::log(std_normal_cdf(x))).epsilon(1e-12));
    }
  }
  // asymptotic branch against the long-double oracle
  for (double x : {-36.5, -37.0, -37.4}) {
    double want = static_cast<double>(
        std::log(testsupport::normal_cdf_ld(static_cast<long double>(x))));
    CHECK(log_std_normal_cdf(x) == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("inverse_mills values and tail behavior") {
  CHECK(inverse_mills(0.0) ==
        doctest::Approx(0.7978845608028654).epsilon(1e-12));
  // frozen mpmath oracle values
  CHECK(inverse_mills(-30.0) ==
        doctest::Approx(30.03325966743368).epsilon(1e-9));
  CHECK(inverse_mills(5.0) ==
        doctest::Approx(1.486719940904906e-6).epsilon(1e-9));
  CHECK(inverse_mills(-37.0) ==
        doctest::Approx(37.02698768612699).epsilon(1e-9));
  CHECK(std::isfinite(inverse_mills(-37.0)));

  SUBCASE("strictly decreasing, dominates -x on the left") {
    double prev = inverse_mills(-37.0);
    for (double x = -36.0; x <= 8.0; x += 0.37) {
      double m = inverse_mills(x);
      CHECK(m < prev);
      CHECK(m > 0.0);
      if (x < 0.0) CHECK(m > -x);
      prev = m;
    }
  }
}

TEST_CASE("std_normal_quantile against frozen values and round trip") {
  CHECK(std_normal_quantile(0.3) ==
        doctest::Approx(-0.5244005127080407).epsilon(1e-14));
  CHECK(std_normal_quantile(0.975) ==
        doctest::Approx(1.959963984540054).epsilon(1e-14));
  CHECK(std_normal_quantile(0.5) == doctest::Approx(0.0));
  std::mt19937_64 engine(7);
  std::uniform_real_distribution<double> unif(1e-12, 1.0 - 1e-12);
  for (int i = 0; i < 200; ++i) {
    double p = unif(engine);
    CHECK(std_normal_cdf(std_normal_quantile(p)) ==
          doctest::Approx(p).epsilon(1e-12));
  }
  CHECK_THROWS_AS(std_normal_quantile(0.0), Error);
  CHECK_THROWS_AS(std_normal_quantile(1.0), Error);
}

TEST_CASE("bivariate_normal_cdf anchor values") {
  CHECK(bivariate_normal_cdf(0, 0, 0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(bivariate_normal_cdf(0, 0, 0.5) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(bivariate_normal_cdf(1.6449, 1.6449, 0) ==
        doctest::Approx(0.9025).epsilon(1e-4));
  CHECK(std::abs(bivariate_normal_cdf(1.6449, 1.6449, 0) - 0.90250908683301464) <=
        1e-6);
  // frozen quadrature oracle values
  CHECK(std::abs(bivariate_normal_cdf(0.5, -0.3, 0.7) - 0.356783634796854719) <=
        1e-9);
  CHECK(std::abs(bivariate_normal_cdf(-1.2, 0.8, -0.4) - 0.0637344318094432603) <=
        1e-9);
  CHECK(std::abs(bivariate_normal_cdf(2.0, 1.0, 0.9) - 0.841096187036774546) <=
        1e-9);
  CHECK(std::abs(bivariate_normal_cdf(-0.5, -0.5, 0.95) - 0.263982272818763404) <=
        1e-9);
  CHECK(std::abs(bivariate_normal_cdf(0.3, 0.7, -0.85) - 0.37889544187778227) <=
        1e-9);
  CHECK(std::abs(bivariate_normal_cdf(1.0, -2.0, 0.2) - 0.0212349338661172713) <=
        1e-9);
  CHECK(std::abs(bivariate_normal_cdf(-3.0, 2.0, 0.6) - 0.00134989738073783392) <=
        1e-9);
  CHECK(std::abs(bivariate_normal_cdf(0.0, 0.0, 0.9999) - 0.497749190452595403) <=
        1e-9);
  CHECK(std::abs(bivariate_normal_cdf(0.0, 0.0, -0.9999) - 0.002250809547404597) <=
        1e-9);
}

TEST_CASE("bivariate_normal_cdf against the runtime quadrature oracle") {
  const double as[] = {-2.5, -1.0, -0.2, 0.0, 0.4, 1.3, 2.8};
  const double rhos[] = {-0.95, -0.6, -0.2, 0.0, 0.15, 0.5, 0.8, 0.99};
  for (double a : as) {
    for (double b : {-1.7, 0.1, 2.2}) {
      for (double rho : rhos) {
        double got = bivariate_normal_cdf(a, b, rho);
        double want = testsupport::bvn_quadrature(a, b, rho);
        CHECK(std::abs(got - want) <= 1e-7);
      }
    }
  }
}

TEST_CASE("bivariate_normal_cdf identities") {
  SUBCASE("symmetry in (a, b)") {
    std::mt19937_64 engine(11);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    std::uniform_real_distribution<double> rr(-0.99, 0.99);
    for (int i = 0; i < 300; ++i) {
      double a = unif(engine), b = unif(engine), rho = rr(engine);
      CHECK(bivariate_normal_cdf(a, b, rho) ==
            doctest::Approx(bivariate_normal_cdf(b, a, rho)).epsilon(1e-14));
    }
  }
  SUBCASE("marginal limit F(a, 37, rho) -> Phi(a)") {
    for (double a : {-2.0, -0.3, 0.0, 1.1, 2.9}) {
      for (double rho : {-0.9, -0.3, 0.0, 0.4, 0.9}) {
        CHECK(std::abs(bivariate_normal_cdf(a, 37.0, rho) -
                       std_normal_cdf(a)) <= 1e-9);
      }
    }
  }
  SUBCASE("arcsin identity at the origin") {
    for (double rho = -0.9995; rho <= 0.9995; rho += 0.0505) {
      double want = 0.25 + std::asin(rho) / (2.0 * 3.14159265358979323846);
      CHECK(std::abs(bivariate_normal_cdf(0, 0, rho) - want) <= 1e-9);
    }
  }
  SUBCASE("independence factorization at rho = 0") {
    for (double a : {-2.0, -0.5, 0.7, 2.4}) {
      for (double b : {-1.9, 0.0, 1.2}) {
        CHECK(std::abs(bivariate_normal_cdf(a, b, 0.0) -
                       std_normal_cdf(a) * std_normal_cdf(b)) <= 1e-12);
      }
    }
  }
  SUBCASE("NaN input is a domain error") {
    CHECK_THROWS_AS(bivariate_normal_cdf(std::nan(""), 0.0, 0.0), Error);
    CHECK_THROWS_AS(bivariate_normal_cdf(0.0, 0.0, std::nan("")), Error);
  }
  SUBCASE("clamping") {
    bool clamped = false;
    CHECK(clamp_correlation(0.5, &clamped) == 0.5);
    CHECK_FALSE(clamped);
    CHECK(clamp_correlation(0.99995, &clamped) == kMaxRho);
    CHECK(clamped);
    CHECK(clamp_correlation(-1.5, &clamped) == -kMaxRho);
  }
}
