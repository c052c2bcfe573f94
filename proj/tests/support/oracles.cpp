#include "support/oracles.hpp"

#include <cmath>
#include <functional>

namespace testsupport {

namespace {

constexpr long double kInvSqrt2PiL = 0.398942280401432677939946059934L;
constexpr long double kSqrt2L = 1.41421356237309504880168872421L;

long double normal_pdf_ld(long double x) {
  return kInvSqrt2PiL * std::exp(-0.5L * x * x);
}

long double simpson(const std::function<long double(long double)>& f,
                    long double a, long double b, long double fa,
                    long double fm, long double fb, long double eps,
                    int depth) {
  long double m = 0.5L * (a + b);
  long double lm = 0.5L * (a + m);
  long double rm = 0.5L * (m + b);
  long double flm = f(lm);
  long double frm = f(rm);
  long double h = b - a;
  long double whole = h / 6.0L * (fa + 4.0L * fm + fb);
  long double left = h / 12.0L * (fa + 4.0L * flm + fm);
  long double right = h / 12.0L * (fm + 4.0L * frm + fb);
  long double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0L * eps) {
    return left + right + delta / 15.0L;
  }
  return simpson(f, a, m, fa, flm, fm, eps / 2.0L, depth - 1) +
         simpson(f, m, b, fm, frm, fb, eps / 2.0L, depth - 1);
}

long double integrate(const std::function<long double(long double)>& f,
                      long double a, long double b, long double eps) {
  long double m = 0.5L * (a + b);
  return simpson(f, a, b, f(a), f(m), f(b), eps, 48);
}

}  // namespace

long double normal_cdf_ld(long double x) {
  return 0.5L * erfcl(-x / kSqrt2L);
}

double bvn_quadrature(double a, double b, double rho) {
  long double r = rho;
  long double denom = std::sqrt(1.0L - r * r);
  auto integrand = [&](long double x) {
    return normal_pdf_ld(x) *
           normal_cdf_ld((static_cast<long double>(b) - r * x) / denom);
  };
  long double lo = -12.0L;
  long double hi = a;
  if (hi <= lo) {
    // Deep-tail rectangle: integrate over the actual support.
    lo = hi - 12.0L;
  }
  return static_cast<double>(integrate(integrand, lo, hi, 1e-14L));
}

}  // namespace testsupport
