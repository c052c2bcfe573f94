#ifndef PANELSELECT_CORE_DIST_HPP
#define PANELSELECT_CORE_DIST_HPP

namespace panelselect {

// Correlations fed to the bivariate CDF are clamped to +/- kMaxRho to stay
// clear of the 1/sqrt(1-rho^2) singularity.
inline constexpr double kMaxRho = 0.9999;

double std_normal_pdf(double x);

// Phi(x) via erfc; absolute error below 1e-15 over the double range.
double std_normal_cdf(double x);

// log Phi(x), finite for all finite x (asymptotic branch in the deep left
// tail where erfc underflows).
double log_std_normal_cdf(double x);

// phi(x)/Phi(x); no overflow for x down to -37 and far beyond.
double inverse_mills(double x);

// Inverse of Phi, Wichura's AS 241 (PPND16). Used as the documented normal
// transform for reproducible draws.
double std_normal_quantile(double p);

// Returns rho clamped into [-kMaxRho, kMaxRho]; sets *clamped when clipping
// occurred (callers count clamp events).
double clamp_correlation(double rho, bool* clamped = nullptr);

// P(X <= a, Y <= b) for standard bivariate normal with correlation rho.
// Gauss-Legendre quadrature on the Drezner-Wesolowsky/Genz correlation
// integral; absolute error well under 1e-7. NaN input raises a domain error.
double bivariate_normal_cdf(double a, double b, double rho);

}  // namespace panelselect

#endif
