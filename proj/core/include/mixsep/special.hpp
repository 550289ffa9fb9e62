#pragma once

#include <functional>
#include <limits>

namespace mixsep::special {

/// Standard normal density.
double normal_pdf(double z);

/// Log of the standard normal density.
double normal_log_pdf(double z);

/// Standard normal distribution function, tail-stable (erfc based).
double normal_cdf(double z);

/// Standard normal quantile.
double normal_quantile(double p);

double ln_gamma(double x);

/// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

/// Chi-square survival function with `dof` degrees of freedom.
double chi_square_sf(double stat, int dof);

/// Modified Bessel function of the second kind K_nu(x), x > 0.
double bessel_k(double nu, double x);

/// log K_nu(x); safe where K_nu itself under- or overflows.
double ln_bessel_k(double nu, double x);

/// Solves cdf(x) = p for a nondecreasing cdf.
///
/// Bisection on [lo, hi] with Newton refinement when a derivative is given;
/// the bracket is expanded geometrically if it does not straddle p. `hint`
/// seeds the search (pass NaN to start from the bracket midpoint).
double invert_cdf(const std::function<double(double)>& cdf, double p, double lo, double hi,
                  const std::function<double(double)>& pdf = nullptr,
                  double hint = std::numeric_limits<double>::quiet_NaN());

}  // namespace mixsep::special
