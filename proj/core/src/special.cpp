#include "mixsep/special.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_bessel.h>
#include <gsl/gsl_sf_gamma.h>

#include <cmath>
#include <stdexcept>

#include "mixsep/errors.hpp"

namespace mixsep::special {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

void quiet_gsl() {
    static const auto once = [] {
        gsl_set_error_handler_off();
        return true;
    }();
    (void)once;
}

}  // namespace

double normal_pdf(double z) { return std::exp(-0.5 * z * z - kLogSqrt2Pi); }

double normal_log_pdf(double z) { return -0.5 * z * z - kLogSqrt2Pi; }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ParameterError("normal_quantile: p must lie in (0, 1)");
    return invert_cdf(normal_cdf, p, -40.0, 40.0, normal_pdf, 0.0);
}

double ln_gamma(double x) {
    quiet_gsl();
    gsl_sf_result r;
    if (gsl_sf_lngamma_e(x, &r) != GSL_SUCCESS)
        throw NumericalError("ln_gamma failed at x=" + std::to_string(x));
    return r.val;
}

double gamma_q(double a, double x) {
    quiet_gsl();
    gsl_sf_result r;
    if (gsl_sf_gamma_inc_Q_e(a, x, &r) != GSL_SUCCESS)
        throw NumericalError("gamma_q failed at a=" + std::to_string(a) + " x=" + std::to_string(x));
    return r.val;
}

double chi_square_sf(double stat, int dof) {
    if (dof < 1) throw ParameterError("chi_square_sf: dof must be positive");
    if (stat < 0.0) throw ParameterError("chi_square_sf: statistic must be nonnegative");
    return gamma_q(0.5 * dof, 0.5 * stat);
}

double bessel_k(double nu, double x) {
    quiet_gsl();
    if (!(x > 0.0)) throw ParameterError("bessel_k: x must be positive");
    gsl_sf_result r;
    const int status = gsl_sf_bessel_Knu_e(std::fabs(nu), x, &r);
    if (status == GSL_EUNDRFLW) return 0.0;
    if (status != GSL_SUCCESS)
        throw NumericalError("bessel_k failed at nu=" + std::to_string(nu) + " x=" + std::to_string(x));
    return r.val;
}

double ln_bessel_k(double nu, double x) {
    quiet_gsl();
    if (!(x > 0.0)) throw ParameterError("ln_bessel_k: x must be positive");
    gsl_sf_result r;
    if (gsl_sf_bessel_lnKnu_e(std::fabs(nu), x, &r) != GSL_SUCCESS)
        throw NumericalError("ln_bessel_k failed at nu=" + std::to_string(nu) + " x=" + std::to_string(x));
    return r.val;
}

double invert_cdf(const std::function<double(double)>& cdf, double p, double lo, double hi,
                  const std::function<double(double)>& pdf, double hint) {
    if (!(p > 0.0 && p < 1.0)) throw ParameterError("invert_cdf: p must lie in (0, 1)");
    if (!(lo < hi)) throw ParameterError("invert_cdf: empty bracket");

    double flo = cdf(lo) - p;
    double fhi = cdf(hi) - p;
    for (int round = 0; (flo > 0.0 || fhi < 0.0) && round < 200; ++round) {
        const double span = hi - lo;
        if (flo > 0.0) {
            lo -= span;
            flo = cdf(lo) - p;
        }
        if (fhi < 0.0) {
            hi += span;
            fhi = cdf(hi) - p;
        }
    }
    if (flo > 0.0 || fhi < 0.0) throw NumericalError("invert_cdf: failed to bracket quantile");
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;

    double x = std::isfinite(hint) && hint > lo && hint < hi ? hint : 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double f = cdf(x) - p;
        if (f == 0.0) return x;
        if (f < 0.0)
            lo = x;
        else
            hi = x;
        if (hi - lo <= 1e-14 * (1.0 + std::fabs(lo) + std::fabs(hi))) break;

        double next = std::numeric_limits<double>::quiet_NaN();
        if (pdf) {
            const double d = pdf(x);
            if (d > 0.0) next = x - f / d;
        }
        // Newton step only while it stays inside the bracket.
        x = (std::isfinite(next) && next > lo && next < hi) ? next : 0.5 * (lo + hi);
    }
    return 0.5 * (lo + hi);
}

}  // namespace mixsep::special
