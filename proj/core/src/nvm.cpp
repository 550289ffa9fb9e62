#include "mixsep/nvm.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "mixsep/errors.hpp"
#include "mixsep/nelder_mead.hpp"
#include "mixsep/quadrature.hpp"
#include "mixsep/special.hpp"

namespace mixsep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void validate(const GenGammaParams& g) {
    if (!(g.scale > 0.0) || !(g.d > 0.0) || !(g.p > 0.0) || !std::isfinite(g.scale) ||
        !std::isfinite(g.d) || !std::isfinite(g.p))
        throw ParameterError("generalized gamma: scale, d and p must be positive");
}

void validate(const GigParams& g) {
    if (!std::isfinite(g.lambda) || !std::isfinite(g.chi) || !std::isfinite(g.psi) || g.chi < 0.0 ||
        g.psi < 0.0)
        throw ParameterError("gig: chi and psi must be finite and nonnegative");
    if (g.chi == 0.0 && g.psi == 0.0) throw ParameterError("gig: chi and psi cannot both be zero");
    if (g.lambda <= 0.0 && g.chi == 0.0)
        throw ParameterError("gig: chi must be positive when lambda <= 0");
    if (g.lambda >= 0.0 && g.psi == 0.0)
        throw ParameterError("gig: psi must be positive when lambda >= 0");
}

void validate(const NvmParams& params) {
    if (!std::isfinite(params.alpha)) throw ParameterError("nvm: alpha must be finite");
    if (!(params.sigma > 0.0) || !std::isfinite(params.sigma))
        throw ParameterError("nvm: sigma must be positive");
    std::visit([](const auto& g) { validate(g); }, params.mixing);
}

double mode_of(const GenGammaParams& g) {
    return g.d > 1.0 ? g.scale * std::pow((g.d - 1.0) / g.p, 1.0 / g.p) : 0.0;
}

double mode_of(const GigParams& g) {
    if (g.psi == 0.0) return g.chi / (2.0 * (1.0 - g.lambda));
    const double lm = g.lambda - 1.0;
    return (lm + std::sqrt(lm * lm + g.chi * g.psi)) / g.psi;
}

double sample_std(std::span<const double> sample) {
    double mean = 0.0;
    for (double x : sample) mean += x;
    mean /= static_cast<double>(sample.size());
    double acc = 0.0;
    for (double x : sample) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / static_cast<double>(sample.size()));
}

// The u maximizing the normal factor of the integrand, used as a probe hint.
double normal_factor_peak(double alpha, double sigma, double x) {
    if (alpha == 0.0) return x * x / (sigma * sigma);
    const double s2 = sigma * sigma;
    return (-s2 + std::sqrt(s2 * s2 + 4.0 * alpha * alpha * x * x)) / (2.0 * alpha * alpha);
}

std::vector<double> integrand_hints(const NvmParams& params, double x) {
    std::vector<double> hints;
    std::visit([&](const auto& g) { hints.push_back(mode_of(g)); }, params.mixing);
    const double mean = std::visit([](const auto& g) { return mixing_mean(g); }, params.mixing);
    if (std::isfinite(mean)) hints.push_back(mean);
    hints.push_back(normal_factor_peak(params.alpha, params.sigma, x));
    return hints;
}

double mixing_log_pdf_of(const NvmParams& params, double u) {
    return std::visit([u](const auto& g) { return mixing_log_pdf(g, u); }, params.mixing);
}

// ---- fixed likelihood grid for fitting --------------------------------------

// Kronrod-15 panel rule reused as a fixed composite quadrature.
constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691, 0.7415311855993944,
    0.5860872354676911, 0.4058451513773972, 0.2077849550078985, 0.0,
};
constexpr double kWgk[8] = {
    0.02293532201052922, 0.06309209262997855, 0.1047900103222502, 0.1406532597155259,
    0.1690047266392679,  0.1903505780647854,  0.2044329400752989, 0.2094821410847278,
};

struct LikGrid {
    std::vector<double> u;
    // log of (quadrature weight * u * mixing density) per node
    std::vector<double> log_mass;
};

// Brackets where u * g(u) carries mass (in t = log u) and lays down a fixed
// composite quadrature over it.
LikGrid build_lik_grid(const std::function<double(double)>& log_g,
                       const std::vector<double>& hints_u, int nodes_per_unit) {
    const auto log_h = [&](double t) { return log_g(std::exp(t)) + t; };

    std::vector<double> probes;
    for (int i = -92; i <= 92; ++i) probes.push_back(0.5 * i);
    for (double u : hints_u)
        if (u > 0.0 && std::isfinite(u))
            for (int i = -2; i <= 2; ++i) probes.push_back(std::log(u) + 0.25 * i);

    double peak = -kInf, t_peak = 0.0;
    for (double t : probes) {
        const double v = log_h(t);
        if (v > peak) {
            peak = v;
            t_peak = t;
        }
    }
    if (!std::isfinite(peak)) return {};

    const double cutoff = peak - 80.0;
    double t_lo = t_peak, t_hi = t_peak;
    while (t_lo > -700.0 && log_h(t_lo - 0.5) > cutoff) t_lo -= 0.5;
    while (t_hi < 700.0 && log_h(t_hi + 0.5) > cutoff) t_hi += 0.5;
    t_lo -= 1.0;
    t_hi += 1.0;

    const int panels =
        std::max(1, static_cast<int>(std::ceil((t_hi - t_lo) * nodes_per_unit / 15.0)));
    const double panel_width = (t_hi - t_lo) / panels;

    LikGrid grid;
    grid.u.reserve(static_cast<std::size_t>(panels) * 15);
    grid.log_mass.reserve(grid.u.capacity());
    for (int p = 0; p < panels; ++p) {
        const double center = t_lo + (p + 0.5) * panel_width;
        const double half = 0.5 * panel_width;
        for (int i = 0; i < 15; ++i) {
            const double offset = i < 8 ? -kXgk[i] : kXgk[14 - i];
            const double t = center + half * offset;
            const double w = kWgk[i < 8 ? i : 14 - i] * half;
            const double lm = std::log(w) + log_h(t);
            if (!std::isfinite(lm)) continue;
            grid.u.push_back(std::exp(t));
            grid.log_mass.push_back(lm);
        }
    }
    return grid;
}

double grid_log_likelihood(std::span<const double> sample, double alpha, double sigma,
                           const LikGrid& grid) {
    const std::size_t m = grid.u.size();
    if (m == 0) return -kInf;

    std::vector<double> drift(m), scale(m), base(m);
    for (std::size_t i = 0; i < m; ++i) {
        drift[i] = alpha * grid.u[i];
        scale[i] = sigma * std::sqrt(grid.u[i]);
        base[i] = grid.log_mass[i] - std::log(scale[i]);
    }

    double total = 0.0;
    std::vector<double> term(m);
    for (double x : sample) {
        double max_term = -kInf;
        for (std::size_t i = 0; i < m; ++i) {
            const double z = (x - drift[i]) / scale[i];
            term[i] = base[i] - 0.5 * z * z;
            max_term = std::max(max_term, term[i]);
        }
        if (!std::isfinite(max_term)) return -kInf;
        double acc = 0.0;
        for (double t : term) acc += std::exp(t - max_term);
        // the constant 1/sqrt(2 pi) of every normal factor
        total += max_term + std::log(acc) - 0.91893853320467274178;
    }
    return total;
}

// ---- mean-one parametrizations ----------------------------------------------

struct ThetaMap {
    std::function<bool(std::span<const double>)> in_box;
    std::function<NvmParams(std::span<const double>)> to_params;
};

ThetaMap theta_map(MixingFamily family) {
    if (family == MixingFamily::GeneralizedGamma) {
        return {
            [](std::span<const double> t) {
                return std::fabs(t[0]) <= 1e6 && std::fabs(t[1]) <= 20.0 && t[2] >= -5.0 &&
                       t[2] <= 6.0 && t[3] >= -5.0 && t[3] <= 5.0;
            },
            [](std::span<const double> t) {
                const double d = std::exp(t[2]), p = std::exp(t[3]);
                const double scale =
                    std::exp(special::ln_gamma(d / p) - special::ln_gamma((d + 1.0) / p));
                return NvmParams{t[0], std::exp(t[1]), GenGammaParams{scale, d, p}};
            },
        };
    }
    return {
        [](std::span<const double> t) {
            return std::fabs(t[0]) <= 1e6 && std::fabs(t[1]) <= 20.0 && std::fabs(t[2]) <= 30.0 &&
                   std::fabs(t[3]) <= 9.0;
        },
        [](std::span<const double> t) {
            const double lambda = t[2], omega = std::exp(t[3]);
            const double ratio = std::exp(special::ln_bessel_k(lambda, omega) -
                                          special::ln_bessel_k(lambda + 1.0, omega));
            return NvmParams{t[0], std::exp(t[1]), GigParams{lambda, omega * ratio, omega / ratio}};
        },
    };
}

std::vector<double> theta_from_init(const NvmParams& init, MixingFamily family) {
    if (family_of(init) != family)
        throw ParameterError("fit_nvm: init mixing family does not match the requested family");
    const double c = std::visit([](const auto& g) { return mixing_mean(g); }, init.mixing);
    if (!(c > 0.0) || !std::isfinite(c))
        throw ParameterError("fit_nvm: init mixing density must have a finite positive mean");

    // Rescale onto the mean-one slice; the distribution of X is unchanged.
    const double alpha = init.alpha * c;
    const double log_sigma = std::log(init.sigma * std::sqrt(c));
    if (family == MixingFamily::GeneralizedGamma) {
        const auto& g = std::get<GenGammaParams>(init.mixing);
        return {alpha, log_sigma, std::log(g.d), std::log(g.p)};
    }
    const auto& g = std::get<GigParams>(init.mixing);
    const double omega = g.chi > 0.0 && g.psi > 0.0 ? std::sqrt(g.chi * g.psi) : 0.0;
    if (!(omega > 0.0))
        throw ParameterError("fit_nvm: gig init must have positive chi and psi");
    return {alpha, log_sigma, g.lambda, std::log(omega)};
}

// The mean-one gamma-ratio scale underflows to zero at extreme d/p corners of
// the search box; such candidates must be rejected, not validated.
bool mapped_usable(const NvmParams& params) {
    if (const auto* g = std::get_if<GenGammaParams>(&params.mixing))
        return g->scale > 0.0 && std::isfinite(g->scale);
    const auto& g = std::get<GigParams>(params.mixing);
    return g.chi > 0.0 && std::isfinite(g.chi) && g.psi > 0.0 && std::isfinite(g.psi);
}

}  // namespace

MixingFamily family_of(const NvmParams& params) {
    return std::holds_alternative<GenGammaParams>(params.mixing)
               ? MixingFamily::GeneralizedGamma
               : MixingFamily::GeneralizedInverseGaussian;
}

double mixing_log_pdf(const GenGammaParams& g, double u) {
    validate(g);
    if (!(u > 0.0)) return -kInf;
    return std::log(g.p) - g.d * std::log(g.scale) - special::ln_gamma(g.d / g.p) +
           (g.d - 1.0) * std::log(u) - std::pow(u / g.scale, g.p);
}

double mixing_log_pdf(const GigParams& g, double u) {
    validate(g);
    if (!(u > 0.0)) return -kInf;
    if (g.chi == 0.0)
        return g.lambda * std::log(0.5 * g.psi) - special::ln_gamma(g.lambda) +
               (g.lambda - 1.0) * std::log(u) - 0.5 * g.psi * u;
    if (g.psi == 0.0)
        return -g.lambda * std::log(0.5 * g.chi) - special::ln_gamma(-g.lambda) +
               (g.lambda - 1.0) * std::log(u) - 0.5 * g.chi / u;
    const double omega = std::sqrt(g.chi * g.psi);
    return 0.5 * g.lambda * (std::log(g.psi) - std::log(g.chi)) + (g.lambda - 1.0) * std::log(u) -
           0.5 * (g.chi / u + g.psi * u) - std::log(2.0) - special::ln_bessel_k(g.lambda, omega);
}

double mixing_pdf(const GenGammaParams& g, double u) {
    const double lv = mixing_log_pdf(g, u);
    return std::isfinite(lv) ? std::exp(lv) : 0.0;
}

double mixing_pdf(const GigParams& g, double u) {
    const double lv = mixing_log_pdf(g, u);
    return std::isfinite(lv) ? std::exp(lv) : 0.0;
}

double mixing_mean(const GenGammaParams& g) {
    validate(g);
    return g.scale * std::exp(special::ln_gamma((g.d + 1.0) / g.p) - special::ln_gamma(g.d / g.p));
}

double mixing_mean(const GigParams& g) {
    validate(g);
    if (g.chi == 0.0) return 2.0 * g.lambda / g.psi;
    if (g.psi == 0.0) return -g.lambda > 1.0 ? g.chi / (2.0 * (-g.lambda - 1.0)) : kInf;
    const double omega = std::sqrt(g.chi * g.psi);
    return std::exp(0.5 * (std::log(g.chi) - std::log(g.psi)) +
                    special::ln_bessel_k(g.lambda + 1.0, omega) -
                    special::ln_bessel_k(g.lambda, omega));
}

double nvm_pdf(const NvmParams& params, double x) {
    validate(params);
    const auto integrand = [&](double u) {
        if (!(u > 0.0)) return 0.0;
        const double s = params.sigma * std::sqrt(u);
        const double z = (x - params.alpha * u) / s;
        const double lv = mixing_log_pdf_of(params, u) + special::normal_log_pdf(z) - std::log(s);
        return std::isfinite(lv) ? std::exp(lv) : 0.0;
    };
    const quad::Result r =
        quad::integrate_positive_axis_log(integrand, integrand_hints(params, x), {1e-10, 1e-300});
    if (!r.converged)
        throw NumericalError("nvm_pdf: quadrature did not converge at x=" + std::to_string(x));
    return std::max(r.value, 0.0);
}

double nvm_cdf(const NvmParams& params, double x) {
    validate(params);
    const auto integrand = [&](double u) {
        if (!(u > 0.0)) return 0.0;
        const double lg = mixing_log_pdf_of(params, u);
        if (!std::isfinite(lg)) return 0.0;
        const double z = (x - params.alpha * u) / (params.sigma * std::sqrt(u));
        return std::exp(lg) * special::normal_cdf(z);
    };
    const quad::Result r =
        quad::integrate_positive_axis_log(integrand, integrand_hints(params, x), {1e-10, 1e-300});
    if (!r.converged)
        throw NumericalError("nvm_cdf: quadrature did not converge at x=" + std::to_string(x));
    return std::clamp(r.value, 0.0, 1.0);
}

NvmFit fit_nvm(std::span<const double> sample, MixingFamily family,
               const std::optional<NvmParams>& init, const NvmFitConfig& config) {
    if (sample.size() < 30) throw SizeError("fit_nvm: needs at least 30 points");
    const double spread = sample_std(sample);
    if (spread == 0.0) throw DegenerateDataError("fit_nvm: sample is constant");

    const ThetaMap map = theta_map(family);
    std::vector<double> theta0;
    if (init) {
        validate(*init);
        theta0 = theta_from_init(*init, family);
        if (!map.in_box(theta0)) throw ParameterError("fit_nvm: init lies outside the search box");
    } else if (family == MixingFamily::GeneralizedGamma) {
        theta0 = {0.0, std::log(spread), 0.0, 0.0};
    } else {
        theta0 = {0.0, std::log(spread), 1.0, 0.0};
    }

    const auto objective = [&](std::span<const double> theta) {
        if (!map.in_box(theta)) return kInf;
        const NvmParams params = map.to_params(theta);
        if (!mapped_usable(params)) return kInf;
        const auto log_g = [&params](double u) { return mixing_log_pdf_of(params, u); };
        std::vector<double> hints;
        std::visit([&](const auto& g) { hints.push_back(mode_of(g)); }, params.mixing);
        hints.push_back(1.0);  // the mixing mean, by construction
        const LikGrid grid = build_lik_grid(log_g, hints, config.nodes_per_unit);
        return -grid_log_likelihood(sample, params.alpha, params.sigma, grid);
    };

    const optim::SimplexResult best =
        optim::minimize(objective, theta0, {config.max_evaluations, 1e-7, 1e-10, 0.25});
    return {map.to_params(best.x), -best.value, best.evaluations, best.converged};
}

AlphaTrack alpha_track(std::span<const double> series, int window, int shift, MixingFamily family,
                       const NvmFitConfig& config) {
    if (shift < 1) throw ParameterError("alpha_track: shift must be positive");
    if (window < 30) throw SizeError("alpha_track: window must hold at least 30 samples");
    if (series.size() < static_cast<std::size_t>(window))
        throw SizeError("alpha_track: series shorter than the window");

    const std::size_t rows = (series.size() - window) / shift + 1;
    AlphaTrack track{window, shift, {}, {}, {}};
    track.alpha.reserve(rows);
    track.log_likelihood.reserve(rows);
    track.converged.reserve(rows);

    std::optional<NvmParams> warm;
    for (std::size_t r = 0; r < rows; ++r) {
        const auto win = series.subspan(r * shift, window);
        const auto [mn, mx] = std::minmax_element(win.begin(), win.end());
        if (*mn == *mx) {
            track.alpha.push_back(0.0);
            track.log_likelihood.push_back(kNan);
            track.converged.push_back(0);
            warm.reset();
            continue;
        }
        const NvmFit fit = fit_nvm(win, family, warm, config);
        warm = fit.params;
        track.alpha.push_back(fit.params.alpha);
        track.log_likelihood.push_back(fit.log_likelihood);
        track.converged.push_back(fit.converged ? 1 : 0);
    }
    return track;
}

std::pair<double, double> gof_compare(std::span<const double> sample, const NvmParams& a,
                                      const NvmParams& b, int bins) {
    if (bins < 2) throw ParameterError("gof_compare: needs at least two bins");
    if (sample.size() < static_cast<std::size_t>(5 * bins))
        throw SizeError("gof_compare: needs at least 5 points per bin");

    const auto [mn, mx] = std::minmax_element(sample.begin(), sample.end());
    const double span = std::max(*mx - *mn, 1.0);

    const auto pvalue = [&](const NvmParams& params) {
        std::vector<double> cuts(bins - 1);
        for (int q = 1; q < bins; ++q)
            cuts[q - 1] = special::invert_cdf([&](double x) { return nvm_cdf(params, x); },
                                              static_cast<double>(q) / bins, *mn - span, *mx + span);
        std::vector<double> counts(bins, 0.0);
        for (double x : sample)
            counts[std::lower_bound(cuts.begin(), cuts.end(), x) - cuts.begin()] += 1.0;
        const double expected = static_cast<double>(sample.size()) / bins;
        double stat = 0.0;
        for (double c : counts) stat += (c - expected) * (c - expected) / expected;
        return special::chi_square_sf(stat, bins - 1);
    };
    return {pvalue(a), pvalue(b)};
}

}  // namespace mixsep
