#include "mixsep/em.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "mixsep/errors.hpp"
#include "mixsep/special.hpp"

namespace mixsep {

namespace {

double sample_mean(std::span<const double> sample) {
    double acc = 0.0;
    for (double x : sample) acc += x;
    return acc / static_cast<double>(sample.size());
}

// Biased (maximum-likelihood) standard deviation.
double sample_std(std::span<const double> sample) {
    const double m = sample_mean(sample);
    double acc = 0.0;
    for (double x : sample) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(sample.size()));
}

// Linear-interpolation empirical quantile on a sorted sample.
double sorted_quantile(const std::vector<double>& sorted, double p) {
    const double h = p * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - lo) * (sorted[lo + 1] - sorted[lo]);
}

void check_not_constant(std::span<const double> sample) {
    const auto [mn, mx] = std::minmax_element(sample.begin(), sample.end());
    if (*mn == *mx) throw DegenerateDataError("sample is constant, nothing to fit");
}

struct EStep {
    double log_likelihood;
    // responsibilities, point-major: resp[j * k + i]
    std::vector<double> resp;
};

EStep e_step(std::span<const double> sample, const std::vector<double>& w,
             const std::vector<double>& a, const std::vector<double>& s) {
    const std::size_t n = sample.size(), k = w.size();
    EStep out{0.0, std::vector<double>(n * k)};
    std::vector<double> terms(k);
    for (std::size_t j = 0; j < n; ++j) {
        double max_term = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < k; ++i) {
            terms[i] = w[i] > 0.0
                           ? std::log(w[i]) + special::normal_log_pdf((sample[j] - a[i]) / s[i]) -
                                 std::log(s[i])
                           : -std::numeric_limits<double>::infinity();
            max_term = std::max(max_term, terms[i]);
        }
        if (!std::isfinite(max_term))
            throw NumericalSupportError("em_fit: zero density at sample point " + std::to_string(j));
        double denom = 0.0;
        for (std::size_t i = 0; i < k; ++i) denom += std::exp(terms[i] - max_term);
        for (std::size_t i = 0; i < k; ++i)
            out.resp[j * k + i] = std::exp(terms[i] - max_term) / denom;
        out.log_likelihood += max_term + std::log(denom);
    }
    return out;
}

}  // namespace

Grid::Grid(std::vector<double> locations, std::vector<double> scales)
    : locations_(std::move(locations)), scales_(std::move(scales)) {
    if (locations_.size() != scales_.size())
        throw ValidationError("grid: locations and scales must have equal length");
    if (locations_.size() < 2) throw ValidationError("grid: needs at least two nodes");
    std::map<double, double> last_at_level;
    for (std::size_t i = 0; i < locations_.size(); ++i) {
        if (!std::isfinite(locations_[i])) throw ValidationError("grid: locations must be finite");
        if (!std::isfinite(scales_[i]) || scales_[i] <= 0.0)
            throw ValidationError("grid: scales must be finite and positive");
        const auto it = last_at_level.find(scales_[i]);
        if (it != last_at_level.end() && locations_[i] <= it->second)
            throw ValidationError("grid: locations must be strictly increasing within a scale level");
        last_at_level[scales_[i]] = locations_[i];
    }
}

Grid Grid::regular(double lo, double hi, int locations, std::span<const double> scale_levels) {
    if (!(lo < hi)) throw ParameterError("grid: lo must be below hi");
    if (locations < 2) throw ParameterError("grid: needs at least two locations");
    if (scale_levels.empty()) throw ParameterError("grid: needs at least one scale level");
    std::vector<double> locs, scales;
    locs.reserve(static_cast<std::size_t>(locations) * scale_levels.size());
    scales.reserve(locs.capacity());
    const double step = (hi - lo) / static_cast<double>(locations - 1);
    for (double level : scale_levels)
        for (int i = 0; i < locations; ++i) {
            locs.push_back(lo + step * i);
            scales.push_back(level);
        }
    return Grid(std::move(locs), std::move(scales));
}

NormalMixture Grid::mixture(std::span<const double> weights) const {
    if (weights.size() != locations_.size())
        throw ValidationError("grid: weight vector length does not match node count");
    return NormalMixture(std::vector<double>(weights.begin(), weights.end()), locations_, scales_);
}

NormalMixture initialize(std::span<const double> sample, int k, std::uint64_t seed) {
    (void)seed;
    if (k < 1) throw ParameterError("initialize: k must be positive");
    if (sample.size() < static_cast<std::size_t>(10 * k))
        throw SizeError("initialize: needs at least 10*k points");
    check_not_constant(sample);

    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    const double spread = sample_std(sample);

    std::vector<double> w(k, 1.0 / k), a(k), s(k, spread / k);
    for (int i = 0; i < k; ++i) a[i] = sorted_quantile(sorted, (i + 0.5) / k);
    return NormalMixture(std::move(w), std::move(a), std::move(s));
}

double log_likelihood(const NormalMixture& mixture, std::span<const double> sample) {
    if (sample.empty()) throw SizeError("log_likelihood: empty sample");
    double acc = 0.0;
    for (std::size_t j = 0; j < sample.size(); ++j) {
        const double lp = mixture.log_pdf(sample[j]);
        if (!std::isfinite(lp))
            throw NumericalSupportError("log_likelihood: zero density at sample point " +
                                        std::to_string(j));
        acc += lp;
    }
    return acc;
}

FitResult em_fit(std::span<const double> sample, int k, const EmConfig& config,
                 const std::optional<NormalMixture>& warm_start) {
    if (k < 1) throw ParameterError("em_fit: k must be positive");
    if (sample.size() < static_cast<std::size_t>(10 * k))
        throw SizeError("em_fit: needs at least 10*k points");
    check_not_constant(sample);
    if (warm_start && warm_start->size() != k)
        throw ValidationError("em_fit: warm start has wrong component count");

    const double floor_abs = std::max(config.scale_floor * sample_std(sample),
                                      std::numeric_limits<double>::min());

    if (k == 1) {
        const double m = sample_mean(sample);
        const double s = std::max(sample_std(sample), floor_abs);
        NormalMixture fit = NormalMixture::single(m, s);
        const double ll = log_likelihood(fit, sample);
        return {std::move(fit), {ll}, 1, true};
    }

    const NormalMixture start = warm_start ? *warm_start : initialize(sample, k, config.seed);
    std::vector<double> w = start.weights(), a = start.locations(), s = start.scales();

    const std::size_t n = sample.size();
    EStep e = e_step(sample, w, a, s);
    FitResult result{start, {e.log_likelihood}, 0, false};

    for (int iter = 1; iter <= config.max_iterations; ++iter) {
        for (int i = 0; i < k; ++i) {
            double mass = 0.0, mean_acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                mass += e.resp[j * k + i];
                mean_acc += e.resp[j * k + i] * sample[j];
            }
            w[i] = mass / static_cast<double>(n);
            if (mass > 0.0) {
                a[i] = mean_acc / mass;
                double var_acc = 0.0;
                for (std::size_t j = 0; j < n; ++j)
                    var_acc += e.resp[j * k + i] * (sample[j] - a[i]) * (sample[j] - a[i]);
                s[i] = std::max(std::sqrt(var_acc / mass), floor_abs);
            }
        }
        const double w_sum = std::accumulate(w.begin(), w.end(), 0.0);
        for (double& wi : w) wi /= w_sum;

        e = e_step(sample, w, a, s);
        const double prev = result.log_likelihood_trace.back();
        result.log_likelihood_trace.push_back(e.log_likelihood);
        result.iterations = iter;
        if (std::fabs(e.log_likelihood - prev) <= config.rel_tolerance * std::max(1.0, std::fabs(prev))) {
            result.converged = true;
            break;
        }
    }

    // Components reported in location order.
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return a[x] != a[y] ? a[x] < a[y] : s[x] < s[y];
    });
    std::vector<double> wo(k), ao(k), so(k);
    for (int i = 0; i < k; ++i) {
        wo[i] = w[order[i]];
        ao[i] = a[order[i]];
        so[i] = s[order[i]];
    }
    result.mixture = NormalMixture(std::move(wo), std::move(ao), std::move(so));
    return result;
}

std::vector<double> grid_em_fit(std::span<const double> sample, const Grid& grid,
                                std::span<const double> warm_start, const EmConfig& config) {
    if (sample.size() < 10) throw SizeError("grid_em_fit: needs at least 10 points");
    const std::size_t n = sample.size();
    const std::size_t kk = static_cast<std::size_t>(grid.size());

    std::vector<double> w(kk, 1.0 / static_cast<double>(kk));
    if (!warm_start.empty()) {
        if (warm_start.size() != kk)
            throw ValidationError("grid_em_fit: warm start length does not match node count");
        double sum = 0.0;
        for (double v : warm_start) {
            if (!std::isfinite(v) || v < 0.0)
                throw ValidationError("grid_em_fit: warm start weights must be nonnegative");
            sum += v;
        }
        if (std::fabs(sum - 1.0) > 1e-9)
            throw ValidationError("grid_em_fit: warm start weights must sum to one");
        for (std::size_t i = 0; i < kk; ++i) w[i] = warm_start[i] / sum;
    }

    // Node densities do not change across iterations; compute them once.
    std::vector<double> dens(n * kk);
    const auto& locs = grid.locations();
    const auto& scales = grid.scales();
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < kk; ++i)
            dens[j * kk + i] =
                special::normal_pdf((sample[j] - locs[i]) / scales[i]) / scales[i];

    double prev_ll = -std::numeric_limits<double>::infinity();
    std::vector<double> mass(kk);
    for (int iter = 0; iter < config.max_iterations; ++iter) {
        double ll = 0.0;
        std::fill(mass.begin(), mass.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            double denom = 0.0;
            for (std::size_t i = 0; i < kk; ++i) denom += w[i] * dens[j * kk + i];
            if (!(denom > 0.0))
                throw NumericalSupportError("grid_em_fit: zero density at sample point " +
                                            std::to_string(j));
            for (std::size_t i = 0; i < kk; ++i) mass[i] += dens[j * kk + i] / denom;
            ll += std::log(denom);
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < kk; ++i) {
            w[i] *= mass[i] / static_cast<double>(n);
            sum += w[i];
        }
        for (double& wi : w) wi /= sum;
        if (std::fabs(ll - prev_ll) <= config.rel_tolerance * std::max(1.0, std::fabs(prev_ll)))
            break;
        prev_ll = ll;
    }
    return w;
}

}  // namespace mixsep
