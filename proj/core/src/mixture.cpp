#include "mixsep/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>

#include "mixsep/errors.hpp"
#include "mixsep/special.hpp"

namespace mixsep {

namespace {

std::string format_full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_double(const std::string& token, const char* what) {
    const char* begin = token.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw ParseError(std::string("mixture record: bad ") + what + " '" + token + "'");
    return v;
}

}  // namespace

NormalMixture::NormalMixture(std::vector<double> weights, std::vector<double> locations,
                             std::vector<double> scales)
    : weights_(std::move(weights)), locations_(std::move(locations)), scales_(std::move(scales)) {
    const std::size_t k = weights_.size();
    if (k == 0) throw ValidationError("mixture: needs at least one component");
    if (locations_.size() != k || scales_.size() != k)
        throw ValidationError("mixture: weights, locations and scales must have equal length");

    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        if (!std::isfinite(weights_[i]) || weights_[i] < 0.0)
            throw ValidationError("mixture: weights must be finite and nonnegative");
        if (!std::isfinite(locations_[i]))
            throw ValidationError("mixture: locations must be finite");
        if (!std::isfinite(scales_[i]) || scales_[i] <= 0.0)
            throw ValidationError("mixture: scales must be finite and positive");
        sum += weights_[i];
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        throw ValidationError("mixture: weights sum to " + format_full(sum) + ", expected 1");
    for (double& w : weights_) w /= sum;
}

NormalMixture NormalMixture::single(double location, double scale) {
    return NormalMixture({1.0}, {location}, {scale});
}

double NormalMixture::pdf(double x) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i)
        acc += weights_[i] * special::normal_pdf((x - locations_[i]) / scales_[i]) / scales_[i];
    return acc;
}

double NormalMixture::log_pdf(double x) const {
    double max_term = -std::numeric_limits<double>::infinity();
    std::vector<double> terms(weights_.size(), -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (weights_[i] == 0.0) continue;
        terms[i] = std::log(weights_[i]) +
                   special::normal_log_pdf((x - locations_[i]) / scales_[i]) -
                   std::log(scales_[i]);
        max_term = std::max(max_term, terms[i]);
    }
    if (!std::isfinite(max_term)) return -std::numeric_limits<double>::infinity();
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - max_term);
    return max_term + std::log(acc);
}

double NormalMixture::cdf(double x) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i)
        acc += weights_[i] * special::normal_cdf((x - locations_[i]) / scales_[i]);
    return acc;
}

double NormalMixture::quantile(double p, double hint) const {
    if (!(p > 0.0 && p < 1.0)) throw ParameterError("mixture quantile: p must lie in (0, 1)");
    double lo = locations_[0] - 40.0 * scales_[0];
    double hi = locations_[0] + 40.0 * scales_[0];
    for (std::size_t i = 1; i < weights_.size(); ++i) {
        lo = std::min(lo, locations_[i] - 40.0 * scales_[i]);
        hi = std::max(hi, locations_[i] + 40.0 * scales_[i]);
    }
    return special::invert_cdf([this](double x) { return cdf(x); }, p, lo, hi,
                               [this](double x) { return pdf(x); }, hint);
}

double NormalMixture::mean() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) acc += weights_[i] * locations_[i];
    return acc;
}

VarianceSplit NormalMixture::variance_decomposition() const {
    const double m = mean();
    VarianceSplit split;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        split.dynamic += weights_[i] * (locations_[i] - m) * (locations_[i] - m);
        split.diffusive += weights_[i] * scales_[i] * scales_[i];
    }
    split.total = split.dynamic + split.diffusive;
    return split;
}

std::vector<double> NormalMixture::sample(std::size_t n, std::mt19937_64& engine) const {
    std::vector<double> cumulative(weights_.size());
    std::partial_sum(weights_.begin(), weights_.end(), cumulative.begin());
    cumulative.back() = 1.0;

    std::uniform_real_distribution<double> pick(0.0, 1.0);
    std::normal_distribution<double> unit(0.0, 1.0);
    std::vector<double> draws(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double u = pick(engine);
        const std::size_t i = static_cast<std::size_t>(
            std::lower_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
        draws[j] = locations_[i] + scales_[i] * unit(engine);
    }
    return draws;
}

std::vector<double> NormalMixture::sample(std::size_t n, std::uint64_t seed) const {
    std::mt19937_64 engine(seed);
    return sample(n, engine);
}

std::string NormalMixture::to_record() const {
    std::string out = std::to_string(size());
    const auto append_block = [&out](const std::vector<double>& values) {
        out += ';';
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out += ',';
            out += format_full(values[i]);
        }
    };
    append_block(weights_);
    append_block(locations_);
    append_block(scales_);
    return out;
}

NormalMixture NormalMixture::from_record(const std::string& record) {
    const auto blocks = split(record, ';');
    if (blocks.size() != 4)
        throw ParseError("mixture record: expected 4 ';'-separated blocks, got " +
                         std::to_string(blocks.size()));

    const long k = std::strtol(blocks[0].c_str(), nullptr, 10);
    if (k < 1 || std::to_string(k) != blocks[0])
        throw ParseError("mixture record: bad component count '" + blocks[0] + "'");

    const auto parse_block = [k](const std::string& block, const char* what) {
        const auto tokens = split(block, ',');
        if (tokens.size() != static_cast<std::size_t>(k))
            throw ParseError(std::string("mixture record: expected ") + std::to_string(k) + " " +
                             what + " values, got " + std::to_string(tokens.size()));
        std::vector<double> out(tokens.size());
        for (std::size_t i = 0; i < tokens.size(); ++i) out[i] = parse_double(tokens[i], what);
        return out;
    };

    return NormalMixture(parse_block(blocks[1], "weight"), parse_block(blocks[2], "location"),
                         parse_block(blocks[3], "scale"));
}

}  // namespace mixsep
