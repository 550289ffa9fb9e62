#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace mixsep {

/// Split of a mixture's variance into the spread of component locations
/// (dynamic part) and the weighted average of component variances
/// (diffusive part). total is their sum.
struct VarianceSplit {
    double dynamic = 0.0;
    double diffusive = 0.0;
    double total = 0.0;
};

/// Finite mixture of univariate normal components.
///
/// Weights are nonnegative and must sum to one; a sum within 1e-9 of one is
/// renormalized on construction, anything further off is rejected. Scales are
/// strictly positive. Component order is preserved as given.
class NormalMixture {
public:
    NormalMixture(std::vector<double> weights, std::vector<double> locations,
                  std::vector<double> scales);

    /// Single normal component.
    static NormalMixture single(double location, double scale);

    int size() const { return static_cast<int>(weights_.size()); }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<double>& locations() const { return locations_; }
    const std::vector<double>& scales() const { return scales_; }

    double pdf(double x) const;
    double log_pdf(double x) const;
    double cdf(double x) const;

    /// Quantile for p in (0, 1). `hint` seeds the root search.
    double quantile(double p, double hint = std::numeric_limits<double>::quiet_NaN()) const;

    double mean() const;
    VarianceSplit variance_decomposition() const;

    std::vector<double> sample(std::size_t n, std::mt19937_64& engine) const;
    std::vector<double> sample(std::size_t n, std::uint64_t seed) const;

    /// Serializes as "k;p1,..,pk;a1,..,ak;s1,..,sk" with full precision.
    std::string to_record() const;
    static NormalMixture from_record(const std::string& record);

private:
    std::vector<double> weights_;
    std::vector<double> locations_;
    std::vector<double> scales_;
};

}  // namespace mixsep
