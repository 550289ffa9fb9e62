#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace mixsep {

/// Generalized gamma density (Stacy form):
///   f(u) = p / (scale^d Gamma(d/p)) u^(d-1) exp(-(u/scale)^p),  u > 0.
struct GenGammaParams {
    double scale = 1.0;
    double d = 1.0;
    double p = 1.0;
};

/// Generalized inverse Gaussian density:
///   f(u) ~ u^(lambda-1) exp(-(chi/u + psi u)/2),  u > 0.
/// chi must be positive when lambda <= 0, psi positive when lambda >= 0;
/// the boundary cases chi = 0 (gamma) and psi = 0 (inverse gamma) are handled
/// in closed form.
struct GigParams {
    double lambda = 1.0;
    double chi = 1.0;
    double psi = 1.0;
};

enum class MixingFamily { GeneralizedGamma, GeneralizedInverseGaussian };

/// Normal variance-mean mixture: X = alpha * U + sigma * sqrt(U) * Z with
/// Z standard normal and U drawn from the mixing density.
struct NvmParams {
    double alpha = 0.0;
    double sigma = 1.0;
    std::variant<GenGammaParams, GigParams> mixing = GenGammaParams{};
};

MixingFamily family_of(const NvmParams& params);

double mixing_pdf(const GenGammaParams& g, double u);
double mixing_pdf(const GigParams& g, double u);
double mixing_log_pdf(const GenGammaParams& g, double u);
double mixing_log_pdf(const GigParams& g, double u);

/// Mean of the mixing density (may be +inf for inverse-gamma tails).
double mixing_mean(const GenGammaParams& g);
double mixing_mean(const GigParams& g);

/// Marginal density of X, by adaptive quadrature over the mixing variable.
double nvm_pdf(const NvmParams& params, double x);

/// Marginal distribution function of X.
double nvm_cdf(const NvmParams& params, double x);

struct NvmFitConfig {
    int max_evaluations = 2000;
    /// Nodes per unit length (in log u) of the fixed likelihood grid.
    int nodes_per_unit = 8;
};

struct NvmFit {
    NvmParams params;
    double log_likelihood = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Maximum-likelihood fit of a variance-mean mixture by direct search.
///
/// The mixing density is constrained to mean one, which removes the exact
/// rescaling ridge (alpha, sigma, U) -> (alpha c, sigma sqrt(c), U / c) that
/// otherwise makes the parametrization unidentifiable. An explicit `init` is
/// renormalized onto that slice without changing the distribution of X, so
/// the returned likelihood never falls below the init's. Non-convergence
/// within the evaluation budget returns the best point found, flagged.
NvmFit fit_nvm(std::span<const double> sample, MixingFamily family,
               const std::optional<NvmParams>& init = std::nullopt,
               const NvmFitConfig& config = {});

/// Sliding-window drift estimates: row r holds the fitted alpha on samples
/// [r * shift, r * shift + window_size). Constant windows record alpha 0 with
/// the converged flag cleared.
struct AlphaTrack {
    int window_size = 0;
    int shift = 1;
    std::vector<double> alpha;
    std::vector<double> log_likelihood;
    std::vector<std::uint8_t> converged;
};

AlphaTrack alpha_track(std::span<const double> series, int window = 100, int shift = 1,
                       MixingFamily family = MixingFamily::GeneralizedGamma,
                       const NvmFitConfig& config = {});

/// Chi-square goodness-of-fit p-values of the sample under two candidate
/// parameter sets, over `bins` equiprobable bins each.
std::pair<double, double> gof_compare(std::span<const double> sample, const NvmParams& a,
                                      const NvmParams& b, int bins = 5);

}  // namespace mixsep
