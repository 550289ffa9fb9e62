#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "mixsep/csv.hpp"
#include "mixsep/detect.hpp"
#include "mixsep/errors.hpp"
#include "mixsep/nvm.hpp"
#include "mixsep/pipeline.hpp"
#include "mixsep/signal_gen.hpp"
#include "mixsep/svg.hpp"

namespace {

namespace fs = std::filesystem;
using namespace mixsep;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---- generate ----------------------------------------------------------------

struct GenerateArgs {
    std::string output;
    std::string truth;
    std::string svg;
    int epochs = 10;
    double rest_ms = 2000.0;
    double movement_ms = 400.0;
    double rest_sigma = 1.0;
    double movement_sigma = 10.0;
    double amplitude = 0.0;
    double frequency_hz = 12.0;
    double rate = 1000.0;
    std::uint64_t seed = 0;
};

int run_generate(const GenerateArgs& args) {
    if (args.epochs < 1) throw ParameterError("generate: needs at least one epoch");
    std::vector<EpochSpec> epochs(
        static_cast<std::size_t>(args.epochs),
        EpochSpec{args.rest_ms, args.movement_ms, args.rest_sigma, args.movement_sigma,
                  args.amplitude, args.frequency_hz});
    const SyntheticRecord record = generate_myogram(epochs, args.rate, args.seed);

    csv::write_value_column(args.output, record.samples);
    csv::write_onsets(args.truth, record.true_onsets_ms);
    if (!args.svg.empty())
        svg::write_line_plot(args.svg,
                             {{"myogram", "#1f6fb2", record.samples, 0.0, 1000.0 / args.rate}},
                             record.true_onsets_ms, "synthetic record");

    const double duration_ms = static_cast<double>(record.samples.size()) * 1000.0 / args.rate;
    std::cout << "wrote " << record.samples.size() << " samples (" << fmt(duration_ms)
              << " ms), " << record.true_onsets_ms.size() << " onsets\n";
    return 0;
}

// ---- decompose ----------------------------------------------------------------

struct DecomposeArgs {
    std::string input;
    std::string output_dir;
    std::string svg;
    PipelineConfig cfg;
    std::string scale_reference = "spacing";
};

void apply_scale_reference(PipelineConfig& cfg, const std::string& name) {
    cfg.grid_scale_reference =
        name == "std" ? GridScaleReference::DataStd : GridScaleReference::NodeSpacing;
}

int run_decompose(const DecomposeArgs& args_in) {
    DecomposeArgs args = args_in;
    apply_scale_reference(args.cfg, args.scale_reference);

    const std::vector<double> myogram = csv::read_value_column(args.input);
    fs::create_directories(args.output_dir);
    const fs::path dir(args.output_dir);

    const Decomposition decomposition = decompose(myogram, args.cfg);
    csv::write_components((dir / "forward.csv").string(), decomposition.forward);
    csv::write_components((dir / "backward.csv").string(), decomposition.backward);

    std::size_t track_rows = 0;
    try {
        const GridAnalysis analysis = grid_analysis(myogram, args.cfg);
        csv::write_weights((dir / "weights.csv").string(), analysis.track);
        track_rows = analysis.track.weights.size();
    } catch (const DegenerateDataError&) {
        // constant dynamic component: no grid to span, emit the header alone
        std::ofstream out(dir / "weights.csv");
        out << "index\n";
        std::cerr << "dynamic component is constant; weight track skipped\n";
    }

    if (!args.svg.empty())
        svg::write_line_plot(
            args.svg,
            {{"dynamic fwd", "#1f6fb2", decomposition.forward.dynamic, 0.0, 1.0},
             {"diffusive fwd", "#b2541f", decomposition.forward.diffusive, 0.0, 1.0}},
            {}, "variance components");

    std::cout << "wrote " << decomposition.forward.dynamic.size() << " component rows, "
              << track_rows << " weight rows\n";
    return 0;
}

// ---- detect -------------------------------------------------------------------

struct DetectArgs {
    std::string input;
    std::string output;
    std::string method = "msm";
    PipelineConfig cfg;
    std::string scale_reference = "spacing";
    double winvar_threshold = -1.0;  // negative: calibrate from the rest segment
};

DetectMethod parse_method(const std::string& name) {
    if (name == "msm") return DetectMethod::Msm;
    if (name == "zdist") return DetectMethod::ZDistance;
    if (name == "chisq") return DetectMethod::ChiSquare;
    if (name == "alpha") return DetectMethod::Alpha;
    if (name == "winvar") return DetectMethod::WindowVariance;
    throw ConfigError("detect: unknown method '" + name + "'");
}

int run_detect(const DetectArgs& args_in) {
    DetectArgs args = args_in;
    apply_scale_reference(args.cfg, args.scale_reference);
    if (args.winvar_threshold >= 0.0) args.cfg.winvar_threshold = args.winvar_threshold;
    if (!(args.cfg.calibration_end_ms > args.cfg.calibration_start_ms))
        throw ConfigError("detect: calibration range is empty");

    const std::vector<double> myogram = csv::read_value_column(args.input);
    const EventList events = run_detector(myogram, parse_method(args.method), args.cfg);
    csv::write_events(args.output, events);
    std::cout << events.times_ms.size() << " events (" << events.detector << ")\n";
    return 0;
}

// ---- evaluate -----------------------------------------------------------------

struct EvaluateArgs {
    std::string detected;
    std::string truth;
    std::string report;
    std::string summary;
    double tolerance_ms = 100.0;
};

int run_evaluate(const EvaluateArgs& args) {
    const EventList detected = csv::read_events(args.detected);
    EventList actual;
    actual.times_ms = csv::read_onsets(args.truth);
    actual.detector = "truth";

    const MatchReport report = match_events(detected, actual, args.tolerance_ms);
    const std::string text = csv::format_match_report(report, args.tolerance_ms);
    std::cout << text;
    if (!args.report.empty()) csv::write_match_report(args.report, report);
    if (!args.summary.empty()) {
        std::ofstream out(args.summary);
        if (!out) throw IoError("cannot open '" + args.summary + "' for writing");
        out << text;
    }
    return 0;
}

// ---- fit-window ---------------------------------------------------------------

struct FitWindowArgs {
    std::string input;
    std::string table;
    std::string svg;
    std::size_t start = 0;
    std::size_t length = 100;
    int bins = 20;
    int gof_bins = 5;
};

std::string describe(const NvmParams& params) {
    std::string out = "alpha " + fmt(params.alpha) + ", sigma " + fmt(params.sigma);
    if (const auto* gg = std::get_if<GenGammaParams>(&params.mixing))
        out += ", gengamma scale " + fmt(gg->scale) + " d " + fmt(gg->d) + " p " + fmt(gg->p);
    else if (const auto* gig = std::get_if<GigParams>(&params.mixing))
        out += ", gig lambda " + fmt(gig->lambda) + " chi " + fmt(gig->chi) + " psi " +
               fmt(gig->psi);
    return out;
}

int run_fit_window(const FitWindowArgs& args) {
    if (args.bins < 2) throw ParameterError("fit-window: needs at least two table bins");
    const std::vector<double> myogram = csv::read_value_column(args.input);
    if (args.length < 1 || args.start + args.length > myogram.size())
        throw ParameterError("fit-window: window [" + std::to_string(args.start) + ", " +
                             std::to_string(args.start + args.length) +
                             ") lies outside the input of size " +
                             std::to_string(myogram.size()));
    const std::span<const double> window(myogram.data() + args.start, args.length);

    const NvmFit gvg = fit_nvm(window, MixingFamily::GeneralizedGamma);
    const NvmFit gh = fit_nvm(window, MixingFamily::GeneralizedInverseGaussian);
    const auto [p_gvg, p_gh] = gof_compare(window, gvg.params, gh.params, args.gof_bins);

    std::cout << "gvg: " << describe(gvg.params) << "\n     log-likelihood "
              << fmt(gvg.log_likelihood) << ", gof p " << fmt(p_gvg)
              << (gvg.converged ? "" : " (not converged)") << "\n";
    std::cout << "gh:  " << describe(gh.params) << "\n     log-likelihood "
              << fmt(gh.log_likelihood) << ", gof p " << fmt(p_gh)
              << (gh.converged ? "" : " (not converged)") << "\n";

    const auto [mn_it, mx_it] = std::minmax_element(window.begin(), window.end());
    const double lo = *mn_it, hi = *mx_it;
    const double bin_width = (hi - lo) / args.bins;
    std::vector<double> centers(args.bins), empirical(args.bins, 0.0);
    std::vector<double> gvg_density(args.bins), gh_density(args.bins);
    for (int b = 0; b < args.bins; ++b) {
        centers[b] = lo + (b + 0.5) * bin_width;
        gvg_density[b] = nvm_pdf(gvg.params, centers[b]);
        gh_density[b] = nvm_pdf(gh.params, centers[b]);
    }
    for (double x : window) {
        auto b = bin_width > 0.0 ? static_cast<std::size_t>((x - lo) / bin_width) : 0;
        if (b >= static_cast<std::size_t>(args.bins)) b = args.bins - 1;
        empirical[b] += 1.0;
    }
    for (double& e : empirical) e /= static_cast<double>(args.length) * bin_width;

    if (!args.table.empty()) {
        std::ofstream out(args.table);
        if (!out) throw IoError("cannot open '" + args.table + "' for writing");
        out << "bin_center,empirical,gvg,gh\n";
        for (int b = 0; b < args.bins; ++b)
            out << fmt(centers[b]) << ',' << fmt(empirical[b]) << ',' << fmt(gvg_density[b])
                << ',' << fmt(gh_density[b]) << '\n';
        if (!out) throw IoError("failed writing '" + args.table + "'");
    }
    if (!args.svg.empty())
        svg::write_line_plot(args.svg,
                             {{"empirical", "#777777", empirical, centers.front(), bin_width},
                              {"gvg", "#1f6fb2", gvg_density, centers.front(), bin_width},
                              {"gh", "#b2541f", gh_density, centers.front(), bin_width}},
                             {}, "window fit");
    return 0;
}

// ---- wiring -------------------------------------------------------------------

void add_grid_options(CLI::App* cmd, PipelineConfig& cfg, std::string& scale_reference) {
    cmd->add_option("--grid-locations", cfg.grid_locations, "Grid node locations per scale level");
    cmd->add_option("--grid-window", cfg.grid_window, "Grid fit window, samples");
    cmd->add_option("--grid-shift", cfg.grid_shift, "Grid fit shift, samples");
    cmd->add_option("--scale-factors", cfg.grid_scale_factors,
                    "Node scale levels, as multiples of the reference");
    cmd->add_option("--scale-reference", scale_reference, "Scale reference: spacing or std")
        ->check(CLI::IsMember({"spacing", "std"}));
}

void add_msm_options(CLI::App* cmd, PipelineConfig& cfg) {
    cmd->add_option("--rate", cfg.sampling_rate_hz, "Sampling rate, Hz");
    cmd->add_option("--window", cfg.msm_window, "Sliding mixture window, samples");
    cmd->add_option("--k", cfg.msm_k, "Mixture components per window");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sliding-window mixture decomposition and movement-onset detection"};
    app.set_config("--config", "", "Read options from a key=value file");
    app.require_subcommand(1);

    std::function<int()> action;

    GenerateArgs gen;
    CLI::App* cmd_gen = app.add_subcommand("generate", "Write a synthetic myogram record");
    cmd_gen->add_option("--output", gen.output, "Signal CSV path")->required();
    cmd_gen->add_option("--truth", gen.truth, "Onset CSV path")->required();
    cmd_gen->add_option("--svg", gen.svg, "Optional SVG plot path");
    cmd_gen->add_option("--epochs", gen.epochs, "Number of rest+movement epochs");
    cmd_gen->add_option("--rest-ms", gen.rest_ms, "Rest duration per epoch, ms");
    cmd_gen->add_option("--movement-ms", gen.movement_ms, "Movement duration per epoch, ms");
    cmd_gen->add_option("--rest-sigma", gen.rest_sigma, "Rest noise sigma");
    cmd_gen->add_option("--movement-sigma", gen.movement_sigma, "Movement noise sigma");
    cmd_gen->add_option("--amplitude", gen.amplitude, "Burst amplitude");
    cmd_gen->add_option("--frequency-hz", gen.frequency_hz, "Burst frequency, Hz");
    cmd_gen->add_option("--rate", gen.rate, "Sampling rate, Hz");
    cmd_gen->add_option("--seed", gen.seed, "Random seed");
    cmd_gen->callback([&] { action = [&] { return run_generate(gen); }; });

    DecomposeArgs dec;
    CLI::App* cmd_dec =
        app.add_subcommand("decompose", "Write forward/backward components and the weight track");
    cmd_dec->add_option("--input", dec.input, "Signal CSV path")->required();
    cmd_dec->add_option("--output-dir", dec.output_dir, "Directory for the output tables")
        ->required();
    cmd_dec->add_option("--svg", dec.svg, "Optional SVG plot path");
    add_msm_options(cmd_dec, dec.cfg);
    add_grid_options(cmd_dec, dec.cfg, dec.scale_reference);
    cmd_dec->callback([&] { action = [&] { return run_decompose(dec); }; });

    DetectArgs det;
    CLI::App* cmd_det = app.add_subcommand("detect", "Detect movement onsets");
    cmd_det->add_option("--input", det.input, "Signal CSV path")->required();
    cmd_det->add_option("--output", det.output, "Events CSV path")->required();
    cmd_det->add_option("--method", det.method, "msm, zdist, chisq, alpha or winvar")
        ->required()
        ->check(CLI::IsMember({"msm", "zdist", "chisq", "alpha", "winvar"}));
    add_msm_options(cmd_det, det.cfg);
    add_grid_options(cmd_det, det.cfg, det.scale_reference);
    cmd_det->add_option("--calibration-start-ms", det.cfg.calibration_start_ms,
                        "Rest calibration start, ms");
    cmd_det->add_option("--calibration-end-ms", det.cfg.calibration_end_ms,
                        "Rest calibration end, ms");
    cmd_det->add_option("--reconcile-ms", det.cfg.reconcile_tolerance_ms,
                        "Forward/backward pairing tolerance, ms");
    cmd_det->add_option("--z-threshold", det.cfg.detectors.z_threshold, "Weight-distance threshold");
    cmd_det->add_option("--z-lag", det.cfg.detectors.z_lag, "Weight-distance lag, rows");
    cmd_det->add_option("--winvar-width-ms", det.cfg.winvar_width_ms,
                        "Rolling variance width, ms (30 to 50)");
    cmd_det->add_option("--winvar-threshold", det.winvar_threshold,
                        "Rolling variance threshold (calibrated when omitted)");
    cmd_det->add_option("--alpha-window", det.cfg.alpha_window, "Drift fit window, samples");
    cmd_det->add_option("--alpha-shift", det.cfg.alpha_shift, "Drift fit shift, samples");
    cmd_det->callback([&] { action = [&] { return run_detect(det); }; });

    EvaluateArgs eva;
    CLI::App* cmd_eva = app.add_subcommand("evaluate", "Match detected events against the truth");
    cmd_eva->add_option("--detected", eva.detected, "Events CSV path")->required();
    cmd_eva->add_option("--truth", eva.truth, "Onset CSV path")->required();
    cmd_eva->add_option("--tolerance-ms", eva.tolerance_ms, "Match tolerance, ms");
    cmd_eva->add_option("--report", eva.report, "Optional report CSV path");
    cmd_eva->add_option("--summary", eva.summary, "Optional summary text path");
    cmd_eva->callback([&] { action = [&] { return run_evaluate(eva); }; });

    FitWindowArgs fit;
    CLI::App* cmd_fit =
        app.add_subcommand("fit-window", "Fit both mixture families to one window");
    cmd_fit->add_option("--input", fit.input, "Signal CSV path")->required();
    cmd_fit->add_option("--start", fit.start, "Window start, sample index");
    cmd_fit->add_option("--length", fit.length, "Window length, samples");
    cmd_fit->add_option("--bins", fit.bins, "Plot table bins");
    cmd_fit->add_option("--gof-bins", fit.gof_bins, "Goodness-of-fit bins");
    cmd_fit->add_option("--table", fit.table, "Histogram-vs-density CSV path");
    cmd_fit->add_option("--svg", fit.svg, "Optional SVG plot path");
    cmd_fit->callback([&] { action = [&] { return run_fit_window(fit); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        return action();
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const SizeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const CalibrationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
