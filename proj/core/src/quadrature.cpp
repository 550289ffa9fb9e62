#include "mixsep/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "mixsep/errors.hpp"

namespace mixsep::quad {

namespace {

// 15-point Kronrod / 7-point Gauss pair, positive half.
constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691, 0.7415311855993944,
    0.5860872354676911, 0.4058451513773972, 0.2077849550078985, 0.0,
};
constexpr double kWgk[8] = {
    0.02293532201052922, 0.06309209262997855, 0.1047900103222502, 0.1406532597155259,
    0.1690047266392679,  0.1903505780647854,  0.2044329400752989, 0.2094821410847278,
};
constexpr double kWg[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189, 0.4179591836734694,
};

struct Panel {
    double a, b;
    double value;
    double error;
};

Panel evaluate_panel(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(center - half * kXgk[i]);
        fv[14 - i] = f(center + half * kXgk[i]);
    }
    fv[7] = f(center);
    for (double v : fv)
        if (!std::isfinite(v)) throw NumericalError("integrand not finite inside panel");

    double resk = kWgk[7] * fv[7];
    double resg = kWg[3] * fv[7];
    for (int i = 0; i < 7; ++i) resk += kWgk[i] * (fv[i] + fv[14 - i]);
    for (int i = 0; i < 3; ++i) resg += kWg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);

    return {a, b, resk * half, std::fabs(resk - resg) * half};
}

struct WorseError {
    bool operator()(const Panel& x, const Panel& y) const { return x.error < y.error; }
};

}  // namespace

Result integrate(const std::function<double(double)>& f, double a, double b, const Options& opts) {
    if (!(a < b)) throw ParameterError("integrate: empty interval");

    std::priority_queue<Panel, std::vector<Panel>, WorseError> heap;
    heap.push(evaluate_panel(f, a, b));
    double value = heap.top().value;
    double error = heap.top().error;
    int panels = 1;

    const auto tolerance = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::fabs(value)); };
    while (error > tolerance() && panels < opts.max_intervals) {
        const Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const Panel left = evaluate_panel(f, worst.a, mid);
        const Panel right = evaluate_panel(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++panels;
    }

    return {value, error, panels, error <= tolerance()};
}

Result integrate_positive_axis_log(const std::function<double(double)>& f,
                                   const std::vector<double>& hints_u, const Options& opts) {
    const auto g = [&f](double t) {
        const double u = std::exp(t);
        const double v = f(u) * u;
        return std::isfinite(v) ? v : 0.0;
    };

    std::vector<double> probes;
    probes.reserve(120 + 9 * hints_u.size());
    for (int t = -46; t <= 46; ++t) probes.push_back(static_cast<double>(t));
    for (double u : hints_u) {
        if (!(u > 0.0) || !std::isfinite(u)) continue;
        const double th = std::log(u);
        for (int i = -4; i <= 4; ++i) probes.push_back(th + 0.25 * i);
    }

    double peak = 0.0;
    double t_peak = 0.0;
    for (double t : probes) {
        const double v = std::fabs(g(t));
        if (v > peak) {
            peak = v;
            t_peak = t;
        }
    }
    if (peak == 0.0) return {0.0, 0.0, 0, true};

    const double cutoff = peak * 1e-18;
    const auto decayed_beyond = [&](double t0, double direction) {
        double t = t0;
        for (int i = 0; i < 800; ++i) {
            t += direction;
            if (std::fabs(g(t)) <= cutoff && std::fabs(g(t + direction)) <= cutoff) return t + 2.0 * direction;
        }
        throw NumericalError("integrate_positive_axis_log: integrand does not decay");
    };
    double t_lo = decayed_beyond(t_peak, -1.0);
    double t_hi = decayed_beyond(t_peak, +1.0);

    Result result = integrate(g, t_lo, t_hi, opts);
    // Verify the bracket: extend while the clipped tails still contribute.
    for (int round = 0; round < 8; ++round) {
        const Panel left = evaluate_panel(g, t_lo - 4.0, t_lo);
        const Panel right = evaluate_panel(g, t_hi, t_hi + 4.0);
        const double tails = std::fabs(left.value) + std::fabs(right.value);
        if (tails <= std::max(opts.abs_tol, 0.5 * opts.rel_tol * std::fabs(result.value))) break;
        t_lo -= 4.0;
        t_hi += 4.0;
        result = integrate(g, t_lo, t_hi, opts);
    }
    return result;
}

}  // namespace mixsep::quad
