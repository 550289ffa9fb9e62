#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mixsep/errors.hpp"
#include "mixsep/quadrature.hpp"
#include "mixsep/special.hpp"

using namespace mixsep;

TEST_CASE("finite interval basics") {
    const auto r1 = quad::integrate([](double x) { return x * x; }, 0.0, 1.0);
    CHECK(r1.converged);
    CHECK(r1.value == doctest::Approx(1.0 / 3.0).epsilon(1e-13));

    const auto r2 = quad::integrate([](double x) { return std::exp(-x * x); }, -10.0, 10.0);
    CHECK(r2.converged);
    CHECK(r2.value == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));

    const auto r3 =
        quad::integrate([](double x) { return std::sin(x); }, 0.0, 2.0 * std::numbers::pi,
                        {1e-10, 1e-12, 4000});
    CHECK(r3.converged);
    CHECK(r3.value == doctest::Approx(0.0).scale(1.0).epsilon(1e-11));

    CHECK_THROWS_AS(quad::integrate([](double) { return 1.0; }, 1.0, 1.0), ParameterError);
}

TEST_CASE("needle inside a wide interval") {
    // mass concentrated on 1e-3 of the range
    const auto r = quad::integrate(
        [](double x) { return std::exp(-0.5 * x * x / 1e-6) / std::sqrt(2e-6 * std::numbers::pi); },
        -1.0, 1.0, {1e-10, 0.0, 4000});
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("positive axis with log substitution") {
    const auto expo = quad::integrate_positive_axis_log([](double u) { return std::exp(-u); });
    CHECK(expo.converged);
    CHECK(expo.value == doctest::Approx(1.0).epsilon(1e-10));

    // gamma(3, rate 2) density
    const auto gam = quad::integrate_positive_axis_log(
        [](double u) { return 4.0 * u * u * std::exp(-2.0 * u); });
    CHECK(gam.converged);
    CHECK(gam.value == doctest::Approx(1.0).epsilon(1e-10));

    // heavy tail toward zero: inverse-gamma(2, 1) density
    const auto invg = quad::integrate_positive_axis_log(
        [](double u) { return std::exp(-1.0 / u) / (u * u * u); });
    CHECK(invg.converged);
    CHECK(invg.value == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("hints rescue a spike narrower than the probe step") {
    // generalized gamma with p = 80 concentrates near u = 20 on a width of
    // about 20/80 in u, around 0.0125 in log u
    const double s = 20.0, d = 80.0, p = 80.0;
    const double log_norm = std::log(p) - d * std::log(s) - special::ln_gamma(d / p);
    const auto density = [&](double u) {
        return u > 0.0 ? std::exp(log_norm + (d - 1.0) * std::log(u) - std::pow(u / s, p)) : 0.0;
    };
    const auto with_hint = quad::integrate_positive_axis_log(density, {20.0});
    CHECK(with_hint.converged);
    CHECK(with_hint.value == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("identically negligible integrand reports zero") {
    const auto r = quad::integrate_positive_axis_log([](double) { return 0.0; });
    CHECK(r.converged);
    CHECK(r.value == 0.0);
}
