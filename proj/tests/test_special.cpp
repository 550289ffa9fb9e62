#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mixsep/errors.hpp"
#include "mixsep/special.hpp"

using namespace mixsep;

TEST_CASE("normal cdf hits known values") {
    CHECK(special::normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(special::normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
    CHECK(special::normal_cdf(-1.959963984540054) == doctest::Approx(0.025).epsilon(1e-12));
    // far tail must not round to zero
    CHECK(special::normal_cdf(-8.0) == doctest::Approx(6.220960574271782e-16).epsilon(1e-10));
    CHECK(special::normal_cdf(-37.0) > 0.0);
}

TEST_CASE("normal pdf matches cdf slope") {
    const double h = 1e-5;
    for (double z : {-3.0, -1.0, 0.0, 0.7, 2.5}) {
        const double slope = (special::normal_cdf(z + h) - special::normal_cdf(z - h)) / (2 * h);
        CHECK(special::normal_pdf(z) == doctest::Approx(slope).epsilon(1e-8));
        CHECK(special::normal_log_pdf(z) == doctest::Approx(std::log(special::normal_pdf(z))));
    }
}

TEST_CASE("normal quantile inverts the cdf") {
    CHECK(special::normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-10));
    CHECK(special::normal_quantile(0.999) == doctest::Approx(3.090232306167813).epsilon(1e-10));
    for (double p : {0.001, 0.2, 0.5, 0.77, 0.9999})
        CHECK(special::normal_cdf(special::normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
    CHECK_THROWS_AS(special::normal_quantile(0.0), ParameterError);
    CHECK_THROWS_AS(special::normal_quantile(1.0), ParameterError);
}

TEST_CASE("ln_gamma and gamma_q against closed forms") {
    CHECK(special::ln_gamma(0.5) == doctest::Approx(std::log(std::sqrt(std::numbers::pi))).epsilon(1e-14));
    CHECK(special::ln_gamma(5.0) == doctest::Approx(std::log(24.0)).epsilon(1e-14));
    // Q(1, x) = exp(-x)
    for (double x : {0.1, 1.0, 4.5})
        CHECK(special::gamma_q(1.0, x) == doctest::Approx(std::exp(-x)).epsilon(1e-12));
    CHECK(special::gamma_q(2.5, 0.0) == 1.0);
}

TEST_CASE("chi-square survival function") {
    CHECK(special::chi_square_sf(0.0, 4) == 1.0);
    CHECK(special::chi_square_sf(9.487729036781154, 4) == doctest::Approx(0.05).epsilon(1e-9));
    // dof 2 closed form: exp(-x/2)
    CHECK(special::chi_square_sf(3.0, 2) == doctest::Approx(std::exp(-1.5)).epsilon(1e-12));
    CHECK_THROWS_AS(special::chi_square_sf(1.0, 0), ParameterError);
    CHECK_THROWS_AS(special::chi_square_sf(-1.0, 3), ParameterError);
}

TEST_CASE("bessel k half order closed form") {
    for (double x : {0.5, 1.0, 3.0, 10.0}) {
        const double exact = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x);
        CHECK(special::bessel_k(0.5, x) == doctest::Approx(exact).epsilon(1e-12));
        CHECK(special::ln_bessel_k(0.5, x) == doctest::Approx(std::log(exact)).epsilon(1e-12));
    }
    // symmetric in the order
    CHECK(special::bessel_k(-1.5, 2.0) == doctest::Approx(special::bessel_k(1.5, 2.0)));
    // log form survives where the plain value underflows
    const double ln_exact = 0.5 * std::log(std::numbers::pi / 1600.0) - 800.0;
    CHECK(special::ln_bessel_k(0.5, 800.0) == doctest::Approx(ln_exact).epsilon(1e-12));
    CHECK_THROWS_AS(special::bessel_k(1.0, -1.0), ParameterError);
    CHECK_THROWS_AS(special::ln_bessel_k(1.0, 0.0), ParameterError);
}

TEST_CASE("invert_cdf expands a bad bracket") {
    const double x = special::invert_cdf([](double v) { return special::normal_cdf(v); }, 0.975,
                                         0.1, 0.2, [](double v) { return special::normal_pdf(v); });
    CHECK(x == doctest::Approx(1.959963984540054).epsilon(1e-9));
    CHECK_THROWS_AS(special::invert_cdf([](double) { return 0.5; }, 0.5, 1.0, 0.5), ParameterError);
}
