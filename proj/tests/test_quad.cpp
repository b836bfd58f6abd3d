#include <doctest.h>

#include <cmath>

#include "tvclt/errors.hpp"
#include "tvclt/quad.hpp"

using namespace tvclt;

TEST_CASE("gaussian density integrates to one") {
    const double v = quad::integrate([](double x) { return quad::norm_pdf(x); },
                                     -10.0, 10.0);
    CHECK(std::abs(v - (1.0 - 2.0 * quad::norm_sf(10.0))) < 1e-13);
    CHECK(std::abs(v - 1.0) < 1e-12);
}

TEST_CASE("single panel is exact on low-degree polynomials") {
    // 15-point Kronrod rule integrates degree <= 22 exactly
    const double v8 = quad::panel([](double x) { return std::pow(x, 8.0); },
                                  0.0, 1.0);
    CHECK(std::abs(v8 - 1.0 / 9.0) < 1e-15);
    const double v13 = quad::panel([](double x) { return std::pow(x, 13.0); },
                                   -1.0, 2.0);
    CHECK(std::abs(v13 - (std::pow(2.0, 14.0) - 1.0) / 14.0) < 1e-10);
}

TEST_CASE("oscillatory integrand converges under bisection") {
    const double v =
        quad::integrate([](double x) { return std::sin(50.0 * x); }, 0.0, 1.0);
    CHECK(std::abs(v - (1.0 - std::cos(50.0)) / 50.0) < 1e-12);
}

TEST_CASE("breakpoint-split integration handles kinks") {
    // E|X| for a unit Laplace law, integrand has a kink at 0
    const auto f = [](double x) { return std::abs(x) * 0.5 * std::exp(-std::abs(x)); };
    const double v = quad::integrate_split(f, -40.0, 40.0, {0.0});
    CHECK(std::abs(v - 1.0) < 1e-12);
}

TEST_CASE("split points outside the range are ignored") {
    const auto f = [](double x) { return std::exp(-x); };
    const double v = quad::integrate_split(f, 0.0, 1.0, {-5.0, 7.0});
    CHECK(std::abs(v - (1.0 - std::exp(-1.0))) < 1e-13);
}

TEST_CASE("unresolvable integrand exhausts the interval budget") {
    // infinitely accelerating oscillation: no finite panel set settles
    CHECK_THROWS_AS(
        quad::integrate([](double x) { return std::sin(1.0 / x); }, 0.0, 1.0),
        QuadratureDivergent);
    // a monotone endpoint singularity is different: panels hit the width
    // floor and the result blows up finite instead of raising
    const double v =
        quad::integrate([](double x) { return std::pow(x, -1.5); }, 0.0, 1.0);
    CHECK(v > 1e6);
}

TEST_CASE("reversed limits flip the sign") {
    const auto f = [](double x) { return x * x; };
    const double a = quad::integrate(f, 0.0, 2.0);
    const double b = quad::integrate(f, 2.0, 0.0);
    CHECK(a == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
    CHECK(b == doctest::Approx(-a).epsilon(1e-14));
}

TEST_CASE("normal cdf and survival helpers") {
    CHECK(quad::norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(quad::norm_pdf(0.0) == doctest::Approx(quad::kInvSqrt2Pi).epsilon(1e-16));
    for (double x : {-3.0, -0.7, 0.0, 1.3, 4.2}) {
        CHECK(std::abs(quad::norm_cdf(x) + quad::norm_sf(x) - 1.0) < 1e-15);
        CHECK(std::abs(quad::norm_cdf(-x) - quad::norm_sf(x)) < 1e-15);
    }
    // scaled density overload: N(2, 9) at 5 equals phi(1)/3
    CHECK(quad::norm_pdf(5.0, 2.0, 3.0) ==
          doctest::Approx(quad::norm_pdf(1.0) / 3.0).epsilon(1e-15));
}
