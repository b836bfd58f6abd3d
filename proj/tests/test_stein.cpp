#include <doctest.h>

#include <cmath>
#include <vector>

#include "tvclt/dist.hpp"
#include "tvclt/errors.hpp"
#include "tvclt/quad.hpp"
#include "tvclt/stein.hpp"
#include "tvclt/sums.hpp"

using namespace tvclt;

TEST_CASE("sign test function solves to the classic solution") {
    const auto sol = solve_stein(sign_fn());
    CHECK(std::abs(sol.eh()) < 1e-13);
    // f(0) = -sqrt(pi/2)
    CHECK(sol.f(0.0) == doctest::Approx(-1.2533141373155001).epsilon(1e-8));
    // closed form away from the jump: f(x) = -sqrt(2 pi) e^{x^2/2} Phi(-|x|)
    for (double x : {-2.0, -1.0, 1.0, 2.0}) {
        const double ref = -quad::kSqrt2Pi * std::exp(0.5 * x * x) *
                           quad::norm_sf(std::abs(x));
        CHECK(sol.f(x) == doctest::Approx(ref).epsilon(1e-8));
    }
    // classical envelopes for |h| <= 1
    CHECK(sol.sup_f() <= quad::kSqrt2Pi + 1e-6);
    CHECK(sol.sup_fprime() <= 4.0 + 1e-6);
    CHECK(sol.max_residual(-8.0, 8.0) < 1e-6);
}

TEST_CASE("indicator test function reproduces gaussian interval mass") {
    const auto sol = solve_stein(indicator_fn(-1.0, 2.0));
    CHECK(sol.eh() ==
          doctest::Approx(quad::norm_cdf(2.0) - quad::norm_cdf(-1.0))
              .epsilon(1e-12));
    CHECK(sol.sup_f() <= quad::kSqrt2Pi + 1e-6);
    CHECK(sol.sup_fprime() <= 4.0 + 1e-6);
    CHECK_THROWS_AS(indicator_fn(2.0, -1.0), ValidationError);
}

TEST_CASE("weak-form residual stays small for kinked test functions") {
    for (std::uint64_t seed : {1u, 7u, 42u}) {
        const auto h = random_piecewise_linear(seed);
        const auto sol = solve_stein(h);
        CAPTURE(h.name);
        CHECK(sol.max_residual(-8.0, 8.0) < 1e-6);
        CHECK(sol.sup_f() <= quad::kSqrt2Pi + 1e-6);
        CHECK(sol.sup_fprime() <= 4.0 + 1e-6);
    }
    // deterministic in the seed
    const auto a = random_piecewise_linear(5);
    const auto b = random_piecewise_linear(5);
    for (double x : {-7.0, -2.5, 0.0, 3.3})
        CHECK(a.h(x) == b.h(x));
}

TEST_CASE("solution is only defined on its grid") {
    const auto sol = solve_stein(smooth_bump_fn());
    CHECK_NOTHROW(sol.f(15.9));
    CHECK_THROWS_AS(sol.f(17.0), ValidationError);
    CHECK_THROWS_AS(sol.f(-16.5), ValidationError);
    // interpolated values never exceed the node supremum by more than slack
    for (double x = -15.0; x <= 15.0; x += 0.37)
        CHECK(std::abs(sol.f(x)) <= sol.sup_f() + 1e-9);
}

TEST_CASE("grid config validation for the stein solver") {
    CHECK_THROWS_AS(solve_stein(sign_fn(), SteinGridConfig{16.0, 100}),
                    ValidationError);
    CHECK_THROWS_AS(solve_stein(sign_fn(), SteinGridConfig{16.0, 32}),
                    ValidationError);
    CHECK_THROWS_AS(solve_stein(TestFunction{}), ValidationError);
}

TEST_CASE("integration by parts identity for the gaussian score") {
    const auto nrm = Distribution::normal();
    // linear f: E[X rho(X)] = -1 and -E[f'] = -1 exactly
    const auto lin = check_ibp_score(*nrm, linear_fn());
    CHECK(lin.lhs == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(lin.rhs == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(lin.gap < 1e-10);
    // sin f: both sides equal -E[cos(N)] = -e^{-1/2}
    const auto s = check_ibp_score(*nrm, sin_fn());
    CHECK(s.lhs == doctest::Approx(-0.6065306597126334).epsilon(1e-10));
    CHECK(s.rhs == doctest::Approx(-0.6065306597126334).epsilon(1e-10));
}

TEST_CASE("integration by parts identity across smooth families") {
    for (const auto& d : {Distribution::laplace(), Distribution::logistic(),
                          Distribution::smoothed_rademacher(0.5)}) {
        for (const auto& f : {sin_fn(), tanh_fn(), arctan_fn(), bump_fn()}) {
            CAPTURE(d->name());
            CAPTURE(f.name);
            CHECK(check_ibp_score(*d, f).gap < 1e-9);
        }
    }
    CHECK_THROWS_AS(
        check_ibp_score(*Distribution::smoothed_rademacher(0.0), sin_fn()),
        NonSmoothDensity);
}

TEST_CASE("covariance kernel identity across smooth families") {
    for (const auto& d : {Distribution::normal(), Distribution::laplace(),
                          Distribution::logistic()}) {
        for (const auto& f : {sin_fn(), tanh_fn(), arctan_fn()}) {
            CAPTURE(d->name());
            CAPTURE(f.name);
            CHECK(check_kernel_identity(*d, f).gap < 1e-9);
        }
    }
    // for the normal, E[f(Y) Y] = E[f'(Y)] directly (kernel is 1)
    const auto r = check_kernel_identity(*Distribution::normal(), sin_fn());
    CHECK(r.lhs == doctest::Approx(0.6065306597126334).epsilon(1e-10));
    CHECK_THROWS_AS(
        check_kernel_identity(*Distribution::smoothed_rademacher(0.0), sin_fn()),
        DisconnectedSupport);
}

TEST_CASE("leave-one-out score bound for iid normals") {
    std::vector<DistPtr> specs(10, Distribution::normal());
    const SumSequence seq(specs);
    const auto rep = check_loo_score_bound(seq, 1, 10, GridConfig{1 << 12, 12.0});
    // the loo sum is standard normal: E|rho| = sqrt(2/pi), bound sqrt(J) = 1
    CHECK(rep.e_abs_rho == doctest::Approx(0.7978845608028654).epsilon(1e-4));
    CHECK(rep.j_bound == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rep.holds);
}

TEST_CASE("leave-one-out score bound for heterogeneous summands") {
    const SumSequence seq({Distribution::laplace(), Distribution::logistic(),
                           Distribution::laplace(), Distribution::logistic()});
    const auto rep = check_loo_score_bound(seq, 2, 4, GridConfig{1 << 12, 12.0});
    CHECK(rep.j_bound == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
    CHECK(rep.holds);
    CHECK(rep.e_abs_rho < rep.j_bound + 1e-4);
}

TEST_CASE("increment bound on the stein solution") {
    const auto sol = solve_stein(random_piecewise_linear(3));
    const auto lap = Distribution::laplace();
    for (double b : {2.0, 5.0, 20.0}) {
        CAPTURE(b);
        CHECK(check_increment_bound(*lap, b, sol) <= 1e-6);
    }
    const auto sgn = solve_stein(sign_fn());
    CHECK(check_increment_bound(*Distribution::normal(), 3.0, sgn) <= 1e-6);
}

TEST_CASE("truncated kernel moment chain for the laplace law") {
    const auto rep =
        check_truncated_kernel_moment(*Distribution::laplace(), 2.0);
    CHECK(rep.rhs == doctest::Approx(3.5639649017409716).epsilon(1e-10));
    CHECK(rep.cheb_lhs <= rep.lhs + 1e-9);
    CHECK(rep.lhs <= rep.rhs + 1e-9);
    CHECK(rep.holds);
    CHECK(rep.cheb_holds);
    // cheb side: E[2 ∧ |X|] Var = (1 - e^{-2}) * 2
    CHECK(rep.cheb_lhs ==
          doctest::Approx(2.0 * (1.0 - std::exp(-2.0))).epsilon(1e-10));
}

TEST_CASE("truncated kernel moment chain across families and levels") {
    for (const auto& d : {Distribution::normal(), Distribution::laplace(),
                          Distribution::logistic(),
                          Distribution::smoothed_uniform(1.0, 0.0)}) {
        for (double b : {0.5, 1.0, 3.0}) {
            CAPTURE(d->name());
            CAPTURE(b);
            const auto rep = check_truncated_kernel_moment(*d, b);
            CHECK(rep.holds);
            CHECK(rep.cheb_holds);
        }
    }
    // degenerate truncation level holds trivially
    CHECK(check_truncated_kernel_moment(*Distribution::normal(), 0.0).holds);
}
