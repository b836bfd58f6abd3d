#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "tvclt/dist.hpp"
#include "tvclt/errors.hpp"
#include "tvclt/grid.hpp"
#include "tvclt/metrics.hpp"
#include "tvclt/quad.hpp"
#include "tvclt/sums.hpp"

using namespace tvclt;

namespace {

GridDensity normal_grid(double mu, double sigma, const GridConfig& cfg) {
    const double step = lattice_step(cfg.extent_sigmas, cfg.m);
    std::vector<double> v(cfg.m);
    for (std::size_t i = 0; i < cfg.m; ++i) {
        const double x = (static_cast<double>(i) - 0.5 * cfg.m) * step;
        v[i] = quad::norm_pdf(x, mu, sigma);
    }
    return GridDensity::from_samples(step, std::move(v));
}

}  // namespace

TEST_CASE("tv distance between shifted normals") {
    const GridConfig cfg{1 << 14, 16.0};
    const auto p = normal_grid(0.0, 1.0, cfg);
    const auto q = normal_grid(1.0, 1.0, cfg);
    // 2 Phi(1/2) - 1; the trapezoid cell containing the density crossing
    // carries an O(step^2) kink error, so the oracle holds to ~1e-6 only
    CHECK(tv_distance(p, q) ==
          doctest::Approx(0.3829249225480262).epsilon(1e-5));
    CHECK(tv_distance(p, p) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(tv_distance(q, p) == doctest::Approx(tv_distance(p, q)).epsilon(1e-15));
}

TEST_CASE("distances to the standard normal vanish on the normal itself") {
    const GridConfig cfg{1 << 14, 14.0};
    const auto p = normal_grid(0.0, 1.0, cfg);
    CHECK(tv_to_normal(p) < 1e-12);
    CHECK(kolmogorov_to_normal(p) < 1e-7);
    const auto rep = distance_to_normal(p);
    CHECK(rep.tv == doctest::Approx(tv_to_normal(p)).epsilon(1e-12));
    CHECK(rep.kolmogorov == doctest::Approx(kolmogorov_to_normal(p)).epsilon(1e-12));
    CHECK(rep.extent == doctest::Approx(-p.lo()).epsilon(1e-12));
}

TEST_CASE("kolmogorov distance between shifted normals") {
    const GridConfig cfg{1 << 14, 16.0};
    const auto p = normal_grid(0.0, 1.0, cfg);
    const auto q = normal_grid(1.0, 1.0, cfg);
    // sup_x |Phi(x) - Phi(x-1)| = 2 Phi(1/2) - 1 for unit shift
    CHECK(kolmogorov_distance(p, q) ==
          doctest::Approx(0.3829249225480262).epsilon(1e-6));
    CHECK(kolmogorov_distance(p, q) <= tv_distance(p, q) + 1e-9);
}

TEST_CASE("mismatched lattices are rejected") {
    const auto p = normal_grid(0.0, 1.0, GridConfig{1024, 12.0});
    const auto q = normal_grid(0.0, 1.0, GridConfig{2048, 12.0});
    CHECK_THROWS_AS(tv_distance(p, q), GridMismatch);
    CHECK_THROWS_AS(kolmogorov_distance(p, q), GridMismatch);
}

TEST_CASE("characteristic function probe") {
    const GridConfig cfg{1 << 14, 14.0};
    const auto p = normal_grid(0.0, 1.0, cfg);
    const auto z = char_fn(p, 1.0);
    CHECK(std::abs(z.real() - std::exp(-0.5)) < 1e-9);
    CHECK(std::abs(z.imag()) < 1e-12);
    CHECK(std::abs(char_fn(p, 0.0) - std::complex<double>(1.0, 0.0)) < 1e-12);
    // shifted normal picks up the phase e^{it}
    const auto q = normal_grid(1.0, 1.0, cfg);
    const auto w = char_fn(q, 1.0);
    CHECK(std::abs(w - std::exp(-0.5) * std::exp(std::complex<double>(0.0, 1.0))) <
          1e-8);
}

TEST_CASE("epsilon scan grid is logarithmic with exact endpoints") {
    const auto g = epsilon_grid(50, 1e-3, 1.0);
    REQUIRE(g.size() == 50);
    CHECK(g.front() == 1e-3);
    CHECK(g.back() == 1.0);
    for (std::size_t i = 1; i < g.size(); ++i) {
        CHECK(g[i] > g[i - 1]);
        if (i >= 2)
            CHECK(g[i] / g[i - 1] ==
                  doctest::Approx(g[i - 1] / g[i - 2]).epsilon(1e-10));
    }
    CHECK_THROWS_AS(epsilon_grid(1, 1e-3, 1.0), ValidationError);
    CHECK_THROWS_AS(epsilon_grid(10, 0.5, 0.1), ValidationError);
}

TEST_CASE("lindeberg functional for iid normals") {
    std::vector<DistPtr> specs(25, Distribution::normal());
    const SumSequence seq(specs);
    // eps b_n = 0.2 * 5 = 1: L = E[X^2 1{|X|>1}]
    CHECK(lindeberg_functional(seq, 25, 0.2) ==
          doctest::Approx(0.8012519569012009).epsilon(1e-10));
    // monotone in eps
    CHECK(lindeberg_functional(seq, 25, 0.5) <
          lindeberg_functional(seq, 25, 0.2));
    CHECK_THROWS_AS(lindeberg_functional(seq, 25, 0.0), ValidationError);
}

TEST_CASE("feller ratio picks the dominant summand") {
    const SumSequence seq({Distribution::laplace(1.0), Distribution::laplace(2.0),
                           Distribution::laplace(3.0)});
    // variances 2, 8, 18
    CHECK(feller_ratio(seq, 3) == doctest::Approx(18.0 / 28.0).epsilon(1e-15));
    CHECK(feller_ratio(seq, 1) == doctest::Approx(1.0));
    std::vector<DistPtr> iid(100, Distribution::normal());
    CHECK(feller_ratio(SumSequence(iid), 100) ==
          doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("truncated third-moment functional for iid laplace") {
    const SumSequence seq({Distribution::laplace(), Distribution::laplace()});
    // b_2 = 2; E[X^2 (2 ∧ |X|)] = 6 - 18 e^{-2}; M_2 = 2 * that / 8
    CHECK(truncated_moment(seq, 2) ==
          doctest::Approx(0.8909912254352429).epsilon(1e-12));
    // scale invariant
    CHECK(truncated_moment(seq.scaled(5.0), 2) ==
          doctest::Approx(truncated_moment(seq, 2)).epsilon(1e-10));
}

TEST_CASE("per-summand moment quadratures") {
    const auto lap = Distribution::laplace();
    CHECK(expect_abs3(*lap) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(expect_sq_trunc(*lap, 2.0) ==
          doctest::Approx(6.0 - 18.0 * std::exp(-2.0)).epsilon(1e-12));
    // E[b ∧ |X|] -> E|X| = 1 as b grows
    CHECK(expect_abs_trunc(*lap, 50.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(expect_abs_trunc(*lap, 2.0) ==
          doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-12));

    const auto nrm = Distribution::normal();
    CHECK(expect_abs3(*nrm) ==
          doctest::Approx(1.5957691216057308).epsilon(1e-12));
    CHECK(expect_sq_above(*nrm, 1.0) ==
          doctest::Approx(0.8012519569012009).epsilon(1e-12));
    CHECK(expect_sq_above(*nrm, 0.0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("banded third moments partition the full third moment") {
    for (const auto& d : {Distribution::laplace(), Distribution::normal(),
                          Distribution::logistic()}) {
        CAPTURE(d->name());
        const double whole = expect_abs3(*d);
        const double parts = expect_abs3_band(*d, 0.0, 1.0) +
                             expect_abs3_band(*d, 1.0, 3.0) +
                             expect_abs3_band(*d, 3.0, 1e9);
        CHECK(parts == doctest::Approx(whole).epsilon(1e-10));
        CHECK(expect_abs3_band(*d, 2.0, 2.0) == doctest::Approx(0.0));
    }
}

TEST_CASE("summand aggregation visits distinct specs once") {
    const auto shared = Distribution::laplace();
    const SumSequence seq({shared, shared, Distribution::logistic(), shared});
    std::size_t calls = 0;
    const double v = sum_over_summands(seq, 4, [&](const Distribution& d) {
        ++calls;
        return d.variance();
    });
    CHECK(calls == 2);
    CHECK(v == doctest::Approx(3.0 * 2.0 + M_PI * M_PI / 3.0).epsilon(1e-12));
}
