#include "tvclt/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "tvclt/quad.hpp"

namespace tvclt {

namespace {
void require_lattice(const GridDensity& p, const GridDensity& q) {
    if (!p.same_lattice(q))
        throw GridMismatch("grid densities do not share a lattice");
}
}  // namespace

double tv_distance(const GridDensity& p, const GridDensity& q) {
    require_lattice(p, q);
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        acc += std::abs(p.value(i) - q.value(i)) * p.w(i);
    return std::clamp(0.5 * acc, 0.0, 1.0);
}

double kolmogorov_distance(const GridDensity& p, const GridDensity& q) {
    require_lattice(p, q);
    double fp = 0.0, fq = 0.0, best = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i) {
        fp += 0.5 * (p.value(i - 1) + p.value(i)) * p.step();
        fq += 0.5 * (q.value(i - 1) + q.value(i)) * q.step();
        best = std::max(best, std::abs(fp - fq));
    }
    return best;
}

double tv_to_normal(const GridDensity& p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        acc += std::abs(p.value(i) - quad::norm_pdf(p.x(i))) * p.w(i);
    // mass of the reference outside the grid, added in full
    const double ref_tail = quad::norm_cdf(p.lo()) + quad::norm_sf(p.hi());
    return std::clamp(0.5 * (acc + ref_tail), 0.0, 1.0);
}

double kolmogorov_to_normal(const GridDensity& p) {
    double fp = 0.0;
    double best = std::abs(quad::norm_cdf(p.lo()));
    for (std::size_t i = 1; i < p.size(); ++i) {
        fp += 0.5 * (p.value(i - 1) + p.value(i)) * p.step();
        best = std::max(best, std::abs(fp - quad::norm_cdf(p.x(i))));
    }
    return best;
}

DistanceReport distance_to_normal(const GridDensity& p) {
    DistanceReport r;
    r.tv = tv_to_normal(p);
    r.kolmogorov = kolmogorov_to_normal(p);
    r.mass_clipped = p.mass_clipped();
    r.extent = -p.lo();
    return r;
}

std::complex<double> char_fn(const GridDensity& p, double t) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double xt = t * p.x(i);
        acc += std::complex<double>{std::cos(xt), std::sin(xt)} *
               (p.value(i) * p.w(i));
    }
    return acc;
}

std::vector<double> epsilon_grid(std::size_t count, double lo, double hi) {
    if (count < 2 || !(lo > 0.0) || !(hi > lo))
        throw ValidationError("epsilon grid needs count >= 2 and 0 < lo < hi");
    std::vector<double> g(count);
    const double r = std::log(hi / lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i)
        g[i] = lo * std::exp(r * static_cast<double>(i));
    g.back() = hi;
    return g;
}

namespace {
// integral of f(x) p(x) over |x| > c within the quadrature window
double tail_expect(const Distribution& d, double c,
                   const std::function<double(double)>& f) {
    const Support w = d.window();
    double acc = 0.0;
    if (w.hi > c)
        acc += quad::integrate_split(
            [&](double x) { return f(x) * d.density(x); }, std::max(c, w.lo),
            w.hi, d.breakpoints());
    if (w.lo < -c)
        acc += quad::integrate_split(
            [&](double x) { return f(x) * d.density(x); }, w.lo,
            std::min(-c, w.hi), d.breakpoints());
    return acc;
}
}  // namespace

double expect_sq_above(const Distribution& d, double c) {
    if (c < 0.0) throw ValidationError("threshold must be nonnegative");
    return tail_expect(d, c, [](double x) { return x * x; });
}

double expect_abs3(const Distribution& d) {
    return tail_expect(d, 0.0, [](double x) { return std::abs(x) * x * x; });
}

double expect_sq_trunc(const Distribution& d, double b) {
    if (b < 0.0) throw ValidationError("truncation level must be nonnegative");
    if (b == 0.0) return 0.0;
    const Support w = d.window();
    auto breaks = d.breakpoints();
    breaks.push_back(-b);
    breaks.push_back(b);
    breaks.push_back(0.0);
    return quad::integrate_split(
        [&](double x) {
            return x * x * std::min(b, std::abs(x)) * d.density(x);
        },
        w.lo, w.hi, breaks);
}

double expect_abs_trunc(const Distribution& d, double b) {
    if (b < 0.0) throw ValidationError("truncation level must be nonnegative");
    if (b == 0.0) return 0.0;
    const Support w = d.window();
    auto breaks = d.breakpoints();
    breaks.push_back(-b);
    breaks.push_back(b);
    breaks.push_back(0.0);
    return quad::integrate_split(
        [&](double x) { return std::min(b, std::abs(x)) * d.density(x); },
        w.lo, w.hi, breaks);
}

double expect_abs3_band(const Distribution& d, double a, double b) {
    if (!(a >= 0.0 && a <= b))
        throw ValidationError("band must satisfy 0 <= a <= b");
    if (a == b) return 0.0;
    const Support w = d.window();
    const auto f = [&](double x) { return std::abs(x) * x * x * d.density(x); };
    double acc = 0.0;
    const double rlo = std::max(a, w.lo), rhi = std::min(b, w.hi);
    if (rlo < rhi) acc += quad::integrate_split(f, rlo, rhi, d.breakpoints());
    const double llo = std::max(-b, w.lo), lhi = std::min(-a, w.hi);
    if (llo < lhi) acc += quad::integrate_split(f, llo, lhi, d.breakpoints());
    return acc;
}

double lindeberg_functional(const SumSequence& seq, std::size_t n, double eps) {
    if (!(eps > 0.0)) throw ValidationError("epsilon must be positive");
    const double b = seq.b(n);
    const double acc = sum_over_summands(
        seq, n, [&](const Distribution& d) { return expect_sq_above(d, eps * b); });
    return acc / (b * b);
}

double feller_ratio(const SumSequence& seq, std::size_t n) {
    const double b2 = seq.b(n) * seq.b(n);
    double mx = 0.0;
    for (std::size_t k = 1; k <= n; ++k) mx = std::max(mx, seq.sigma2(k));
    return mx / b2;
}

double truncated_moment(const SumSequence& seq, std::size_t n) {
    const double b = seq.b(n);
    const double acc = sum_over_summands(
        seq, n, [&](const Distribution& d) { return expect_sq_trunc(d, b); });
    return acc / (b * b * b);
}

}  // namespace tvclt
