#include "tvclt/stein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "tvclt/metrics.hpp"
#include "tvclt/quad.hpp"

namespace tvclt {

namespace {
constexpr double kSqrt8Pi = 5.0132565492620005;  // sqrt(8 pi)

// per-cell quadrature with the test function's kinks split out
template <typename F>
double cell_integral(const F& f, double a, double b,
                     const std::vector<double>& breaks) {
    bool inside = false;
    for (double p : breaks)
        if (p > a && p < b) {
            inside = true;
            break;
        }
    if (!inside) return quad::panel(f, a, b);
    double acc = 0.0, prev = a;
    std::vector<double> pts;
    for (double p : breaks)
        if (p > a && p < b) pts.push_back(p);
    std::sort(pts.begin(), pts.end());
    for (double p : pts) {
        acc += quad::panel(f, prev, p);
        prev = p;
    }
    return acc + quad::panel(f, prev, b);
}
}  // namespace

TestFunction sign_fn() {
    TestFunction t;
    t.h = [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); };
    t.bound = 1.0;
    t.kind = TestFunction::Kind::Sign;
    t.breakpoints = {0.0};
    t.name = "sign";
    return t;
}

TestFunction indicator_fn(double a, double b) {
    if (!(a < b)) throw ValidationError("indicator needs a < b");
    TestFunction t;
    t.h = [a, b](double x) { return (x >= a && x <= b) ? 1.0 : 0.0; };
    t.bound = 1.0;
    t.kind = TestFunction::Kind::Indicator;
    t.breakpoints = {a, b};
    t.name = "indicator";
    return t;
}

namespace {
double bump_value(double x, double w) {
    const double u = x / w;
    const double s = 1.0 - u * u;
    if (s <= 1e-12) return 0.0;
    return std::exp(1.0 - 1.0 / s);
}
}  // namespace

TestFunction smooth_bump_fn(double width) {
    TestFunction t;
    t.h = [width](double x) { return bump_value(x, width); };
    t.bound = 1.0;
    t.kind = TestFunction::Kind::SmoothBump;
    t.breakpoints = {-width, width};
    t.name = "smooth_bump";
    return t;
}

TestFunction random_piecewise_linear(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> nk(4, 10);
    std::uniform_real_distribution<double> ux(-8.0, 8.0);
    std::uniform_real_distribution<double> uv(-1.0, 1.0);
    const int k = nk(rng);
    std::vector<double> xs(static_cast<std::size_t>(k));
    for (auto& x : xs) x = ux(rng);
    std::sort(xs.begin(), xs.end());
    std::vector<double> vs(xs.size());
    for (auto& v : vs) v = uv(rng);
    TestFunction t;
    t.h = [xs, vs](double x) {
        if (x <= xs.front()) return vs.front();
        if (x >= xs.back()) return vs.back();
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        const std::size_t j = static_cast<std::size_t>(it - xs.begin());
        const double s = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
        return (1.0 - s) * vs[j - 1] + s * vs[j];
    };
    t.bound = 1.0;
    t.kind = TestFunction::Kind::PiecewiseLinear;
    t.breakpoints = xs;
    t.name = "piecewise_linear(seed=" + std::to_string(seed) + ")";
    return t;
}

DiffFn sin_fn() {
    return {[](double x) { return std::sin(x); },
            [](double x) { return std::cos(x); }, "sin"};
}
DiffFn tanh_fn() {
    return {[](double x) { return std::tanh(x); },
            [](double x) {
                const double c = std::cosh(x);
                return 1.0 / (c * c);
            },
            "tanh"};
}
DiffFn arctan_fn() {
    return {[](double x) { return std::atan(x); },
            [](double x) { return 1.0 / (1.0 + x * x); }, "arctan"};
}
DiffFn bump_fn(double width) {
    return {[width](double x) { return bump_value(x, width); },
            [width](double x) {
                const double u = x / width;
                const double s = 1.0 - u * u;
                if (s <= 1e-6) return 0.0;
                return -bump_value(x, width) * 2.0 * u / (width * s * s);
            },
            "smooth_bump"};
}
DiffFn linear_fn() {
    return {[](double x) { return x; }, [](double) { return 1.0; }, "linear"};
}

SteinSolution solve_stein(const TestFunction& h, const SteinGridConfig& cfg) {
    if (!h.h) throw ValidationError("test function has no evaluator");
    if (!is_power_of_two(cfg.m) || cfg.m < 64)
        throw ValidationError("stein grid size must be a power of two >= 64");

    SteinSolution s;
    s.h_ = h;
    const std::size_t m = cfg.m;
    const double step = lattice_step(cfg.extent, m);
    s.step_ = step;

    // node set: uniform lattice plus the kinks of h, so every cell is smooth
    // and the cubic interpolant keeps its full order
    std::vector<double> xs;
    xs.reserve(m + h.breakpoints.size());
    for (std::size_t i = 0; i < m; ++i)
        xs.push_back((static_cast<double>(i) - 0.5 * static_cast<double>(m)) *
                     step);
    const double lo = xs.front(), hi = xs.back();
    for (double p : h.breakpoints)
        if (p > lo && p < hi) xs.push_back(p);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end(),
                         [](double a, double b) { return b - a < 1e-9; }),
             xs.end());
    const std::size_t mm = xs.size();

    // E h(N) over the effective support of the normal
    s.eh_ = quad::integrate_split(
        [&](double y) { return h.h(y) * quad::norm_pdf(y); }, -9.5, 9.5,
        h.breakpoints, 1e-13);
    const double eh = s.eh_;
    const auto g = [&](double y) { return h.h(y) - eh; };
    const auto gk = [&](double y) { return g(y) * std::exp(-0.5 * y * y); };

    s.xs_ = xs;
    s.f_.assign(mm, 0.0);
    s.fp_.assign(mm, 0.0);
    // zero is a lattice node and dedup keeps the earlier (lattice) entry
    const std::size_t iz = static_cast<std::size_t>(
        std::lower_bound(xs.begin(), xs.end(), 0.0) - xs.begin());

    // left sweep: f(x) = e^{x^2/2} * integral of g e^{-y^2/2} over (-inf, x]
    double acc = 0.0;  // tail below the grid is < B*sqrt(2pi)*Phi(-extent)
    for (std::size_t i = 0; i <= iz; ++i) {
        if (i > 0) acc += cell_integral(gk, xs[i - 1], xs[i], h.breakpoints);
        s.f_[i] = std::exp(0.5 * xs[i] * xs[i]) * acc;
    }
    // right sweep: f(x) = -e^{x^2/2} * integral of g e^{-y^2/2} over [x, inf)
    acc = 0.0;
    for (std::size_t i = mm - 1; i > iz; --i) {
        if (i < mm - 1)
            acc += cell_integral(gk, xs[i], xs[i + 1], h.breakpoints);
        s.f_[i] = -std::exp(0.5 * xs[i] * xs[i]) * acc;
    }

    double sf = 0.0, sfp = 0.0;
    for (std::size_t i = 0; i < mm; ++i) {
        s.fp_[i] = xs[i] * s.f_[i] + g(xs[i]);
        sf = std::max(sf, std::abs(s.f_[i]));
        sfp = std::max(sfp, std::abs(s.fp_[i]));
    }
    s.sup_f_ = sf;
    s.sup_fp_ = sfp;
    return s;
}

namespace {
// cubic Hermite on one cell given endpoint values and derivatives
double hermite(double t, double y0, double y1, double d0, double d1, double h) {
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 +
           (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * d1;
}
}  // namespace

double SteinSolution::f(double x) const {
    const std::size_t m = xs_.size();
    if (x < xs_.front() || x > xs_.back())
        throw ValidationError("stein solution evaluated outside its grid");
    std::size_t j = static_cast<std::size_t>(
        std::upper_bound(xs_.begin(), xs_.end(), x) - xs_.begin());
    j = (j == 0) ? 0 : j - 1;
    if (j >= m - 1) j = m - 2;
    const double w = xs_[j + 1] - xs_[j];
    const double t = (x - xs_[j]) / w;
    return hermite(t, f_[j], f_[j + 1], fp_[j], fp_[j + 1], w);
}

double SteinSolution::fprime(double x) const {
    return x * f(x) + (h_.h(x) - eh_);
}

double SteinSolution::max_residual(double lo, double hi) const {
    const std::size_t m = xs_.size();
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double a = xs_[i], b = xs_[i + 1];
        if (a < lo || b > hi) continue;
        const auto integrand = [&](double y) {
            return y * f(y) + (h_.h(y) - eh_);
        };
        const double cell = cell_integral(integrand, a, b, h_.breakpoints);
        const double r = std::abs(f_[i + 1] - f_[i] - cell) / (b - a);
        worst = std::max(worst, r);
    }
    return worst;
}

IdentityReport check_ibp_score(const Distribution& spec, const DiffFn& fn) {
    if (!spec.smooth())
        throw NonSmoothDensity(spec.name() + " is not absolutely continuous");
    const Support w = spec.window();
    IdentityReport r;
    r.lhs = quad::integrate_split(
        [&](double x) { return fn.f(x) * spec.score(x) * spec.density(x); },
        w.lo, w.hi, spec.breakpoints());
    r.rhs = -quad::integrate_split(
        [&](double x) { return fn.df(x) * spec.density(x); }, w.lo, w.hi,
        spec.breakpoints());
    r.gap = std::abs(r.lhs - r.rhs);
    return r;
}

IdentityReport check_kernel_identity(const Distribution& spec,
                                     const DiffFn& fn) {
    if (!spec.connected_support())
        throw DisconnectedSupport(spec.name() + " support is not an interval");
    const Support w = spec.window();
    IdentityReport r;
    r.lhs = quad::integrate_split(
        [&](double x) { return fn.f(x) * x * spec.density(x); }, w.lo, w.hi,
        spec.breakpoints());
    // tau(x) p(x) equals the tail integral, so no division by p is needed
    r.rhs = quad::integrate_split(
        [&](double x) { return fn.df(x) * spec.tail_integral(x); }, w.lo, w.hi,
        spec.breakpoints());
    r.gap = std::abs(r.lhs - r.rhs);
    return r;
}

LooScoreReport check_loo_score_bound(const SumSequence& seq, std::size_t k,
                                     std::size_t n, const GridConfig& cfg) {
    LooScoreReport r;
    const GridDensity d = leave_one_out_density(seq, k, n, cfg);
    r.e_abs_rho = grid_score(d).e_abs_rho;
    double jmax = 0.0;
    for (std::size_t i = 1; i <= n; ++i)
        jmax = std::max(jmax, seq.spec(i)->fisher_j());
    r.j_bound = std::sqrt(jmax);
    r.holds = r.e_abs_rho <= r.j_bound + 1e-4;
    return r;
}

double check_increment_bound(const Distribution& x_spec, double b_n,
                             const SteinSolution& f, const ProbeConfig& probes) {
    if (!(b_n > 0.0)) throw ValidationError("b_n must be positive");
    (void)x_spec;  // the probe box covers the summand's effective range
    // |f| only decays beyond the solution grid, so clamping to the edge
    // cannot hide a violation of the increment bound
    const double glo = f.node(0), ghi = f.node(f.size() - 1);
    const auto fev = [&](double z) {
        return f.f(std::min(std::max(z, glo), ghi));
    };
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < probes.nu; ++i) {
        const double u = probes.u_lo + (probes.u_hi - probes.u_lo) *
                                           static_cast<double>(i) /
                                           static_cast<double>(probes.nu - 1);
        const double fu = fev(u);
        for (std::size_t j = 0; j < probes.nx; ++j) {
            const double x = probes.x_lo + (probes.x_hi - probes.x_lo) *
                                               static_cast<double>(j) /
                                               static_cast<double>(probes.nx - 1);
            const double lhs = std::abs(fev(u + x / b_n) - fu);
            const double rhs =
                (kSqrt8Pi / b_n) * std::min(b_n, std::abs(x));
            worst = std::max(worst, lhs - rhs);
        }
    }
    return worst;
}

TruncatedKernelReport check_truncated_kernel_moment(const Distribution& spec,
                                                    double b) {
    if (b < 0.0) throw ValidationError("truncation level must be nonnegative");
    if (!spec.connected_support())
        throw DisconnectedSupport(spec.name() + " support is not an interval");
    TruncatedKernelReport r;
    if (b == 0.0) {
        r.holds = r.cheb_holds = true;
        return r;
    }
    const Support w = spec.window();
    auto breaks = spec.breakpoints();
    breaks.push_back(-b);
    breaks.push_back(b);
    breaks.push_back(0.0);
    r.lhs = quad::integrate_split(
        [&](double x) {
            return std::min(b, std::abs(x)) * spec.tail_integral(x);
        },
        w.lo, w.hi, breaks);
    r.rhs = expect_sq_trunc(spec, b);
    r.cheb_lhs = expect_abs_trunc(spec, b) * spec.variance();
    r.holds = r.lhs <= r.rhs + 1e-6;
    r.cheb_holds = r.cheb_lhs <= r.rhs + 1e-6;
    return r;
}

}  // namespace tvclt
