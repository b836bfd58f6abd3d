#include "tvclt/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "tvclt/errors.hpp"
#include "tvclt/metrics.hpp"

namespace tvclt {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double k8Pi = 25.132741228718345;  // 8 pi
}  // namespace

TvBound tv_bound(const SumSequence& seq, std::size_t n) {
    TvBound b;
    if (n == 0) throw ValidationError("n must be positive");
    if (n > seq.size()) throw ValidationError("n exceeds the sequence length");
    if (n == 1) {
        b.reason = "n=1: Feller ratio is 1, denominator vanishes";
        return b;
    }
    double jmax = 0.0;
    try {
        for (std::size_t k = 1; k <= n; ++k)
            jmax = std::max(jmax, seq.spec(k)->fisher_j());
    } catch (const NonSmoothDensity& e) {
        b.reason = e.what();
        return b;
    } catch (const QuadratureDivergent& e) {
        b.reason = e.what();
        return b;
    }
    const double feller = feller_ratio(seq, n);
    if (!(feller < 1.0)) {
        b.reason = "Feller ratio is 1, denominator vanishes";
        return b;
    }
    const double m_n = truncated_moment(seq, n);
    b.value = std::sqrt(k8Pi * jmax / (1.0 - feller)) * m_n;
    b.finite = true;
    return b;
}

BoundReport bound_report(const SumSequence& seq, std::size_t n,
                         const GridConfig& cfg) {
    BoundReport r;
    r.n = n;
    r.j_values.reserve(n);
    for (std::size_t k = 1; k <= n; ++k) {
        double j = kInf;
        try {
            j = seq.spec(k)->fisher_j();
        } catch (const Error&) {
            // recorded as infinite; tv_bound carries the reason
        }
        r.j_values.push_back(j);
        r.j_max = std::max(r.j_max, j);
    }
    r.feller = feller_ratio(seq, n);
    r.m_n = truncated_moment(seq, n);

    const TvBound b = tv_bound(seq, n);
    r.tv_bound = b.value;
    r.bound_finite = b.finite;
    r.infinite_reason = b.reason;

    const GridDensity d = sum_density(seq, n, cfg);
    const DistanceReport dist = distance_to_normal(d);
    r.tv_actual = dist.tv;
    r.k_actual = dist.kolmogorov;
    r.slack_abs = r.tv_bound - r.tv_actual;
    r.slack_ratio = r.tv_actual / r.tv_bound;
    r.bound_holds = r.tv_actual <= r.tv_bound + 1e-6;
    return r;
}

KolmogorovBounds kolmogorov_bounds(const SumSequence& seq, std::size_t n,
                                   double c) {
    if (!(c > 0.0)) throw ValidationError("constant c must be positive");
    KolmogorovBounds kb;
    kb.truncated_form = c * truncated_moment(seq, n);
    const double b = seq.b(n);
    double third = 0.0;
    try {
        third = sum_over_summands(
            seq, n, [](const Distribution& d) { return expect_abs3(d); });
    } catch (const QuadratureDivergent&) {
        kb.third_moment_form = kInf;
        return kb;
    }
    kb.third_moment_form = c * third / (b * b * b);
    return kb;
}

EntropyReport entropy_inequality(const Distribution& spec) {
    EntropyReport r;
    r.d = spec.relative_entropy();
    r.j = spec.fisher_j();
    r.holds = r.d <= 0.5 * (r.j - 1.0) + 1e-6;
    return r;
}

TruncationReport truncation_decomposition(const SumSequence& seq,
                                          std::size_t n, double eps) {
    if (!(eps > 0.0 && eps < 1.0))
        throw ValidationError("eps must lie in (0,1)");
    TruncationReport r;
    const double b = seq.b(n);
    const double b3 = b * b * b;
    r.m_n = truncated_moment(seq, n);
    r.l_n_eps = lindeberg_functional(seq, n, eps);
    // M_n splits at the radii eps*b and b: the cap b ∧ |X| is b above the
    // larger radius and |X| below it
    r.above = sum_over_summands(seq, n, [&](const Distribution& d) {
                  return b * expect_sq_above(d, b);
              }) / b3;
    r.mid = sum_over_summands(seq, n, [&](const Distribution& d) {
                return expect_abs3_band(d, eps * b, b);
            }) / b3;
    r.below = sum_over_summands(seq, n, [&](const Distribution& d) {
                  return expect_abs3_band(d, 0.0, eps * b);
              }) / b3;
    r.holds = r.m_n <= r.l_n_eps + eps + 1e-8;
    return r;
}

std::vector<SmoothingRow> smoothing_stability(const SumSequence& seq,
                                              std::size_t n,
                                              const std::vector<double>& deltas,
                                              const GridConfig& cfg) {
    if (deltas.empty()) throw ValidationError("delta list is empty");
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (deltas[i] < 0.0)
            throw ValidationError("delta values must be nonnegative");
        if (i > 0 && deltas[i] > deltas[i - 1])
            throw ValidationError("delta values must be non-ascending");
    }
    std::vector<SmoothingRow> rows;
    rows.reserve(deltas.size());
    for (double delta : deltas) {
        const SumSequence sm = seq.smoothed(delta);
        SmoothingRow row;
        row.delta = delta;
        const TvBound b = tv_bound(sm, n);
        row.tv_bound = b.value;
        row.bound_finite = b.finite;
        row.tv_actual = distance_to_normal(sum_density(sm, n, cfg)).tv;
        rows.push_back(row);
    }
    return rows;
}

double log_log_slope(const std::vector<double>& xs,
                     const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw ValidationError("slope needs two samples of equal length");
    const std::size_t n = xs.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
            throw ValidationError("log-log slope needs positive samples");
        const double lx = std::log(xs[i]), ly = std::log(ys[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double nn = static_cast<double>(n);
    return (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
}

}  // namespace tvclt
