#include "tvclt/sums.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "tvclt/fft.hpp"
#include "tvclt/quad.hpp"

namespace tvclt {

SumSequence::SumSequence(std::vector<DistPtr> specs) : specs_(std::move(specs)) {
    if (specs_.empty()) throw ValidationError("sum sequence must be nonempty");
    prefix_var_.reserve(specs_.size());
    double acc = 0.0;
    for (const auto& s : specs_) {
        if (!s) throw ValidationError("sum sequence has a null spec");
        acc += s->variance();
        prefix_var_.push_back(acc);
    }
}

const DistPtr& SumSequence::spec(std::size_t k) const {
    if (k < 1 || k > specs_.size())
        throw ValidationError("summand index out of range");
    return specs_[k - 1];
}

double SumSequence::sigma2(std::size_t k) const { return spec(k)->variance(); }

double SumSequence::b(std::size_t n) const {
    if (n < 1 || n > specs_.size())
        throw ValidationError("n out of range for sequence");
    return std::sqrt(prefix_var_[n - 1]);
}

double SumSequence::b_loo(std::size_t k, std::size_t n) const {
    if (n < 2) throw DegenerateSum("leave-one-out needs n >= 2");
    if (k < 1 || k > n) throw ValidationError("summand index out of range");
    const double r = prefix_var_[n - 1] - specs_[k - 1]->variance();
    return std::sqrt(r);
}

SumSequence SumSequence::scaled(double lambda) const {
    std::vector<DistPtr> s;
    s.reserve(specs_.size());
    for (const auto& d : specs_) s.push_back(d->scaled(lambda));
    return SumSequence(std::move(s));
}

SumSequence SumSequence::smoothed(double delta) const {
    std::vector<DistPtr> s;
    s.reserve(specs_.size());
    for (const auto& d : specs_) s.push_back(d->smoothed(delta));
    return SumSequence(std::move(s));
}

namespace {

std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

void check_grid_cfg(const GridConfig& cfg) {
    if (!is_power_of_two(cfg.m) || cfg.m < 16)
        throw ValidationError("grid size m must be a power of two >= 16");
    if (!(cfg.extent_sigmas > 1.0))
        throw ValidationError("extent_sigmas must exceed 1");
}

// samples of the law of X/b on the lattice: p(x) = b * p_X(b x)
std::vector<double> sample_scaled(const Distribution& d, double b, double step,
                                  std::size_t m) {
    std::vector<double> v(m);
    const double half = 0.5 * static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double x = (static_cast<double>(i) - half) * step;
        v[i] = b * d.density(b * x);
    }
    return v;
}

// mass of X/b outside [lo, hi], exact from the family's CDF
double out_of_grid_mass(const Distribution& d, double b, double lo, double hi) {
    return d.cdf(lo * b) + d.survival(hi * b);
}

GridDensity convolve_scaled(const std::vector<const Distribution*>& parts,
                            double b, const GridConfig& cfg) {
    const std::size_t m = cfg.m;
    const double step = lattice_step(cfg.extent_sigmas, m);
    const double lo = -0.5 * static_cast<double>(m) * step;
    const double hi = (0.5 * static_cast<double>(m) - 1.0) * step;

    double out_mass = 0.0;
    for (const auto* p : parts) out_mass += out_of_grid_mass(*p, b, lo, hi);
    if (out_mass > 1e-9)
        throw GridTooSmall("extent " + fmt_g(cfg.extent_sigmas) +
                           " sigma clips " + fmt_g(out_mass) +
                           " of summand mass (tolerance 1e-9)");

    std::vector<double> acc = sample_scaled(*parts[0], b, step, m);
    for (std::size_t j = 1; j < parts.size(); ++j) {
        const auto cur = sample_scaled(*parts[j], b, step, m);
        const auto c = fft::linear_convolution(acc, cur);
        for (std::size_t i = 0; i < m; ++i) acc[i] = c[i + m / 2] * step;
    }
    return GridDensity::from_samples(step, std::move(acc));
}

}  // namespace

GridDensity sum_density(const SumSequence& seq, std::size_t n,
                        const GridConfig& cfg) {
    check_grid_cfg(cfg);
    if (n < 1 || n > seq.size())
        throw ValidationError("n out of range for sequence");
    std::vector<const Distribution*> parts;
    parts.reserve(n);
    for (std::size_t k = 1; k <= n; ++k) {
        if (!seq.spec(k)->has_density())
            throw NonSmoothDensity(seq.spec(k)->name() +
                                   " has no density; cannot form a sum density");
        parts.push_back(seq.spec(k).get());
    }
    return convolve_scaled(parts, seq.b(n), cfg);
}

GridDensity leave_one_out_density(const SumSequence& seq, std::size_t k,
                                  std::size_t n, const GridConfig& cfg) {
    check_grid_cfg(cfg);
    if (n < 2) throw DegenerateSum("leave-one-out needs n >= 2");
    if (n > seq.size()) throw ValidationError("n out of range for sequence");
    if (k < 1 || k > n) throw ValidationError("summand index out of range");
    std::vector<const Distribution*> parts;
    parts.reserve(n - 1);
    for (std::size_t i = 1; i <= n; ++i) {
        if (i == k) continue;
        if (!seq.spec(i)->has_density())
            throw NonSmoothDensity(seq.spec(i)->name() +
                                   " has no density; cannot form a sum density");
        parts.push_back(seq.spec(i).get());
    }
    return convolve_scaled(parts, seq.b_loo(k, n), cfg);
}

GridDensity gaussian_smooth(const GridDensity& d, double delta) {
    if (delta < 0.0) throw ValidationError("delta must be nonnegative");
    if (delta == 0.0) return d;
    const double step = d.step();
    const std::size_t m = d.size();
    const double sig_old = std::sqrt(d.variance());
    const double sig_new = std::hypot(sig_old, delta);
    // keep the input's sigma coverage on the widened lattice
    const double coverage = -d.lo() / sig_old;
    double need = coverage * sig_new;
    std::size_t m2 = m;
    while (0.5 * static_cast<double>(m2) * step < need) m2 *= 2;

    std::vector<double> base(m2, 0.0), kern(m2, 0.0);
    const std::size_t off = (m2 - m) / 2;  // both lattices keep node 0 aligned
    for (std::size_t i = 0; i < m; ++i) base[i + off] = d.value(i);
    const double half2 = 0.5 * static_cast<double>(m2);
    for (std::size_t i = 0; i < m2; ++i) {
        const double x = (static_cast<double>(i) - half2) * step;
        kern[i] = quad::norm_pdf(x, 0.0, delta);
    }
    const double kern_out = 2.0 * quad::norm_sf(half2 * step / delta);
    if (kern_out > 1e-9)
        throw GridTooSmall("smoothing kernel clips " + fmt_g(kern_out) +
                           " of mass; widen the grid");
    const auto c = fft::linear_convolution(base, kern);
    std::vector<double> out(m2);
    for (std::size_t i = 0; i < m2; ++i) out[i] = c[i + m2 / 2] * step;
    return GridDensity::from_samples(step, std::move(out));
}

GridDensity gaussian_smooth(const DistPtr& spec, double delta,
                            const GridConfig& cfg) {
    check_grid_cfg(cfg);
    if (!spec) throw ValidationError("null spec");
    if (delta < 0.0) throw ValidationError("delta must be nonnegative");
    const DistPtr target = spec->smoothed(delta);
    const double sigma = target->sigma();
    const std::size_t m = cfg.m;
    const double step = lattice_step(cfg.extent_sigmas * sigma, m);
    const double lo = -0.5 * static_cast<double>(m) * step;
    const double hi = (0.5 * static_cast<double>(m) - 1.0) * step;
    const double out_mass = out_of_grid_mass(*target, 1.0, lo, hi);
    if (out_mass > 1e-9)
        throw GridTooSmall("extent clips " + fmt_g(out_mass) +
                           " of mass (tolerance 1e-9)");
    return GridDensity::from_samples(step, sample_scaled(*target, 1.0, step, m));
}

GridScore grid_score(const GridDensity& d) {
    const std::size_t m = d.size();
    // contiguous positive range around the mode
    std::size_t peak = 0;
    for (std::size_t i = 1; i < m; ++i)
        if (d.value(i) > d.value(peak)) peak = i;
    if (!(d.value(peak) > kPFloor))
        throw ScoreUndefined("grid density is zero everywhere");
    std::size_t first = peak, last = peak;
    while (first > 0 && d.value(first - 1) > kPFloor) --first;
    while (last + 1 < m && d.value(last + 1) > kPFloor) ++last;

    double mass_in = 0.0;
    for (std::size_t i = first; i <= last; ++i) mass_in += d.value(i) * d.w(i);
    if (mass_in < 1.0 - 1e-6)
        throw ScoreUndefined("positive region carries only " +
                             std::to_string(mass_in) + " of the mass");
    if (last - first < 2)
        throw ScoreUndefined("positive region too narrow for differencing");

    GridScore s;
    s.first = first;
    s.last = last;
    const double inv2h = 1.0 / (2.0 * d.step());
    s.rho.reserve(last - first - 1);
    s.xs.reserve(last - first - 1);
    double eabs = 0.0, mu = 0.0;
    for (std::size_t i = first + 1; i < last; ++i) {
        const double r =
            (std::log(d.value(i + 1)) - std::log(d.value(i - 1))) * inv2h;
        s.rho.push_back(r);
        s.xs.push_back(d.x(i));
        const double w = d.value(i) * d.step();
        eabs += std::abs(r) * w;
        mu += r * w;
    }
    s.e_abs_rho = eabs;
    s.mean_rho = mu;
    return s;
}

ScoreFn GridScore::as_score_fn() const {
    auto xs = this->xs;
    auto rho = this->rho;
    return {[xs, rho](double x) {
                if (xs.empty()) throw ScoreUndefined("empty grid score");
                if (x <= xs.front()) return rho.front();
                if (x >= xs.back()) return rho.back();
                const auto it = std::upper_bound(xs.begin(), xs.end(), x);
                const std::size_t j = static_cast<std::size_t>(it - xs.begin());
                const double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
                return (1.0 - t) * rho[j - 1] + t * rho[j];
            },
            ScoreFn::Provenance::NumericDifferentiation};
}

}  // namespace tvclt
