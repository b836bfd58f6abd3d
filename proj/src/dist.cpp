#include "tvclt/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tvclt/quad.hpp"

namespace tvclt {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

// stable x / (1 + e^x)
double x_over_1p_exp(double x) {
    if (x > 0) {
        const double e = std::exp(-x);
        return x * e / (1.0 + e);
    }
    return x / (1.0 + std::exp(x));
}

}  // namespace

double Distribution::density_raw(double x) const {
    switch (family_) {
        case Family::Normal:
            return quad::norm_pdf(x, 0.0, p1_);
        case Family::Laplace:
            return std::exp(-std::abs(x) / p1_) / (2.0 * p1_);
        case Family::Logistic: {
            const double z = std::abs(x) / p1_;
            const double e = std::exp(-z);
            const double d = 1.0 + e;
            return e / (p1_ * d * d);
        }
        case Family::GaussianMixture:
        case Family::SmoothedRademacher: {
            double p = 0.0;
            for (std::size_t i = 0; i < mix_w_.size(); ++i)
                p += mix_w_[i] * quad::norm_pdf(x, mix_mu_[i], mix_s_[i]);
            return p;
        }
        case Family::SmoothedUniform: {
            const double a = p1_, d = p2_;
            const double ax = std::abs(x);
            if (d == 0.0) return ax <= a ? 1.0 / (2.0 * a) : 0.0;
            return (quad::norm_sf((ax - a) / d) - quad::norm_sf((ax + a) / d)) /
                   (2.0 * a);
        }
        case Family::Custom: {
            const double y = x + custom_shift_;
            if (y < support_.lo + custom_shift_ || y > support_.hi + custom_shift_)
                return 0.0;
            return custom_fn_(y);
        }
    }
    return 0.0;
}

double Distribution::density(double x) const {
    if (!has_density_)
        throw NonSmoothDensity(name_ + " has no density (atomic components)");
    const double p = density_raw(x);
    return p > 0.0 ? p : 0.0;
}

double Distribution::cdf(double x) const { return 1.0 - survival(x); }

double Distribution::survival(double x) const {
    switch (family_) {
        case Family::Normal:
            return quad::norm_sf(x / p1_);
        case Family::Laplace:
            if (x >= 0.0) return 0.5 * std::exp(-x / p1_);
            return 1.0 - 0.5 * std::exp(x / p1_);
        case Family::Logistic: {
            const double z = x / p1_;
            if (z >= 0.0) {
                const double e = std::exp(-z);
                return e / (1.0 + e);
            }
            return 1.0 / (1.0 + std::exp(z));
        }
        case Family::GaussianMixture:
        case Family::SmoothedRademacher: {
            double s = 0.0;
            for (std::size_t i = 0; i < mix_w_.size(); ++i) {
                if (mix_s_[i] > 0.0)
                    s += mix_w_[i] * quad::norm_sf((x - mix_mu_[i]) / mix_s_[i]);
                else if (mix_mu_[i] > x)
                    s += mix_w_[i];
            }
            return s;
        }
        case Family::SmoothedUniform: {
            const double a = p1_, d = p2_;
            if (d == 0.0) return std::clamp((a - x) / (2.0 * a), 0.0, 1.0);
            const auto G = [](double z) {
                return z * quad::norm_sf(z) - quad::norm_pdf(z);
            };
            return (d / (2.0 * a)) * (G((x + a) / d) - G((x - a) / d));
        }
        case Family::Custom: {
            const Support w = window_;
            if (x <= w.lo) return 1.0;
            if (x >= w.hi) return 0.0;
            // integrate the shorter side
            if (x >= 0.5 * (w.lo + w.hi))
                return quad::integrate_split(
                    [this](double y) { return density_raw(y); }, x, w.hi,
                    breaks_, 1e-12);
            return 1.0 - quad::integrate_split(
                             [this](double y) { return density_raw(y); }, w.lo,
                             x, breaks_, 1e-12);
        }
    }
    return 0.0;
}

double Distribution::score(double x) const {
    if (!smooth_)
        throw NonSmoothDensity(name_ + " is not absolutely continuous");
    const double p = density_raw(x);
    if (!(p > kPFloor))
        throw ScoreUndefined("density below p_floor at x=" + fmt(x));
    switch (family_) {
        case Family::Normal:
            return -x / (p1_ * p1_);
        case Family::Laplace:
            return x == 0.0 ? 0.0 : -(x > 0.0 ? 1.0 : -1.0) / p1_;
        case Family::Logistic:
            return -std::tanh(0.5 * x / p1_) / p1_;
        case Family::GaussianMixture:
        case Family::SmoothedRademacher: {
            double dp = 0.0;
            for (std::size_t i = 0; i < mix_w_.size(); ++i) {
                const double s2 = mix_s_[i] * mix_s_[i];
                dp += mix_w_[i] * quad::norm_pdf(x, mix_mu_[i], mix_s_[i]) *
                      (-(x - mix_mu_[i]) / s2);
            }
            return dp / p;
        }
        case Family::SmoothedUniform: {
            const double a = p1_, d = p2_;
            const double dp = (quad::norm_pdf(x + a, 0.0, d) -
                               quad::norm_pdf(x - a, 0.0, d)) /
                              (2.0 * a);
            return dp / p;
        }
        case Family::Custom:
            return numeric_score(x);
    }
    return 0.0;
}

double Distribution::numeric_score(double x) const {
    if (!has_density_)
        throw NonSmoothDensity(name_ + " has no density (atomic components)");
    const double h = std::max(1e-5, 1e-4 * sigma_);
    const double pl = density_raw(x - h), pr = density_raw(x + h);
    if (!(pl > kPFloor) || !(pr > kPFloor))
        throw ScoreUndefined("density below p_floor near x=" + fmt(x));
    return (std::log(pr) - std::log(pl)) / (2.0 * h);
}

ScoreFn Distribution::score_fn() const {
    auto self = shared_from_this();
    if (score_is_analytic())
        return {[self](double x) { return self->score(x); },
                ScoreFn::Provenance::Analytic};
    return {[self](double x) { return self->numeric_score(x); },
            ScoreFn::Provenance::NumericDifferentiation};
}

double Distribution::fisher_j() const {
    if (!smooth_)
        throw NonSmoothDensity(name_ + " is not absolutely continuous");
    {
        std::lock_guard<std::mutex> g(cache_mu_);
        if (fisher_cache_) return *fisher_cache_;
    }
    const auto f = [this](double x) {
        const double p = density_raw(x);
        if (!(p > kPFloor)) return 0.0;
        const double r = score(x);
        return r * r * p;
    };
    double j = variance_ * quad::integrate_split(f, window_.lo, window_.hi,
                                                 breaks_, quad::kAbsTol);
    if (j > kJMax)
        throw QuadratureDivergent("fisher information exceeds j_max cap");
    if (j < 1.0 && j >= 1.0 - 1e-9) j = 1.0;
    std::lock_guard<std::mutex> g(cache_mu_);
    fisher_cache_ = j;
    return j;
}

double Distribution::tail_integral(double x) const {
    switch (family_) {
        case Family::Normal:
            return p1_ * p1_ * quad::norm_pdf(x, 0.0, p1_);
        case Family::Laplace:
            return p1_ * (std::abs(x) + p1_) * density_raw(x);
        case Family::Logistic: {
            const double z = x / p1_;
            double t;
            if (z >= 0.0)
                t = x_over_1p_exp(z) + std::log1p(std::exp(-z));
            else
                t = -z * std::exp(z) / (1.0 + std::exp(z)) +
                    std::log1p(std::exp(z));
            return p1_ * t;
        }
        case Family::GaussianMixture:
        case Family::SmoothedRademacher: {
            double t = 0.0;
            for (std::size_t i = 0; i < mix_w_.size(); ++i) {
                if (mix_s_[i] > 0.0) {
                    const double z = (x - mix_mu_[i]) / mix_s_[i];
                    t += mix_w_[i] * (mix_mu_[i] * quad::norm_sf(z) +
                                      mix_s_[i] * quad::norm_pdf(z));
                } else if (mix_mu_[i] > x) {
                    t += mix_w_[i] * mix_mu_[i];
                }
            }
            return t;
        }
        case Family::SmoothedUniform: {
            const double a = p1_, d = p2_;
            if (d == 0.0) {
                const double ax = std::abs(x);
                return ax >= a ? 0.0 : (a * a - x * x) / (4.0 * a);
            }
            const double zm = (x - a) / d, zp = (x + a) / d;
            const double phidiff = quad::norm_sf(zp) - quad::norm_sf(zm);
            const double q = (x * x - a * a - d * d) / 2.0;
            const double r = 0.5 * d *
                             ((x + a) * quad::norm_pdf(zm) -
                              (x - a) * quad::norm_pdf(zp));
            return (q * phidiff + r) / (2.0 * a);
        }
        case Family::Custom: {
            const Support w = window_;
            if (x >= w.hi) return 0.0;
            const auto f = [this](double y) { return y * density_raw(y); };
            if (x >= 0.5 * (w.lo + w.hi))
                return quad::integrate_split(f, x, w.hi, breaks_, 1e-12);
            // full integral is the (zero) mean
            return -quad::integrate_split(f, w.lo, std::max(x, w.lo), breaks_,
                                          1e-12);
        }
    }
    return 0.0;
}

double Distribution::stein_kernel(double x) const {
    if (!connected_)
        throw DisconnectedSupport(name_ + " support is not an interval");
    if (!has_density_)
        throw NonSmoothDensity(name_ + " has no density (atomic components)");
    const double p = density_raw(x);
    if (!(p > kPFloor))
        throw ScoreUndefined("density below p_floor at x=" + fmt(x));
    return std::max(tail_integral(x), 0.0) / p;
}

double Distribution::relative_entropy() const {
    if (family_ == Family::Normal) return 0.0;
    if (!has_density_)
        throw QuadratureDivergent(
            "relative entropy diverges: law has atomic components");
    {
        std::lock_guard<std::mutex> g(cache_mu_);
        if (entropy_cache_) return *entropy_cache_;
    }
    const double s = sigma_;
    const auto f = [this, s](double x) {
        const double p = density_raw(x);
        if (!(p > 0.0)) return 0.0;
        const double lphi = -0.5 * x * x / (s * s) -
                            std::log(s * quad::kSqrt2Pi);
        return p * (std::log(p) - lphi);
    };
    double d = quad::integrate_split(f, window_.lo, window_.hi, breaks_,
                                     quad::kAbsTol);
    if (d < 0.0 && d > -1e-9) d = 0.0;
    std::lock_guard<std::mutex> g(cache_mu_);
    entropy_cache_ = d;
    return d;
}

// ---- construction ----

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& msg) {
    if (!ok) throw ValidationError(msg);
}
}  // namespace

void Distribution::finalize() {
    sigma_ = std::sqrt(variance_);
    if (!has_density_) {
        window_ = support_;
        return;
    }
    // peak scan over a generous box, then bisect the 1e-16 edges
    double blo = support_.lo, bhi = support_.hi;
    double center = 0.0, span = 12.0 * sigma_;
    for (double b : breaks_) span = std::max(span, std::abs(b) + 12.0 * sigma_);
    if (!std::isfinite(blo)) blo = center - span;
    if (!std::isfinite(bhi)) bhi = center + span;
    double pmax = 0.0, xmax = 0.5 * (blo + bhi);
    const int scan = 2048;
    for (int i = 0; i <= scan; ++i) {
        const double x = blo + (bhi - blo) * i / scan;
        const double p = density_raw(x);
        if (p > pmax) {
            pmax = p;
            xmax = x;
        }
    }
    require(pmax > 0.0, name_ + ": density vanishes on its support");
    const double floor = kTailFloorRel * pmax;
    const auto edge = [&](double dir) {
        double a = xmax, step = std::max(sigma_, 1e-6);
        double b = a + dir * step;
        const double lim = dir > 0 ? support_.hi : support_.lo;
        while (density_raw(b) > floor) {
            a = b;
            step *= 2.0;
            b = a + dir * step;
            if (std::isfinite(lim) && (dir > 0 ? b >= lim : b <= lim)) {
                if (density_raw(lim) > floor) return lim;
                b = lim;
                break;
            }
        }
        for (int i = 0; i < 100; ++i) {
            const double m = 0.5 * (a + b);
            (density_raw(m) > floor ? a : b) = m;
        }
        return 0.5 * (a + b);
    };
    window_ = {edge(-1.0), edge(+1.0)};
}

DistPtr Distribution::normal(double sigma) {
    require(sigma > 0.0, "Normal: sigma must be positive");
    auto d = std::shared_ptr<Distribution>(new Distribution());
    d->family_ = Family::Normal;
    d->p1_ = sigma;
    d->variance_ = sigma * sigma;
    d->support_ = {-kInf, kInf};
    d->name_ = "Normal(" + fmt(sigma) + ")";
    d->finalize();
    return d;
}

DistPtr Distribution::laplace(double scale) {
    require(scale > 0.0, "Laplace: scale must be positive");
    auto d = std::shared_ptr<Distribution>(new Distribution());
    d->family_ = Family::Laplace;
    d->p1_ = scale;
    d->variance_ = 2.0 * scale * scale;
    d->support_ = {-kInf, kInf};
    d->breaks_ = {0.0};
    d->name_ = "Laplace(" + fmt(scale) + ")";
    d->finalize();
    return d;
}

DistPtr Distribution::logistic(double scale) {
    require(scale > 0.0, "Logistic: scale must be positive");
    auto d = std::shared_ptr<Distribution>(new Distribution());
    constexpr double pi = 3.14159265358979323846;
    d->family_ = Family::Logistic;
    d->p1_ = scale;
    d->variance_ = scale * scale * pi * pi / 3.0;
    d->support_ = {-kInf, kInf};
    d->name_ = "Logistic(" + fmt(scale) + ")";
    d->finalize();
    return d;
}

DistPtr Distribution::make_mixture(Family tag, std::vector<double> w,
                                   std::vector<double> mu,
                                   std::vector<double> s) {
    require(!w.empty() && w.size() == mu.size() && w.size() == s.size(),
            "GaussianMixture: weights/means/sigmas must match and be nonempty");
    double wsum = 0.0;
    bool any_zero = false, all_zero = true;
    for (std::size_t i = 0; i < w.size(); ++i) {
        require(w[i] > 0.0, "GaussianMixture: weights must be positive");
        require(s[i] >= 0.0, "GaussianMixture: sigmas must be nonnegative");
        wsum += w[i];
        if (s[i] == 0.0) any_zero = true;
        else all_zero = false;
    }
    require(std::abs(wsum - 1.0) < 1e-12, "GaussianMixture: weights must sum to 1");
    require(!any_zero || all_zero,
            "GaussianMixture: cannot mix atomic and continuous components");
    double m = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) m += w[i] * mu[i];
    for (auto& v : mu) v -= m;  // recenter
    double var = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
        var += w[i] * (s[i] * s[i] + mu[i] * mu[i]);
    require(var > 0.0, "GaussianMixture: variance must be positive");

    auto d = std::shared_ptr<Distribution>(new Distribution());
    d->family_ = tag;
    d->mix_w_ = std::move(w);
    d->mix_mu_ = mu;
    d->mix_s_ = std::move(s);
    d->variance_ = var;
    if (all_zero && any_zero) {
        d->has_density_ = false;
        d->smooth_ = false;
        d->connected_ = mu.size() == 1;
        const auto [lo, hi] = std::minmax_element(mu.begin(), mu.end());
        d->support_ = {*lo, *hi};
        d->breaks_ = mu;
    } else {
        d->support_ = {-kInf, kInf};
        d->breaks_ = mu;
    }
    d->name_ = (tag == Family::SmoothedRademacher ? "SmoothedRademacher"
                                                  : "GaussianMixture") +
               std::string("(k=") + fmt(static_cast<double>(mu.size())) + ")";
    d->finalize();
    return d;
}

DistPtr Distribution::gaussian_mixture(std::vector<double> weights,
                                       std::vector<double> means,
                                       std::vector<double> sigmas) {
    return make_mixture(Family::GaussianMixture, std::move(weights),
                        std::move(means), std::move(sigmas));
}

DistPtr Distribution::smoothed_rademacher(double delta) {
    require(delta >= 0.0, "SmoothedRademacher: delta must be nonnegative");
    auto d = make_mixture(Family::SmoothedRademacher, {0.5, 0.5}, {-1.0, 1.0},
                          {delta, delta});
    return d;
}

DistPtr Distribution::smoothed_uniform(double half_width, double delta) {
    require(half_width > 0.0, "SmoothedUniform: half_width must be positive");
    require(delta >= 0.0, "SmoothedUniform: delta must be nonnegative");
    auto d = std::shared_ptr<Distribution>(new Distribution());
    d->family_ = Family::SmoothedUniform;
    d->p1_ = half_width;
    d->p2_ = delta;
    d->variance_ = half_width * half_width / 3.0 + delta * delta;
    d->support_ = delta > 0.0 ? Support{-kInf, kInf}
                              : Support{-half_width, half_width};
    d->smooth_ = delta > 0.0;
    d->breaks_ = {-half_width, half_width};
    d->name_ = "SmoothedUniform(" + fmt(half_width) + "," + fmt(delta) + ")";
    d->finalize();
    return d;
}

DistPtr Distribution::custom(std::function<double(double)> density, double lo,
                             double hi, double mean, double variance,
                             std::vector<double> breaks) {
    require(static_cast<bool>(density), "Custom: density evaluator required");
    require(lo < hi, "Custom: support must be a nonempty interval");
    require(variance > 0.0 && std::isfinite(variance),
            "Custom: variance must be finite and positive");
    const double mass = quad::integrate_split(density, lo, hi, breaks, 1e-12);
    require(std::abs(mass - 1.0) < 1e-9,
            "Custom: density mass " + fmt(mass) + " is not 1 within 1e-9");
    auto d = std::shared_ptr<Distribution>(new Distribution());
    d->family_ = Family::Custom;
    d->custom_fn_ = std::move(density);
    d->custom_shift_ = mean;  // density(x) evaluates the caller's p at x+mean
    d->support_ = {lo - mean, hi - mean};
    d->variance_ = variance;
    for (double& b : breaks) b -= mean;
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::remove_if(breaks.begin(), breaks.end(),
                                [&](double b) {
                                    return b <= d->support_.lo ||
                                           b >= d->support_.hi;
                                }),
                 breaks.end());
    d->breaks_ = std::move(breaks);
    d->name_ = "Custom[" + fmt(lo - mean) + "," + fmt(hi - mean) + "]";
    d->finalize();
    return d;
}

DistPtr Distribution::scaled(double lambda) const {
    require(lambda > 0.0, "scaled: lambda must be positive");
    if (lambda == 1.0) return shared_from_this();
    switch (family_) {
        case Family::Normal:
            return normal(lambda * p1_);
        case Family::Laplace:
            return laplace(lambda * p1_);
        case Family::Logistic:
            return logistic(lambda * p1_);
        case Family::GaussianMixture:
        case Family::SmoothedRademacher: {
            std::vector<double> mu = mix_mu_, s = mix_s_;
            for (auto& v : mu) v *= lambda;
            for (auto& v : s) v *= lambda;
            return make_mixture(family_, mix_w_, std::move(mu), std::move(s));
        }
        case Family::SmoothedUniform:
            return smoothed_uniform(lambda * p1_, lambda * p2_);
        case Family::Custom: {
            auto self = shared_from_this();
            std::vector<double> br = breaks_;
            for (double& b : br) b *= lambda;
            return custom(
                [self, lambda](double y) {
                    return self->density_raw(y / lambda) / lambda;
                },
                lambda * support_.lo, lambda * support_.hi, 0.0,
                lambda * lambda * variance_, std::move(br));
        }
    }
    return shared_from_this();
}

DistPtr Distribution::smoothed(double delta) const {
    require(delta >= 0.0, "smoothed: delta must be nonnegative");
    if (delta == 0.0) return shared_from_this();
    switch (family_) {
        case Family::Normal:
            return normal(std::hypot(p1_, delta));
        case Family::GaussianMixture:
        case Family::SmoothedRademacher: {
            std::vector<double> s = mix_s_;
            for (auto& v : s) v = std::hypot(v, delta);
            return make_mixture(family_, mix_w_, mix_mu_, std::move(s));
        }
        case Family::SmoothedUniform:
            return smoothed_uniform(p1_, std::hypot(p2_, delta));
        case Family::Laplace:
        case Family::Logistic:
        case Family::Custom: {
            // numeric convolution with the smoothing kernel
            auto self = shared_from_this();
            const auto base_breaks = breaks_;
            auto conv = [self, delta, base_breaks](double x) {
                std::vector<double> br;
                for (double b : base_breaks) br.push_back((x - b) / delta);
                return quad::integrate_split(
                    [&](double u) {
                        return quad::norm_pdf(u) *
                               self->density_raw(x - delta * u);
                    },
                    -9.0, 9.0, br, 1e-13);
            };
            const double lo = window_.lo - 9.0 * delta;
            const double hi = window_.hi + 9.0 * delta;
            // each kink becomes a smooth layer of width ~delta; bracket it
            // so adaptive panels cannot straddle and misjudge the layer
            std::vector<double> hints;
            for (double b : base_breaks) {
                hints.push_back(b - 10.0 * delta);
                hints.push_back(b);
                hints.push_back(b + 10.0 * delta);
            }
            return custom(conv, lo, hi, 0.0, variance_ + delta * delta,
                          std::move(hints));
        }
    }
    return shared_from_this();
}

}  // namespace tvclt
