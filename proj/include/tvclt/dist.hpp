#pragma once

// Summand distributions: density, score, Fisher information, Stein kernel,
// relative entropy. Instances are immutable; all methods are safe to call
// concurrently.

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "tvclt/errors.hpp"

namespace tvclt {

inline constexpr double kPFloor = 1e-300;       // score undefined below this
inline constexpr double kTailFloorRel = 1e-16;  // quadrature window cutoff
inline constexpr double kJMax = 1e6;            // "J is effectively infinite"

enum class Family {
    Normal,
    Laplace,
    Logistic,
    GaussianMixture,
    SmoothedRademacher,
    SmoothedUniform,
    Custom,
};

struct Support {
    double lo, hi;  // may be +-infinity
};

struct ScoreFn {
    enum class Provenance { Analytic, NumericDifferentiation };
    std::function<double(double)> eval;
    Provenance provenance;
};

class Distribution;
using DistPtr = std::shared_ptr<const Distribution>;

class Distribution : public std::enable_shared_from_this<Distribution> {
  public:
    // All factories recenter to mean 0.
    static DistPtr normal(double sigma = 1.0);
    static DistPtr laplace(double scale = 1.0);
    static DistPtr logistic(double scale = 1.0);
    // Either all component widths positive (smooth mixture) or all zero
    // (purely atomic); mixing the two is rejected.
    static DistPtr gaussian_mixture(std::vector<double> weights,
                                    std::vector<double> means,
                                    std::vector<double> sigmas);
    // equal-weight atoms at +-1, each smoothed by a normal of width delta;
    // delta = 0 gives the bare two-point law
    static DistPtr smoothed_rademacher(double delta);
    // uniform on [-half_width, half_width] convolved with N(0, delta^2)
    static DistPtr smoothed_uniform(double half_width, double delta);
    // density evaluator over [lo, hi] with stated mean and variance; mass
    // is verified to integrate to 1 within 1e-9 and the law is recentered.
    // breaks are quadrature split hints in the caller's coordinates
    static DistPtr custom(std::function<double(double)> density, double lo,
                          double hi, double mean, double variance,
                          std::vector<double> breaks = {});

    Family family() const { return family_; }
    const std::string& name() const { return name_; }
    double variance() const { return variance_; }
    double sigma() const { return sigma_; }
    Support support() const { return support_; }
    // quadrature window: p >= kTailFloorRel * max p, clipped to support
    Support window() const { return window_; }
    // abscissae where the density changes character (kink, jump, mode,
    // smoothing layer); used throughout as quadrature split hints
    const std::vector<double>& breakpoints() const { return breaks_; }

    bool has_density() const { return has_density_; }
    // absolutely continuous density on a connected support
    bool smooth() const { return smooth_; }
    bool connected_support() const { return connected_; }
    bool score_is_analytic() const { return family_ != Family::Custom; }

    double density(double x) const;
    double cdf(double x) const;
    double survival(double x) const;
    double score(double x) const;
    double numeric_score(double x) const;
    ScoreFn score_fn() const;
    double fisher_j() const;
    double stein_kernel(double x) const;
    // T(x) = integral over [x, inf) of y p(y) dy; tau(x) = T(x) / p(x)
    double tail_integral(double x) const;
    double relative_entropy() const;

    DistPtr scaled(double lambda) const;    // law of lambda * X
    DistPtr smoothed(double delta) const;   // law of X + delta * N

  private:
    Distribution() = default;

    double density_raw(double x) const;  // before any validity checks
    void finalize();                     // window, label, flags
    static DistPtr make_mixture(Family tag, std::vector<double> w,
                                std::vector<double> mu, std::vector<double> s);

    Family family_ = Family::Normal;
    std::string name_;
    double variance_ = 1.0;
    double sigma_ = 1.0;
    Support support_{0.0, 0.0};
    Support window_{0.0, 0.0};
    std::vector<double> breaks_;
    bool has_density_ = true;
    bool smooth_ = true;
    bool connected_ = true;

    // family parameters
    double p1_ = 1.0;  // Normal sigma / Laplace scale / Logistic scale /
                       // SmoothedUniform half width
    double p2_ = 0.0;  // SmoothedUniform delta
    std::vector<double> mix_w_, mix_mu_, mix_s_;
    std::function<double(double)> custom_fn_;
    double custom_shift_ = 0.0;

    mutable std::mutex cache_mu_;
    mutable std::optional<double> fisher_cache_;
    mutable std::optional<double> entropy_cache_;
};

}  // namespace tvclt
