#pragma once

// Uniform-lattice density container. Lattice convention: x_i = (i - m/2)*step,
// so lo = -(m/2)*step, hi = (m/2 - 1)*step and step = (hi - lo)/(m - 1).
// Zero is always a node and lo/step is an integer, which keeps zero-padded
// linear convolution output on the same lattice (center window at offset m/2).

#include <cstddef>
#include <vector>

#include "tvclt/errors.hpp"

namespace tvclt {

struct GridConfig {
    std::size_t m = std::size_t{1} << 14;  // power of two
    double extent_sigmas = 12.0;
};

inline bool is_power_of_two(std::size_t m) { return m >= 2 && (m & (m - 1)) == 0; }

// step for a lattice whose usable half-extent is `extent`
inline double lattice_step(double extent, std::size_t m) {
    return 2.0 * extent / static_cast<double>(m - 2);
}

class GridDensity {
  public:
    // Normalizes `values` to unit trapezoid mass. Negative entries are
    // clipped to zero first; if the clipped mass exceeds clip_tol this is
    // FFT ringing beyond tolerance and RingingError is thrown.
    static GridDensity from_samples(double step, std::vector<double> values,
                                    double clip_tol = 1e-9);

    std::size_t size() const { return v_.size(); }
    double step() const { return step_; }
    double lo() const { return x(0); }
    double hi() const { return x(v_.size() - 1); }
    double x(std::size_t i) const {
        return (static_cast<double>(i) - 0.5 * static_cast<double>(v_.size())) * step_;
    }
    double value(std::size_t i) const { return v_[i]; }
    const std::vector<double>& values() const { return v_; }

    double mean() const { return mean_; }
    double variance() const { return var_; }
    double mass_clipped() const { return clipped_; }

    bool same_lattice(const GridDensity& o) const {
        return v_.size() == o.v_.size() && step_ == o.step_;
    }

    // trapezoid weight (step, halved at the two ends)
    double w(std::size_t i) const {
        return (i == 0 || i + 1 == v_.size()) ? 0.5 * step_ : step_;
    }

  private:
    GridDensity() = default;
    double step_ = 0.0;
    double mean_ = 0.0, var_ = 0.0, clipped_ = 0.0;
    std::vector<double> v_;
};

}  // namespace tvclt
