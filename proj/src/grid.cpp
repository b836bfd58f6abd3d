#include "tvclt/grid.hpp"

#include <cmath>
#include <string>

namespace tvclt {

GridDensity GridDensity::from_samples(double step, std::vector<double> values,
                                      double clip_tol) {
    if (!is_power_of_two(values.size()))
        throw ValidationError("grid size must be a power of two");
    if (!(step > 0.0)) throw ValidationError("grid step must be positive");

    GridDensity g;
    g.step_ = step;
    g.v_ = std::move(values);
    const std::size_t m = g.v_.size();

    double clipped = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (g.v_[i] < 0.0) {
            clipped += -g.v_[i] * g.w(i);
            g.v_[i] = 0.0;
        }
    }
    if (clipped > clip_tol)
        throw RingingError("negativity clip removed " + std::to_string(clipped) +
                           " mass (tolerance " + std::to_string(clip_tol) + ")");
    g.clipped_ = clipped;

    double mass = 0.0;
    for (std::size_t i = 0; i < m; ++i) mass += g.v_[i] * g.w(i);
    if (!(mass > 0.1))
        throw ValidationError("grid mass " + std::to_string(mass) +
                              " is degenerate; resolution or extent is wrong");
    const double inv = 1.0 / mass;
    for (auto& v : g.v_) v *= inv;

    double mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) mean += g.x(i) * g.v_[i] * g.w(i);
    double var = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double d = g.x(i) - mean;
        var += d * d * g.v_[i] * g.w(i);
    }
    g.mean_ = mean;
    g.var_ = var;
    return g;
}

}  // namespace tvclt
