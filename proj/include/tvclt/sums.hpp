#pragma once

// Normalized sums S_n = (X_1 + ... + X_n)/b_n and leave-one-out sums
// S_{k,n} = (sum over i != k of X_i)/b_{k,n}, materialized as grid densities
// by FFT convolution, plus Gaussian smoothing and grid-level scores.

#include <cstddef>
#include <vector>

#include "tvclt/dist.hpp"
#include "tvclt/grid.hpp"

namespace tvclt {

class SumSequence {
  public:
    explicit SumSequence(std::vector<DistPtr> specs);

    std::size_t size() const { return specs_.size(); }
    // summand indices are 1-based throughout, matching b_{k,n}
    const DistPtr& spec(std::size_t k) const;
    double sigma2(std::size_t k) const;
    // b_n over the first n summands
    double b(std::size_t n) const;
    // b_{k,n} = sqrt(b_n^2 - sigma_k^2); requires n >= 2
    double b_loo(std::size_t k, std::size_t n) const;

    SumSequence scaled(double lambda) const;
    SumSequence smoothed(double delta) const;

  private:
    std::vector<DistPtr> specs_;
    std::vector<double> prefix_var_;
};

// density of S_n over the first n summands
GridDensity sum_density(const SumSequence& seq, std::size_t n,
                        const GridConfig& cfg);
inline GridDensity sum_density(const SumSequence& seq, const GridConfig& cfg) {
    return sum_density(seq, seq.size(), cfg);
}

GridDensity leave_one_out_density(const SumSequence& seq, std::size_t k,
                                  std::size_t n, const GridConfig& cfg);

// density of X + delta * N for a grid input (same lattice step, widened as
// needed) or for a spec (sampled from the smoothed law directly)
GridDensity gaussian_smooth(const GridDensity& d, double delta);
GridDensity gaussian_smooth(const DistPtr& spec, double delta,
                            const GridConfig& cfg);

// Central-difference score of a grid density, restricted to the contiguous
// node range around the mode where p > p_floor. That range must carry at
// least 99.9999% of the mass.
struct GridScore {
    std::size_t first = 0, last = 0;  // inclusive node range
    std::vector<double> rho;          // at nodes first+1 .. last-1
    double e_abs_rho = 0.0;           // E|rho(S)| over the range
    double mean_rho = 0.0;            // E[rho(S)]
    ScoreFn as_score_fn() const;      // linear interpolation between nodes
    std::vector<double> xs;           // abscissae matching rho
};
GridScore grid_score(const GridDensity& d);

}  // namespace tvclt
