#pragma once

// Distances and condition functionals: total variation, Kolmogorov,
// Lindeberg functional, Feller-Levy ratio, truncated third-moment
// functional, characteristic function probes.

#include <complex>
#include <cstddef>
#include <vector>

#include "tvclt/grid.hpp"
#include "tvclt/sums.hpp"

namespace tvclt {

struct DistanceReport {
    double tv = 0.0;
    double kolmogorov = 0.0;
    double mass_clipped = 0.0;  // grid diagnostic
    double extent = 0.0;
};

// both grids must share the lattice
double tv_distance(const GridDensity& p, const GridDensity& q);
double kolmogorov_distance(const GridDensity& p, const GridDensity& q);

// against the standard normal reference
double tv_to_normal(const GridDensity& p);
double kolmogorov_to_normal(const GridDensity& p);
DistanceReport distance_to_normal(const GridDensity& p);

// (1/b_n^2) sum_k E[X_k^2 1{|X_k| > eps b_n}]
double lindeberg_functional(const SumSequence& seq, std::size_t n, double eps);
// max_k sigma_k^2 / b_n^2
double feller_ratio(const SumSequence& seq, std::size_t n);
// M_n = sum_k E[|X_k|^2 (b_n ∧ |X_k|)] / b_n^3
double truncated_moment(const SumSequence& seq, std::size_t n);

std::complex<double> char_fn(const GridDensity& p, double t);

// logarithmic epsilon scan grid
std::vector<double> epsilon_grid(std::size_t count = 50, double lo = 1e-3,
                                 double hi = 1.0);

// per-summand expectations by quadrature over the analytic density
double expect_sq_above(const Distribution& d, double c);   // E[X^2 1{|X|>c}]
double expect_abs3(const Distribution& d);                 // E|X|^3
double expect_sq_trunc(const Distribution& d, double b);   // E[X^2 (b ∧ |X|)]
double expect_abs_trunc(const Distribution& d, double b);  // E[b ∧ |X|]
// E[|X|^3 1{a < |X| <= b}]
double expect_abs3_band(const Distribution& d, double a, double b);

// sum of g(spec_k) over k <= n, evaluating each distinct spec object once
template <typename G>
double sum_over_summands(const SumSequence& seq, std::size_t n, const G& g) {
    std::vector<std::pair<const Distribution*, std::size_t>> counts;
    for (std::size_t k = 1; k <= n; ++k) {
        const Distribution* p = seq.spec(k).get();
        bool found = false;
        for (auto& [q, c] : counts)
            if (q == p) {
                ++c;
                found = true;
                break;
            }
        if (!found) counts.push_back({p, 1});
    }
    double acc = 0.0;
    for (const auto& [p, c] : counts) acc += static_cast<double>(c) * g(*p);
    return acc;
}

}  // namespace tvclt
