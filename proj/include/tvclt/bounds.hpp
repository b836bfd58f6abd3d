#pragma once

// Explicit bounds on the distance to normal: the main TV bound with its
// Fisher-information constant, Kolmogorov-distance forms, the entropy
// inequality, the truncation decomposition, and smoothing stability.

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "tvclt/dist.hpp"
#include "tvclt/grid.hpp"
#include "tvclt/sums.hpp"

namespace tvclt {

// +infinity is a first-class bound value with a reason, not an error
struct TvBound {
    double value = std::numeric_limits<double>::infinity();
    bool finite = false;
    std::string reason;  // set when not finite
};

// sqrt(8 pi max_k J(X_k) / (1 - max_k sigma_k^2/b_n^2)) * M_n
TvBound tv_bound(const SumSequence& seq, std::size_t n);

struct BoundReport {
    std::size_t n = 0;
    std::vector<double> j_values;  // J(X_k), k = 1..n
    double j_max = 0.0;
    double feller = 0.0;  // max_k sigma_k^2 / b_n^2
    double m_n = 0.0;     // truncated third-moment functional
    double tv_bound = std::numeric_limits<double>::infinity();
    double tv_actual = 0.0;
    double k_actual = 0.0;
    double slack_abs = 0.0;    // tv_bound - tv_actual
    double slack_ratio = 0.0;  // tv_actual / tv_bound
    bool bound_finite = false;
    bool bound_holds = false;
    std::string infinite_reason;
};

// full pipeline for one (sequence, n) case: bound plus measured distances
BoundReport bound_report(const SumSequence& seq, std::size_t n,
                         const GridConfig& cfg = {});

struct KolmogorovBounds {
    double truncated_form = 0.0;     // c * M_n
    double third_moment_form = 0.0;  // c * sum E|X_k|^3 / b_n^3
};
KolmogorovBounds kolmogorov_bounds(const SumSequence& seq, std::size_t n,
                                   double c);

struct EntropyReport {
    double d = 0.0;  // relative entropy to the matching normal
    double j = 0.0;  // standardized Fisher information
    bool holds = false;
};
// D(X) <= (J(X) - 1)/2
EntropyReport entropy_inequality(const Distribution& spec);

struct TruncationReport {
    double m_n = 0.0;
    double l_n_eps = 0.0;  // Lindeberg functional at eps
    double above = 0.0;    // mass of M_n from |X| > b_n
    double mid = 0.0;      // from eps b_n < |X| <= b_n
    double below = 0.0;    // from |X| <= eps b_n
    bool holds = false;    // m_n <= l_n_eps + eps
};
// splits M_n at the eps b_n and b_n radii; requires eps in (0,1)
TruncationReport truncation_decomposition(const SumSequence& seq,
                                          std::size_t n, double eps);

struct SmoothingRow {
    double delta = 0.0;
    double tv_bound = std::numeric_limits<double>::infinity();
    double tv_actual = 0.0;
    bool bound_finite = false;
};
// bound and measured distance for X_k + delta N_k, per delta (non-ascending)
std::vector<SmoothingRow> smoothing_stability(const SumSequence& seq,
                                              std::size_t n,
                                              const std::vector<double>& deltas,
                                              const GridConfig& cfg = {});

// least-squares slope of log(y) against log(x); decay-rate diagnostic
double log_log_slope(const std::vector<double>& xs,
                     const std::vector<double>& ys);

}  // namespace tvclt
