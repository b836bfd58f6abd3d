#pragma once

// Stein's equation f'(x) - x f(x) = h(x) - E h(N) for bounded test
// functions, and the inequality/identity checkers built on it.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tvclt/dist.hpp"
#include "tvclt/grid.hpp"
#include "tvclt/sums.hpp"

namespace tvclt {

struct TestFunction {
    enum class Kind { Indicator, Sign, SmoothBump, PiecewiseLinear, Custom };
    std::function<double(double)> h;
    double bound = 1.0;  // B with |h| <= B
    Kind kind = Kind::Custom;
    std::vector<double> breakpoints;  // kinks/jumps of h
    std::string name;
};

TestFunction sign_fn();
TestFunction indicator_fn(double a, double b);
TestFunction smooth_bump_fn(double width = 2.0);
// |h| <= 1, 4..10 knots over [-8,8], constant outside; deterministic in seed
TestFunction random_piecewise_linear(std::uint64_t seed);

// differentiable test functions for the identity checkers
struct DiffFn {
    std::function<double(double)> f, df;
    std::string name;
};
DiffFn sin_fn();
DiffFn tanh_fn();
DiffFn arctan_fn();
DiffFn bump_fn(double width = 2.0);
DiffFn linear_fn();  // f(x) = x

struct SteinGridConfig {
    double extent = 16.0;
    std::size_t m = std::size_t{1} << 13;
};

class SteinSolution {
  public:
    double eh() const { return eh_; }
    const TestFunction& test_fn() const { return h_; }
    std::size_t size() const { return xs_.size(); }
    // base lattice spacing; the node set also includes the breakpoints of h,
    // so cells never contain a kink and the cubic interpolant stays accurate
    double step() const { return step_; }
    double node(std::size_t i) const { return xs_[i]; }
    double f_node(std::size_t i) const { return f_[i]; }
    double fp_node(std::size_t i) const { return fp_[i]; }

    // cubic Hermite between nodes (f and f' are both known there)
    double f(double x) const;
    double fprime(double x) const;

    double sup_f() const { return sup_f_; }
    double sup_fprime() const { return sup_fp_; }
    // weak-form ODE residual, maximized over cells within [lo, hi]:
    // |f(x_{j+1}) - f(x_j) - integral of (y f + h - Eh) over the cell| / step
    double max_residual(double lo, double hi) const;

    friend SteinSolution solve_stein(const TestFunction&, const SteinGridConfig&);

  private:
    TestFunction h_;
    double eh_ = 0.0;
    double step_ = 0.0;
    double sup_f_ = 0.0, sup_fp_ = 0.0;
    std::vector<double> xs_, f_, fp_;
};

SteinSolution solve_stein(const TestFunction& h,
                          const SteinGridConfig& cfg = {});

struct IdentityReport {
    double lhs = 0.0, rhs = 0.0, gap = 0.0;
};
// E[f(X) rho(X)] vs -E[f'(X)]
IdentityReport check_ibp_score(const Distribution& spec, const DiffFn& f);
// E[f(Y) Y] vs E[f'(Y) tau(Y)]
IdentityReport check_kernel_identity(const Distribution& spec, const DiffFn& f);

struct LooScoreReport {
    double e_abs_rho = 0.0, j_bound = 0.0;
    bool holds = false;
};
LooScoreReport check_loo_score_bound(const SumSequence& seq, std::size_t k,
                                     std::size_t n, const GridConfig& cfg);

struct ProbeConfig {
    double u_lo = -6.0, u_hi = 6.0, x_lo = -6.0, x_hi = 6.0;
    std::size_t nu = 200, nx = 200;
};
// max over the probe lattice of |f(u + x/b) - f(u)| - (sqrt(8 pi)/b)(b ∧ |x|);
// nonpositive (up to 1e-6) when the increment bound holds
double check_increment_bound(const Distribution& x_spec, double b_n,
                             const SteinSolution& f,
                             const ProbeConfig& probes = {});

struct TruncatedKernelReport {
    double lhs = 0.0, rhs = 0.0, cheb_lhs = 0.0;
    bool holds = false, cheb_holds = false;
};
// E[(b ∧ |X|) tau(X)] <= E[|X|^2 (b ∧ |X|)], plus the Chebyshev-association
// step E[(b ∧ |X|)] E[X^2] <= same right side
TruncatedKernelReport check_truncated_kernel_moment(const Distribution& spec,
                                                    double b);

}  // namespace tvclt
