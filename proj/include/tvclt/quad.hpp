#pragma once

// Adaptive Gauss-Kronrod quadrature (G7,K15 pair) and normal-law helpers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "tvclt/errors.hpp"

namespace tvclt::quad {

inline constexpr double kAbsTol = 1e-10;
inline constexpr int kMaxIntervals = 200000;

namespace detail {
// Kronrod-15 abscissae (positive half) and weights; rows 1,3,5,7 are the
// embedded Gauss-7 points.
inline constexpr double kx[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double kw[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double gw[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <typename F>
inline void gk15(const F& f, double a, double b, double& kres, double& err) {
    const double c = 0.5 * (a + b);
    const double hl = 0.5 * (b - a);
    double fk = 0.0, fg = 0.0;
    for (int i = 0; i < 8; ++i) {
        double v;
        if (i == 7) {
            v = f(c);
            fk += kw[i] * v;
            fg += gw[3] * v;
        } else {
            v = f(c - hl * kx[i]) + f(c + hl * kx[i]);
            fk += kw[i] * v;
            if (i % 2 == 1) fg += gw[i / 2] * v;
        }
    }
    kres = fk * hl;
    err = std::abs((fk - fg) * hl);
}
}  // namespace detail

// One non-adaptive K15 panel; for smooth integrands over short cells.
template <typename F>
inline double panel(const F& f, double a, double b) {
    double r, e;
    detail::gk15(f, a, b, r, e);
    return r;
}

// Adaptive bisection to absolute tolerance. Each interval must meet the
// share of the budget proportional to its length.
template <typename F>
inline double integrate(const F& f, double a, double b,
                        double abs_tol = kAbsTol) {
    if (a == b) return 0.0;
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }
    struct Iv {
        double a, b;
    };
    const double total = b - a;
    std::vector<Iv> stack{{a, b}};
    double acc = 0.0;
    int used = 0;
    while (!stack.empty()) {
        Iv iv = stack.back();
        stack.pop_back();
        if (++used > kMaxIntervals)
            throw QuadratureDivergent("quadrature interval budget exhausted");
        double r, e;
        detail::gk15(f, iv.a, iv.b, r, e);
        const double share = abs_tol * (iv.b - iv.a) / total;
        const double w = iv.b - iv.a;
        if (e <= share || w <= 1e-14 * total || w <= 1e-300) {
            acc += r;
        } else {
            const double mid = 0.5 * (iv.a + iv.b);
            stack.push_back({iv.a, mid});
            stack.push_back({mid, iv.b});
        }
    }
    return sign * acc;
}

// Split the range at known kinks/knots first, then refine each panel.
template <typename F>
inline double integrate_split(const F& f, double a, double b,
                              const std::vector<double>& breaks,
                              double abs_tol = kAbsTol) {
    if (a == b) return 0.0;
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }
    std::vector<double> pts{a};
    for (double p : breaks)
        if (p > a && p < b) pts.push_back(p);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        acc += integrate(f, pts[i], pts[i + 1],
                         abs_tol * (pts[i + 1] - pts[i]) / (b - a));
    return sign * acc;
}

inline constexpr double kSqrt2Pi = 2.5066282746310005024;
inline constexpr double kInvSqrt2Pi = 0.3989422804014326779;
inline constexpr double kSqrt2 = 1.4142135623730950488;

inline double norm_pdf(double x) {
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}
inline double norm_pdf(double x, double mu, double sigma) {
    const double z = (x - mu) / sigma;
    return kInvSqrt2Pi * std::exp(-0.5 * z * z) / sigma;
}
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }
// survival function, accurate in the upper tail
inline double norm_sf(double x) { return 0.5 * std::erfc(x / kSqrt2); }

}  // namespace tvclt::quad
