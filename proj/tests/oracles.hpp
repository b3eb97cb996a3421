#pragma once

// Reference computations that share no code with the library: plain
// bisection, brute-force grids and textbook formulas.

#include <cmath>
#include <functional>

namespace oracle {

inline double bisect_increasing(const std::function<double(double)>& g, double lo, double hi, int iters = 200) {
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Q for the cooperative (sign = +1) or competitive (sign = -1) operator; single_q when p_weight = 0.
inline double Q(double p, double q, double s, double sign = 1.0, double p_weight = 1.0) {
    return (q - 1.0) / q * std::pow(s, q) + sign * p_weight * (p - 1.0) / p * std::pow(s, p);
}

/// R = Q^{-1} by bisection on [0, hi].
inline double R(double p, double q, double y, double sign = 1.0, double p_weight = 1.0, double hi = 0.0) {
    if (y == 0.0) return 0.0;
    if (hi <= 0.0) hi = std::max(1.0, 2.0 * std::pow(2.0 * y, 1.0 / q));
    while (sign > 0 && Q(p, q, hi, sign, p_weight) < y) hi *= 2.0;
    return bisect_increasing([&](double s) { return Q(p, q, s, sign, p_weight) - y; }, 0.0, hi, 400);
}

/// min over beta in ]0, beta_hi] of (p-1)/(q-1) beta^p + beta^q - c beta + L, on a grid plus ternary refinement.
inline double min_G(double p, double q, double L, double c, double beta_hi = 10.0, bool with_p_term = true) {
    auto G = [&](double b) {
        return (with_p_term ? (p - 1.0) / (q - 1.0) * std::pow(b, p) : 0.0) + std::pow(b, q) - c * b + L;
    };
    const int n = 20000;
    double best_b = beta_hi / n, best = G(best_b);
    for (int i = 2; i <= n; ++i) {
        const double b = beta_hi * i / n;
        if (G(b) < best) {
            best = G(b);
            best_b = b;
        }
    }
    double lo = std::max(1e-300, best_b - beta_hi / n), hi = std::min(beta_hi, best_b + beta_hi / n);
    for (int i = 0; i < 200; ++i) {
        const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
        (G(m1) < G(m2) ? hi : lo) = (G(m1) < G(m2) ? m2 : m1);
    }
    return std::min(best, G(0.5 * (lo + hi)));
}

/// Smallest c with min_beta G_c <= 0, by bisection over c using the brute-force minimum.
inline double cplus_by_brute_force(double p, double q, double L, double c_lo, double c_hi) {
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (c_lo + c_hi);
        if (min_G(p, q, L, mid) <= 0.0)
            c_hi = mid;
        else
            c_lo = mid;
    }
    return c_hi;
}

/// Decay rate of the Fisher-KPP front at u = 0: smaller root of l^2 - c l + f'(0) = 0.
inline double fisher_left_rate(double c, double fprime0 = 1.0) { return 0.5 * (c - std::sqrt(c * c - 4.0 * fprime0)); }

}  // namespace oracle
