#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pqfront::detail {

/// Safeguarded Newton iteration for an increasing function g on [lo, hi]
/// with g(lo) <= 0 <= g(hi). Falls back to bisection whenever the Newton
/// step leaves the current bracket or fails to shrink it.
template <class F, class DF>
double newton_bracketed(F&& g, DF&& dg, double lo, double hi, double x0, double xtol_rel = 4e-16,
                        int max_iter = 300) {
    double x = (x0 > lo && x0 < hi) ? x0 : 0.5 * (lo + hi);
    for (int it = 0; it < max_iter; ++it) {
        const double gx = g(x);
        if (gx == 0.0) return x;
        if (gx < 0.0)
            lo = x;
        else
            hi = x;
        const double slope = dg(x);
        double next = (slope > 0.0 && std::isfinite(slope)) ? x - gx / slope
                                                             : std::numeric_limits<double>::quiet_NaN();
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double tol = xtol_rel * std::max(std::abs(next), std::numeric_limits<double>::min());
        if (std::abs(next - x) <= tol || hi - lo <= tol) return next;
        x = next;
    }
    return x;
}

/// Golden-section search for the minimum of a unimodal function on [a, b].
/// Returns the abscissa of the best point found.
template <class F>
double golden_section_min(F&& f, double a, double b, double xtol = 1e-12, int max_iter = 400) {
    constexpr double inv_phi = 0.6180339887498949;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < max_iter && (b - a) > xtol * (1.0 + std::abs(c)); ++it) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return fc <= fd ? c : d;
}

}  // namespace pqfront::detail
