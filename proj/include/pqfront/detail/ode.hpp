#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace pqfront::detail {

/// Step-size control for the scalar Dormand-Prince 5(4) integrator.
struct OdeSettings {
    double atol = 1e-12;
    double rtol = 1e-10;
    double h_init = 0.0;     ///< 0 selects a starting step automatically
    double h_max = 0.0;      ///< 0 means |t1 - t0|
    double h_min_rel = 1e-15;
    std::size_t max_steps = 2'000'000;
};

enum class OdeStatus { completed, stopped, step_underflow, step_limit, non_finite };

struct OdeReport {
    OdeStatus status = OdeStatus::completed;
    double t = 0.0;
    double y = 0.0;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
};

/// Adaptive embedded Runge-Kutta pair (Dormand-Prince 5(4)) for y' = rhs(t, y).
///
/// Integrates from t0 to t1 in either direction. `observer(t, y, dydt)` is
/// called for the initial point and after every accepted step; returning
/// false stops the integration with OdeStatus::stopped.
template <class Rhs, class Observer>
OdeReport integrate_dopri(Rhs&& rhs, double t0, double y0, double t1, const OdeSettings& s,
                          Observer&& observer) {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                     b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    OdeReport rep;
    rep.t = t0;
    rep.y = y0;

    const double span = std::abs(t1 - t0);
    const double dir = t1 >= t0 ? 1.0 : -1.0;
    double k1 = rhs(t0, y0);
    if (!std::isfinite(k1)) {
        rep.status = OdeStatus::non_finite;
        return rep;
    }
    if (!observer(t0, y0, k1)) {
        rep.status = OdeStatus::stopped;
        return rep;
    }
    if (span == 0.0) return rep;

    const double h_max = s.h_max > 0.0 ? std::min(s.h_max, span) : span;
    double h = s.h_init;
    if (h <= 0.0) {
        const double scale = s.atol + s.rtol * std::abs(y0);
        const double d0 = std::abs(y0) / scale;
        const double d1 = std::abs(k1) / scale;
        h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * span : 0.01 * d0 / d1;
    }
    h = std::min(h, h_max);

    double t = t0;
    double y = y0;
    while (true) {
        const double remaining = std::abs(t1 - t);
        if (remaining <= 0.0) break;
        if (rep.accepted + rep.rejected >= s.max_steps) {
            rep.status = OdeStatus::step_limit;
            break;
        }
        const double h_min = s.h_min_rel * std::max(std::abs(t), span);
        if (h < h_min) {
            rep.status = OdeStatus::step_underflow;
            break;
        }
        const bool last = h >= remaining;
        const double hs = dir * (last ? remaining : h);

        const double k2 = rhs(t + c2 * hs, y + hs * a21 * k1);
        const double k3 = rhs(t + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
        const double k4 = rhs(t + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
        const double k5 =
            rhs(t + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const double k6 = rhs(t + hs,
                              y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const double y_new = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const double t_new = last ? t1 : t + hs;
        const double k7 = rhs(t_new, y_new);

        const double err_abs =
            std::abs(hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7));
        const double tol = s.atol + s.rtol * std::max(std::abs(y), std::abs(y_new));
        const double err = err_abs / tol;

        if (!std::isfinite(err) || !std::isfinite(y_new)) {
            ++rep.rejected;
            h *= 0.2;
            continue;
        }
        if (err <= 1.0) {
            t = t_new;
            y = y_new;
            k1 = k7;
            ++rep.accepted;
            rep.t = t;
            rep.y = y;
            if (!observer(t, y, k7)) {
                rep.status = OdeStatus::stopped;
                return rep;
            }
            const double grow = err == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err, -0.2));
            h = std::min(h_max, std::abs(hs) * std::max(1.0, grow));
            if (last) break;
        } else {
            ++rep.rejected;
            h = std::abs(hs) * std::max(0.2, 0.9 * std::pow(err, -0.2));
        }
    }
    return rep;
}

/// L-stable, stiffly accurate two-stage SDIRK (order 2) with step-doubling
/// error control, for stiff stretches of a scalar problem.
///
/// `solve_stage(tau, base, a)` must return Y solving Y = base + a * rhs(tau, Y).
/// After every accepted step `observer(t, y, dydt)` is called; the integration
/// ends (status completed) as soon as `handoff(t, y)` returns true or t1 is reached.
template <class Rhs, class StageSolver, class Observer, class Handoff>
OdeReport integrate_sdirk2(Rhs&& rhs, StageSolver&& solve_stage, double t0, double y0, double t1,
                           const OdeSettings& s, Observer&& observer, Handoff&& handoff) {
    const double gamma = 1.0 - std::sqrt(0.5);
    OdeReport rep;
    rep.t = t0;
    rep.y = y0;
    const double span = std::abs(t1 - t0);
    const double dir = t1 >= t0 ? 1.0 : -1.0;
    if (!observer(t0, y0, rhs(t0, y0))) {
        rep.status = OdeStatus::stopped;
        return rep;
    }

    auto one_step = [&](double t, double y, double hs) {
        const double y1 = solve_stage(t + gamma * hs, y, gamma * hs);
        const double k1 = (y1 - y) / (gamma * hs);
        return solve_stage(t + hs, y + (1.0 - gamma) * hs * k1, gamma * hs);
    };

    double h = s.h_init > 0.0 ? s.h_init : 1e-9 * span;
    const double h_max = s.h_max > 0.0 ? std::min(s.h_max, span) : span;
    double t = t0, y = y0;
    while (std::abs(t1 - t) > 0.0) {
        if (rep.accepted + rep.rejected >= s.max_steps) {
            rep.status = OdeStatus::step_limit;
            break;
        }
        if (h < s.h_min_rel * std::max(std::abs(t), span)) {
            rep.status = OdeStatus::step_underflow;
            break;
        }
        const double remaining = std::abs(t1 - t);
        const bool last = h >= remaining;
        const double hs = dir * (last ? remaining : h);
        const double full = one_step(t, y, hs);
        const double mid = one_step(t, y, 0.5 * hs);
        const double fine = one_step(t + 0.5 * hs, mid, 0.5 * hs);
        const double err = std::abs(fine - full) / 3.0 / (s.atol + s.rtol * std::max(std::abs(y), std::abs(fine)));
        if (!std::isfinite(err)) {
            ++rep.rejected;
            h *= 0.25;
            continue;
        }
        if (err <= 1.0) {
            t = last ? t1 : t + hs;
            y = fine;
            ++rep.accepted;
            rep.t = t;
            rep.y = y;
            if (!observer(t, y, rhs(t, y))) {
                rep.status = OdeStatus::stopped;
                return rep;
            }
            if (handoff(t, y)) break;
            const double grow = err == 0.0 ? 4.0 : std::min(4.0, 0.9 * std::cbrt(1.0 / err));
            h = std::min(h_max, std::abs(hs) * std::max(1.0, grow));
        } else {
            ++rep.rejected;
            h = std::abs(hs) * std::max(0.2, 0.9 * std::cbrt(1.0 / err));
        }
    }
    return rep;
}

}  // namespace pqfront::detail
