#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pqfront/bounds.hpp"
#include "pqfront/detail/ode.hpp"
#include "pqfront/diffusion_operator.hpp"
#include "pqfront/reaction.hpp"

namespace pqfront {

/// Numerical knobs of the backward shooting. Thresholds refer to y values,
/// which are the same for a problem on [0, H] and its unit rescaling.
struct ShootSettings {
    double seed_delta = 1e-12;   ///< regularised terminal value y(H)
    double atol = 1e-24;
    double rtol = 1e-10;
    double zero_tol = 1e-6;      ///< y(0) at or below this counts as a connection
    double promote_tol = 1e-4;   ///< y(0) above this counts as a miss
    std::size_t grid_points = 2048;
    double floor_rel = 1e-12;    ///< integration stops at v = floor_rel * H
    double bisect_tol = 1e-4;    ///< relative width of the final c* bracket
    int max_expansions = 10;
    std::size_t max_steps = 2'000'000;
};

enum class Classification { admissible, inadmissible, indeterminate, domain_breach, integration_failure };

inline std::string_view to_string(Classification c) {
    switch (c) {
        case Classification::admissible: return "admissible";
        case Classification::inadmissible: return "inadmissible";
        case Classification::indeterminate: return "indeterminate";
        case Classification::domain_breach: return "domain_breach";
        case Classification::integration_failure: return "integration_failure";
    }
    return "?";
}

struct ShootSample {
    double v;
    double y;
    double phi;  ///< R(y), the front slope at level v
};

/// Backward solution of y' = c R(y) - f(v), y(H) = seed_delta, on [0, H].
struct ShootOutcome {
    double c = 0.0;
    double H = 1.0;
    double seed_delta = 0.0;
    std::vector<ShootSample> samples;  ///< uniform grid, ascending in v (only the part reached)
    std::vector<double> trajectory_v;  ///< accepted integrator steps, ascending in v
    std::vector<double> trajectory_y;
    double y_at_zero = std::numeric_limits<double>::quiet_NaN();  ///< NaN unless v = 0 was reached
    double max_y = 0.0;
    Classification classification = Classification::integration_failure;
    std::optional<double> stopped_at;  ///< v where a breach or failure ended the integration
    bool positive_interior = true;
    std::size_t steps = 0;
};

class IntegrationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void check_compatible(const OperatorSpec& op, const ReactionSpec& r) {
    if (std::abs(r.qprime() - op.q_conj()) > 1e-12 * op.q_conj())
        throw std::invalid_argument("reaction q' does not match the operator's conjugate exponent");
}

/// Cubic Hermite evaluation through steps with known derivatives.
inline double hermite(double x0, double x1, double y0, double y1, double d0, double d1, double x) {
    const double h = x1 - x0;
    const double s = (x - x0) / h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * y1 +
           (s3 - s2) * h * d1;
}

}  // namespace detail

/// Integrates the reduced problem backward from v = H to v = 0.
///
/// The terminal point is degenerate (R is not Lipschitz at 0 and f(H) = 0),
/// so the solution leaving y = 0 is selected by starting from y(H) = seed_delta.
/// Competitive mode stops with domain_breach as soon as y exceeds Q(s0).
inline ShootOutcome integrate_backward(const OperatorSpec& op, const ReactionSpec& r, double c,
                                       const ShootSettings& s = {}) {
    detail::check_compatible(op, r);
    if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("integrate_backward: c must be >= 0");

    const double H = r.H();
    const auto lim = invertibility_limit(op);
    const bool competitive = op.mode() == OperatorMode::competitive;
    const double breach_level = competitive ? lim.y_max * (1.0 + 1e-12) : std::numeric_limits<double>::infinity();

    ShootOutcome out;
    out.c = c;
    out.H = H;
    out.seed_delta = s.seed_delta;

    auto rhs = [&](double v, double y) {
        const double yc = std::clamp(y, 0.0, competitive ? lim.y_max : std::numeric_limits<double>::max());
        return c * r_inverse(op, yc) - r(v);
    };

    std::vector<double> tv, ty, td;
    const double v_floor = s.floor_rel * H;
    bool breached = false;
    auto observer = [&](double v, double y, double dydv) {
        tv.push_back(v);
        ty.push_back(y);
        td.push_back(dydv);
        out.max_y = std::max(out.max_y, y);
        if (y > breach_level) {
            breached = true;
            return false;
        }
        return true;
    };

    // Terminal layer: y sits on the slow manifold c R(y) ~ f(v), whose
    // relaxation rate c R'(y) grows without bound as v -> H (like 1/(H-v)^{q-1}).
    // An L-stable implicit phase crosses it; the explicit pair takes over once
    // the stiffness ratio c R'(y) (H - v) has dropped.
    auto r_prime = [&](double y) {
        const double yc = std::clamp(y, 0.0, competitive ? lim.y_max : std::numeric_limits<double>::max());
        const double slope = q_derivative(op, r_inverse(op, yc));
        return slope > 0.0 ? 1.0 / slope : std::numeric_limits<double>::infinity();
    };
    auto solve_stage = [&](double v, double base, double a) {
        // Y - base - a (c R(Y) - f(v)) = 0, solved for s = R(Y) so that Q is
        // evaluated directly; increasing in s for a < 0.
        const double fv = r(v);
        if (a * fv - base >= 0.0) return 0.0;
        const double hi = base - a * fv;
        double s_hi;
        if (competitive && hi >= lim.y_max) {
            s_hi = lim.s0;
            const double g0 = lim.y_max - base - a * (c * s_hi - fv);
            if (g0 < 0.0) return base + a * (c * s_hi - fv);
        } else {
            s_hi = r_inverse(op, hi);
        }
        auto g = [&](double sv) { return q_value(op, sv) - base - a * (c * sv - fv); };
        auto dg = [&](double sv) { return q_derivative(op, sv) - a * c; };
        const double sv = detail::newton_bracketed(g, dg, 0.0, s_hi, 0.5 * s_hi, 1e-14);
        return q_value(op, sv);
    };
    const double t_min = 1e-6 * H;
    auto handoff = [&](double v, double y) { return H - v >= t_min && c * r_prime(y) * (H - v) <= 50.0; };

    detail::OdeSettings stiff;
    stiff.atol = s.atol;
    stiff.rtol = 100.0 * s.rtol;
    stiff.h_init = 1e-3 * t_min;
    stiff.max_steps = s.max_steps;
    const auto layer = detail::integrate_sdirk2(rhs, solve_stage, H, s.seed_delta, v_floor, stiff, observer, handoff);
    detail::OdeReport rep = layer;
    std::size_t steps = layer.accepted;
    if (layer.status == detail::OdeStatus::completed && layer.t > v_floor) {
        detail::OdeSettings ode;
        ode.atol = s.atol;
        ode.rtol = s.rtol;
        ode.max_steps = s.max_steps;
        // the observer already holds the handoff point
        tv.pop_back();
        ty.pop_back();
        td.pop_back();
        rep = detail::integrate_dopri(rhs, layer.t, layer.y, v_floor, ode, observer);
        steps += rep.accepted;
    }
    out.steps = steps;

    if (breached) {
        out.classification = Classification::domain_breach;
        out.stopped_at = rep.t;
    } else if (rep.status != detail::OdeStatus::completed) {
        out.classification = Classification::integration_failure;
        out.stopped_at = rep.t;
    } else {
        out.y_at_zero = std::max(0.0, rep.y);
        out.classification =
            out.y_at_zero <= s.zero_tol ? Classification::admissible : Classification::inadmissible;
        tv.push_back(0.0);
        ty.push_back(rep.y);
        td.push_back(td.back());
    }

    // Steps were recorded from v = H downward; store them ascending.
    std::reverse(tv.begin(), tv.end());
    std::reverse(ty.begin(), ty.end());
    std::reverse(td.begin(), td.end());

    const std::size_t n = std::max<std::size_t>(2, s.grid_points);
    out.samples.reserve(n);
    std::size_t seg = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = H * static_cast<double>(i) / static_cast<double>(n - 1);
        if (v < tv.front()) continue;
        while (seg + 2 < tv.size() && tv[seg + 1] < v) ++seg;
        double y = ty.back();
        if (tv.size() >= 2 && v <= tv.back())
            y = detail::hermite(tv[seg], tv[seg + 1], ty[seg], ty[seg + 1], td[seg], td[seg + 1], v);
        if (i == n - 1) y = ty.back();
        if (i > 0 && i + 1 < n && !(y > 0.0)) out.positive_interior = false;
        y = std::max(0.0, y);
        const double phi = r_inverse(op, competitive ? std::min(y, lim.y_max) : y);
        out.samples.push_back({v, y, phi});
    }
    out.trajectory_v = std::move(tv);
    out.trajectory_y = std::move(ty);
    return out;
}

struct SpeedVerdict {
    double c = 0.0;
    Classification classification = Classification::indeterminate;
    double y_at_zero = 0.0;       ///< with seed_delta
    double y_at_zero_half = 0.0;  ///< with seed_delta / 2
    double max_y = 0.0;
    std::optional<double> lower_bound;
    std::string reason;
};

/// Admissibility of a single speed, robust to the seed: both seeds must agree.
/// Speeds below the necessary lower bound are inadmissible whatever the shoot
/// shows; close to a pulled critical speed the miss at v = 0 is exponentially
/// small and cannot be resolved by a threshold on y(0).
inline SpeedVerdict classify_speed(const OperatorSpec& op, const ReactionSpec& r, double c,
                                   const ShootSettings& s = {}) {
    SpeedVerdict v;
    v.c = c;
    const ShootOutcome a = integrate_backward(op, r, c, s);
    ShootSettings half = s;
    half.seed_delta = 0.5 * s.seed_delta;
    const ShootOutcome b = integrate_backward(op, r, c, half);
    v.y_at_zero = a.y_at_zero;
    v.y_at_zero_half = b.y_at_zero;
    v.max_y = std::max(a.max_y, b.max_y);

    const SlopeLimits sl = slope_limits(r);
    if (sl.l0_usable()) v.lower_bound = lower_bound(op, sl.L0);

    if (a.classification == Classification::domain_breach || b.classification == Classification::domain_breach) {
        v.classification = Classification::domain_breach;
        v.reason = "y left the invertibility range of Q";
        return v;
    }
    if (a.classification == Classification::integration_failure ||
        b.classification == Classification::integration_failure) {
        v.classification = Classification::integration_failure;
        v.reason = "integrator stopped before v = 0";
        return v;
    }
    if (v.lower_bound && c < *v.lower_bound * (1.0 - 1e-12)) {
        v.classification = Classification::inadmissible;
        v.reason = "below the necessary lower bound";
        return v;
    }
    const double hi = std::max(a.y_at_zero, b.y_at_zero);
    const double lo = std::min(a.y_at_zero, b.y_at_zero);
    if (hi <= s.zero_tol) {
        v.classification = Classification::admissible;
        v.reason = "y(0) within zero_tol for both seeds";
    } else if (lo > s.promote_tol) {
        v.classification = Classification::inadmissible;
        v.reason = "y(0) above promote_tol for both seeds";
    } else {
        v.classification = Classification::indeterminate;
        v.reason = "y(0) between zero_tol and promote_tol; adjust tolerances";
    }
    return v;
}

struct CriticalSpeedResult {
    double c_star = 0.0;
    std::pair<double, double> bracket{0.0, 0.0};
    BoundSet bound_set;
    int iterations = 0;
    int expansions = 0;
    double zero_tol = 0.0;
    double seed_delta = 0.0;
    bool monotone_in_c = true;  ///< y(0) was non-increasing over every evaluated c
    std::vector<std::pair<double, double>> evaluations;  ///< (c, y(0)) in original units
};

class CriticalSpeedFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bisection for the smallest admissible speed, exploiting that admissible
/// speeds form an upper half-line. The bracket starts at [lower, c+] and its
/// right end is doubled (at most max_expansions times) if it does not connect.
/// Works on the unit-rescaled problem; results are in the units of r.
inline CriticalSpeedResult critical_speed(const OperatorSpec& op, const ReactionSpec& r,
                                          const ShootSettings& s = {}) {
    if (op.mode() == OperatorMode::competitive)
        throw std::invalid_argument("critical_speed: competitive mode; use competitive_window");
    detail::check_compatible(op, r);
    const double H = r.H();
    const ReactionSpec unit = rescale_to_unit(r);

    CriticalSpeedResult res;
    res.bound_set = compute_bounds(op, r);
    res.zero_tol = s.zero_tol;
    res.seed_delta = s.seed_delta;
    if (!res.bound_set.lower || !res.bound_set.upper_analytic)
        throw UndefinedBound("critical_speed needs finite positive L0 and L+");

    auto connects = [&](double c_unit) {
        const ShootOutcome o = integrate_backward(op, unit, c_unit, s);
        if (o.classification == Classification::integration_failure)
            throw IntegrationFailure("critical_speed: integration failed at c = " + std::to_string(c_unit / H));
        res.evaluations.emplace_back(c_unit / H, o.y_at_zero);
        return o.y_at_zero <= s.zero_tol;
    };

    double lo = *res.bound_set.lower * H;
    double hi = *res.bound_set.upper_analytic * H;
    if (connects(lo)) {
        hi = lo;
    } else {
        const double hi0 = hi;
        while (!connects(hi)) {
            if (++res.expansions > s.max_expansions)
                throw CriticalSpeedFailure("critical_speed: no connection below " +
                                           std::to_string(hi0 * std::pow(2.0, s.max_expansions) / H));
            lo = hi;
            hi *= 2.0;
        }
        while (hi - lo > s.bisect_tol * hi) {
            const double mid = 0.5 * (lo + hi);
            (connects(mid) ? hi : lo) = mid;
            ++res.iterations;
        }
    }
    res.c_star = hi / H;
    res.bracket = {lo / H, hi / H};

    auto ev = res.evaluations;
    std::sort(ev.begin(), ev.end());
    for (std::size_t i = 1; i < ev.size(); ++i)
        if (ev[i].second > ev[i - 1].second + 1e-14) res.monotone_in_c = false;
    return res;
}

struct ScanPoint {
    double c;
    Classification classification;
    double y_at_zero;
    double max_y;
};

struct WindowScan {
    std::vector<ScanPoint> points;
    std::optional<std::pair<double, double>> interval;  ///< admissible speeds, when contiguous
    bool contiguous = true;
};

struct WindowScanOptions {
    int count = 17;
    std::optional<double> scan_cap;  ///< default: max(c+, window cap), never below the lower bound
};

/// Scans speeds from the lower bound up to `scan_cap` for the competitive
/// operator and reports which of them connect without leaving the
/// invertibility range. Breaches count as inadmissible.
inline WindowScan competitive_window(const OperatorSpec& op, const ReactionSpec& r, const ShootSettings& s = {},
                                     const WindowScanOptions& opt = {}) {
    if (op.mode() != OperatorMode::competitive)
        throw std::invalid_argument("competitive_window: operator is not competitive");
    const BoundSet b = compute_bounds(op, r);
    if (!b.lower) throw UndefinedBound("competitive_window needs finite positive L0");
    const double start = *b.lower;
    const double cap = std::max(start, opt.scan_cap.value_or(std::max(b.upper_analytic.value_or(start),
                                                                       b.competitive_c_max.value_or(start))));

    WindowScan scan;
    const int n = cap > start ? std::max(1, opt.count) : 1;
    for (int i = 0; i < n; ++i) {
        const double c = n == 1 ? start : start + (cap - start) * i / (n - 1);
        const SpeedVerdict v = classify_speed(op, r, c, s);
        scan.points.push_back({c, v.classification, v.y_at_zero, v.max_y});
    }
    std::optional<std::size_t> first, last;
    for (std::size_t i = 0; i < scan.points.size(); ++i) {
        if (scan.points[i].classification != Classification::admissible) continue;
        if (!first) first = i;
        last = i;
    }
    if (first) {
        for (std::size_t i = *first; i <= *last; ++i)
            if (scan.points[i].classification != Classification::admissible) scan.contiguous = false;
        if (scan.contiguous) scan.interval = std::pair{scan.points[*first].c, scan.points[*last].c};
    }
    return scan;
}

}  // namespace pqfront
