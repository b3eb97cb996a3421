#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string_view>

#include "pqfront/detail/roots.hpp"
#include "pqfront/diffusion_operator.hpp"
#include "pqfront/reaction.hpp"

namespace pqfront {

/// Which closed form produced the analytic upper bound c+.
enum class UpperCase { i, ii, iii, pq_equal, single_q, competitive };

inline std::string_view to_string(UpperCase c) {
    switch (c) {
        case UpperCase::i: return "i";
        case UpperCase::ii: return "ii";
        case UpperCase::iii: return "iii";
        case UpperCase::pq_equal: return "pq_equal";
        case UpperCase::single_q: return "single_q";
        case UpperCase::competitive: return "competitive";
    }
    return "?";
}

/// A slope constant was 0, infinite or unresolved, so the bound it feeds does not exist.
class UndefinedBound : public std::domain_error {
public:
    explicit UndefinedBound(const char* what) : std::domain_error(what) {}
};

namespace detail {

inline double homogeneous_speed(double q, double L) {
    const double qc = q / (q - 1.0);
    return std::pow(L, 1.0 / qc) * std::pow(qc, 1.0 / qc) * std::pow(q, 1.0 / q);
}

inline void require_usable(double L, const char* what) {
    if (!(std::isfinite(L) && L > 0.0)) throw UndefinedBound(what);
}

}  // namespace detail

/// Necessary condition for admissibility: c >= L0^{1/q'} q'^{1/q'} q^{1/q}
/// (times 2^{1/q} for the doubled p = q operator). Depends only on the
/// behaviour of R near zero, hence on q alone.
inline double lower_bound(const OperatorSpec& op, double L0) {
    detail::require_usable(L0, "lower bound needs 0 < L0 < inf");
    const double base = detail::homogeneous_speed(op.q(), L0);
    return op.doubled() ? std::pow(2.0, 1.0 / op.q()) * base : base;
}

struct UpperBound {
    double value;
    UpperCase which;
};

/// Analytic c+ from the subsolution Q(beta u^{q'-1}). Piecewise in L+ for the
/// cooperative p > q operator; homogeneous formula for p = q and single_q.
inline UpperBound upper_bound_cplus(const OperatorSpec& op, double Lplus) {
    if (op.mode() == OperatorMode::competitive)
        throw std::invalid_argument("upper_bound_cplus: use competitive_bounds for the competitive operator");
    detail::require_usable(Lplus, "upper bound needs 0 < L+ < inf");
    const double p = op.p(), q = op.q();
    if (op.mode() == OperatorMode::single_q) return {detail::homogeneous_speed(q, Lplus), UpperCase::single_q};
    if (op.doubled())
        return {std::pow(2.0, 1.0 / q) * detail::homogeneous_speed(q, Lplus), UpperCase::pq_equal};

    const double s = p + q - 2.0;
    const double junction2 = (p - 1.0) / (q - 1.0) * s;
    if (Lplus <= s)
        return {std::pow(Lplus, (q - 1.0) / q) * q / (q - 1.0) * std::pow(s, 1.0 / q), UpperCase::i};
    if (Lplus <= junction2) return {p * s / (q - 1.0), UpperCase::ii};
    return {std::pow(Lplus, (p - 1.0) / p) * p /
                (std::pow(q - 1.0, 1.0 / p) * std::pow(p - 1.0, (p - 1.0) / p)) * std::pow(s, 1.0 / p),
            UpperCase::iii};
}

/// Subsolution functional: G_c(beta) <= 0 certifies that c is admissible.
///   cooperative:              (p-1)/(q-1) beta^p + beta^q - c beta + L+
///   single_q and competitive: beta^q - c beta + L+
/// (the competitive form is the u-independent sufficient condition; it is
/// valid only for beta <= s0).
inline double g_script(const OperatorSpec& op, double Lplus, double c, double beta) {
    const double q = op.q();
    double val = std::pow(beta, q) - c * beta + Lplus;
    if (op.mode() == OperatorMode::cooperative) val += (op.p() - 1.0) / (q - 1.0) * std::pow(beta, op.p());
    return val;
}

inline double g_script_derivative(const OperatorSpec& op, double c, double beta) {
    const double p = op.p(), q = op.q();
    double val = q * std::pow(beta, q - 1.0) - c;
    if (op.mode() == OperatorMode::cooperative) val += (p - 1.0) / (q - 1.0) * p * std::pow(beta, p - 1.0);
    return val;
}

struct GMinimum {
    double beta;
    double value;
};

/// Upper end of the admissible beta range: s0 (shrunk by 1e-9) in competitive
/// mode, unbounded otherwise.
inline double beta_limit(const OperatorSpec& op) {
    if (op.mode() == OperatorMode::competitive) return invertibility_limit(op).s0 * (1.0 - 1e-9);
    return std::numeric_limits<double>::infinity();
}

/// Minimum of the strictly convex G_c over 0 < beta <= beta_limit(op).
inline GMinimum minimize_g(const OperatorSpec& op, double Lplus, double c) {
    const double p = op.p(), q = op.q();
    const double limit = beta_limit(op);
    if (!(c > 0.0)) return {1e-12, g_script(op, Lplus, c, 1e-12)};

    double beta = 0.0;
    if (op.mode() == OperatorMode::cooperative) {
        const double lo = 1e-12;
        const double cap = std::pow(c * (q - 1.0) / (p - 1.0), 1.0 / (p - 1.0)) + 1.0;
        const double init = std::pow(c * (q - 1.0) / (q * (p + q - 2.0)), 1.0 / (q - 1.0));
        beta = detail::newton_bracketed(
            [&](double b) { return g_script_derivative(op, c, b); },
            [&](double b) {
                return q * (q - 1.0) * std::pow(b, q - 2.0) +
                       p * (p - 1.0) * (p - 1.0) / (q - 1.0) * std::pow(b, p - 2.0);
            },
            lo, cap, init);
    } else {
        beta = std::pow(c / q, 1.0 / (q - 1.0));
    }
    beta = std::min(beta, limit);
    return {beta, g_script(op, Lplus, c, beta)};
}

struct NumericCplusOptions {
    double tolerance = 1e-6;          ///< absolute width of the final c bracket
    std::optional<double> c_cap{};    ///< competitive mode: largest speed searched
};

/// Smallest c (to `tolerance`) for which min_beta G_c(beta) <= 0, found by
/// bisection between the lower bound and the analytic c+. Returns nullopt in
/// competitive mode when no certificate exists below the cap (default: the
/// window cap q ((q-1)/(p-1))^{(q-1)/(p-q)}).
inline std::optional<double> numeric_cplus(const OperatorSpec& op, double Lplus,
                                           const NumericCplusOptions& opt = {}) {
    detail::require_usable(Lplus, "numeric c+ needs 0 < L+ < inf");
    const double slack = 1e-12 * std::max(1.0, Lplus);
    auto feasible = [&](double c) { return minimize_g(op, Lplus, c).value <= slack; };

    double lo = lower_bound(op, Lplus);
    double hi = 0.0;
    if (op.mode() == OperatorMode::competitive) {
        const double q = op.q();
        hi = opt.c_cap.value_or(q * std::pow(invertibility_limit(op).s0, q - 1.0));
        if (lo > hi || !feasible(hi)) return std::nullopt;
    } else {
        hi = upper_bound_cplus(op, Lplus).value;
        if (!feasible(hi)) hi *= 1.0 + 1e-12;
    }
    if (feasible(lo)) return lo;
    while (hi - lo > opt.tolerance) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? hi : lo) = mid;
    }
    return hi;
}

struct CompetitiveBounds {
    double c_lower;
    double c_upper_for_cstar;
    double c_max;
    bool window_empty;
};

/// Sandwich for c* and the window cap c_max = q ((q-1)/(p-1))^{(q-1)/(p-q)}
/// for the competitive operator. The cap comes from a sufficient condition,
/// so an empty window does not rule out admissible speeds.
inline CompetitiveBounds competitive_bounds(const OperatorSpec& op, double L0, double Lplus) {
    if (op.mode() != OperatorMode::competitive)
        throw std::invalid_argument("competitive_bounds: operator is not competitive");
    const double q = op.q();
    const double c_max = q * std::pow((q - 1.0) / (op.p() - 1.0), (q - 1.0) / (op.p() - q));
    const double lower = L0 > 0.0 && std::isfinite(L0) ? detail::homogeneous_speed(q, L0) : 0.0;
    const double upper = std::isfinite(Lplus) ? detail::homogeneous_speed(q, Lplus)
                                              : std::numeric_limits<double>::infinity();
    return {lower, upper, c_max, upper > c_max};
}

/// Everything the closed forms say about c*, in the speed units of a reaction on [0, H].
struct BoundSet {
    double H = 1.0;
    SlopeLimits unit_slopes{};  ///< L0, L+ of the unit-rescaled reaction
    std::optional<double> lower;
    std::optional<double> upper_analytic;
    std::optional<UpperCase> upper_case;
    std::optional<double> upper_numeric;
    std::optional<double> competitive_c_max;
    bool competitive_window_empty = false;
    std::optional<std::pair<double, double>> competitive_window;
};

/// Bounds from slope constants of a unit problem; speeds are divided by H so
/// they refer to the original [0, H] problem.
inline BoundSet bounds_from_slopes(const OperatorSpec& op, const SlopeLimits& unit, double H = 1.0) {
    BoundSet b;
    b.H = H;
    b.unit_slopes = unit;
    if (unit.l0_usable()) b.lower = lower_bound(op, unit.L0) / H;
    if (op.mode() == OperatorMode::competitive) {
        const auto cb = competitive_bounds(op, unit.L0, unit.Lplus);
        b.competitive_c_max = cb.c_max / H;
        b.competitive_window_empty = cb.window_empty;
        if (unit.lplus_usable()) {
            b.upper_analytic = cb.c_upper_for_cstar / H;
            b.upper_case = UpperCase::competitive;
            if (auto n = numeric_cplus(op, unit.Lplus)) b.upper_numeric = *n / H;
        }
        if (!cb.window_empty) b.competitive_window = std::pair{cb.c_upper_for_cstar / H, cb.c_max / H};
        return b;
    }
    if (unit.lplus_usable()) {
        const auto ub = upper_bound_cplus(op, unit.Lplus);
        b.upper_analytic = ub.value / H;
        b.upper_case = ub.which;
        if (auto n = numeric_cplus(op, unit.Lplus)) b.upper_numeric = *n / H;
    }
    return b;
}

inline BoundSet compute_bounds(const OperatorSpec& op, const ReactionSpec& r) {
    return bounds_from_slopes(op, slope_limits(rescale_to_unit(r)), r.H());
}

}  // namespace pqfront
