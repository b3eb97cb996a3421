#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "pqfront/detail/roots.hpp"

namespace pqfront {

/// How the two power-law terms of the flux are combined.
///   cooperative:  |u'|^{p-2}u' + |u'|^{q-2}u'   (p = q gives the doubled operator)
///   competitive:  |u'|^{q-2}u' - |u'|^{p-2}u'
///   single_q:     |u'|^{q-2}u'
enum class OperatorMode { cooperative, competitive, single_q };

inline std::string_view to_string(OperatorMode m) {
    switch (m) {
        case OperatorMode::cooperative: return "cooperative";
        case OperatorMode::competitive: return "competitive";
        case OperatorMode::single_q: return "single_q";
    }
    return "?";
}

inline OperatorMode parse_operator_mode(std::string_view s) {
    if (s == "cooperative") return OperatorMode::cooperative;
    if (s == "competitive") return OperatorMode::competitive;
    if (s == "single_q") return OperatorMode::single_q;
    throw std::invalid_argument("unknown operator mode '" + std::string(s) + "'");
}

/// Thrown when the competitive primitive Q is asked to invert a value above
/// its maximum Q(s0): the reduced problem is no longer well posed there.
class DomainBreach : public std::domain_error {
public:
    explicit DomainBreach(const std::string& what) : std::domain_error(what) {}
};

/// Exponents and mode of the (p,q)-Laplacian flux. Immutable once built.
class OperatorSpec {
public:
    static OperatorSpec cooperative(double p, double q) {
        if (!(std::isfinite(p) && std::isfinite(q)) || q < 2.0 || p < q)
            throw std::invalid_argument("cooperative operator needs 2 <= q <= p");
        return OperatorSpec(p, q, OperatorMode::cooperative);
    }

    static OperatorSpec competitive(double p, double q) {
        if (!(std::isfinite(p) && std::isfinite(q)) || q < 2.0 || !(p > q))
            throw std::invalid_argument("competitive operator needs 2 <= q < p");
        return OperatorSpec(p, q, OperatorMode::competitive);
    }

    static OperatorSpec single_q(double q) {
        if (!std::isfinite(q) || q < 2.0)
            throw std::invalid_argument("single_q operator needs q >= 2");
        return OperatorSpec(q, q, OperatorMode::single_q);
    }

    static OperatorSpec make(OperatorMode mode, double p, double q) {
        switch (mode) {
            case OperatorMode::cooperative: return cooperative(p, q);
            case OperatorMode::competitive: return competitive(p, q);
            case OperatorMode::single_q: return single_q(q);
        }
        throw std::invalid_argument("bad operator mode");
    }

    [[nodiscard]] double p() const { return p_; }
    [[nodiscard]] double q() const { return q_; }
    [[nodiscard]] OperatorMode mode() const { return mode_; }
    /// Conjugate exponents, 1/q + 1/q' = 1.
    [[nodiscard]] double q_conj() const { return q_ / (q_ - 1.0); }
    [[nodiscard]] double p_conj() const { return p_ / (p_ - 1.0); }
    /// Cooperative operator with p = q, i.e. twice the q-Laplacian.
    [[nodiscard]] bool doubled() const { return mode_ == OperatorMode::cooperative && p_ == q_; }

    friend bool operator==(const OperatorSpec&, const OperatorSpec&) = default;

private:
    OperatorSpec(double p, double q, OperatorMode m) : p_(p), q_(q), mode_(m) {}

    double p_;
    double q_;
    OperatorMode mode_;
};

/// Primitive Q(s) of the flux derivative with Q(0) = 0, for s >= 0.
inline double q_value(const OperatorSpec& op, double s) {
    const double p = op.p(), q = op.q();
    const double tq = (q - 1.0) / q * std::pow(s, q);
    switch (op.mode()) {
        case OperatorMode::cooperative: return (p - 1.0) / p * std::pow(s, p) + tq;
        case OperatorMode::competitive: return tq - (p - 1.0) / p * std::pow(s, p);
        case OperatorMode::single_q: return tq;
    }
    return tq;
}

/// Q'(s), the local diffusivity of the reduced problem.
inline double q_derivative(const OperatorSpec& op, double s) {
    const double p = op.p(), q = op.q();
    const double tq = (q - 1.0) * std::pow(s, q - 1.0);
    switch (op.mode()) {
        case OperatorMode::cooperative: return (p - 1.0) * std::pow(s, p - 1.0) + tq;
        case OperatorMode::competitive: return tq - (p - 1.0) * std::pow(s, p - 1.0);
        case OperatorMode::single_q: return tq;
    }
    return tq;
}

struct InvertibilityLimit {
    double s0;     ///< largest gradient on which Q is increasing
    double y_max;  ///< Q(s0)
};

/// Interval [0, s0] on which Q is strictly increasing. Unbounded except in
/// competitive mode, where s0 = ((q-1)/(p-1))^{1/(p-q)}.
inline InvertibilityLimit invertibility_limit(const OperatorSpec& op) {
    if (op.mode() != OperatorMode::competitive) {
        constexpr double inf = std::numeric_limits<double>::infinity();
        return {inf, inf};
    }
    const double s0 = std::pow((op.q() - 1.0) / (op.p() - 1.0), 1.0 / (op.p() - op.q()));
    return {s0, q_value(op, s0)};
}

/// Constants of R(y) ~ c0 y^{exponent0} as y -> 0+ and R(y) ~ c_inf y^{exponent_inf}
/// as y -> infinity. The large-y branch does not exist in competitive mode.
struct AsymptoticConstants {
    double c0;
    double exponent0;
    std::optional<double> c_inf;
    std::optional<double> exponent_inf;
};

inline AsymptoticConstants r_asymptotic_constants(const OperatorSpec& op) {
    const double p = op.p(), q = op.q();
    if (op.doubled()) {
        const double c = std::pow(q / (2.0 * (q - 1.0)), 1.0 / q);
        return {c, 1.0 / q, c, 1.0 / q};
    }
    const double c0 = std::pow(q / (q - 1.0), 1.0 / q);
    switch (op.mode()) {
        case OperatorMode::cooperative:
            return {c0, 1.0 / q, std::pow(p / (p - 1.0), 1.0 / p), 1.0 / p};
        case OperatorMode::single_q: return {c0, 1.0 / q, c0, 1.0 / q};
        case OperatorMode::competitive: return {c0, 1.0 / q, std::nullopt, std::nullopt};
    }
    return {c0, 1.0 / q, std::nullopt, std::nullopt};
}

/// Functional inverse R = Q^{-1} on y >= 0.
///
/// Safeguarded Newton on Q(s) - y bracketed by [0, upper], with `upper` taken
/// from the asymptotic branches. Throws DomainBreach in competitive mode for
/// y > Q(s0); values within a relative 1e-12 of Q(s0) are clamped to s0.
inline double r_inverse(const OperatorSpec& op, double y) {
    if (!(y >= 0.0)) throw std::invalid_argument("r_inverse: y must be nonnegative");
    if (y < 1e-300) return 0.0;

    const double p = op.p(), q = op.q();
    const double c0 = std::pow(q / (q - 1.0), 1.0 / q);
    if (op.mode() == OperatorMode::single_q) return c0 * std::pow(y, 1.0 / q);
    if (op.doubled()) return std::pow(q * y / (2.0 * (q - 1.0)), 1.0 / q);

    double upper = 0.0;
    double guess = 0.0;
    if (op.mode() == OperatorMode::competitive) {
        const auto lim = invertibility_limit(op);
        if (y > lim.y_max * (1.0 + 1e-12))
            throw DomainBreach("r_inverse: y exceeds the invertibility limit Q(s0)");
        if (y >= lim.y_max) return lim.s0;
        upper = lim.s0;
        guess = std::min(c0 * std::pow(y, 1.0 / q), 0.5 * lim.s0);
    } else {
        // Q(s) dominates each of its terms, so each branch over-estimates R.
        const double c_inf = std::pow(p / (p - 1.0), 1.0 / p);
        guess = std::min(c0 * std::pow(y, 1.0 / q), c_inf * std::pow(y, 1.0 / p));
        upper = 2.0 * guess;
    }
    return detail::newton_bracketed([&](double s) { return q_value(op, s) - y; },
                                    [&](double s) { return q_derivative(op, s); }, 0.0, upper,
                                    guess);
}

/// Closed-form inverse for the cooperative operator with p = 2q, written in
/// the rationalised form that avoids cancellation for small y.
inline double r_closed_form_2q(double q, double y) {
    if (q < 2.0) throw std::invalid_argument("r_closed_form_2q: q must be >= 2");
    if (!(y >= 0.0)) throw std::invalid_argument("r_closed_form_2q: y must be nonnegative");
    const double a = (q - 1.0) / q;
    const double b = 2.0 * (2.0 * q - 1.0) / q * y;
    const double inner = b / (a + std::sqrt(a * a + b));
    return std::pow(q / (2.0 * q - 1.0) * inner, 1.0 / q);
}

}  // namespace pqfront
