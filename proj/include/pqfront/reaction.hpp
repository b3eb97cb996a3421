#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pqfront/detail/interp.hpp"
#include "pqfront/detail/roots.hpp"

namespace pqfront {

enum class ReactionFamily {
    power_logistic,      ///< f(u) = a u^gamma (H - u)
    classical_logistic,  ///< f(u) = a u (H - u)
    tabulated,           ///< monotone cubic through (u, f) samples on [0, H]
};

inline std::string_view to_string(ReactionFamily f) {
    switch (f) {
        case ReactionFamily::power_logistic: return "power_logistic";
        case ReactionFamily::classical_logistic: return "classical_logistic";
        case ReactionFamily::tabulated: return "tabulated";
    }
    return "?";
}

inline ReactionFamily parse_reaction_family(std::string_view s) {
    if (s == "power_logistic") return ReactionFamily::power_logistic;
    if (s == "classical_logistic") return ReactionFamily::classical_logistic;
    if (s == "tabulated") return ReactionFamily::tabulated;
    throw std::invalid_argument("unknown reaction family '" + std::string(s) + "'");
}

/// Fisher-type reaction on [0, H]: f(0) = f(H) = 0 and f >= 0 in between.
/// `qprime` is the conjugate exponent q' against which the slope constants
/// L0 = lim f(s)/s^{q'-1} and L+ = sup f(s)/s^{q'-1} are measured.
class ReactionSpec {
public:
    static ReactionSpec power_logistic(double amplitude, double gamma, double H, double qprime) {
        check_common(H, qprime);
        if (!(amplitude >= 0.0) || !std::isfinite(amplitude))
            throw std::invalid_argument("reaction amplitude must be finite and >= 0");
        if (!(gamma > 0.0) || !std::isfinite(gamma))
            throw std::invalid_argument("reaction exponent gamma must be > 0");
        ReactionSpec r(ReactionFamily::power_logistic, H, qprime);
        r.amplitude_ = amplitude;
        r.gamma_ = gamma;
        return r;
    }

    static ReactionSpec classical_logistic(double H, double qprime, double amplitude = 1.0) {
        ReactionSpec r = power_logistic(amplitude, 1.0, H, qprime);
        r.family_ = ReactionFamily::classical_logistic;
        return r;
    }

    /// Samples must start at u = 0, increase strictly, end at u = H, vanish at
    /// both ends and be positive in between.
    static ReactionSpec tabulated(std::vector<double> u, std::vector<double> f, double qprime) {
        if (u.size() < 3 || u.size() != f.size())
            throw std::invalid_argument("tabulated reaction needs >= 3 matching (u, f) samples");
        if (u.front() != 0.0) throw std::invalid_argument("tabulated reaction must start at u = 0");
        for (std::size_t i = 1; i < u.size(); ++i)
            if (!(u[i] > u[i - 1]))
                throw std::invalid_argument("tabulated reaction: u must be strictly increasing");
        if (f.front() != 0.0 || f.back() != 0.0)
            throw std::invalid_argument("tabulated reaction must vanish at u = 0 and u = H");
        for (std::size_t i = 1; i + 1 < f.size(); ++i)
            if (!(f[i] > 0.0) || !std::isfinite(f[i]))
                throw std::invalid_argument("tabulated reaction must be positive inside ]0, H[");
        const double H = u.back();
        check_common(H, qprime);
        ReactionSpec r(ReactionFamily::tabulated, H, qprime);
        r.table_ = detail::MonotoneCubic(std::move(u), std::move(f));
        return r;
    }

    /// Two-column CSV with header "u,f".
    static ReactionSpec load_csv(const std::filesystem::path& path, double qprime) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open reaction table " + path.string());
        std::string line;
        if (!std::getline(in, line)) throw std::runtime_error("empty reaction table " + path.string());
        std::erase_if(line, [](char ch) { return ch == ' ' || ch == '\r' || ch == '\t'; });
        if (line != "u,f")
            throw std::runtime_error("reaction table " + path.string() + ": header must be 'u,f'");
        std::vector<double> us, fs;
        std::size_t lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream row(line);
            double u = 0, f = 0;
            if (!(row >> u >> f))
                throw std::runtime_error("reaction table " + path.string() + ": bad row at line " +
                                         std::to_string(lineno));
            us.push_back(u);
            fs.push_back(f);
        }
        return tabulated(std::move(us), std::move(fs), qprime);
    }

    [[nodiscard]] ReactionFamily family() const { return family_; }
    [[nodiscard]] double H() const { return H_; }
    [[nodiscard]] double qprime() const { return qprime_; }
    [[nodiscard]] double amplitude() const { return amplitude_; }
    [[nodiscard]] double gamma() const { return gamma_; }
    [[nodiscard]] const detail::MonotoneCubic& table() const { return table_; }
    [[nodiscard]] bool is_power_family() const { return family_ != ReactionFamily::tabulated; }

    /// Unchecked evaluation; u is clamped into [0, H].
    [[nodiscard]] double operator()(double u) const {
        u = std::clamp(u, 0.0, H_);
        if (family_ == ReactionFamily::tabulated) return std::max(0.0, table_(u));
        double up;
        if (gamma_ == 1.0)
            up = u;
        else if (gamma_ == 0.5)
            up = std::sqrt(u);
        else if (gamma_ == 2.0)
            up = u * u;
        else
            up = std::pow(u, gamma_);
        return amplitude_ * up * (H_ - u);
    }

private:
    ReactionSpec(ReactionFamily fam, double H, double qprime) : family_(fam), H_(H), qprime_(qprime) {}

    static void check_common(double H, double qprime) {
        if (!(H > 0.0) || !std::isfinite(H)) throw std::invalid_argument("reaction H must be > 0");
        if (!(qprime > 1.0) || !std::isfinite(qprime))
            throw std::invalid_argument("reaction q' must be > 1");
    }

    ReactionFamily family_;
    double H_;
    double qprime_;
    double amplitude_ = 0.0;
    double gamma_ = 1.0;
    detail::MonotoneCubic table_;
};

/// f(u) for u in [0, H]; throws std::domain_error outside.
inline double evaluate_f(const ReactionSpec& r, double u) {
    if (!(u >= 0.0 && u <= r.H()))
        throw std::domain_error("evaluate_f: u = " + std::to_string(u) + " outside [0, H]");
    if (u == 0.0 || u == r.H()) return 0.0;
    return r(u);
}

enum class LimitStatus { converged, unbounded, vanishing, unresolved };

inline std::string_view to_string(LimitStatus s) {
    switch (s) {
        case LimitStatus::converged: return "converged";
        case LimitStatus::unbounded: return "unbounded";
        case LimitStatus::vanishing: return "vanishing";
        case LimitStatus::unresolved: return "unresolved";
    }
    return "?";
}

/// L0 = lim_{s->0+} f(s)/s^{q'-1} and L+ = sup_{]0,H]} f(s)/s^{q'-1}.
/// Divergent values are reported as +infinity, a vanishing limit as 0.
struct SlopeLimits {
    double L0;
    double Lplus;
    LimitStatus l0_status;

    [[nodiscard]] bool l0_usable() const { return std::isfinite(L0) && L0 > 0.0; }
    [[nodiscard]] bool lplus_usable() const { return std::isfinite(Lplus) && Lplus > 0.0; }
};

namespace detail {

inline double slope_quotient(const ReactionSpec& r, double s) {
    return r(s) / std::pow(s, r.qprime() - 1.0);
}

/// Sup of `fn` over ]0, b]: best point of a uniform grid, refined by golden section.
template <class F>
double grid_sup(F&& fn, double b, int n = 10000) {
    const double h = b / n;
    int best = 1;
    double best_val = fn(h);
    for (int i = 2; i <= n; ++i) {
        const double v = fn(i * h);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    const double lo = (best - 1) * h > 0.0 ? (best - 1) * h : 1e-3 * h;
    const double hi = std::min(b, (best + 1) * h);
    const double x = golden_section_min([&](double s) { return -fn(s); }, lo, hi, 1e-14);
    return std::max(best_val, fn(x));
}

}  // namespace detail

inline SlopeLimits slope_limits(const ReactionSpec& r) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double H = r.H();
    if (r.is_power_family()) {
        const double a = r.amplitude();
        if (a == 0.0) return {0.0, 0.0, LimitStatus::vanishing};
        const double d = r.gamma() - (r.qprime() - 1.0);
        if (std::abs(d) <= 1e-12) return {a * H, a * H, LimitStatus::converged};
        if (d < 0.0) return {inf, inf, LimitStatus::unbounded};
        // sup of s^d (H - s) is attained at s = d H / (d + 1)
        const double s_star = d * H / (d + 1.0);
        return {0.0, a * std::pow(s_star, d) * (H - s_star), LimitStatus::vanishing};
    }

    const double r3 = detail::slope_quotient(r, 1e-3 * H);
    const double r4 = detail::slope_quotient(r, 1e-4 * H);
    const double r5 = detail::slope_quotient(r, 1e-5 * H);
    const double hi = std::max({r3, r4, r5});
    const double lo = std::min({r3, r4, r5});
    SlopeLimits out{r5, 0.0, LimitStatus::converged};
    if (hi > 0.0 && (hi - lo) / hi >= 0.01) {
        if (r5 > r4 && r4 > r3)
            out = {inf, inf, LimitStatus::unbounded};
        else if (r5 < r4 && r4 < r3)
            out = {0.0, 0.0, LimitStatus::vanishing};
        else
            out = {std::numeric_limits<double>::quiet_NaN(), 0.0, LimitStatus::unresolved};
    }
    if (out.l0_status == LimitStatus::unbounded) return out;
    const double sup = detail::grid_sup([&](double s) { return detail::slope_quotient(r, s); }, H);
    out.Lplus = std::isfinite(out.L0) ? std::max(sup, out.L0) : sup;
    return out;
}

/// g(v) = H f(H v) on [0, 1]. Speeds map as c -> H c and the slope constants
/// as L -> H^{q'} L.
inline ReactionSpec rescale_to_unit(const ReactionSpec& r) {
    const double H = r.H();
    if (H == 1.0) return r;
    if (r.family() == ReactionFamily::classical_logistic)
        return ReactionSpec::classical_logistic(1.0, r.qprime(), r.amplitude() * H * H * H);
    if (r.family() == ReactionFamily::power_logistic)
        return ReactionSpec::power_logistic(r.amplitude() * std::pow(H, r.gamma() + 2.0), r.gamma(), 1.0,
                                            r.qprime());
    const auto& t = r.table();
    std::vector<double> u(t.xs().begin(), t.xs().end());
    std::vector<double> f(t.ys().begin(), t.ys().end());
    for (auto& x : u) x /= H;
    u.back() = 1.0;
    for (auto& y : f) y *= H;
    return ReactionSpec::tabulated(std::move(u), std::move(f), r.qprime());
}

/// Smallest k with g(s) <= k (1 - s) on [0, 1], for the unit-rescaled reaction g.
/// Returns +infinity when the quotient is unbounded.
inline double linear_cap_k(const ReactionSpec& r) {
    const ReactionSpec g = rescale_to_unit(r);
    if (g.is_power_family()) return g.amplitude();  // sup of v^gamma on [0, 1]
    const double endpoint = -g.table().derivative(1.0);
    if (!std::isfinite(endpoint)) return std::numeric_limits<double>::infinity();
    const double sup =
        detail::grid_sup([&](double s) { return s >= 1.0 ? endpoint : g(s) / (1.0 - s); }, 1.0 - 1e-9);
    return std::max(sup, endpoint);
}

}  // namespace pqfront
