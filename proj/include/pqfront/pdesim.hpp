#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pqfront/detail/interp.hpp"
#include "pqfront/diffusion_operator.hpp"
#include "pqfront/profile.hpp"
#include "pqfront/reaction.hpp"

namespace pqfront {

/// Uniform grid of nx nodes on [x_min, x_max]; the end nodes are pinned to
/// u = 0 (left) and u = H (right), so fronts invade leftward.
struct GridSpec {
    double x_min = -50.0;
    double x_max = 50.0;
    std::size_t nx = 2000;
    double dt = 0.0;  ///< 0: largest stable step; otherwise capped by the stable step
    double t_end = 10.0;
    std::size_t snapshot_stride = 500;  ///< steps between snapshots and front positions
    /// Relative to H: f is switched off below this level. Unset: 1e-6 for
    /// reactions that are not Lipschitz at 0 (there roundoff ahead of the front
    /// would otherwise grow to O(1) in finite time), 0 otherwise.
    std::optional<double> reaction_floor;

    [[nodiscard]] double dx() const { return (x_max - x_min) / static_cast<double>(nx - 1); }
    [[nodiscard]] double x(std::size_t i) const { return x_min + static_cast<double>(i) * dx(); }
};

inline void validate(const GridSpec& g) {
    if (g.nx < 64) throw std::invalid_argument("grid needs nx >= 64");
    if (!(g.x_max > g.x_min) || !std::isfinite(g.x_min) || !std::isfinite(g.x_max))
        throw std::invalid_argument("grid needs x_min < x_max");
    if (!(g.dt >= 0.0) || !(g.t_end >= 0.0) || !std::isfinite(g.t_end))
        throw std::invalid_argument("grid needs dt >= 0 and t_end >= 0");
}

class SimulationBlowUp : public std::runtime_error {
public:
    SimulationBlowUp(std::size_t step, const std::string& what) : std::runtime_error(what), step_(step) {}
    [[nodiscard]] std::size_t step_index() const { return step_; }

private:
    std::size_t step_;
};

namespace detail {

/// |d|^{k-2} d with exact fast paths for k = 2, 3, 4.
inline double signed_power(double d, double k) {
    if (k == 2.0) return d;
    const double a = std::abs(d);
    if (k == 3.0) return a * d;
    if (k == 4.0) return a * a * d;
    return std::pow(a, k - 2.0) * d;
}

inline double abs_power(double a, double e) {
    if (e == 0.0) return 1.0;
    if (e == 1.0) return a;
    if (e == 2.0) return a * a;
    return std::pow(a, e);
}

inline double flux(const OperatorSpec& op, double d) {
    const double fq = signed_power(d, op.q());
    switch (op.mode()) {
        case OperatorMode::cooperative: return signed_power(d, op.p()) + fq;
        case OperatorMode::competitive: return fq - signed_power(d, op.p());
        case OperatorMode::single_q: return fq;
    }
    return fq;
}

/// Largest local diffusivity (p-1)|D|^{p-2} + (q-1)|D|^{q-2} over the grid, floored at 1.
inline double max_diffusivity(const OperatorSpec& op, const std::vector<double>& u, double dx) {
    double dmax = 0.0;
    for (std::size_t i = 0; i + 1 < u.size(); ++i) dmax = std::max(dmax, std::abs(u[i + 1] - u[i]) / dx);
    double k = (op.q() - 1.0) * abs_power(dmax, op.q() - 2.0);
    if (op.mode() != OperatorMode::single_q) k += (op.p() - 1.0) * abs_power(dmax, op.p() - 2.0);
    return std::max(1.0, k);
}

}  // namespace detail

/// Whether f(s)/s is unbounded as s -> 0.
inline bool non_lipschitz_at_zero(const ReactionSpec& r) {
    if (r.is_power_family()) return r.gamma() < 1.0 && r.amplitude() > 0.0;
    const double H = r.H();
    return r(1e-6 * H) / (1e-6 * H) > 10.0 * r(1e-3 * H) / (1e-3 * H);
}

inline double reaction_floor(const GridSpec& g, const ReactionSpec& r) {
    return g.reaction_floor.value_or(non_lipschitz_at_zero(r) ? 1e-6 : 0.0);
}

inline double stable_dt(const OperatorSpec& op, const std::vector<double>& u, const GridSpec& g) {
    const double dx = g.dx();
    return 0.25 * dx * dx / detail::max_diffusivity(op, u, dx);
}

/// One explicit step of u_t = (flux(u_x))_x + f(u); end values stay pinned to 0 and H,
/// the result is clipped to [0, H]. Throws SimulationBlowUp on a non-finite value.
inline std::vector<double> step(const std::vector<double>& u, const OperatorSpec& op, const ReactionSpec& r,
                                const GridSpec& g, double dt, std::size_t step_index = 0) {
    const std::size_t n = u.size();
    if (n != g.nx) throw std::invalid_argument("step: state size does not match the grid");
    const double dx = g.dx();
    const double H = r.H();
    const double floor = reaction_floor(g, r) * H;
    std::vector<double> next(n);
    double left_flux = detail::flux(op, (u[1] - u[0]) / dx);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double right_flux = detail::flux(op, (u[i + 1] - u[i]) / dx);
        const double val = u[i] + dt * ((right_flux - left_flux) / dx + (u[i] > floor ? r(u[i]) : 0.0));
        if (!std::isfinite(val))
            throw SimulationBlowUp(step_index, "simulation blew up at step " + std::to_string(step_index) +
                                                   " (dt too large?)");
        next[i] = std::clamp(val, 0.0, H);
        left_flux = right_flux;
    }
    next.front() = 0.0;
    next.back() = H;
    return next;
}

struct Snapshot {
    double t;
    std::vector<double> u;
};

struct FrontTrack {
    std::vector<double> times;
    std::vector<double> positions;  ///< x where u first crosses H/2, scanning from the left
    std::optional<double> fitted_speed;  ///< invasion speed, -d(position)/dt over the second half
    std::optional<double> fit_residual;
};

enum class RunStatus { completed, boundary_contamination };

struct RunResult {
    RunStatus status = RunStatus::completed;
    std::vector<Snapshot> snapshots;
    FrontTrack track;
    double t_reached = 0.0;
    std::size_t steps = 0;
    double last_dt = 0.0;
};

/// Leftmost x with u(x) >= level, linearly interpolated; empty if u stays below.
inline std::optional<double> level_crossing(const std::vector<double>& u, const GridSpec& g, double level) {
    for (std::size_t i = 1; i < u.size(); ++i) {
        if (u[i] >= level && u[i - 1] < level) {
            const double w = (level - u[i - 1]) / (u[i] - u[i - 1]);
            return g.x(i - 1) + w * g.dx();
        }
    }
    return std::nullopt;
}

inline void fit_front_speed(FrontTrack& tr) {
    const std::size_t n = tr.times.size();
    if (n < 2) return;
    const double t_mid = 0.5 * (tr.times.front() + tr.times.back());
    std::vector<double> t, x;
    for (std::size_t i = 0; i < n; ++i)
        if (tr.times[i] >= t_mid) {
            t.push_back(tr.times[i]);
            x.push_back(tr.positions[i]);
        }
    if (t.size() < 2) return;
    const auto fit = detail::fit_line(t, x);
    tr.fitted_speed = -fit.slope;
    tr.fit_residual = fit.rms;
}

/// Advances `initial` to t_end. The H/2 level is tracked every snapshot_stride
/// steps; the run stops early, keeping what it has, when that level comes
/// within 10 nodes of either boundary.
inline RunResult run(std::vector<double> initial, const OperatorSpec& op, const ReactionSpec& r,
                     const GridSpec& g) {
    validate(g);
    if (initial.size() != g.nx) throw std::invalid_argument("run: initial data size does not match the grid");
    const double H = r.H();
    for (double v : initial)
        if (!(v >= 0.0 && v <= H)) throw std::invalid_argument("run: initial data must lie in [0, H]");

    RunResult res;
    std::vector<double> u = std::move(initial);
    const std::size_t stride = std::max<std::size_t>(1, g.snapshot_stride);
    const double margin = 10.0 * g.dx();

    auto record = [&](double t) {
        res.snapshots.push_back({t, u});
        if (const auto pos = level_crossing(u, g, 0.5 * H)) {
            if (*pos < g.x_min + margin || *pos > g.x_max - margin) {
                res.status = RunStatus::boundary_contamination;
                return false;
            }
            res.track.times.push_back(t);
            res.track.positions.push_back(*pos);
        }
        return true;
    };

    double t = 0.0;
    double dt = 0.0;
    bool alive = record(t);
    while (alive && t < g.t_end) {
        if (res.steps % 100 == 0) {
            dt = stable_dt(op, u, g);
            if (g.dt > 0.0) dt = std::min(dt, g.dt);
        }
        const double h = std::min(dt, g.t_end - t);
        u = step(u, op, r, g, h, res.steps);
        t += h;
        ++res.steps;
        res.last_dt = h;
        if (res.steps % stride == 0 || t >= g.t_end) alive = record(t);
    }
    res.t_reached = t;
    fit_front_speed(res.track);
    return res;
}

/// Samples a reconstructed profile on the grid with its H/2 level at x = x0,
/// oriented like the simulator (0 on the left, H on the right). Outside the
/// sampled span the tails are continued exponentially for q = 2, where they
/// decay exponentially; for q > 2 the fronts are compactly supported and the
/// equilibria are used.
inline std::vector<double> profile_initial_data(const WaveProfile& prof, const OperatorSpec& op, const GridSpec& g,
                                                double x0 = 0.0) {
    validate(g);
    if (prof.samples.size() < 2) throw std::invalid_argument("profile_initial_data: profile has fewer than 2 samples");
    std::vector<double> z, u;
    z.reserve(prof.samples.size());
    u.reserve(prof.samples.size());
    for (const auto& s : prof.samples) {
        z.push_back(s.z);
        u.push_back(s.u);
    }
    const detail::MonotoneCubic shape(std::move(z), std::move(u));
    const auto rates = op.q() == 2.0 ? tail_exponents(prof) : std::nullopt;
    const double H = prof.H;
    const double u_lo = prof.samples.front().u, u_hi = prof.samples.back().u;
    std::vector<double> out(g.nx);
    for (std::size_t i = 0; i < g.nx; ++i) {
        const double s = g.x(i) - x0;
        double v;
        if (s < shape.x_min())
            v = rates && rates->left > 0.0 ? u_lo * std::exp(rates->left * (s - shape.x_min())) : 0.0;
        else if (s > shape.x_max())
            v = rates && rates->right > 0.0 ? H - (H - u_hi) * std::exp(-rates->right * (s - shape.x_max())) : H;
        else
            v = shape(s);
        out[i] = std::clamp(v, 0.0, H);
    }
    out.front() = 0.0;
    out.back() = H;
    return out;
}

/// Heaviside data: 0 for x < x0, H from x0 on.
inline std::vector<double> step_initial_data(const GridSpec& g, double H, double x0 = 0.0) {
    validate(g);
    std::vector<double> out(g.nx);
    for (std::size_t i = 0; i < g.nx; ++i) out[i] = g.x(i) < x0 ? 0.0 : H;
    out.front() = 0.0;
    out.back() = H;
    return out;
}

}  // namespace pqfront
