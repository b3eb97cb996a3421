#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pqfront/detail/interp.hpp"
#include "pqfront/detail/ode.hpp"
#include "pqfront/diffusion_operator.hpp"
#include "pqfront/shooting.hpp"

namespace pqfront {

struct ProfileSample {
    double z;
    double u;
    double du_dz;
};

/// Traveling-wave profile u(z), z = x + ct, sampled in increasing z.
struct WaveProfile {
    double c = 0.0;
    double H = 1.0;
    std::vector<ProfileSample> samples;
    std::pair<double, double> z_span{0.0, 0.0};
    double tail_tol = 0.0;
    std::size_t anchor_index = 0;   ///< index of the sample at z = 0
    std::size_t clamped_negative = 0;  ///< interpolated y values below zero that were clamped
    bool truncated_by_cap = false;  ///< a tail did not reach its band before |z| = z_cap
};

struct ProfileOptions {
    double tail_tol = 1e-6;  ///< relative to H: stop once u <= tail_tol H or u >= (1 - tail_tol) H
    double anchor = 0.5;     ///< u(0) = anchor * H
    double z_cap = 1e4;
    double max_dz = 0.05;    ///< largest spacing between stored samples
    double rtol = 1e-10;
};

class ProfileRefused : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Integrates du/dz = R(y(u)) from u(0) = anchor H in both directions, with
/// y(u) a monotone cubic through the shoot's adaptive trajectory.
inline WaveProfile reconstruct_profile(const ShootOutcome& shoot, const OperatorSpec& op,
                                       const ProfileOptions& opt = {}) {
    if (shoot.classification != Classification::admissible)
        throw ProfileRefused("reconstruct_profile: shoot is not admissible");
    if (shoot.trajectory_v.size() < 2) throw ProfileRefused("reconstruct_profile: empty shoot");
    if (!(opt.tail_tol > 0.0 && opt.tail_tol <= 0.5)) throw std::invalid_argument("tail_tol must lie in ]0, 0.5]");
    if (!(opt.anchor > 0.0 && opt.anchor < 1.0)) throw std::invalid_argument("anchor must lie in ]0, 1[");

    const double H = shoot.H;
    WaveProfile prof;
    prof.c = shoot.c;
    prof.H = H;
    prof.tail_tol = opt.tail_tol;

    const detail::MonotoneCubic y_of_u(shoot.trajectory_v, shoot.trajectory_y);
    const auto lim = invertibility_limit(op);
    auto slope = [&](double u) {
        double y = y_of_u(std::clamp(u, 0.0, H));
        if (y < 0.0) {
            ++prof.clamped_negative;
            y = 0.0;
        }
        return r_inverse(op, std::min(y, lim.y_max));
    };

    const double u0 = opt.anchor * H;
    const double lo_band = opt.tail_tol * H;
    const double hi_band = (1.0 - opt.tail_tol) * H;
    const ProfileSample anchor{0.0, u0, slope(u0)};
    if (u0 <= lo_band || u0 >= hi_band) {
        prof.samples = {anchor};
        return prof;
    }

    detail::OdeSettings ode;
    ode.atol = 1e-14 * H;
    ode.rtol = opt.rtol;
    ode.h_max = opt.max_dz;

    auto sweep = [&](double z_end, auto&& done) {
        std::vector<ProfileSample> out;
        bool reached = false;
        detail::integrate_dopri([&](double, double u) { return slope(u); }, 0.0, u0, z_end, ode,
                                [&](double z, double u, double du) {
                                    if (z != 0.0) out.push_back({z, u, du});
                                    if (done(u)) {
                                        reached = true;
                                        return false;
                                    }
                                    return true;
                                });
        if (!reached) prof.truncated_by_cap = true;
        return out;
    };
    auto left = sweep(-opt.z_cap, [&](double u) { return u <= lo_band; });
    auto right = sweep(opt.z_cap, [&](double u) { return u >= hi_band; });

    prof.samples.reserve(left.size() + right.size() + 1);
    prof.samples.assign(left.rbegin(), left.rend());
    prof.anchor_index = prof.samples.size();
    prof.samples.push_back(anchor);
    prof.samples.insert(prof.samples.end(), right.begin(), right.end());
    prof.z_span = {prof.samples.front().z, prof.samples.back().z};
    return prof;
}

struct TailRates {
    double left;   ///< u ~ exp(left z) as z -> -inf
    double right;  ///< H - u ~ exp(-right z) as z -> +inf
};

/// Log-linear decay rates of both tails, fitted where the distance to the
/// equilibrium lies between tail_tol H and 1e-2 H. Empty when a tail has fewer
/// than five samples there or the profile was truncated above 1e-3.
inline std::optional<TailRates> tail_exponents(const WaveProfile& prof) {
    if (prof.tail_tol > 1e-3 || prof.samples.size() < 10) return std::nullopt;
    const double H = prof.H;
    std::vector<double> zl, ll, zr, lr;
    for (const auto& s : prof.samples) {
        if (s.u <= 1e-2 * H && s.u > 0.0) {
            zl.push_back(s.z);
            ll.push_back(std::log(s.u / H));
        }
        if (H - s.u <= 1e-2 * H && H - s.u > 0.0) {
            zr.push_back(s.z);
            lr.push_back(std::log((H - s.u) / H));
        }
    }
    if (zl.size() < 5 || zr.size() < 5) return std::nullopt;
    const auto fl = detail::fit_line(zl, ll);
    const auto fr = detail::fit_line(zr, lr);
    return TailRates{fl.slope, -fr.slope};
}

}  // namespace pqfront
