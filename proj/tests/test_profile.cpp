#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "pqfront/profile.hpp"

using namespace pqfront;

namespace {

ReactionSpec fisher() { return ReactionSpec::classical_logistic(1.0, 2.0); }

WaveProfile make(const OperatorSpec& op, double c, const ProfileOptions& opt = {}) {
    const auto shoot = integrate_backward(op, fisher(), c);
    return reconstruct_profile(shoot, op, opt);
}

}  // namespace

TEST(Profile, DoubledOperatorMonotone) {
    const auto prof = make(OperatorSpec::cooperative(2, 2), 3.0);
    ASSERT_GT(prof.samples.size(), 10u);
    for (std::size_t i = 1; i < prof.samples.size(); ++i) {
        EXPECT_GT(prof.samples[i].z, prof.samples[i - 1].z);
        EXPECT_GT(prof.samples[i].u, prof.samples[i - 1].u);
    }
    EXPECT_LE(prof.samples.front().u, 1e-6);
    EXPECT_GE(prof.samples.back().u, 1.0 - 1e-6);
    EXPECT_EQ(prof.samples[prof.anchor_index].z, 0.0);
    EXPECT_EQ(prof.samples[prof.anchor_index].u, 0.5);
    EXPECT_FALSE(prof.truncated_by_cap);
    EXPECT_EQ(prof.z_span.first, prof.samples.front().z);
    EXPECT_EQ(prof.z_span.second, prof.samples.back().z);
}

TEST(Profile, HalfToleranceGivesSinglePoint) {
    ProfileOptions opt;
    opt.tail_tol = 0.5;
    const auto prof = make(OperatorSpec::cooperative(2, 2), 3.0, opt);
    ASSERT_EQ(prof.samples.size(), 1u);
    EXPECT_EQ(prof.samples[0].u, 0.5);
    EXPECT_EQ(prof.z_span.first, prof.z_span.second);
}

TEST(Profile, SlopeMatchesReconstructionOde) {
    const auto op = OperatorSpec::cooperative(4, 2);
    const auto shoot = integrate_backward(op, fisher(), 2.5);
    ProfileOptions opt;
    opt.max_dz = 1e-3;
    const auto prof = reconstruct_profile(shoot, op, opt);
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < prof.samples.size(); ++i) {
        const auto& a = prof.samples[i - 1];
        const auto& b = prof.samples[i + 1];
        const auto& m = prof.samples[i];
        if (m.u < 0.05 || m.u > 0.95) continue;
        if (std::abs((b.z - m.z) - (m.z - a.z)) > 1e-9) continue;
        const double fd = (b.u - a.u) / (b.z - a.z);
        worst = std::max(worst, std::abs(fd - m.du_dz) / m.du_dz);
    }
    EXPECT_LT(worst, 1e-6);
}

TEST(Profile, RoundTripToReducedVariable) {
    const auto op = OperatorSpec::cooperative(4, 2);
    const auto shoot = integrate_backward(op, fisher(), 2.5);
    const auto prof = reconstruct_profile(shoot, op);
    const auto& grid = shoot.samples;
    const double dv = 1.0 / (grid.size() - 1);
    for (const auto& s : prof.samples) {
        if (s.u < 0.05 || s.u > 0.95) continue;
        const auto k = static_cast<std::size_t>(s.u / dv);
        const double w = s.u / dv - k;
        const double y_shoot = (1 - w) * grid[k].y + w * grid[k + 1].y;
        EXPECT_NEAR(q_value(op, s.du_dz), y_shoot, 1e-4) << s.u;
    }
}

TEST(Profile, FisherLeftTailRate) {
    for (double c : {2.5, 3.0}) {
        const auto prof = make(OperatorSpec::single_q(2), c);
        const auto rates = tail_exponents(prof);
        ASSERT_TRUE(rates);
        const double ref = oracle::fisher_left_rate(c);
        EXPECT_NEAR(rates->left, ref, 0.05 * ref) << c;
        EXPECT_GT(rates->right, 0.0);
    }
}

TEST(Profile, CoarseToleranceHasNoTailRates) {
    ProfileOptions opt;
    opt.tail_tol = 1e-2;
    EXPECT_FALSE(tail_exponents(make(OperatorSpec::single_q(2), 3.0, opt)).has_value());
}

TEST(Profile, RefusesInadmissibleShoot) {
    const auto op = OperatorSpec::cooperative(4, 2);
    const auto shoot = integrate_backward(op, fisher(), 1.0);
    EXPECT_THROW(reconstruct_profile(shoot, op), ProfileRefused);
}

TEST(Profile, RejectsBadOptions) {
    const auto op = OperatorSpec::cooperative(2, 2);
    const auto shoot = integrate_backward(op, fisher(), 3.0);
    ProfileOptions opt;
    opt.tail_tol = 0.7;
    EXPECT_THROW(reconstruct_profile(shoot, op, opt), std::invalid_argument);
    opt.tail_tol = 1e-6;
    opt.anchor = 1.0;
    EXPECT_THROW(reconstruct_profile(shoot, op, opt), std::invalid_argument);
}

TEST(Profile, CompactSupportForDegenerateDiffusion) {
    const auto op = OperatorSpec::cooperative(3, 3);
    const auto r = ReactionSpec::power_logistic(1.0, 0.5, 1.0, 1.5);
    const auto shoot = integrate_backward(op, r, 3.0);
    ASSERT_EQ(shoot.classification, Classification::admissible);
    const auto prof = reconstruct_profile(shoot, op);
    EXPECT_FALSE(prof.truncated_by_cap);
    EXPECT_LT(prof.z_span.second - prof.z_span.first, 100.0);
    for (std::size_t i = 1; i < prof.samples.size(); ++i) EXPECT_GT(prof.samples[i].u, prof.samples[i - 1].u);
}
