#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pqfront/bounds.hpp"

using namespace pqfront;

namespace {

double case_i(double p, double q, double L) { return std::pow(L, (q - 1) / q) * q / (q - 1) * std::pow(p + q - 2, 1 / q); }

}  // namespace

TEST(LowerBound, Examples) {
    EXPECT_NEAR(lower_bound(OperatorSpec::cooperative(4, 2), 1.0), 2.0, 1e-14);
    EXPECT_NEAR(lower_bound(OperatorSpec::cooperative(4, 2), 7.0), 2.0 * std::sqrt(7.0), 1e-13);
    EXPECT_NEAR(lower_bound(OperatorSpec::cooperative(2, 2), 1.0), 2.0 * std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(lower_bound(OperatorSpec::single_q(2), 1.0), 2.0, 1e-14);
    EXPECT_NEAR(lower_bound(OperatorSpec::cooperative(3, 3), 1.0),
                std::cbrt(2.0) * std::pow(1.5, 2.0 / 3.0) * std::cbrt(3.0), 1e-14);
}

TEST(LowerBound, UndefinedForDegenerateL0) {
    const auto op = OperatorSpec::cooperative(4, 2);
    EXPECT_THROW(lower_bound(op, 0.0), UndefinedBound);
    EXPECT_THROW(lower_bound(op, std::numeric_limits<double>::infinity()), UndefinedBound);
}

TEST(UpperBound, Examples) {
    const auto a = upper_bound_cplus(OperatorSpec::cooperative(4, 3), 6.0);
    EXPECT_EQ(a.which, UpperCase::ii);
    EXPECT_NEAR(a.value, 10.0, 1e-13);
    const auto b = upper_bound_cplus(OperatorSpec::cooperative(4, 2), 1.0);
    EXPECT_EQ(b.which, UpperCase::i);
    EXPECT_NEAR(b.value, 4.0, 1e-13);
    const auto c = upper_bound_cplus(OperatorSpec::cooperative(2, 2), 1.0);
    EXPECT_EQ(c.which, UpperCase::pq_equal);
    EXPECT_NEAR(c.value, 2.0 * std::sqrt(2.0), 1e-13);
    const auto d = upper_bound_cplus(OperatorSpec::cooperative(4, 3), 8.0);
    EXPECT_EQ(d.which, UpperCase::iii);
    EXPECT_THROW(upper_bound_cplus(OperatorSpec::competitive(4, 2), 1.0), std::invalid_argument);
}

TEST(UpperBound, EqualsLowerWhenHomogeneous) {
    for (double q : {2.0, 2.5, 3.0}) {
        const auto op = OperatorSpec::cooperative(q, q);
        EXPECT_NEAR(upper_bound_cplus(op, 1.7).value, lower_bound(op, 1.7), 1e-12);
        const auto sq = OperatorSpec::single_q(q);
        EXPECT_NEAR(upper_bound_cplus(sq, 1.7).value, lower_bound(sq, 1.7), 1e-12);
    }
}

// Case (i) at L+ = p+q-2 gives q(p+q-2)/(q-1); case (ii) is p(p+q-2)/(q-1).
// The closed form therefore jumps at the first junction unless p = q.
TEST(UpperBound, FirstJunctionJump) {
    const double p = 4, q = 3, s = p + q - 2;
    const auto op = OperatorSpec::cooperative(p, q);
    const auto at = upper_bound_cplus(op, s);
    const auto after = upper_bound_cplus(op, s * (1 + 1e-12));
    EXPECT_EQ(at.which, UpperCase::i);
    EXPECT_EQ(after.which, UpperCase::ii);
    EXPECT_NEAR(at.value, q * s / (q - 1), 1e-12);
    EXPECT_NEAR(after.value, p * s / (q - 1), 1e-12);
    EXPECT_NEAR(after.value - at.value, (p - q) * s / (q - 1), 1e-9);
}

TEST(UpperBound, SecondJunctionContinuous) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> qd(2.0, 4.0), gap(0.1, 3.0);
    for (int i = 0; i < 100; ++i) {
        const double q = qd(rng), p = q + gap(rng);
        const auto op = OperatorSpec::cooperative(p, q);
        const double j2 = (p - 1) / (q - 1) * (p + q - 2);
        const auto a = upper_bound_cplus(op, j2);
        const auto b = upper_bound_cplus(op, j2 * (1 + 1e-12));
        EXPECT_EQ(a.which, UpperCase::ii);
        EXPECT_EQ(b.which, UpperCase::iii);
        EXPECT_NEAR(a.value, b.value, 1e-9 * a.value) << p << " " << q;
    }
}

TEST(UpperBound, CasesCollapseAtPEqualsQ) {
    for (double q : {2.0, 3.0}) {
        const double pq = upper_bound_cplus(OperatorSpec::cooperative(q, q), 1.3).value;
        EXPECT_NEAR(case_i(q, q, 1.3), pq, 1e-12);
        // case (iii) written with p = q
        const double iii = std::pow(1.3, (q - 1) / q) * q / (std::pow(q - 1, 1 / q) * std::pow(q - 1, (q - 1) / q)) *
                           std::pow(2 * q - 2, 1 / q);
        EXPECT_NEAR(iii, pq, 1e-12);
    }
}

TEST(GScript, Examples) {
    const auto op = OperatorSpec::cooperative(4, 3);
    EXPECT_NEAR(g_script(op, 6.0, 10.0, 1.0), -1.5, 1e-14);
    EXPECT_NEAR(g_script(op, 6.0, 10.0, 1e-14), 6.0, 1e-12);
    const double ci = case_i(4, 3, 6);
    EXPECT_NEAR(ci, 8.4693, 1e-4);
    for (int k = 1; k <= 4000; ++k) EXPECT_GT(g_script(op, 6.0, ci, k * 1e-3), 0.0);
}

TEST(MinimizeG, AgreesWithBruteForce) {
    for (auto [p, q, L, c] : std::vector<std::tuple<double, double, double, double>>{
             {4, 3, 6, 8.4693}, {4, 3, 6, 10}, {4, 2, 1, 3}, {5, 2, 2, 5}, {3, 3, 1, 3}, {6, 2.5, 0.5, 2}}) {
        const auto op = OperatorSpec::cooperative(p, q);
        const auto m = minimize_g(op, L, c);
        EXPECT_NEAR(m.value, oracle::min_G(p, q, L, c), 1e-8) << p << " " << q << " " << L << " " << c;
    }
    const auto sq = OperatorSpec::single_q(2.0);
    EXPECT_NEAR(minimize_g(sq, 1.0, 2.0).value, oracle::min_G(2, 2, 1, 2, 10, false), 1e-10);
}

TEST(NumericCplus, FigureOneRange) {
    const auto v = numeric_cplus(OperatorSpec::cooperative(4, 3), 6.0);
    ASSERT_TRUE(v);
    EXPECT_GT(*v, case_i(4, 3, 6));
    EXPECT_LE(*v, 10.0);
    EXPECT_NEAR(*v, oracle::cplus_by_brute_force(4, 3, 6, 8, 10), 1e-5);
}

TEST(NumericCplus, HomogeneousIsExact) {
    const auto v = numeric_cplus(OperatorSpec::cooperative(2, 2), 1.0);
    ASSERT_TRUE(v);
    EXPECT_NEAR(*v, 2 * std::sqrt(2.0), 1e-5);
}

TEST(NumericCplus, NeverAboveAnalytic) {
    const auto v = numeric_cplus(OperatorSpec::cooperative(4, 2), 1.0);
    ASSERT_TRUE(v);
    EXPECT_LE(*v, 4.0 + 1e-9);
    EXPECT_GE(*v, 2.0);
    EXPECT_NEAR(*v, oracle::cplus_by_brute_force(4, 2, 1, 2, 4), 1e-5);
}

TEST(CompetitiveBounds, Examples) {
    const auto a = competitive_bounds(OperatorSpec::competitive(4, 2), 1.0, 1.0);
    EXPECT_NEAR(a.c_lower, 2.0, 1e-14);
    EXPECT_NEAR(a.c_upper_for_cstar, 2.0, 1e-14);
    EXPECT_NEAR(a.c_max, 2.0 / std::sqrt(3.0), 1e-14);
    EXPECT_TRUE(a.window_empty);
    const auto b = competitive_bounds(OperatorSpec::competitive(3, 2), 1.0, 1.0);
    EXPECT_NEAR(b.c_max, 1.0, 1e-14);
    EXPECT_TRUE(b.window_empty);
    const auto c = competitive_bounds(OperatorSpec::competitive(4, 2), 1e-12, 1.0);
    EXPECT_LT(c.c_lower, 1e-5);
    EXPECT_THROW(competitive_bounds(OperatorSpec::cooperative(4, 2), 1, 1), std::invalid_argument);
}

TEST(CompetitiveBounds, NoCertificateBeyondCap) {
    EXPECT_FALSE(numeric_cplus(OperatorSpec::competitive(4, 2), 1.0).has_value());
    const auto small = numeric_cplus(OperatorSpec::competitive(4, 2), 0.1);
    ASSERT_TRUE(small);
    EXPECT_NEAR(*small, 2 * std::sqrt(0.1), 1e-5);
}

TEST(BoundSet, FromReaction) {
    const auto b = compute_bounds(OperatorSpec::cooperative(4, 2), ReactionSpec::classical_logistic(7.0, 2.0));
    ASSERT_TRUE(b.lower && b.upper_analytic && b.upper_numeric);
    EXPECT_NEAR(*b.lower, 2 * std::sqrt(7.0), 1e-9);
    EXPECT_LE(*b.lower, *b.upper_numeric);
    EXPECT_LE(*b.upper_numeric, *b.upper_analytic + 1e-9);
    const auto comp = compute_bounds(OperatorSpec::competitive(4, 2), ReactionSpec::classical_logistic(1.0, 2.0));
    EXPECT_TRUE(comp.competitive_window_empty);
    EXPECT_NEAR(*comp.competitive_c_max, 2 / std::sqrt(3.0), 1e-12);
}

TEST(Bounds, RandomizedOrdering) {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> qd(2.0, 4.0), gap(0.0, 3.0), ld(-2.0, 2.0);
    for (int i = 0; i < 150; ++i) {
        const double q = qd(rng), p = q + gap(rng), L = std::pow(10.0, ld(rng));
        const auto op = OperatorSpec::cooperative(p, q);
        const double lo = lower_bound(op, L);
        const double up = upper_bound_cplus(op, L).value;
        const auto num = numeric_cplus(op, L);
        ASSERT_TRUE(num);
        EXPECT_LE(lo, *num + 1e-9) << p << " " << q << " " << L;
        EXPECT_LE(*num, up * (1 + 1e-9)) << p << " " << q << " " << L;
        EXPECT_LE(minimize_g(op, L, up).value, 1e-9 * std::max(1.0, L)) << p << " " << q << " " << L;
    }
}
