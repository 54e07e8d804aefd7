#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ineqforge/special.hpp"

using namespace ineqforge;

TEST(CAlpha, BranchesAndExamples) {
    EXPECT_EQ(c_alpha(2.5, 0.0), 0.0);
    EXPECT_NEAR(c_alpha(3, 2), 17.0 / 6, 1e-15);
    EXPECT_DOUBLE_EQ(c_alpha(1.5, 0.5), 0.125);
    for (double a : {1.2, 1.5, 2.0, 3.0}) {
        EXPECT_LT(std::abs(c_alpha(a, std::nextafter(1.0, 0.0)) - c_alpha(a, std::nextafter(1.0, 2.0))), 1e-14);
        EXPECT_EQ(c_alpha(a, -1.7), c_alpha(a, 1.7));
    }
    EXPECT_THROW(c_alpha(1.0, 0.3), Error);
}

// c_alpha is comparable to min(t^2, |t|^alpha) for alpha in (1, 2].
TEST(CAlpha, ComparableToMinOfPowers) {
    for (double a : {1.1, 1.5, 2.0}) {
        double lo = kInf, hi = 0;
        for (int i = -4000; i <= 4000; ++i) {
            double t = std::pow(10.0, i / 1000.0);
            double r = c_alpha(a, t) / std::min(t * t, std::pow(t, a));
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        EXPECT_GT(lo, 0.0);
        EXPECT_LT(hi, 10.0);
    }
}

TEST(Conjugate, QuadraticIsSelfDual) {
    auto c = legendre_conjugate([](double x) { return x * x / 2; }, {-5, 5});
    for (double y : {-3.0, -0.5, 0.0, 1.0, 4.0}) EXPECT_NEAR(c(y), y * y / 2, 1e-10);
    EXPECT_NEAR(c.derivative()(2.0), 2.0, 1e-6);
}

TEST(Conjugate, PowerCostDualExponent) {
    for (double a : {1.5, 3.0}) {
        double b = dual_exponent(a);
        auto c = legendre_conjugate([a](double x) { return std::pow(std::abs(x), a) / a; }, {-2, 2});
        for (double y : {-4.0, -1.0, 0.3, 2.0, 5.0}) EXPECT_NEAR(c(y), std::pow(std::abs(y), b) / b, 1e-8);
    }
}

TEST(Conjugate, CAlphaConjugateIsCDualAlpha) {
    for (double a : {1.5, 2.0, 3.0}) {
        auto c = legendre_conjugate([a](double x) { return c_alpha(a, x); }, {-4, 4});
        double worst = 0;
        for (int i = -500; i <= 500; ++i) {
            double y = 5.0 * i / 500;
            worst = std::max(worst, std::abs(c(y) - c_alpha(dual_exponent(a), y)));
        }
        EXPECT_LT(worst, 1e-6) << a;
    }
}

TEST(Conjugate, BidualityReturnsTheCost) {
    auto c = [](double x) { return c_alpha(1.5, x); };
    auto cs = legendre_conjugate(c, {-4, 4}, 200);
    auto css = legendre_conjugate([cs](double y) { return cs(y); }, {-4, 4}, 200);
    for (double x : {-2.0, -0.7, 0.0, 0.4, 1.0, 2.5}) EXPECT_NEAR(css(x), c(x), 1e-6);
}

TEST(Conjugate, LinearCostHasNoInteriorMaximizer) {
    EXPECT_THROW(conjugate_at([](double x) { return x; }, 2.0, {-1, 1}), Error);
}

TEST(FTau, DefinitionsAndRanges) {
    for (double tau : {0.2, 0.5, 1.0}) EXPECT_NEAR(F_tau(tau, 1.0), 0.0, 1e-15);
    EXPECT_NEAR(F_tau(1.0, 3.0), std::log(4.0) - std::log(2.0), 1e-15);
    EXPECT_THROW(F_tau(1.5, 1.0), Error);
    EXPECT_THROW(F_tau(0.5, -1.0), Error);
}

TEST(FTau, SurrogateIsConcaveAndTangent) {
    for (double tau : {1.5, 2.0, 3.0}) {
        double ts = F_tau_tangent_point(tau);
        double h = std::pow(std::log1p(ts), tau);
        double slope = tau * std::pow(std::log1p(ts), tau - 1) / (1 + ts);
        EXPECT_NEAR(h / ts, slope, 1e-9 * slope);
        double prev_d = kInf;
        for (int i = 1; i < 2000; ++i) {
            double t = 0.01 * i;
            double d = F_tau_surrogate(tau, t + 0.01) - F_tau_surrogate(tau, t);
            EXPECT_LE(d, prev_d + 1e-12);
            EXPECT_GE(d, 0.0);
            prev_d = d;
        }
        EXPECT_EQ(F_tau_surrogate(tau, 0.0), 0.0);
    }
}

TEST(LAlpha, Examples) {
    for (double t : {0.1, 0.3, 0.6}) EXPECT_NEAR(L_alpha(1, t), std::min(t, 1 - t), 1e-15);
    EXPECT_NEAR(L_alpha(2, 0.1), 0.1 * std::sqrt(std::log(10.0)), 1e-15);
    EXPECT_NEAR(L_alpha(2, 0.1), 0.15174, 1e-5);
    EXPECT_NEAR(L_alpha(1.5, 0.2), L_alpha(1.5, 0.8), 1e-15);
    EXPECT_LT(L_alpha(2, 1e-12), 1e-10);
    EXPECT_THROW(L_alpha(2, 0.0), Error);
}

TEST(Specials, ZerosAndPositivity) {
    EXPECT_EQ(special::M(0), 0.0);
    EXPECT_EQ(special::S(0), 0.0);
    EXPECT_EQ(special::N(0), 0.0);
    for (double x : {-0.9, -0.3, 0.2, 1.0, 5.0}) {
        EXPECT_GT(special::M(x), 0.0);
        EXPECT_GT(special::S(x), 0.0);
        EXPECT_GT(special::N(x), 0.0);
    }
    EXPECT_THROW(special::M(-1.0), Error);
    for (int i = -900; i <= 900; ++i) {
        double x = i / 1000.0;
        EXPECT_GE(special::M(x), x * x / 4 - 1e-16);
    }
}

TEST(Specials, ConjugateOfMAtSlopeOfSIsS) {
    auto Mstar = legendre_conjugate([](double x) { return special::M(x); }, {-0.5, 5}, 400, {-1.0, kInf});
    for (double x : {0.5, 1.0, 2.0}) {
        double slope = 1 - std::exp(-x);
        EXPECT_NEAR(Mstar(slope), special::S(x), 1e-9);
    }
}

TEST(Specials, ExponentialCostConjugateClosedForm) {
    auto c = bl_exp_cost(0.4);
    for (double y : {-2.0, -0.3, 0.0, 0.3, 0.55}) {
        double num = conjugate_at([&](double x) { return c(x); }, y, {-5, 5}).value;
        EXPECT_NEAR(c.conjugate_value(y), num, 1e-9);
    }
    EXPECT_TRUE(std::isinf(c.conjugate_value(0.7)));
}

TEST(Smoothness, IdentityAtPEqualsTwo) {
    for (double x : {-1.0, 0.5, 3.0})
        for (double u : {-4.0, 0.0, 2.5}) EXPECT_NEAR(lp_smoothness_check(2, x, u), 0.0, 1e-12);
}

TEST(Smoothness, MarginMinimumAtUMinusTwo) {
    auto m = [](double u) { return lp_smoothness_check(1.5, 1.0, u); };
    double h = 1e-5;
    EXPECT_NEAR((m(-2 + h) - m(-2 - h)) / (2 * h), 0.0, 1e-8);
    EXPECT_NEAR(m(-2.0), 4 - 2 * 1.5, 1e-14);
}

TEST(Smoothness, DenseSweepStaysNonnegative) {
    for (double p : {1.2, 1.5, 2.0}) {
        double worst = kInf;
        for (double x : {-1.0, 1.0})
            for (int i = -10000; i <= 10000; ++i) worst = std::min(worst, lp_smoothness_check(p, x, i * 1e-3));
        EXPECT_GE(worst, -1e-12) << p;
    }
}

TEST(Young, GapIsNonnegative) {
    EXPECT_EQ(young_gap(quad_cost(), 0, 0, 1), 0.0);
    EXPECT_NEAR(young_gap(quad_cost(), 1, 1, 1), 0.0, 1e-15);
    auto c = power_cost(1.5);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3, 3), a(0.1, 3);
    double worst = kInf;
    for (int i = 0; i < 1000; ++i) worst = std::min(worst, young_gap(c, u(rng), u(rng), a(rng)));
    EXPECT_GE(worst, -1e-10);
}

TEST(CostSpec, ParsesAndFlags) {
    auto q = cost_from_spec("quad");
    EXPECT_TRUE(q.quadratic_near_zero && q.superlinear && q.strictly_convex && q.even);
    auto p1 = cost_from_spec("power:1");
    EXPECT_FALSE(p1.strictly_convex);
    EXPECT_FALSE(p1.superlinear);
    auto b = cost_from_spec("bl_exp:0.5");
    EXPECT_FALSE(b.even);
    auto cu = cost_from_spec("custom:x^2/2 + x^4");
    EXPECT_TRUE(cu.even && cu.superlinear && cu.quadratic_near_zero);
    EXPECT_THROW(cost_from_spec("custom:1 + x^2"), Error);
    EXPECT_THROW(cost_from_spec("calpha:0.5"), Error);
    EXPECT_THROW(cost_from_spec("nope"), Error);
}

TEST(Generators, PhiOfLogIsExponential) {
    auto g = log_generator();
    EXPECT_DOUBLE_EQ(phi_from_generator(g, 2.0).log_value, 2.0);
    // numeric path against the closed form: custom log generator
    auto h = generator_from_spec("custom:log(x)");
    for (double t : {0.5, 2.0, 10.0}) {
        auto p = phi_from_generator(h, t);
        ASSERT_TRUE(p.finite);
        EXPECT_NEAR(p.log_value, t, 1e-8);
    }
    auto ft = F_tau_generator(0.5);
    EXPECT_TRUE(phi_from_generator(ft, 3.0).finite);
    EXPECT_THROW(generator_from_spec("custom:x"), Error);
}
