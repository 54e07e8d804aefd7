#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ineqforge/measure.hpp"

using namespace ineqforge;

namespace {
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
}  // namespace

TEST(Measure, NormalizersOfNamedMeasures) {
    EXPECT_NEAR(measure_from_spec("gaussian").normalizer(), std::sqrt(2 * kPi), 1e-12);
    EXPECT_NEAR(measure_from_spec("exponential").normalizer(), 1.0, 1e-12);
    EXPECT_NEAR(measure_from_spec("laplace").normalizer(), 2.0, 1e-12);
    for (double a : {1.0, 1.5, 2.0, 3.0})
        EXPECT_NEAR(measure_from_spec("exp_alpha:" + std::to_string(a)).normalizer(), 2 * std::tgamma(1 + 1 / a), 1e-10);
    auto u = measure_from_spec("custom:0@[0,1]");
    EXPECT_NEAR(u.normalizer(), 1.0, 1e-14);
}

TEST(Measure, GaussianCdfAndQuantile) {
    auto g = measure_from_spec("gaussian");
    for (double x : {-8.0, -3.0, -0.5, 0.0, 0.7, 2.0, 5.0})
        EXPECT_NEAR(g.cdf(x), normal_cdf(x), 1e-13 + 1e-10 * normal_cdf(x));
    EXPECT_NEAR(g.sf(8.0), 0.5 * std::erfc(8.0 / std::sqrt(2.0)), 1e-10 * 6.2e-16);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    double worst = 0;
    for (int i = 0; i < 500; ++i) {
        double t = u(rng);
        worst = std::max(worst, std::abs(g.cdf(g.quantile(t)) - t));
    }
    EXPECT_LT(worst, 1e-12);
    EXPECT_NEAR(g.quantile(0.975), 1.959963984540054, 1e-10);
    EXPECT_THROW(g.quantile(1.2), Error);
}

TEST(Measure, TailQuantilesKeepRelativePrecision) {
    auto e = measure_from_spec("exponential");
    for (double s : {1e-5, 1e-12, 1e-20}) EXPECT_NEAR(e.quantile_sf(s), -std::log(s), 1e-9 * -std::log(s));
    for (double t : {1e-5, 1e-12}) EXPECT_NEAR(e.quantile(t), -std::log1p(-t), 1e-9 * t);
}

TEST(Measure, ConditioningHalvesGaussianNormalizer) {
    auto g = measure_from_spec("gaussian");
    auto h = condition(g, {{0.0, kInf}});
    EXPECT_NEAR(h.normalizer(), std::sqrt(2 * kPi) / 2, 1e-12);
    EXPECT_NEAR(h.cdf(1.0), 2 * (normal_cdf(1.0) - 0.5), 1e-12);
    EXPECT_THROW(condition(g, {{100.0, 101.0}}), Error);
}

TEST(Measure, GapInSupportHasFlatCdfAndTwoQuantiles) {
    auto g = measure_from_spec("gaussian");
    auto two = condition(g, {{-kInf, -1.0}, {1.0, kInf}});
    EXPECT_NEAR(two.cdf(0.0), 0.5, 1e-13);
    EXPECT_NEAR(two.quantile(0.5, QuantileSide::Lower), -1.0, 1e-12);
    EXPECT_NEAR(two.quantile(0.5, QuantileSide::Upper), 1.0, 1e-12);
}

TEST(Measure, RejectsBadInput) {
    EXPECT_THROW(measure_from_spec("custom:x@[1,0]"), Error);
    EXPECT_THROW(measure_from_spec("custom:log(1+x^2)/2@[-inf,inf]"), Error);
    EXPECT_THROW(measure_from_spec("custom:-x@[0,inf]"), Error);
    EXPECT_THROW(measure_from_spec("nonsense"), Error);
    try {
        measure_from_spec("custom:0.5*log(1+x^2)@[-inf,inf]");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonIntegrablePotential);
    }
}

TEST(Measure, MomentsAgainstClosedForms) {
    auto g = measure_from_spec("gaussian");
    EXPECT_NEAR(static_cast<double>(g.integrate([](long double x) { return x * x * x * x; })), 3.0, 1e-12);
    auto e = measure_from_spec("exponential");
    EXPECT_NEAR(static_cast<double>(e.integrate([](long double x) { return x * x; })), 2.0, 1e-12);
    auto l = measure_from_spec("laplace");
    EXPECT_NEAR(static_cast<double>(l.integrate([](long double x) { return std::abs(x); })), 1.0, 1e-12);
}

// Integrands that outgrow the truncation window are followed into the tail.
TEST(Measure, HeavyIntegrandsUseTailShells) {
    auto e = measure_from_spec("exponential");
    double s = 0.499;
    auto v = e.integrate([&](long double t) {
        long double f = std::expm1(s * t);
        return f * f;
    });
    double exact = 1 / (1 - 2 * s) - 2 / (1 - s) + 1;
    EXPECT_NEAR(static_cast<double>(v), exact, 1e-6 * exact);
    auto g = measure_from_spec("gaussian");
    EXPECT_NEAR(static_cast<double>(g.integrate([](long double x) { return std::exp(6 * x); })), std::exp(18.0),
                1e-9 * std::exp(18.0));
}

TEST(Measure, KinksBecomePanelEdges) {
    auto m = measure_from_spec("custom:abs(x - 0.3) + if(x - 1, 2, 0)@[-inf,inf]");
    auto k = m.breakpoints();
    ASSERT_EQ(k.size(), 2u);
    // exact mass: integral of exp(-|x-0.3|) minus the jump beyond x = 1
    double z = 2 - std::exp(-0.7) * (1 - std::exp(-2.0));
    EXPECT_NEAR(m.normalizer(), z, 1e-12);
}

TEST(Measure, ReweightingByADensity) {
    auto g = measure_from_spec("gaussian");
    auto t = reweight(g, ScalarFunction::parse("exp(x - 0.5)"));
    EXPECT_NEAR(static_cast<double>(t.integrate([](long double x) { return x; })), 1.0, 1e-12);
    EXPECT_THROW(reweight(g, ScalarFunction::parse("x")), Error);
}

TEST(Measure, ExpDoubleIntegralGaussianClosedForm) {
    auto g = measure_from_spec("gaussian");
    auto quad = [](double u) { return u * u / 2; };
    auto r = exp_double_integral(g, quad, 0.4);
    ASSERT_TRUE(r.finite);
    EXPECT_NEAR(r.value, 1 / std::sqrt(1 - 2 * 0.4), 1e-7);
    EXPECT_FALSE(r.numeric_only);
    auto d = exp_double_integral(g, quad, 2.0);
    EXPECT_FALSE(d.finite);
    auto edge = exp_double_integral(g, quad, 0.5);
    EXPECT_FALSE(edge.finite);
    EXPECT_TRUE(edge.numeric_only);
    double prev = 0;
    for (double b : {0.05, 0.1, 0.2, 0.3, 0.45}) {
        auto v = exp_double_integral(g, quad, b);
        ASSERT_TRUE(v.finite);
        EXPECT_GT(v.value, prev);
        prev = v.value;
    }
}

TEST(Measure, ExpIntegrabilityProbe) {
    auto g = measure_from_spec("gaussian");
    auto fin = probe_exp_integral(g, [](long double x) { return 0.25L * x * x; });
    EXPECT_TRUE(fin.finite);
    EXPECT_NEAR(fin.value, std::sqrt(2.0), 1e-9);
    EXPECT_FALSE(probe_exp_integral(g, [](long double x) { return 0.75L * x * x; }).finite);
    auto num = probe_exp_integral(g, [](long double x) { return std::abs(x) * std::log1p(std::abs(x)); });
    EXPECT_TRUE(num.finite);
}
