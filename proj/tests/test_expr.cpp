#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ineqforge/expr.hpp"

using namespace ineqforge;

TEST(Expr, ParsesArithmeticWithPrecedence) {
    auto f = ScalarFunction::parse("1 + 2*x^2 - x/4");
    EXPECT_DOUBLE_EQ(f(3.0), 1 + 18 - 0.75);
    EXPECT_DOUBLE_EQ(ScalarFunction::parse("-x^2")(3.0), -9.0);
    EXPECT_DOUBLE_EQ(ScalarFunction::parse("2^3^2")(0.0), 512.0);
}

TEST(Expr, FunctionsAndPiecewise) {
    auto f = ScalarFunction::parse("if(x < 1, x^2/2, abs(x)^3/3 + 1/6)");
    EXPECT_DOUBLE_EQ(f(0.5), 0.125);
    EXPECT_NEAR(f(2.0), 8.0 / 3 + 1.0 / 6, 1e-15);
    EXPECT_NEAR(ScalarFunction::parse("min(x, 2) + max(x, 2) + log(exp(x))")(5.0), 12.0, 1e-14);
    EXPECT_NEAR(ScalarFunction::parse("sin(pi/2) + cos(0) + sqrt(4) + tanh(0) + cosh(0)")(0.0), 5.0, 1e-15);
}

TEST(Expr, RejectsMalformedInput) {
    for (const char* s : {"", "x +", "foo(x)", "(x", "x)", "min(x)", "2 $ 3"}) {
        EXPECT_THROW(ScalarFunction::parse(s), Error) << s;
    }
}

TEST(Expr, PrintedFormRoundTrips) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3, 3);
    for (const char* s : {"x^2/2 + 0.3*sin(x)", "-(x - 1)^3", "if(x >= 0, exp(-x), 1 - x)", "abs(x)^1.5 - -2",
                          "max(x, -x)*min(1, x^2)"}) {
        auto f = ScalarFunction::parse(s);
        auto g = ScalarFunction::parse(f.to_string());
        for (int i = 0; i < 50; ++i) {
            double x = u(rng);
            EXPECT_EQ(f(x), g(x)) << s << " vs " << f.to_string();
        }
    }
}

// Symbolic derivative against a Richardson-extrapolated central difference.
TEST(Expr, DerivativeMatchesFiniteDifferences) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.2, 3);
    for (const char* s : {"x^2/2 + 0.3*sin(x)", "exp(-x^2)*cos(3*x)", "log(1 + x^2)/x", "x^x", "abs(x)^1.5",
                          "sqrt(1 + x)", "tanh(x)", "cosh(x/2)"}) {
        auto f = ScalarFunction::parse(s);
        auto df = f.derivative();
        for (int i = 0; i < 20; ++i) {
            double x = u(rng);
            double h = 1e-3;
            auto cd = [&](double hh) { return (f(x + hh) - f(x - hh)) / (2 * hh); };
            double fd = (4 * cd(h / 2) - cd(h)) / 3;
            EXPECT_NEAR(df(x), fd, 1e-7 * (1 + std::abs(fd))) << s << " at " << x;
        }
    }
}

TEST(Expr, KinksOfPiecewiseExpressions) {
    auto f = ScalarFunction::parse("abs(x - 0.3) + max(x, 1.7) + if(x - 2.5, 1, 0)");
    auto k = f.kinks(-5, 5);
    ASSERT_EQ(k.size(), 3u);
    EXPECT_NEAR(k[0], 0.3, 1e-13);
    EXPECT_NEAR(k[1], 1.7, 1e-13);
    EXPECT_NEAR(k[2], 2.5, 1e-13);
    EXPECT_TRUE(ScalarFunction::parse("x^2 + sin(x)").kinks(-5, 5).empty());
}

TEST(Expr, LongDoubleEvaluationAvoidsOverflow) {
    auto f = ScalarFunction::parse("exp(x)");
    EXPECT_TRUE(std::isinf(f(1000.0)));
    EXPECT_TRUE(std::isfinite(static_cast<double>(std::log(f(1000.0L)))));
}

TEST(Expr, NativeLeafWithSlope) {
    auto f = ScalarFunction::native({"cube", [](double x) { return x * x * x; }, [](double x) { return 3 * x * x; }, {}});
    auto g = f * ScalarFunction::parse("x");
    EXPECT_DOUBLE_EQ(g(2.0), 16.0);
    EXPECT_NEAR(g.derivative()(2.0), 32.0, 1e-12);
    auto h = ScalarFunction::native({"sq", [](double x) { return x * x; }, {}, {}});
    EXPECT_NEAR(h.derivative()(3.0), 6.0, 1e-9);
}
