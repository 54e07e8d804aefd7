#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ineqforge/criteria.hpp"

using namespace ineqforge;

namespace {

ScalarFunction P(const char* s) { return ScalarFunction::parse(s); }

void expect_witness(const CriterionVerdict& v, double tol = 1e-9) {
    ASSERT_EQ(v.holds, Holds::No) << v.name;
    ASSERT_FALSE(v.witness.empty()) << v.name;
    EXPECT_GT(static_cast<double>(v.reverify()), tol) << v.name << " " << v.detail;
}

}  // namespace

TEST(Defect, Examples) {
    EXPECT_DOUBLE_EQ(convexity_defect(P("x^4"), 1, -1), -8);
    for (double x : {-2.0, 0.3, 1.7})
        for (double y : {-1.0, 0.0, 2.5}) {
            EXPECT_NEAR(convexity_defect(P("-x^2/2"), x, y), (y - x) * (y - x) / 2, 1e-12);
            EXPECT_NEAR(convexity_defect(P("3*x^2 + x"), x, y), -3 * (y - x) * (y - x), 1e-11);
        }
}

TEST(Defect, NonPositiveForConvexPotentials) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(-5, 5);
    for (const char* s : {"x^4 + x^2", "cosh(x)", "abs(x)^1.5", "exp(x) + x^2/2 - cos(x)/2"}) {
        auto V = P(s);
        auto [x, m] = min_second_derivative(V);
        (void)x;
        ASSERT_GE(m, -1e-9) << s;
        for (int k = 0; k < 500; ++k) {
            double a = U(rng), b = U(rng);
            if (a == 0) continue;
            EXPECT_LE(convexity_defect(V, a, b), 1e-9 * (1 + std::abs(V(a)) + std::abs(V(b)))) << s;
        }
    }
}

TEST(Defect, DominatedExamples) {
    auto c = quad_cost();
    EXPECT_EQ(defect_dominated_by(P("x^2/2 - cos(x)"), c, 0.0).holds, Holds::Yes);
    EXPECT_EQ(defect_dominated_by(P("-x^2/2 + x^4"), c, 1.0).holds, Holds::Yes);
    EXPECT_EQ(defect_dominated_by(P("x^2"), c, 0.0).holds, Holds::Yes);
    auto bad = defect_dominated_by(P("-x^2/2 + x^4"), c, 0.5);
    expect_witness(bad);
}

TEST(Defect, CertifiesMinusMinSecondDerivative) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> A(0.05, 1.0), B(-2.0, 2.0);
    auto c = quad_cost();
    for (int k = 0; k < 10; ++k) {
        double a4 = A(rng), a3 = B(rng), a2 = B(rng) - 1.5, a1 = B(rng);
        char buf[160];
        std::snprintf(buf, sizeof buf, "%.17g*x^4 + %.17g*x^3 + %.17g*x^2 + %.17g*x", a4, a3, a2, a1);
        // V'' = 12 a4 x^2 + 6 a3 x + 2 a2, minimum at x = -a3/(4 a4)
        double xm = -a3 / (4 * a4);
        double lam = std::max(0.0, -(12 * a4 * xm * xm + 6 * a3 * xm + 2 * a2));
        ScanOptions o;
        o.range = {-4, 4};
        auto v = defect_dominated_by(P(buf), c, lam, o);
        EXPECT_EQ(v.holds, Holds::Yes) << buf << " lambda=" << lam;
        if (lam > 0.05) expect_witness(defect_dominated_by(P(buf), c, 0.8 * lam, o));
    }
}

TEST(Defect, LpSmoothnessConsistency) {
    // V + lambda |x|^p convex gives D_V(x, y) <= lambda 2^{2-p} |y - x|^p
    for (double p : {1.3, 1.6, 2.0}) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "x^2/4 - 0.7*abs(x)^%g", p);
        auto V = P(buf);
        auto x = ScalarFunction::variable();
        CostFunction c = custom_cost("abs(x)^" + std::to_string(p));
        ScanOptions o;
        o.range = {-5, 5};
        o.base = 1024;
        auto v = defect_dominated_by(V, c, 0.7 * std::pow(2.0, 2 - p), o);
        EXPECT_EQ(v.holds, Holds::Yes) << p << " " << v.detail << " " << v.params["min_margin"];
    }
}

TEST(Wang, GaussianMatrix) {
    auto g = measure_from_spec("gaussian");
    EXPECT_EQ(wang_checker(g, 0, 0.5).holds, Holds::Yes);
    auto no = wang_checker(g, 0, 1.5);
    expect_witness(no, 1e-3);
    auto s = measure_from_spec("custom:x^2/2 + sin(x)@[-inf,inf]");
    expect_witness(wang_checker(s, 1.0, 0.1), 1e-3);
    // V'' = 1 - sin x dips to 0, so lambda = -0.5 fails the Hessian scan
    expect_witness(wang_checker(s, -0.5, 0.1));
}

TEST(WeakConvexity, Matrix) {
    auto g = measure_from_spec("gaussian");
    auto no = weak_convexity_iso_checker(g, quad_cost(), 0.1);
    expect_witness(no, 0.0);
    auto c0 = custom_cost("0*x");
    EXPECT_EQ(weak_convexity_iso_checker(measure_from_spec("laplace"), c0, 0.1).holds, Holds::Yes);
    // heavier tails than the cost: integrable for every beta
    // V'' >= -4 gives the defect bound 2u^2; cubic tails beat every beta
    auto m = measure_from_spec("custom:abs(x)^3 - 2*x^2@[-inf,inf]");
    for (double eps : {0.5, 10.0}) {
        auto v = weak_convexity_iso_checker(m, custom_cost("2*x^2 + abs(x)^2.5"), eps);
        EXPECT_EQ(v.holds, Holds::Yes) << v.detail;
    }
}

TEST(Perturbation, Matrix) {
    auto g = measure_from_spec("gaussian");
    auto zero = ScalarFunction::constant(0);
    EXPECT_EQ(perturbation_checker(g, P("x^2/2"), zero, zero, 0.1).holds, Holds::Yes);
    EXPECT_EQ(perturbation_checker(g, P("x^2/2"), P("0.2*sin(x)"), P("x^2/2"), 0.1).holds, Holds::Yes);
    // a bounded non-constant V1 + p has an infinite conjugate off zero
    try {
        perturbation_checker(g, P("x^2/2"), P("0.2*sin(x)"), ScalarFunction::constant(1), 0.1);
        ADD_FAILURE() << "expected a conjugate window error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::WindowTooSmall);
    }
    EXPECT_EQ(perturbation_checker(g, P("x^2/4"), P("x^2/4"), zero, 0.1).holds, Holds::Yes);
    expect_witness(perturbation_checker(g, P("-x^2"), zero, zero, 0.1));
}

TEST(Pcp, Matrix) {
    auto v0 = pcp_checker(P("abs(x)^1.5/1.5"), 1.5, 1.0);
    EXPECT_EQ(v0.holds, Holds::Yes);
    EXPECT_NEAR(v0.params["delta"], 0.0, 1e-12);
    auto vs = pcp_checker(P("abs(x)^1.5/1.5 + sin(x)"), 1.5, 1.0);
    EXPECT_EQ(vs.holds, Holds::Yes) << vs.params["delta"];
    EXPECT_LE(vs.params["C"], 1.0 + 1e-9);
    // V1' = 0.9 sign(x) |x|^{1/2}
    auto bad = pcp_checker(P("abs(x)^1.5/1.5 + 0.6*abs(x)^1.5"), 1.5, 1.0);
    expect_witness(bad);
    EXPECT_GT(bad.params["delta"], 1.5 / 3.5);
    auto scaled = pcp_checker(P("3*abs(x)^1.5/1.5 + 3*sin(x)"), 1.5, 3.0);
    EXPECT_EQ(scaled.holds, Holds::Yes);
}

TEST(Lyapunov, Examples) {
    auto x = ScalarFunction::variable();
    auto v = lyapunov_checker(P("x^2/2"), x, 1.0, 0.5, 0, LyapunovVariant::Drift);
    EXPECT_EQ(v.holds, Holds::Yes);
    EXPECT_NEAR(v.params["C"], 1.0, 1e-9);
    auto radial = lyapunov_checker(P("x^2 + abs(x)^1.5 + 3"), x, 1.0, 0, 0, LyapunovVariant::Growth);
    EXPECT_EQ(radial.holds, Holds::Yes);
    EXPECT_NEAR(radial.params["C"], 3.0, 1e-9);
    // smooth stand-in for |x|^1.5, whose V'' is singular at 0
    auto h = lyapunov_checker(P("(1 + x^2)^0.75"), x, 0.5, 0.5, 2.0 / 3, LyapunovVariant::Hessian);
    EXPECT_EQ(h.holds, Holds::Yes) << h.detail;
    // s = 2 beats (1 - t) 2.25 = 1.125 at infinity
    expect_witness(lyapunov_checker(P("(1 + x^2)^0.75"), x, 2.0, 0.5, 2.0 / 3, LyapunovVariant::Hessian));
    expect_witness(lyapunov_checker(P("x^2/2"), x, 1.5, 0.5, 0, LyapunovVariant::Drift));
    double s0 = largest_verified_s0(P("(1 + x^2)^0.75"), 0.5, 2.0 / 3, {0.25, 0.5, 1.0, 1.1, 1.2, 2.0});
    EXPECT_DOUBLE_EQ(s0, 1.1);
}

TEST(HessianGrowth, Examples) {
    auto q = hessian_lower_with_growth(measure_from_spec("custom:x^4@[-inf,inf]"), 2.0, 0.1);
    EXPECT_EQ(q.holds, Holds::Yes);
    EXPECT_NEAR(q.params["K"], 0.0, 1e-9);
    EXPECT_NEAR(q.params["L"], 0.0, 1e-9);
    EXPECT_NEAR(q.params["q"], 4.0 / 3, 1e-15);
    auto d = hessian_lower_with_growth(measure_from_spec("custom:x^4 - 3*x^2@[-inf,inf]"), 2.0, 0.1, std::nullopt, 0.0);
    EXPECT_EQ(d.holds, Holds::Yes);
    EXPECT_NEAR(d.params["K"], 6.0, 1e-6);
    expect_witness(hessian_lower_with_growth(measure_from_spec("custom:x^4 - 3*x^2@[-inf,inf]"), 2.0, 0.1, 5.0, 0.0),
                   1e-6);
    // negative part growing like x^2 needs L > 0; the integrability then fails for x^4 tails
    auto g = hessian_lower_with_growth(measure_from_spec("custom:x^4/12 - x^4*sin(x^2)/24@[-inf,inf]"), 2.0, 0.1);
    EXPECT_GT(g.params["L"], 0.0);
}
