#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "ineqforge/constants.hpp"

using namespace ineqforge;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorKind::ConfigError;
}

Measure1D coarse(const std::string& spec) {
    MeasureOptions o;
    o.resolution = 1024;
    return measure_from_spec(spec, o);
}

}  // namespace

TEST(Rothaus, Arithmetic) {
    EXPECT_EQ(rothaus_tight_constant(0, 0, 0), 0);
    EXPECT_EQ(rothaus_tight_constant(1, 0, 1), 32);
    EXPECT_EQ(rothaus_tight_constant(2, 3, 0.5), 64);
    EXPECT_EQ(kind_of([] { rothaus_tight_constant(-1, 0, 0); }), ErrorKind::NegativeConstant);
}

TEST(Rothaus, MonotoneInEachArgument) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0, 10);
    for (int k = 0; k < 300; ++k) {
        double a[3] = {U(rng), U(rng), U(rng)}, b[3] = {a[0], a[1], a[2]};
        int i = k % 3;
        b[i] = a[i] + U(rng);
        EXPECT_LE(rothaus_tight_constant(a[0], a[1], a[2]), rothaus_tight_constant(b[0], b[1], b[2]));
    }
}

TEST(LpDls, Arithmetic) {
    EXPECT_DOUBLE_EQ(lp_dls_poincare_constant(2, 0, 1, 0, 1).constant, 12);
    EXPECT_DOUBLE_EQ(lp_dls_poincare_constant(2, 4 * 1.5, 1, 0.5, 0).constant, 6);
    EXPECT_EQ(kind_of([] { lp_dls_poincare_constant(2, 1, 0, 0, 1); }), ErrorKind::DivisionByZero);
    auto F = log_generator();
    auto r = lp_dls_poincare_constant(2, 1, 1, 0, 1, &F);
    EXPECT_NEAR(r.r_defect, 1 - 1 / (4 * std::exp(4.0)), 1e-14);
    EXPECT_NEAR(r.r_local, 1 / (1 + 1 / 6.0), 1e-15);
    EXPECT_DOUBLE_EQ(r.r, std::max(r.r_local, r.r_defect));
}

TEST(LpDls, MonotoneInEachArgument) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(0.1, 5);
    for (int k = 0; k < 200; ++k) {
        double C = U(rng), K = U(rng), D = U(rng), M = U(rng), dc = U(rng);
        double base = lp_dls_poincare_constant(2, C, D, M, K).constant;
        EXPECT_LE(base, lp_dls_poincare_constant(2, C + dc, D, M, K).constant);
        EXPECT_LE(base, lp_dls_poincare_constant(2, C, D, M, K + dc).constant);
        EXPECT_GE(base, lp_dls_poincare_constant(2, C, D + dc, M, K).constant);
    }
}

TEST(Modified, Arithmetic) {
    TighteningInput in;
    in.d = 0;
    in.A = 2;
    EXPECT_DOUBLE_EQ(modified_tight_constant(in).multiplier, 4);
    // gamma = 2 d (A+1)^2 = 18, (A/(A-1))^2 = 4
    in.d = 1;
    in.D = 1;
    in.C_P = 1;
    auto r = modified_tight_constant(in);
    EXPECT_DOUBLE_EQ(r.gamma, 18);
    EXPECT_DOUBLE_EQ(r.multiplier, 4 + 18 + 4);
    EXPECT_EQ(r.hypothesis, "slope");
    in.A = 1 + 1e-14;
    EXPECT_EQ(kind_of([&] { modified_tight_constant(in); }), ErrorKind::BlowUp);
    TighteningInput s;
    s.phi2_max = 2;
    s.A = 3;
    s.C_P = 0.5;
    s.c_lower = 2;
    auto rs = modified_tight_constant(s);
    EXPECT_EQ(rs.hypothesis, "smooth");
    EXPECT_DOUBLE_EQ(rs.multiplier, 4 + 2 * 16 * 0.25);
}

TEST(Modified, OptimizedAIsNoWorseThanGrid) {
    TighteningInput in;
    in.d = 1;
    in.D = 0.5;
    in.m = std::exp(-1.0);
    in.C_P = 1;
    auto best = modified_tight_constant(in);
    for (double A : {1.1, 1.5, 2.0, 3.0, 5.0}) {
        in.A = A;
        EXPECT_LE(best.multiplier, modified_tight_constant(in).multiplier + 1e-12);
    }
}

TEST(Generators, LogData) {
    auto F = log_generator();
    EXPECT_NEAR(generator_m(F), std::exp(-1.0), 1e-9);
    EXPECT_NEAR(generator_d(F, 2.0), 1.0, 1e-3);
    EXPECT_NEAR(generalized_inverse_plus(F, 4.0), std::exp(4.0), 1e-10);
}

TEST(Spectral, KnownGaps) {
    EXPECT_NEAR(poincare_constant(measure_from_spec("gaussian")).constant, 1.0, 1e-6);
    // V'' = 2 for x^2: gap 2
    EXPECT_NEAR(poincare_constant(measure_from_spec("custom:x^2@[-inf,inf]")).constant, 0.5, 1e-6);
    // uniform on [0, pi]: Neumann gap 1
    EXPECT_NEAR(poincare_constant(measure_from_spec("custom:0@[0,3.141592653589793]")).constant, 1.0, 1e-6);
}

TEST(Spectral, BakryEmeryBound) {
    // V'' >= 0.7 gives C_P <= 1/0.7
    auto mu = measure_from_spec("custom:x^2/2 + 0.3*sin(x)@[-inf,inf]");
    double cp = poincare_constant(mu).constant;
    EXPECT_LE(cp, 1 / 0.7);
    EXPECT_GE(cp, 1.0 / 1.3);
    // variance of x gives a lower bound
    auto x = ScalarFunction::variable();
    EXPECT_GE(cp, poincare_ratio(mu, TestFunction(x - expectation(mu, x))) * 0 + variance(mu, x) / 1.0 - 1e-9);
}

TEST(Spectral, LocalKappaGrowsWithMass) {
    auto g = measure_from_spec("gaussian");
    double a = local_poincare_kappa(g, 0.5), b = local_poincare_kappa(g, 0.9);
    EXPECT_LT(a, b);
    EXPECT_LT(b, 1.0);
    // interval [-R, R] with mass 1/2: close to the uniform gap (2R/pi)^2
    double R = 0.6744897501960817;
    EXPECT_NEAR(a, std::pow(2 * R / kPi, 2), 0.05);
}

TEST(Estimate, GaussianLsiTilts) {
    auto g = coarse("gaussian");
    auto ineq = inequality_from_name("lsi");
    auto est = estimate_best_constant(g, ineq, {family_from_name("tilts", g, ineq)}, 60, 1);
    EXPECT_NEAR(est.report.C, 2.0, 1e-6);
    EXPECT_LE(est.report.C, 2 + 1e-6);
    EXPECT_EQ(est.family, "tilts");
}

TEST(Estimate, ExponentialBoundaryPoincare) {
    auto e = measure_from_spec("exponential");
    auto ineq = inequality_from_name("poincare0");
    auto est = estimate_best_constant(e, ineq, {family_from_name("tilts", e, ineq)}, 80, 1);
    EXPECT_GE(est.report.C, 3.9);
    EXPECT_LE(est.report.C, 4 + 1e-6);
}

TEST(Estimate, ConstantFamilyGivesZero) {
    auto g = coarse("gaussian");
    for (const char* name : {"lsi", "poincare"}) {
        auto ineq = inequality_from_name(name);
        auto est = estimate_best_constant(g, ineq, {family_from_name("constant", g, ineq)}, 10, 1);
        EXPECT_EQ(est.report.C, 0.0) << name;
    }
    EXPECT_EQ(kind_of([&] { estimate_best_constant(g, inequality_from_name("lsi"), {}, 10, 1); }), ErrorKind::EmptyFamily);
}

TEST(Estimate, CertifiedBoundsOverAllFamilies) {
    auto g = coarse("gaussian");
    auto ineq = inequality_from_name("lsi");
    std::vector<FunctionFamily> fams;
    for (const char* n : {"tilts", "bumps", "halflines", "hermite"}) fams.push_back(family_from_name(n, g, ineq));
    auto est = estimate_best_constant(g, ineq, fams, 40, 9);
    EXPECT_LE(est.report.C, 2 + 1e-6);
    EXPECT_GE(est.report.C, 1.99);
    auto p = inequality_from_name("poincare");
    std::vector<FunctionFamily> pf;
    for (const char* n : {"bumps", "hermite"}) pf.push_back(family_from_name(n, g, p));
    auto ep = estimate_best_constant(g, p, pf, 40, 9);
    EXPECT_LE(ep.report.C, 1 + 1e-6);
    EXPECT_GE(ep.report.C, 0.99);
}

TEST(Estimate, DeterministicForSeed) {
    auto g = coarse("gaussian");
    auto ineq = inequality_from_name("lsi");
    auto fams = std::vector<FunctionFamily>{family_from_name("bumps", g, ineq)};
    auto a = estimate_best_constant(g, ineq, fams, 30, 5);
    auto b = estimate_best_constant(g, ineq, fams, 30, 5);
    EXPECT_EQ(a.report.C, b.report.C);
    EXPECT_EQ(a.params, b.params);
}

TEST(Estimate, TalagrandGaussianBumps) {
    auto g = coarse("gaussian");
    auto ineq = inequality_from_name("talagrand");
    auto est = estimate_best_constant(g, ineq, {family_from_name("bumps", g, ineq)}, 30, 2, 3);
    EXPECT_LE(est.report.C, 2 + 1e-5);
    EXPECT_GT(est.report.C, 1.0);
}

TEST(Estimate, RothausEndToEnd) {
    auto mu = coarse("custom:x^2/2 + 0.3*sin(x)@[-inf,inf]");
    auto ineq = inequality_from_name("lsi");
    std::vector<FunctionFamily> fams;
    for (const char* n : {"tilts", "bumps", "hermite"}) fams.push_back(family_from_name(n, mu, ineq));
    // half the measured ratio as the energy constant, the defect measured against it
    double C = 0.5 * estimate_best_constant(mu, ineq, fams, 30, 3, 2).report.C;
    double D = 0;
    for (const auto& t : random_test_functions(mu, ineq, fams, 40, 8)) {
        auto s = inequality_sides(mu, ineq, t);
        D = std::max(D, (s.lhs - C * s.energy) / expectation(mu, t.f * t.f));
    }
    double E = poincare_constant(mu).constant;
    double K = rothaus_tight_constant(C, D, E);
    int checked = 0;
    for (const auto& t : random_test_functions(mu, ineq, fams, 100, 99)) {
        auto s = inequality_sides(mu, ineq, t);
        EXPECT_LE(s.lhs, K * s.energy + 1e-9) << t.label;
        ++checked;
    }
    EXPECT_EQ(checked, 100);
}
