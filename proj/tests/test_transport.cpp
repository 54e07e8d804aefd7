#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ineqforge/transport.hpp"

using namespace ineqforge;

namespace {

const Measure1D& gauss() {
    static Measure1D m = measure_from_spec("gaussian");
    return m;
}
const Measure1D& expo() {
    static Measure1D m = measure_from_spec("exponential");
    return m;
}

ScalarFunction m_a_ratio(double a) {
    auto x = ScalarFunction::variable();
    return ScalarFunction::if_nonneg(x - a, exp(a * x - a * a / 2),
                                     ScalarFunction::if_nonneg(-a - x, exp(-a * x - a * a / 2), ScalarFunction::constant(0)));
}

ScalarFunction unit_mass(const Measure1D& mu, const ScalarFunction& f) { return f / expectation(mu, f); }

// Sorted-atom matching: exact optimal cost between two empirical measures
// with equal weights for a convex cost of the difference.
template <class C>
double sorted_atom_cost(std::vector<double> a, std::vector<double> b, C c) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += c(b[i] - a[i]);
    return s / a.size();
}

std::vector<double> quantile_atoms(const Measure1D& mu, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(mu.quantile((i + 0.5) / n));
    return out;
}

}  // namespace

TEST(Coupling, IdentityPlan) {
    auto plan = quantile_coupling(gauss(), gauss(), 2048);
    double worst_theta = 0, worst_dT = 0;
    for (std::size_t i = 0; i < plan.size(); ++i) {
        worst_theta = std::max(worst_theta, std::abs(plan.theta[i]));
        worst_dT = std::max(worst_dT, std::abs(plan.dT[i] - 1));
    }
    EXPECT_LT(worst_theta, 1e-12);
    EXPECT_LT(worst_dT, 1e-12);
    EXPECT_NEAR(transport_cost(plan, quad_cost()), 0.0, 1e-20);
}

TEST(Coupling, GaussianToTwoSidedShift) {
    for (double a : {0.5, 1.0, 2.0}) {
        auto plan = quantile_coupling(gauss(), m_a_ratio(a), ScalarFunction::constant(1.0), 4096);
        (void)plan;
        auto p = quantile_coupling(gauss(), reweight(gauss(), m_a_ratio(a)), 4096);
        double worst = 0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            double want = p.x[i] < 0 ? p.x[i] - a : p.x[i] + a;
            if (gauss().cdf(p.x[i]) > 1e-12 && gauss().sf(p.x[i]) > 1e-12) worst = std::max(worst, std::abs(p.T[i] - want));
        }
        EXPECT_LT(worst, 1e-8) << a;
        auto x = ScalarFunction::variable();
        EXPECT_NEAR(transport_cost(p, x * x), a * a, 1e-9);
        EXPECT_TRUE(p.monotone());
        EXPECT_LT(p.pushforward_error(), 1e-8);
    }
}

TEST(Coupling, ExponentialRescaling) {
    for (double lam : {0.5, 2.0}) {
        char spec[64];
        std::snprintf(spec, sizeof spec, "custom:%g*x@[0,inf]", lam);
        auto dst = measure_from_spec(spec);
        auto p = quantile_coupling(expo(), dst, 4096);
        double worst = 0;
        for (std::size_t i = 0; i < p.size(); ++i) worst = std::max(worst, std::abs(p.T[i] - p.x[i] / lam) / (1 + p.x[i]));
        EXPECT_LT(worst, 1e-9);
        EXPECT_LT(p.pushforward_error(), 1e-8);
    }
}

TEST(Coupling, MassMismatch) {
    try {
        quantile_coupling(gauss(), ScalarFunction::constant(2.0), ScalarFunction::constant(1.0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MassMismatch);
    }
}

TEST(Cost, ShiftedExponentialAgainstDiscreteOracle) {
    double s = 0.7;
    auto dst = measure_from_spec("custom:x - 0.7@[0.7,inf]");
    auto p = quantile_coupling(expo(), dst, 4096);
    auto absc = [](double u) { return std::abs(u); };
    EXPECT_NEAR(transport_cost(p, absc), s, 1e-9);
    double oracle = sorted_atom_cost(quantile_atoms(expo(), 200), quantile_atoms(dst, 200), absc);
    EXPECT_NEAR(oracle, s, 1e-9);
}

TEST(Cost, QuantileCouplingBeatsPermutations) {
    std::mt19937_64 rng(17);
    auto dst = reweight(gauss(), unit_mass(gauss(), bump_function(1.0, 0.7).f + 0.3));
    auto a = quantile_atoms(gauss(), 100), b = quantile_atoms(dst, 100);
    auto sq = [](double u) { return u * u; };
    double best = sorted_atom_cost(a, b, sq);
    bool strictly = false;
    std::vector<std::size_t> perm(100);
    std::iota(perm.begin(), perm.end(), 0);
    for (int k = 0; k < 50; ++k) {
        std::shuffle(perm.begin(), perm.end(), rng);
        double c = 0;
        for (std::size_t i = 0; i < 100; ++i) c += sq(b[perm[i]] - a[i]);
        c /= 100;
        EXPECT_GE(c, best - 1e-12);
        if (c > best + 1e-9) strictly = true;
    }
    EXPECT_TRUE(strictly);
}

TEST(Talagrand, EntropyDominatesHalfW2) {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> c(-2, 2), w(0.4, 1.5), h(0.05, 1.0);
    auto x = ScalarFunction::variable();
    for (int k = 0; k < 50; ++k) {
        auto g = unit_mass(gauss(), bump_function(c(rng), w(rng)).f + h(rng) * bump_function(c(rng), w(rng)).f + 0.05);
        auto p = quantile_coupling(gauss(), reweight(gauss(), g), 2048);
        EXPECT_GE(entropy(gauss(), g) - 0.5 * transport_cost(p, x * x), -1e-8);
    }
}

TEST(AboveTangent, EqualDensitiesGiveZero) {
    auto r = above_tangent_residual(gauss(), ScalarFunction::constant(1.0), ScalarFunction::constant(1.0), 2048);
    EXPECT_LT(r.residual, 1e-12);
    EXPECT_NEAR(r.curvature_term, 0.0, 1e-14);
}

TEST(AboveTangent, GaussianBumpToUniformWeight) {
    auto f = unit_mass(gauss(), bump_function(0.5, 0.8).f);
    auto r = above_tangent_residual(gauss(), f, ScalarFunction::constant(1.0), 8192);
    EXPECT_LT(r.residual, 1e-6);
    EXPECT_GE(r.surplus, -1e-8);
    EXPECT_LT(r.edge_flux, 1e-12);
}

TEST(AboveTangent, HalfLineTranslateWithBoundaryTerm) {
    // g = e^{-a} 1{x > a} e^{x - a}... the translate family: density of the
    // shifted exponential with respect to Exp(1)
    auto x = ScalarFunction::variable();
    double a = 0.4;
    auto g = ScalarFunction::if_nonneg(x - a, exp(ScalarFunction::constant(-a) + 0.0 * x) * std::exp(2 * a) * exp(-a + 0.0 * x),
                                       ScalarFunction::constant(0.0));
    (void)g;
    // f = 1 pushes mu to the law of X + a, whose density wrt mu is e^{a} 1{x > a}
    auto ga = ScalarFunction::if_nonneg(x - a, ScalarFunction::constant(std::exp(a)), ScalarFunction::constant(0.0));
    auto r = above_tangent_residual(expo(), ScalarFunction::constant(1.0), ga, 4096);
    EXPECT_LT(r.residual, 1e-8);
    EXPECT_NEAR(r.boundary_term, -a, 1e-9);  // -f(0) theta(0) rho(0)
    EXPECT_NEAR(r.ent_g, a, 1e-9);
    EXPECT_GE(r.surplus, -1e-8);
}

TEST(AboveTangent, ConvergesOnTheHalfLine) {
    // Simpson on a half-line with a non-decaying end converges at fourth order
    auto f = unit_mass(expo(), bump_function(1.0, 1.0).f + 0.2);
    double prev = 0;
    for (int n : {64, 128, 256}) {
        double r = above_tangent_residual(expo(), f, ScalarFunction::constant(1.0), n).residual;
        if (prev > 0) {
            EXPECT_GT(prev / r, 4.0) << n;
        }
        prev = r;
    }
}

TEST(AboveTangent, SurplusForConvexPotentials) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> c(-1, 1), w(0.5, 1.5);
    for (const char* spec : {"gaussian", "laplace", "exp_alpha:1.5"}) {
        auto mu = measure_from_spec(spec);
        for (int k = 0; k < 3; ++k) {
            auto f = unit_mass(mu, bump_function(c(rng), w(rng)).f + 0.1);
            auto g = unit_mass(mu, bump_function(c(rng), w(rng)).f + 0.1);
            auto r = above_tangent_residual(mu, f, g, 8192);
            EXPECT_LT(r.residual, 1e-6) << spec;
            EXPECT_GE(r.surplus, -1e-8) << spec;
        }
    }
}

TEST(ProductCoupling, TrivialAndDominatesQuantileCost) {
    auto zero = [](double) { return 0.0; };
    EXPECT_NEAR(product_coupling_bound(gauss(), ScalarFunction::constant(1), ScalarFunction::constant(1), zero, 1.0), 0.0, 1e-9);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> c(-1.5, 1.5), w(0.4, 1.2), al(1.2, 4.0);
    auto cost = [](double u) { return u * u / 4; };
    for (int k = 0; k < 5; ++k) {
        auto f = unit_mass(gauss(), bump_function(c(rng), w(rng)).f);
        auto g = unit_mass(gauss(), bump_function(c(rng), w(rng)).f);
        double alpha = al(rng);
        double bound = product_coupling_bound(gauss(), f, g, cost, alpha);
        auto p = quantile_coupling(reweight(gauss(), f), reweight(gauss(), g), 2048);
        EXPECT_GE(bound - transport_cost(p, cost), -1e-8);
    }
    // at alpha = 1 the Gaussian double integral is exactly critical
    EXPECT_THROW(product_coupling_bound(gauss(), ScalarFunction::constant(1), ScalarFunction::constant(1), cost, 0.9), Error);
}

TEST(ProductCoupling, SetForm) {
    auto cost = [](double u) { return u * u / 4; };
    double alpha = 2.0;
    double b = product_coupling_bound_sets(gauss(), {{-kInf, 0}}, {{1, kInf}}, cost, alpha);
    double base = product_coupling_bound_sets(gauss(), {{-kInf, kInf}}, {{-kInf, kInf}}, cost, alpha);
    EXPECT_NEAR(base, alpha * std::log(std::sqrt(2.0)), 1e-6);
    EXPECT_NEAR(b - base, -alpha * std::log(0.5 * gauss().sf(1.0)), 1e-9);
}

TEST(Displacement, ZeroPerturbation) {
    auto b = displacement_derivative_bounds(ScalarFunction::constant(0), 0.0);
    EXPECT_NEAR(b.min_dT, 1.0, 1e-9);
    EXPECT_NEAR(b.max_dT, 1.0, 1e-9);
}

TEST(Displacement, SinePerturbation) {
    auto x = ScalarFunction::variable();
    double c = 0.5;
    auto b = displacement_derivative_bounds(c * sin(x), c);
    EXPECT_GE(b.min_dT, 1 - c - 1e-4);
    EXPECT_LE(b.max_dT, 1 + c + 1e-4);
    EXPECT_LE(b.max_dS, 1 / (1 - c) + 1e-4);
}

TEST(Displacement, LinearPerturbationAttainsTheEdge) {
    auto x = ScalarFunction::variable();
    auto b = displacement_derivative_bounds(-0.9 * x, 0.9);
    EXPECT_NEAR(b.max_dT, 1.9, 1e-8);
    EXPECT_NEAR(b.min_dT, 1.9, 1e-8);
    try {
        displacement_derivative_bounds(-0.95 * x, 0.9);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SlopeViolation);
    }
}

TEST(MedianBound, TrivialAndSymmetric) {
    auto one = median_zero_transport_bound(ScalarFunction::constant(1.0));
    EXPECT_NEAR(one.entropy, 0.0, 1e-12);
    EXPECT_NEAR(one.w_cost, 0.0, 1e-12);
    auto two = unit_mass(gauss(), bump_function(-1.2, 0.5).f + bump_function(1.2, 0.5).f);
    auto r = median_zero_transport_bound(two);
    EXPECT_GT(r.margin, 0.0);
    for (double a : {0.5, 1.0, 2.0}) {
        auto m = median_zero_transport_bound(m_a_ratio(a));
        EXPECT_NEAR(m.entropy, a * a / 2 + std::sqrt(2 / kPi) * a, 1e-8);
        EXPECT_GE(m.margin, -1e-8);
    }
    auto skew = unit_mass(gauss(), bump_function(1.0, 0.5).f);
    try {
        median_zero_transport_bound(skew);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MedianNotZero);
    }
}

TEST(Plan, CsvDump) {
    auto p = quantile_coupling(gauss(), gauss(), 16);
    auto csv = p.csv();
    EXPECT_EQ(csv.substr(0, 13), "x,T,theta,dT\n");
    EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), p.size() + 1);
}
