#pragma once
/// The acceptance suite: one self-contained check per numbered criterion.
/// Shared by the acceptance test binary and the `report` command.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ineqforge/constants.hpp"
#include "ineqforge/criteria.hpp"
#include "ineqforge/isoperimetry.hpp"

namespace ineqforge {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::vector<std::pair<std::string, double>> metrics;  // reported in insertion order
    std::string detail;
    double seconds = 0.0;  // wall time, excluded from deterministic output
};

namespace acceptance {

namespace detail {

inline ScalarFunction unit_mass(const Measure1D& mu, const ScalarFunction& f) { return f / expectation(mu, f); }

/// Density of the law of X + a sign(X), X standard normal, relative to the
/// standard normal.
inline ScalarFunction two_sided_shift_density(double a) {
    auto x = ScalarFunction::variable();
    auto right = exp(a * x - a * a / 2);
    auto left = exp(-a * x - a * a / 2);
    return ScalarFunction::if_nonneg(x - a, right, ScalarFunction::if_nonneg(-a - x, left, ScalarFunction::constant(0)));
}

/// c * sum w_k sin(omega_k x + phi_k) / omega_k with sum |w_k| = 1, so the
/// slope is bounded by c.
inline ScalarFunction bounded_slope_function(std::mt19937_64& rng, double c) {
    std::uniform_real_distribution<double> W(0.1, 1.0), Om(0.3, 3.0), Ph(0.0, 2 * kPi);
    auto x = ScalarFunction::variable();
    double w[3], total = 0;
    for (double& v : w) total += (v = W(rng));
    ScalarFunction h = ScalarFunction::constant(0.0);
    for (double v : w) {
        double om = Om(rng), ph = Ph(rng);
        h = h + (c * v / total / om) * sin(om * x + ph);
    }
    return h;
}

inline std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

}  // namespace detail

/// Gaussian log-Sobolev saturation by exponentials.
inline CriterionResult gaussian_lsi_saturation(std::uint64_t) {
    CriterionResult r;
    r.id = 1;
    r.name = "gaussian-lsi-saturation";
    auto t0 = std::chrono::steady_clock::now();
    auto g = measure_from_spec("gaussian");
    auto x = ScalarFunction::variable();
    double worst = 0;
    for (double s : {0.5, 1.0, 2.0}) {
        TestFunction h(exp((s / 2) * x));
        double ratio = entropy(g, h) / (2 * dirichlet(g, h, 2.0));
        worst = std::max(worst, std::abs(ratio - 1));
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.metrics = {{"max_abs_error", worst}};
    r.pass = worst < 1e-6 && secs < 1.0;
    r.detail = "runtime limit 1 s";
    return r;
}

/// Entropy and quadratic transport cost of the two-sided shift example.
inline CriterionResult talagrand_example(std::uint64_t) {
    CriterionResult r;
    r.id = 2;
    r.name = "talagrand-two-sided-shift";
    auto t0 = std::chrono::steady_clock::now();
    auto g = measure_from_spec("gaussian");
    auto x = ScalarFunction::variable();
    double ent_err = 0, w_err = 0;
    for (double a : {0.5, 1.0, 2.0}) {
        auto dens = detail::two_sided_shift_density(a);
        ent_err = std::max(ent_err, std::abs(entropy(g, dens) - (a * a / 2 + std::sqrt(2 / kPi) * a)));
        auto plan = quantile_coupling(g, reweight(g, dens), 4096);
        w_err = std::max(w_err, std::abs(transport_cost(plan, x * x) - a * a));
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.metrics = {{"entropy_error", ent_err}, {"w2_squared_error", w_err}};
    r.pass = ent_err < 1e-5 && w_err < 1e-5 && secs < 5.0;
    r.detail = "runtime limit 5 s";
    return r;
}

/// Numeric conjugate of c_alpha against c_{alpha*} on |y| <= 5.
inline CriterionResult conjugate_identity(std::uint64_t) {
    CriterionResult r;
    r.id = 3;
    r.name = "conjugate-identity";
    double worst = 0;
    for (double a : {1.5, 2.0, 3.0}) {
        auto c = legendre_conjugate([a](double u) { return c_alpha(a, u); }, {-4, 4});
        double b = dual_exponent(a);
        for (int i = -500; i <= 500; ++i) {
            double y = 5.0 * i / 500;
            worst = std::max(worst, std::abs(c(y) - c_alpha(b, y)));
        }
    }
    r.metrics = {{"max_abs_error", worst}};
    r.pass = worst < 1e-6;
    return r;
}

/// Above-tangent identity residual on random measures and densities.
inline CriterionResult above_tangent_identity(std::uint64_t seed) {
    CriterionResult r;
    r.id = 4;
    r.name = "above-tangent-identity";
    std::mt19937_64 rng(seed * 4 + 1);
    std::uniform_real_distribution<double> C(-1, 1), W(0.5, 1.5), H(0.05, 0.3);
    // smooth potentials: Simpson's fourth order needs a smooth integrand
    const char* specs[] = {"gaussian", "custom:x^2/2 + 0.3*sin(x)@[-inf,inf]", "custom:x^4/4 + x^2/2@[-inf,inf]",
                           "custom:sqrt(1 + x^2)@[-inf,inf]", "exp_alpha:3"};
    std::vector<Measure1D> mus;
    for (const char* s : specs) mus.push_back(measure_from_spec(s));
    double worst = 0, worst_shrink = kInf;
    int floor_cases = 0;
    for (int k = 0; k < 20; ++k) {
        const auto& mu = mus[k % mus.size()];
        auto f = detail::unit_mass(mu, bump_function(C(rng), W(rng)).f + H(rng));
        auto g = detail::unit_mass(mu, bump_function(C(rng), W(rng)).f + H(rng));
        double fine = above_tangent_residual(mu, f, g, 8192).residual;
        double coarse = above_tangent_residual(mu, f, g, 4096).residual;
        worst = std::max(worst, fine);
        if (fine <= 1e-12 && coarse <= 1e-12) {
            ++floor_cases;  // both at the roundoff floor
        } else {
            worst_shrink = std::min(worst_shrink, coarse / fine);
        }
    }
    r.metrics = {{"max_residual", worst}, {"min_shrink", std::isfinite(worst_shrink) ? worst_shrink : 0.0},
                 {"roundoff_floor_cases", static_cast<double>(floor_cases)}};
    r.pass = worst < 1e-6 && (!std::isfinite(worst_shrink) || worst_shrink >= 4);
    r.detail = "cases with both residuals <= 1e-12 are at the roundoff floor and skip the shrink test";
    return r;
}

/// Exponential-law suite: boundary Poincare, Bobkov-Ledoux, displacement slopes.
inline CriterionResult exponential_suite(std::uint64_t seed) {
    CriterionResult r;
    r.id = 5;
    r.name = "exponential-law-suite";
    auto e = measure_from_spec("exponential");
    auto ineq = inequality_from_name("poincare0");
    double sup = estimate_best_constant(e, ineq, {family_from_name("tilts", e, ineq)}, 80, seed).report.C;
    bool a_ok = sup >= 3.9 && sup <= 4 + 1e-6;

    std::mt19937_64 rng(seed * 4 + 2);
    double worst_bl = kInf;
    for (double c : {0.3, 0.6, 0.9}) {
        for (int k = 0; k < 100; ++k) {
            auto h = detail::bounded_slope_function(rng, c);
            auto f = exp(h);
            auto dh = h.derivative();
            double lhs = entropy(e, f);
            double energy = expectation(e, dh * dh * f);
            worst_bl = std::min(worst_bl, 4 / ((1 - c) * (1 - c)) * energy + 1e-8 - lhs);
        }
    }
    bool b_ok = worst_bl >= 0;

    double worst_tc = kInf;
    std::uniform_real_distribution<double> Cc(0.05, 0.9);
    for (int k = 0; k < 20; ++k) {
        double c = Cc(rng);
        auto b = displacement_derivative_bounds(detail::bounded_slope_function(rng, c), c);
        worst_tc = std::min({worst_tc, b.min_dT - (1 - c - 1e-4), (1 + c + 1e-4) - b.max_dT});
    }
    bool c_ok = worst_tc >= 0;
    r.metrics = {{"boundary_poincare_sup_ratio", sup}, {"bobkov_ledoux_min_margin", worst_bl},
                 {"displacement_slope_min_margin", worst_tc}};
    r.pass = a_ok && b_ok && c_ok;
    return r;
}

/// Rothaus comparison for random piecewise-linear functions.
inline CriterionResult rothaus_comparison(std::uint64_t seed) {
    CriterionResult r;
    r.id = 6;
    r.name = "rothaus-comparison";
    std::mt19937_64 rng(seed * 4 + 3);
    std::uniform_real_distribution<double> U(-3, 3);
    MeasureOptions o;
    o.resolution = 1024;
    double worst = kInf;
    for (const char* spec : {"gaussian", "exponential", "laplace"}) {
        auto mu = measure_from_spec(spec, o);
        for (int i = 0; i < 200; ++i) {
            std::vector<std::pair<double, double>> k;
            for (int j = 0; j < 4; ++j) k.emplace_back(U(rng), U(rng));
            auto f = pwlin_function(k);
            for (double q : {1.5, 2.0}) worst = std::min(worst, rothaus_gap(mu, f.f, q));
        }
    }
    r.metrics = {{"min_margin", worst}};
    r.pass = worst >= -1e-9;
    return r;
}

/// Scalar lp-smoothness margin on a dense sweep.
inline CriterionResult lp_smoothness(std::uint64_t) {
    CriterionResult r;
    r.id = 7;
    r.name = "scalar-lp-smoothness";
    double worst = kInf;
    for (double p : {1.2, 1.5, 2.0})
        for (double x : {-1.0, 1.0})
            for (int i = -10000; i <= 10000; ++i) worst = std::min(worst, lp_smoothness_check(p, x, i * 1e-3));
    r.metrics = {{"min_margin", worst}};
    r.pass = worst >= -1e-12;
    return r;
}

/// Laplace profile, kappa positivity, Bobkov set-transport margin.
inline CriterionResult isoperimetry_suite(std::uint64_t seed) {
    CriterionResult r;
    r.id = 8;
    r.name = "isoperimetry";
    auto lap = halfline_profile(measure_from_spec("laplace"));
    double prof_err = 0;
    for (std::size_t i = 0; i < lap.t.size(); ++i)
        prof_err = std::max(prof_err, std::abs(lap.I[i] - std::min(lap.t[i], 1 - lap.t[i])));
    bool kappa_ok = true;
    double kappa_min = kInf;
    for (double a : {1.0, 1.5, 2.0}) {
        auto p = halfline_profile(measure_from_spec("exp_alpha:" + detail::fmt("%g", a)));
        auto k = profile_ratio_kappa(p, a);
        kappa_min = std::min(kappa_min, k.kappa);
        kappa_ok = kappa_ok && k.kappa > 0 && !k.endpoint_attained;
    }
    auto g = measure_from_spec("gaussian");
    std::mt19937_64 rng(seed * 4 + 4);
    std::uniform_real_distribution<double> U(-3, 3), R(0.3, 3);
    double worst = kInf;
    for (int k = 0; k < 20; ++k) {
        int n = 1 + k % 3;
        std::vector<double> e;
        for (int i = 0; i < 2 * n; ++i) e.push_back(U(rng));
        std::sort(e.begin(), e.end());
        std::vector<Interval> A;
        for (int i = 0; i < n; ++i) A.push_back({e[2 * i], e[2 * i + 1]});
        if (k % 5 == 0) A.front().lo = -kInf;
        worst = std::min(worst, bobkov_lemma_margin(g, A, R(rng), quad_cost(), std::nullopt, 1024).margin);
    }
    r.metrics = {{"laplace_profile_error", prof_err}, {"kappa_min", kappa_min}, {"bobkov_min_margin", worst}};
    r.pass = prof_err < 1e-8 && kappa_ok && worst >= -1e-8;
    return r;
}

/// Product-coupling bound against the quantile transport cost.
inline CriterionResult product_coupling_dominance(std::uint64_t seed) {
    CriterionResult r;
    r.id = 9;
    r.name = "product-coupling-dominance";
    auto g = measure_from_spec("gaussian");
    std::mt19937_64 rng(seed * 4 + 5);
    std::uniform_real_distribution<double> C(-1.5, 1.5), W(0.4, 1.2), Al(1.2, 4.0), P(1.0, 2.0), B(0.1, 0.25);
    double worst = kInf;
    for (int k = 0; k < 20; ++k) {
        auto f = detail::unit_mass(g, bump_function(C(rng), W(rng)).f);
        auto h = detail::unit_mass(g, bump_function(C(rng), W(rng)).f);
        double alpha = Al(rng), p = P(rng), b = B(rng);
        auto cost = [p, b](double u) { return b * std::pow(std::abs(u), p); };
        double bound = product_coupling_bound(g, f, h, cost, alpha);
        auto plan = quantile_coupling(reweight(g, f), reweight(g, h), 2048);
        worst = std::min(worst, bound - transport_cost(plan, cost));
    }
    r.metrics = {{"min_margin", worst}};
    r.pass = worst >= -1e-8;
    return r;
}

/// Checker sanity matrix with re-verified witnesses.
inline CriterionResult criteria_matrix(std::uint64_t seed) {
    CriterionResult r;
    r.id = 10;
    r.name = "criteria-sanity-matrix";
    auto g = measure_from_spec("gaussian");
    bool ok = true;
    int witnesses = 0;
    auto expect_no = [&](const CriterionVerdict& v) {
        bool good = v.holds == Holds::No && !v.witness.empty() && v.reverify() > 0;
        witnesses += good;
        ok = ok && good;
    };
    ok = ok && wang_checker(g, 0, 0.5).holds == Holds::Yes;
    expect_no(wang_checker(g, 0, 1.5));
    ok = ok && pcp_checker(ScalarFunction::parse("abs(x)^1.5/1.5 + sin(x)"), 1.5, 1.0).holds == Holds::Yes;
    // V1' = 0.9 sign(x) |x|^{1/2}
    expect_no(pcp_checker(ScalarFunction::parse("abs(x)^1.5/1.5 + 0.6*abs(x)^1.5"), 1.5, 1.0));
    std::mt19937_64 rng(seed * 4 + 6);
    std::uniform_real_distribution<double> A(0.05, 1.0), Bc(-2.0, 2.0);
    int certified = 0;
    ScanOptions o;
    o.range = {-4, 4};
    for (int k = 0; k < 10; ++k) {
        double a4 = A(rng), a3 = Bc(rng), a2 = Bc(rng) - 1.5, a1 = Bc(rng);
        char buf[160];
        std::snprintf(buf, sizeof buf, "%.17g*x^4 + %.17g*x^3 + %.17g*x^2 + %.17g*x", a4, a3, a2, a1);
        double xm = -a3 / (4 * a4);
        double lam = std::max(0.0, -(12 * a4 * xm * xm + 6 * a3 * xm + 2 * a2));
        certified += defect_dominated_by(ScalarFunction::parse(buf), quad_cost(), lam, o).holds == Holds::Yes;
    }
    ok = ok && certified == 10;
    r.metrics = {{"polynomials_certified", static_cast<double>(certified)}, {"witnesses_reverified", static_cast<double>(witnesses)}};
    r.pass = ok;
    return r;
}

/// Defective-to-tight log-Sobolev constant for a perturbed Gaussian.
inline CriterionResult end_to_end_tightening(std::uint64_t seed) {
    CriterionResult r;
    r.id = 11;
    r.name = "end-to-end-tightening";
    MeasureOptions o;
    o.resolution = 1024;
    auto mu = measure_from_spec("custom:x^2/2 + 0.3*sin(x)@[-inf,inf]", o);
    auto ineq = inequality_from_name("lsi");
    std::vector<FunctionFamily> fams;
    for (const char* n : {"tilts", "bumps", "hermite"}) fams.push_back(family_from_name(n, mu, ineq));
    double C = 0.5 * estimate_best_constant(mu, ineq, fams, 30, seed, 2).report.C;
    double D = 0;
    for (const auto& t : random_test_functions(mu, ineq, fams, 40, seed * 4 + 7)) {
        auto s = inequality_sides(mu, ineq, t);
        D = std::max(D, (s.lhs - C * s.energy) / expectation(mu, t.f * t.f));
    }
    double E = poincare_constant(mu).constant;
    double K = rothaus_tight_constant(C, D, E);
    double worst = kInf;
    auto checks = random_test_functions(mu, ineq, fams, 100, seed * 4 + 8);
    for (const auto& t : checks) {
        auto s = inequality_sides(mu, ineq, t);
        worst = std::min(worst, K * s.energy + 1e-9 - s.lhs);
    }
    r.metrics = {{"C", C}, {"D", D}, {"E", E}, {"K", K}, {"functions_checked", static_cast<double>(checks.size())},
                 {"min_margin", worst}};
    r.pass = checks.size() == 100 && worst >= 0;
    return r;
}

using CriterionFn = std::function<CriterionResult(std::uint64_t)>;

/// Criteria 1-11; the determinism criterion 12 is run by the report layer.
inline std::vector<CriterionFn> numeric_criteria() {
    return {gaussian_lsi_saturation, talagrand_example,   conjugate_identity, above_tangent_identity,
            exponential_suite,       rothaus_comparison,  lp_smoothness,      isoperimetry_suite,
            product_coupling_dominance, criteria_matrix, end_to_end_tightening};
}

inline CriterionResult run_timed(const CriterionFn& fn, std::uint64_t seed, int id) {
    auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
        r = fn(seed);
    } catch (const std::exception& e) {
        r.id = id;
        r.name = "criterion-" + std::to_string(id);
        r.pass = false;
        r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace acceptance
}  // namespace ineqforge
