#pragma once
/// Monotone transport between measures on the line and the identities built on it.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "ineqforge/error.hpp"
#include "ineqforge/expr.hpp"
#include "ineqforge/functionals.hpp"
#include "ineqforge/measure.hpp"
#include "ineqforge/numerics.hpp"
#include "ineqforge/special.hpp"

namespace ineqforge {

/// Samples of T = F_dst^{-1} o F_src on a Simpson grid over the source window.
struct TransportPlan1D {
    Measure1D source, target;
    std::vector<double> x, T, theta, dT;
    std::vector<long double> dx_weight;  // Simpson weights in x
    std::vector<long double> weight;     // Simpson weights times the source density

    std::size_t size() const { return x.size(); }

    /// Sum of weight_i h(i), an approximation of the source integral.
    template <class H>
    long double integrate(H&& h) const {
        long double s = 0;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (weight[i] != 0) s += weight[i] * static_cast<long double>(h(i));
        return s;
    }

    bool monotone() const {
        for (std::size_t i = 0; i < x.size(); ++i)
            if (dT[i] < 0 || (i && T[i] < T[i - 1])) return false;
        return true;
    }

    /// max |F_dst(T(x)) - F_src(x)| over the grid.
    double pushforward_error() const {
        double e = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double a = source.cdf(x[i]), b = target.cdf(T[i]);
            if (a > 0.5) {
                a = source.sf(x[i]);
                b = target.sf(T[i]);
            }
            e = std::max(e, std::abs(a - b));
        }
        return e;
    }

    std::string csv() const {
        std::string out = "x,T,theta,dT\n";
        char buf[128];
        for (std::size_t i = 0; i < x.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", x[i], T[i], theta[i], dT[i]);
            out += buf;
        }
        return out;
    }
};

namespace detail {

/// F_dst^{-1}(F_src(x)), using survival functions in the upper half.
inline double push_point(const Measure1D& src, const Measure1D& dst, double x) {
    double u = src.cdf(x);
    if (u == 0) return dst.quantile(0.0, QuantileSide::Upper);
    if (u <= 0.5) return dst.quantile(u);
    return dst.quantile_sf(src.sf(x));
}

/// F_src^{-1}(F_dst(y)).
inline double pull_point(const Measure1D& src, const Measure1D& dst, double y) {
    double u = dst.cdf(y);
    if (u <= 0.5) return src.quantile(u);
    return src.quantile_sf(dst.sf(y));
}

}  // namespace detail

/// Monotone rearrangement from src to dst sampled on about `resolution`
/// Simpson intervals. The grid is split where T or T' may jump.
inline TransportPlan1D quantile_coupling(const Measure1D& src, const Measure1D& dst, int resolution = 4096) {
    TransportPlan1D plan;
    plan.source = src;
    plan.target = dst;
    std::vector<double> cuts = src.breakpoints();
    std::vector<double> dst_points = dst.breakpoints();
    for (const auto& w : dst.window()) {
        dst_points.push_back(w.lo);
        dst_points.push_back(w.hi);
    }
    for (double y : dst_points) {
        if (!(y > dst.window_lo() && y < dst.window_hi())) continue;
        cuts.push_back(detail::pull_point(src, dst, y));
    }
    double total = 0;
    for (const auto& w : src.window()) total += w.length();
    for (const auto& w : src.window()) {
        std::vector<double> edges{w.lo, w.hi};
        for (double c : cuts)
            if (c > w.lo && c < w.hi) edges.push_back(c);
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
            double a = edges[s], b = edges[s + 1];
            double nudge = 1e-12 * (1 + std::max(std::abs(a), std::abs(b)));
            if (b - a <= 4 * nudge) continue;
            a += nudge;
            b -= nudge;
            int n = 2 * std::max(1, static_cast<int>(std::ceil(resolution * (b - a) / (2 * total))));
            long double h = (static_cast<long double>(b) - a) / n;
            for (int i = 0; i <= n; ++i) {
                double xi = i == n ? b : static_cast<double>(a + h * i);
                long double sw = h / 3 * ((i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2));
                double Ti = detail::push_point(src, dst, xi);
                long double ld = src.log_density(xi) - dst.log_density(Ti);
                plan.x.push_back(xi);
                plan.T.push_back(Ti);
                plan.theta.push_back(Ti - xi);
                plan.dT.push_back(static_cast<double>(std::exp(ld)));
                plan.dx_weight.push_back(sw);
                plan.weight.push_back(sw * std::exp(src.log_density(xi)));
            }
        }
    }
    return plan;
}

/// Plan from f mu to g mu for densities f, g with respect to mu.
inline TransportPlan1D quantile_coupling(const Measure1D& mu, const ScalarFunction& f, const ScalarFunction& g,
                                         int resolution = 4096, double tol = 1e-6) {
    for (const auto* h : {&f, &g}) {
        double m = expectation(mu, *h);
        if (std::abs(m - 1) > tol) fail(ErrorKind::MassMismatch, "density has mass " + std::to_string(m));
    }
    auto src = f.is_constant() ? mu : reweight(mu, f);
    auto dst = g.is_constant() ? mu : reweight(mu, g);
    return quantile_coupling(src, dst, resolution);
}

/// int c(T(x) - x) d src.
inline double transport_cost(const TransportPlan1D& plan, const CostFunction& c) {
    return static_cast<double>(plan.integrate([&](std::size_t i) { return c(static_cast<long double>(plan.theta[i])); }));
}

template <class C>
double transport_cost(const TransportPlan1D& plan, C&& c) {
    return static_cast<double>(plan.integrate([&](std::size_t i) { return c(plan.theta[i]); }));
}

// ---------------------------------------------------------------------------

struct AboveTangentResult {
    double ent_f = 0.0;
    double ent_g = 0.0;
    double defect_term = 0.0;    // int (V(T) - V - theta V') f dmu
    double curvature_term = 0.0; // int (theta' - log(1 + theta')) f dmu
    double linear_term = 0.0;    // int f' theta dmu
    double boundary_term = 0.0;  // [theta f rho] at finite ends
    double residual = 0.0;       // |lhs - rhs| of the identity
    double surplus = 0.0;        // slack of the above-tangent inequality
    double edge_flux = 0.0;      // |f theta rho| at the truncation edges
};

/// Checks Ent(f) + int (V(T) - V - theta V') f + int (theta' - log(1 + theta')) f
///      = Ent(g) - int f' theta + [theta f rho]
/// for the monotone map pushing f mu to g mu.
inline AboveTangentResult above_tangent_residual(const Measure1D& mu, const ScalarFunction& f, const ScalarFunction& g,
                                                 int resolution = 8192) {
    auto plan = quantile_coupling(mu, f, g, resolution);
    AboveTangentResult r;
    r.ent_f = entropy(mu, f);
    r.ent_g = entropy(mu, g);
    auto df = f.derivative();
    auto dV = mu.potential().derivative();
    std::optional<ScalarFunction> W, dW;
    if (mu.weight()) {
        W = *mu.weight();
        dW = W->derivative();
    }
    auto V = [&](long double x) { return -mu.raw_log_density(x); };
    auto Vp = [&](long double x) {
        long double v = dV(x);
        if (W) v -= (*dW)(x) / (*W)(x);
        return v;
    };
    bool crossed = false;
    long double defect = 0, curv = 0, lin = 0;
    for (std::size_t i = 0; i < plan.size(); ++i) {
        long double x = plan.x[i], th = plan.theta[i];
        long double lt = std::log(static_cast<long double>(plan.dT[i]));
        if (!(plan.dT[i] > 0)) crossed = true;
        long double rho_mu = std::exp(mu.log_density(x));
        defect += plan.weight[i] * (V(x + th) - V(x) - th * Vp(x));
        curv += plan.weight[i] * (std::expm1(lt) - lt);
        lin += plan.dx_weight[i] * df(x) * th * rho_mu;
    }
    if (crossed) fail(ErrorKind::NonSmoothInput, "theta' <= -1 on the grid");
    auto flux = [&](double a) {
        double Ta = detail::push_point(plan.source, plan.target, a);
        return static_cast<long double>(f(a)) * (Ta - a) * std::exp(mu.log_density(a));
    };
    long double bnd = 0;
    if (std::isfinite(mu.support_lo())) bnd -= flux(mu.support_lo());
    if (std::isfinite(mu.support_hi())) bnd += flux(mu.support_hi());
    r.edge_flux = 0;
    if (!std::isfinite(mu.support_lo())) r.edge_flux = std::max(r.edge_flux, std::abs(static_cast<double>(flux(plan.x.front()))));
    if (!std::isfinite(mu.support_hi())) r.edge_flux = std::max(r.edge_flux, std::abs(static_cast<double>(flux(plan.x.back()))));
    r.defect_term = static_cast<double>(defect);
    r.curvature_term = static_cast<double>(curv);
    r.linear_term = static_cast<double>(lin);
    r.boundary_term = static_cast<double>(bnd);
    long double lhs = r.ent_f + defect + curv;
    long double rhs = r.ent_g - lin + bnd;
    r.residual = static_cast<double>(std::abs(lhs - rhs));
    r.surplus = static_cast<double>(r.ent_g - lin - defect - r.ent_f);
    return r;
}

// ---------------------------------------------------------------------------

/// alpha log int int exp(c(x - y)/alpha) dmu dmu + alpha (Ent f + Ent g).
template <class C>
double product_coupling_bound(const Measure1D& mu, const ScalarFunction& f, const ScalarFunction& g, C&& c, double alpha) {
    if (!(alpha > 0)) fail(ErrorKind::OutOfRange, "alpha must be positive");
    auto p = exp_double_integral(mu, c, 1 / alpha);
    if (!p.finite) fail(ErrorKind::DivergentIntegral, "double exponential integral diverges: " + p.detail);
    return alpha * p.log_value + alpha * (entropy(mu, f) + entropy(mu, g));
}

/// Conditional form for mu_A and mu_B.
template <class C>
double product_coupling_bound_sets(const Measure1D& mu, const std::vector<Interval>& A, const std::vector<Interval>& B,
                                   C&& c, double alpha) {
    if (!(alpha > 0)) fail(ErrorKind::OutOfRange, "alpha must be positive");
    double ma = mu.mass(A), mb = mu.mass(B);
    if (!(ma > 0 && mb > 0)) fail(ErrorKind::NullSet, "conditioning set has zero mass");
    auto p = exp_double_integral(mu, c, 1 / alpha);
    if (!p.finite) fail(ErrorKind::DivergentIntegral, "double exponential integral diverges: " + p.detail);
    return alpha * p.log_value - alpha * std::log(ma * mb);
}

// ---------------------------------------------------------------------------

struct DisplacementBounds {
    double min_dT = kInf, max_dT = -kInf, max_dS = -kInf;
    double argmin = kNaN, argmax = kNaN;
};

/// For nu = e^g mu / Z with mu = Exp(1): the slopes of the monotone map
/// T pushing nu to mu and of its inverse S.
inline DisplacementBounds displacement_derivative_bounds(const ScalarFunction& g, double c, int resolution = 4096) {
    if (!(c >= 0 && c < 1)) fail(ErrorKind::OutOfRange, "slope bound must be in [0, 1)");
    auto mu = measure_from_spec("exponential");
    auto dg = g.derivative();
    const int scan = 20000;
    for (int i = 0; i <= scan; ++i) {
        double x = mu.window_hi() * i / scan;
        if (std::abs(dg(x)) > c + 1e-12)
            fail(ErrorKind::SlopeViolation, "|g'| exceeds the bound at x = " + std::to_string(x));
    }
    auto nu = reweight(mu, exp(g));
    auto plan = quantile_coupling(nu, mu, resolution);
    DisplacementBounds b;
    for (std::size_t i = 0; i < plan.size(); ++i) {
        // tail samples carry no information once both cdfs round to one
        if (plan.source.sf(plan.x[i]) < 1e-13) continue;
        double d = plan.dT[i];
        if (d < b.min_dT) { b.min_dT = d; b.argmin = plan.x[i]; }
        if (d > b.max_dT) { b.max_dT = d; b.argmax = plan.x[i]; }
    }
    b.max_dS = 1 / b.min_dT;
    return b;
}

// ---------------------------------------------------------------------------

/// w(x) = x^2/2 + N(x / sqrt(2 pi)).
inline double median_cost(double x) { return 0.5 * x * x + special::N(x / std::sqrt(2 * kPi)); }

struct MedianBound {
    double entropy = 0.0;
    double w_cost = 0.0;
    double margin = 0.0;
};

/// Ent_gamma(g) against the w-cost of moving gamma to g gamma.
inline MedianBound median_zero_transport_bound(const ScalarFunction& g, int resolution = 4096, double tol = 1e-9) {
    auto gam = measure_from_spec("gaussian");
    double m = expectation(gam, g);
    if (std::abs(m - 1) > 1e-6) fail(ErrorKind::MassMismatch, "g is not a density");
    auto dst = g.is_constant() ? gam : reweight(gam, g);
    double med = dst.cdf(0.0);
    if (std::abs(med - 0.5) > tol) fail(ErrorKind::MedianNotZero, "median mass at 0 is " + std::to_string(med));
    auto plan = quantile_coupling(gam, dst, resolution);
    MedianBound r;
    r.entropy = entropy(gam, g);
    r.w_cost = transport_cost(plan, [](double t) { return median_cost(t); });
    r.margin = r.entropy - r.w_cost;
    return r;
}

}  // namespace ineqforge
