#pragma once
/// Named scalar functions, cost functions and numeric convex duality.

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "ineqforge/error.hpp"
#include "ineqforge/expr.hpp"
#include "ineqforge/measure.hpp"
#include "ineqforge/numerics.hpp"

namespace ineqforge {

/// c_alpha(t) = t^2/2 for |t| <= 1, |t|^alpha/alpha + (alpha-2)/(2 alpha) beyond.
inline double c_alpha(double alpha, double t) {
    if (!(alpha > 1)) fail(ErrorKind::BadAlpha, "c_alpha needs alpha > 1");
    double a = std::abs(t);
    if (a <= 1) return 0.5 * t * t;
    return std::pow(a, alpha) / alpha + (alpha - 2) / (2 * alpha);
}

inline double dual_exponent(double alpha) {
    if (!(alpha > 1)) fail(ErrorKind::BadAlpha, "dual exponent needs alpha > 1");
    return alpha / (alpha - 1);
}

/// F_tau(t) = log^tau(1 + t) - log^tau(2), tau in (0, 1].
inline double F_tau(double tau, double t) {
    if (!(tau > 0 && tau <= 1)) fail(ErrorKind::OutOfRange, "F_tau needs tau in (0, 1]");
    if (!(t >= 0)) fail(ErrorKind::OutOfRange, "F_tau needs t >= 0");
    return std::pow(std::log1p(t), tau) - std::pow(std::log(2.0), tau);
}

/// Tangency point of the line through the origin touching log^tau(1 + t), tau > 1.
inline double F_tau_tangent_point(double tau) {
    if (!(tau > 1)) fail(ErrorKind::OutOfRange, "surrogate needs tau > 1");
    // solve (1 + t) log(1 + t) = tau t on t > e^{tau-1} - 1
    auto g = [&](double t) { return (1 + t) * std::log1p(t) - tau * t; };
    double lo = std::expm1(tau - 1), hi = std::max(1.0, 2 * lo);
    while (g(hi) < 0) hi *= 2;
    return bisect_increasing(g, 0.0, lo, hi);
}

/// Concave surrogate of log^tau(1 + t) for tau > 1: linear through the origin
/// up to the tangency point, the original function beyond it.
inline double F_tau_surrogate(double tau, double t) {
    if (!(t >= 0)) fail(ErrorKind::OutOfRange, "surrogate needs t >= 0");
    double ts = F_tau_tangent_point(tau);
    if (t >= ts) return std::pow(std::log1p(t), tau);
    return std::pow(std::log1p(ts), tau) * t / ts;
}

/// L_alpha(t) = m log^{1 - 1/alpha}(1/m), m = min(t, 1 - t).
inline double L_alpha(double alpha, double t) {
    if (!(alpha >= 1)) fail(ErrorKind::OutOfRange, "L_alpha needs alpha >= 1");
    if (!(t > 0 && t < 1)) fail(ErrorKind::OutOfRange, "L_alpha needs t in (0, 1)");
    double m = std::min(t, 1 - t);
    return m * std::pow(-std::log(m), 1 - 1 / alpha);
}

namespace special {

inline double M(double x) {
    if (!(x > -1)) fail(ErrorKind::DomainError, "M is defined on (-1, inf)");
    return x - std::log1p(x);
}
inline double S(double x) { return x + std::expm1(-x); }
inline double N(double t) { return std::abs(t) - std::log1p(std::abs(t)); }
inline double Phi_tau(double tau, double x) { return x * x / std::pow(std::log(std::exp(1.0) + x * x), 1 - tau); }
/// Cost (1 - a)/a (a x - 1 + e^{-a x}) for a in (0, 1).
inline double bl_exp(double a, double x) {
    if (!(a > 0 && a < 1)) fail(ErrorKind::BadAlpha, "exponential cost needs alpha in (0, 1)");
    return (1 - a) / a * (a * x + std::expm1(-a * x));
}

}  // namespace special

// ---------------------------------------------------------------------------

/// Maximizer and value of x y - f(x) over a domain, with window expansion.
struct ConjugatePoint {
    double value = kNaN;
    double argmax = kNaN;
};

template <class F>
ConjugatePoint conjugate_at(F&& f, double y, Interval window, Interval domain = {}, int resolution = 400,
                            int max_expansions = 40) {
    Interval w{std::max(window.lo, domain.lo), std::min(window.hi, domain.hi)};
    for (int e = 0; e <= max_expansions; ++e) {
        // Open domain ends are approached but never evaluated.
        double lo = w.lo, hi = w.hi;
        if (lo == domain.lo) lo += 1e-12 * (1 + std::abs(lo));
        if (hi == domain.hi) hi -= 1e-12 * (1 + std::abs(hi));
        auto obj = [&](double x) {
            double v = x * y - static_cast<double>(f(x));
            return std::isnan(v) ? -kInf : v;
        };
        std::size_t bi = 0;
        auto [x, v] = grid_golden_max(obj, lo, hi, resolution, &bi);
        bool at_lo = bi == 0 && w.lo > domain.lo;
        bool at_hi = bi == static_cast<std::size_t>(resolution) && w.hi < domain.hi;
        if (!at_lo && !at_hi && std::isfinite(v)) return {v, x};
        double width = w.hi - w.lo;
        if (at_lo) w.lo = std::max(domain.lo, w.lo - width);
        if (at_hi) w.hi = std::min(domain.hi, w.hi + width);
        if (!at_lo && !at_hi) break;
    }
    fail(ErrorKind::WindowTooSmall, "conjugate maximizer stays on the window edge");
}

/// Numeric Legendre transform of f as a function of y.
template <class F>
ScalarFunction legendre_conjugate(F f, Interval window, int resolution = 400, Interval domain = {},
                                  std::string name = "conj") {
    auto fn = std::make_shared<F>(std::move(f));
    auto value = [fn, window, resolution, domain](double y) {
        return conjugate_at(*fn, y, window, domain, resolution).value;
    };
    auto slope = [fn, window, resolution, domain](double y) {
        return conjugate_at(*fn, y, window, domain, resolution).argmax;
    };
    return ScalarFunction::native({std::move(name), value, slope, {}});
}

// ---------------------------------------------------------------------------

struct CostFunction {
    std::string name;
    ScalarFunction forward;
    std::optional<ScalarFunction> conjugate;  // closed form when known
    bool strictly_convex = true;
    bool superlinear = true;
    bool quadratic_near_zero = true;
    bool even = true;

    double operator()(double u) const { return forward(u); }
    long double operator()(long double u) const { return forward(u); }

    /// c*(y): closed form if available, numeric transform otherwise.
    double conjugate_value(double y) const {
        if (conjugate) return (*conjugate)(y);
        return conjugate_at([this](double x) { return forward(x); }, y, {-10, 10}).value;
    }
};

inline CostFunction quad_cost() {
    auto x = ScalarFunction::variable();
    CostFunction c{"quad", x * x / 2.0, x * x / 2.0};
    return c;
}

inline CostFunction power_cost(double alpha) {
    if (!(alpha >= 1)) fail(ErrorKind::BadAlpha, "power cost needs alpha >= 1");
    auto x = ScalarFunction::variable();
    CostFunction c;
    c.name = "power:" + std::to_string(alpha);
    c.forward = pow(abs(x), alpha) / alpha;
    if (alpha > 1) {
        double b = dual_exponent(alpha);
        c.conjugate = pow(abs(x), b) / b;
    }
    c.strictly_convex = alpha > 1;
    c.superlinear = alpha > 1;
    c.quadratic_near_zero = alpha == 2;
    return c;
}

inline ScalarFunction c_alpha_function(double alpha) {
    if (!(alpha > 1)) fail(ErrorKind::BadAlpha, "c_alpha needs alpha > 1");
    auto x = ScalarFunction::variable();
    return ScalarFunction::if_nonneg(1.0 - abs(x), x * x / 2.0,
                                     pow(abs(x), alpha) / alpha + (alpha - 2) / (2 * alpha));
}

inline CostFunction c_alpha_cost(double alpha) {
    CostFunction c;
    c.name = "calpha:" + std::to_string(alpha);
    c.forward = c_alpha_function(alpha);
    c.conjugate = c_alpha_function(dual_exponent(alpha));
    return c;
}

inline CostFunction bl_exp_cost(double a) {
    if (!(a > 0 && a < 1)) fail(ErrorKind::BadAlpha, "exponential cost needs alpha in (0, 1)");
    auto x = ScalarFunction::variable();
    CostFunction c;
    c.name = "bl_exp:" + std::to_string(a);
    c.forward = (1 - a) / a * (a * x - 1.0 + exp(-a * x));
    // c*(y) = (y + (1 - a - y) log(1 - y/(1 - a)))/a for y < 1 - a, +inf beyond.
    auto L = log(1.0 - x / (1 - a));
    c.conjugate = ScalarFunction::if_nonneg((1 - a) - x, (x + ((1 - a) - x) * L) / a, ScalarFunction::constant(kInf));
    c.superlinear = false;
    c.even = false;
    return c;
}

inline CostFunction custom_cost(const std::string& expr) {
    CostFunction c;
    c.name = "custom:" + expr;
    c.forward = ScalarFunction::parse(expr);
    double c0 = c.forward(0.0);
    if (std::abs(c0) > 1e-12) fail(ErrorKind::DomainError, "cost must vanish at 0");
    // flags probed on a symmetric grid
    bool even = true, convex = true;
    double quad_ratio_lo = kInf, quad_ratio_hi = 0;
    for (int i = 1; i <= 200; ++i) {
        double u = 0.05 * i;
        double a = c.forward(u), b = c.forward(-u);
        if (std::abs(a - b) > 1e-10 * (1 + std::abs(a))) even = false;
        double h = 1e-3;
        if (c.forward(u + h) + c.forward(u - h) - 2 * a < -1e-10) convex = false;
    }
    for (double u : {1e-3, 2e-3, 4e-3}) {
        double r = c.forward(u) / (u * u);
        quad_ratio_lo = std::min(quad_ratio_lo, r);
        quad_ratio_hi = std::max(quad_ratio_hi, r);
    }
    c.even = even;
    c.strictly_convex = convex;
    c.superlinear = c.forward(1e4) / 1e4 > 100 * c.forward(1e2) / 1e2 || c.forward(1e4) > 1e6;
    c.quadratic_near_zero = quad_ratio_lo > 0 && quad_ratio_hi / quad_ratio_lo < 1.01;
    return c;
}

/// "quad", "power:<a>", "calpha:<a>", "bl_exp:<a>", "custom:<expr>".
inline CostFunction cost_from_spec(const std::string& spec) {
    auto colon = spec.find(':');
    std::string head = spec.substr(0, colon), rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
    CostFunction c;
    if (head == "quad") c = quad_cost();
    else if (head == "power") c = power_cost(parse_number(rest, "exponent"));
    else if (head == "calpha") c = c_alpha_cost(parse_number(rest, "exponent"));
    else if (head == "bl_exp") c = bl_exp_cost(parse_number(rest, "exponent"));
    else if (head == "custom") c = custom_cost(rest);
    else fail(ErrorKind::ParseError, "unknown cost '" + spec + "'");
    c.name = spec;
    return c;
}

/// alpha c(u) + alpha c*(v/alpha) - u v, nonnegative by Young's inequality.
inline double young_gap(const CostFunction& c, double u, double v, double alpha) {
    if (!(alpha > 0)) fail(ErrorKind::OutOfRange, "young_gap needs alpha > 0");
    return alpha * c(u) + alpha * c.conjugate_value(v / alpha) - u * v;
}

/// |x|^p + p|x|^{p-2} x u + 2^{2-p}|u|^p - |x + u|^p.
inline double lp_smoothness_check(double p, double x, double u) {
    if (!(p > 1 && p <= 2)) fail(ErrorKind::OutOfRange, "smoothness check needs p in (1, 2]");
    double c = std::pow(2.0, 2 - p);
    if (x == 0) return (c - 1) * std::pow(std::abs(u), p);
    double v = u / x;
    double m = 1 + p * v + c * std::pow(std::abs(v), p) - std::pow(std::abs(1 + v), p);
    return std::pow(std::abs(x), p) * m;
}

// ---------------------------------------------------------------------------

struct EntropyGenerator {
    std::string name;
    ScalarFunction F;
    std::optional<double> tau;
    bool is_log = false;
    bool surrogate = false;

    double operator()(double t) const { return F(t); }
};

inline EntropyGenerator log_generator() {
    return {"log", log(ScalarFunction::variable()), std::nullopt, true, false};
}

inline EntropyGenerator F_tau_generator(double tau) {
    if (!(tau > 0 && tau <= 1)) fail(ErrorKind::OutOfRange, "F_tau needs tau in (0, 1]");
    auto x = ScalarFunction::variable();
    double shift = std::pow(std::log(2.0), tau);
    return {"tau:" + std::to_string(tau), pow(log(1.0 + x), tau) - shift, tau, false, false};
}

/// Concave surrogate for tau > 1 shifted to vanish at t = 1.
inline EntropyGenerator F_tau_surrogate_generator(double tau) {
    double ts = F_tau_tangent_point(tau);
    auto x = ScalarFunction::variable();
    auto body = ScalarFunction::if_nonneg(x - ts, pow(log(1.0 + x), tau), std::pow(std::log1p(ts), tau) / ts * x);
    return {"tau_surrogate:" + std::to_string(tau), body - F_tau_surrogate(tau, 1.0), tau, false, true};
}

/// "log", "tau:<t>" (t in (0, 1]), "tau_surrogate:<t>" (t > 1), "custom:<expr>".
inline EntropyGenerator generator_from_spec(const std::string& spec) {
    auto colon = spec.find(':');
    std::string head = spec.substr(0, colon), rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (head == "log") return log_generator();
    if (head == "tau") return F_tau_generator(parse_number(rest, "tau"));
    if (head == "tau_surrogate") return F_tau_surrogate_generator(parse_number(rest, "tau"));
    if (head == "custom") {
        EntropyGenerator g{spec, ScalarFunction::parse(rest), std::nullopt, false, false};
        if (std::abs(g(1.0)) > 1e-12) fail(ErrorKind::DomainError, "generator must vanish at 1");
        for (int i = 1; i < 400; ++i) {
            double a = 0.01 * i, b = 0.01 * (i + 1);
            if (g(b) < g(a) - 1e-12) fail(ErrorKind::DomainError, "generator must be non-decreasing");
        }
        return g;
    }
    fail(ErrorKind::ParseError, "unknown generator '" + spec + "'");
}

/// Value of Phi(t) = sup_{s > 0} (s t - s F(s) + s), reported in log form
/// because it grows quickly. `finite` is false when the objective keeps
/// increasing up to s = exp(11000).
struct PhiValue {
    bool finite = true;
    double log_value = -kInf;
};

inline PhiValue phi_from_generator(const EntropyGenerator& F, double t) {
    if (F.is_log) return {true, t};
    // objective in sigma = log s: sigma + log(t + 1 - F(e^sigma)) where the
    // bracket is positive
    auto obj = [&](double sig) {
        long double s = std::exp(static_cast<long double>(sig));
        long double b = static_cast<long double>(t) + 1 - F.F.eval<long double>(s);
        if (!(b > 0)) return -kInf;
        return sig + static_cast<double>(std::log(b));
    };
    const double lo = -30, hi = 11000;
    std::size_t bi = 0;
    auto [x, v] = grid_golden_max(obj, lo, hi, 2200, &bi);
    (void)x;
    if (bi == 2200u) return {false, kInf};
    if (!std::isfinite(v)) return {true, -kInf};
    return {true, v};
}

}  // namespace ineqforge
