#pragma once
/// Both sides of the functional inequalities for a measure and a test function.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "ineqforge/error.hpp"
#include "ineqforge/expr.hpp"
#include "ineqforge/measure.hpp"
#include "ineqforge/numerics.hpp"
#include "ineqforge/special.hpp"

namespace ineqforge {

enum class Role { Density, SqrtDensity, Generic };

inline std::string_view to_string(Role r) {
    switch (r) {
        case Role::Density: return "density";
        case Role::SqrtDensity: return "sqrt-density";
        case Role::Generic: return "generic";
    }
    return "generic";
}

/// A test function together with its derivative.
struct TestFunction {
    ScalarFunction f;
    ScalarFunction df;
    Role role = Role::Generic;
    std::string label;

    TestFunction() = default;
    TestFunction(ScalarFunction fn, Role r = Role::Generic, std::string name = "")
        : f(std::move(fn)), df(f.derivative()), role(r), label(std::move(name)) {
        if (label.empty()) label = "custom:" + f.to_string();
    }

    template <class T>
    T operator()(T x) const { return f(x); }
    TestFunction with_role(Role r) const {
        TestFunction t = *this;
        t.role = r;
        return t;
    }
    TestFunction scaled(double lambda) const { return TestFunction(f * lambda, role, label + "*" + std::to_string(lambda)); }
};

struct InequalityReport {
    std::string name;
    double B = 0.0;
    double C = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    TestFunction witness;
    double margin = 0.0;  // rhs - lhs
};

inline InequalityReport make_report(std::string name, double B, double C, double lhs, double rhs,
                                    TestFunction witness) {
    return {std::move(name), B, C, lhs, rhs, std::move(witness), rhs - lhs};
}

// ---------------------------------------------------------------------------
// Test function constructors

inline TestFunction tilt_function(double s) {
    auto x = ScalarFunction::variable();
    char buf[64];
    std::snprintf(buf, sizeof buf, "tilt:%.17g", s);
    return TestFunction(exp(s * x), Role::Generic, buf);
}

inline TestFunction bump_function(double center, double width) {
    if (!(width > 0)) fail(ErrorKind::OutOfRange, "bump width must be positive");
    auto x = ScalarFunction::variable();
    auto d = (x - center) / width;
    char buf[96];
    std::snprintf(buf, sizeof buf, "bump:%.17g,%.17g", center, width);
    return TestFunction(exp(-0.5 * d * d), Role::Generic, buf);
}

/// Piecewise linear through (x_i, y_i), constant outside the knot range.
inline TestFunction pwlin_function(std::vector<std::pair<double, double>> knots) {
    if (knots.empty()) fail(ErrorKind::ParseError, "pwlin needs at least one knot");
    std::sort(knots.begin(), knots.end());
    for (std::size_t i = 1; i < knots.size(); ++i)
        if (!(knots[i].first > knots[i - 1].first)) fail(ErrorKind::ParseError, "pwlin knots must be distinct");
    auto x = ScalarFunction::variable();
    ScalarFunction f = ScalarFunction::constant(knots[0].second);
    std::string label = "pwlin:";
    char buf[96];
    for (std::size_t i = 0; i < knots.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s%.17g:%.17g", i ? "," : "", knots[i].first, knots[i].second);
        label += buf;
        if (i + 1 == knots.size()) break;
        auto [x0, y0] = knots[i];
        auto [x1, y1] = knots[i + 1];
        double slope = (y1 - y0) / (x1 - x0);
        if (slope != 0) f = f + slope * (min(max(x, ScalarFunction::constant(x0)), ScalarFunction::constant(x1)) - x0);
    }
    return TestFunction(f, Role::Generic, label);
}

/// "tilt:<s>", "bump:<center>,<width>", "pwlin:<x:y,...>", "custom:<expr>".
inline TestFunction test_function_from_spec(const std::string& spec, Role role = Role::Generic) {
    auto colon = spec.find(':');
    if (colon == std::string::npos) fail(ErrorKind::ParseError, "test function spec needs 'kind:args'");
    std::string head = spec.substr(0, colon), rest = spec.substr(colon + 1);
    auto split = [](const std::string& s, char sep) {
        std::vector<std::string> out;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= s.size(); ++i)
            if (i == s.size() || s[i] == sep) {
                out.push_back(s.substr(start, i - start));
                start = i + 1;
            }
        return out;
    };
    TestFunction t;
    if (head == "tilt") {
        t = tilt_function(parse_number(rest, "tilt slope"));
    } else if (head == "bump") {
        auto p = split(rest, ',');
        if (p.size() != 2) fail(ErrorKind::ParseError, "bump needs center,width");
        t = bump_function(parse_number(p[0], "bump center"), parse_number(p[1], "bump width"));
    } else if (head == "pwlin") {
        std::vector<std::pair<double, double>> knots;
        for (const auto& item : split(rest, ',')) {
            auto q = split(item, ':');
            if (q.size() != 2) fail(ErrorKind::ParseError, "pwlin knots are x:y pairs");
            knots.emplace_back(parse_number(q[0], "knot"), parse_number(q[1], "knot value"));
        }
        t = pwlin_function(knots);
    } else if (head == "custom") {
        t = TestFunction(ScalarFunction::parse(rest), Role::Generic, spec);
    } else {
        fail(ErrorKind::ParseError, "unknown test function '" + spec + "'");
    }
    t.role = role;
    return t;
}

// ---------------------------------------------------------------------------

namespace detail {

/// Double precision evaluation with a long double retry on overflow.
inline long double ev(const ScalarFunction& f, long double x) {
    double v = f.eval<double>(static_cast<double>(x));
    if (std::isfinite(v)) return v;
    return f.eval<long double>(x);
}

inline long double powq(long double a, double q) {
    if (q == 2.0) return a * a;
    if (a < 1e300L) return std::pow(static_cast<double>(a), q);
    return std::pow(a, static_cast<long double>(q));
}

/// u log u - u + 1, accurate near u = 1 and extended by 1 at u = 0.
inline long double xlogx_shifted(long double u) {
    if (!(u > 1e-300L)) return 1.0L;
    long double d = u - 1;
    if (std::abs(d) < 1e-2L) {
        long double s = 0, p = d;
        for (int k = 2; k < 12; ++k) {
            p *= d;
            s += ((k % 2) ? -p : p) / (k * (k - 1.0L));
        }
        return s;
    }
    return u * std::log(u) - d;
}

inline std::vector<double> kink_breaks(const Measure1D& mu, const ScalarFunction& f) {
    return f.kinks(mu.window_lo(), mu.window_hi());
}

/// Points in the window where g changes sign, refined by bisection.
template <class G>
std::vector<double> sign_changes(const Measure1D& mu, G&& g, int scan = 4096) {
    std::vector<double> out;
    double lo = mu.window_lo(), hi = mu.window_hi();
    double prev_x = lo, prev = g(lo);
    for (int i = 1; i <= scan; ++i) {
        double x = lo + (hi - lo) * i / scan;
        double v = g(x);
        if ((prev < 0 && v > 0) || (prev > 0 && v < 0)) {
            double a = prev_x, b = x;
            bool a_neg = prev < 0;
            for (int it = 0; it < 100 && b - a > 1e-15 * (1 + std::abs(a)); ++it) {
                double m = 0.5 * (a + b);
                if ((g(m) < 0) == a_neg) a = m; else b = m;
            }
            out.push_back(0.5 * (a + b));
        }
        if (v != 0) { prev = v; prev_x = x; }
    }
    return out;
}

inline std::vector<double> merge_breaks(std::vector<double> a, const std::vector<double>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

}  // namespace detail

/// Integral of f against mu, split at the kinks of f.
inline double expectation(const Measure1D& mu, const ScalarFunction& f) {
    auto br = detail::kink_breaks(mu, f);
    return static_cast<double>(mu.integrate([&](long double x) { return detail::ev(f, x); }, br));
}

/// Ent_mu(f) = int f log(f / int f) for a density f >= 0.
inline double entropy(const Measure1D& mu, const ScalarFunction& f) {
    auto br = detail::kink_breaks(mu, f);
    long double m = mu.integrate([&](long double x) { return std::max(0.0L, detail::ev(f, x)); }, br);
    if (!(m > 0) || !std::isfinite(static_cast<double>(m))) fail(ErrorKind::ZeroMass, "density has no finite positive mass");
    long double e = mu.integrate([&](long double x) { return detail::xlogx_shifted(std::max(0.0L, detail::ev(f, x)) / m); }, br);
    return static_cast<double>(std::max(0.0L, m * e));
}

/// Density role: Ent(f). Other roles: Ent(f^2).
inline double entropy(const Measure1D& mu, const TestFunction& t) {
    if (t.role == Role::Density) return entropy(mu, t.f);
    auto br = detail::kink_breaks(mu, t.f);
    auto sq = [&](long double x) {
        long double v = detail::ev(t.f, x);
        return v * v;
    };
    long double m = mu.integrate(sq, br);
    if (!(m > 0) || !std::isfinite(static_cast<double>(m))) fail(ErrorKind::ZeroMass, "density has no finite positive mass");
    long double e = mu.integrate([&](long double x) { return detail::xlogx_shifted(sq(x) / m); }, br);
    return static_cast<double>(std::max(0.0L, m * e));
}

inline double variance(const Measure1D& mu, const ScalarFunction& f) {
    double m = expectation(mu, f);
    auto br = detail::kink_breaks(mu, f);
    return static_cast<double>(mu.integrate(
        [&](long double x) {
            long double d = detail::ev(f, x) - m;
            return d * d;
        },
        br));
}

/// int |f - mu(f)|^q dmu.
inline double q_deviation(const Measure1D& mu, const ScalarFunction& f, double q) {
    double m = expectation(mu, f);
    auto br = detail::merge_breaks(detail::kink_breaks(mu, f), detail::sign_changes(mu, [&](double x) { return f(x) - m; }));
    return static_cast<double>(mu.integrate([&](long double x) { return detail::powq(std::abs(detail::ev(f, x) - m), q); }, br));
}

/// int |f'|^q dmu.
inline double dirichlet(const Measure1D& mu, const TestFunction& t, double q = 2.0) {
    auto br = detail::kink_breaks(mu, t.f);
    return static_cast<double>(mu.integrate(
        [&](long double x) {
            long double d = std::abs(detail::ev(t.df, x));
            return detail::powq(d, q);
        },
        br));
}

/// int w(f) H(f'/f) dmu with w(f) = f for densities and f^2 otherwise.
/// Zero where f and f' both vanish, SingularRatio where only f does.
inline double modified_energy(const Measure1D& mu, const TestFunction& t, const ScalarFunction& H) {
    auto br = detail::kink_breaks(mu, t.f);
    double fmax = 0, dmax = 0;
    std::vector<double> probe = br;
    const int scan = 4096;
    for (int i = 0; i <= scan; ++i) probe.push_back(mu.window_lo() + (mu.window_hi() - mu.window_lo()) * i / scan);
    for (const auto& p : mu.support()) {
        if (std::isfinite(p.lo)) probe.push_back(p.lo);
        if (std::isfinite(p.hi)) probe.push_back(p.hi);
    }
    // scales taken where the measure carries its mass
    const long double core = mu.log_density(mu.mode()) - 20;
    for (double x : probe)
        if (mu.in_support(x) && mu.log_density(x) >= core) {
            fmax = std::max(fmax, static_cast<double>(std::abs(detail::ev(t.f, x))));
            dmax = std::max(dmax, static_cast<double>(std::abs(detail::ev(t.df, x))));
        }
    const double ftol = 1e-12 * fmax, dtol = 1e-9 * (1 + dmax);
    auto check = [&](double x, double fv, double dv) {
        if (std::abs(fv) <= ftol && std::abs(dv) > dtol)
            fail(ErrorKind::SingularRatio, "f vanishes where f' does not near x = " + std::to_string(x));
    };
    for (double x : probe)
        if (mu.in_support(x)) check(x, detail::ev(t.f, x), detail::ev(t.df, x));
    const bool dens = t.role == Role::Density;
    return static_cast<double>(mu.integrate(
        [&](long double x) -> long double {
            long double fv = detail::ev(t.f, x), dv = detail::ev(t.df, x);
            if (std::abs(fv) <= ftol) {
                check(static_cast<double>(x), static_cast<double>(fv), static_cast<double>(dv));
                return 0;
            }
            long double w = dens ? fv : fv * fv;
            return w * detail::ev(H, dv / fv);
        },
        br));
}

struct Sides {
    double lhs = 0.0;
    double rhs_term = 0.0;
};

/// Ent(f^2) and int f'^2 log^{1-tau}(e + f^2/int f^2) with f scaled to
/// int f^2 dmu = 1.
inline Sides i_tau_sides(const Measure1D& mu, const TestFunction& t, double tau) {
    if (!(tau > 0 && tau <= 1)) fail(ErrorKind::OutOfRange, "tau must be in (0, 1]");
    auto br = detail::kink_breaks(mu, t.f);
    long double m = mu.integrate([&](long double x) { long double v = detail::ev(t.f, x); return v * v; }, br);
    if (!(m > 0) || !std::isfinite(static_cast<double>(m))) fail(ErrorKind::ZeroMass, "f^2 has no finite positive mass");
    long double ent = mu.integrate([&](long double x) { long double v = detail::ev(t.f, x); return detail::xlogx_shifted(v * v / m); }, br);
    long double e = 1 - tau;
    long double en = mu.integrate(
        [&](long double x) {
            long double v = detail::ev(t.f, x), d = detail::ev(t.df, x);
            long double w = e == 0 ? 1.0L : std::pow(std::log(std::exp(1.0L) + v * v / m), e);
            return d * d * w;
        },
        br);
    return {static_cast<double>(std::max(0.0L, ent)), static_cast<double>(en / m)};
}

/// int g F(g) and int |f'|^q / int |f|^q for g = |f|^q / int |f|^q.
inline Sides f_sobolev_sides(const Measure1D& mu, const TestFunction& t, const EntropyGenerator& F, double q = 2.0) {
    if (!(q >= 1)) fail(ErrorKind::OutOfRange, "q must be at least 1");
    auto br = detail::merge_breaks(detail::kink_breaks(mu, t.f), detail::sign_changes(mu, [&](double x) { return detail::ev(t.f, x); }));
    auto fq = [&](long double x) { return detail::powq(std::abs(detail::ev(t.f, x)), q); };
    long double m = mu.integrate(fq, br);
    if (!(m > 0) || !std::isfinite(static_cast<double>(m))) fail(ErrorKind::ZeroMass, "|f|^q has no finite positive mass");
    long double lhs;
    if (F.is_log) {
        lhs = mu.integrate([&](long double x) { return detail::xlogx_shifted(fq(x) / m); }, br);
    } else {
        lhs = mu.integrate(
            [&](long double x) -> long double {
                long double g = fq(x) / m;
                return g > 0 ? g * detail::ev(F.F, g) : 0.0L;
            },
            br);
    }
    double d = dirichlet(mu, t, q);
    return {static_cast<double>(lhs), static_cast<double>(d / m)};
}

/// Phi_tau(x) = x^2 / log^{1-tau}(e + x^2) as an expression.
inline ScalarFunction phi_tau_function(double tau) {
    auto x = ScalarFunction::variable();
    return x * x / pow(log(std::exp(1.0) + x * x), 1 - tau);
}

/// Smallest L with int Phi(|g|/L) dmu <= 1.
inline double luxemburg_norm(const Measure1D& mu, const ScalarFunction& g, const ScalarFunction& Phi) {
    auto br = detail::merge_breaks(detail::kink_breaks(mu, g), detail::sign_changes(mu, [&](double x) { return g(x); }));
    long double l1 = mu.integrate([&](long double x) { return std::abs(detail::ev(g, x)); }, br);
    if (!(l1 > 0)) fail(ErrorKind::ZeroFunction, "Luxemburg norm of the zero function");
    auto level = [&](double L) {
        return static_cast<double>(mu.integrate([&](long double x) { return detail::ev(Phi, std::abs(detail::ev(g, x)) / (long double)L); }, br));
    };
    double lo = static_cast<double>(l1), hi = lo;
    while (level(lo) < 1) lo *= 0.5;
    while (!(level(hi) <= 1)) hi *= 2;
    // Illinois iteration on log level against log L, close to linear
    double a = std::log(lo), b = std::log(hi);
    double fa = std::log(level(lo)), fb = std::log(level(hi));
    int side = 0;
    for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
        double m = (fa == fb) ? 0.5 * (a + b) : a - fa * (b - a) / (fb - fa);
        if (!(m > a && m < b)) m = 0.5 * (a + b);
        double fm = std::log(level(std::exp(m)));
        if (fm == 0) return std::exp(m);
        if (fm > 0) {
            a = m; fa = fm;
            if (side == -1) fb *= 0.5;
            side = -1;
        } else {
            b = m; fb = fm;
            if (side == 1) fa *= 0.5;
            side = 1;
        }
        if (std::abs(fm) < 1e-15) return std::exp(m);
    }
    return std::exp(0.5 * (a + b));
}

/// 16 (Ent|f - m|^q + int |f - m|^q) - Ent |f|^q.
inline double rothaus_gap(const Measure1D& mu, const ScalarFunction& f, double q) {
    if (!(q > 1 && q <= 2)) fail(ErrorKind::OutOfRange, "q must be in (1, 2]");
    double m = expectation(mu, f);
    auto g = f - m;
    auto ent_q = [&](const ScalarFunction& h) {
        auto br = detail::merge_breaks(detail::kink_breaks(mu, h), detail::sign_changes(mu, [&](double x) { return h(x); }));
        auto hq = [&](long double x) { return detail::powq(std::abs(detail::ev(h, x)), q); };
        long double mass = mu.integrate(hq, br);
        if (!(mass > 0)) return std::pair{0.0L, 0.0L};
        long double e = mu.integrate([&](long double x) { return detail::xlogx_shifted(hq(x) / mass); }, br);
        return std::pair{mass * e, mass};
    };
    auto [ent_f, mass_f] = ent_q(f);
    auto [ent_g, mass_g] = ent_q(g);
    (void)mass_f;
    return static_cast<double>(16 * (ent_g + mass_g) - ent_f);
}

/// int phi^2 / int phi'^2 for phi vanishing at the left end of a half-line.
inline double poincare_ratio(const Measure1D& mu, const TestFunction& t) {
    auto br = detail::kink_breaks(mu, t.f);
    long double num = mu.integrate([&](long double x) { long double v = detail::ev(t.f, x); return v * v; }, br);
    long double den = dirichlet(mu, t, 2.0);
    if (!(den > 0)) fail(ErrorKind::DivisionByZero, "zero Dirichlet energy");
    return static_cast<double>(num / den);
}

}  // namespace ineqforge
