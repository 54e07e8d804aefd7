#pragma once
/// Tightening-constant arithmetic, spectral Poincare constants and
/// best-constant estimation over parametric test-function families.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ineqforge/error.hpp"
#include "ineqforge/expr.hpp"
#include "ineqforge/functionals.hpp"
#include "ineqforge/measure.hpp"
#include "ineqforge/numerics.hpp"
#include "ineqforge/special.hpp"
#include "ineqforge/transport.hpp"

namespace ineqforge {

namespace detail {

inline void require_nonnegative(std::initializer_list<std::pair<const char*, double>> args) {
    for (auto [name, v] : args)
        if (!(v >= 0)) fail(ErrorKind::NegativeConstant, std::string(name) + " must be >= 0");
}

}  // namespace detail

/// 16 (C + (D + 1) E).
inline double rothaus_tight_constant(double C, double D, double E) {
    detail::require_nonnegative({{"C", C}, {"D", D}, {"E", E}});
    return 16 * (C + (D + 1) * E);
}

/// inf{x > 0 : F(x) >= y} for y > 0 and non-decreasing F.
inline double generalized_inverse_plus(const EntropyGenerator& F, double y) {
    if (!(y > 0)) fail(ErrorKind::OutOfRange, "generalized inverse needs y > 0");
    double hi = 2;
    while (!(F(hi) >= y)) {
        hi *= 2;
        if (hi > 1e300) fail(ErrorKind::DomainError, "F stays below the level");
    }
    double lo = 1;  // F(1) = 0 < y
    for (int it = 0; it < 300 && hi - lo > 1e-15 * hi; ++it) {
        double m = 0.5 * (lo + hi);
        if (F(m) >= y) hi = m; else lo = m;
    }
    return hi;
}

struct LpDlsResult {
    double constant = kNaN;
    double r_local = kNaN;   // (1 + (2 * 3^{1/(q-1)})^{-1})^{-1}
    double r_defect = kNaN;  // 1 - 1/(4 F+^{-1}(4(D + M))), NaN without F
    double r = kNaN;         // max of the two
};

/// 6 (2^{q-1} K + C / (4 (D + M))) and the mass thresholds for the local set.
inline LpDlsResult lp_dls_poincare_constant(double q, double C, double D, double M, double K,
                                            const EntropyGenerator* F = nullptr) {
    if (!(q > 1)) fail(ErrorKind::OutOfRange, "q must exceed 1");
    detail::require_nonnegative({{"C", C}, {"D", D}, {"M", M}, {"K", K}});
    if (D + M == 0) fail(ErrorKind::DivisionByZero, "D + M must be positive");
    LpDlsResult r;
    r.constant = 6 * (std::pow(2.0, q - 1) * K + C / (4 * (D + M)));
    r.r_local = 1 / (1 + 1 / (2 * std::pow(3.0, 1 / (q - 1))));
    if (F) r.r_defect = 1 - 1 / (4 * generalized_inverse_plus(*F, 4 * (D + M)));
    r.r = std::isnan(r.r_defect) ? r.r_local : std::max(r.r_local, r.r_defect);
    return r;
}

// ---------------------------------------------------------------------------
// Modified energies

struct TighteningInput {
    double D = 0.0;       // defect constant
    double m = 0.0;       // -inf_{t in (0,1]} t F(t)
    std::optional<double> d;  // slope in F(x) <= d (x - 1) on (0, A^2]
    std::optional<double> A;  // optimized over a grid when absent
    double c_lower = 1.0; // H(x) >= c x^2
    double C_P = 0.0;     // Poincare constant
    double q = 2.0;       // H(x)/x^q non-increasing
    std::optional<double> phi2_max;  // max of (xF)'' on [0, A^2] for the other hypothesis
};

struct TighteningResult {
    double multiplier = kNaN;
    double A = kNaN;
    double gamma = kNaN;
    std::string hypothesis;
    std::vector<std::string> trace;
};

/// 2^q + (gamma + (D + m)(A/(A-1))^2) C_P / c with gamma = 2 d (A+1)^2, or
/// gamma = max (xF)'' (A+1)^2 when only the smoothness hypothesis is given.
inline TighteningResult modified_tight_constant(const TighteningInput& in) {
    detail::require_nonnegative({{"D", in.D}, {"m", in.m}, {"d", in.d.value_or(0.0)}, {"C_P", in.C_P}});
    if (!(in.c_lower > 0)) fail(ErrorKind::OutOfRange, "c_lower must be positive");
    if (!(in.q >= 2)) fail(ErrorKind::OutOfRange, "q must be >= 2");
    // the slope hypothesis gives an exact gamma and wins when both are present
    if (!in.d && !in.phi2_max) fail(ErrorKind::ConfigError, "need the slope d or max (xF)''");
    const bool slope_path = in.d.has_value();
    auto eval = [&](double A, TighteningResult* out) {
        if (!(A > 1)) fail(ErrorKind::OutOfRange, "A must exceed 1");
        double g = slope_path ? 2 * *in.d * (A + 1) * (A + 1) : *in.phi2_max * (A + 1) * (A + 1);
        double r = A / (A - 1);
        double var = g + (in.D + in.m) * r * r;
        double mult = std::pow(2.0, in.q) + var * in.C_P / in.c_lower;
        if (!std::isfinite(mult)) fail(ErrorKind::BlowUp, "multiplier is not finite at this A");
        if (out) {
            char buf[200];
            out->A = A;
            out->gamma = g;
            out->multiplier = mult;
            out->hypothesis = slope_path ? "slope" : "smooth";
            std::snprintf(buf, sizeof buf, "gamma = %s (A+1)^2 = %.17g", slope_path ? "2 d" : "max (xF)''", g);
            out->trace.push_back(buf);
            std::snprintf(buf, sizeof buf, "variance factor = gamma + (D+m)(A/(A-1))^2 = %.17g", var);
            out->trace.push_back(buf);
            std::snprintf(buf, sizeof buf, "multiplier = 2^q + factor * C_P / c = %.17g", mult);
            out->trace.push_back(buf);
        }
        return mult;
    };
    TighteningResult res;
    if (in.A) {
        if (*in.A - 1 < 1e-12) fail(ErrorKind::BlowUp, "(A/(A-1))^2 diverges as A -> 1");
        eval(*in.A, &res);
        return res;
    }
    double bestA = 2, best = kInf;
    for (int i = 1; i <= 4000; ++i) {
        double A = 1 + 1e-3 * std::pow(1e4, i / 4000.0);  // (1, 11]
        double v = eval(A, nullptr);
        if (v < best) { best = v; bestA = A; }
    }
    auto [A, v] = golden_max([&](double a) { return -eval(a, nullptr); }, std::max(1 + 1e-6, bestA * 0.99), bestA * 1.01);
    (void)v;
    eval(A, &res);
    res.trace.insert(res.trace.begin(), "A optimized on a grid over (1, 11]");
    return res;
}

/// -inf_{t in (0, 1]} t F(t).
inline double generator_m(const EntropyGenerator& F) {
    double lo = 0, at = 1;
    auto g = [&](double t) { return t * F(t); };
    for (int i = 1; i <= 20000; ++i) {
        double t = std::pow(10.0, -12.0 * (1 - i / 20000.0));
        double v = g(t);
        if (std::isfinite(v) && v < lo) { lo = v; at = t; }
    }
    auto [t, v] = golden_max([&](double s) { return -g(s); }, at * 0.998, std::min(1.0, at * 1.002));
    (void)t;
    return std::max(-lo, v);
}

/// Smallest d with F(x) <= d (x - 1) on (0, A^2], or NaN if none exists.
inline double generator_d(const EntropyGenerator& F, double A) {
    double need = 0, cap = kInf;
    for (int i = 1; i <= 20000; ++i) {
        double x = A * A * i / 20000.0;
        if (std::abs(x - 1) < 1e-6) continue;
        double r = F(x) / (x - 1);
        if (x > 1) need = std::max(need, r);
        else cap = std::min(cap, r);
    }
    return need <= cap * (1 + 1e-9) + 1e-12 ? need : kNaN;
}

/// max of (x F(x))'' on (0, A^2] from second differences.
inline double generator_phi2_max(const EntropyGenerator& F, double A) {
    const int n = 20000;
    double h = A * A / n, best = -kInf;
    auto phi = [&](double x) { return x * F(x); };
    for (int i = 1; i < n; ++i) {
        double x = h * i;
        best = std::max(best, (phi(x + h) - 2 * phi(x) + phi(x - h)) / (h * h));
    }
    return best;
}

// ---------------------------------------------------------------------------
// Spectral Poincare constant

namespace detail {

/// Eigenvalues below lambda of the symmetric tridiagonal (d, e).
inline int sturm_count(const std::vector<long double>& d, const std::vector<long double>& e, long double lambda) {
    int count = 0;
    long double q = d[0] - lambda;
    if (q < 0) ++count;
    for (std::size_t i = 1; i < d.size(); ++i) {
        if (q == 0) q = 1e-300L;
        q = d[i] - lambda - e[i - 1] * e[i - 1] / q;
        if (q < 0) ++count;
    }
    return count;
}

/// Smallest nonzero Neumann eigenvalue of -(rho u')' = lambda rho u on
/// [lo, hi], P1 elements with lumped mass on n cells.
inline double neumann_gap(const Measure1D& mu, double lo, double hi, int n) {
    using LD = long double;
    std::vector<LD> rho(n), mass(n + 1, 0);
    LD h = (LD(hi) - lo) / n;
    LD peak = -std::numeric_limits<LD>::infinity();
    std::vector<LD> lr(n);
    for (int i = 0; i < n; ++i) {
        lr[i] = mu.log_density(lo + (i + 0.5L) * h);
        peak = std::max(peak, lr[i]);
    }
    for (int i = 0; i < n; ++i) rho[i] = std::exp(lr[i] - peak);
    for (int i = 0; i < n; ++i) {
        mass[i] += rho[i] * h / 2;
        mass[i + 1] += rho[i] * h / 2;
    }
    std::vector<LD> d(n + 1, 0), e(n, 0);
    for (int i = 0; i < n; ++i) {
        LD k = rho[i] / h;
        d[i] += k;
        d[i + 1] += k;
        e[i] = -k;
    }
    for (int i = 0; i <= n; ++i) d[i] /= mass[i];
    for (int i = 0; i < n; ++i) e[i] /= std::sqrt(mass[i] * mass[i + 1]);
    // drop nodes with negligible mass at the window edges
    std::size_t a = 0, b = d.size();
    while (a + 3 < b && mass[a] < 1e-40L) ++a;
    while (b > a + 3 && mass[b - 1] < 1e-40L) --b;
    std::vector<LD> dd(d.begin() + a, d.begin() + b), ee(e.begin() + a, e.begin() + (b - 1));
    LD upper = 0;
    for (std::size_t i = 0; i < dd.size(); ++i) {
        LD r = std::abs(dd[i]);
        if (i > 0) r += std::abs(ee[i - 1]);
        if (i + 1 < dd.size()) r += std::abs(ee[i]);
        upper = std::max(upper, r);
    }
    LD l = 0, u = upper;
    for (int it = 0; it < 400 && u - l > 1e-16L * u; ++it) {
        LD m = 0.5L * (l + u);
        if (sturm_count(dd, ee, m) >= 2) u = m; else l = m;
    }
    return static_cast<double>(0.5L * (l + u));
}

}  // namespace detail

struct SpectralResult {
    double gap = kNaN;       // lambda_1
    double constant = kNaN;  // 1 / lambda_1
    double coarse = kNaN;    // gap at half resolution
};

/// Poincare constant 1/lambda_1 of mu on its truncation window, Richardson
/// extrapolated from n and 2n cells.
inline SpectralResult poincare_constant(const Measure1D& mu, int n = 4000) {
    if (mu.window().size() != 1) fail(ErrorKind::InvalidSupport, "spectral gap needs a connected support");
    double g1 = detail::neumann_gap(mu, mu.window_lo(), mu.window_hi(), n);
    double g2 = detail::neumann_gap(mu, mu.window_lo(), mu.window_hi(), 2 * n);
    SpectralResult r;
    r.coarse = g1;
    r.gap = (4 * g2 - g1) / 3;
    r.constant = 1 / r.gap;
    return r;
}

/// Poincare constant of mu conditioned on the interval centered at the mode
/// with mass r (the smallest such interval in that family).
inline double local_poincare_kappa(const Measure1D& mu, double r, int n = 2000) {
    if (!(r > 0 && r < 1)) fail(ErrorKind::OutOfRange, "mass level must be in (0, 1)");
    double x0 = mu.mode();
    auto mass = [&](double R) { return mu.mass({{x0 - R, x0 + R}}); };
    double hi = 1;
    while (mass(hi) < r) hi *= 2;
    double R = bisect_increasing(mass, r, 0.0, hi);
    auto cond = condition(mu, {{x0 - R, x0 + R}});
    return poincare_constant(cond, n).constant;
}

// ---------------------------------------------------------------------------
// Families and best constants

struct FunctionFamily {
    std::string name;
    std::vector<double> lo, hi;  // parameter box
    std::function<TestFunction(const std::vector<double>&)> make;
    std::size_t dim() const { return lo.size(); }
};

enum class InequalityKind { LSI, QLSI, Poincare, PoincareZero, Talagrand, ITau };

struct InequalitySpec {
    InequalityKind kind = InequalityKind::LSI;
    double q = 2.0;
    double tau = 1.0;
    std::string name;
};

inline InequalitySpec inequality_from_name(const std::string& s) {
    auto colon = s.find(':');
    std::string head = s.substr(0, colon), rest = colon == std::string::npos ? "" : s.substr(colon + 1);
    InequalitySpec r;
    r.name = s;
    if (head == "lsi") r.kind = InequalityKind::LSI;
    else if (head == "qlsi") { r.kind = InequalityKind::QLSI; r.q = parse_number(rest, "q"); }
    else if (head == "poincare") r.kind = InequalityKind::Poincare;
    else if (head == "poincare0") r.kind = InequalityKind::PoincareZero;
    else if (head == "talagrand") r.kind = InequalityKind::Talagrand;
    else if (head == "itau") { r.kind = InequalityKind::ITau; r.tau = parse_number(rest, "tau"); }
    else fail(ErrorKind::ParseError, "unknown inequality '" + s + "'");
    if (r.kind == InequalityKind::QLSI && !(r.q > 1 && r.q <= 2)) fail(ErrorKind::OutOfRange, "q-LSI needs q in (1, 2]");
    if (r.kind == InequalityKind::ITau && !(r.tau > 0 && r.tau <= 1)) fail(ErrorKind::OutOfRange, "tau must be in (0, 1]");
    return r;
}

namespace detail {

/// The log integrand log|f|^p + log rho must fall far below its peak along
/// doubling distances, so truncation-window values are not mistaken for
/// integrals of non-integrable functions.
inline bool tail_admissible(const Measure1D& mu, const ScalarFunction& f, double p) {
    auto li = [&](double x) {
        long double v = std::abs(ev(f, x));
        return static_cast<double>(p * std::log(v) + mu.log_density(x));
    };
    double x0 = mu.mode();
    double peak = -kInf;
    for (int i = 0; i <= 64; ++i) {
        double v = li(mu.window_lo() + (mu.window_hi() - mu.window_lo()) * i / 64);
        if (!std::isnan(v)) peak = std::max(peak, v);
    }
    double r = std::max({1.0, x0 - mu.window_lo(), mu.window_hi() - x0});
    for (double dir : {-1.0, 1.0}) {
        double end = dir < 0 ? mu.support_lo() : mu.support_hi();
        if (std::isfinite(end)) continue;
        // Stop at the first point where f itself overflows; the integrator
        // extrapolates from there.
        double prev = kInf;
        int reached = -1;
        for (int k = 0; k <= 10; ++k) {
            double v = li(x0 + dir * r * std::ldexp(1.0, k));
            if (!std::isfinite(v) && !(v == -kInf)) break;
            if (k >= 4 && !(v <= prev)) return false;
            prev = v;
            reached = k;
        }
        if (reached < 5 || !(prev < peak - 30)) return false;
    }
    return true;
}

}  // namespace detail

struct RatioSides {
    double lhs = 0.0;     // entropy-type side
    double energy = 0.0;  // energy-type side
    double ratio() const { return energy > 0 ? lhs / energy : (lhs > 0 ? kInf : 0.0); }
};

/// Both sides of the named inequality for one test function.
inline RatioSides inequality_sides(const Measure1D& mu, const InequalitySpec& ineq, const TestFunction& t,
                                   int transport_resolution = 2048) {
    RatioSides s;
    switch (ineq.kind) {
        case InequalityKind::LSI:
            s.lhs = entropy(mu, t.with_role(Role::Generic));
            s.energy = dirichlet(mu, t, 2.0);
            break;
        case InequalityKind::QLSI:
            s.lhs = entropy(mu, pow(abs(t.f), ineq.q));
            s.energy = dirichlet(mu, t, ineq.q);
            break;
        case InequalityKind::Poincare:
            s.lhs = variance(mu, t.f);
            s.energy = dirichlet(mu, t, 2.0);
            break;
        case InequalityKind::PoincareZero:
            s.lhs = expectation(mu, t.f * t.f);
            s.energy = dirichlet(mu, t, 2.0);
            break;
        case InequalityKind::Talagrand: {
            auto dens = abs(t.f);
            double m = expectation(mu, dens);
            if (!(m > 0)) fail(ErrorKind::ZeroMass, "density has no mass");
            auto f = dens / m;
            auto plan = quantile_coupling(mu, f, ScalarFunction::constant(1.0), transport_resolution);
            s.lhs = 2 * transport_cost(plan, quad_cost());
            s.energy = entropy(mu, f);
            break;
        }
        case InequalityKind::ITau: {
            auto sd = i_tau_sides(mu, t, ineq.tau);
            s.lhs = sd.lhs;
            s.energy = sd.rhs_term;
            break;
        }
    }
    return s;
}

namespace detail {

inline double integrability_power(const InequalitySpec& ineq) {
    switch (ineq.kind) {
        case InequalityKind::QLSI: return ineq.q;
        case InequalityKind::Talagrand: return 1.0;
        default: return 2.0;
    }
}

}  // namespace detail

/// Ratio lhs/energy, or -inf when the function is not admissible.
inline double inequality_ratio(const Measure1D& mu, const InequalitySpec& ineq, const TestFunction& t,
                               RatioSides* sides = nullptr) {
    if (!detail::tail_admissible(mu, t.f, detail::integrability_power(ineq))) return -kInf;
    if (!detail::tail_admissible(mu, t.df, ineq.kind == InequalityKind::QLSI ? ineq.q : 2.0)) return -kInf;
    try {
        auto s = inequality_sides(mu, ineq, t);
        if (sides) *sides = s;
        double r = s.ratio();
        return std::isfinite(r) ? r : -kInf;
    } catch (const Error&) {
        return -kInf;
    }
}

/// Shipped families for a measure. Boundary inequalities get members
/// vanishing at the finite left end of the support.
inline FunctionFamily family_from_name(const std::string& name, const Measure1D& mu, const InequalitySpec& ineq) {
    auto x = ScalarFunction::variable();
    double q01 = mu.quantile(0.01), q99 = mu.quantile_sf(0.01);
    double scale = std::max(q99 - q01, 1e-6), x0 = mu.mode();
    FunctionFamily fam;
    fam.name = name;
    std::function<ScalarFunction(const std::vector<double>&)> body;
    if (name == "tilts") {
        fam.lo = {-3.0};
        fam.hi = {3.0};
        body = [x](const std::vector<double>& p) { return exp(p[0] * x); };
    } else if (name == "bumps") {
        fam.lo = {q01, 0.02 * scale};
        fam.hi = {q99, scale};
        body = [x](const std::vector<double>& p) { return exp(-0.5 * pow((x - p[0]) / p[1], 2.0)); };
    } else if (name == "halflines") {
        fam.lo = {q01, 0.01 * scale};
        fam.hi = {q99, 0.5 * scale};
        body = [x](const std::vector<double>& p) { return 1.0 / (1.0 + exp(-(x - p[0]) / p[1])); };
    } else if (name == "hermite") {
        fam.lo = {-1, -1, -1, -1};
        fam.hi = {1, 1, 1, 1};
        double sd = scale / 4.65;
        // 1 + sum p_k He_k(u), u = (x - x0)/sd, expanded in Horner form
        body = [x, x0, sd](const std::vector<double>& p) {
            double c[5] = {1 - p[1] + 3 * p[3], p[0] - 3 * p[2], p[1] - 6 * p[3], p[2], p[3]};
            auto u = (x - x0) / sd;
            ScalarFunction h = ScalarFunction::constant(c[4]);
            for (int k = 3; k >= 0; --k) h = h * u + c[k];
            return h;
        };
    } else if (name == "constant") {
        body = [](const std::vector<double>&) { return ScalarFunction::constant(1.0); };
    } else {
        fail(ErrorKind::ParseError, "unknown family '" + name + "'");
    }
    bool zero_left = ineq.kind == InequalityKind::PoincareZero;
    if (zero_left && !std::isfinite(mu.support_lo()))
        fail(ErrorKind::DomainError, "boundary inequality needs a finite left end");
    double a = mu.support_lo();
    Role role = ineq.kind == InequalityKind::Talagrand ? Role::Density : Role::Generic;
    fam.make = [body, zero_left, a, role, name](const std::vector<double>& p) {
        ScalarFunction f = body(p);
        if (zero_left) f = f - f(a);
        std::string label = name + ":";
        char buf[40];
        for (std::size_t i = 0; i < p.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%s%.17g", i ? "," : "", p[i]);
            label += buf;
        }
        return TestFunction(f, role, label);
    };
    return fam;
}

struct ConstantEstimate {
    InequalityReport report;  // C = supremum ratio found, lhs/rhs at the maximizer
    std::string family;
    std::vector<double> params;
    int evaluations = 0;
    int budget = 0;
    std::uint64_t seed = 0;
};

/// Lower bound on the best constant: max of lhs/energy over the family by
/// Nelder-Mead from 8 random starts.
inline ConstantEstimate estimate_best_constant(const Measure1D& mu, const InequalitySpec& ineq,
                                               const std::vector<FunctionFamily>& families, int budget = 150,
                                               std::uint64_t seed = 1, int restarts = 8) {
    if (families.empty()) fail(ErrorKind::EmptyFamily, "no families given");
    struct Run {
        double value = -kInf;
        std::vector<double> x;
        int evals = 0;
        std::size_t fam = 0;
    };
    std::vector<std::pair<std::size_t, int>> jobs;
    for (std::size_t f = 0; f < families.size(); ++f)
        for (int k = 0; k < (families[f].dim() ? restarts : 1); ++k) jobs.push_back({f, k});
    std::vector<Run> runs(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t j) {
        auto [fi, k] = jobs[j];
        const auto& fam = families[fi];
        Run& r = runs[j];
        r.fam = fi;
        auto obj = [&](const std::vector<double>& p) { return inequality_ratio(mu, ineq, fam.make(p)); };
        if (fam.dim() == 0) {
            r.value = obj({});
            r.evals = 1;
            return;
        }
        std::mt19937_64 rng(seed * 1000003u + fi * 7919u + static_cast<std::uint64_t>(k));
        std::vector<double> start(fam.dim());
        for (std::size_t i = 0; i < fam.dim(); ++i) {
            std::uniform_real_distribution<double> U(fam.lo[i], fam.hi[i]);
            start[i] = U(rng);
        }
        auto res = nelder_mead_max(obj, start, fam.lo, fam.hi, budget);
        r.value = res.value;
        r.x = res.x;
        r.evals = res.evaluations;
    });
    // deterministic merge: larger value, then family order, then parameters
    std::size_t best = 0;
    int evals = 0;
    for (std::size_t j = 0; j < runs.size(); ++j) {
        evals += runs[j].evals;
        const auto& a = runs[j];
        const auto& b = runs[best];
        if (a.value > b.value || (a.value == b.value && (a.fam < b.fam || (a.fam == b.fam && a.x < b.x)))) best = j;
    }
    const Run& r = runs[best];
    ConstantEstimate est;
    est.family = families[r.fam].name;
    est.params = r.x;
    est.evaluations = evals;
    est.budget = budget;
    est.seed = seed;
    auto t = families[r.fam].make(r.x);
    RatioSides s;
    double ratio = inequality_ratio(mu, ineq, t, &s);
    if (!std::isfinite(ratio)) {
        s = {};
        ratio = 0;
    }
    est.report = make_report(ineq.name, 0.0, ratio, s.lhs, ratio * s.energy, t);
    return est;
}

/// Random admissible members of the families, for checking a constant.
inline std::vector<TestFunction> random_test_functions(const Measure1D& mu, const InequalitySpec& ineq,
                                                       const std::vector<FunctionFamily>& families, int count,
                                                       std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<TestFunction> out;
    int guard = 0;
    while (static_cast<int>(out.size()) < count && guard++ < 100 * count) {
        const auto& fam = families[out.size() % families.size()];
        std::vector<double> p(fam.dim());
        for (std::size_t i = 0; i < p.size(); ++i) {
            std::uniform_real_distribution<double> U(fam.lo[i], fam.hi[i]);
            p[i] = U(rng);
        }
        auto t = fam.make(p);
        if (std::isfinite(inequality_ratio(mu, ineq, t))) out.push_back(t);
    }
    return out;
}

}  // namespace ineqforge
