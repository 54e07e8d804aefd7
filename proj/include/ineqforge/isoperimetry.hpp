#pragma once
/// Half-line isoperimetric profiles, Cheeger constants and profile comparisons.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "ineqforge/error.hpp"
#include "ineqforge/expr.hpp"
#include "ineqforge/measure.hpp"
#include "ineqforge/numerics.hpp"
#include "ineqforge/special.hpp"
#include "ineqforge/transport.hpp"

namespace ineqforge {

enum class HalfLine { Left, Right };

/// Level grid on (0, 1): geometric towards both ends, uniform in the middle.
inline std::vector<double> profile_grid(int per_side = 400, double t_min = 1e-12) {
    std::vector<double> t;
    double lmin = std::log(t_min), lmid = std::log(0.05);
    for (int i = 0; i < per_side; ++i) t.push_back(std::exp(lmin + (lmid - lmin) * i / per_side));
    for (int i = 0; i <= 180; ++i) t.push_back(0.05 + 0.9 * i / 180.0);
    for (int i = per_side - 1; i >= 0; --i) t.push_back(1 - std::exp(lmin + (lmid - lmin) * i / per_side));
    // 1 - tiny rounds; keep the grid strictly increasing
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    return t;
}

namespace detail {

/// Boundary density at x: the larger one-sided limit.
inline double boundary_density(const Measure1D& mu, double x) {
    double d = 1e-12 * (1 + std::abs(x));
    return std::max({mu.density(x), mu.density(x - d), mu.density(x + d)});
}

/// Second differences of V on the window are nonnegative.
inline bool looks_log_concave(const Measure1D& mu, int scan = 4096) {
    double lo = mu.window_lo(), hi = mu.window_hi();
    double h = (hi - lo) / scan;
    for (int i = 1; i < scan; ++i) {
        double x = lo + h * i;
        if (!mu.in_support(x - h) || !mu.in_support(x + h)) continue;
        long double a = -mu.raw_log_density(x - h), b = -mu.raw_log_density(x), c = -mu.raw_log_density(x + h);
        if (!std::isfinite(static_cast<double>(a + b + c))) return false;
        if (a + c - 2 * b < -1e-9L * (1 + std::abs(b))) return false;
    }
    // a gap inside the support breaks log-concavity
    return mu.support().size() == 1;
}

}  // namespace detail

struct IsoProfile {
    Measure1D measure;
    std::vector<double> t, I;
    std::vector<HalfLine> side;
    bool upper_bound_only = false;

    /// Minimal boundary density over the two half-lines of mass t.
    static std::pair<double, HalfLine> evaluate(const Measure1D& mu, double t) {
        if (!(t > 0 && t < 1)) fail(ErrorKind::OutOfRange, "profile level must be in (0, 1)");
        double xl = t <= 0.5 ? mu.quantile(t) : mu.quantile_sf(1 - t);
        double xr = t <= 0.5 ? mu.quantile_sf(t) : mu.quantile(1 - t);
        double il = detail::boundary_density(mu, xl), ir = detail::boundary_density(mu, xr);
        return il <= ir ? std::pair{il, HalfLine::Left} : std::pair{ir, HalfLine::Right};
    }
    double at(double level) const { return evaluate(measure, level).first; }

    std::string csv(double alpha) const {
        std::string out = "t,I,L_alpha,ratio\n";
        char buf[160];
        for (std::size_t i = 0; i < t.size(); ++i) {
            double l = L_alpha(alpha, t[i]);
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", t[i], I[i], l, I[i] / l);
            out += buf;
        }
        return out;
    }
};

inline IsoProfile halfline_profile(const Measure1D& mu, std::vector<double> grid = {}) {
    if (grid.empty()) grid = profile_grid();
    IsoProfile p;
    p.measure = mu;
    p.t = grid;
    p.I.resize(grid.size());
    p.side.resize(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        auto [v, s] = IsoProfile::evaluate(mu, grid[i]);
        p.I[i] = v;
        p.side[i] = s;
    });
    p.upper_bound_only = !detail::looks_log_concave(mu);
    return p;
}

/// sup_t min(t, 1 - t) / I(t) over half-lines, refined around the grid maximum.
inline double cheeger_constant(const IsoProfile& p) {
    std::size_t best = 0;
    double bv = -kInf;
    for (std::size_t i = 0; i < p.t.size(); ++i) {
        double r = std::min(p.t[i], 1 - p.t[i]) / p.I[i];
        if (r > bv) { bv = r; best = i; }
    }
    double lo = p.t[best > 0 ? best - 1 : 0], hi = p.t[std::min(best + 1, p.t.size() - 1)];
    auto [x, v] = golden_max([&](double t) { return std::min(t, 1 - t) / p.at(t); }, lo, hi, 1e-12);
    (void)x;
    return std::max(bv, v);
}

inline double cheeger_constant(const Measure1D& mu) { return cheeger_constant(halfline_profile(mu)); }

struct KappaResult {
    double kappa = kInf;
    double argmin = kNaN;
    std::size_t index = 0;
    bool endpoint_attained = false;   // the infimum sits on the first or last grid level
    bool decreasing_to_edge = false;  // ratios keep falling towards that edge
};

/// inf_t I(t) / L_alpha(t) over the profile grid.
inline KappaResult profile_ratio_kappa(const IsoProfile& p, double alpha, double tie_tol = 1e-9) {
    KappaResult r;
    std::vector<double> ratio(p.t.size());
    for (std::size_t i = 0; i < p.t.size(); ++i) {
        ratio[i] = p.I[i] / L_alpha(alpha, p.t[i]);
        if (ratio[i] < r.kappa) { r.kappa = ratio[i]; r.argmin = p.t[i]; r.index = i; }
    }
    double interior = kInf;
    for (std::size_t i = 1; i + 1 < ratio.size(); ++i) interior = std::min(interior, ratio[i]);
    double ends = std::min(ratio.front(), ratio.back());
    r.endpoint_attained = ends < interior * (1 - tie_tol);
    if (r.endpoint_attained) {
        bool left = ratio.front() <= ratio.back();
        std::size_t n = std::min<std::size_t>(40, ratio.size() / 4);
        bool dec = true;
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t i = left ? k : ratio.size() - 1 - k, j = left ? k + 1 : ratio.size() - 2 - k;
            if (ratio[i] > ratio[j]) dec = false;
        }
        r.decreasing_to_edge = dec;
    }
    return r;
}

// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<Interval> complement(const std::vector<Interval>& A) {
    auto a = normalize_pieces(A);
    std::vector<Interval> out;
    double cur = -kInf;
    for (const auto& p : a) {
        if (p.lo > cur) out.push_back({cur, p.lo});
        cur = std::max(cur, p.hi);
    }
    if (cur < kInf) out.push_back({cur, kInf});
    return out;
}

}  // namespace detail

/// Sum of boundary densities at the finite endpoints of a union of intervals.
inline double boundary_measure(const Measure1D& mu, const std::vector<Interval>& A) {
    double s = 0;
    for (const auto& p : detail::normalize_pieces(A))
        for (double e : {p.lo, p.hi})
            if (std::isfinite(e)) s += detail::boundary_density(mu, e);
    return s;
}

struct BobkovMargin {
    double lhs = 0.0, rhs = 0.0, margin = 0.0;
    double mass_A = 0.0, boundary = 0.0, cost_A = 0.0, cost_Ac = 0.0;
};

/// Entropy of the split {A, A^c} plus log mu(B_r) against
/// 2 r mu+(dA) + mu(A) W_c(mu_A, mu_B) + mu(A^c) W_c(mu_{A^c}, mu_B),
/// with B_r the ball of radius r around x0 (the mode by default).
inline BobkovMargin bobkov_lemma_margin(const Measure1D& mu, const std::vector<Interval>& A, double r,
                                        const CostFunction& c, std::optional<double> x0 = std::nullopt,
                                        int resolution = 4096) {
    if (!(r > 0)) fail(ErrorKind::OutOfRange, "radius must be positive");
    double center = x0.value_or(mu.mode());
    std::vector<Interval> ball{{center - r, center + r}};
    auto Ac = detail::complement(A);
    BobkovMargin m;
    double a = mu.mass(A), ac = mu.mass(Ac), b = mu.mass(ball);
    if (!(b > 0)) fail(ErrorKind::NullSet, "ball has zero mass");
    auto xlog = [](double v) { return v > 0 ? -v * std::log(v) : 0.0; };
    m.mass_A = a;
    m.lhs = xlog(a) + xlog(ac) + std::log(b);
    m.boundary = boundary_measure(mu, A);
    auto mb = condition(mu, ball);
    if (a > 0) m.cost_A = transport_cost(quantile_coupling(condition(mu, A), mb, resolution), c);
    if (ac > 0) m.cost_Ac = transport_cost(quantile_coupling(condition(mu, Ac), mb, resolution), c);
    m.rhs = 2 * r * m.boundary + a * m.cost_A + ac * m.cost_Ac;
    m.margin = m.rhs - m.lhs;
    return m;
}

// ---------------------------------------------------------------------------

struct IntegrabilityVerdict {
    bool finite = false;
    double value = kNaN;      // integral estimate when finite
    double log_value = kNaN;  // log of the accumulated integral
    double tail_slope = kNaN; // d/du of the log integrand at the deepest level
    double u_max = kNaN;
    std::string detail;
};

/// Verdict on int_0^eta Phi(delta c(t F(1/t) / I(t))) dt, written in
/// u = log(1/t) as int exp(log Phi(...) - u) du and accumulated over shells.
inline IntegrabilityVerdict profile_integrability_condition(const IsoProfile& profile, const EntropyGenerator& F, const CostFunction& c,
                                             double delta, double eta, double rel_tol = 1e-3) {
    if (!(delta > 0)) fail(ErrorKind::OutOfRange, "delta must be positive");
    if (!(eta > 0 && eta < 1)) fail(ErrorKind::OutOfRange, "eta must be in (0, 1)");
    const Measure1D& mu = profile.measure;
    IntegrabilityVerdict v;
    // deepest level the measure resolves: tail masses are tracked to the window edge
    double u_max = std::min(690.0, mu.options().tail_depth - 5);
    v.u_max = u_max;
    double u0 = -std::log(eta);
    if (!(u_max > u0 + 1)) fail(ErrorKind::WindowTooSmall, "profile is not deep enough for this eta");
    auto log_integrand = [&](double u) -> double {
        double t = std::exp(-u);
        double I = profile.at(t);
        if (!(I > 0)) return kInf;
        double z = t * F(1 / t) / I;
        double arg = delta * c(z);
        auto ph = phi_from_generator(F, arg);
        if (!ph.finite) return kInf;
        return ph.log_value - u;
    };
    // Simpson in u on quarter-width cells, log-sum-exp accumulation
    const int cells = static_cast<int>(std::ceil(4 * (u_max - u0)));
    const double h = (u_max - u0) / cells;
    std::vector<double> lg(2 * cells + 1);
    for (int i = 0; i <= 2 * cells; ++i) lg[i] = log_integrand(u0 + 0.5 * h * i);
    std::vector<long double> terms;
    std::vector<double> cum;  // log of the integral up to u0 + h k
    for (int k = 0; k < cells; ++k) {
        double a = lg[2 * k], m = lg[2 * k + 1], b = lg[2 * k + 2];
        if (a == kInf || m == kInf || b == kInf) {
            v.detail = "integrand exceeds the representable range";
            v.log_value = kInf;
            v.value = kInf;
            return v;
        }
        double top = std::max({a, m, b});
        if (std::isfinite(top))
            terms.push_back(top + std::log(h / 6 * (std::exp(a - top) + 4 * std::exp(m - top) + std::exp(b - top))));
        cum.push_back(static_cast<double>(terms.empty() ? -kInf : log_sum_exp(terms)));
    }
    v.log_value = cum.back();
    // slope of the log integrand over the last quarter
    std::size_t n = lg.size(), q = n / 4;
    v.tail_slope = (lg[n - 1] - lg[n - 1 - q]) / (0.5 * h * q);
    // the last half of the range must add a vanishing share, and the
    // extrapolated remainder exp(lg_end)/|slope| must be small
    double half = cum[cum.size() / 2];
    double share = 1 - std::exp(half - v.log_value);
    double rest = v.tail_slope < 0 ? lg[n - 1] - std::log(-v.tail_slope) - v.log_value : kInf;
    v.finite = v.tail_slope < 0 && share < rel_tol && rest < std::log(rel_tol);
    v.value = v.finite ? std::exp(v.log_value) : kInf;
    char buf[160];
    std::snprintf(buf, sizeof buf, "slope %.6g, late share %.3g, log remainder %.6g", v.tail_slope, share, rest);
    v.detail = buf;
    return v;
}

// ---------------------------------------------------------------------------

/// a log(1/a) / psi^{-1}(log(K/a)) on the given levels.
inline std::vector<double> profile_from_tail(const ScalarFunction& psi, double K, const std::vector<double>& levels) {
    std::vector<double> out;
    for (double a : levels) {
        if (!(a > 0 && a < 1)) fail(ErrorKind::OutOfRange, "levels must be in (0, 1)");
        double y = std::log(K / a);
        double p0 = psi(0.0);
        if (!(y > p0)) fail(ErrorKind::DomainError, "log(K/a) is not in the range of psi beyond psi(0)");
        double hi = 1;
        while (psi(hi) < y) {
            hi *= 2;
            if (hi > 1e300) fail(ErrorKind::DomainError, "log(K/a) is beyond the range of psi");
        }
        double r = bisect_increasing([&](double s) { return psi(s); }, y, 0.0, hi);
        if (!(r > 0)) fail(ErrorKind::DomainError, "psi inverse vanishes");
        out.push_back(a * std::log(1 / a) / r);
    }
    return out;
}

/// Constant c with I >= c L on every level, from I >= c0 L below eps and a
/// Cheeger bound for the measure conditioned on a ball of mass 1 - eps/2.
struct IsoExtension {
    double c = 0.0;
    double radius = 0.0;
    double local_cheeger = 0.0;  // lower bound on the conditioned profile
};

inline IsoExtension iso_tight_extension(const Measure1D& mu, const std::function<double(double)>& L, double c0,
                                        double eps) {
    if (!(eps > 0 && eps < 0.5)) fail(ErrorKind::OutOfRange, "eps must be in (0, 1/2)");
    double x0 = mu.mode();
    double target = 1 - eps / 2;
    auto ball_mass = [&](double R) { return mu.mass({{x0 - R, x0 + R}}); };
    double hi = 1;
    while (ball_mass(hi) < target) hi *= 2;
    double R = bisect_increasing(ball_mass, target, 0.0, hi);
    auto cond = condition(mu, {{x0 - R, x0 + R}});
    double s1 = eps / (2 - eps), s2 = (1 - eps) / (1 - eps / 2);
    double K = kInf;
    for (int i = 0; i <= 400; ++i) {
        double s = s1 + (s2 - s1) * i / 400;
        K = std::min(K, IsoProfile::evaluate(cond, s).first);
    }
    double Lmax = 0;
    for (int i = 0; i <= 400; ++i) Lmax = std::max(Lmax, L(eps + (0.5 - eps) * i / 400));
    IsoExtension e;
    e.radius = R;
    e.local_cheeger = K;
    e.c = std::min(c0, (1 - eps / 2) * K / Lmax);
    return e;
}

}  // namespace ineqforge
