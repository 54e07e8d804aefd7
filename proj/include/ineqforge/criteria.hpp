#pragma once
/// Sufficient-condition checkers on one-dimensional potentials. Every
/// negative verdict carries a witness and a long double re-check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ineqforge/error.hpp"
#include "ineqforge/expr.hpp"
#include "ineqforge/measure.hpp"
#include "ineqforge/numerics.hpp"
#include "ineqforge/special.hpp"

namespace ineqforge {

enum class Holds { Yes, No, NumericOnly };

inline const char* to_string(Holds h) {
    switch (h) {
        case Holds::Yes: return "yes";
        case Holds::No: return "no";
        case Holds::NumericOnly: return "numeric-only";
    }
    return "?";
}

struct CriterionVerdict {
    std::string name;
    Holds holds = Holds::NumericOnly;
    std::map<std::string, double> params;
    std::vector<double> witness;
    double violation = 0.0;  // amount by which the inequality fails at the witness
    int scan_points = 0;
    std::string detail;
    /// Violation at a point, recomputed in long double.
    std::function<long double(const std::vector<double>&)> check;

    long double reverify() const { return check && !witness.empty() ? check(witness) : 0.0L; }
};

struct ScanOptions {
    Interval range{-10.0, 10.0};
    int base = 2048;
    double tol = 1e-9;
};

// ---------------------------------------------------------------------------

namespace detail {

/// Potential of a measure including the log of its weight.
inline ScalarFunction effective_potential(const Measure1D& mu) {
    if (mu.weight()) return mu.potential() - log(*mu.weight());
    return mu.potential();
}

inline ScanOptions window_scan(const Measure1D& mu, ScanOptions o = {}) {
    o.range = {mu.window_lo(), mu.window_hi()};
    return o;
}

/// Second derivative: symbolic, with a Richardson central difference where
/// the symbolic value is not finite.
struct SecondDerivative {
    ScalarFunction V, d2;
    explicit SecondDerivative(const ScalarFunction& v) : V(v), d2(v.derivative().derivative()) {}
    template <class T>
    T operator()(T x) const {
        T s = d2.eval<T>(x);
        if (std::isfinite(static_cast<double>(s))) return s;
        T h = T(1e-4) * (1 + std::abs(x));
        auto cd = [&](T k) { return (V.eval<T>(x + k) - 2 * V.eval<T>(x) + V.eval<T>(x - k)) / (k * k); };
        return (4 * cd(h / 2) - cd(h)) / 3;
    }
};

/// Minimum of g on a grid over [lo, hi], refined around the best cells and
/// around sign changes of g.
template <class G>
std::pair<double, double> scan_min(G&& g, double lo, double hi, int base, int* points = nullptr) {
    std::vector<double> xs(base + 1), v(base + 1);
    for (int i = 0; i <= base; ++i) {
        xs[i] = lo + (hi - lo) * i / base;
        v[i] = g(xs[i]);
        if (std::isnan(v[i])) v[i] = kInf;
    }
    int count = base + 1;
    std::vector<int> cells;
    int best = static_cast<int>(std::min_element(v.begin(), v.end()) - v.begin());
    cells.push_back(std::max(0, best - 1));
    cells.push_back(std::min(base - 1, best));
    for (int i = 0; i < base; ++i)
        if ((v[i] < 0) != (v[i + 1] < 0)) cells.push_back(i);
    double bx = xs[best], bv = v[best];
    for (int c : cells) {
        for (int j = 1; j < 32; ++j) {
            double x = xs[c] + (xs[c + 1] - xs[c]) * j / 32;
            double y = g(x);
            ++count;
            if (y < bv) { bv = y; bx = x; }
        }
    }
    double h = (hi - lo) / base / 32;
    auto [gx, gv] = golden_max([&](double x) { return -g(x); }, std::max(lo, bx - h), std::min(hi, bx + h));
    if (-gv < bv) { bv = -gv; bx = gx; }
    if (points) *points = count + 60;
    return {bx, bv};
}

/// log of int_{|x - x0| <= r} exp(h) dmu in long double.
template <class H>
long double log_window_integral(const Measure1D& mu, H&& h, double r) {
    using LD = long double;
    std::vector<LD> terms;
    double x0 = mu.mode();
    for (const auto& p : mu.support()) {
        double lo = std::max(p.lo, x0 - r), hi = std::min(p.hi, x0 + r);
        if (!(lo < hi)) continue;
        const int np = 2048;
        for (int j = 0; j < np; ++j) {
            LD a = lo + (LD(hi) - lo) * j / np, b = lo + (LD(hi) - lo) * (j + 1) / np;
            LD c = 0.5L * (a + b), hw = 0.5L * (b - a);
            for (std::size_t i = 0; i < 8; ++i) {
                LD x = c + hw * gl8::x[i];
                LD l = mu.log_density(x) + static_cast<LD>(h(x));
                if (std::isfinite(static_cast<double>(l))) terms.push_back(std::log(gl8::w[i] * hw) + l);
            }
        }
    }
    return terms.empty() ? -std::numeric_limits<LD>::infinity() : log_sum_exp(terms);
}

/// Finiteness of int exp(h) dmu. A divergent verdict gets the radius r as
/// witness, with the log growth of the window integral from r to 2r.
template <class H>
void integrability_into(CriterionVerdict& v, const Measure1D& mu, H h, double rel_tol, const std::string& tag) {
    auto probe = probe_exp_integral(mu, h, rel_tol);
    v.detail += (v.detail.empty() ? "" : "; ") + tag + ": " + probe.detail;
    if (probe.finite) return;
    double r = std::max({1.0, mu.mode() - mu.window_lo(), mu.window_hi() - mu.mode()});
    Measure1D m = mu;
    v.check = [m, h, rel_tol](const std::vector<double>& w) {
        return log_window_integral(m, h, 2 * w[0]) - log_window_integral(m, h, w[0]) - std::log1p(rel_tol);
    };
    v.holds = Holds::No;
    v.witness = {r};
    v.violation = static_cast<double>(v.check(v.witness));
}

}  // namespace detail

// ---------------------------------------------------------------------------

/// D_V(x, y) = -(V(y) - V(x) - V'(x)(y - x)).
inline double convexity_defect(const ScalarFunction& V, double x, double y) {
    using LD = long double;
    LD vx = V.eval<LD>(x), vy = V.eval<LD>(y), d = V.derivative().eval<LD>(x);
    return static_cast<double>(-(vy - vx - d * (LD(y) - x)));
}

/// D_V(x, x + u) <= lambda c(u) over a sweep of pairs, plus V'' >= -lambda c''(0+).
inline CriterionVerdict defect_dominated_by(const ScalarFunction& V, const CostFunction& c, double lambda,
                                            ScanOptions o = {}) {
    using LD = long double;
    CriterionVerdict v;
    v.name = "defect_dominated_by";
    v.params["lambda"] = lambda;
    const ScalarFunction dV = V.derivative();
    const double lo = o.range.lo, hi = o.range.hi, tol = o.tol;
    auto margin = [V, dV, c, lambda, tol](LD x, LD y) -> LD {
        LD vx = V.eval<LD>(x), vy = V.eval<LD>(y);
        LD D = -(vy - vx - dV.eval<LD>(x) * (y - x));
        LD scale = 1 + std::abs(vx) + std::abs(vy);
        return lambda * c(static_cast<LD>(y - x)) - D + tol * scale;
    };
    v.check = [margin](const std::vector<double>& w) { return -margin(w[0], w[1]); };
    const int nx = o.base, ny = std::max(64, o.base / 4);
    std::vector<double> worst(nx + 1, kInf), wy(nx + 1, 0);
    parallel_for(static_cast<std::size_t>(nx + 1), [&](std::size_t i) {
        double x = lo + (hi - lo) * i / nx;
        double vxv = V(x), d = dV(x);
        for (int j = 0; j <= ny; ++j) {
            double y = lo + (hi - lo) * j / ny;
            double vy = V(y);
            double m = lambda * c(y - x) + (vy - vxv - d * (y - x)) + tol * (1 + std::abs(vxv) + std::abs(vy));
            if (m < worst[i]) { worst[i] = m; wy[i] = y; }
        }
    });
    v.scan_points = (nx + 1) * (ny + 1);
    std::size_t bi = static_cast<std::size_t>(std::min_element(worst.begin(), worst.end()) - worst.begin());
    double bx = lo + (hi - lo) * bi / nx, by = wy[bi];
    // local refinement in y around the worst pair
    {
        double h = (hi - lo) / ny;
        auto [yy, val] = golden_max([&](double y) { return -static_cast<double>(margin(bx, y)); },
                                    std::max(lo, by - h), std::min(hi, by + h));
        if (-val < worst[bi]) by = yy;
        v.scan_points += 60;
    }
    // second-derivative probe against lambda c''(0+)
    // c''(0+) from two step sizes; skipped when they disagree (|u|^p with p < 2)
    auto c2_at = [&](double h) { return (c(2 * h) - 2 * c(h) + c(0.0)) / (h * h); };
    double c2 = c2_at(1e-4), c2c = c2_at(1e-3);
    std::optional<std::pair<double, double>> hess_fail;
    if (std::isfinite(c2) && std::abs(c2 - c2c) <= 1e-2 * (1 + std::abs(c2))) {
        detail::SecondDerivative d2(V);
        int pts = 0;
        auto [x, m] = detail::scan_min([&](double t) { return d2(t) + lambda * c2; }, lo, hi, o.base, &pts);
        v.scan_points += pts;
        if (m < -1e-6 * (1 + lambda * c2)) hess_fail = {x, m};
    }
    long double worst_margin = margin(bx, by);
    if (worst_margin < 0) {
        v.holds = Holds::No;
        v.witness = {bx, by};
        v.violation = static_cast<double>(-worst_margin);
        v.detail = "pair sweep";
    } else if (hess_fail) {
        // turn the local failure into a pair witness: Taylor at small step
        double x = hess_fail->first;
        for (double u = 1e-1; u > 1e-6; u /= 2) {
            if (margin(x, x + u) < 0) {
                v.holds = Holds::No;
                v.witness = {x, x + u};
                v.violation = static_cast<double>(-margin(x, x + u));
                break;
            }
        }
        if (v.holds != Holds::No) v.holds = Holds::NumericOnly;
        v.detail = "second-derivative probe";
    } else {
        v.holds = Holds::Yes;
        v.detail = "pair sweep and second-derivative probe";
    }
    v.params["min_margin"] = static_cast<double>(worst_margin);
    return v;
}

/// Minimum of V'' on the scan range.
inline std::pair<double, double> min_second_derivative(const ScalarFunction& V, ScanOptions o = {}) {
    detail::SecondDerivative d2(V);
    return detail::scan_min([&](double x) { return d2(x); }, o.range.lo, o.range.hi, o.base);
}

/// Hessian scan V'' >= -lambda and int exp((lambda + eps)/2 |x - x0|^2) dmu < inf.
inline CriterionVerdict wang_checker(const Measure1D& mu, double lambda, double eps, double rel_tol = 1e-3) {
    CriterionVerdict v;
    v.name = "wang";
    v.params["lambda"] = lambda;
    v.params["epsilon"] = eps;
    auto V = detail::effective_potential(mu);
    detail::SecondDerivative d2(V);
    auto o = detail::window_scan(mu);
    int pts = 0;
    auto [x, m] = detail::scan_min([&](double t) { return d2(t) + lambda; }, o.range.lo, o.range.hi, o.base, &pts);
    v.scan_points = pts;
    if (m < -1e-6) {
        v.holds = Holds::No;
        v.witness = {x};
        v.check = [d2, lambda](const std::vector<double>& w) { return -(d2(static_cast<long double>(w[0])) + lambda); };
        v.violation = static_cast<double>(v.check(v.witness));
        v.detail = "hessian scan";
        return v;
    }
    double x0 = mu.mode(), k = (lambda + eps) / 2;
    detail::integrability_into(v, mu, [x0, k](auto t) { return k * (t - x0) * (t - x0); }, rel_tol, "integrability");
    if (v.holds != Holds::No) v.holds = Holds::Yes;
    return v;
}

/// Defect bounded by c (lambda = 1) and exp((3 + eps) c(x - y)) integrable against mu x mu.
inline CriterionVerdict weak_convexity_iso_checker(const Measure1D& mu, const CostFunction& c, double eps,
                                                   double rel_tol = 1e-3) {
    CriterionVerdict v = defect_dominated_by(detail::effective_potential(mu), c, 1.0, detail::window_scan(mu));
    v.name = "weak_convexity_iso";
    v.params["epsilon"] = eps;
    if (v.holds == Holds::No) return v;
    double beta = 3 + eps;
    auto probe = exp_double_integral(mu, c, beta, rel_tol);
    v.detail += "; double integral: " + probe.detail;
    if (!probe.finite) {
        // witness: a pair (x, -x) far out where the integrand grows
        Measure1D m = mu;
        auto logi = [m, c, beta](long double x, long double y) {
            return m.log_density(x) + m.log_density(y) + beta * c(static_cast<long double>(x - y));
        };
        double x0 = mu.mode();
        v.check = [logi, x0](const std::vector<double>& w) { return logi(w[0], w[1]) - logi(x0, x0); };
        double r = std::max(1.0, mu.window_hi() - x0);
        v.holds = Holds::No;
        for (double s = r; s < 1e6; s *= 1.5) {
            for (auto [a, b] : {std::pair{x0 + s, x0 - s}, std::pair{x0 + s, x0}, std::pair{x0 - s, x0 + s}}) {
                if (!mu.in_support(a) || !mu.in_support(b)) continue;
                if (v.check({a, b}) > 0) {
                    v.witness = {a, b};
                    v.violation = static_cast<double>(v.check(v.witness));
                    break;
                }
            }
            if (!v.witness.empty()) break;
        }
        if (v.witness.empty()) v.holds = Holds::NumericOnly;
        return v;
    }
    v.holds = Holds::Yes;
    return v;
}

/// V0 convex, p integrable, and
/// exp((1 + eps)[V1 - x V1' + (V1 + p)^*(V1')]) integrable against mu.
inline CriterionVerdict perturbation_checker(const Measure1D& mu, const ScalarFunction& V0, const ScalarFunction& V1,
                                             const ScalarFunction& p, double eps, double rel_tol = 1e-3) {
    CriterionVerdict v;
    v.name = "perturbation";
    v.params["epsilon"] = eps;
    auto o = detail::window_scan(mu);
    auto [xm, m] = min_second_derivative(V0, o);
    v.scan_points = o.base;
    if (m < -1e-6) {
        v.holds = Holds::No;
        detail::SecondDerivative d2(V0);
        v.witness = {xm};
        v.check = [d2](const std::vector<double>& w) { return -d2(static_cast<long double>(w[0])); };
        v.violation = static_cast<double>(v.check(v.witness));
        v.detail = "V0 is not convex";
        return v;
    }
    detail::integrability_into(v, mu, [p](auto t) { return std::log1p(std::abs(p(t))); }, rel_tol, "p integrable");
    if (v.holds == Holds::No) return v;
    const ScalarFunction dV1 = V1.derivative();
    const ScalarFunction g = V1 + p;
    auto E = [V1, dV1, g, eps](auto t) {
        double x = static_cast<double>(t);
        double y = dV1(x);
        double conj;
        if (g.is_constant()) {
            if (y != 0) return static_cast<decltype(t)>(kInf);
            conj = -g.constant_value();
        } else {
            double w = 4 * (1 + std::abs(x));
            conj = conjugate_at([&](double s) { return g(s); }, y, {x - w, x + w}).value;
        }
        return static_cast<decltype(t)>((1 + eps) * (V1(x) - x * y + conj));
    };
    detail::integrability_into(v, mu, E, rel_tol, "composite");
    if (v.holds != Holds::No) v.holds = Holds::Yes;
    return v;
}

/// |V1'(x)| <= delta |x|^{alpha - 1} + C with V1 = V/N - |x|^alpha/alpha and
/// delta < alpha/(2 + alpha).
inline CriterionVerdict pcp_checker(const ScalarFunction& V, double alpha, double N, double x_max = 1000.0,
                                    int points = 20000, double tol = 1e-9) {
    if (!(alpha > 1)) fail(ErrorKind::BadAlpha, "pcp needs alpha > 1");
    if (!(N > 0)) fail(ErrorKind::OutOfRange, "pcp needs N > 0");
    CriterionVerdict v;
    v.name = "pcp";
    v.params["alpha"] = alpha;
    v.params["N"] = N;
    auto x = ScalarFunction::variable();
    ScalarFunction V1 = V / N - pow(abs(x), alpha) / alpha;
    ScalarFunction d1 = V1.derivative();
    auto ratio = [d1, alpha](long double t) {
        return std::abs(d1.eval<long double>(t)) / (std::pow(std::abs(t), alpha - 1) + 1);
    };
    std::vector<std::pair<double, double>> r;
    for (int s : {-1, 1})
        for (int i = 0; i <= points; ++i) {
            double t = s * (1 + (x_max - 1) * i / points);
            r.push_back({static_cast<double>(ratio(t)), t});
        }
    std::sort(r.begin(), r.end());
    std::size_t q = static_cast<std::size_t>(0.99 * (r.size() - 1));
    double delta = r[q].first;
    double C = 0;
    for (int i = 0; i <= 4 * points; ++i) {
        double t = -x_max + 2 * x_max * i / (4 * points);
        C = std::max(C, std::abs(d1(t)) - delta * std::pow(std::abs(t), alpha - 1));
    }
    double thr = alpha / (2 + alpha);
    v.params["delta"] = delta;
    v.params["C"] = C;
    v.params["threshold"] = thr;
    v.scan_points = static_cast<int>(r.size()) + 4 * points + 1;
    v.check = [ratio, thr](const std::vector<double>& w) { return ratio(w[0]) - thr; };
    if (delta < thr - tol) {
        v.holds = Holds::Yes;
        v.detail = "99th percentile of |V1'|/(|x|^(alpha-1)+1) below threshold";
    } else {
        v.holds = Holds::No;
        v.witness = {r[q].second};
        v.violation = static_cast<double>(v.check(v.witness));
        v.detail = "99th percentile of |V1'|/(|x|^(alpha-1)+1) at or above threshold";
    }
    return v;
}

enum class LyapunovVariant {
    Drift,    // s V <= (1 - t) V' w - w' + C
    Growth,   // V <= C1 x V' + C2
    Hessian,  // s max(V, 1)^tau <= (1 - t) V'^2 - V'' + C
};

/// Smallest C making the pointwise inequality hold on growing windows; "no"
/// when the required C keeps increasing with the window.
inline CriterionVerdict lyapunov_checker(const ScalarFunction& V, const ScalarFunction& w, double s, double t,
                                         double tau, LyapunovVariant variant, double R = 20.0, int base = 4096,
                                         double tol = 1e-6) {
    using LD = long double;
    CriterionVerdict v;
    v.name = "lyapunov";
    v.params["s"] = s;
    v.params["t"] = t;
    v.params["tau"] = tau;
    const ScalarFunction dV = V.derivative(), dw = w.derivative();
    const detail::SecondDerivative d2(V);
    // excess(x) = lhs - rhs without C; the inequality holds with C = sup excess
    auto excess = [=](LD x) -> LD {
        switch (variant) {
            case LyapunovVariant::Drift:
                return s * V.eval<LD>(x) - (1 - t) * dV.eval<LD>(x) * w.eval<LD>(x) + dw.eval<LD>(x);
            case LyapunovVariant::Growth: return V.eval<LD>(x) - s * x * dV.eval<LD>(x);
            case LyapunovVariant::Hessian: {
                LD d = dV.eval<LD>(x);
                return s * std::pow(std::max(V.eval<LD>(x), LD(1)), LD(tau)) - (1 - t) * d * d + d2(x);
            }
        }
        return 0;
    };
    auto sup_on = [&](double r, double* arg) {
        int pts = 0;
        auto [x, m] = detail::scan_min(
            [&](double y) {
                double e = static_cast<double>(excess(y));
                return std::isnan(e) ? kInf : -e;
            },
            -r, r, base, &pts);
        v.scan_points += pts;
        *arg = x;
        return -m;
    };
    double a1, a2, a3;
    double c1 = sup_on(R, &a1), c2 = sup_on(2 * R, &a2), c3 = sup_on(4 * R, &a3);
    if (variant == LyapunovVariant::Growth) v.params["C1"] = s;
    double C = c1;
    v.params["C"] = C;
    v.check = [excess, C, tol](const std::vector<double>& p) {
        return excess(static_cast<LD>(p[0])) - C - tol * (1 + std::abs(C));
    };
    bool grows = c2 > C + tol * (1 + std::abs(C)) && c3 > c2 + tol * (1 + std::abs(c2));
    if (!std::isfinite(c1)) {
        v.holds = Holds::No;
        v.witness = {a1};
        v.params["C"] = kInf;
        v.violation = kInf;
        v.check = [excess](const std::vector<double>& p) { return excess(static_cast<LD>(p[0])); };
        v.detail = "inequality fails for every C at the witness";
    } else if (grows) {
        v.holds = Holds::No;
        v.witness = {a3};
        v.violation = static_cast<double>(v.check(v.witness));
        v.detail = "required constant grows with the window";
    } else {
        v.holds = Holds::Yes;
        v.params["C"] = std::max({c1, c2, c3});
        v.detail = "required constant stable under window doubling";
    }
    return v;
}

/// Largest s on the grid for which the Hessian variant holds.
inline double largest_verified_s0(const ScalarFunction& V, double t, double tau, const std::vector<double>& s_grid) {
    double best = 0;
    auto x = ScalarFunction::variable();
    for (double s : s_grid)
        if (lyapunov_checker(V, x, s, t, tau, LyapunovVariant::Hessian).holds == Holds::Yes) best = std::max(best, s);
    return best;
}

/// V'' >= -(K + L|x|^p) and int exp((L + eps)/(p + 2) |x|^{p+2}) dmu < inf.
/// K and L are fitted when not supplied.
inline CriterionVerdict hessian_lower_with_growth(const Measure1D& mu, double p, double eps,
                                                  std::optional<double> K = std::nullopt,
                                                  std::optional<double> L = std::nullopt, double rel_tol = 1e-3) {
    if (!(p > 0)) fail(ErrorKind::OutOfRange, "growth exponent must be positive");
    CriterionVerdict v;
    v.name = "hessian_growth";
    v.params["p"] = p;
    v.params["epsilon"] = eps;
    v.params["q"] = (p + 2) / (p + 1);
    auto V = detail::effective_potential(mu);
    detail::SecondDerivative d2(V);
    auto o = detail::window_scan(mu);
    const double lo = o.range.lo, hi = o.range.hi;
    const double x0 = mu.mode();
    if (!L) {
        double Lf = 0;
        double r = std::max(std::abs(lo - x0), std::abs(hi - x0));
        for (int i = 0; i <= 2000; ++i) {
            double x = x0 + (r / 2 + r / 2 * i / 2000) * (i % 2 ? 1 : -1);
            if (!mu.in_support(x)) continue;
            Lf = std::max(Lf, -d2(x) / std::pow(std::abs(x), p));
        }
        L = Lf;
    }
    if (!K) {
        double Lv = *L;
        auto [x, m] = detail::scan_min([&](double t) { return d2(t) + Lv * std::pow(std::abs(t), p); }, lo, hi, o.base);
        (void)x;
        K = std::max(0.0, -m);
    }
    v.params["K"] = *K;
    v.params["L"] = *L;
    double Kv = *K, Lv = *L;
    int pts = 0;
    auto [x, m] = detail::scan_min([&](double t) { return d2(t) + Kv + Lv * std::pow(std::abs(t), p); }, lo, hi, o.base, &pts);
    v.scan_points = pts;
    if (m < -1e-6 * (1 + Kv)) {
        v.holds = Holds::No;
        v.witness = {x};
        v.check = [d2, Kv, Lv, p](const std::vector<double>& w) {
            long double t = w[0];
            return -(d2(t) + Kv + Lv * std::pow(std::abs(t), (long double)p));
        };
        v.violation = static_cast<double>(v.check(v.witness));
        v.detail = "hessian scan";
        return v;
    }
    double k = (Lv + eps) / (p + 2);
    detail::integrability_into(v, mu, [k, p](auto t) { return k * std::pow(std::abs(t), p + 2); }, rel_tol,
                               "integrability");
    if (v.holds != Holds::No) v.holds = Holds::Yes;
    return v;
}

}  // namespace ineqforge
