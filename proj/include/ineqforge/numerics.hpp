#pragma once
/// Small numerical building blocks shared by all modules.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ineqforge/error.hpp"

namespace ineqforge {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
inline constexpr double kPi = 3.14159265358979323846;

/// Default tolerances shared across the library.
struct Tolerances {
    double equality = 1e-6;
    double inequality_margin = -1e-8;
    double integrability_rel = 1e-3;
};

namespace gl8 {
// Gauss-Legendre nodes/weights on [-1, 1].
inline constexpr std::array<long double, 8> x = {
    -0.960289856497536231683560868569473L, -0.796666477413626739591553936475831L,
    -0.525532409916328985817739049189246L, -0.183434642495649804939476142360184L,
    0.183434642495649804939476142360184L,  0.525532409916328985817739049189246L,
    0.796666477413626739591553936475831L,  0.960289856497536231683560868569473L};
inline constexpr std::array<long double, 8> w = {
    0.101228536290376259152531354309962L, 0.222381034453374470544355994426241L,
    0.313706645877887287337962201986601L, 0.362683783378361982965150449277196L,
    0.362683783378361982965150449277196L, 0.313706645877887287337962201986601L,
    0.222381034453374470544355994426241L, 0.101228536290376259152531354309962L};
}  // namespace gl8

/// Eight-point Gauss-Legendre rule on [a, b].
template <class F>
long double gauss8(F&& f, long double a, long double b) {
    long double c = 0.5L * (a + b), h = 0.5L * (b - a), s = 0;
    for (std::size_t i = 0; i < 8; ++i) s += gl8::w[i] * f(c + h * gl8::x[i]);
    return s * h;
}

/// Composite Gauss-Legendre over n equal panels.
template <class F>
long double composite_gauss8(F&& f, long double a, long double b, int n) {
    long double s = 0, h = (b - a) / n;
    for (int k = 0; k < n; ++k) s += gauss8(f, a + k * h, (k + 1 == n) ? b : a + (k + 1) * h);
    return s;
}

/// Composite Simpson over n (even) intervals.
template <class F>
double simpson(F&& f, double a, double b, int n) {
    if (n % 2) ++n;
    double h = (b - a) / n, s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

/// Golden-section search for the maximum of a unimodal function on [a, b].
template <class F>
std::pair<double, double> golden_max(F&& f, double a, double b, double tol = 1e-12, int max_iter = 200) {
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < max_iter && (b - a) > tol * (1.0 + std::abs(a) + std::abs(b)); ++it) {
        if (fc >= fd) {
            b = d; d = c; fd = fc;
            c = b - r * (b - a); fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + r * (b - a); fd = f(d);
        }
    }
    return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

/// Grid scan followed by golden refinement around the best grid cell.
template <class F>
std::pair<double, double> grid_golden_max(F&& f, double a, double b, int n, std::size_t* best_index = nullptr) {
    double bx = a, bv = -kInf;
    std::size_t bi = 0;
    for (int i = 0; i <= n; ++i) {
        double x = a + (b - a) * i / n;
        double v = f(x);
        if (v > bv) { bv = v; bx = x; bi = static_cast<std::size_t>(i); }
    }
    if (best_index) *best_index = bi;
    double h = (b - a) / n;
    double lo = std::max(a, bx - h), hi = std::min(b, bx + h);
    auto [gx, gv] = golden_max(f, lo, hi);
    if (gv >= bv) return {gx, gv};
    return {bx, bv};
}

/// Bisection for an increasing function crossing `target` in [a, b].
template <class F>
double bisect_increasing(F&& f, double target, double a, double b, int iters = 200) {
    for (int it = 0; it < iters && b - a > 1e-15 * (1.0 + std::abs(a)); ++it) {
        double m = 0.5 * (a + b);
        if (f(m) < target) a = m; else b = m;
    }
    return 0.5 * (a + b);
}

/// Deterministic worker count from INEQ_FORGE_THREADS, default 1.
inline unsigned thread_count() {
    if (const char* s = std::getenv("INEQ_FORGE_THREADS")) {
        int v = std::atoi(s);
        if (v >= 1) return static_cast<unsigned>(std::min(v, 256));
    }
    return 1;
}

/// Runs body(i) for i in [0, n). Results must be written by index so the
/// outcome does not depend on scheduling.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
    unsigned k = std::min<std::size_t>(thread_count(), n);
    if (k <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(k);
    for (unsigned t = 0; t < k; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < n; i += k) body(i);
            } catch (...) {
                errs[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

struct NelderMeadResult {
    std::vector<double> x;
    double value = -kInf;
    int evaluations = 0;
};

/// Maximizes f inside the box [lo, hi] (coordinates are clamped).
template <class F>
NelderMeadResult nelder_mead_max(F&& f, std::vector<double> start, const std::vector<double>& lo,
                                 const std::vector<double>& hi, int budget, double xtol = 1e-10) {
    const std::size_t n = start.size();
    auto clamp = [&](std::vector<double> p) {
        for (std::size_t i = 0; i < n; ++i) p[i] = std::clamp(p[i], lo[i], hi[i]);
        return p;
    };
    NelderMeadResult res;
    auto eval = [&](const std::vector<double>& p) {
        ++res.evaluations;
        double v = f(p);
        return std::isfinite(v) ? v : -kInf;
    };
    std::vector<std::vector<double>> simplex{clamp(start)};
    for (std::size_t i = 0; i < n; ++i) {
        auto p = simplex[0];
        double step = 0.1 * (hi[i] - lo[i]);
        p[i] = (p[i] + step <= hi[i]) ? p[i] + step : p[i] - step;
        simplex.push_back(clamp(p));
    }
    std::vector<double> val(n + 1);
    for (std::size_t i = 0; i <= n; ++i) val[i] = eval(simplex[i]);
    std::vector<std::size_t> idx(n + 1);
    while (res.evaluations < budget) {
        for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            if (val[a] != val[b]) return val[a] > val[b];
            return simplex[a] < simplex[b];
        });
        const auto& best = simplex[idx[0]];
        double spread = 0;
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                spread = std::max(spread, std::abs(simplex[idx[i]][j] - best[j]) / (hi[j] - lo[j] + 1e-300));
        if (spread < xtol) break;
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[idx[i]][j] / n;
        std::size_t worst = idx[n];
        auto along = [&](double t) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j) p[j] = centroid[j] + t * (simplex[worst][j] - centroid[j]);
            return clamp(p);
        };
        auto xr = along(-1.0);
        double vr = eval(xr);
        if (vr > val[idx[0]]) {
            auto xe = along(-2.0);
            double ve = eval(xe);
            if (ve > vr) { simplex[worst] = xe; val[worst] = ve; }
            else { simplex[worst] = xr; val[worst] = vr; }
        } else if (vr > val[idx[n - 1]]) {
            simplex[worst] = xr; val[worst] = vr;
        } else {
            auto xc = along(vr > val[worst] ? -0.5 : 0.5);
            double vc = eval(xc);
            if (vc > std::max(vr, val[worst])) {
                simplex[worst] = xc; val[worst] = vc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    auto& p = simplex[idx[i]];
                    for (std::size_t j = 0; j < n; ++j) p[j] = best[j] + 0.5 * (p[j] - best[j]);
                    p = clamp(p);
                    val[idx[i]] = eval(p);
                }
            }
        }
    }
    std::size_t bi = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (val[i] > val[bi] || (val[i] == val[bi] && simplex[i] < simplex[bi])) bi = i;
    res.x = simplex[bi];
    res.value = val[bi];
    return res;
}

/// Numerically stable log(sum(exp(v))).
inline long double log_sum_exp(const std::vector<long double>& v) {
    long double m = -std::numeric_limits<long double>::infinity();
    for (auto x : v) m = std::max(m, x);
    if (!std::isfinite(static_cast<double>(m))) return m;
    long double s = 0;
    for (auto x : v) s += std::exp(x - m);
    return m + std::log(s);
}

}  // namespace ineqforge
