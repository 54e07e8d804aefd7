#pragma once
/// One-dimensional probability measures with density proportional to
/// w(x) exp(-V(x)) on a union of intervals.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ineqforge/error.hpp"
#include "ineqforge/expr.hpp"
#include "ineqforge/numerics.hpp"

namespace ineqforge {

struct Interval {
    double lo = -kInf;
    double hi = kInf;
    double length() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }
};

struct MeasureOptions {
    int resolution = 4096;       // panels across the truncation window
    double tail_depth = 60.0;    // log-density drop that ends the window
    double agreement = 1e-9;     // relative agreement when doubling resolution
    int max_resolution = 1 << 17;
};

enum class QuantileSide { Lower, Upper };

/// Verdict of a finiteness probe.
struct ProbeResult {
    bool finite = false;
    double value = kNaN;       // the integral when finite
    double log_value = kNaN;   // log of the largest window estimate
    bool numeric_only = true;  // false when a tail-exponent comparison decided
    std::string detail;
};

/// Leading tail behaviour k |x|^p of a function at one end.
struct TailForm {
    bool ok = false;
    double p = 0.0;
    double k = 0.0;
};

class Measure1D {
public:
    Measure1D() = default;

    const ScalarFunction& potential() const { return d_->V; }
    const std::optional<ScalarFunction>& weight() const { return d_->W; }
    const std::vector<Interval>& support() const { return d_->support; }
    const std::vector<Interval>& window() const { return d_->window; }
    /// Normalizing constant: the integral of w exp(-V) over the support.
    double normalizer() const { return std::exp(static_cast<double>(d_->log_z)); }
    double log_normalizer() const { return static_cast<double>(d_->log_z); }
    double mode() const { return d_->mode; }
    int resolution() const { return d_->resolution; }
    const MeasureOptions& options() const { return d_->opts; }
    const std::vector<double>& breakpoints() const { return d_->breaks; }
    const std::string& label() const { return d_->label; }
    double window_lo() const { return d_->window.front().lo; }
    double window_hi() const { return d_->window.back().hi; }
    double support_lo() const { return d_->support.front().lo; }
    double support_hi() const { return d_->support.back().hi; }

    bool in_support(double x) const {
        for (const auto& p : d_->support)
            if (p.contains(x)) return true;
        return false;
    }

    /// Unnormalized log density w exp(-V) (minus infinity outside the support).
    long double raw_log_density(long double x) const { return raw_logdens(*d_, x); }
    /// Normalized log density.
    long double log_density(long double x) const { return raw_logdens(*d_, x) - d_->log_z; }
    double density(double x) const { return static_cast<double>(std::exp(log_density(x))); }

    double cdf(double x) const;
    double sf(double x) const;
    /// Generalized inverse of the cdf. Lower gives inf{x : F(x) >= t},
    /// Upper gives sup{x : F(x) <= t}.
    double quantile(double t, QuantileSide side = QuantileSide::Lower) const;
    /// Inverse of the survival function, accurate for tiny tail masses.
    double quantile_sf(double s, QuantileSide side = QuantileSide::Lower) const;
    /// Mass of a union of intervals.
    double mass(const std::vector<Interval>& set) const;

    /// Integral of h against the measure. Panels split at `breaks`; infinite
    /// ends are covered by geometric shells beyond the window.
    template <class H>
    long double integrate(H&& h, const std::vector<double>& breaks = {}) const;

    /// Cumulative table on the panel grid (edges, cdf at each edge).
    std::vector<std::pair<double, double>> cdf_table() const;

    friend Measure1D build_measure(const ScalarFunction& V, std::optional<ScalarFunction> W,
                                   std::vector<Interval> pieces, const MeasureOptions& opts, std::string label);

private:
    struct Panel {
        long double lo, hi;
    };
    struct Data {
        ScalarFunction V;
        std::optional<ScalarFunction> W;
        std::vector<Interval> support, window;
        std::vector<double> breaks;
        std::vector<Panel> panels;
        std::vector<long double> cum_left, cum_right, panel_mass;  // normalized
        std::vector<long double> node_x, node_w;                    // weight * density
        long double log_peak = 0, log_z = 0, z_scaled = 1;          // z_scaled = Z exp(-peak)
        double mode = 0;
        int resolution = 0;
        MeasureOptions opts;
        std::string label;
    };
    std::shared_ptr<const Data> d_;

    static long double raw_logdens(const Data& d, long double x) {
        bool inside = false;
        for (const auto& p : d.support)
            if (x >= p.lo && x <= p.hi) { inside = true; break; }
        if (!inside) return -std::numeric_limits<long double>::infinity();
        // double evaluation is enough unless it overflows
        auto ev = [x](const ScalarFunction& f) -> long double {
            double r = f.eval<double>(static_cast<double>(x));
            return std::isfinite(r) ? r : f.eval<long double>(x);
        };
        long double v = -ev(d.V);
        if (d.W) {
            long double w = ev(*d.W);
            if (!(w > 0)) return -std::numeric_limits<long double>::infinity();
            v += std::log(w);
        }
        if (std::isnan(static_cast<double>(v))) return -std::numeric_limits<long double>::infinity();
        return v;
    }
    long double scaled_density(long double x) const {
        return std::exp(raw_logdens(*d_, x) - d_->log_peak) / d_->z_scaled;
    }
    std::size_t panel_of(double x) const;
    double solve_in_panel(std::size_t k, long double target, bool from_left) const;
};

// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<Interval> normalize_pieces(std::vector<Interval> pieces) {
    if (pieces.empty()) fail(ErrorKind::InvalidSupport, "empty support");
    for (const auto& p : pieces)
        if (!(p.lo < p.hi) || std::isnan(p.lo) || std::isnan(p.hi))
            fail(ErrorKind::InvalidSupport, "support interval needs lo < hi");
    std::sort(pieces.begin(), pieces.end(), [](auto& a, auto& b) { return a.lo < b.lo; });
    std::vector<Interval> out;
    for (const auto& p : pieces) {
        if (!out.empty() && p.lo <= out.back().hi) out.back().hi = std::max(out.back().hi, p.hi);
        else out.push_back(p);
    }
    return out;
}

struct Scan {
    std::vector<double> x;
    std::vector<long double> l;
};

}  // namespace detail

inline Measure1D build_measure(const ScalarFunction& V, std::optional<ScalarFunction> W,
                               std::vector<Interval> pieces, const MeasureOptions& opts, std::string label) {
    using LD = long double;
    const LD ninf = -std::numeric_limits<LD>::infinity();
    auto data = std::make_shared<Measure1D::Data>();
    data->V = V;
    data->W = std::move(W);
    data->support = detail::normalize_pieces(std::move(pieces));
    data->opts = opts;
    data->label = std::move(label);
    auto& d = *data;
    const double depth = opts.tail_depth;

    double H = 64.0;
    for (const auto& p : d.support) {
        if (std::isfinite(p.lo)) H = std::max(H, std::abs(p.lo) + 64.0);
        if (std::isfinite(p.hi)) H = std::max(H, std::abs(p.hi) + 64.0);
    }
    auto scan_over = [&](const std::vector<Interval>& ranges, int total) {
        detail::Scan s;
        double len = 0;
        for (const auto& r : ranges) len += r.length();
        for (const auto& r : ranges) {
            int n = std::max(64, static_cast<int>(total * r.length() / len));
            for (int i = 0; i <= n; ++i) {
                double x = r.lo + r.length() * i / n;
                s.x.push_back(x);
                s.l.push_back(Measure1D::raw_logdens(d, x));
            }
        }
        return s;
    };

    std::vector<Interval> ranges;
    LD peak = ninf;
    double mode = 0;
    for (;;) {
        ranges.clear();
        for (const auto& p : d.support) {
            Interval r{std::max(p.lo, -H), std::min(p.hi, H)};
            if (r.lo < r.hi) ranges.push_back(r);
        }
        auto s = scan_over(ranges, 8192);
        peak = ninf;
        for (std::size_t i = 0; i < s.x.size(); ++i)
            if (s.l[i] > peak) { peak = s.l[i]; mode = s.x[i]; }
        bool grow = !std::isfinite(static_cast<double>(peak));
        if (!grow) {
            for (std::size_t j = 0; j < d.support.size(); ++j) {
                const auto& p = d.support[j];
                if (!std::isfinite(p.lo) && Measure1D::raw_logdens(d, -H) > peak - depth) grow = true;
                if (!std::isfinite(p.hi) && Measure1D::raw_logdens(d, H) > peak - depth) grow = true;
            }
        }
        if (!grow) break;
        H *= 2;
        if (H > 4.0e6) {
            if (!std::isfinite(static_cast<double>(peak))) fail(ErrorKind::ZeroMass, "density vanishes on the support");
            fail(ErrorKind::NonIntegrablePotential, "tail of exp(-V) does not decay within |x| < 4e6");
        }
    }

    // Window per piece: hull of points within `depth` of the peak. Two passes
    // so narrow peaks get a sharper cut.
    auto cut = [&](const std::vector<Interval>& rs) {
        std::vector<Interval> win;
        auto s = scan_over(rs, 8192);
        for (const auto& r : rs) {
            std::size_t first = s.x.size(), last = 0;
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (s.x[i] < r.lo || s.x[i] > r.hi) continue;
                if (s.l[i] >= peak - depth) {
                    if (s.l[i] > peak) { peak = s.l[i]; mode = s.x[i]; }
                    first = std::min(first, i);
                    last = std::max(last, i);
                }
            }
            if (first > last) continue;
            double lo = first > 0 && s.x[first - 1] >= r.lo ? s.x[first - 1] : r.lo;
            double hi = last + 1 < s.x.size() && s.x[last + 1] <= r.hi ? s.x[last + 1] : r.hi;
            if (lo < hi) win.push_back({lo, hi});
        }
        return win;
    };
    auto win = cut(ranges);
    win = cut(win);
    if (win.empty()) fail(ErrorKind::ZeroMass, "no mass found on the support");
    d.window = win;
    d.mode = mode;
    d.log_peak = peak;

    std::vector<double> kinks;
    for (const auto& r : win) {
        auto a = V.kinks(r.lo, r.hi, 8192);
        kinks.insert(kinks.end(), a.begin(), a.end());
        if (d.W) {
            auto b = d.W->kinks(r.lo, r.hi, 8192);
            kinks.insert(kinks.end(), b.begin(), b.end());
        }
    }
    std::sort(kinks.begin(), kinks.end());
    d.breaks = kinks;

    auto assemble = [&](int N, std::vector<Measure1D::Panel>& panels, std::vector<LD>& masses) {
        panels.clear();
        masses.clear();
        double total = 0;
        for (const auto& r : win) total += r.length();
        for (const auto& r : win) {
            int n = std::max(1, static_cast<int>(std::llround(N * r.length() / total)));
            std::vector<LD> edges;
            for (int i = 0; i <= n; ++i) edges.push_back(i == n ? r.hi : r.lo + (LD(r.hi) - r.lo) * i / n);
            for (double k : kinks)
                if (k > r.lo && k < r.hi) edges.push_back(k);
            std::sort(edges.begin(), edges.end());
            for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
                if (edges[i + 1] - edges[i] <= 0) continue;
                panels.push_back({edges[i], edges[i + 1]});
            }
        }
        LD z = 0;
        for (const auto& p : panels) {
            LD m = gauss8([&](LD x) { return std::exp(Measure1D::raw_logdens(d, x) - peak); }, p.lo, p.hi);
            masses.push_back(m);
            z += m;
        }
        return z;
    };

    int N = std::max(16, opts.resolution);
    std::vector<Measure1D::Panel> panels, panels2;
    std::vector<LD> masses, masses2;
    LD z1 = assemble(N, panels, masses);
    for (;;) {
        LD z2 = assemble(2 * N, panels2, masses2);
        if (std::abs(z2 - z1) <= opts.agreement * z2 || 2 * N > opts.max_resolution) {
            break;
        }
        N *= 2;
        z1 = z2;
        panels.swap(panels2);
        masses.swap(masses2);
    }
    if (!(z1 > 0)) fail(ErrorKind::ZeroMass, "measure has zero mass");

    // Mass beyond the window on infinite ends, one window span out. The same
    // quantity doubles as the window-doubling guard.
    LD tail_left = 0, tail_right = 0;
    auto scaled = [&](LD x) { return std::exp(Measure1D::raw_logdens(d, x) - peak); };
    if (!std::isfinite(d.support.front().lo)) {
        double e = win.front().lo, span = std::max(1.0, mode - e);
        tail_left = composite_gauss8(scaled, e - span, e, 256);
    }
    if (!std::isfinite(d.support.back().hi)) {
        double e = win.back().hi, span = std::max(1.0, e - mode);
        tail_right = composite_gauss8(scaled, e, e + span, 256);
    }
    if (!(tail_left + tail_right <= 1e-10L * z1))
        fail(ErrorKind::NonIntegrablePotential, "doubling the truncation window moves the mass");
    const LD z = z1 + tail_left + tail_right;

    d.resolution = N;
    d.panels = panels;
    d.panel_mass.resize(masses.size());
    d.z_scaled = z;
    d.log_z = peak + std::log(z);
    d.cum_left.assign(panels.size() + 1, 0);
    d.cum_right.assign(panels.size() + 1, 0);
    d.cum_left[0] = tail_left / z;
    d.cum_right[panels.size()] = tail_right / z;
    for (std::size_t k = 0; k < panels.size(); ++k) {
        d.panel_mass[k] = masses[k] / z;
        d.cum_left[k + 1] = d.cum_left[k] + d.panel_mass[k];
    }
    for (std::size_t k = panels.size(); k-- > 0;) d.cum_right[k] = d.cum_right[k + 1] + d.panel_mass[k];
    d.node_x.reserve(panels.size() * 8);
    d.node_w.reserve(panels.size() * 8);
    for (const auto& p : panels) {
        LD c = 0.5L * (p.lo + p.hi), h = 0.5L * (p.hi - p.lo);
        for (std::size_t i = 0; i < 8; ++i) {
            LD x = c + h * gl8::x[i];
            d.node_x.push_back(x);
            d.node_w.push_back(gl8::w[i] * h * std::exp(Measure1D::raw_logdens(d, x) - peak) / z);
        }
    }
    Measure1D m;
    m.d_ = data;
    return m;
}

/// Measure with density proportional to exp(-V) on [lo, hi].
inline Measure1D build_measure(const ScalarFunction& V, Interval support, const MeasureOptions& opts = {},
                               std::string label = "custom") {
    return build_measure(V, std::nullopt, {support}, opts, std::move(label));
}

inline std::size_t Measure1D::panel_of(double x) const {
    const auto& P = d_->panels;
    std::size_t lo = 0, hi = P.size();
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (P[mid].lo <= x) lo = mid; else hi = mid;
    }
    return lo;
}

inline double Measure1D::cdf(double x) const {
    const auto& P = d_->panels;
    if (x <= P.front().lo) return 0.0;
    if (x >= P.back().hi) return 1.0;
    std::size_t k = panel_of(x);
    if (x >= P[k].hi) return static_cast<double>(d_->cum_left[k + 1]);
    long double part = gauss8([&](long double u) { return scaled_density(u); }, P[k].lo, x);
    return static_cast<double>(std::min<long double>(1.0L, d_->cum_left[k] + part));
}

inline double Measure1D::sf(double x) const {
    const auto& P = d_->panels;
    if (x <= P.front().lo) return 1.0;
    if (x >= P.back().hi) return 0.0;
    std::size_t k = panel_of(x);
    if (x >= P[k].hi) return static_cast<double>(d_->cum_right[k + 1]);
    long double part = gauss8([&](long double u) { return scaled_density(u); }, x, P[k].hi);
    return static_cast<double>(std::min<long double>(1.0L, d_->cum_right[k + 1] + part));
}

inline double Measure1D::solve_in_panel(std::size_t k, long double target, bool from_left) const {
    const auto& p = d_->panels[k];
    long double a = p.lo, b = p.hi, m = d_->panel_mass[k];
    if (target <= 0) return static_cast<double>(from_left ? a : b);
    if (target >= m) return static_cast<double>(from_left ? b : a);
    auto G = [&](long double x) {
        long double g = from_left ? gauss8([&](long double u) { return scaled_density(u); }, p.lo, x)
                                  : gauss8([&](long double u) { return scaled_density(u); }, x, p.hi);
        return g - target;
    };
    // G increases in x when integrating from the left, decreases otherwise.
    long double x = from_left ? a + (b - a) * target / m : b - (b - a) * target / m;
    for (int it = 0; it < 60; ++it) {
        long double g = G(x);
        long double slope = scaled_density(x) * (from_left ? 1 : -1);
        if ((g > 0) == from_left) b = x; else a = x;
        if (g == 0) break;
        long double nx = slope != 0 ? x - g / slope : 0.5L * (a + b);
        if (std::abs(nx - x) <= 1e-17L * (1 + std::abs(x))) { x = nx; break; }
        if (!(nx > a && nx < b)) nx = 0.5L * (a + b);
        x = nx;
    }
    return static_cast<double>(x);
}

inline double Measure1D::quantile(double t, QuantileSide side) const {
    if (!(t >= 0.0 && t <= 1.0)) fail(ErrorKind::OutOfRange, "quantile level outside [0, 1]");
    if (t > 0.5) return quantile_sf(1.0 - t, side);
    const auto& C = d_->cum_left;
    const std::size_t n = d_->panels.size();
    if (t == 0.0 && side == QuantileSide::Lower) return support_lo() > -kInf ? support_lo() : window_lo();
    // Cumulative sums carry rounding; levels within a few ulps of a table
    // entry are treated as equal to it so that flat stretches resolve cleanly.
    const long double eps = 8 * std::numeric_limits<double>::epsilon() * t;
    std::size_t k;
    if (side == QuantileSide::Lower) {
        k = static_cast<std::size_t>(std::lower_bound(C.begin() + 1, C.end(), static_cast<long double>(t) - eps) - C.begin()) - 1;
    } else {
        k = static_cast<std::size_t>(std::upper_bound(C.begin() + 1, C.end(), static_cast<long double>(t) + eps) - C.begin()) - 1;
        while (k < n && d_->panel_mass[k] == 0) ++k;
    }
    if (k >= n) return window_hi();
    return solve_in_panel(k, t - C[k], true);
}

inline double Measure1D::quantile_sf(double s, QuantileSide side) const {
    if (!(s >= 0.0 && s <= 1.0)) fail(ErrorKind::OutOfRange, "tail level outside [0, 1]");
    const auto& R = d_->cum_right;  // decreasing in k
    const std::size_t n = d_->panels.size();
    if (s == 0.0 && side == QuantileSide::Upper) return support_hi() < kInf ? support_hi() : window_hi();
    // Lower side: smallest x with sf(x) <= s. Upper: largest x with sf(x) >= s.
    const long double eps = 8 * std::numeric_limits<double>::epsilon() * s;
    std::size_t k;
    if (side == QuantileSide::Lower) {
        std::size_t lo = 0, hi = n;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (R[mid + 1] <= s + eps) hi = mid; else lo = mid + 1;
        }
        k = lo;
        while (k < n && d_->panel_mass[k] == 0) ++k;
    } else {
        std::size_t lo = 0, hi = n;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (R[mid + 1] < s - eps) hi = mid; else lo = mid + 1;
        }
        k = lo;
    }
    if (k >= n) return window_hi();
    return solve_in_panel(k, s - R[k + 1], false);
}

inline double Measure1D::mass(const std::vector<Interval>& set) const {
    long double m = 0;
    for (const auto& a : set) m += static_cast<long double>(cdf(a.hi)) - cdf(a.lo);
    return static_cast<double>(m);
}

inline std::vector<std::pair<double, double>> Measure1D::cdf_table() const {
    std::vector<std::pair<double, double>> out;
    for (std::size_t k = 0; k < d_->panels.size(); ++k)
        out.emplace_back(static_cast<double>(d_->panels[k].lo), static_cast<double>(d_->cum_left[k]));
    out.emplace_back(static_cast<double>(d_->panels.back().hi), 1.0);
    return out;
}

template <class H>
long double Measure1D::integrate(H&& h, const std::vector<double>& breaks_in) const {
    using LD = long double;
    const Data& d = *d_;
    std::vector<double> breaks = breaks_in;
    std::sort(breaks.begin(), breaks.end());
    auto dens_h = [&](LD x) -> LD {
        LD r = std::exp(raw_logdens(d, x) - d.log_peak);
        LD hv = static_cast<LD>(h(x));
        if (!std::isfinite(static_cast<double>(hv)) && std::isinf(hv)) return hv;
        if (r == 0) return 0;
        return hv * r / d.z_scaled;
    };
    LD sum = 0;
    for (std::size_t k = 0; k < d.panels.size(); ++k) {
        const auto& p = d.panels[k];
        auto it = std::upper_bound(breaks.begin(), breaks.end(), static_cast<double>(p.lo));
        if (it != breaks.end() && *it < p.hi) {
            LD a = p.lo;
            for (; it != breaks.end() && *it < p.hi; ++it) {
                if (*it > a) sum += gauss8(dens_h, a, static_cast<LD>(*it));
                a = *it;
            }
            sum += gauss8(dens_h, a, p.hi);
            continue;
        }
        for (std::size_t i = 0; i < 8; ++i) {
            LD w = d.node_w[8 * k + i];
            if (w != 0) sum += w * static_cast<LD>(h(d.node_x[8 * k + i]));
        }
    }
    // Geometric shells beyond infinite ends.
    const double extent = std::max(1.0, window_hi() - window_lo());
    auto shells = [&](double edge, double dir) {
        LD acc = 0;
        double w0 = 0.25 * extent;
        for (int k = 0; k < 40; ++k) {
            double a = edge + dir * w0 * (std::ldexp(1.0, k) - 1.0);
            double b = edge + dir * w0 * (std::ldexp(1.0, k + 1) - 1.0);
            if (std::abs(b) > 1e8) fail(ErrorKind::IntegrationError, "integrand does not decay in the tail");
            double lo = std::min(a, b), hi = std::max(a, b);
            LD part = 0;
            bool finite = true;
            const int np = 32;
            for (int j = 0; j < np && finite; ++j) {
                LD pl = lo + (LD(hi) - lo) * j / np, ph = lo + (LD(hi) - lo) * (j + 1) / np;
                LD g = gauss8(dens_h, pl, ph);
                if (!std::isfinite(static_cast<double>(g))) finite = false; else part += g;
            }
            if (!finite) {
                // Overflow of the integrand: integrate up to the last finite
                // point and extrapolate the remainder from the local decay.
                double fa = a, fb = b;
                for (int it = 0; it < 200; ++it) {
                    double m = 0.5 * (fa + fb);
                    if (std::isfinite(static_cast<double>(dens_h(m)))) fa = m; else fb = m;
                }
                double xf = fa - dir * 1e-6 * std::abs(fa - a);
                LD upto = composite_gauss8(dens_h, std::min<LD>(a, xf), std::max<LD>(a, xf), 256);
                double step = 1e-3 * std::max(1.0, std::abs(xf - a));
                LD v1 = dens_h(xf), v0 = dens_h(xf - dir * step);
                LD rate = (std::log(std::abs(v0)) - std::log(std::abs(v1))) / step;
                LD rest = rate > 0 ? std::abs(v1) / rate : std::numeric_limits<LD>::infinity();
                acc += upto;
                if (!(rest <= 1e-6L * std::abs(sum + acc)))
                    fail(ErrorKind::IntegrationError, "integrand overflows before its tail decays");
                acc += (v1 >= 0 ? rest : -rest);
                return acc;
            }
            acc += part;
            if (std::abs(part) <= 1e-20L * std::abs(sum + acc) || (part == 0 && k >= 1)) return acc;
        }
        fail(ErrorKind::IntegrationError, "tail shells did not converge");
    };
    if (support_lo() == -kInf) sum += shells(window_lo(), -1.0);
    if (support_hi() == kInf) sum += shells(window_hi(), 1.0);
    return sum;
}

// ---------------------------------------------------------------------------
// Derived measures

/// Restriction of mu to a union of intervals, renormalized. The normalizer of
/// the result is the integral of the unnormalized density over the set.
inline Measure1D condition(const Measure1D& mu, const std::vector<Interval>& set) {
    std::vector<Interval> pieces;
    for (const auto& a : detail::normalize_pieces(set))
        for (const auto& p : mu.support()) {
            Interval r{std::max(a.lo, p.lo), std::min(a.hi, p.hi)};
            if (r.lo < r.hi) pieces.push_back(r);
        }
    if (pieces.empty() || !(mu.mass(set) > 0)) fail(ErrorKind::NullSet, "conditioning set has zero mass");
    return build_measure(mu.potential(), mu.weight(), pieces, mu.options(), mu.label() + "|A");
}

/// The measure f mu renormalized, for a nonnegative f.
inline Measure1D reweight(const Measure1D& mu, const ScalarFunction& f, std::string label = "") {
    for (int i = 0; i <= 2048; ++i) {
        double x = mu.window_lo() + (mu.window_hi() - mu.window_lo()) * i / 2048.0;
        if (mu.in_support(x) && f(x) < 0) fail(ErrorKind::DomainError, "reweighting function is negative");
    }
    ScalarFunction w = mu.weight() ? (*mu.weight()) * f : f;
    return build_measure(mu.potential(), w, mu.support(), mu.options(),
                         label.empty() ? mu.label() + "*f" : std::move(label));
}

// ---------------------------------------------------------------------------
// Measure strings

inline double parse_bound(const std::string& s) {
    std::string t;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    if (t == "inf" || t == "+inf") return kInf;
    if (t == "-inf") return -kInf;
    try {
        std::size_t used = 0;
        double v = std::stod(t, &used);
        if (used != t.size()) throw std::invalid_argument(t);
        return v;
    } catch (const std::exception&) {
        fail(ErrorKind::ParseError, "bad interval bound '" + s + "'");
    }
}

inline double parse_number(const std::string& s, const char* what) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        fail(ErrorKind::ParseError, std::string("bad ") + what + " '" + s + "'");
    }
}

/// "gaussian", "exponential", "laplace", "exp_alpha:<a>", "custom:<expr>@[a,b]".
inline Measure1D measure_from_spec(const std::string& spec, const MeasureOptions& opts = {}) {
    auto colon = spec.find(':');
    std::string head = spec.substr(0, colon);
    std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
    auto x = ScalarFunction::variable();
    if (head == "gaussian") return build_measure(x * x / 2.0, {-kInf, kInf}, opts, spec);
    if (head == "exponential") return build_measure(x, {0.0, kInf}, opts, spec);
    if (head == "laplace") return build_measure(abs(x), {-kInf, kInf}, opts, spec);
    if (head == "exp_alpha") {
        double a = parse_number(rest, "exponent");
        if (!(a > 0)) fail(ErrorKind::BadAlpha, "exp_alpha needs a positive exponent");
        return build_measure(pow(abs(x), a), {-kInf, kInf}, opts, spec);
    }
    if (head == "custom") {
        auto at = rest.rfind('@');
        if (at == std::string::npos) fail(ErrorKind::ParseError, "custom measure needs '@[a,b]'");
        std::string expr = rest.substr(0, at), iv = rest.substr(at + 1);
        if (iv.size() < 5 || iv.front() != '[' || iv.back() != ']')
            fail(ErrorKind::ParseError, "bad support interval '" + iv + "'");
        auto comma = iv.find(',');
        if (comma == std::string::npos) fail(ErrorKind::ParseError, "bad support interval '" + iv + "'");
        double a = parse_bound(iv.substr(1, comma - 1)), b = parse_bound(iv.substr(comma + 1, iv.size() - comma - 2));
        if (!(a < b)) fail(ErrorKind::InvalidSupport, "support needs a < b");
        return build_measure(ScalarFunction::parse(expr), {a, b}, opts, spec);
    }
    fail(ErrorKind::ParseError, "unknown measure '" + spec + "'");
}

// ---------------------------------------------------------------------------
// Finiteness probes

/// Fits g(x) ~ k |x|^p along x = dir * R 2^j for large R.
template <class G>
TailForm fit_tail(G&& g, double dir, double R) {
    double v[3], r[3];
    for (int j = 0; j < 3; ++j) {
        r[j] = R * std::ldexp(1.0, j);
        v[j] = static_cast<double>(g(dir * r[j]));
    }
    TailForm t;
    if (!(std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]))) return t;
    if (v[2] <= 0 && v[1] <= 0) {
        // bounded above by zero at infinity: no growth
        t.ok = std::abs(v[2]) <= 1e-9 * r[2] * r[2] || v[2] <= v[1];
        t.p = 0;
        t.k = 0;
        return t;
    }
    if (!(v[0] > 0 && v[1] > 0 && v[2] > 0)) return t;
    double p1 = std::log2(v[1] / v[0]), p2 = std::log2(v[2] / v[1]);
    if (std::abs(p1 - p2) > 0.02 * std::max(1.0, std::abs(p2))) return t;
    t.ok = true;
    t.p = std::round(p2 * 1e4) / 1e4;
    t.k = v[2] / std::pow(r[2], t.p);
    return t;
}

namespace detail {

/// Symbolic comparison of growth exponents. Returns +1 (h dominates, diverges),
/// -1 (V dominates, finite) or 0 (undecided).
inline int compare_tails(const TailForm& h, const TailForm& V) {
    if (!h.ok || !V.ok) return 0;
    if (h.p == 0 && h.k == 0) return V.p > 0 ? -1 : 0;
    if (V.p > h.p + 1e-3) return -1;
    if (h.p > V.p + 1e-3) return 1;
    if (V.k > h.k * (1 + 1e-6)) return -1;
    if (h.k > V.k * (1 + 1e-6)) return 1;
    return 0;
}

}  // namespace detail

/// Is the integral of exp(h) against mu finite? Numeric window growth plus a
/// comparison of tail exponents where both tails have power form.
template <class H>
ProbeResult probe_exp_integral(const Measure1D& mu, H&& h, double rel_tol = 1e-3) {
    using LD = long double;
    ProbeResult res;
    const double x0 = mu.mode();
    double r0 = std::max({1.0, x0 - mu.window_lo(), mu.window_hi() - x0});
    // symbolic
    const double R = 64.0 * r0;
    int verdict = -1;
    bool decided = true;
    for (double dir : {-1.0, 1.0}) {
        double end = dir < 0 ? mu.support_lo() : mu.support_hi();
        if (std::isfinite(end)) continue;
        auto hv = fit_tail([&](double x) { return static_cast<double>(h(x)); }, dir, R);
        auto Vv = fit_tail([&](double x) { return -static_cast<double>(mu.raw_log_density(x)); }, dir, R);
        int c = detail::compare_tails(hv, Vv);
        if (c == 1) verdict = 1;
        if (c == 0) decided = false;
    }
    // numeric
    std::vector<double> logs;
    double r = r0;
    for (int k = 0; k < 10; ++k, r *= 1.5) {
        std::vector<LD> terms;
        for (const auto& p : mu.support()) {
            double lo = std::max(p.lo, x0 - r), hi = std::min(p.hi, x0 + r);
            if (!(lo < hi)) continue;
            const int np = 1024;
            for (int j = 0; j < np; ++j) {
                LD a = lo + (LD(hi) - lo) * j / np, b = lo + (LD(hi) - lo) * (j + 1) / np;
                LD c = 0.5L * (a + b), hw = 0.5L * (b - a);
                for (std::size_t i = 0; i < 8; ++i) {
                    LD x = c + hw * gl8::x[i];
                    LD hx = static_cast<LD>(h(x));
                    LD l = mu.log_density(x);
                    if (std::isnan(static_cast<double>(hx))) fail(ErrorKind::DomainError, "probe exponent is NaN");
                    if (!std::isfinite(static_cast<double>(l))) continue;
                    terms.push_back(std::log(gl8::w[i] * hw) + hx + l);
                }
            }
        }
        logs.push_back(static_cast<double>(log_sum_exp(terms)));
        std::size_t n = logs.size();
        if (n >= 3 && std::abs(logs[n - 1] - logs[n - 2]) < 1e-12 && std::abs(logs[n - 2] - logs[n - 3]) < 1e-12)
            break;
    }
    std::size_t n = logs.size();
    double d1 = logs[n - 1] - logs[n - 2], d0 = n >= 3 ? logs[n - 2] - logs[n - 3] : d1;
    bool num_finite = std::isfinite(logs.back()) && d1 < std::log1p(rel_tol) && d1 <= d0 + 1e-12;
    res.log_value = logs.back();
    if (decided) {
        res.numeric_only = false;
        res.finite = verdict < 0;
        res.detail = res.finite ? "tail exponents: potential dominates" : "tail exponents: exponent dominates";
    } else {
        res.finite = num_finite;
        res.detail = "window growth";
    }
    res.value = res.finite ? std::exp(res.log_value) : kInf;
    return res;
}

/// Double integral of exp(beta c(x - y)) against mu x mu.
template <class C>
ProbeResult exp_double_integral(const Measure1D& mu, C&& c, double beta, double rel_tol = 1e-3) {
    using LD = long double;
    ProbeResult res;
    const double x0 = mu.mode();
    double r0 = std::max({1.0, x0 - mu.window_lo(), mu.window_hi() - x0});
    // symbolic: leading exponent along rays in the plane
    const double R = 64.0 * r0;
    TailForm VL, VR, CL, CR;
    bool left_inf = !std::isfinite(mu.support_lo()), right_inf = !std::isfinite(mu.support_hi());
    auto Vf = [&](double x) { return -static_cast<double>(mu.raw_log_density(x)); };
    if (left_inf) VL = fit_tail(Vf, -1.0, R);
    if (right_inf) VR = fit_tail(Vf, 1.0, R);
    CL = fit_tail([&](double u) { return beta * static_cast<double>(c(u)); }, -1.0, R);
    CR = fit_tail([&](double u) { return beta * static_cast<double>(c(u)); }, 1.0, R);
    bool usable = CL.ok && CR.ok && (!left_inf || VL.ok) && (!right_inf || VR.ok);
    bool decided = false;
    bool sym_finite = false;
    if (usable) {
        double worst = -kInf;
        bool tie = false;
        for (int i = 0; i < 3600; ++i) {
            double th = 2 * kPi * (i + 0.5) / 3600;
            double ux = std::cos(th), uy = std::sin(th);
            if ((ux < 0 && !left_inf) || (uy < 0 && !left_inf) || (ux > 0 && !right_inf) || (uy > 0 && !right_inf))
                continue;
            struct Term { double p, a; };
            std::vector<Term> terms;
            double dxy = ux - uy;
            const TailForm& cf = dxy >= 0 ? CR : CL;
            if (std::abs(dxy) > 1e-9 && cf.k != 0) terms.push_back({cf.p, cf.k * std::pow(std::abs(dxy), cf.p)});
            for (double u : {ux, uy}) {
                const TailForm& vf = u >= 0 ? VR : VL;
                if (std::abs(u) > 1e-9) terms.push_back({vf.p, -vf.k * std::pow(std::abs(u), vf.p)});
            }
            double pmax = 0;
            for (auto& t : terms) pmax = std::max(pmax, t.p);
            double coef = 0;
            for (auto& t : terms)
                if (std::abs(t.p - pmax) < 1e-3) coef += t.a;
            if (std::abs(coef) < 1e-6) tie = true;
            worst = std::max(worst, coef);
        }
        if (worst > 1e-6) { decided = true; sym_finite = false; }
        else if (!tie) { decided = true; sym_finite = true; }
    }
    // numeric
    std::vector<double> logs;
    double r = r0;
    for (int k = 0; k < 8; ++k, r *= 1.5) {
        std::vector<LD> nx, nl;
        for (const auto& p : mu.support()) {
            double lo = std::max(p.lo, x0 - r), hi = std::min(p.hi, x0 + r);
            if (!(lo < hi)) continue;
            const int np = 160;
            for (int j = 0; j < np; ++j) {
                LD a = lo + (LD(hi) - lo) * j / np, b = lo + (LD(hi) - lo) * (j + 1) / np;
                LD cc = 0.5L * (a + b), hw = 0.5L * (b - a);
                for (std::size_t i = 0; i < 8; ++i) {
                    LD x = cc + hw * gl8::x[i];
                    LD l = mu.log_density(x);
                    if (!std::isfinite(static_cast<double>(l))) continue;
                    nx.push_back(x);
                    nl.push_back(std::log(gl8::w[i] * hw) + l);
                }
            }
        }
        std::vector<LD> rows(nx.size());
        std::vector<double> row(nx.size());
        for (std::size_t i = 0; i < nx.size(); ++i) {
            double m = -kInf;
            for (std::size_t j = 0; j < nx.size(); ++j) {
                row[j] = static_cast<double>(nl[j]) + beta * static_cast<double>(c(static_cast<double>(nx[i] - nx[j])));
                m = std::max(m, row[j]);
            }
            double acc = 0;
            for (double v : row) acc += std::exp(v - m);
            rows[i] = nl[i] + m + std::log(acc);
        }
        logs.push_back(static_cast<double>(log_sum_exp(rows)));
        std::size_t n = logs.size();
        if (n >= 2 && std::abs(logs[n - 1] - logs[n - 2]) < 1e-10) break;
        if (n >= 3 && logs[n - 1] - logs[n - 2] > 1.0 && logs[n - 2] - logs[n - 3] > 1.0) break;
    }
    std::size_t n = logs.size();
    double d1 = logs[n - 1] - logs[n - 2], d0 = n >= 3 ? logs[n - 2] - logs[n - 3] : d1;
    bool num_finite = std::isfinite(logs.back()) && d1 < std::log1p(rel_tol) && d1 <= d0 + 1e-12;
    res.log_value = logs.back();
    if (decided) {
        res.numeric_only = false;
        res.finite = sym_finite;
        res.detail = "tail exponents along rays";
    } else {
        res.finite = num_finite;
        res.detail = "window growth";
    }
    res.value = res.finite ? std::exp(res.log_value) : kInf;
    return res;
}

}  // namespace ineqforge
