#pragma once

// Gauss-Legendre based quadrature used by every integral in the library.
// All rules are open (endpoints are never sampled), evaluation order is
// fixed, and no state survives a call except the immutable rule cache.

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include "bcft/error.hpp"

namespace bcft {

struct QuadratureConfig {
    /// Nodes per Gauss-Legendre panel.
    int order = 20;
    /// Panels per characteristic width when resolving a smooth profile.
    int panels_per_width = 2;
    /// Geometric ratio and depth of the mesh graded toward a log singularity.
    double grading_ratio = 0.15;
    int grading_levels = 22;
    /// Momentum cutoff in units of 1/w_min for Gaussian envelopes; beyond it the
    /// mapped tail rule takes over.
    double gaussian_k_cut = 9.0;
    /// Same for algebraically decaying (compact-support) profiles.
    double compact_k_cut = 200.0;
    int tail_panels = 8;

    static QuadratureConfig fast() { return {}; }
    static QuadratureConfig strict()
    {
        QuadratureConfig c;
        c.order = 32;
        c.panels_per_width = 3;
        c.grading_levels = 26;
        c.compact_k_cut = 400.0;
        c.tail_panels = 16;
        return c;
    }
};

struct GaussLegendreRule {
    std::vector<double> nodes;    // on (-1, 1), ascending
    std::vector<double> weights;
};

namespace detail {

inline GaussLegendreRule build_gauss_legendre(int n)
{
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        // recompute derivative at the converged root
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

}  // namespace detail

/// Cached n-point Gauss-Legendre rule. Thread-safe; the returned reference
/// stays valid for the lifetime of the program.
inline const GaussLegendreRule& gauss_legendre(int n)
{
    if (n < 1 || n > 512) throw Error(Errc::invalid_parameter, "Gauss-Legendre order out of range");
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<const GaussLegendreRule>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<const GaussLegendreRule>(detail::build_gauss_legendre(n));
    return *slot;
}

/// Single Gauss-Legendre panel on [a, b].
template <class F>
auto integrate_panel(F&& f, double a, double b, int order)
{
    const auto& rule = gauss_legendre(order);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    decltype(f(mid)) sum{};
    for (int i = 0; i < order; ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return sum * half;
}

/// Composite rule with `panels` equal panels.
template <class F>
auto integrate(F&& f, double a, double b, int order, int panels = 1)
{
    if (panels < 1) panels = 1;
    const double h = (b - a) / panels;
    decltype(f(a)) sum{};
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        const double hi = (p + 1 == panels) ? b : lo + h;
        sum += integrate_panel(f, lo, hi, order);
    }
    return sum;
}

/// Integral over [a, b] where the integrand may be log-singular at a point
/// `s` lying outside (a, b) or on its boundary. The mesh is graded
/// geometrically toward the endpoint nearest to s.
template <class F>
auto integrate_graded(F&& f, double a, double b, double s, const QuadratureConfig& cfg)
{
    const double len = b - a;
    const double dist_a = std::abs(a - s);
    const double dist_b = std::abs(b - s);
    const bool toward_a = dist_a <= dist_b;
    const double dist = toward_a ? dist_a : dist_b;
    decltype(f(a)) sum{};
    if (dist >= len || len <= 0.0) return integrate_panel(f, a, b, cfg.order);

    // subpanels [e + len r^{j+1}, e + len r^j] measured from the near endpoint e
    const double floor_len = std::max(dist, len * 1e-300);
    double outer = len;
    for (int j = 0; j < cfg.grading_levels; ++j) {
        const double inner = outer * cfg.grading_ratio;
        if (toward_a)
            sum += integrate_panel(f, a + inner, a + outer, cfg.order);
        else
            sum += integrate_panel(f, b - outer, b - inner, cfg.order);
        outer = inner;
        if (outer < floor_len) break;
    }
    if (toward_a)
        sum += integrate_panel(f, a, a + outer, cfg.order);
    else
        sum += integrate_panel(f, b - outer, b, cfg.order);
    return sum;
}

/// Integral over [k_cut, inf) through the map k = k_cut / t, t in (0, 1].
template <class F>
auto integrate_tail(F&& f, double k_cut, int order, int panels)
{
    auto mapped = [&](double t) { return f(k_cut / t) * (k_cut / (t * t)); };
    return integrate(mapped, 0.0, 1.0, order, panels);
}

}  // namespace bcft
