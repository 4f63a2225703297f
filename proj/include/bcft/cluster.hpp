#pragma once

// Boundary removal: the g parts of f_i = G_i - H_i move a distance a to the
// left and the h parts a distance a to the right. Chiral g-g and h-h blocks
// are shift invariant; mixed blocks see x - y +- 2a and produce the decay
// (2 a mu)^{-Q^2}, Q = sum q_i. For Q = 0 the correlator factorizes into
// omega(W(G_1)...W(G_n)) * omega(W(-H_1)...W(-H_n)).

#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bcft/boundary.hpp"
#include "bcft/error.hpp"
#include "bcft/parallel.hpp"
#include "bcft/weyl.hpp"

namespace bcft::cluster {

inline double total_charge(std::span<const BoundaryOperator> ops)
{
    double q = 0.0;
    for (const auto& b : ops) q += b.q;
    return q;
}

inline bool is_charge_zero(double q, double scale) { return std::abs(q) <= 1e-12 * std::max(1.0, scale); }

/// Exponent of the shifted correlator split by block type.
struct ShiftedExponent {
    cplx chiral_left{};   // g-g blocks
    cplx chiral_right{};  // h-h blocks
    cplx mixed{};         // g-h and h-g blocks

    cplx total() const { return chiral_left + chiral_right + mixed; }
    cplx value() const { return std::exp(total()); }
};

inline ShiftedExponent shifted_exponent(std::span<const BoundaryOperator> ops, double a, double mu,
    const QuadratureConfig& cfg = {})
{
    if (!(mu > 0.0)) throw Error(Errc::invalid_parameter, "IR scale mu must be positive");
    if (!(a >= 0.0)) throw Error(Errc::invalid_parameter, "shift distance must be nonnegative");
    for (const auto& b : ops)
        if (!b.f.is_neutral()) throw Error(Errc::charged_ir_divergence, "boundary operators must be individually neutral");

    std::vector<SmearedFunction> gs, hs;
    for (const auto& b : ops) {
        gs.push_back(shift(b.G, -a));
        hs.push_back(shift(b.H, a));
    }
    ShiftedExponent e;
    for (std::size_t i = 0; i < ops.size(); ++i) {
        for (std::size_t j = i; j < ops.size(); ++j) {
            const double weight = i == j ? -0.5 : -1.0;
            using weyl::regularized_pair_exponent;
            e.chiral_left += weight * regularized_pair_exponent(ops[i].G, ops[j].G, mu, cfg);
            e.chiral_right += weight * regularized_pair_exponent(ops[i].H, ops[j].H, mu, cfg);
            const cplx gh = regularized_pair_exponent(gs[i], hs[j], mu, cfg);
            const cplx hg = regularized_pair_exponent(hs[i], gs[j], mu, cfg);
            e.mixed -= weight * (gh + hg);
        }
    }
    return e;
}

/// omega(W(f_1(a)) ... W(f_n(a))) for the shifted operators.
inline cplx shifted_correlator(std::span<const BoundaryOperator> ops, double a, double mu, const QuadratureConfig& cfg = {})
{
    return shifted_exponent(ops, a, mu, cfg).value();
}

/// omega(W(G_1) ... W(G_n)) for charged G_i with sum q_i = 0, every block
/// regularized with K_mu. Independent of mu.
inline weyl::CorrelatorValue charged_ensemble_correlator(std::span<const SmearedFunction> gs, double mu,
    const QuadratureConfig& cfg = {})
{
    if (!(mu > 0.0)) throw Error(Errc::invalid_parameter, "IR scale mu must be positive");
    double q = 0.0, scale = 0.0;
    for (const auto& g : gs) {
        q += g.total_charge();
        scale += std::abs(g.total_charge());
    }
    if (!is_charge_zero(q, scale))
        throw Error(Errc::total_charge, "charged Weyl ensemble with nonzero total charge: correlator vanishes");
    auto out = weyl::detail::assemble(gs, mu, {1.0, 0.0}, cfg);
    out.mu = mu;
    return out;
}

/// Limit target omega(W(G_1)...W(G_n)) omega(W(-H_1)...W(-H_n)). Built from
/// two independent chiral computations; no mixed block enters.
inline cplx factorized_limit(std::span<const BoundaryOperator> ops, double mu, const QuadratureConfig& cfg = {})
{
    std::vector<SmearedFunction> gs, minus_hs;
    for (const auto& b : ops) {
        gs.push_back(b.G);
        minus_hs.push_back(-b.H);
    }
    return charged_ensemble_correlator(gs, mu, cfg).value * charged_ensemble_correlator(minus_hs, mu, cfg).value;
}

inline std::vector<double> log_grid(double lo, double hi, std::size_t n)
{
    if (!(lo > 0.0 && hi > lo) || n < 2) throw Error(Errc::invalid_parameter, "log grid needs 0 < lo < hi and n >= 2");
    std::vector<double> g(n);
    const double l0 = std::log10(lo), l1 = std::log10(hi);
    for (std::size_t i = 0; i < n; ++i) g[i] = std::pow(10.0, l0 + (l1 - l0) * static_cast<double>(i) / (n - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

struct FitWindow {
    std::size_t begin = 0;
    std::size_t end = 0;  // exclusive
};

/// Default window: the last 8 points (or all, if fewer).
inline FitWindow default_window(std::size_t n) { return {n > 8 ? n - 8 : 0, n}; }

struct ClusterScan {
    std::vector<BoundaryOperator> operators;
    std::vector<double> a_grid;
    double mu = 1.0;
    std::vector<cplx> values;
    double fitted_exponent = 0.0;
    FitWindow fit_window;
};

/// Least-squares slope of log y against log x.
inline double loglog_slope(std::span<const double> x, std::span<const double> y)
{
    const std::size_t n = x.size();
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += std::log(x[i]);
        sy += std::log(y[i]);
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(x[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(y[i]) - my);
    }
    return sxy / sxx;
}

/// Slope of log|value| against log a over the fit window; estimates -Q^2.
inline double cluster_scan_fit(const ClusterScan& scan)
{
    const auto& g = scan.a_grid;
    if (g.size() != scan.values.size()) throw Error(Errc::invalid_input, "scan grid and values differ in length");
    if (g.size() < 4) throw Error(Errc::insufficient_data, "cluster fit needs at least 4 grid points");
    if (g.back() * scan.mu < 100.0 * g.front() * scan.mu) throw Error(Errc::insufficient_data, "cluster grid must span at least 2 decades");
    const auto w = scan.fit_window;
    if (w.end > g.size() || w.end < w.begin + 4) throw Error(Errc::insufficient_data, "fit window needs at least 4 points");
    std::vector<double> xs, ys;
    for (std::size_t i = w.begin; i < w.end; ++i) {
        xs.push_back(g[i]);
        ys.push_back(std::abs(scan.values[i]));
    }
    return loglog_slope(xs, ys);
}

inline ClusterScan run_cluster_scan(std::vector<BoundaryOperator> ops, std::vector<double> a_grid, double mu,
    std::optional<FitWindow> window = {}, bool parallel = false, const QuadratureConfig& cfg = {})
{
    ClusterScan scan;
    scan.operators = std::move(ops);
    scan.a_grid = std::move(a_grid);
    scan.mu = mu;
    scan.fit_window = window.value_or(default_window(scan.a_grid.size()));
    scan.values = parallel_map<cplx>(
        scan.a_grid.size(), [&](std::size_t i) { return shifted_correlator(scan.operators, scan.a_grid[i], mu, cfg); },
        parallel);
    scan.fitted_exponent = cluster_scan_fit(scan);
    return scan;
}

struct FactorizationRow {
    double a = 0.0;
    cplx shifted{};
    cplx factorized{};
    /// |shifted - factorized| / |factorized| for Q = 0; |shifted| when the
    /// limit is zero.
    double deficit = 0.0;
};

struct FactorizationReport {
    double total_charge = 0.0;
    bool limit_is_zero = false;
    double expected_exponent = 0.0;  // -Q^2 when the limit is zero
    std::optional<double> fitted_exponent;
    std::optional<double> deficit_rate;  // slope of log deficit vs log a
    cplx factorized{};
    std::vector<FactorizationRow> rows;
    bool degenerate = false;
    std::string note;
};

inline FactorizationReport factorization_check(std::span<const BoundaryOperator> ops, std::span<const double> a_grid,
    double mu, std::optional<FitWindow> window = {}, bool parallel = false, const QuadratureConfig& cfg = {})
{
    FactorizationReport rep;
    double scale = 0.0;
    for (const auto& b : ops) scale += std::abs(b.q);
    rep.total_charge = total_charge(ops);
    rep.limit_is_zero = !is_charge_zero(rep.total_charge, scale);
    rep.expected_exponent = rep.limit_is_zero ? -rep.total_charge * rep.total_charge : 0.0;
    if (!rep.limit_is_zero) rep.factorized = factorized_limit(ops, mu, cfg);

    const auto shifted = parallel_map<cplx>(
        a_grid.size(), [&](std::size_t i) { return shifted_correlator(ops, a_grid[i], mu, cfg); }, parallel);
    for (std::size_t i = 0; i < a_grid.size(); ++i) {
        FactorizationRow row{a_grid[i], shifted[i], rep.factorized, 0.0};
        row.deficit = rep.limit_is_zero ? std::abs(shifted[i]) : std::abs(shifted[i] - rep.factorized) / std::abs(rep.factorized);
        rep.rows.push_back(row);
    }

    const auto w = window.value_or(default_window(a_grid.size()));
    std::vector<double> xs, ys;
    for (std::size_t i = w.begin; i < std::min(w.end, rep.rows.size()); ++i) {
        if (rep.rows[i].deficit > 0.0) {
            xs.push_back(rep.rows[i].a);
            ys.push_back(rep.rows[i].deficit);
        }
    }
    if (rep.limit_is_zero) {
        rep.note = "nonzero total chiral charge: limit is 0, decay (2 a mu)^{-Q^2}";
        if (xs.size() >= 2) rep.fitted_exponent = loglog_slope(xs, ys);
    } else if (xs.size() >= 2) {
        rep.deficit_rate = loglog_slope(xs, ys);
        rep.note = "neutral ensemble: correlator factorizes into chiral charged correlators";
    } else {
        rep.degenerate = true;
        rep.note = "deficit vanishes identically on the fit window";
    }
    return rep;
}

}  // namespace bcft::cluster
