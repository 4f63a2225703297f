#pragma once

// Vertex operators V_q(u), the pointlike limits of charged Weyl operators.
//     <V_{q_1}(u_1) ... V_{q_n}(u_n)> = prod_{i<j} (-i / (u_ij - i eps))^{-q_i q_j}
// when sum q_i = 0, and 0 otherwise. Each factor is exp(-q_i q_j Log w) with
// w = -i / (u_ij - i eps); Re w > 0 so the principal branch never jumps.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "bcft/error.hpp"
#include "bcft/testfn.hpp"

namespace bcft::vertex {

using std::numbers::pi;

struct VertexEntry {
    double q = 0.0;
    double u = 0.0;
};

inline double spread(const std::vector<double>& us)
{
    if (us.empty()) return 1.0;
    const auto [lo, hi] = std::minmax_element(us.begin(), us.end());
    const double s = *hi - *lo;
    return s > 0.0 ? s : std::max(1.0, std::abs(*hi));
}

class VertexEnsemble {
public:
    VertexEnsemble() = default;

    /// epsilon defaults to 1e-8 times the spread of the positions.
    explicit VertexEnsemble(std::vector<VertexEntry> entries, std::optional<double> epsilon = {})
        : entries_(std::move(entries))
    {
        for (const auto& e : entries_)
            if (!std::isfinite(e.q) || !std::isfinite(e.u)) throw Error(Errc::invalid_parameter, "vertex entries must be finite");
        eps_ = epsilon.value_or(1e-8 * spread(positions()));
        if (!(eps_ > 0.0) || !std::isfinite(eps_)) throw Error(Errc::invalid_parameter, "epsilon must be positive");
        for (const auto& e : entries_) {
            total_ += e.q;
            scale_ += std::abs(e.q);
        }
    }

    const std::vector<VertexEntry>& entries() const { return entries_; }
    double epsilon() const { return eps_; }
    double total_charge() const { return total_; }
    bool is_neutral() const { return std::abs(total_) <= 1e-12 * std::max(1.0, scale_); }
    std::size_t size() const { return entries_.size(); }

    std::vector<double> positions() const
    {
        std::vector<double> us;
        for (const auto& e : entries_) us.push_back(e.u);
        return us;
    }

private:
    std::vector<VertexEntry> entries_;
    double eps_ = 1e-8;
    double total_ = 0.0;
    double scale_ = 0.0;
};

/// Principal Log of w = -i / (z - i eps).
inline cplx log_factor(double z, double eps)
{
    const cplx w = cplx(0.0, -1.0) / cplx(z, -eps);
    if (!(w.real() > 0.0)) throw Error(Errc::invalid_parameter, "vertex factor left the right half plane");
    // log|w| = -log|z - i eps|, arg w = atan2(-z, eps); avoids forming w for the log.
    return {-std::log(std::hypot(z, eps)), std::atan2(-z, eps)};
}

/// Sum of -q_i q_j Log w_ij over i < j; throws at divergent coincidences.
inline cplx vertex_log(const VertexEnsemble& ens)
{
    const auto& es = ens.entries();
    const double guard = 1e-12 * spread(ens.positions());
    cplx s{};
    for (std::size_t i = 0; i < es.size(); ++i) {
        for (std::size_t j = i + 1; j < es.size(); ++j) {
            const double z = es[i].u - es[j].u;
            const double qq = es[i].q * es[j].q;
            if (std::abs(z) < guard && qq > 0.0)
                throw Error(Errc::coincident_point, "coincident vertex positions with q_i q_j > 0 diverge");
            if (qq == 0.0) continue;
            s += -qq * log_factor(z, ens.epsilon());
        }
    }
    return s;
}

inline cplx vertex_correlator(const VertexEnsemble& ens)
{
    if (!ens.is_neutral()) return {0.0, 0.0};
    return std::exp(vertex_log(ens));
}

/// Ratio (swapped order) / (original order) of the pair factor as eps -> 0.
inline cplx exchange_phase(double q1, double u1, double q2, double u2)
{
    if (u1 == u2 || std::abs(u1 - u2) < 1e-12 * std::max(std::abs(u1), std::abs(u2)))
        throw Error(Errc::coincident_point, "exchange phase needs distinct positions");
    const double s = u1 > u2 ? 1.0 : -1.0;
    return std::polar(1.0, -pi * q1 * q2 * s);
}

/// Phi_q(t, x) = V_q(t + x) V_{-q}(t - x).
struct BulkField {
    double q = 0.0;
    double t = 0.0;
    double x = 0.0;

    double u() const { return t + x; }
    double v() const { return t - x; }
};

/// Field on the halfspace x > 0.
inline BulkField halfspace_field(double q, double t, double x)
{
    if (!(x > 0.0)) throw Error(Errc::invalid_geometry, "halfspace fields need x > 0");
    return {q, t, x};
}

inline BulkField from_lightrays(double q, double u, double v) { return {q, 0.5 * (u + v), 0.5 * (u - v)}; }

struct LocalityResult {
    int S = 0;
    double qq = 0.0;
    cplx phase{1.0, 0.0};
    bool commute = true;
};

inline bool is_integer(double x, double tol = 1e-9) { return std::abs(x - std::round(x)) <= tol; }

/// S = s(u1-u2) - s(u1-v2) - s(v1-u2) + s(v1-v2); exchanging the two fields
/// costs exp(-i pi q q' S).
inline LocalityResult locality_phase_sum(const BulkField& f1, const BulkField& f2)
{
    const double c[4] = {f1.u(), f1.v(), f2.u(), f2.v()};
    double lo = c[0], hi = c[0];
    for (double x : c) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    const double guard = 1e-12 * std::max(hi - lo, 1e-300);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (std::abs(c[i] - c[j]) <= guard) throw Error(Errc::coincident_point, "lightray coordinates must be pairwise distinct");

    auto sgn = [](double z) { return z > 0.0 ? 1 : -1; };
    LocalityResult r;
    r.S = sgn(f1.u() - f2.u()) - sgn(f1.u() - f2.v()) - sgn(f1.v() - f2.u()) + sgn(f1.v() - f2.v());
    r.qq = f1.q * f2.q;
    r.phase = r.S == 0 ? cplx(1.0, 0.0) : std::polar(1.0, -pi * r.qq * r.S);
    r.commute = r.S == 0 || is_integer(r.qq * r.S / 2.0);
    return r;
}

/// Phase picked up when Phi_q(t, x) moves past the chiral V_{q'}(u).
inline cplx bulk_chiral_phase(const BulkField& f, double q2, double u2)
{
    return exchange_phase(f.q, f.u(), q2, u2) * exchange_phase(-f.q, f.v(), q2, u2);
}

struct Check {
    std::string name;
    bool passed = false;
    bool expected_failure = false;  // reported, not counted against the verdict
    std::string detail;
};

struct Su2Report {
    std::vector<Check> checks;
    bool ok = false;
};

/// Frenkel-Kac checks at level 1: V_{+-sqrt2} are mutually local, Phi_{sqrt2/2}
/// is local relative to them, and Phi_{sqrt2/2} fields are mutually local on
/// the halfspace though their chiral pieces are anyonic.
inline Su2Report su2_level1_check()
{
    const double r2 = std::numbers::sqrt2;
    const double h = 0.5 * r2;
    Su2Report rep;
    auto add = [&](std::string name, bool passed, std::string detail, bool expected_failure = false) {
        rep.checks.push_back({std::move(name), passed, expected_failure, std::move(detail)});
    };

    // Lightray configurations (u1, v1, u2, v2).
    struct Config {
        const char* name;
        double u1, v1, u2, v2;
    };
    const Config nested{"nested", 4.0, 0.0, 3.0, 1.0};
    const Config spacelike{"spacelike", 2.0, 1.0, 4.0, 3.0};
    const Config interleaved{"interleaved", 4.0, 2.0, 3.0, 1.0};
    const Config configs[] = {nested, spacelike, interleaved};

    for (double s1 : {1.0, -1.0}) {
        for (double s2 : {1.0, -1.0}) {
            const double q1 = s1 * r2, q2 = s2 * r2;
            for (double d : {1.0, -1.0}) {
                const cplx p = exchange_phase(q1, d, q2, 0.0);
                add("chiral sqrt2 exchange", std::abs(p - 1.0) < 1e-12, "q q' = " + std::to_string(q1 * q2));
            }
            for (const auto& c : configs) {
                const auto r = locality_phase_sum(from_lightrays(q1, c.u1, c.v1), from_lightrays(q2, c.u2, c.v2));
                add(std::string("Phi_sqrt2 pair ") + c.name, r.commute && std::abs(r.phase - 1.0) < 1e-12,
                    "S = " + std::to_string(r.S));
            }
        }
    }

    for (double s : {1.0, -1.0}) {
        const double q2 = s * r2;
        for (const auto& c : configs) {
            const BulkField phi = from_lightrays(h, c.u1, c.v1);
            for (double u2 : {c.u2, c.v2}) {
                const cplx p = bulk_chiral_phase(phi, q2, u2);
                add(std::string("Phi_half relative to V_sqrt2 ") + c.name, std::abs(p - 1.0) < 1e-12,
                    "q q' = " + std::to_string(h * q2));
            }
            const auto r = locality_phase_sum(phi, from_lightrays(q2, c.u2, c.v2));
            add(std::string("Phi_half relative to Phi_sqrt2 ") + c.name, r.commute, "S = " + std::to_string(r.S));
        }
    }

    for (const auto& c : {nested, spacelike}) {
        const auto r = locality_phase_sum(from_lightrays(h, c.u1, c.v1), from_lightrays(h, c.u2, c.v2));
        add(std::string("Phi_half pair ") + c.name, r.S == 0 && r.commute && r.phase == cplx(1.0, 0.0),
            "S = " + std::to_string(r.S));
    }
    {
        const auto r = locality_phase_sum(from_lightrays(h, interleaved.u1, interleaved.v1),
            from_lightrays(h, interleaved.u2, interleaved.v2));
        const bool anyonic = r.S == 2 && !r.commute && std::abs(r.phase - cplx(-1.0, 0.0)) < 1e-12;
        add("Phi_half pair interleaved", false, anyonic ? "S = 2, q q' = 1/2: chiral non-locality" : "unexpected phase",
            anyonic);
    }

    rep.ok = std::all_of(rep.checks.begin(), rep.checks.end(), [](const Check& c) { return c.passed || c.expected_failure; });
    return rep;
}

/// Correlator of V_q(t+x) (x) V_{-q}(t-x) over 2D Minkowski space.
inline cplx two_d_factorized_correlator(const std::vector<BulkField>& fields, std::optional<double> epsilon = {})
{
    std::vector<VertexEntry> left, right;
    std::vector<double> all;
    for (const auto& f : fields) {
        left.push_back({f.q, f.u()});
        right.push_back({-f.q, f.v()});
        all.push_back(f.u());
        all.push_back(f.v());
    }
    const double eps = epsilon.value_or(1e-8 * spread(all));
    return vertex_correlator(VertexEnsemble(left, eps)) * vertex_correlator(VertexEnsemble(right, eps));
}

/// Pointlike chiral current kernel <j(u1) j(u2)> = -1 / (u1 - u2 - i eps)^2.
/// Swapping the arguments conjugates it.
inline cplx chiral_current_kernel(double u1, double u2, double epsilon)
{
    if (!(epsilon > 0.0)) throw Error(Errc::invalid_parameter, "epsilon must be positive");
    const cplx z(u1 - u2, -epsilon);
    return -1.0 / (z * z);
}

}  // namespace bcft::vertex
