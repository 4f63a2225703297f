#pragma once

// Boundary geometry: four times t1 < t2 < t3 < t4 on the boundary define
// J = (t1, t2), K = (t2, t3), I = (t3, t4), L = (t1, t4) and the double cone
// O = I x J in the halfspace x > 0. A boundary operator W(f) with
// f = G - H (G a charge-q step in J, H one in I) vanishes outside L, is
// constant on K, and therefore commutes with every W(g), supp g' in K.

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "bcft/error.hpp"
#include "bcft/testfn.hpp"
#include "bcft/weyl.hpp"

namespace bcft {

class IntervalQuad {
public:
    IntervalQuad(double t1, double t2, double t3, double t4) : t_{t1, t2, t3, t4}
    {
        for (double t : t_)
            if (!std::isfinite(t)) throw Error(Errc::invalid_geometry, "quad times must be finite");
        if (!(t1 < t2 && t2 < t3 && t3 < t4))
            throw Error(Errc::invalid_geometry, "quad needs strictly ordered times t1 < t2 < t3 < t4");
    }

    double t1() const { return t_[0]; }
    double t2() const { return t_[1]; }
    double t3() const { return t_[2]; }
    double t4() const { return t_[3]; }

    Interval I() const { return {t_[2], t_[3]}; }
    Interval J() const { return {t_[0], t_[1]}; }
    Interval K() const { return {t_[1], t_[2]}; }
    Interval L() const { return {t_[0], t_[3]}; }

    bool operator==(const IntervalQuad&) const = default;

private:
    double t_[4];
};

/// Spacetime point (t, x) of the halfspace.
struct Point {
    double t = 0.0;
    double x = 0.0;
    bool operator==(const Point&) const = default;
};

/// Point with lightray coordinates u = t + x and v = t - x.
inline Point from_lightrays(double u, double v) { return {0.5 * (u + v), 0.5 * (u - v)}; }

struct Regions {
    Interval I, J, K, L;
    /// Corners of O = I x J, ordered (t3,t1), (t3,t2), (t4,t1), (t4,t2) in (u, v).
    Point corners[4];
    Point center;
};

inline Regions regions(const IntervalQuad& quad)
{
    Regions r{quad.I(), quad.J(), quad.K(), quad.L(), {}, {}};
    r.corners[0] = from_lightrays(quad.t3(), quad.t1());
    r.corners[1] = from_lightrays(quad.t3(), quad.t2());
    r.corners[2] = from_lightrays(quad.t4(), quad.t1());
    r.corners[3] = from_lightrays(quad.t4(), quad.t2());
    r.center = from_lightrays(r.I.midpoint(), r.J.midpoint());
    return r;
}

struct BoundaryOperator {
    IntervalQuad quad;
    SmearedFunction G;  // step in J
    SmearedFunction H;  // step in I
    SmearedFunction f;  // G - H
    double q = 0.0;
};

struct StepPlacement {
    std::optional<double> center_J;
    std::optional<double> center_I;
};

inline BoundaryOperator make_boundary_operator(const IntervalQuad& quad, double q, double w, PrimitiveKind kind,
    StepPlacement placement = {})
{
    if (!is_step(kind)) throw Error(Errc::invalid_parameter, "boundary operators need a step kind");
    if (!(w > 0.0)) throw Error(Errc::invalid_parameter, "step width must be positive");
    const double cj = placement.center_J.value_or(quad.J().midpoint());
    const double ci = placement.center_I.value_or(quad.I().midpoint());
    const double radius = Primitive{kind, q, 0.0, w}.radius();
    auto fits = [&](const Interval& iv, double c) { return iv.lo <= c - radius && c + radius <= iv.hi; };
    if (!fits(quad.J(), cj)) throw Error(Errc::support_overflow, "step density does not fit inside J");
    if (!fits(quad.I(), ci)) throw Error(Errc::support_overflow, "step density does not fit inside I");
    auto G = build_step(q, cj, w, kind);
    auto H = build_step(q, ci, w, kind);
    auto f = G - H;
    return {quad, std::move(G), std::move(H), std::move(f), q};
}

/// W(f)* = W(-f): same geometry, opposite charge.
inline BoundaryOperator conjugate(const BoundaryOperator& b)
{
    return {b.quad, -b.G, -b.H, -b.f, -b.q};
}

/// Moves G a distance a to the left and H a distance a to the right.
inline BoundaryOperator shift_apart(const BoundaryOperator& b, double a)
{
    if (!(a >= 0.0)) throw Error(Errc::invalid_parameter, "shift distance must be nonnegative");
    if (a == 0.0) return b;
    IntervalQuad quad(b.quad.t1() - a, b.quad.t2() - a, b.quad.t3() + a, b.quad.t4() + a);
    auto G = shift(b.G, -a);
    auto H = shift(b.H, a);
    auto f = G - H;
    return {quad, std::move(G), std::move(H), std::move(f), b.q};
}

struct ProbeResult {
    double sigma = 0.0;
    /// |exp(-2 pi i sigma) - 1|
    double phase_defect = 0.0;
    bool density_in_K = false;
    bool commutes = false;
    /// Probe outside K that fails to commute: expected, reported for diagnostics.
    bool expected_noncommutation = false;
    /// Probe inside K that fails to commute.
    bool violation = false;
};

struct MembershipReport {
    std::vector<ProbeResult> probes;
    bool vanishes_outside_L = false;
    bool neutral = false;
    double tolerance = 0.0;
    bool ok = false;
};

namespace detail {

// Rough sup-norm scale of a probe: step heights plus bump peak heights.
inline double probe_scale(const SmearedFunction& g)
{
    double s = 0.0;
    for (const auto& p : g.primitives()) s += is_step(p.kind) ? std::abs(p.q) : std::abs(p.q) / p.w;
    return s;
}

}  // namespace detail

/// Tolerance for |sigma(f, g)| with g supported in K. Exact-support operators
/// get a rounding-level bound; Gaussian ones add the declared tail mass.
inline double membership_tolerance(const BoundaryOperator& b, const SmearedFunction& probe)
{
    const double scale = std::max(1.0, std::abs(b.q)) * std::max(1.0, detail::probe_scale(probe));
    double tol = 1e-14 * scale;
    if (!b.f.exact_support() || !probe.exact_support()) tol += 16.0 * gaussian_tail_mass * scale;
    return tol;
}

inline MembershipReport membership_check(const BoundaryOperator& b, std::span<const SmearedFunction> probes,
    const QuadratureConfig& cfg = {})
{
    MembershipReport rep;
    rep.neutral = b.f.is_neutral();
    rep.vanishes_outside_L = rep.neutral && (b.f.is_zero() || b.quad.L().contains(b.f.effective_support()));
    rep.ok = rep.vanishes_outside_L;
    for (const auto& g : probes) {
        ProbeResult pr;
        pr.sigma = weyl::symplectic_form(b.f, g, cfg);
        pr.phase_defect = std::abs(std::polar(1.0, -2.0 * weyl::pi * pr.sigma) - 1.0);
        pr.density_in_K = g.is_neutral() && (g.is_zero() || b.quad.K().contains(g.effective_support()));
        const double tol = membership_tolerance(b, g);
        rep.tolerance = std::max(rep.tolerance, tol);
        pr.commutes = std::abs(pr.sigma) <= tol;
        pr.violation = pr.density_in_K && !pr.commutes;
        pr.expected_noncommutation = !pr.density_in_K && !pr.commutes;
        if (pr.violation) rep.ok = false;
        rep.probes.push_back(pr);
    }
    return rep;
}

}  // namespace bcft
