#pragma once

// Smooth test functions f for Weyl operators W(f): sums of step and bump
// primitives with their densities rho = f', charges and Fourier transforms
// under fhat(k) = int e^{ikx} f(x) dx.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bcft/error.hpp"
#include "bcft/quadrature.hpp"
#include "bcft/special.hpp"

namespace bcft {

using cplx = std::complex<double>;

enum class PrimitiveKind {
    gaussian_step,  // q * Phi((x - c)/w): density q N(c, w)
    bump_step,      // q * B((x - c)/w): density (q/w) b((x - c)/w), exact support
    gaussian_bump,  // q * N(x; c, w): neutral, integral q
    compact_bump,   // (q/w) b((x - c)/w): neutral, integral q, exact support
};

enum class FourierKind { closed_form, quadrature };

inline bool is_step(PrimitiveKind k) { return k == PrimitiveKind::gaussian_step || k == PrimitiveKind::bump_step; }
inline bool is_gaussian(PrimitiveKind k) { return k == PrimitiveKind::gaussian_step || k == PrimitiveKind::gaussian_bump; }

inline std::string_view kind_name(PrimitiveKind k)
{
    switch (k) {
    case PrimitiveKind::gaussian_step: return "gaussian-step";
    case PrimitiveKind::bump_step: return "bump-step";
    case PrimitiveKind::gaussian_bump: return "gaussian-bump";
    case PrimitiveKind::compact_bump: return "compact-bump";
    }
    return "?";
}

inline PrimitiveKind parse_kind(std::string_view s)
{
    if (s == "gaussian-step") return PrimitiveKind::gaussian_step;
    if (s == "bump-step") return PrimitiveKind::bump_step;
    if (s == "gaussian-bump") return PrimitiveKind::gaussian_bump;
    if (s == "compact-bump") return PrimitiveKind::compact_bump;
    throw Error(Errc::invalid_parameter, "unknown primitive kind '" + std::string(s) + "'");
}

/// Declared effective-support radius of Gaussian profiles, in widths. The
/// Gaussian mass outside c +- 8w is erfc(8/sqrt 2) ~ 1.2e-15.
inline constexpr double gaussian_cutoff = 8.0;
inline constexpr double gaussian_tail_mass = 1.2442e-15;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    double midpoint() const { return 0.5 * (lo + hi); }
    bool contains(double x) const { return lo <= x && x <= hi; }
    bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
    bool operator==(const Interval&) const = default;
};

/// One building block. For step kinds q is the charge; for bump kinds q is
/// the integral of the function itself and the charge is zero.
struct Primitive {
    PrimitiveKind kind = PrimitiveKind::gaussian_step;
    double q = 0.0;
    double c = 0.0;
    double w = 1.0;

    double charge() const { return is_step(kind) ? q : 0.0; }
    double radius() const { return is_gaussian(kind) ? gaussian_cutoff * w : w; }
    Interval support() const { return {c - radius(), c + radius()}; }

    bool operator==(const Primitive&) const = default;
};

namespace profile {

// b(s) = (315/256)(1 - s^2)^4 on [-1, 1]
inline double bump(double s)
{
    if (s <= -1.0 || s >= 1.0) return 0.0;
    const double u = 1.0 - s * s;
    return (315.0 / 256.0) * u * u * u * u;
}

inline double bump_derivative(double s)
{
    if (s <= -1.0 || s >= 1.0) return 0.0;
    const double u = 1.0 - s * s;
    return -(315.0 / 32.0) * s * u * u * u;
}

// B(s) = int_{-1}^s b, exactly 0 below -1 and exactly 1 above 1
inline double bump_step(double s)
{
    if (s <= -1.0) return 0.0;
    if (s >= 1.0) return 1.0;
    // B(s) = (1 + s)^5 (35 s^4 - 175 s^3 + 345 s^2 - 325 s + 128) / 256 on
    // [-1, 0], mirrored for s > 0; keeps B >= 0 near s = -1
    auto lower = [](double t) {
        const double u = 1.0 + t;
        const double u2 = u * u;
        return u2 * u2 * u * (128.0 + t * (-325.0 + t * (345.0 + t * (-175.0 + t * 35.0)))) / 256.0;
    };
    return s <= 0.0 ? lower(s) : 1.0 - lower(-s);
}

}  // namespace profile

inline double primitive_value(const Primitive& p, double x)
{
    const double s = (x - p.c) / p.w;
    switch (p.kind) {
    case PrimitiveKind::gaussian_step: return p.q * special::normal_cdf(s);
    case PrimitiveKind::bump_step: return p.q * profile::bump_step(s);
    case PrimitiveKind::gaussian_bump: return p.q * special::normal_pdf(s) / p.w;
    case PrimitiveKind::compact_bump: return p.q * profile::bump(s) / p.w;
    }
    return 0.0;
}

inline double primitive_density(const Primitive& p, double x)
{
    const double s = (x - p.c) / p.w;
    switch (p.kind) {
    case PrimitiveKind::gaussian_step: return p.q * special::normal_pdf(s) / p.w;
    case PrimitiveKind::bump_step: return p.q * profile::bump(s) / p.w;
    case PrimitiveKind::gaussian_bump: return -p.q * s * special::normal_pdf(s) / (p.w * p.w);
    case PrimitiveKind::compact_bump: return p.q * profile::bump_derivative(s) / (p.w * p.w);
    }
    return 0.0;
}

/// Normalized profile transform phi(kw) (phi(0) = 1) and phi - 1.
inline special::BumpTransform profile_transform(PrimitiveKind kind, double kw)
{
    if (is_gaussian(kind)) {
        const double x = -0.5 * kw * kw;
        return {std::exp(x), std::expm1(x)};
    }
    return special::bump_transform(kw);
}

/// Fourier data of a primitive split as fhat(k) = i*q_step/k + regular(k).
/// The pole carries the charge; `regular` is finite at k = 0.
inline cplx primitive_fourier_regular(const Primitive& p, double k)
{
    if (is_step(p.kind)) {
        if (k == 0.0) return {-p.q * p.c, 0.0};  // i q E'(0) with E'(0) = i c
        // i q (e^{ikc} phi(kw) - 1) / k
        cplx em1;
        if (is_gaussian(p.kind)) {
            em1 = special::expm1(cplx(-0.5 * k * k * p.w * p.w, k * p.c));
        } else {
            const auto tr = special::bump_transform(k * p.w);
            em1 = std::polar(1.0, k * p.c) * tr.minus_one + special::expm1(cplx(0.0, k * p.c));
        }
        return cplx(0.0, p.q / k) * em1;
    }
    const auto tr = profile_transform(p.kind, k * p.w);
    return p.q * std::polar(1.0, k * p.c) * tr.value;
}

/// rho-hat(k) = int e^{ikx} rho(x) dx.
inline cplx primitive_density_fourier(const Primitive& p, double k)
{
    const auto tr = profile_transform(p.kind, k * p.w);
    const cplx base = std::polar(1.0, k * p.c) * tr.value;
    if (is_step(p.kind)) return p.q * base;
    return cplx(0.0, -k) * p.q * base;
}

/// Real test function with compactly (or effectively) supported density.
/// Immutable value type; all operations return new functions.
class SmearedFunction {
public:
    SmearedFunction() = default;

    explicit SmearedFunction(std::vector<Primitive> primitives, double offset = 0.0)
        : primitives_(canonical(std::move(primitives))), offset_(offset)
    {
    }

    static SmearedFunction zero() { return {}; }

    /// Primitives as stored; centers are relative to offset().
    std::span<const Primitive> primitives() const { return primitives_; }
    double offset() const { return offset_; }

    /// Primitives with the offset folded into the centers.
    std::vector<Primitive> placed() const
    {
        std::vector<Primitive> out(primitives_);
        for (auto& p : out) p.c += offset_;
        return out;
    }

    bool is_zero() const { return primitives_.empty(); }

    /// Sum of the step heights, q = f(+inf) - f(-inf). A step built with
    /// charge q rises from 0 to q.
    double total_charge() const
    {
        double q = 0.0;
        for (const auto& p : primitives_) q += p.charge();
        return q;
    }

    double charge_scale() const
    {
        double s = 0.0;
        for (const auto& p : primitives_) s += std::abs(p.charge());
        return s;
    }

    bool is_neutral() const { return std::abs(total_charge()) <= 1e-12 * std::max(1.0, charge_scale()); }

    /// Hull of the density supports; empty interval for the zero function.
    Interval effective_support() const
    {
        if (primitives_.empty()) return {offset_, offset_};
        Interval out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
        for (const auto& p : primitives_) {
            const auto s = p.support();
            out.lo = std::min(out.lo, s.lo + offset_);
            out.hi = std::max(out.hi, s.hi + offset_);
        }
        return out;
    }

    bool exact_support() const
    {
        return std::none_of(primitives_.begin(), primitives_.end(), [](const Primitive& p) { return is_gaussian(p.kind); });
    }

    FourierKind fourier_kind() const { return FourierKind::closed_form; }

    double value(double x) const
    {
        double v = 0.0;
        for (const auto& p : primitives_) v += primitive_value(p, x - offset_);
        return v;
    }

    double density(double x) const
    {
        double v = 0.0;
        for (const auto& p : primitives_) v += primitive_density(p, x - offset_);
        return v;
    }

    SmearedFunction operator-() const
    {
        auto prims = primitives_;
        for (auto& p : prims) p.q = -p.q;
        return SmearedFunction(std::move(prims), offset_);
    }

    friend SmearedFunction operator+(const SmearedFunction& a, const SmearedFunction& b)
    {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        if (a.offset_ == b.offset_) {
            std::vector<Primitive> prims(a.primitives_);
            prims.insert(prims.end(), b.primitives_.begin(), b.primitives_.end());
            return SmearedFunction(std::move(prims), a.offset_);
        }
        auto prims = a.placed();
        auto pb = b.placed();
        prims.insert(prims.end(), pb.begin(), pb.end());
        return SmearedFunction(std::move(prims));
    }

    friend SmearedFunction operator-(const SmearedFunction& a, const SmearedFunction& b) { return a + (-b); }

    SmearedFunction scaled(double s) const
    {
        if (s == 0.0) return zero();
        auto prims = primitives_;
        for (auto& p : prims) p.q *= s;
        return SmearedFunction(std::move(prims), offset_);
    }

    bool operator==(const SmearedFunction&) const = default;

private:
    // Same kind/center/width merge by adding q; zero entries are dropped.
    static std::vector<Primitive> canonical(std::vector<Primitive> prims)
    {
        std::vector<Primitive> out;
        out.reserve(prims.size());
        for (const auto& p : prims) {
            if (!(p.w > 0.0) || !std::isfinite(p.w)) throw Error(Errc::invalid_parameter, "primitive width must be positive");
            if (!std::isfinite(p.c) || !std::isfinite(p.q)) throw Error(Errc::invalid_parameter, "primitive parameters must be finite");
            auto it = std::find_if(out.begin(), out.end(),
                [&](const Primitive& o) { return o.kind == p.kind && o.c == p.c && o.w == p.w; });
            if (it != out.end())
                it->q += p.q;
            else
                out.push_back(p);
        }
        std::erase_if(out, [](const Primitive& p) { return p.q == 0.0; });
        return out;
    }

    std::vector<Primitive> primitives_;
    double offset_ = 0.0;
};

/// Smooth step rising from 0 to q around c with scale w.
inline SmearedFunction build_step(double q, double c, double w, PrimitiveKind kind)
{
    if (!(w > 0.0)) throw Error(Errc::invalid_parameter, "step width must be positive");
    if (!is_step(kind)) throw Error(Errc::invalid_parameter, "build_step needs a step kind");
    if (q == 0.0) return SmearedFunction::zero();
    return SmearedFunction({Primitive{kind, q, c, w}});
}

/// Neutral bump with integral m.
inline SmearedFunction build_bump(double m, double c, double w, PrimitiveKind kind)
{
    if (!(w > 0.0)) throw Error(Errc::invalid_parameter, "bump width must be positive");
    if (is_step(kind)) throw Error(Errc::invalid_parameter, "build_bump needs a bump kind");
    if (m == 0.0) return SmearedFunction::zero();
    return SmearedFunction({Primitive{kind, m, c, w}});
}

inline SmearedFunction subtract(const SmearedFunction& g, const SmearedFunction& h) { return g - h; }

inline SmearedFunction shift(const SmearedFunction& f, double d)
{
    if (f.is_zero()) return f;
    return SmearedFunction(std::vector<Primitive>(f.primitives().begin(), f.primitives().end()), f.offset() + d);
}

/// fhat(k) = i Q / k + regular(k). Both pieces are returned so callers can
/// combine pole terms analytically.
struct FourierParts {
    double pole_charge = 0.0;
    cplx regular{};
};

inline FourierParts fourier_parts(const SmearedFunction& f, double k)
{
    FourierParts out;
    for (const auto& p : f.placed()) {
        out.pole_charge += p.charge();
        out.regular += primitive_fourier_regular(p, k);
    }
    return out;
}

/// fhat(k). Throws charged-at-zero for a charged function at k = 0.
inline cplx fourier(const SmearedFunction& f, double k)
{
    const auto parts = fourier_parts(f, k);
    if (f.is_neutral()) return parts.regular;
    if (k == 0.0) throw Error(Errc::charged_at_zero, "Fourier transform of a charged function diverges at k = 0");
    return cplx(0.0, parts.pole_charge / k) + parts.regular;
}

inline cplx density_fourier(const SmearedFunction& f, double k)
{
    cplx sum{};
    for (const auto& p : f.placed()) sum += primitive_density_fourier(p, k);
    return sum;
}

/// k * conj(fhat(k)) * ghat(k) for k > 0, assembled from FourierParts so no
/// 1/k cancellation occurs near k = 0. The real pole-pole term Qf Qg / k is
/// included; it is absent whenever either function is neutral.
inline cplx k_weighted_product(const FourierParts& f, const FourierParts& g, double k)
{
    const double qf = f.pole_charge, qg = g.pole_charge;
    cplx out = k * std::conj(f.regular) * g.regular;
    out += cplx(0.0, -qf) * g.regular + cplx(0.0, qg) * std::conj(f.regular);
    if (qf != 0.0 && qg != 0.0) out += qf * qg / k;
    return out;
}

/// Position-space integral of f over its density support (neutral f only).
inline double integral(const SmearedFunction& f, const QuadratureConfig& cfg = {})
{
    if (!f.is_neutral()) throw Error(Errc::charged_ir_divergence, "integral of a charged function diverges");
    if (f.is_zero()) return 0.0;
    const auto sup = f.effective_support();
    double w_min = std::numeric_limits<double>::infinity();
    for (const auto& p : f.primitives()) w_min = std::min(w_min, p.w);
    const int panels = std::max(1, static_cast<int>(std::ceil(sup.length() / w_min)) * cfg.panels_per_width);
    return integrate([&](double x) { return f.value(x); }, sup.lo, sup.hi, cfg.order, panels);
}

}  // namespace bcft
