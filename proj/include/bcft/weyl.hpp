#pragma once

// Weyl operators W(f) = exp(i j(f)) of the free U(1) current: symplectic
// form, Weyl-relation phases, vacuum functional and n-point correlators,
// plus the IR-subtracted kernel used for charged chiral pieces.
//
// Every exponent is assembled from pair integrals
//     P(f, g) = int_0^inf k conj(fhat(k)) ghat(k) dk
//             = int int rho_f(x) rho_g(y) K_mu(x - y) dx dy,
// with K_mu(z) = int_0^inf dk/k [e^{-ikz} - e^{-k/mu}] = -log(i mu (z - i0)).
// The second form is what the library evaluates; the first is kept as an
// independent route.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "bcft/error.hpp"
#include "bcft/quadrature.hpp"
#include "bcft/special.hpp"
#include "bcft/testfn.hpp"

namespace bcft::weyl {

using std::numbers::pi;

/// K_mu(z) = -log(mu |z|) - i (pi/2) sign(z). At z = 0 the log singularity is
/// reported as +inf in the real part; quadrature never samples it.
inline cplx ir_kernel(double z, double mu)
{
    if (!(mu > 0.0)) throw Error(Errc::invalid_parameter, "IR scale mu must be positive");
    if (z == 0.0) return {std::numeric_limits<double>::infinity(), 0.0};
    return {-std::log(mu * std::abs(z)), z > 0 ? -0.5 * pi : 0.5 * pi};
}

inline bool is_log_singular(cplx k) { return std::isinf(k.real()); }

namespace detail {

// int int rho_a rho_b K_mu for two Gaussian-type primitives. With
// rho = q N^{(d)}(x - c) (d = 0 step, d = 1 bump) the block is
// q_a q_b (-1)^{d_a} F^{(d_a + d_b)}(c_a - c_b), where
// F(D) = E K_mu(Z), Z ~ N(D, w_a^2 + w_b^2).
inline cplx gaussian_block(const Primitive& a, const Primitive& b, double mu)
{
    const int da = is_step(a.kind) ? 0 : 1;
    const int db = is_step(b.kind) ? 0 : 1;
    const double s = std::hypot(a.w, b.w);
    const double m = (a.c - b.c) / s;
    const auto lm = special::gaussian_log_moment(m);
    cplx F;
    switch (da + db) {
    case 0:
        F = {-std::log(mu) - std::log(s) - lm.value, -0.5 * pi * std::erf(m / std::numbers::sqrt2)};
        break;
    case 1:
        F = {-lm.d1 / s, -pi * special::normal_pdf(m) / s};
        break;
    default:
        F = {-lm.d2 / (s * s), pi * m * special::normal_pdf(m) / (s * s)};
        break;
    }
    const double sign = da == 1 ? -1.0 : 1.0;
    return a.q * b.q * sign * F;
}

// Same block by direct quadrature: P = int C(z) K_mu(z) dz with the
// cross-correlation C(z) = int rho_a(x) rho_b(x - z) dx. The z-axis is split
// at the support breakpoints of C and at z = 0; panels touching the log
// singularity are graded geometrically.
inline cplx numeric_block(const Primitive& a, const Primitive& b, double mu, const QuadratureConfig& cfg)
{
    const Interval sa = a.support(), sb = b.support();
    const double w_min = std::min(a.w, b.w);
    auto corr = [&](double z) {
        const double lo = std::max(sa.lo, sb.lo + z);
        const double hi = std::min(sa.hi, sb.hi + z);
        if (!(hi > lo)) return 0.0;
        const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / w_min)) * cfg.panels_per_width / 2);
        return integrate([&](double x) { return primitive_density(a, x) * primitive_density(b, x - z); },
            lo, hi, cfg.order, panels);
    };
    const double log_mu = std::log(mu);
    auto integrand = [&](double z) -> cplx {
        const double c = corr(z);
        if (c == 0.0) return {};
        return {-c * (log_mu + std::log(std::abs(z))), z > 0 ? -0.5 * pi * c : 0.5 * pi * c};
    };

    const double z_lo = sa.lo - sb.hi, z_hi = sa.hi - sb.lo;
    std::vector<double> cuts{z_lo, sa.lo - sb.lo, sa.hi - sb.hi, z_hi};
    if (z_lo < 0.0 && 0.0 < z_hi) cuts.push_back(0.0);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    cplx sum{};
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double z0 = cuts[i], z1 = cuts[i + 1];
        if (!(z1 > z0)) continue;
        const int n = std::max(1, static_cast<int>(std::ceil((z1 - z0) / w_min)));
        const double h = (z1 - z0) / n;
        for (int p = 0; p < n; ++p) {
            const double lo = z0 + p * h;
            const double hi = p + 1 == n ? z1 : lo + h;
            sum += integrate_graded(integrand, lo, hi, 0.0, cfg);
        }
    }
    return sum;
}

}  // namespace detail

/// Regularized pair block for two placed primitives.
inline cplx primitive_block(const Primitive& a, const Primitive& b, double mu, const QuadratureConfig& cfg = {},
    bool force_quadrature = false)
{
    if (!(mu > 0.0)) throw Error(Errc::invalid_parameter, "IR scale mu must be positive");
    if (!force_quadrature && is_gaussian(a.kind) && is_gaussian(b.kind)) return detail::gaussian_block(a, b, mu);
    return detail::numeric_block(a, b, mu, cfg);
}

/// 2 pi i sigma^mu(F_-, G_+) = int int rho_F(x) rho_G(y) K_mu(x - y) dx dy.
/// For neutral F or G the value does not depend on mu.
inline cplx regularized_pair_exponent(const SmearedFunction& F, const SmearedFunction& G, double mu,
    const QuadratureConfig& cfg = {}, bool force_quadrature = false)
{
    if (!(mu > 0.0)) throw Error(Errc::invalid_parameter, "IR scale mu must be positive");
    cplx sum{};
    const auto pf = F.placed();
    const auto pg = G.placed();
    for (const auto& a : pf)
        for (const auto& b : pg) sum += primitive_block(a, b, mu, cfg, force_quadrature);
    return sum;
}

namespace detail {

// int over supp(rho_b) of f(x) rho_b(x) dx, with panels broken at the
// support edges and centers of f's primitives.
inline double integrate_against(const SmearedFunction& f, const Primitive& b, const QuadratureConfig& cfg)
{
    const Interval sb = b.support();
    // f exactly constant on supp(rho_b): the integral is f(c_b) times the mass
    // of rho_b (q for steps, 0 for bumps).
    if (!is_gaussian(b.kind) && f.exact_support()) {
        bool overlap = false;
        for (const auto& p : f.placed()) {
            const Interval sp = p.support();
            overlap = overlap || (sp.hi > sb.lo && sp.lo < sb.hi);
        }
        if (!overlap) return is_step(b.kind) ? f.value(b.c) * b.q : 0.0;
    }
    std::vector<double> cuts{sb.lo, sb.hi};
    double h = b.w;
    for (const auto& p : f.placed()) {
        const Interval sp = p.support();
        if (sp.hi <= sb.lo || sp.lo >= sb.hi) {
            continue;
        }
        h = std::min(h, p.w);
        for (double x : {sp.lo, p.c, sp.hi})
            if (x > sb.lo && x < sb.hi) cuts.push_back(x);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    auto integrand = [&](double x) { return f.value(x) * primitive_density(b, x); };
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double len = cuts[i + 1] - cuts[i];
        const int panels = std::max(1, static_cast<int>(std::ceil(len / h * cfg.panels_per_width)));
        sum += integrate(integrand, cuts[i], cuts[i + 1], cfg.order, panels);
    }
    return sum;
}

inline double k_cut_for(const SmearedFunction& f, const SmearedFunction& g, const QuadratureConfig& cfg)
{
    double cut = 0.0;
    for (const auto* fn : {&f, &g})
        for (const auto& p : fn->primitives())
            cut = std::max(cut, (is_gaussian(p.kind) ? cfg.gaussian_k_cut : cfg.compact_k_cut) / p.w);
    return cut;
}

// Largest oscillation frequency in k of conj(fhat) ghat and its pole terms.
inline double k_frequency(const SmearedFunction& f, const SmearedFunction& g)
{
    double lo = 0.0, hi = 0.0;
    for (const auto* fn : {&f, &g})
        for (const auto& p : fn->placed()) {
            lo = std::min(lo, p.c);
            hi = std::max(hi, p.c);
        }
    return std::max(1.0, hi - lo);
}

template <class F>
cplx integrate_momentum(F&& integrand, const SmearedFunction& f, const SmearedFunction& g, const QuadratureConfig& cfg)
{
    const double k_cut = k_cut_for(f, g, cfg);
    const double freq = k_frequency(f, g);
    const int panels = std::max(16, static_cast<int>(std::ceil(k_cut * freq / pi)));
    cplx sum = integrate(integrand, 0.0, k_cut, cfg.order, panels);
    sum += integrate_tail(integrand, k_cut, cfg.order, cfg.tail_panels);
    return sum;
}

}  // namespace detail

/// sigma(f, g) = 1/2 int (f g' - f' g) dx, evaluated in position space.
inline double symplectic_form(const SmearedFunction& f, const SmearedFunction& g, const QuadratureConfig& cfg = {})
{
    double fg = 0.0, rf = 0.0;
    for (const auto& b : g.placed()) fg += detail::integrate_against(f, b, cfg);
    for (const auto& a : f.placed()) rf += detail::integrate_against(g, a, cfg);
    return 0.5 * (fg - rf);
}

/// sigma(f, g) = (1/2 pi i) int_R k fhat(-k) ghat(k) dk
///             = (1/pi) int_0^inf Im(k conj(fhat) ghat) dk.
inline double symplectic_form_momentum(const SmearedFunction& f, const SmearedFunction& g, const QuadratureConfig& cfg = {})
{
    if (f.is_zero() || g.is_zero()) return 0.0;
    auto integrand = [&](double k) {
        return cplx(k_weighted_product(fourier_parts(f, k), fourier_parts(g, k), k).imag(), 0.0);
    };
    return detail::integrate_momentum(integrand, f, g, cfg).real() / pi;
}

/// P(f, g) = int_0^inf k conj(fhat(k)) ghat(k) dk by momentum quadrature.
inline cplx pair_integral_momentum(const SmearedFunction& f, const SmearedFunction& g, const QuadratureConfig& cfg = {})
{
    if (!f.is_neutral() && !g.is_neutral())
        throw Error(Errc::charged_ir_divergence, "pair integral of two charged functions diverges at k = 0");
    if (f.is_zero() || g.is_zero()) return {};
    auto integrand = [&](double k) { return k_weighted_product(fourier_parts(f, k), fourier_parts(g, k), k); };
    return detail::integrate_momentum(integrand, f, g, cfg);
}

/// Labeled contribution to a correlator exponent; i <= j.
struct PairTerm {
    std::size_t i = 0;
    std::size_t j = 0;
    cplx value{};
};

struct CorrelatorValue {
    cplx value{1.0, 0.0};
    cplx phase{1.0, 0.0};
    std::vector<PairTerm> exponent_terms;
    std::optional<double> mu;

    cplx exponent() const
    {
        cplx s{};
        for (const auto& t : exponent_terms) s += t.value;
        return s;
    }
};

/// Ordered product W(f_1) ... W(f_n) with an accumulated unit phase.
class WeylWord {
public:
    WeylWord() = default;
    explicit WeylWord(std::vector<SmearedFunction> factors, cplx phase = {1.0, 0.0})
        : factors_(std::move(factors)), phase_(phase)
    {
    }

    std::span<const SmearedFunction> factors() const { return factors_; }
    cplx phase() const { return phase_; }
    std::size_t size() const { return factors_.size(); }

    void push_back(SmearedFunction f) { factors_.push_back(std::move(f)); }

    /// Reduce to one factor with W(f)W(g) = exp(-i pi sigma(f, g)) W(f + g).
    WeylWord folded(const QuadratureConfig& cfg = {}) const
    {
        if (factors_.size() <= 1) return *this;
        SmearedFunction acc = factors_.front();
        double sigma_sum = 0.0;
        for (std::size_t i = 1; i < factors_.size(); ++i) {
            sigma_sum += symplectic_form(acc, factors_[i], cfg);
            acc = acc + factors_[i];
        }
        return WeylWord({acc}, phase_ * std::polar(1.0, -pi * sigma_sum));
    }

private:
    std::vector<SmearedFunction> factors_;
    cplx phase_{1.0, 0.0};
};

namespace detail {

// exp(-i pi [sum_i sigma(f_i-, f_i+) + 2 sum_{i<j} sigma(f_i-, f_j+)]) with
// 2 pi i sigma(f_i-, f_j+) = P(f_i, f_j): diagonal terms -P_ii / 2,
// off-diagonal -P_ij.
inline CorrelatorValue assemble(std::span<const SmearedFunction> fs, double mu, cplx phase, const QuadratureConfig& cfg)
{
    CorrelatorValue out;
    out.phase = phase;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        for (std::size_t j = i; j < fs.size(); ++j) {
            const cplx p = regularized_pair_exponent(fs[i], fs[j], mu, cfg);
            out.exponent_terms.push_back({i, j, i == j ? -0.5 * p : -p});
        }
    }
    out.value = phase * std::exp(out.exponent());
    return out;
}

}  // namespace detail

/// omega(W(f_1) ... W(f_n)) for neutral factors.
inline CorrelatorValue n_point(const WeylWord& word, const QuadratureConfig& cfg = {})
{
    for (const auto& f : word.factors())
        if (!f.is_neutral())
            throw Error(Errc::charged_ir_divergence, "charged Weyl factor: the vacuum correlator vanishes (use charged_ensemble_correlator)");
    return detail::assemble(word.factors(), 1.0, word.phase(), cfg);
}

/// omega(W(f)) = exp(-1/2 int_0^inf k |fhat|^2 dk), in (0, 1] for neutral f.
inline CorrelatorValue vacuum_expectation(const SmearedFunction& f, const QuadratureConfig& cfg = {})
{
    return n_point(WeylWord({f}), cfg);
}

/// Same quantity by momentum quadrature; used as an independent route.
inline double vacuum_expectation_momentum(const SmearedFunction& f, const QuadratureConfig& cfg = {})
{
    if (!f.is_neutral()) throw Error(Errc::charged_ir_divergence, "vacuum expectation of a charged Weyl operator vanishes");
    return std::exp(-0.5 * pair_integral_momentum(f, f, cfg).real());
}

/// <j(f) j(g)> = int_0^inf k fhat(-k) ghat(k) dk for neutral f, g.
inline cplx current_two_point(const SmearedFunction& f, const SmearedFunction& g, const QuadratureConfig& cfg = {})
{
    if (!f.is_neutral() || !g.is_neutral())
        throw Error(Errc::charged_ir_divergence, "current two-point function needs neutral test functions");
    return regularized_pair_exponent(f, g, 1.0, cfg);
}

}  // namespace bcft::weyl
