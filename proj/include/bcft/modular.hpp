#pragma once

// Modular data of small rational models, Verlinde fusion, and the matrix
// criterion relating coupling matrices Z to Haag duality: if Z is modular
// invariant and Zt <= Z entrywise with Zt != Z, then
//     (S* Zt S)_00 = sum_ij S_0i S_0j Zt_ij < (S* Z S)_00 = Z_00 = 1,
// so Zt cannot be modular invariant.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bcft/error.hpp"

namespace bcft::modular {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr double tolerance = 1e-9;

inline double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

struct ModelCheck {
    double unitarity = 0.0;  // ||S S* - 1||_max
    double symmetry = 0.0;   // ||S - S^T||_max
    bool s0_positive = false;
    double t_consistency = 0.0;  // max |T_a - exp(2 pi i (h_a - c/24))|
    double fusion_residue = 0.0;
    bool fusion_nonnegative = false;
    bool ok = false;
};

struct RationalModel {
    std::string label;
    int n_sectors = 0;
    Matrix S;
    Eigen::VectorXcd T;
    Eigen::VectorXd h;
    double c = 0.0;

    Matrix T_matrix() const { return T.asDiagonal(); }
};

struct FusionRules {
    int n = 0;
    std::vector<int> N;  // N^k_ij at (i * n + j) * n + k
    double residue = 0.0;

    int operator()(int i, int j, int k) const { return N[(static_cast<std::size_t>(i) * n + j) * n + k]; }
};

namespace detail {

inline FusionRules verlinde_raw(const RationalModel& m)
{
    const int n = m.n_sectors;
    FusionRules f;
    f.n = n;
    f.N.assign(static_cast<std::size_t>(n) * n * n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                cplx s{};
                for (int l = 0; l < n; ++l) s += m.S(i, l) * m.S(j, l) * std::conj(m.S(k, l)) / m.S(0, l);
                const double r = std::round(s.real());
                f.residue = std::max(f.residue, std::abs(s - r));
                f.N[(static_cast<std::size_t>(i) * n + j) * n + k] = static_cast<int>(r);
            }
    return f;
}

}  // namespace detail

inline ModelCheck validate(const RationalModel& m)
{
    const int n = m.n_sectors;
    ModelCheck r;
    if (n <= 0 || m.S.rows() != n || m.S.cols() != n || m.T.size() != n || m.h.size() != n) return r;
    r.unitarity = max_abs(m.S * m.S.adjoint() - Matrix::Identity(n, n));
    r.symmetry = max_abs(m.S - m.S.transpose());
    r.s0_positive = true;
    for (int a = 0; a < n; ++a)
        if (!(m.S(0, a).real() > 0.0 && std::abs(m.S(0, a).imag()) < tolerance)) r.s0_positive = false;
    for (int a = 0; a < n; ++a) {
        const cplx expected = std::polar(1.0, 2.0 * std::numbers::pi * (m.h(a) - m.c / 24.0));
        r.t_consistency = std::max(r.t_consistency, std::abs(m.T(a) - expected));
    }
    if (std::abs(m.h(0)) > tolerance) r.t_consistency = std::max(r.t_consistency, std::abs(m.h(0)));
    if (r.s0_positive) {
        const auto f = detail::verlinde_raw(m);
        r.fusion_residue = f.residue;
        r.fusion_nonnegative = std::all_of(f.N.begin(), f.N.end(), [](int x) { return x >= 0; });
    }
    r.ok = r.unitarity < tolerance && r.symmetry < tolerance && r.s0_positive && r.t_consistency < tolerance &&
        r.fusion_residue < tolerance && r.fusion_nonnegative;
    return r;
}

/// SU(2) at level k, sectors labelled by twice the spin a = 0..k.
inline RationalModel su2k_model(int k)
{
    if (k < 1 || k > 16) throw Error(Errc::invalid_parameter, "su2k level must be in 1..16");
    const int n = k + 1;
    const double kk = k + 2.0;
    RationalModel m;
    m.label = "su2k_" + std::to_string(k);
    m.n_sectors = n;
    m.S.resize(n, n);
    m.T.resize(n);
    m.h.resize(n);
    m.c = 3.0 * k / kk;
    const double norm = std::sqrt(2.0 / kk);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) m.S(a, b) = norm * std::sin(std::numbers::pi * (a + 1) * (b + 1) / kk);
        m.h(a) = a * (a + 2) / (4.0 * kk);
        m.T(a) = std::polar(1.0, 2.0 * std::numbers::pi * (m.h(a) - m.c / 24.0));
    }
    return m;
}

inline FusionRules verlinde_fusion(const RationalModel& m)
{
    if (m.n_sectors <= 0 || m.S.rows() != m.n_sectors) throw Error(Errc::non_modular_data, "S matrix has the wrong shape");
    for (int l = 0; l < m.n_sectors; ++l)
        if (std::abs(m.S(0, l)) < tolerance) throw Error(Errc::non_modular_data, "vanishing S_0m in the Verlinde denominator");
    auto f = detail::verlinde_raw(m);
    if (f.residue > tolerance) throw Error(Errc::non_modular_data, "Verlinde numbers are not integral");
    for (int x : f.N)
        if (x < 0) throw Error(Errc::non_modular_data, "negative Verlinde number");
    return f;
}

/// Residuals of the SL(2, Z) relations: (ST)^3 = S^2, S^2 central, S^4 = 1.
struct Sl2zResiduals {
    double st_cubed = 0.0;
    double s2_commutes = 0.0;
    double s4 = 0.0;
};

inline Sl2zResiduals sl2z_residuals(const RationalModel& m)
{
    const Matrix T = m.T_matrix();
    const Matrix ST = m.S * T;
    const Matrix S2 = m.S * m.S;
    const Matrix I = Matrix::Identity(m.n_sectors, m.n_sectors);
    return {max_abs(ST * ST * ST - S2), std::max(max_abs(S2 * m.S - m.S * S2), max_abs(S2 * T - T * S2)),
        max_abs(S2 * S2 - I)};
}

struct ZMatrix {
    RealMatrix entries;

    static ZMatrix identity(int n) { return {RealMatrix::Identity(n, n)}; }
    int size() const { return static_cast<int>(entries.rows()); }
    double operator()(int i, int j) const { return entries(i, j); }
    bool operator==(const ZMatrix& o) const { return entries == o.entries; }
};

inline bool is_nonnegative_integer(const ZMatrix& z)
{
    for (int i = 0; i < z.entries.rows(); ++i)
        for (int j = 0; j < z.entries.cols(); ++j) {
            const double x = z(i, j);
            if (!(x >= 0.0) || std::abs(x - std::round(x)) > tolerance) return false;
        }
    return true;
}

struct ModularVerdict {
    bool modular_invariant = false;
    double s_commutator = 0.0;
    double t_commutator = 0.0;
    bool z00_is_one = false;
    bool nonnegative_integer = false;
};

inline ModularVerdict is_modular_invariant(const ZMatrix& z, const RationalModel& m)
{
    if (z.entries.rows() != z.entries.cols() || z.size() != m.n_sectors)
        throw Error(Errc::invalid_parameter, "Z must be square with one row per sector");
    const Matrix Z = z.entries.cast<cplx>();
    const Matrix T = m.T_matrix();
    ModularVerdict v;
    v.s_commutator = max_abs(Z * m.S - m.S * Z);
    v.t_commutator = max_abs(Z * T - T * Z);
    v.z00_is_one = z(0, 0) == 1.0;
    v.nonnegative_integer = is_nonnegative_integer(z);
    v.modular_invariant = v.s_commutator < tolerance && v.t_commutator < tolerance && v.z00_is_one && v.nonnegative_integer;
    return v;
}

/// (S* Z S)_00
inline double vacuum_entry(const ZMatrix& z, const RationalModel& m)
{
    const Matrix Z = z.entries.cast<cplx>();
    return (m.S.adjoint() * Z * m.S)(0, 0).real();
}

struct HaagReport {
    double v = 0.0;    // (S* Zt S)_00
    double v_z = 0.0;  // (S* Z S)_00
    bool equal = false;
    bool obstruction = false;
    /// min S_0i S_0j over entries with Zt_ij < Z_ij
    double strictness_bound = 0.0;
    bool ztilde_modular_invariant = false;
    std::string conclusion;
};

inline HaagReport haag_duality_obstruction(const ZMatrix& zt, const ZMatrix& z, const RationalModel& m)
{
    const int n = m.n_sectors;
    if (z.size() != n || zt.size() != n || z.entries.cols() != n || zt.entries.cols() != n)
        throw Error(Errc::invalid_input, "Z and Ztilde must be square with one row per sector");
    if (!is_modular_invariant(z, m).modular_invariant) throw Error(Errc::invalid_input, "Z is not a modular invariant");
    if (!is_nonnegative_integer(zt)) throw Error(Errc::invalid_input, "Ztilde must have nonnegative integer entries");
    if (zt(0, 0) != 1.0) throw Error(Errc::invalid_input, "Ztilde_00 must be 1");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (zt(i, j) > z(i, j)) throw Error(Errc::invalid_input, "Ztilde must not exceed Z entrywise");

    HaagReport r;
    r.v = vacuum_entry(zt, m);
    r.v_z = vacuum_entry(z, m);
    r.equal = zt == z;
    r.ztilde_modular_invariant = is_modular_invariant(zt, m).modular_invariant;
    if (r.equal) {
        r.conclusion = "Ztilde equals Z";
        return r;
    }
    r.strictness_bound = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (zt(i, j) < z(i, j)) r.strictness_bound = std::min(r.strictness_bound, (m.S(0, i) * m.S(0, j)).real());
    r.obstruction = r.v < 1.0 - tolerance;
    r.conclusion = r.obstruction ? "Ztilde not modular invariant" : "no obstruction";
    return r;
}

}  // namespace bcft::modular
