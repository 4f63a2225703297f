#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "bcft/modular.hpp"

using namespace bcft;
using namespace bcft::modular;

namespace {

ZMatrix diag(std::initializer_list<double> d)
{
    ZMatrix z{RealMatrix::Zero(static_cast<int>(d.size()), static_cast<int>(d.size()))};
    int i = 0;
    for (double x : d) {
        z.entries(i, i) = x;
        ++i;
    }
    return z;
}

ZMatrix d_series_su2_4()
{
    ZMatrix z{RealMatrix::Zero(5, 5)};
    z.entries(0, 0) = z.entries(0, 4) = z.entries(4, 0) = z.entries(4, 4) = 1.0;
    z.entries(2, 2) = 2.0;
    return z;
}

Errc haag_error(const ZMatrix& zt, const ZMatrix& z, const RationalModel& m)
{
    try {
        haag_duality_obstruction(zt, z, m);
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::invalid_parameter;
}

}  // namespace

TEST(Su2k, LevelOneData)
{
    const auto m = su2k_model(1);
    EXPECT_EQ(m.n_sectors, 2);
    const double r = 1.0 / std::numbers::sqrt2;
    EXPECT_NEAR(std::abs(m.S(0, 0) - r), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(m.S(1, 1) + r), 0.0, 1e-15);
    EXPECT_NEAR(m.h(1), 0.25, 1e-15);
    EXPECT_NEAR(m.c, 1.0, 1e-15);
    EXPECT_TRUE(validate(m).ok);
}

TEST(Su2k, LevelTwoData)
{
    const auto m = su2k_model(2);
    EXPECT_NEAR(m.c, 1.5, 1e-15);
    EXPECT_NEAR(m.h(1), 3.0 / 16.0, 1e-15);
    EXPECT_NEAR(m.h(2), 0.5, 1e-15);
    EXPECT_NEAR(std::abs(m.S(0, 0) - 0.5), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(m.S(0, 1) - 1.0 / std::numbers::sqrt2), 0.0, 1e-15);
}

TEST(Su2k, LevelRange)
{
    EXPECT_THROW(su2k_model(0), Error);
    EXPECT_THROW(su2k_model(17), Error);
}

TEST(Su2k, EveryLevelValidatesAndSatisfiesSl2z)
{
    for (int k = 1; k <= 16; ++k) {
        const auto m = su2k_model(k);
        const auto chk = validate(m);
        EXPECT_TRUE(chk.ok) << "k = " << k;
        const auto r = sl2z_residuals(m);
        EXPECT_LT(r.st_cubed, 1e-10) << "k = " << k;
        EXPECT_LT(r.s2_commutes, 1e-10);
        EXPECT_LT(r.s4, 1e-10);
    }
}

TEST(Fusion, Examples)
{
    const auto f1 = verlinde_fusion(su2k_model(1));
    EXPECT_EQ(f1(1, 1, 0), 1);
    EXPECT_EQ(f1(1, 1, 1), 0);
    const auto f2 = verlinde_fusion(su2k_model(2));
    EXPECT_EQ(f2(1, 1, 0), 1);
    EXPECT_EQ(f2(1, 1, 1), 0);
    EXPECT_EQ(f2(1, 1, 2), 1);
    EXPECT_EQ(f2(2, 2, 0), 1);
}

TEST(Fusion, AssociativeCommutativeWithUnit)
{
    for (int k = 1; k <= 16; ++k) {
        const auto f = verlinde_fusion(su2k_model(k));
        const int n = f.n;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                EXPECT_EQ(f(0, i, j), i == j ? 1 : 0);
                for (int l = 0; l < n; ++l) {
                    EXPECT_EQ(f(i, j, l), f(j, i, l));
                    // su(2)_k truncated Clebsch-Gordan rule
                    const bool allowed = l >= std::abs(i - j) && l <= std::min(i + j, 2 * k - i - j) && (i + j + l) % 2 == 0;
                    EXPECT_EQ(f(i, j, l), allowed ? 1 : 0) << k << ":" << i << "," << j << "," << l;
                }
            }
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    for (int d = 0; d < n; ++d) {
                        int lhs = 0, rhs = 0;
                        for (int e = 0; e < n; ++e) {
                            lhs += f(a, b, e) * f(e, c, d);
                            rhs += f(b, c, e) * f(a, e, d);
                        }
                        EXPECT_EQ(lhs, rhs);
                    }
    }
}

TEST(Fusion, NonModularDataThrows)
{
    auto m = su2k_model(2);
    m.S(0, 1) = 0.0;
    try {
        verlinde_fusion(m);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::non_modular_data);
    }
    EXPECT_FALSE(validate(m).ok);
}

TEST(Invariant, IdentityAndDSeries)
{
    for (int k = 1; k <= 16; ++k) EXPECT_TRUE(is_modular_invariant(ZMatrix::identity(k + 1), su2k_model(k)).modular_invariant);
    EXPECT_TRUE(is_modular_invariant(d_series_su2_4(), su2k_model(4)).modular_invariant);
}

TEST(Invariant, RejectsNonPhysicalZ)
{
    const auto m = su2k_model(1);
    const auto twice = is_modular_invariant(diag({2.0, 2.0}), m);
    EXPECT_FALSE(twice.modular_invariant);
    EXPECT_LT(twice.s_commutator, 1e-12);
    EXPECT_FALSE(twice.z00_is_one);
    EXPECT_FALSE(is_modular_invariant(diag({1.0, 0.0}), m).modular_invariant);
    EXPECT_FALSE(is_modular_invariant(diag({1.0, 0.5}), m).nonnegative_integer);
    EXPECT_THROW(is_modular_invariant(ZMatrix::identity(3), m), Error);
}

TEST(Haag, LevelOneObstruction)
{
    const auto m = su2k_model(1);
    const auto r = haag_duality_obstruction(diag({1.0, 0.0}), ZMatrix::identity(2), m);
    EXPECT_NEAR(r.v, 0.5, 1e-15);
    EXPECT_NEAR(r.v_z, 1.0, 1e-15);
    EXPECT_TRUE(r.obstruction);
    EXPECT_FALSE(r.ztilde_modular_invariant);
    EXPECT_EQ(r.conclusion, "Ztilde not modular invariant");
    EXPECT_NEAR(r.strictness_bound, 0.5, 1e-15);
}

TEST(Haag, EqualMatricesGiveOne)
{
    const auto m = su2k_model(2);
    const auto r = haag_duality_obstruction(ZMatrix::identity(3), ZMatrix::identity(3), m);
    EXPECT_NEAR(r.v, 1.0, 1e-14);
    EXPECT_TRUE(r.equal);
    EXPECT_FALSE(r.obstruction);
    EXPECT_TRUE(r.ztilde_modular_invariant);
}

TEST(Haag, LevelTwoPartialDiagonal)
{
    const auto m = su2k_model(2);
    const auto r = haag_duality_obstruction(diag({1.0, 1.0, 0.0}), ZMatrix::identity(3), m);
    EXPECT_NEAR(r.v, 0.75, 1e-14);
    EXPECT_TRUE(r.obstruction);
    // v <= v_z - strictness bound
    EXPECT_LE(r.v, r.v_z - r.strictness_bound + 1e-14);
}

TEST(Haag, StrictnessBoundHoldsAcrossLevels)
{
    for (int k = 1; k <= 16; ++k) {
        const auto m = su2k_model(k);
        ZMatrix zt = ZMatrix::identity(k + 1);
        zt.entries(k, k) = 0.0;
        const auto r = haag_duality_obstruction(zt, ZMatrix::identity(k + 1), m);
        EXPECT_TRUE(r.obstruction) << "k = " << k;
        EXPECT_LE(r.v, r.v_z - r.strictness_bound + 1e-12);
        EXPECT_GT(r.strictness_bound, 0.0);
        EXPECT_FALSE(r.ztilde_modular_invariant);
    }
}

TEST(Haag, DSeriesSubmatrix)
{
    const auto m = su2k_model(4);
    ZMatrix zt = d_series_su2_4();
    zt.entries(2, 2) = 1.0;
    const auto r = haag_duality_obstruction(zt, d_series_su2_4(), m);
    EXPECT_NEAR(r.v_z, 1.0, 1e-13);
    EXPECT_TRUE(r.obstruction);
    EXPECT_NEAR(r.v, 1.0 - std::pow(m.S(0, 2).real(), 2), 1e-13);
}

TEST(Haag, Preconditions)
{
    const auto m = su2k_model(1);
    const auto I = ZMatrix::identity(2);
    EXPECT_EQ(haag_error(diag({1.0, 0.0}), diag({1.0, 0.0}), m), Errc::invalid_input);  // Z not invariant
    EXPECT_EQ(haag_error(diag({1.0, 0.5}), I, m), Errc::invalid_input);               // non-integer
    EXPECT_EQ(haag_error(diag({0.0, 1.0}), I, m), Errc::invalid_input);               // Zt_00 != 1
    ZMatrix big = I;
    big.entries(0, 1) = 1.0;
    EXPECT_EQ(haag_error(big, I, m), Errc::invalid_input);                             // exceeds Z
    EXPECT_EQ(haag_error(ZMatrix::identity(3), I, m), Errc::invalid_input);           // shape
}
