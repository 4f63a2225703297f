#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "bcft/acceptance.hpp"
#include "bcft/weyl.hpp"

using namespace bcft;
using weyl::pi;

namespace {

std::vector<SmearedFunction> random_neutral(std::uint64_t seed, int n)
{
    acceptance::Rng rng(seed);
    std::vector<SmearedFunction> out;
    for (int i = 0; i < n; ++i) out.push_back(acceptance::random_function(rng, false));
    return out;
}

SmearedFunction step_pair(double q, double c1, double c2, double w, PrimitiveKind kind)
{
    return build_step(q, c1, w, kind) - build_step(q, c2, w, kind);
}

}  // namespace

TEST(IrKernel, SignOfImaginaryPart)
{
    EXPECT_EQ(weyl::ir_kernel(1.0, 1.0), cplx(0.0, -0.5 * pi));
    EXPECT_EQ(weyl::ir_kernel(-1.0, 1.0), cplx(0.0, 0.5 * pi));
    EXPECT_NEAR(weyl::ir_kernel(2.0, 3.0).real(), -std::log(6.0), 1e-15);
    EXPECT_TRUE(weyl::is_log_singular(weyl::ir_kernel(0.0, 1.0)));
}

TEST(IrKernel, RejectsNonPositiveMu)
{
    for (double mu : {0.0, -1.0, std::nan("")}) {
        try {
            weyl::ir_kernel(1.0, mu);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), Errc::invalid_parameter);
        }
    }
}

TEST(Symplectic, IsAntisymmetric)
{
    const auto fs = random_neutral(11, 100);
    for (int i = 0; i < 100; i += 2) {
        const double a = weyl::symplectic_form(fs[i], fs[i + 1]);
        const double b = weyl::symplectic_form(fs[i + 1], fs[i]);
        EXPECT_NEAR(a + b, 0.0, 1e-14 * std::max(1.0, std::abs(a)));
        EXPECT_NEAR(weyl::symplectic_form(fs[i], fs[i]), 0.0, 1e-14);
    }
}

TEST(Symplectic, PositionAndMomentumRoutesAgree)
{
    const auto fs = random_neutral(12, 40);
    for (int i = 0; i < 40; i += 2) {
        const double x = weyl::symplectic_form(fs[i], fs[i + 1]);
        const double k = weyl::symplectic_form_momentum(fs[i], fs[i + 1]);
        EXPECT_NEAR(x, k, 1e-10 * std::max(1.0, std::abs(x))) << "pair " << i / 2;
    }
}

TEST(Symplectic, ImaginaryPartOfPairIntegral)
{
    // sigma = Im P(f, g) / pi
    const auto fs = random_neutral(13, 20);
    for (int i = 0; i < 20; i += 2) {
        const cplx p = weyl::current_two_point(fs[i], fs[i + 1]);
        EXPECT_NEAR(p.imag(), pi * weyl::symplectic_form(fs[i], fs[i + 1]), 1e-12 * std::max(1.0, std::abs(p)));
    }
}

TEST(Vacuum, ZeroFunctionGivesOne)
{
    EXPECT_EQ(weyl::vacuum_expectation(SmearedFunction::zero()).value, cplx(1.0, 0.0));
}

TEST(Vacuum, GaussianProfileClosedForm)
{
    // fhat = exp(-k^2/2): int_0^inf k exp(-k^2) dk = 1/2
    const auto f = build_bump(1.0, 0.0, 1.0, PrimitiveKind::gaussian_bump);
    EXPECT_NEAR(weyl::vacuum_expectation(f).value.real(), std::exp(-0.25), 1e-14);
    EXPECT_NEAR(weyl::vacuum_expectation(f).value.imag(), 0.0, 1e-15);
    EXPECT_NEAR(weyl::vacuum_expectation_momentum(f), std::exp(-0.25), 1e-12);
    EXPECT_NEAR(std::abs(weyl::current_two_point(f, f) - 0.5), 0.0, 1e-14);
}

TEST(Vacuum, ValueInUnitIntervalAndRoutesAgree)
{
    for (const auto& f : random_neutral(14, 30)) {
        const cplx v = weyl::vacuum_expectation(f).value;
        EXPECT_NEAR(v.imag(), 0.0, 1e-13);
        EXPECT_GT(v.real(), 0.0);
        EXPECT_LE(v.real(), 1.0 + 1e-15);
        EXPECT_NEAR(v.real(), weyl::vacuum_expectation_momentum(f), 1e-10);
    }
}

TEST(Vacuum, ChargedFactorThrows)
{
    const auto f = build_step(1.0, 0.0, 0.3, PrimitiveKind::gaussian_step);
    try {
        weyl::vacuum_expectation(f);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::charged_ir_divergence);
    }
    EXPECT_THROW(weyl::current_two_point(f, f), Error);
    EXPECT_THROW(weyl::pair_integral_momentum(f, f), Error);
}

TEST(NPoint, InversePairGivesOne)
{
    for (const auto& f : random_neutral(15, 10)) {
        const cplx v = weyl::n_point(weyl::WeylWord({f, -f})).value;
        EXPECT_NEAR(std::abs(v - 1.0), 0.0, 1e-13);
    }
}

TEST(NPoint, FoldingAgrees)
{
    const auto fs = random_neutral(16, 9);
    for (int i = 0; i < 9; i += 3) {
        const weyl::WeylWord word({fs[i], fs[i + 1], fs[i + 2]});
        const auto folded = word.folded();
        ASSERT_EQ(folded.size(), 1u);
        const cplx via = folded.phase() * weyl::vacuum_expectation(folded.factors()[0]).value;
        EXPECT_NEAR(std::abs(weyl::n_point(word).value - via), 0.0, 1e-12);
    }
}

TEST(NPoint, WeylRelationPhase)
{
    // W(f)W(g) = exp(-2 pi i sigma(f, g)) W(g)W(f)
    const auto fs = random_neutral(17, 10);
    for (int i = 0; i < 10; i += 2) {
        const cplx fg = weyl::n_point(weyl::WeylWord({fs[i], fs[i + 1]})).value;
        const cplx gf = weyl::n_point(weyl::WeylWord({fs[i + 1], fs[i]})).value;
        const cplx phase = std::polar(1.0, -2.0 * pi * weyl::symplectic_form(fs[i], fs[i + 1]));
        EXPECT_NEAR(std::abs(fg - phase * gf), 0.0, 1e-12);
    }
}

TEST(NPoint, ExponentTermsAreLabeled)
{
    const auto fs = random_neutral(18, 3);
    const auto v = weyl::n_point(weyl::WeylWord(fs));
    ASSERT_EQ(v.exponent_terms.size(), 6u);
    for (const auto& t : v.exponent_terms) EXPECT_LE(t.i, t.j);
    EXPECT_NEAR(std::abs(std::exp(v.exponent()) - v.value), 0.0, 1e-15);
}

TEST(PairExponent, NeutralIsMuIndependent)
{
    const auto fs = random_neutral(19, 10);
    for (int i = 0; i < 10; i += 2) {
        const cplx a = weyl::regularized_pair_exponent(fs[i], fs[i + 1], 1.0);
        const cplx b = weyl::regularized_pair_exponent(fs[i], fs[i + 1], 10.0);
        EXPECT_NEAR(std::abs(a - b), 0.0, 1e-8);
    }
    // one charged factor is enough
    const auto G = build_step(1.0, 0.0, 0.3, PrimitiveKind::bump_step);
    const cplx a = weyl::regularized_pair_exponent(G, fs[0], 1.0);
    const cplx b = weyl::regularized_pair_exponent(G, fs[0], 10.0);
    EXPECT_NEAR(std::abs(a - b), 0.0, 1e-8);
}

TEST(PairExponent, ChargedMuDependenceIsLogarithmic)
{
    const auto G = build_step(1.5, 0.0, 0.3, PrimitiveKind::gaussian_step);
    const auto H = build_step(-0.5, 2.0, 0.3, PrimitiveKind::bump_step);
    const cplx a = weyl::regularized_pair_exponent(G, H, 1.0);
    const cplx b = weyl::regularized_pair_exponent(G, H, 10.0);
    EXPECT_NEAR(std::abs(b - a - cplx(0.75 * std::log(10.0), 0.0)), 0.0, 1e-12);
}

TEST(PairExponent, NeutralRecombination)
{
    // P(f, f) for f = G - H assembled from four charged blocks
    const auto G = build_step(0.8, 0.5, 0.2, PrimitiveKind::bump_step);
    const auto H = build_step(0.8, 2.5, 0.3, PrimitiveKind::gaussian_step);
    const auto f = G - H;
    const cplx blocks = weyl::regularized_pair_exponent(G, G, 1.0) - weyl::regularized_pair_exponent(G, H, 1.0)
        - weyl::regularized_pair_exponent(H, G, 1.0) + weyl::regularized_pair_exponent(H, H, 1.0);
    const cplx momentum = weyl::pair_integral_momentum(f, f);
    EXPECT_NEAR(std::abs(blocks - momentum), 0.0, 1e-10);
    EXPECT_NEAR(blocks.imag(), 0.0, 1e-13);
    EXPECT_GT(blocks.real(), 0.0);
}

TEST(PrimitiveBlock, ClosedFormMatchesQuadrature)
{
    const PrimitiveKind kinds[] = {PrimitiveKind::gaussian_step, PrimitiveKind::gaussian_bump};
    for (auto ka : kinds)
        for (auto kb : kinds)
            for (double d : {0.0, 0.15, 1.1, -2.5}) {
                const Primitive a{ka, 0.7, 1.0, 0.2}, b{kb, -1.3, 1.0 + d, 0.35};
                const cplx closed = weyl::primitive_block(a, b, 2.0);
                const cplx numeric = weyl::primitive_block(a, b, 2.0, {}, true);
                EXPECT_NEAR(std::abs(closed - numeric), 0.0, 1e-11 * std::max(1.0, std::abs(closed)))
                    << kind_name(ka) << "/" << kind_name(kb) << " d = " << d;
            }
}

TEST(PrimitiveBlock, DisjointStepsApproachKernel)
{
    // two unit-charge steps at separation d: block -> K_mu(d)
    const double w = 0.1, d = 1e3 * w;
    for (auto kind : {PrimitiveKind::gaussian_step, PrimitiveKind::bump_step}) {
        const Primitive a{kind, 1.0, d, w}, b{kind, 1.0, 0.0, w};
        const cplx block = weyl::primitive_block(a, b, 1.0);
        const cplx kernel = weyl::ir_kernel(d, 1.0);
        EXPECT_LT(std::abs(block - kernel) / std::abs(kernel), 0.01) << kind_name(kind);
    }
}

TEST(CurrentTwoPoint, PolarizationRecoversRealPart)
{
    // Re P(f, g) = [P(f+g, f+g) - P(f-g, f-g)] / 4 with P(h, h) = -2 log omega(W(h))
    const auto fs = random_neutral(20, 10);
    for (int i = 0; i < 10; i += 2) {
        const auto& f = fs[i];
        const auto& g = fs[i + 1];
        auto self = [](const SmearedFunction& h) { return -2.0 * std::log(weyl::vacuum_expectation(h).value.real()); };
        const double re = 0.25 * (self(f + g) - self(f - g));
        const cplx p = weyl::current_two_point(f, g);
        EXPECT_NEAR(p.real(), re, 1e-11 * std::max(1.0, std::abs(re)));
    }
}

TEST(CurrentTwoPoint, FiniteDifferenceOfLogCorrelator)
{
    // d^2/ds dt log omega(W(sf) W(tg)) at 0 = -P(f, g)
    const auto f = step_pair(1.0, 0.0, 1.5, 0.2, PrimitiveKind::bump_step);
    const auto g = build_bump(0.7, 0.9, 0.4, PrimitiveKind::gaussian_bump);
    auto log_corr = [&](double s, double t) {
        return std::log(weyl::n_point(weyl::WeylWord({f.scaled(s), g.scaled(t)})).value);
    };
    const double h = 1e-3;
    const cplx mixed = (log_corr(h, h) - log_corr(h, -h) - log_corr(-h, h) + log_corr(-h, -h)) / (4.0 * h * h);
    const cplx p = weyl::current_two_point(f, g);
    EXPECT_NEAR(-mixed.real(), p.real(), 1e-6);
    EXPECT_NEAR(-mixed.imag(), p.imag(), 1e-6);
}
