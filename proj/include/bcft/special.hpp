#pragma once

// Special functions behind the closed-form Gaussian and polynomial-bump
// kernels: Dawson's integral, the Gaussian log-moment E log|m + Y|, and the
// Fourier transform of the (1 - s^2)^4 bump.

#include <cmath>
#include <complex>
#include <numbers>

#include "bcft/quadrature.hpp"

namespace bcft::special {

inline constexpr double euler_gamma = 0.57721566490153286061;

/// Dawson's integral D(x) = exp(-x^2) * int_0^x exp(t^2) dt.
inline double dawson(double x)
{
    const double ax = std::abs(x);
    double r = 0.0;
    if (ax < 6.5) {
        // exp(-x^2) * sum x^{2n+1} / (n! (2n+1)); all terms positive
        const double x2 = ax * ax;
        double p = ax;
        double sum = ax;
        for (int n = 1; n < 400; ++n) {
            p *= x2 / n;
            const double t = p / (2.0 * n + 1.0);
            sum += t;
            if (t < 1e-18 * sum) break;
        }
        r = std::exp(-x2) * sum;
    } else {
        // asymptotic: (1/2x) sum (2n-1)!! / (2x^2)^n
        const double inv = 1.0 / (2.0 * ax * ax);
        double term = 1.0, sum = 1.0;
        for (int n = 1; n < 200; ++n) {
            const double next = term * (2.0 * n - 1.0) * inv;
            if (next >= term) break;
            term = next;
            sum += term;
            if (term < 1e-18 * sum) break;
        }
        r = sum / (2.0 * ax);
    }
    return x < 0 ? -r : r;
}

/// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Standard normal density.
inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

/// l(m) = E log|m + Y| for Y ~ N(0, 1), together with its first two
/// derivatives in m.
struct LogMoment {
    double value;
    double d1;
    double d2;
};

inline LogMoment gaussian_log_moment(double m)
{
    const double am = std::abs(m);
    const double sgn = m < 0 ? -1.0 : 1.0;
    auto d1_of = [](double t) { return std::numbers::sqrt2 * dawson(t / std::numbers::sqrt2); };
    const double d1 = sgn * d1_of(am);
    const double d2 = 1.0 - am * d1_of(am);

    double value = 0.0;
    constexpr double switch_point = 12.0;
    if (am <= switch_point) {
        // l(0) = -(gamma + log 2)/2, then integrate l' which is entire
        const double base = -0.5 * (euler_gamma + std::numbers::ln2);
        const int panels = std::max(1, static_cast<int>(std::ceil(am)));
        value = am > 0.0 ? base + integrate(d1_of, 0.0, am, 24, panels) : base;
    } else {
        // log m - sum (2n-1)!! / (2n m^{2n}); the Gaussian mass crossing zero
        // is below exp(-72) and dropped
        const double inv2 = 1.0 / (am * am);
        double moment = 1.0;  // (2n-1)!! / m^{2n}
        double sum = 0.0;
        for (int n = 1; n < 200; ++n) {
            const double next = moment * (2.0 * n - 1.0) * inv2;
            if (n > 1 && next >= moment) break;
            moment = next;
            const double t = moment / (2.0 * n);
            sum += t;
            if (t < 1e-18) break;
        }
        value = std::log(am) - sum;
    }
    return {value, d1, d2};
}

/// Fourier transform of the normalized bump b(s) = (315/256)(1 - s^2)^4 on
/// [-1, 1]: bhat(k) = int b(s) e^{iks} ds = 945 j_4(k) / k^4. Real and even.
/// Returns bhat and bhat - 1, the latter accurate for small k.
struct BumpTransform {
    double value;
    double minus_one;
};

inline BumpTransform bump_transform(double kappa)
{
    const double x = std::abs(kappa);
    if (x < 8.0) {
        // 945 * sum_k (-x^2/2)^k / (k! (2k+9)!!)
        const double y = -0.5 * x * x;
        double term = 1.0 / 945.0;  // k = 0
        double tail = 0.0;
        for (int k = 1; k < 80; ++k) {
            term *= y / (k * (2.0 * k + 9.0));
            tail += term;
            if (std::abs(term) < 1e-20 * (1.0 / 945.0)) break;
        }
        return {1.0 + 945.0 * tail, 945.0 * tail};
    }
    const double s = std::sin(x), c = std::cos(x);
    const double x2 = x * x;
    const double j4 = (105.0 / (x2 * x2 * x) - 45.0 / (x2 * x) + 1.0 / x) * s
        + (-105.0 / (x2 * x2) + 10.0 / x2) * c;
    const double v = 945.0 * j4 / (x2 * x2);
    return {v, v - 1.0};
}

/// exp(z) - 1 without cancellation for small |z|.
inline std::complex<double> expm1(std::complex<double> z)
{
    const double x = z.real(), y = z.imag();
    const double half_sin = std::sin(0.5 * y);
    const double re = std::expm1(x) * std::cos(y) - 2.0 * half_sin * half_sin;
    const double im = std::exp(x) * std::sin(y);
    return {re, im};
}

}  // namespace bcft::special
