#pragma once

// Scalar special functions used by the link model.
//
// erf comes from the C library and J1 / Q(s, x) from Boost.Math; I0 is
// evaluated here because the coupling integrand needs the exponentially
// scaled form, which Boost does not expose.

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "aoci/errors.hpp"

namespace aoci::specfun {

[[nodiscard]] inline double erf(double x) noexcept { return std::erf(x); }

[[nodiscard]] inline double bessel_j1(double x) {
    if (!(x >= 0.0)) throw DomainError("bessel_j1: argument must be >= 0");
    if (x == 0.0) return 0.0;
    return boost::math::cyl_bessel_j(1, x);
}

namespace detail {

// Power series sum_k (x^2/4)^k / (k!)^2; all terms positive.
inline long double i0_series(long double x) noexcept {
    const long double q = x * x / 4.0L;
    long double term = 1.0L;
    long double sum = 1.0L;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<long double>(k) * k);
        sum += term;
        if (term < sum * std::numeric_limits<long double>::epsilon()) break;
    }
    return sum;
}

// Hankel expansion of e^{-x} I0(x), valid for x >= 30 where the smallest
// term is far below long double resolution.
inline long double i0_scaled_asymptotic(long double x) noexcept {
    long double term = 1.0L;
    long double sum = 1.0L;
    for (int k = 1; k < 200; ++k) {
        const long double odd = 2.0L * k - 1.0L;
        const long double next = term * odd * odd / (8.0L * k * x);
        if (std::fabs(next) > std::fabs(term)) break;  // past the optimal truncation point
        term = next;
        sum += term;
        if (std::fabs(term) < sum * std::numeric_limits<long double>::epsilon()) break;
    }
    return sum / std::sqrt(2.0L * std::numbers::pi_v<long double> * x);
}

inline constexpr double kI0AsymptoticSwitch = 30.0;

}  // namespace detail

// e^{-x} I0(x). Finite for every x >= 0.
[[nodiscard]] inline double bessel_i0_scaled(double x) {
    if (!(x >= 0.0)) throw DomainError("bessel_i0_scaled: argument must be >= 0");
    if (x < detail::kI0AsymptoticSwitch) {
        return static_cast<double>(detail::i0_series(x) * std::exp(-static_cast<long double>(x)));
    }
    return static_cast<double>(detail::i0_scaled_asymptotic(x));
}

// Unscaled I0(x); throws OverflowError once the value leaves double range.
[[nodiscard]] inline double bessel_i0(double x) {
    if (!(x >= 0.0)) throw DomainError("bessel_i0: argument must be >= 0");
    if (x < detail::kI0AsymptoticSwitch) return static_cast<double>(detail::i0_series(x));
    if (x > 700.0) {
        const long double log_value = std::log(detail::i0_scaled_asymptotic(x)) + x;
        if (log_value >= std::log(static_cast<long double>(std::numeric_limits<double>::max()))) {
            throw OverflowError("bessel_i0: I0(x) overflows double; use bessel_i0_scaled");
        }
    }
    return static_cast<double>(detail::i0_scaled_asymptotic(x) * std::exp(static_cast<long double>(x)));
}

// Regularized upper incomplete gamma Q(s, x) = Gamma(s, x) / Gamma(s).
[[nodiscard]] inline double regularized_gamma_q(double s, double x) {
    if (!(s > 0.0)) throw DomainError("regularized_gamma_q: s must be > 0");
    if (!(x >= 0.0)) throw DomainError("regularized_gamma_q: x must be >= 0");
    if (x == 0.0) return 1.0;
    return boost::math::gamma_q(s, x);
}

// Regularized lower incomplete gamma P(s, x) = 1 - Q(s, x), without the cancellation.
[[nodiscard]] inline double regularized_gamma_p(double s, double x) {
    if (!(s > 0.0)) throw DomainError("regularized_gamma_p: s must be > 0");
    if (!(x >= 0.0)) throw DomainError("regularized_gamma_p: x must be >= 0");
    if (x == 0.0) return 0.0;
    return boost::math::gamma_p(s, x);
}

}  // namespace aoci::specfun
