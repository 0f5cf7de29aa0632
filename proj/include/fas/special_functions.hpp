#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include "fas/errors.hpp"

namespace fas {

namespace detail {

template <std::floating_point Scalar>
void require_finite(Scalar x, const char* what)
{
    if (!std::isfinite(x))
        throw DomainError(std::string(what) + ": non-finite argument");
}

// Below this |x| the power series is summed directly. The Hankel expansion
// truncated at its smallest term has relative error ~exp(-2|x|), so the
// crossover must sit well above 8 to keep 1e-8 absolute accuracy.
inline constexpr double kJ0SeriesLimit = 12.0;

template <std::floating_point Scalar>
Scalar bessel_j0_series(Scalar x)
{
    // J0(x) = sum_k (-x^2/4)^k / (k!)^2
    const Scalar q = -x * x / Scalar(4);
    Scalar term = 1;
    Scalar sum = 1;
    for (int k = 1; k < 200; ++k) {
        term *= q / (Scalar(k) * Scalar(k));
        sum += term;
        if (std::abs(term) < std::numeric_limits<Scalar>::epsilon() * Scalar(1e-3))
            break;
    }
    return sum;
}

template <std::floating_point Scalar>
Scalar bessel_j0_hankel(Scalar x)
{
    // J0(x) ~ sqrt(2/(pi x)) [P(x) cos(x - pi/4) - Q(x) sin(x - pi/4)]
    // with a_k = prod_{j=1..k} (2j-1)^2 / (j 8x); P = sum (-1)^m a_{2m},
    // Q = -sum (-1)^m a_{2m+1}. Stop at the smallest term.
    const Scalar eightx = Scalar(8) * x;
    Scalar p = 1;
    Scalar q = 0;
    Scalar term = 1;
    Scalar last = std::numeric_limits<Scalar>::infinity();
    for (int k = 1; k < 100; ++k) {
        const Scalar odd = Scalar(2 * k - 1);
        const Scalar next = term * odd * odd / (Scalar(k) * eightx);
        if (std::abs(next) >= last)
            break;
        last = std::abs(next);
        term = next;
        const int m = k / 2;
        const Scalar signed_term = (m % 2 == 0) ? term : -term;
        if (k % 2 == 1)
            q -= signed_term;
        else
            p += signed_term;
        if (term < std::numeric_limits<Scalar>::epsilon() * Scalar(1e-3))
            break;
    }
    const Scalar phase = x - std::numbers::pi_v<Scalar> / Scalar(4);
    return std::sqrt(Scalar(2) / (std::numbers::pi_v<Scalar> * x)) *
           (p * std::cos(phase) - q * std::sin(phase));
}

} // namespace detail

/// Zeroth-order Bessel function of the first kind for real argument.
template <std::floating_point Scalar>
Scalar bessel_j0(Scalar x)
{
    detail::require_finite(x, "bessel_j0");
    const Scalar ax = std::abs(x);
    if (ax < Scalar(detail::kJ0SeriesLimit))
        return detail::bessel_j0_series(ax);
    return detail::bessel_j0_hankel(ax);
}

/// Gaussian tail probability Q(z) = P(Z > z), Z ~ N(0, 1).
template <std::floating_point Scalar>
Scalar gaussian_q(Scalar z)
{
    detail::require_finite(z, "gaussian_q");
    return Scalar(0.5) * std::erfc(z / std::numbers::sqrt2_v<Scalar>);
}

/// (2N-1)!! as an exact integer. Throws past the largest N whose value fits
/// in 64 bits (N = 17).
inline std::uint64_t double_factorial_odd(int n)
{
    if (n < 1)
        throw DomainError("double_factorial_odd: N must be >= 1");
    if (n > 17)
        throw DomainError("double_factorial_odd: (2N-1)!! overflows 64 bits for N > 17; "
                          "use log_double_factorial_odd");
    std::uint64_t value = 1;
    for (std::uint64_t odd = 2 * std::uint64_t(n) - 1; odd > 1; odd -= 2)
        value *= odd;
    return value;
}

/// ln((2N-1)!!) for any N >= 1.
inline double log_double_factorial_odd(int n)
{
    if (n < 1)
        throw DomainError("log_double_factorial_odd: N must be >= 1");
    // (2N-1)!! = (2N)! / (2^N N!)
    return std::lgamma(2.0 * n + 1.0) - n * std::numbers::ln2 - std::lgamma(n + 1.0);
}

} // namespace fas
