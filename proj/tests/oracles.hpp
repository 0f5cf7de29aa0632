#pragma once

// Test-only reference computations, independent of the library code paths.

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using big = boost::multiprecision::cpp_bin_float_100;
using mid = boost::multiprecision::cpp_bin_float_50;

// J0 power series summed in 100-digit arithmetic until terms vanish.
inline double bessel_j0(double x)
{
    const big q = -big(x) * big(x) / 4;
    big term = 1;
    big sum = 1;
    for (int k = 1; k < 2000; ++k) {
        term *= q / (big(k) * big(k));
        sum += term;
        if (k > x && abs(term) < big("1e-40"))
            break;
    }
    return sum.convert_to<double>();
}

inline double gaussian_q(double z)
{
    const mid arg = mid(z) / sqrt(mid(2));
    return (boost::math::erfc(arg) / 2).convert_to<double>();
}

// Cyclic Jacobi eigenvalues of a symmetric matrix (row-major), long double.
inline std::vector<long double> jacobi_eigenvalues(std::vector<long double> a, int n)
{
    auto at = [&](int r, int c) -> long double& { return a[std::size_t(r * n + c)]; };
    for (int sweep = 0; sweep < 100; ++sweep) {
        long double off = 0;
        for (int r = 0; r < n; ++r)
            for (int c = r + 1; c < n; ++c)
                off += at(r, c) * at(r, c);
        if (off < 1e-60L)
            break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (at(p, q) == 0)
                    continue;
                const long double theta = (at(q, q) - at(p, p)) / (2 * at(p, q));
                const long double t = (theta >= 0 ? 1 : -1) / (std::fabs(theta) + std::sqrt(theta * theta + 1));
                const long double c = 1 / std::sqrt(t * t + 1);
                const long double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const long double akp = at(k, p);
                    const long double akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const long double apk = at(p, k);
                    const long double aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<long double> eig(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        eig[std::size_t(k)] = at(k, k);
    std::sort(eig.begin(), eig.end(), std::greater<>());
    return eig;
}

// Jakes matrix from the high-precision J0 oracle.
inline std::vector<long double> jakes_matrix(int n, double w)
{
    std::vector<long double> a(std::size_t(n * n));
    const double pi = 3.14159265358979323846;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            a[std::size_t(r * n + c)] =
                r == c ? 1.0L : (long double)bessel_j0(n > 1 ? 2 * pi * w * std::abs(r - c) / (n - 1) : 0.0);
    return a;
}

inline int effective_rank(int n, double w, long double threshold)
{
    const auto eig = jacobi_eigenvalues(jakes_matrix(n, w), n);
    return int(std::count_if(eig.begin(), eig.end(), [&](long double l) { return l > threshold * eig[0]; }));
}

// Single-antenna Rayleigh BPSK average SER.
inline double rayleigh_bpsk(double snr) { return 0.5 * (1.0 - std::sqrt(snr / (1.0 + snr))); }

} // namespace oracle
