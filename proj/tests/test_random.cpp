#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "fas/random.hpp"

TEST_CASE("philox4x32-10 known-answer vectors")
{
    using Block = std::array<std::uint32_t, 4>;
    CHECK(fas::philox4x32_10({0, 0, 0, 0}, {0, 0}) == Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(fas::philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(fas::philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("same seed and index reproduce the stream")
{
    auto a = fas::derive_stream(42, 17);
    auto b = fas::derive_stream(42, 17);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
    for (int i = 0; i < 100; ++i) {
        const auto za = a.complex_normal();
        const auto zb = b.complex_normal();
        CHECK(za == zb);
    }
}

TEST_CASE("adjacent substreams are uncorrelated")
{
    auto a = fas::derive_stream(42, 0);
    auto b = fas::derive_stream(42, 1);
    const int n = 1'000'000;
    double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
    for (int i = 0; i < n; ++i) {
        const double x = a.uniform();
        const double y = b.uniform();
        sa += x;
        sb += y;
        saa += x * x;
        sbb += y * y;
        sab += x * y;
    }
    const double cov = sab / n - (sa / n) * (sb / n);
    const double rho = cov / std::sqrt((saa / n - (sa / n) * (sa / n)) * (sbb / n - (sb / n) * (sb / n)));
    CHECK(std::abs(rho) < 0.01);
}

TEST_CASE("different master seeds give different streams")
{
    std::set<std::uint64_t> first_draws;
    for (std::uint64_t seed = 0; seed < 100; ++seed)
        first_draws.insert(fas::derive_stream(seed, 0).next_u64());
    CHECK(first_draws.size() == 100);
}

TEST_CASE("uniform ranges")
{
    auto s = fas::derive_stream(1, 2);
    for (int i = 0; i < 100000; ++i) {
        const double u = s.uniform();
        CHECK((u >= 0.0 && u < 1.0));
        const double v = s.uniform_open_low();
        CHECK((v > 0.0 && v <= 1.0));
        CHECK(s.uniform_index(7) < 7u);
    }
}

TEST_CASE("complex normal has E|z|^2 = 1 with independent halves")
{
    auto s = fas::derive_stream(5, 0);
    const int n = 1'000'000;
    double re2 = 0, im2 = 0, cross = 0, re = 0;
    for (int i = 0; i < n; ++i) {
        const auto z = s.complex_normal();
        re += z.real();
        re2 += z.real() * z.real();
        im2 += z.imag() * z.imag();
        cross += z.real() * z.imag();
    }
    CHECK(re2 / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(im2 / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(std::abs(cross / n) < 0.005);
    CHECK(std::abs(re / n) < 0.005);
}

TEST_CASE("standard normal moments")
{
    auto s = fas::derive_stream(9, 3);
    const int n = 1'000'000;
    double m1 = 0, m2 = 0;
    for (int i = 0; i < n; ++i) {
        const double x = s.normal();
        m1 += x;
        m2 += x * x;
    }
    CHECK(std::abs(m1 / n) < 0.005);
    CHECK(m2 / n == doctest::Approx(1.0).epsilon(0.01));
}
