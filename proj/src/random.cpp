#include "fas/random.hpp"

#include <cmath>
#include <numbers>

namespace fas {

namespace {

__extension__ typedef unsigned __int128 uint128;

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept
{
    const std::uint64_t product = std::uint64_t(a) * std::uint64_t(b);
    hi = std::uint32_t(product >> 32);
    lo = std::uint32_t(product);
}

} // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) noexcept
{
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

RandomStream::RandomStream(std::uint64_t master_seed, std::uint64_t stream_index) noexcept
    : key_{std::uint32_t(master_seed), std::uint32_t(master_seed >> 32)},
      counter_hi_(stream_index)
{
}

void RandomStream::refill() noexcept
{
    block_ = philox4x32_10({std::uint32_t(counter_lo_), std::uint32_t(counter_lo_ >> 32),
                            std::uint32_t(counter_hi_), std::uint32_t(counter_hi_ >> 32)},
                           key_);
    ++counter_lo_;
    used_ = 0;
}

std::uint32_t RandomStream::next_u32() noexcept
{
    if (used_ == 4)
        refill();
    return block_[used_++];
}

std::uint64_t RandomStream::next_u64() noexcept
{
    const std::uint64_t hi = next_u32();
    const std::uint64_t lo = next_u32();
    return (hi << 32) | lo;
}

double RandomStream::uniform() noexcept
{
    return double(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform_open_low() noexcept
{
    return (double(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

std::uint64_t RandomStream::uniform_index(std::uint64_t bound) noexcept
{
    // Lemire's multiply-and-reject.
    uint128 m = (uint128)next_u64() * bound;
    auto low = std::uint64_t(m);
    if (low < bound) {
        const std::uint64_t threshold = -bound % bound;
        while (low < threshold) {
            m = (uint128)next_u64() * bound;
            low = std::uint64_t(m);
        }
    }
    return std::uint64_t(m >> 64);
}

double RandomStream::normal() noexcept
{
    if (has_cached_) {
        has_cached_ = false;
        return cached_normal_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform_open_low()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    cached_normal_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
}

std::complex<double> RandomStream::complex_normal() noexcept
{
    const double radius = std::sqrt(-std::log(uniform_open_low()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

} // namespace fas
