#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace fas {

/// Philox4x32-10 counter-based generator.
///
/// A stream is identified by a 64-bit key (the master seed) and a 64-bit
/// stream index (the trial number). Each block of four 32-bit words is the
/// bijective scrambling of (stream index, block counter) under the key, so any
/// (seed, index) pair reproduces the same sequence on every platform and
/// distinct indices never share state.
class RandomStream {
public:
    using result_type = std::uint64_t;

    RandomStream(std::uint64_t master_seed, std::uint64_t stream_index) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type(0); }

    result_type operator()() noexcept { return next_u64(); }

    std::uint32_t next_u32() noexcept;
    std::uint64_t next_u64() noexcept;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Uniform on (0, 1].
    double uniform_open_low() noexcept;
    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t uniform_index(std::uint64_t bound) noexcept;

    /// Standard normal N(0, 1). Box-Muller; the second variate of each pair
    /// is cached.
    double normal() noexcept;
    /// Circularly symmetric CN(0, 1): real and imaginary parts independent
    /// N(0, 1/2).
    std::complex<double> complex_normal() noexcept;

    std::uint64_t stream_index() const noexcept { return counter_hi_; }

private:
    void refill() noexcept;

    std::array<std::uint32_t, 2> key_;
    std::uint64_t counter_hi_;
    std::uint64_t counter_lo_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int used_ = 4;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

/// Reproducible, independent substream for one trial.
inline RandomStream derive_stream(std::uint64_t master_seed, std::uint64_t trial_index) noexcept
{
    return RandomStream(master_seed, trial_index);
}

/// Raw Philox4x32-10 block function, exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

} // namespace fas
