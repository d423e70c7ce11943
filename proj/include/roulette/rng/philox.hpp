#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace roulette::rng {

/// Philox4x32-10 counter-based block function (Salmon et al., SC'11).
/// Maps a 128-bit counter and a 64-bit key to 128 random bits.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) noexcept;

/// Stream tags keep the experiments that share a seed statistically
/// independent of each other.
enum class Domain : std::uint32_t {
    game = 1,
    round = 2,
    clt = 3,
    mcdiarmid = 4,
    coupling = 5,
    permutation = 6,
    bootstrap = 7,
    intro_density = 8,
    wave_bootstrap = 9,
    generic = 10,
};

/// One independent random stream: key = seed, counter = (block index, stream
/// index, domain). Any (seed, stream, domain) triple reproduces the same
/// sequence regardless of which thread draws it.
class Stream {
public:
    using result_type = std::uint32_t;

    Stream(std::uint64_t seed, std::uint64_t stream_index, Domain domain = Domain::generic) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        if (used_ == 4) refill();
        return buffer_[used_++];
    }

    std::uint64_t next_u64() noexcept {
        const std::uint64_t hi = (*this)();
        return (hi << 32) | (*this)();
    }

    /// Uniform on [0, 1) with 53 random bits.
    double next_double() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on {0, ..., range - 1} without modulo bias (Lemire's
    /// multiply-and-reject). range must be positive.
    std::uint32_t bounded(std::uint32_t range) noexcept {
        std::uint64_t product = std::uint64_t{(*this)()} * range;
        auto low = static_cast<std::uint32_t>(product);
        if (low < range) {
            const std::uint32_t threshold = static_cast<std::uint32_t>(-range) % range;
            while (low < threshold) {
                product = std::uint64_t{(*this)()} * range;
                low = static_cast<std::uint32_t>(product);
            }
        }
        return static_cast<std::uint32_t>(product >> 32);
    }

private:
    void refill() noexcept;

    PhiloxKey key_;
    std::uint64_t block_ = 0;
    std::uint32_t stream_lo_;
    std::uint32_t stream_hi_domain_;
    PhiloxCounter buffer_{};
    unsigned used_ = 4;
};

}  // namespace roulette::rng
