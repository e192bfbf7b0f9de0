#pragma once

#include <array>
#include <cstdint>

namespace supframe {

/// Philox4x32-10 counter-based generator.
///
/// The generator is a pure function of (key, counter): block i of the
/// stream with 64-bit seed s and 32-bit stream id is obtained by
/// encrypting the counter (lo32(i), hi32(i), stream, 0) with the key
/// (lo32(s), hi32(s)) for 10 rounds.  Draw i consumes one block and
/// yields the 64-bit word (x0 << 32) | x1; uniform doubles keep the top
/// 53 bits.  This makes every sampling sequence reproducible from
/// (seed, stream) alone, with no hidden state across threads or runs.
class Philox {
public:
    using Block = std::array<std::uint32_t, 4>;

    explicit Philox(std::uint64_t seed, std::uint32_t stream = 0)
        : seed_(seed), stream_(stream) {}

    /// 10-round Philox4x32 block function.
    static Block block(const Block& counter, std::uint64_t seed) {
        std::uint32_t k0 = static_cast<std::uint32_t>(seed);
        std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
        Block x = counter;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = kMul0 * static_cast<std::uint64_t>(x[0]);
            const std::uint64_t p1 = kMul1 * static_cast<std::uint64_t>(x[2]);
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
            k0 += kWeyl0;
            k1 += kWeyl1;
        }
        return x;
    }

    /// 64-bit output for draw `index` of this (seed, stream).
    std::uint64_t u64_at(std::uint64_t index) const {
        const Block ctr = {static_cast<std::uint32_t>(index),
                           static_cast<std::uint32_t>(index >> 32), stream_, 0};
        const Block out = block(ctr, seed_);
        return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    }

    /// Uniform double in [0, 1) for draw `index` (top 53 bits of u64_at).
    double uniform_at(std::uint64_t index) const {
        return static_cast<double>(u64_at(index) >> 11) * 0x1.0p-53;
    }

    std::uint64_t next_u64() { return u64_at(count_++); }
    double next_uniform() { return uniform_at(count_++); }

    /// Uniform double in [lo, hi).
    double next_uniform(double lo, double hi) {
        return lo + (hi - lo) * next_uniform();
    }

    std::uint64_t draws_consumed() const { return count_; }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    std::uint64_t seed_;
    std::uint32_t stream_;
    std::uint64_t count_ = 0;
};

}  // namespace supframe
