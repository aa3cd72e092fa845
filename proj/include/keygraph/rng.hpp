#pragma once

#include <cstdint>

namespace keygraph::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

/// Stafford mix13 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

/// index-th output of the splitmix64 stream started at `seed`.
/// Counter form: any draw can be computed without stepping through the
/// stream, so consumers may evaluate draws out of order (or in SIMD lanes)
/// and still agree bit for bit with sequential generation.
constexpr std::uint64_t stream_draw(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed + (index + 1) * kGolden);
}

/// Derives an independent child seed from (master, index). Used for
/// per-trial seeds and per-purpose substreams within a trial.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return stream_draw(master, index);
}

/// Sequential splitmix64. next() matches stream_draw(seed, i) call by call.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += kGolden;
        return mix64(state_);
    }

    std::uint32_t next_u32() { return static_cast<std::uint32_t>(next() >> 32); }

    /// Uniform double in (0, 1]. Never returns 0, safe under log().
    double next_unit_open() {
        return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound) without modulo bias (Lemire).
    std::uint32_t bounded(std::uint32_t bound) {
        std::uint64_t m = std::uint64_t{next_u32()} * bound;
        auto lo = static_cast<std::uint32_t>(m);
        if (lo < bound) {
            std::uint32_t t = (0u - bound) % bound;
            while (lo < t) {
                m = std::uint64_t{next_u32()} * bound;
                lo = static_cast<std::uint32_t>(m);
            }
        }
        return static_cast<std::uint32_t>(m >> 32);
    }

  private:
    std::uint64_t state_;
};

/// Maps p in [0,1) to the threshold t such that a uniform 64-bit draw is
/// below t with probability p (up to one part in 2^53). p >= 1 must be
/// handled by the caller; the threshold form cannot express "always".
std::uint64_t probability_threshold(double p);

}  // namespace keygraph::rng
