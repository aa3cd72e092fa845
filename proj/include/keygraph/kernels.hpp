#pragma once

#include <cstddef>
#include <cstdint>

// Data-parallel inner loops of the simulator, with a scalar reference
// implementation and SIMD variants selected at runtime. All variants are
// bit-exact: for identical inputs they produce identical outputs, so kernel
// selection never changes simulation results.
//
// Bit-buffer convention: bit t of the output is bit (t % 64) of word
// (t / 64). Writers fill ceil(nbits/64) words and clear the bits of the
// last word at positions >= nbits.

namespace keygraph::kernels {

struct Ops {
    const char* name;

    /// out bit t = 1 iff stream_draw(seed, first_index + t) < threshold,
    /// for t in [0, nbits).
    void (*bernoulli_bits)(std::uint64_t seed, std::uint64_t first_index,
                           std::uint64_t threshold, std::size_t nbits,
                           std::uint64_t* out);

    /// out bit t = 1 iff values[t] >= threshold, for t in [0, count).
    void (*bytes_ge_bits)(const std::uint8_t* values, std::size_t count,
                          std::uint8_t threshold, std::uint64_t* out);

    /// out[w] = a[w] & b[w]. Aliasing with either input is allowed.
    void (*and_words)(const std::uint64_t* a, const std::uint64_t* b,
                      std::size_t nwords, std::uint64_t* out);

    /// Total population count over nwords words.
    std::uint64_t (*popcount_words)(const std::uint64_t* words,
                                    std::size_t nwords);
};

const Ops& scalar_ops();

/// AVX2 variant, or nullptr when the binary was built without it or the
/// CPU lacks AVX2.
const Ops* avx2_ops();

/// Best available variant. Overridable with KEYGRAPH_LAB_KERNELS=scalar|avx2
/// (throws std::runtime_error if the requested variant is unavailable).
/// The choice is made once per process.
const Ops& active_ops();

bool cpu_supports_avx2();

}  // namespace keygraph::kernels
