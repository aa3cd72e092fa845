// AVX2 variants of the simulator kernels. Compiled as a separate translation
// unit with -mavx2; callers reach it only through the runtime dispatch in
// kernels.cpp after a cpuid check. Every function here must agree bit for
// bit with its scalar reference.

#if defined(KEYGRAPH_HAVE_AVX2_TU)

#include <immintrin.h>

#include <cstddef>
#include <cstdint>

#include "keygraph/kernels.hpp"
#include "keygraph/rng.hpp"

namespace keygraph::kernels {

namespace {

// 64-bit lane-wise multiply from 32-bit pieces; AVX2 has no mullo_epi64.
inline __m256i mullo_epi64(__m256i a, __m256i b) {
    const __m256i a_hi = _mm256_srli_epi64(a, 32);
    const __m256i b_hi = _mm256_srli_epi64(b, 32);
    const __m256i ll = _mm256_mul_epu32(a, b);
    const __m256i lh = _mm256_mul_epu32(a, b_hi);
    const __m256i hl = _mm256_mul_epu32(a_hi, b);
    const __m256i cross = _mm256_add_epi64(lh, hl);
    return _mm256_add_epi64(ll, _mm256_slli_epi64(cross, 32));
}

// Stafford mix13 on four lanes, matching rng::mix64.
inline __m256i mix64_vec(__m256i z) {
    z = _mm256_xor_si256(z, _mm256_srli_epi64(z, 30));
    z = mullo_epi64(z, _mm256_set1_epi64x(static_cast<long long>(0xBF58476D1CE4E5B9ull)));
    z = _mm256_xor_si256(z, _mm256_srli_epi64(z, 27));
    z = mullo_epi64(z, _mm256_set1_epi64x(static_cast<long long>(0x94D049BB133111EBull)));
    z = _mm256_xor_si256(z, _mm256_srli_epi64(z, 31));
    return z;
}

void bernoulli_bits_avx2(std::uint64_t seed, std::uint64_t first_index,
                         std::uint64_t threshold, std::size_t nbits,
                         std::uint64_t* out) {
    const std::size_t full_words = nbits / 64;
    const __m256i sign = _mm256_set1_epi64x(static_cast<long long>(0x8000000000000000ull));
    const __m256i thresh = _mm256_xor_si256(
        _mm256_set1_epi64x(static_cast<long long>(threshold)), sign);
    const std::uint64_t g = rng::kGolden;
    // Lane l of the running state covers draw index base+4s+l; one add of
    // 4g advances all lanes to the next group of four.
    const std::uint64_t s0 = seed + (first_index + 1) * g;
    __m256i state = _mm256_set_epi64x(static_cast<long long>(s0 + 3 * g),
                                      static_cast<long long>(s0 + 2 * g),
                                      static_cast<long long>(s0 + g),
                                      static_cast<long long>(s0));
    const __m256i step = _mm256_set1_epi64x(static_cast<long long>(4 * g));

    for (std::size_t w = 0; w < full_words; ++w) {
        std::uint64_t word = 0;
        for (int group = 0; group < 16; ++group) {
            const __m256i draw = mix64_vec(state);
            state = _mm256_add_epi64(state, step);
            // Unsigned draw < threshold via the signed compare after biasing.
            const __m256i lt = _mm256_cmpgt_epi64(thresh, _mm256_xor_si256(draw, sign));
            const auto mask = static_cast<std::uint64_t>(
                _mm256_movemask_pd(_mm256_castsi256_pd(lt)));
            word |= mask << (4 * group);
        }
        out[w] = word;
    }

    const std::size_t done = full_words * 64;
    if (done < nbits) {
        std::uint64_t word = 0;
        for (std::size_t b = 0; b < nbits - done; ++b) {
            const std::uint64_t draw = rng::stream_draw(seed, first_index + done + b);
            word |= static_cast<std::uint64_t>(draw < threshold) << b;
        }
        out[full_words] = word;
    }
}

void bytes_ge_bits_avx2(const std::uint8_t* values, std::size_t count,
                        std::uint8_t threshold, std::uint64_t* out) {
    const std::size_t full_words = count / 64;
    const __m256i qv = _mm256_set1_epi8(static_cast<char>(threshold));
    for (std::size_t w = 0; w < full_words; ++w) {
        const auto* base = reinterpret_cast<const __m256i*>(values + w * 64);
        const __m256i lo = _mm256_loadu_si256(base);
        const __m256i hi = _mm256_loadu_si256(base + 1);
        // v >= q (unsigned) as max(v, q) == v.
        const __m256i ge_lo = _mm256_cmpeq_epi8(_mm256_max_epu8(lo, qv), lo);
        const __m256i ge_hi = _mm256_cmpeq_epi8(_mm256_max_epu8(hi, qv), hi);
        const auto bits_lo = static_cast<std::uint32_t>(_mm256_movemask_epi8(ge_lo));
        const auto bits_hi = static_cast<std::uint32_t>(_mm256_movemask_epi8(ge_hi));
        out[w] = std::uint64_t{bits_lo} | (std::uint64_t{bits_hi} << 32);
    }

    const std::size_t done = full_words * 64;
    if (done < count) {
        std::uint64_t word = 0;
        for (std::size_t b = 0; b < count - done; ++b) {
            word |= static_cast<std::uint64_t>(values[done + b] >= threshold) << b;
        }
        out[full_words] = word;
    }
}

void and_words_avx2(const std::uint64_t* a, const std::uint64_t* b,
                    std::size_t nwords, std::uint64_t* out) {
    std::size_t i = 0;
    for (; i + 4 <= nwords; i += 4) {
        const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), _mm256_and_si256(va, vb));
    }
    for (; i < nwords; ++i) out[i] = a[i] & b[i];
}

std::uint64_t popcount_words_avx2(const std::uint64_t* words, std::size_t nwords) {
    // Nibble-lookup popcount accumulated through sad_epu8.
    const __m256i lut = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                         0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
    const __m256i low_mask = _mm256_set1_epi8(0x0f);
    const __m256i zero = _mm256_setzero_si256();
    __m256i acc = zero;
    std::size_t i = 0;
    for (; i + 4 <= nwords; i += 4) {
        const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(words + i));
        const __m256i lo = _mm256_and_si256(v, low_mask);
        const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
        const __m256i cnt = _mm256_add_epi8(_mm256_shuffle_epi8(lut, lo),
                                            _mm256_shuffle_epi8(lut, hi));
        acc = _mm256_add_epi64(acc, _mm256_sad_epu8(cnt, zero));
    }
    alignas(32) std::uint64_t lanes[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
    std::uint64_t total = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; i < nwords; ++i) {
        total += static_cast<std::uint64_t>(__builtin_popcountll(words[i]));
    }
    return total;
}

constexpr Ops kAvx2Ops{
    "avx2",
    &bernoulli_bits_avx2,
    &bytes_ge_bits_avx2,
    &and_words_avx2,
    &popcount_words_avx2,
};

}  // namespace

const Ops& avx2_ops_impl() { return kAvx2Ops; }

}  // namespace keygraph::kernels

#endif  // KEYGRAPH_HAVE_AVX2_TU
