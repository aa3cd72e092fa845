#include "keygraph/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

#include "keygraph/rng.hpp"

namespace keygraph::kernels {

namespace {

void bernoulli_bits_scalar(std::uint64_t seed, std::uint64_t first_index,
                           std::uint64_t threshold, std::size_t nbits,
                           std::uint64_t* out) {
    const std::size_t nwords = (nbits + 63) / 64;
    for (std::size_t w = 0; w < nwords; ++w) {
        std::uint64_t word = 0;
        const std::size_t lanes = nbits - w * 64 < 64 ? nbits - w * 64 : 64;
        for (std::size_t b = 0; b < lanes; ++b) {
            const std::uint64_t draw = rng::stream_draw(seed, first_index + w * 64 + b);
            word |= static_cast<std::uint64_t>(draw < threshold) << b;
        }
        out[w] = word;
    }
}

void bytes_ge_bits_scalar(const std::uint8_t* values, std::size_t count,
                          std::uint8_t threshold, std::uint64_t* out) {
    const std::size_t nwords = (count + 63) / 64;
    for (std::size_t w = 0; w < nwords; ++w) {
        std::uint64_t word = 0;
        const std::size_t lanes = count - w * 64 < 64 ? count - w * 64 : 64;
        for (std::size_t b = 0; b < lanes; ++b) {
            word |= static_cast<std::uint64_t>(values[w * 64 + b] >= threshold) << b;
        }
        out[w] = word;
    }
}

void and_words_scalar(const std::uint64_t* a, const std::uint64_t* b,
                      std::size_t nwords, std::uint64_t* out) {
    for (std::size_t i = 0; i < nwords; ++i) out[i] = a[i] & b[i];
}

std::uint64_t popcount_words_scalar(const std::uint64_t* words, std::size_t nwords) {
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < nwords; ++i) {
        total += static_cast<std::uint64_t>(__builtin_popcountll(words[i]));
    }
    return total;
}

constexpr Ops kScalarOps{
    "scalar",
    &bernoulli_bits_scalar,
    &bytes_ge_bits_scalar,
    &and_words_scalar,
    &popcount_words_scalar,
};

const Ops& select_active() {
    if (const char* env = std::getenv("KEYGRAPH_LAB_KERNELS")) {
        const std::string want(env);
        if (want == "scalar") return scalar_ops();
        if (want == "avx2") {
            const Ops* ops = avx2_ops();
            if (ops == nullptr) {
                throw std::runtime_error(
                    "KEYGRAPH_LAB_KERNELS=avx2 but AVX2 kernels are unavailable");
            }
            return *ops;
        }
        throw std::runtime_error("unknown KEYGRAPH_LAB_KERNELS value: " + want);
    }
    if (const Ops* ops = avx2_ops()) return *ops;
    return scalar_ops();
}

}  // namespace

const Ops& scalar_ops() { return kScalarOps; }

bool cpu_supports_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

#if defined(KEYGRAPH_HAVE_AVX2_TU)
const Ops& avx2_ops_impl();  // defined in kernels_avx2.cpp
#endif

const Ops* avx2_ops() {
#if defined(KEYGRAPH_HAVE_AVX2_TU)
    if (cpu_supports_avx2()) return &avx2_ops_impl();
#endif
    return nullptr;
}

const Ops& active_ops() {
    static const Ops& ops = select_active();
    return ops;
}

}  // namespace keygraph::kernels
