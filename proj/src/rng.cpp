#include "keygraph/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace keygraph::rng {

std::uint64_t probability_threshold(double p) {
    if (!(p >= 0.0) || p >= 1.0) {
        throw std::invalid_argument("probability_threshold requires 0 <= p < 1");
    }
    // Exact in 80-bit arithmetic for any double p; the cast cannot overflow
    // because p < 1 keeps the product strictly below 2^64.
    const long double scaled = static_cast<long double>(p) * 18446744073709551616.0L;
    return static_cast<std::uint64_t>(scaled);
}

}  // namespace keygraph::rng
