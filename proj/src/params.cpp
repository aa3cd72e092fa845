#include "keygraph/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace keygraph {

void SchemeParams::validate() const {
    if (n < 2) {
        throw std::invalid_argument("n must be >= 2 (got n=" + std::to_string(n) + ")");
    }
    if (keys < 1 || keys > pool) {
        throw std::invalid_argument("keys must satisfy 1 <= K <= P (got K=" +
                                    std::to_string(keys) + ", P=" + std::to_string(pool) + ")");
    }
    // q > K is degenerate but legal: no pair can share q keys, so the key
    // layer is empty and p_sq = 0.
    if (q < 1) {
        throw std::invalid_argument("q must be >= 1 (got q=" + std::to_string(q) + ")");
    }
    if (!std::isfinite(p) || p <= 0.0 || p > 1.0) {
        throw std::invalid_argument("p must satisfy 0 < p <= 1 (got p=" +
                                    std::to_string(p) + ")");
    }
}

}  // namespace keygraph
