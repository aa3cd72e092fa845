#pragma once

#include <cstdint>

namespace keygraph {

/// One network configuration: n nodes, key rings of size K drawn from a
/// pool of P keys, links requiring at least q shared keys, and channels
/// independently on with probability p.
struct SchemeParams {
    std::int64_t n = 0;     // node count, >= 2
    std::int64_t keys = 0;  // ring size K, 1 <= K <= P
    std::int64_t pool = 0;  // pool size P
    std::int64_t q = 0;     // shared-key threshold, 1 <= q <= K
    double p = 1.0;         // channel on-probability, 0 < p <= 1

    /// Throws std::invalid_argument naming the violated invariant.
    void validate() const;
};

}  // namespace keygraph
