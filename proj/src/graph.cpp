#include "keygraph/graph.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

#include "keygraph/kernels.hpp"

namespace keygraph {

namespace {

// Pool sizes up to this use counting sort for the key -> holders index;
// beyond it (offsets would dwarf the data) the index is built by sorting
// (key, node) pairs instead.
constexpr std::uint64_t kCountingSortPoolLimit = std::uint64_t{1} << 22;

std::uint32_t checked_u32(std::int64_t v, const char* what) {
    if (v < 0 || v > 0xFFFFFFFFll) {
        throw std::invalid_argument(std::string(what) + " out of range: " + std::to_string(v));
    }
    return static_cast<std::uint32_t>(v);
}

// Invokes fn(nodes) for every key held by at least two nodes, nodes in
// ascending order.
template <typename Fn>
void for_each_key_group(const KeyRingAssignment& a, std::uint32_t pool, Scratch& s, Fn&& fn) {
    const std::size_t entries = a.flat.size();
    if (pool <= kCountingSortPoolLimit) {
        s.key_offsets.assign(std::size_t{pool} + 1, 0);
        std::uint32_t* off = s.key_offsets.data();
        for (std::uint32_t key : a.flat) ++off[key + 1];
        for (std::size_t k = 1; k <= pool; ++k) off[k] += off[k - 1];
        s.key_slots.resize(entries);
        for (std::uint32_t node = 0; node < a.n; ++node) {
            for (std::uint32_t key : a.ring(node)) s.key_slots[off[key]++] = node;
        }
        // off[k] now marks the end of key k's slot range.
        std::size_t begin = 0;
        for (std::uint32_t k = 0; k < pool; ++k) {
            const std::size_t end = off[k];
            if (end - begin >= 2) {
                fn(std::span<const std::uint32_t>(s.key_slots.data() + begin, end - begin));
            }
            begin = end;
        }
    } else {
        std::vector<std::uint64_t> kv;
        kv.reserve(entries);
        for (std::uint32_t node = 0; node < a.n; ++node) {
            for (std::uint32_t key : a.ring(node)) {
                kv.push_back((std::uint64_t{key} << 32) | node);
            }
        }
        std::sort(kv.begin(), kv.end());
        std::vector<std::uint32_t> group;
        std::size_t i = 0;
        while (i < kv.size()) {
            const std::uint64_t key = kv[i] >> 32;
            std::size_t j = i;
            while (j < kv.size() && (kv[j] >> 32) == key) ++j;
            if (j - i >= 2) {
                group.clear();
                for (std::size_t t = i; t < j; ++t) {
                    group.push_back(static_cast<std::uint32_t>(kv[t] & 0xFFFFFFFFull));
                }
                fn(std::span<const std::uint32_t>(group.data(), group.size()));
            }
            i = j;
        }
    }
}

template <typename CountT>
void accumulate_pair_counts(const KeyRingAssignment& a, std::uint32_t pool,
                            CountT* counts, Scratch& s) {
    const std::uint32_t n = a.n;
    for_each_key_group(a, pool, s, [&](std::span<const std::uint32_t> nodes) {
        for (std::size_t x = 0; x + 1 < nodes.size(); ++x) {
            const std::uint32_t i = nodes[x];
            // pair_index(n, i, j) == rowbase + j; the intermediate wraps for
            // i == 0 but adding j >= i+1 restores it.
            const std::size_t rowbase = pair_row_offset(n, i) - i - 1;
            for (std::size_t y = x + 1; y < nodes.size(); ++y) {
                ++counts[rowbase + nodes[y]];
            }
        }
    });
}

template <typename CountT>
void counts_to_bits(const CountT* counts, std::size_t npairs, std::int64_t q,
                    std::uint64_t* words) {
    const std::size_t nwords = (npairs + 63) / 64;
    for (std::size_t w = 0; w < nwords; ++w) {
        std::uint64_t word = 0;
        const std::size_t lanes = npairs - w * 64 < 64 ? npairs - w * 64 : 64;
        for (std::size_t b = 0; b < lanes; ++b) {
            word |= static_cast<std::uint64_t>(counts[w * 64 + b] >= q) << b;
        }
        words[w] = word;
    }
}

// Ascending pair-position writer shared by the channel sampling paths:
// tracks the (i, j) decoding incrementally so sparse storage never needs a
// square root.
class PairCursor {
  public:
    explicit PairCursor(std::uint32_t n) : n_(n), row_end_(n > 1 ? n - 1 : 0) {}

    std::pair<std::uint32_t, std::uint32_t> decode(std::size_t pidx) {
        while (pidx >= row_end_) {
            ++i_;
            row_begin_ = row_end_;
            row_end_ += n_ - 1 - i_;
        }
        return {i_, static_cast<std::uint32_t>(i_ + 1 + (pidx - row_begin_))};
    }

  private:
    std::uint32_t n_;
    std::uint32_t i_ = 0;
    std::size_t row_begin_ = 0;
    std::size_t row_end_;
};

}  // namespace

void KeyRingAssignment::validate(std::uint32_t pool) const {
    if (flat.size() != std::size_t{n} * keys) {
        throw std::logic_error("ring storage size mismatch");
    }
    for (std::uint32_t node = 0; node < n; ++node) {
        auto r = ring(node);
        for (std::size_t t = 0; t < r.size(); ++t) {
            if (r[t] >= pool) throw std::logic_error("key id outside pool");
            if (t > 0 && r[t - 1] >= r[t]) throw std::logic_error("ring not strictly sorted");
        }
    }
}

KeyRingAssignment sample_key_rings(const SchemeParams& params, rng::SplitMix64& gen,
                                   Scratch* scratch) {
    params.validate();
    const std::uint32_t n = checked_u32(params.n, "n");
    const std::uint32_t k = checked_u32(params.keys, "keys");
    const std::uint32_t pool = checked_u32(params.pool, "pool");

    Scratch local;
    Scratch& s = scratch ? *scratch : local;
    if (s.pool_perm.size() != pool) {
        s.pool_perm.resize(pool);
        for (std::uint32_t i = 0; i < pool; ++i) s.pool_perm[i] = i;
    }
    s.undo.resize(k);

    KeyRingAssignment out;
    out.n = n;
    out.keys = k;
    out.flat.resize(std::size_t{n} * k);

    for (std::uint32_t node = 0; node < n; ++node) {
        // Partial Fisher-Yates: the first k slots become a uniform k-subset;
        // undoing the swaps afterwards restores the identity permutation so
        // the buffer is reusable without a full reset.
        for (std::uint32_t t = 0; t < k; ++t) {
            const std::uint32_t r = t + gen.bounded(pool - t);
            std::swap(s.pool_perm[t], s.pool_perm[r]);
            s.undo[t] = r;
        }
        std::uint32_t* ring = out.flat.data() + std::size_t{node} * k;
        std::copy_n(s.pool_perm.data(), k, ring);
        std::sort(ring, ring + k);
        for (std::uint32_t t = k; t-- > 0;) {
            std::swap(s.pool_perm[t], s.pool_perm[s.undo[t]]);
        }
    }
    return out;
}

std::uint32_t overlap_count(std::span<const std::uint32_t> ring_a,
                            std::span<const std::uint32_t> ring_b) {
    std::uint32_t shared = 0;
    std::size_t x = 0;
    std::size_t y = 0;
    while (x < ring_a.size() && y < ring_b.size()) {
        if (ring_a[x] < ring_b[y]) {
            ++x;
        } else if (ring_a[x] > ring_b[y]) {
            ++y;
        } else {
            ++shared;
            ++x;
            ++y;
        }
    }
    return shared;
}

PairRelation build_key_graph(const KeyRingAssignment& assignment, std::int64_t q,
                             Storage storage, Scratch* scratch) {
    if (q < 1) throw std::invalid_argument("q must be >= 1");
    const std::uint32_t n = assignment.n;
    PairRelation rel = PairRelation::make(n, storage);
    if (q > assignment.keys) return rel;  // overlap cannot exceed the ring size

    Scratch local;
    Scratch& s = scratch ? *scratch : local;
    // Pool bound: key ids are validated < pool at sampling time; derive the
    // index width from the largest id actually present.
    std::uint32_t pool = 0;
    for (std::uint32_t key : assignment.flat) pool = std::max(pool, key + 1);

    if (rel.is_dense()) {
        const std::size_t npairs = pair_count(n);
        if (assignment.keys <= 0xFF) {
            s.overlap_counts.assign(npairs, 0);
            accumulate_pair_counts<std::uint8_t>(assignment, pool, s.overlap_counts.data(), s);
            kernels::active_ops().bytes_ge_bits(s.overlap_counts.data(), npairs,
                                                static_cast<std::uint8_t>(q), rel.words());
        } else if (assignment.keys <= 0xFFFF) {
            std::vector<std::uint16_t> counts(npairs, 0);
            accumulate_pair_counts<std::uint16_t>(assignment, pool, counts.data(), s);
            counts_to_bits(counts.data(), npairs, q, rel.words());
        } else {
            std::vector<std::uint32_t> counts(npairs, 0);
            accumulate_pair_counts<std::uint32_t>(assignment, pool, counts.data(), s);
            counts_to_bits(counts.data(), npairs, q, rel.words());
        }
        return rel;
    }

    // Sparse: one packed pair per shared key, sorted, then run lengths give
    // the overlap counts.
    std::vector<std::uint64_t> cooc;
    for_each_key_group(assignment, pool, s, [&](std::span<const std::uint32_t> nodes) {
        for (std::size_t x = 0; x + 1 < nodes.size(); ++x) {
            for (std::size_t y = x + 1; y < nodes.size(); ++y) {
                cooc.push_back(PairRelation::pack(nodes[x], nodes[y]));
            }
        }
    });
    std::sort(cooc.begin(), cooc.end());
    std::size_t i = 0;
    while (i < cooc.size()) {
        std::size_t j = i;
        while (j < cooc.size() && cooc[j] == cooc[i]) ++j;
        if (static_cast<std::int64_t>(j - i) >= q) rel.pair_storage().push_back(cooc[i]);
        i = j;
    }
    return rel;
}

PairRelation build_key_graph_naive(const KeyRingAssignment& assignment, std::int64_t q,
                                   Storage storage) {
    if (q < 1) throw std::invalid_argument("q must be >= 1");
    const std::uint32_t n = assignment.n;
    PairRelation rel = PairRelation::make(n, storage);
    for (std::uint32_t i = 0; i + 1 < n; ++i) {
        for (std::uint32_t j = i + 1; j < n; ++j) {
            if (overlap_count(assignment.ring(i), assignment.ring(j)) >=
                static_cast<std::uint64_t>(q)) {
                rel.set(i, j);
            }
        }
    }
    return rel;
}

PairRelation sample_channel_graph(std::uint32_t n, double p, std::uint64_t seed,
                                  Storage storage) {
    if (!(p > 0.0) || p > 1.0) {
        throw std::invalid_argument("channel probability must satisfy 0 < p <= 1");
    }
    PairRelation rel = PairRelation::make(n, storage);
    const std::size_t npairs = pair_count(n);

    if (p == 1.0) {
        if (rel.is_dense()) {
            auto& words = rel.word_storage();
            std::fill(words.begin(), words.end(), ~std::uint64_t{0});
            if (npairs % 64 != 0) {
                words.back() = (std::uint64_t{1} << (npairs % 64)) - 1;
            }
        } else {
            rel.pair_storage().reserve(npairs);
            for (std::uint32_t i = 0; i + 1 < n; ++i) {
                for (std::uint32_t j = i + 1; j < n; ++j) {
                    rel.pair_storage().push_back(PairRelation::pack(i, j));
                }
            }
        }
        return rel;
    }

    if (p < 0.1) {
        // Sparse regime: jump between successes with geometric gaps instead
        // of drawing once per pair.
        rng::SplitMix64 gen(seed);
        const double inv_log_miss = 1.0 / std::log1p(-p);
        PairCursor cursor(n);
        std::size_t pos = 0;
        while (pos < npairs) {
            const double gap = std::floor(std::log(gen.next_unit_open()) * inv_log_miss);
            if (!(gap < static_cast<double>(npairs - pos))) break;
            pos += static_cast<std::size_t>(gap);
            if (rel.is_dense()) {
                rel.words()[pos / 64] |= std::uint64_t{1} << (pos % 64);
            } else {
                const auto [i, j] = cursor.decode(pos);
                rel.pair_storage().push_back(PairRelation::pack(i, j));
            }
            ++pos;
        }
        return rel;
    }

    const std::uint64_t threshold = rng::probability_threshold(p);
    if (rel.is_dense()) {
        kernels::active_ops().bernoulli_bits(seed, 0, threshold, npairs, rel.words());
        return rel;
    }
    PairCursor cursor(n);
    for (std::size_t pidx = 0; pidx < npairs; ++pidx) {
        if (rng::stream_draw(seed, pidx) < threshold) {
            const auto [i, j] = cursor.decode(pidx);
            rel.pair_storage().push_back(PairRelation::pack(i, j));
        }
    }
    return rel;
}

CompositeGraph compose(PairRelation key_layer, PairRelation channel_layer,
                       bool retain_layers) {
    CompositeGraph graph;
    graph.edges = intersect_relations(key_layer, channel_layer);
    if (retain_layers) {
        graph.key_layer = std::move(key_layer);
        graph.channel_layer = std::move(channel_layer);
    }
    return graph;
}

void DegreeSummary::validate() const {
    std::uint64_t nodes = 0;
    std::uint64_t degree_total = 0;
    for (std::size_t h = 0; h < histogram.size(); ++h) {
        nodes += histogram[h];
        degree_total += h * histogram[h];
    }
    if (nodes != node_count) {
        throw std::logic_error("degree histogram does not cover every node");
    }
    if (degree_total != 2 * edge_count) {
        throw std::logic_error("handshake identity violated");
    }
    std::uint32_t first = 0;
    while (first < histogram.size() && histogram[first] == 0) ++first;
    if (node_count > 0 && (first >= histogram.size() || min_degree != first)) {
        throw std::logic_error("min_degree is not the first occupied bin");
    }
}

DegreeSummary degree_summary(const PairRelation& rel, Scratch* scratch) {
    Scratch local;
    Scratch& s = scratch ? *scratch : local;
    const std::uint32_t n = rel.node_count();
    s.degrees.assign(n, 0);

    std::uint64_t edges = 0;
    rel.for_each_edge([&](std::uint32_t i, std::uint32_t j) {
        ++s.degrees[i];
        ++s.degrees[j];
        ++edges;
    });

    std::uint32_t max_degree = 0;
    for (std::uint32_t d : s.degrees) max_degree = std::max(max_degree, d);

    DegreeSummary summary;
    summary.node_count = n;
    summary.edge_count = edges;
    summary.histogram.assign(std::size_t{max_degree} + 1, 0);
    for (std::uint32_t d : s.degrees) ++summary.histogram[d];
    std::uint32_t first = 0;
    while (summary.histogram[first] == 0) ++first;
    summary.min_degree = first;
    summary.validate();
    return summary;
}

DegreeSummary degree_summary(const CompositeGraph& graph, Scratch* scratch) {
    return degree_summary(graph.edges, scratch);
}

}  // namespace keygraph
