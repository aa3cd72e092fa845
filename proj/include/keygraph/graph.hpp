#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "keygraph/pair_relation.hpp"
#include "keygraph/params.hpp"
#include "keygraph/rng.hpp"

namespace keygraph {

/// Per-node key rings: each ring is a sorted set of `keys` distinct key ids
/// in [0, pool). Stored flat, ring-major.
struct KeyRingAssignment {
    std::uint32_t n = 0;
    std::uint32_t keys = 0;
    std::vector<std::uint32_t> flat;

    std::span<const std::uint32_t> ring(std::uint32_t node) const {
        return {flat.data() + std::size_t{node} * keys, keys};
    }

    /// Checks canonical form (sorted, distinct, < pool). Throws on violation.
    void validate(std::uint32_t pool) const;
};

/// Reusable scratch buffers for the sampling / graph-building hot path.
/// Optional everywhere; pass one when running many trials.
struct Scratch {
    std::vector<std::uint32_t> pool_perm;
    std::vector<std::uint32_t> undo;
    std::vector<std::uint8_t> overlap_counts;
    std::vector<std::uint32_t> key_offsets;
    std::vector<std::uint32_t> key_slots;
    std::vector<std::uint32_t> degrees;
};

/// Uniformly random K-subset ring per node, mutually independent, sorted.
KeyRingAssignment sample_key_rings(const SchemeParams& params, rng::SplitMix64& gen,
                                   Scratch* scratch = nullptr);

/// |ring_a ∩ ring_b| by linear merge; both rings must be sorted.
std::uint32_t overlap_count(std::span<const std::uint32_t> ring_a,
                            std::span<const std::uint32_t> ring_b);

/// Key layer: edge (i,j) iff the rings share at least q keys. Built with an
/// inverted index (key -> holders, then per-pair co-occurrence counts).
PairRelation build_key_graph(const KeyRingAssignment& assignment, std::int64_t q,
                             Storage storage = Storage::automatic,
                             Scratch* scratch = nullptr);

/// Reference construction: direct pairwise overlap counting, O(n^2 K).
/// Kept for cross-validation of the inverted-index path.
PairRelation build_key_graph_naive(const KeyRingAssignment& assignment, std::int64_t q,
                                   Storage storage = Storage::automatic);

/// Channel layer: each unordered pair independently present with
/// probability p. Identical edge set for either storage mode at a given
/// seed. p < 0.1 uses geometric gap skipping, otherwise one counter-indexed
/// draw per pair.
PairRelation sample_channel_graph(std::uint32_t n, double p, std::uint64_t seed,
                                  Storage storage = Storage::automatic);

/// Composite graph: secure links, i.e. key-layer AND channel-layer.
struct CompositeGraph {
    PairRelation edges;
    std::optional<PairRelation> key_layer;
    std::optional<PairRelation> channel_layer;
};

CompositeGraph compose(PairRelation key_layer, PairRelation channel_layer,
                       bool retain_layers = false);

/// Degree census of one graph: histogram[h] = number of nodes with degree h.
struct DegreeSummary {
    std::uint64_t node_count = 0;
    std::uint64_t edge_count = 0;
    std::uint32_t min_degree = 0;
    std::vector<std::uint64_t> histogram;

    std::uint64_t count_at(std::size_t h) const {
        return h < histogram.size() ? histogram[h] : 0;
    }

    /// Enforces sum(histogram) == n, the handshake identity
    /// sum_h h*histogram[h] == 2*edge_count, and min_degree being the first
    /// occupied bin. Throws std::logic_error on violation.
    void validate() const;
};

DegreeSummary degree_summary(const PairRelation& rel, Scratch* scratch = nullptr);
DegreeSummary degree_summary(const CompositeGraph& graph, Scratch* scratch = nullptr);

}  // namespace keygraph
