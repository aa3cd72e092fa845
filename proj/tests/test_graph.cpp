#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <sstream>
#include <vector>

#include "keygraph/analytic.hpp"
#include "keygraph/graph.hpp"

using namespace keygraph;

namespace {

KeyRingAssignment make_rings(std::uint32_t keys,
                             std::initializer_list<std::initializer_list<std::uint32_t>> rings) {
    KeyRingAssignment a;
    a.n = static_cast<std::uint32_t>(rings.size());
    a.keys = keys;
    for (const auto& ring : rings) {
        for (std::uint32_t key : ring) a.flat.push_back(key);
    }
    return a;
}

PairRelation relation_from_edges(
    std::uint32_t n, Storage storage,
    std::initializer_list<std::pair<std::uint32_t, std::uint32_t>> edges) {
    PairRelation rel = PairRelation::make(n, storage);
    for (auto [i, j] : edges) rel.set(i, j);
    return rel;
}

SchemeParams random_params(rng::SplitMix64& gen) {
    SchemeParams params;
    params.n = 2 + gen.bounded(99);
    params.pool = 1 + gen.bounded(30);
    params.keys = 1 + gen.bounded(static_cast<std::uint32_t>(std::min<std::int64_t>(params.pool, 8)));
    params.q = 1 + gen.bounded(static_cast<std::uint32_t>(params.keys + 1));  // may exceed K
    params.p = 0.5;
    return params;
}

}  // namespace

TEST_CASE("ring sampling degenerate cases") {
    rng::SplitMix64 gen(3);

    // K = P: the only K-subset is the whole pool.
    SchemeParams full{4, 6, 6, 1, 1.0};
    const auto rings = sample_key_rings(full, gen);
    rings.validate(6);
    for (std::uint32_t node = 0; node < 4; ++node) {
        for (std::uint32_t t = 0; t < 6; ++t) CHECK(rings.ring(node)[t] == t);
    }

    SchemeParams tiny{2, 1, 1, 1, 1.0};
    const auto pair = sample_key_rings(tiny, gen);
    CHECK(pair.ring(0)[0] == 0);
    CHECK(pair.ring(1)[0] == 0);
    CHECK(overlap_count(pair.ring(0), pair.ring(1)) == 1);
}

TEST_CASE("ring sampling is canonical and reuses scratch cleanly") {
    rng::SplitMix64 gen(99);
    Scratch scratch;
    SchemeParams params{50, 5, 23, 1, 1.0};
    for (int round = 0; round < 20; ++round) {
        const auto rings = sample_key_rings(params, gen, &scratch);
        rings.validate(23);
    }
}

TEST_CASE("fixed key appears with frequency K/P") {
    // One call with many nodes = many independent ring samples.
    SchemeParams params{100000, 4, 20, 1, 1.0};
    rng::SplitMix64 gen(2024);
    const auto rings = sample_key_rings(params, gen);
    const double want = 4.0 / 20.0;
    for (std::uint32_t key : {0u, 7u, 19u}) {
        std::uint64_t hits = 0;
        for (std::uint32_t node = 0; node < rings.n; ++node) {
            for (std::uint32_t id : rings.ring(node)) hits += id == key;
        }
        const double sigma = std::sqrt(want * (1 - want) / static_cast<double>(rings.n));
        CAPTURE(key);
        CHECK(std::abs(static_cast<double>(hits) / rings.n - want) <= 4.0 * sigma);
    }
}

TEST_CASE("overlap count") {
    const std::vector<std::uint32_t> a{1, 2};
    const std::vector<std::uint32_t> b{2, 3};
    const std::vector<std::uint32_t> c{4, 5};
    CHECK(overlap_count(a, b) == 1);
    CHECK(overlap_count(a, c) == 0);
    CHECK(overlap_count(a, a) == 2);
    CHECK(overlap_count({}, a) == 0);
}

TEST_CASE("key graph from explicit rings") {
    const auto rings = make_rings(2, {{1, 2}, {2, 3}, {4, 5}});
    const auto q1 = build_key_graph(rings, 1);
    CHECK(q1.edge_count() == 1);
    CHECK(q1.contains(0, 1));
    CHECK_FALSE(q1.contains(0, 2));

    const auto q2 = build_key_graph(rings, 2);
    CHECK(q2.edge_count() == 0);

    const auto q3 = build_key_graph(rings, 3);  // q > K: empty by construction
    CHECK(q3.edge_count() == 0);
    CHECK_THROWS_AS(build_key_graph(rings, 0), std::invalid_argument);
}

TEST_CASE("inverted index equals naive pairwise construction") {
    rng::SplitMix64 gen(77);
    for (int instance = 0; instance < 1000; ++instance) {
        const SchemeParams params = random_params(gen);
        const auto rings = sample_key_rings(params, gen);
        const auto fast = build_key_graph(rings, params.q);
        const auto naive = build_key_graph_naive(rings, params.q);
        CAPTURE(instance);
        CHECK(fast == naive);
    }
}

TEST_CASE("dense and sparse key graphs agree") {
    rng::SplitMix64 gen(41);
    for (int instance = 0; instance < 50; ++instance) {
        const SchemeParams params = random_params(gen);
        const auto rings = sample_key_rings(params, gen);
        const auto dense = build_key_graph(rings, params.q, Storage::dense);
        const auto sparse = build_key_graph(rings, params.q, Storage::sparse);
        CHECK(dense == sparse);
        CHECK(dense.is_dense());
        CHECK_FALSE(sparse.is_dense());
    }
}

TEST_CASE("key graph with a pool too large for counting sort") {
    // Pools beyond the counting-sort cutoff group (key, node) pairs by
    // sorting instead; the naive path is the oracle either way.
    rng::SplitMix64 gen(13);
    const SchemeParams params{40, 3, 5000000, 1, 1.0};
    const auto rings = sample_key_rings(params, gen);
    rings.validate(5000000);
    CHECK(build_key_graph(rings, 1) == build_key_graph_naive(rings, 1));
    CHECK(build_key_graph(rings, 1, Storage::sparse) ==
          build_key_graph_naive(rings, 1, Storage::sparse));
}

TEST_CASE("channel graph edge cases") {
    const auto complete = sample_channel_graph(3, 1.0, 5);
    CHECK(complete.edge_count() == 3);

    // Fixed pair frequency over many two-node samples, direct path.
    std::uint64_t on = 0;
    const int trials = 100000;
    for (int t = 0; t < trials; ++t) on += sample_channel_graph(2, 0.7, t).contains(0, 1);
    double sigma = std::sqrt(0.7 * 0.3 / trials);
    CHECK(std::abs(static_cast<double>(on) / trials - 0.7) <= 4.0 * sigma);

    // Geometric-skip path (p < 0.1).
    on = 0;
    for (int t = 0; t < trials; ++t) on += sample_channel_graph(2, 0.05, t).contains(0, 1);
    sigma = std::sqrt(0.05 * 0.95 / trials);
    CHECK(std::abs(static_cast<double>(on) / trials - 0.05) <= 4.0 * sigma);

    CHECK_THROWS_AS(sample_channel_graph(4, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_channel_graph(4, 1.5, 1), std::invalid_argument);
}

TEST_CASE("channel graph storage modes sample identical edges") {
    for (double p : {0.5, 0.05, 1.0}) {
        for (std::uint64_t seed : {1ull, 42ull, 900ull}) {
            const auto dense = sample_channel_graph(40, p, seed, Storage::dense);
            const auto sparse = sample_channel_graph(40, p, seed, Storage::sparse);
            CAPTURE(p);
            CHECK(dense == sparse);
        }
    }
}

TEST_CASE("compose identities") {
    rng::SplitMix64 gen(8);
    const SchemeParams params{30, 4, 12, 1, 1.0};
    const auto rings = sample_key_rings(params, gen);
    const auto key = build_key_graph(rings, 2);
    const auto channel = sample_channel_graph(30, 0.4, 17);
    const auto complete = sample_channel_graph(30, 1.0, 1);
    const auto empty = PairRelation::make(30);

    CHECK(compose(key, complete).edges == key);     // complete channel keeps the key layer
    CHECK(compose(empty, channel).edges == empty);  // empty key layer wins
    CHECK(compose(complete, channel).edges == channel);

    // Commutative and idempotent.
    CHECK(compose(key, channel).edges == compose(channel, key).edges);
    CHECK(compose(key, key).edges == key);

    const auto mismatched = PairRelation::make(29);
    CHECK_THROWS_AS(intersect_relations(key, mismatched), std::invalid_argument);

    // Retained layers satisfy edge(i,j) == key(i,j) && channel(i,j).
    const auto graph = compose(key, channel, true);
    REQUIRE(graph.key_layer.has_value());
    REQUIRE(graph.channel_layer.has_value());
    for (std::uint32_t i = 0; i < 30; ++i) {
        for (std::uint32_t j = i + 1; j < 30; ++j) {
            CHECK(graph.edges.contains(i, j) ==
                  (graph.key_layer->contains(i, j) && graph.channel_layer->contains(i, j)));
        }
    }
}

TEST_CASE("mixed storage intersection normalizes") {
    const auto dense = sample_channel_graph(20, 0.5, 3, Storage::dense);
    const auto sparse = sample_channel_graph(20, 0.3, 4, Storage::sparse);
    const auto a = intersect_relations(dense, sparse);
    const auto b = intersect_relations(sparse, dense);
    CHECK(a == b);
}

TEST_CASE("degree summary on known graphs") {
    const auto empty = PairRelation::make(5);
    auto summary = degree_summary(empty);
    CHECK(summary.histogram == std::vector<std::uint64_t>{5});
    CHECK(summary.min_degree == 0);
    CHECK(summary.edge_count == 0);

    const auto complete = sample_channel_graph(5, 1.0, 1);
    summary = degree_summary(complete);
    CHECK(summary.count_at(4) == 5);
    CHECK(summary.min_degree == 4);
    CHECK(summary.edge_count == 10);

    const auto path = relation_from_edges(3, Storage::dense, {{0, 1}, {1, 2}});
    summary = degree_summary(path);
    CHECK(summary.count_at(1) == 2);
    CHECK(summary.count_at(2) == 1);
    CHECK(summary.min_degree == 1);
    CHECK(summary.edge_count == 2);
}

TEST_CASE("degree summary handshake holds on random graphs") {
    rng::SplitMix64 gen(123);
    for (int instance = 0; instance < 200; ++instance) {
        const std::uint32_t n = 2 + gen.bounded(60);
        const double p = 0.02 + 0.9 * (gen.next_unit_open());
        const auto storage = instance % 2 == 0 ? Storage::dense : Storage::sparse;
        const auto rel = sample_channel_graph(n, std::min(p, 1.0), gen.next(), storage);
        const auto summary = degree_summary(rel);  // validate() runs inside
        std::uint64_t weighted = 0;
        for (std::size_t h = 0; h < summary.histogram.size(); ++h) {
            weighted += h * summary.histogram[h];
        }
        CHECK(weighted == 2 * summary.edge_count);
        CHECK(summary.edge_count == rel.edge_count());
    }
}

TEST_CASE("edge list dump format") {
    const auto rel = relation_from_edges(4, Storage::dense, {{0, 2}, {1, 3}});
    std::ostringstream os;
    dump_edge_list(os, rel, "composite");
    CHECK(os.str() == "n=4 layer=composite\n0 2\n1 3\n");
}

TEST_CASE("composite edge frequency at a fixed pair tracks p_eq") {
    // Two-node graphs: each trial is one independent Bernoulli(p_eq) draw.
    const SchemeParams params{2, 6, 100, 2, 0.5};
    const double p_eq = analytic::edge_probabilities(params).p_eq;
    const int trials = 20000;
    std::uint64_t hits = 0;
    Scratch scratch;
    for (int t = 0; t < trials; ++t) {
        rng::SplitMix64 gen(rng::derive_seed(555, t));
        const auto rings = sample_key_rings(params, gen, &scratch);
        const auto key = build_key_graph(rings, params.q, Storage::automatic, &scratch);
        const auto channel = sample_channel_graph(2, params.p, rng::derive_seed(999, t));
        hits += compose(key, channel).edges.contains(0, 1);
    }
    const double freq = static_cast<double>(hits) / trials;
    const double sigma = std::sqrt(p_eq * (1 - p_eq) / trials);
    CHECK(std::abs(freq - p_eq) <= 4.0 * sigma);
}
