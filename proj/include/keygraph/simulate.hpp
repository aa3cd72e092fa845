#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "keygraph/graph.hpp"
#include "keygraph/params.hpp"
#include "keygraph/stats.hpp"

// Deterministic Monte Carlo harness. Trials are pure functions of
// (params, trial seed); per-trial seeds come from a counter-based derivation
// off the master seed, and aggregation folds summaries in trial-index order.
// Results are therefore bit-identical for any worker count.

namespace keygraph::sim {

struct ExperimentConfig {
    SchemeParams params;
    std::uint64_t trials = 2000;
    std::uint64_t master_seed = 1;
    std::vector<std::int64_t> degree_targets;      // h values to track
    std::vector<std::int64_t> min_degree_targets;  // k values to track

    /// Sorts/dedupes target lists, then checks invariants. Throws
    /// std::invalid_argument.
    void validate_and_canonicalize();
};

struct MinDegreeStat {
    std::int64_t k = 0;
    std::uint64_t trials_at_least_k = 0;
    double prob = 0.0;  // empirical P[min degree >= k]
    double ci_lo = 0.0;
    double ci_hi = 1.0;  // Wilson 95%
};

struct AggregateResult {
    std::uint64_t trials = 0;
    double mean_edge_count = 0.0;
    /// For each tracked h: empirical distribution of the number of nodes
    /// with degree h (index = observed count M).
    std::map<std::int64_t, stats::DiscreteDistribution> degree_count_dist;
    std::vector<MinDegreeStat> min_degree;  // ascending k

    /// Distribution normalization and P[delta >= k] monotonicity.
    /// Throws std::logic_error on violation.
    void validate() const;
};

struct RunOptions {
    unsigned threads = 0;  // 0 = hardware concurrency
    /// When set, each trial's graph is rebuilt with layers retained and
    /// handed over (called concurrently from workers, keyed by trial index).
    std::function<void(std::uint64_t trial_index, const CompositeGraph&)> graph_sink;
};

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index);

/// One graph sample, summarized. Identical (params, seed) gives identical
/// output. The summary is validated before returning.
DegreeSummary run_trial(const SchemeParams& params, std::uint64_t seed,
                        Scratch* scratch = nullptr);

AggregateResult run_experiment(const ExperimentConfig& config,
                               const RunOptions& options = {});

/// Runs configs in order, each seeded from its own master_seed.
/// Rejects an empty list.
std::vector<AggregateResult> sweep(const std::vector<ExperimentConfig>& configs,
                                   const RunOptions& options = {});

}  // namespace keygraph::sim
