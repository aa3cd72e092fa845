#include "keygraph/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

#include "keygraph/rng.hpp"

namespace keygraph::sim {

namespace {

// Substream tags inside one trial.
constexpr std::uint64_t kRingStream = 0;
constexpr std::uint64_t kChannelStream = 1;

DegreeSummary run_trial_impl(const SchemeParams& params, std::uint64_t seed,
                             Scratch* scratch, bool retain_layers,
                             CompositeGraph* graph_out) {
    rng::SplitMix64 ring_gen(rng::derive_seed(seed, kRingStream));
    const std::uint64_t channel_seed = rng::derive_seed(seed, kChannelStream);

    KeyRingAssignment rings = sample_key_rings(params, ring_gen, scratch);
    PairRelation key_layer = build_key_graph(rings, params.q, Storage::automatic, scratch);
    PairRelation channel_layer = sample_channel_graph(
        static_cast<std::uint32_t>(params.n), params.p, channel_seed, Storage::automatic);

    CompositeGraph graph =
        compose(std::move(key_layer), std::move(channel_layer), retain_layers);
    DegreeSummary summary = degree_summary(graph, scratch);
    if (graph_out != nullptr) *graph_out = std::move(graph);
    return summary;
}

}  // namespace

void ExperimentConfig::validate_and_canonicalize() {
    params.validate();
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    auto canonicalize = [](std::vector<std::int64_t>& v, const char* what) {
        if (v.empty()) {
            throw std::invalid_argument(std::string(what) + " targets must be non-empty");
        }
        for (std::int64_t x : v) {
            if (x < 0) {
                throw std::invalid_argument(std::string(what) +
                                            " targets must be non-negative");
            }
        }
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    canonicalize(degree_targets, "degree");
    canonicalize(min_degree_targets, "min-degree");
}

void AggregateResult::validate() const {
    for (const auto& [h, dist] : degree_count_dist) {
        double sum = 0.0;
        for (double m : dist.masses()) sum += m;
        if (std::abs(sum - 1.0) > 1e-12) {
            throw std::logic_error("empirical distribution not normalized");
        }
    }
    for (std::size_t i = 1; i < min_degree.size(); ++i) {
        if (min_degree[i].prob > min_degree[i - 1].prob) {
            throw std::logic_error("P[min degree >= k] must be non-increasing in k");
        }
    }
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) {
    return rng::derive_seed(master_seed, trial_index);
}

DegreeSummary run_trial(const SchemeParams& params, std::uint64_t seed, Scratch* scratch) {
    params.validate();
    return run_trial_impl(params, seed, scratch, false, nullptr);
}

AggregateResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    ExperimentConfig cfg = config;
    cfg.validate_and_canonicalize();

    const std::uint64_t trials = cfg.trials;
    unsigned threads = options.threads != 0 ? options.threads
                                            : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(
        std::min<std::uint64_t>(threads, trials));

    std::vector<DegreeSummary> summaries(trials);
    auto worker = [&](std::uint64_t begin, std::uint64_t end) {
        Scratch scratch;
        for (std::uint64_t t = begin; t < end; ++t) {
            const std::uint64_t seed = trial_seed(cfg.master_seed, t);
            if (options.graph_sink) {
                CompositeGraph graph;
                summaries[t] = run_trial_impl(cfg.params, seed, &scratch, true, &graph);
                options.graph_sink(t, graph);
            } else {
                summaries[t] = run_trial_impl(cfg.params, seed, &scratch, false, nullptr);
            }
        }
    };

    if (threads <= 1) {
        worker(0, trials);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(threads);
        pool.reserve(threads);
        for (unsigned w = 0; w < threads; ++w) {
            const std::uint64_t begin = trials * w / threads;
            const std::uint64_t end = trials * (w + 1) / threads;
            pool.emplace_back([&, w, begin, end] {
                try {
                    worker(begin, end);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& err : errors) {
            if (err) std::rethrow_exception(err);
        }
    }

    // Deterministic sequential fold in trial-index order.
    AggregateResult result;
    result.trials = trials;

    std::map<std::int64_t, std::vector<std::uint64_t>> tallies;
    for (std::int64_t h : cfg.degree_targets) tallies[h] = {};
    std::vector<std::uint64_t> at_least(cfg.min_degree_targets.size(), 0);
    std::uint64_t edge_total = 0;

    for (std::uint64_t t = 0; t < trials; ++t) {
        const DegreeSummary& summary = summaries[t];
        edge_total += summary.edge_count;
        for (std::int64_t h : cfg.degree_targets) {
            auto& tally = tallies[h];
            const std::uint64_t count = summary.count_at(static_cast<std::size_t>(h));
            if (tally.size() <= count) tally.resize(count + 1, 0);
            ++tally[count];
        }
        for (std::size_t i = 0; i < cfg.min_degree_targets.size(); ++i) {
            if (summary.min_degree >= cfg.min_degree_targets[i]) ++at_least[i];
        }
    }

    for (auto& [h, tally] : tallies) {
        if (tally.empty()) tally.push_back(trials);  // unreachable, but keep the shape
        result.degree_count_dist.emplace(h, stats::DiscreteDistribution::from_counts(tally, trials));
    }
    result.min_degree.reserve(cfg.min_degree_targets.size());
    for (std::size_t i = 0; i < cfg.min_degree_targets.size(); ++i) {
        MinDegreeStat stat;
        stat.k = cfg.min_degree_targets[i];
        stat.trials_at_least_k = at_least[i];
        stat.prob = static_cast<double>(at_least[i]) / static_cast<double>(trials);
        const auto ci = stats::wilson_interval(at_least[i], trials, 0.95);
        stat.ci_lo = ci.lo;
        stat.ci_hi = ci.hi;
        result.min_degree.push_back(stat);
    }
    result.mean_edge_count = static_cast<double>(edge_total) / static_cast<double>(trials);
    result.validate();
    return result;
}

std::vector<AggregateResult> sweep(const std::vector<ExperimentConfig>& configs,
                                   const RunOptions& options) {
    if (configs.empty()) throw std::invalid_argument("sweep needs at least one configuration");
    std::vector<AggregateResult> results;
    results.reserve(configs.size());
    for (const auto& config : configs) {
        results.push_back(run_experiment(config, options));
    }
    return results;
}

}  // namespace keygraph::sim
