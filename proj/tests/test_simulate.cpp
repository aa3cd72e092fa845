#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <vector>

#include "keygraph/analytic.hpp"
#include "keygraph/simulate.hpp"

using namespace keygraph;

namespace {

bool aggregates_equal(const sim::AggregateResult& a, const sim::AggregateResult& b) {
    if (a.trials != b.trials || a.mean_edge_count != b.mean_edge_count) return false;
    if (a.degree_count_dist.size() != b.degree_count_dist.size()) return false;
    for (const auto& [h, dist] : a.degree_count_dist) {
        const auto it = b.degree_count_dist.find(h);
        if (it == b.degree_count_dist.end()) return false;
        if (dist.masses() != it->second.masses()) return false;
    }
    if (a.min_degree.size() != b.min_degree.size()) return false;
    for (std::size_t i = 0; i < a.min_degree.size(); ++i) {
        const auto& x = a.min_degree[i];
        const auto& y = b.min_degree[i];
        if (x.k != y.k || x.trials_at_least_k != y.trials_at_least_k || x.prob != y.prob ||
            x.ci_lo != y.ci_lo || x.ci_hi != y.ci_hi) {
            return false;
        }
    }
    return true;
}

sim::ExperimentConfig small_config() {
    sim::ExperimentConfig config;
    config.params = {50, 5, 40, 2, 0.6};
    config.trials = 200;
    config.master_seed = 77;
    config.degree_targets = {0, 1, 2};
    config.min_degree_targets = {1, 2, 3};
    return config;
}

}  // namespace

TEST_CASE("run_trial degenerate configurations") {
    // K = P with q = 1 and p = 1: every pair shares all keys, complete graph.
    const SchemeParams complete{6, 3, 3, 1, 1.0};
    const auto summary = sim::run_trial(complete, 42);
    CHECK(summary.min_degree == 5);
    CHECK(summary.edge_count == 15);
    CHECK(summary.count_at(5) == 6);

    // q > K: no pair can qualify, empty graph.
    const SchemeParams empty{6, 3, 10, 4, 1.0};
    const auto none = sim::run_trial(empty, 42);
    CHECK(none.min_degree == 0);
    CHECK(none.edge_count == 0);
    CHECK(none.count_at(0) == 6);
}

TEST_CASE("run_trial is deterministic in (params, seed)") {
    const SchemeParams params{80, 6, 50, 2, 0.5};
    const auto a = sim::run_trial(params, 1234);
    const auto b = sim::run_trial(params, 1234);
    CHECK(a.histogram == b.histogram);
    CHECK(a.edge_count == b.edge_count);
    CHECK(a.min_degree == b.min_degree);

    const auto c = sim::run_trial(params, 1235);
    CHECK((a.histogram != c.histogram || a.edge_count != c.edge_count));
}

TEST_CASE("trial seeds differ") {
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t t = 0; t < 200; ++t) seeds.push_back(sim::trial_seed(9, t));
    std::sort(seeds.begin(), seeds.end());
    CHECK(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
}

TEST_CASE("run_experiment is independent of the worker count") {
    const auto config = small_config();
    sim::RunOptions one;
    one.threads = 1;
    const auto base = sim::run_experiment(config, one);
    for (unsigned threads : {2u, 3u, 7u}) {
        sim::RunOptions opts;
        opts.threads = threads;
        CAPTURE(threads);
        CHECK(aggregates_equal(base, sim::run_experiment(config, opts)));
    }
}

TEST_CASE("single-trial experiment gives point masses") {
    auto config = small_config();
    config.trials = 1;
    const auto result = sim::run_experiment(config);
    for (const auto& [h, dist] : result.degree_count_dist) {
        std::uint64_t ones = 0;
        for (double m : dist.masses()) {
            CHECK((m == 0.0 || m == 1.0));
            ones += m == 1.0;
        }
        CHECK(ones == 1);
    }
}

TEST_CASE("config validation") {
    auto config = small_config();
    config.trials = 0;
    CHECK_THROWS_AS(sim::run_experiment(config), std::invalid_argument);

    config = small_config();
    config.degree_targets.clear();
    CHECK_THROWS_AS(sim::run_experiment(config), std::invalid_argument);

    config = small_config();
    config.min_degree_targets = {2, -1};
    CHECK_THROWS_AS(sim::run_experiment(config), std::invalid_argument);

    // Duplicates and order are canonicalized, not rejected.
    config = small_config();
    config.degree_targets = {2, 0, 2, 1};
    config.validate_and_canonicalize();
    CHECK(config.degree_targets == std::vector<std::int64_t>{0, 1, 2});
}

TEST_CASE("empirical min-degree probabilities are monotone in k") {
    auto config = small_config();
    config.min_degree_targets = {0, 1, 2, 3, 5, 8};
    const auto result = sim::run_experiment(config);
    for (std::size_t i = 1; i < result.min_degree.size(); ++i) {
        CHECK(result.min_degree[i].prob <= result.min_degree[i - 1].prob);
    }
    CHECK(result.min_degree.front().k == 0);
    CHECK(result.min_degree.front().prob == 1.0);  // every graph has min degree >= 0
}

TEST_CASE("mean edge count tracks the analytic edge probability") {
    sim::ExperimentConfig config;
    config.params = {60, 6, 80, 2, 0.5};
    config.trials = 3000;
    config.master_seed = 2718;
    config.degree_targets = {0};
    config.min_degree_targets = {1};

    std::vector<double> edge_counts;
    edge_counts.reserve(config.trials);
    Scratch scratch;
    for (std::uint64_t t = 0; t < config.trials; ++t) {
        edge_counts.push_back(static_cast<double>(
            sim::run_trial(config.params, sim::trial_seed(config.master_seed, t), &scratch)
                .edge_count));
    }
    double mean = 0.0;
    for (double c : edge_counts) mean += c;
    mean /= static_cast<double>(edge_counts.size());
    double var = 0.0;
    for (double c : edge_counts) var += (c - mean) * (c - mean);
    var /= static_cast<double>(edge_counts.size() - 1);
    const double stderr_mean = std::sqrt(var / static_cast<double>(edge_counts.size()));

    const double n = static_cast<double>(config.params.n);
    const double expected =
        n * (n - 1.0) / 2.0 * analytic::edge_probabilities(config.params).p_eq;
    CHECK(std::abs(mean - expected) <= 5.0 * stderr_mean);

    // The aggregate reports the same mean.
    const auto result = sim::run_experiment(config);
    CHECK(result.mean_edge_count == doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("mean count of isolated nodes matches the Poisson mean at full scale") {
    // Configuration with n * p_eq near ln n, where lambda_{n,0} is near 1.
    sim::ExperimentConfig config;
    config.params = {2000, 33, 10000, 2, 0.7266};
    config.trials = 2000;
    config.master_seed = 31415;
    config.degree_targets = {0};
    config.min_degree_targets = {1};

    const double p_eq = analytic::edge_probabilities(config.params).p_eq;
    const double lambda0 = analytic::lambda_nh(config.params.n, p_eq, 0).lambda;

    const auto result = sim::run_experiment(config);
    const auto& dist = result.degree_count_dist.at(0);
    const double mean = dist.mean();
    // Sample standard error of the mean from the empirical distribution.
    double var = 0.0;
    for (std::size_t m = 0; m < dist.size(); ++m) {
        var += dist.mass(m) * (static_cast<double>(m) - mean) * (static_cast<double>(m) - mean);
    }
    const double stderr_mean = std::sqrt(var / static_cast<double>(config.trials));
    CHECK(std::abs(mean - lambda0) <= 5.0 * stderr_mean);
}

TEST_CASE("sweep basics") {
    CHECK_THROWS_AS(sim::sweep({}), std::invalid_argument);

    const auto config = small_config();
    const auto single = sim::sweep({config});
    REQUIRE(single.size() == 1);
    CHECK(aggregates_equal(single[0], sim::run_experiment(config)));

    // Edge probability grows strictly with K across a sweep range.
    double prev = -1.0;
    for (std::int64_t keys = 29; keys <= 36; ++keys) {
        const double p_eq =
            analytic::edge_probabilities({2000, keys, 10000, 2, 0.8}).p_eq;
        CHECK(p_eq > prev);
        prev = p_eq;
    }
}

TEST_CASE("graph sink sees every trial with layers retained") {
    auto config = small_config();
    config.trials = 25;
    std::atomic<std::uint64_t> seen{0};
    std::atomic<bool> layers_ok{true};
    sim::RunOptions opts;
    opts.threads = 2;
    opts.graph_sink = [&](std::uint64_t, const CompositeGraph& graph) {
        ++seen;
        if (!graph.key_layer || !graph.channel_layer) {
            layers_ok = false;
            return;
        }
        const auto recomposed =
            intersect_relations(*graph.key_layer, *graph.channel_layer);
        if (!(recomposed == graph.edges)) layers_ok = false;
    };
    sim::run_experiment(config, opts);
    CHECK(seen == 25);
    CHECK(layers_ok);
}
