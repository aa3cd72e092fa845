// Command-line front end: evaluates the closed-form quantities, runs the
// Monte Carlo experiments, and emits plot-ready CSV plus a JSON summary.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "keygraph/kernels.hpp"
#include "keygraph/report.hpp"
#include "keygraph/rng.hpp"
#include "keygraph/simulate.hpp"
#include "keygraph/version.hpp"

namespace fs = std::filesystem;
using namespace keygraph;

namespace {

struct CommonOpts {
    sim::ExperimentConfig config;
    std::string out_dir;
    std::string threads = "auto";
    bool dump_graphs = false;
    CLI::Option* seed_opt = nullptr;
};

void add_scheme_options(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--n", opts.config.params.n, "Node count");
    cmd->add_option("--keys", opts.config.params.keys, "Keys per node (K)");
    cmd->add_option("--pool", opts.config.params.pool, "Key pool size (P)");
    cmd->add_option("--q", opts.config.params.q, "Minimum shared keys per link");
    cmd->add_option("--p", opts.config.params.p, "Channel on-probability");
    cmd->add_option("--degrees", opts.config.degree_targets, "Degree values h to track")
        ->delimiter(',');
    cmd->add_option("--min-degrees", opts.config.min_degree_targets,
                    "Minimum-degree thresholds k to track")
        ->delimiter(',');
}

void add_run_options(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--trials", opts.config.trials, "Monte Carlo trials");
    opts.seed_opt = cmd->add_option("--seed", opts.config.master_seed, "Master seed");
    cmd->add_option("--out", opts.out_dir, "Output directory")->required();
    cmd->add_option("--threads", opts.threads, "Worker threads (auto|N)");
    cmd->add_flag("--dump-graphs", opts.dump_graphs,
                  "Write per-trial edge lists for all three layers");
}

/// --seed wins; KEYGRAPH_LAB_SEED is the fallback.
void resolve_seed(CommonOpts& opts) {
    if (opts.seed_opt != nullptr && opts.seed_opt->count() > 0) return;
    if (const char* env = std::getenv("KEYGRAPH_LAB_SEED")) {
        opts.config.master_seed = std::strtoull(env, nullptr, 10);
    }
}

unsigned parse_threads(const std::string& value) {
    if (value == "auto") return 0;
    const unsigned long parsed = std::stoul(value);
    if (parsed == 0) throw CLI::ValidationError("--threads", "must be 'auto' or a positive count");
    return static_cast<unsigned>(parsed);
}

/// Tracks every file written by one command so a failure can remove the
/// partial outputs, and so the manifest lists exactly what was emitted.
class OutputSet {
  public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

    std::ofstream open(const std::string& name) {
        const fs::path path = dir_ / name;
        {
            std::lock_guard<std::mutex> lock(mutex_);
            written_.push_back(path);
        }
        std::ofstream os(path, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open output file: " + path.string());
        return os;
    }

    void discard_all() {
        std::lock_guard<std::mutex> lock(mutex_);
        for (const auto& path : written_) {
            std::error_code ec;
            fs::remove(path, ec);
        }
        written_.clear();
    }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        out.reserve(written_.size());
        for (const auto& path : written_) out.push_back(path.filename().string());
        return out;
    }

    const fs::path& dir() const { return dir_; }

  private:
    fs::path dir_;
    mutable std::mutex mutex_;
    std::vector<fs::path> written_;
};

void write_checked(std::ofstream os, const fs::path& dir, const std::string& name) {
    os.flush();
    if (!os) throw std::runtime_error("failed writing " + (dir / name).string());
}

report::RunManifest make_manifest(const std::string& command, const CommonOpts& opts,
                                  unsigned threads, double seconds, OutputSet& outputs) {
    report::RunManifest manifest;
    manifest.command = command;
    manifest.master_seed = opts.config.master_seed;
    manifest.threads = threads;
    manifest.kernels = kernels::active_ops().name;
    manifest.duration_seconds = seconds;
    manifest.outputs = outputs.names();
    return manifest;
}

sim::RunOptions make_run_options(const CommonOpts& opts, unsigned threads, OutputSet* outputs) {
    sim::RunOptions run;
    run.threads = threads;
    if (opts.dump_graphs && outputs != nullptr) {
        run.graph_sink = [outputs](std::uint64_t trial, const CompositeGraph& graph) {
            char prefix[32];
            std::snprintf(prefix, sizeof prefix, "trial_%06llu",
                          static_cast<unsigned long long>(trial));
            auto dump = [&](const PairRelation& rel, const char* layer) {
                auto os = outputs->open(std::string(prefix) + "." + layer + ".edges");
                dump_edge_list(os, rel, layer);
                write_checked(std::move(os), outputs->dir(), std::string(prefix) + layer);
            };
            dump(graph.edges, "composite");
            if (graph.key_layer) dump(*graph.key_layer, "key");
            if (graph.channel_layer) dump(*graph.channel_layer, "channel");
        };
    }
    return run;
}

void require_min_degrees_positive(const std::vector<std::int64_t>& ks) {
    for (std::int64_t k : ks) {
        if (k < 1) {
            throw CLI::ValidationError("--min-degrees",
                                       "k must be >= 1 for the analytic comparison");
        }
    }
}

int cmd_analytic(const CommonOpts& opts) {
    const auto report = report::make_analytic_report(opts.config.params,
                                                     opts.config.degree_targets,
                                                     opts.config.min_degree_targets);
    report::print_analytic_report(std::cout, report);
    if (!opts.out_dir.empty()) {
        OutputSet outputs{fs::path(opts.out_dir)};
        try {
            auto csv = outputs.open("analytic.csv");
            report::write_analytic_csv(csv, report);
            write_checked(std::move(csv), outputs.dir(), "analytic.csv");

            auto js = outputs.open("analytic.json");
            js << report::analytic_report_json(report).dump(2) << '\n';
            write_checked(std::move(js), outputs.dir(), "analytic.json");
        } catch (...) {
            outputs.discard_all();
            throw;
        }
    }
    return 0;
}

int cmd_simulate(const std::string& command, CommonOpts& opts) {
    resolve_seed(opts);
    require_min_degrees_positive(opts.config.min_degree_targets);
    opts.config.validate_and_canonicalize();
    const unsigned threads = parse_threads(opts.threads);

    OutputSet outputs{fs::path(opts.out_dir)};
    try {
        const auto start = std::chrono::steady_clock::now();
        const auto aggregate =
            sim::run_experiment(opts.config, make_run_options(opts, threads, &outputs));
        const auto result = report::compare(opts.config, aggregate);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        auto empirical = outputs.open("empirical.csv");
        report::write_empirical_csv(empirical, result);
        write_checked(std::move(empirical), outputs.dir(), "empirical.csv");

        auto analytic_csv = outputs.open("analytic.csv");
        report::write_analytic_csv(analytic_csv, result.analytic);
        write_checked(std::move(analytic_csv), outputs.dir(), "analytic.csv");

        auto summary = outputs.open("summary.json");
        const auto manifest = make_manifest(command, opts, threads, seconds, outputs);
        summary << report::summary_json(manifest, {result}).dump(2) << '\n';
        write_checked(std::move(summary), outputs.dir(), "summary.json");

        for (const auto& cmp : result.degree_comparisons) {
            std::cout << "h=" << cmp.h << " lambda=" << report::format_double(cmp.lambda)
                      << " tv_distance=" << report::format_double(cmp.tv_distance) << '\n';
        }
        for (const auto& cmp : result.min_degree_comparisons) {
            std::cout << "k=" << cmp.k << " analytic=" << report::format_double(cmp.analytic_prob)
                      << " empirical=" << report::format_double(cmp.empirical_prob) << '\n';
        }
        std::cout << "wrote " << outputs.names().size() << " file(s) to " << outputs.dir().string()
                  << '\n';
        return 0;
    } catch (...) {
        outputs.discard_all();
        throw;
    }
}

int cmd_sweep(const std::string& command, CommonOpts& opts, std::int64_t keys_from,
              std::int64_t keys_to) {
    resolve_seed(opts);
    require_min_degrees_positive(opts.config.min_degree_targets);
    if (keys_from < 1 || keys_to < keys_from) {
        throw CLI::ValidationError("--keys-from/--keys-to", "need 1 <= from <= to");
    }
    const unsigned threads = parse_threads(opts.threads);

    // Validate the whole range before any trial runs.
    std::vector<sim::ExperimentConfig> configs;
    for (std::int64_t k = keys_from; k <= keys_to; ++k) {
        sim::ExperimentConfig config = opts.config;
        config.params.keys = k;
        config.master_seed = rng::derive_seed(opts.config.master_seed,
                                              static_cast<std::uint64_t>(k));
        config.validate_and_canonicalize();
        configs.push_back(std::move(config));
    }

    OutputSet outputs{fs::path(opts.out_dir)};
    try {
        const auto start = std::chrono::steady_clock::now();
        const auto aggregates = sim::sweep(configs, make_run_options(opts, threads, &outputs));
        std::vector<report::ComparedResult> results;
        results.reserve(configs.size());
        for (std::size_t i = 0; i < configs.size(); ++i) {
            results.push_back(report::compare(configs[i], aggregates[i]));
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        // Sanity on the emitted table: the analytic column must grow with K
        // for each fixed k (edge probability grows with ring size).
        for (const auto& cmp : results.front().min_degree_comparisons) {
            double prev = -1.0;
            for (const auto& result : results) {
                for (const auto& other : result.min_degree_comparisons) {
                    if (other.k != cmp.k) continue;
                    if (other.analytic_prob < prev) {
                        throw std::logic_error("analytic P[min degree >= k] not monotone in K");
                    }
                    prev = other.analytic_prob;
                }
            }
        }

        auto csv = outputs.open("sweep.csv");
        report::write_sweep_csv(csv, results);
        write_checked(std::move(csv), outputs.dir(), "sweep.csv");

        auto summary = outputs.open("summary.json");
        const auto manifest = make_manifest(command, opts, threads, seconds, outputs);
        summary << report::summary_json(manifest, results).dump(2) << '\n';
        write_checked(std::move(summary), outputs.dir(), "summary.json");

        for (const auto& result : results) {
            for (const auto& cmp : result.min_degree_comparisons) {
                std::cout << "K=" << result.config.params.keys << " k=" << cmp.k
                          << " analytic=" << report::format_double(cmp.analytic_prob)
                          << " empirical=" << report::format_double(cmp.empirical_prob) << '\n';
            }
        }
        std::cout << "wrote " << outputs.names().size() << " file(s) to " << outputs.dir().string()
                  << '\n';
        return 0;
    } catch (...) {
        outputs.discard_all();
        throw;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"q-composite key predistribution topology lab"};
    app.set_version_flag("--version", std::string(kVersion));
    app.set_config("--config", "", "Flat key=value config file; command-line flags win");
    app.require_subcommand(1);

    // Defaults are the n=2000, P=10000 experiment family.
    auto defaults = [] {
        CommonOpts opts;
        opts.config.params = {2000, 36, 10000, 2, 0.7};
        opts.config.trials = 2000;
        opts.config.master_seed = 1;
        opts.config.degree_targets = {2, 3};
        opts.config.min_degree_targets = {4, 8};
        return opts;
    };

    CommonOpts analytic_opts = defaults();
    CLI::App* analytic_cmd =
        app.add_subcommand("analytic", "Evaluate the closed-form quantities");
    add_scheme_options(analytic_cmd, analytic_opts);
    analytic_cmd->add_option("--out", analytic_opts.out_dir,
                             "Optional output directory for analytic.{csv,json}");

    CommonOpts simulate_opts = defaults();
    CLI::App* simulate_cmd =
        app.add_subcommand("simulate", "Monte Carlo experiment at one configuration");
    add_scheme_options(simulate_cmd, simulate_opts);
    add_run_options(simulate_cmd, simulate_opts);

    CommonOpts sweep_opts = defaults();
    sweep_opts.config.params.p = 0.8;
    std::int64_t keys_from = 29;
    std::int64_t keys_to = 36;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo sweep over a K range");
    add_scheme_options(sweep_cmd, sweep_opts);
    add_run_options(sweep_cmd, sweep_opts);
    sweep_cmd->add_option("--keys-from", keys_from, "First K of the sweep (inclusive)");
    sweep_cmd->add_option("--keys-to", keys_to, "Last K of the sweep (inclusive)");

    CommonOpts fig1_opts = defaults();
    CLI::App* fig1_cmd = app.add_subcommand(
        "fig1", "Preset: degree-count distributions at n=2000, q=2, P=10000, K=36, p=0.7");
    add_run_options(fig1_cmd, fig1_opts);

    CommonOpts fig2_opts = defaults();
    fig2_opts.config.params.p = 0.8;
    CLI::App* fig2_cmd = app.add_subcommand(
        "fig2", "Preset: min-degree probabilities over K=29..36 at q=2, n=2000, P=10000, p=0.8");
    add_run_options(fig2_cmd, fig2_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (analytic_cmd->parsed()) return cmd_analytic(analytic_opts);
        if (simulate_cmd->parsed()) return cmd_simulate("simulate", simulate_opts);
        if (sweep_cmd->parsed()) return cmd_sweep("sweep", sweep_opts, keys_from, keys_to);
        if (fig1_cmd->parsed()) return cmd_simulate("fig1", fig1_opts);
        if (fig2_cmd->parsed()) return cmd_sweep("fig2", fig2_opts, 29, 36);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
