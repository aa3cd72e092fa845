#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "keygraph/analytic.hpp"
#include "keygraph/params.hpp"
#include "keygraph/simulate.hpp"

// Result serialization: stable CSV schemas and the versioned JSON summary.
// All floating-point output goes through format_double (10 significant
// digits, '.' decimal separator, locale-independent) so repeated runs with
// the same seed produce byte-identical files.

namespace keygraph::report {

std::string format_double(double v);

struct AnalyticReport {
    SchemeParams params;
    double p_sq_exact = 0.0;
    double p_sq_asymptotic = 0.0;
    double asymptotic_ratio = 0.0;  // exact / asymptotic
    double p_eq = 0.0;

    struct PerDegree {
        std::int64_t h = 0;
        double lambda = 0.0;
    };
    struct PerMinDegree {
        std::int64_t k = 0;
        double beta = 0.0;
        bool outside_admissible_window = false;
        double limit_prob = 0.0;
    };
    std::vector<PerDegree> degrees;
    std::vector<PerMinDegree> min_degrees;
};

AnalyticReport make_analytic_report(const SchemeParams& params,
                                    const std::vector<std::int64_t>& degree_targets,
                                    const std::vector<std::int64_t>& min_degree_targets);

void print_analytic_report(std::ostream& os, const AnalyticReport& report);
nlohmann::json analytic_report_json(const AnalyticReport& report);

/// Pairing of one experiment's empirical aggregates with the analytic
/// predictions for the same configuration.
struct ComparedResult {
    sim::ExperimentConfig config;
    sim::AggregateResult aggregate;
    AnalyticReport analytic;

    struct DegreeComparison {
        std::int64_t h = 0;
        double lambda = 0.0;
        double tv_distance = 0.0;
    };
    struct MinDegreeComparison {
        std::int64_t k = 0;
        double beta = 0.0;
        double analytic_prob = 0.0;
        double empirical_prob = 0.0;
        double ci_lo = 0.0;
        double ci_hi = 1.0;
        double abs_deviation = 0.0;
    };
    std::vector<DegreeComparison> degree_comparisons;
    std::vector<MinDegreeComparison> min_degree_comparisons;
};

ComparedResult compare(const sim::ExperimentConfig& config,
                       const sim::AggregateResult& aggregate);

/// Columns: h,M,empirical_prob,poisson_prob. Rows cover M = 0..support for
/// each tracked h, where the support spans both the observed counts and the
/// bulk of the Poisson curve.
void write_empirical_csv(std::ostream& os, const ComparedResult& result);

/// Columns: name,param,value; one row per analytic quantity.
void write_analytic_csv(std::ostream& os, const AnalyticReport& report);

/// Columns: K,p_sq,p_eq,k,beta,analytic_prob,empirical_prob,ci_lo,ci_hi.
void write_sweep_csv(std::ostream& os, const std::vector<ComparedResult>& results);

struct RunManifest {
    std::string command;
    std::uint64_t master_seed = 0;
    unsigned threads = 0;
    std::string kernels;
    double duration_seconds = 0.0;
    std::vector<std::string> outputs;
};

nlohmann::json config_json(const sim::ExperimentConfig& config);

/// schema_version 1.
nlohmann::json summary_json(const RunManifest& manifest,
                            const std::vector<ComparedResult>& results);

}  // namespace keygraph::report
