#include "keygraph/report.hpp"

#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "keygraph/stats.hpp"
#include "keygraph/version.hpp"

namespace keygraph::report {

std::string format_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

AnalyticReport make_analytic_report(const SchemeParams& params,
                                    const std::vector<std::int64_t>& degree_targets,
                                    const std::vector<std::int64_t>& min_degree_targets) {
    params.validate();
    AnalyticReport report;
    report.params = params;
    report.p_sq_exact = analytic::p_sq_exact(params.keys, params.pool, params.q);
    report.p_sq_asymptotic = analytic::p_sq_asymptotic(params.keys, params.pool, params.q);
    report.asymptotic_ratio =
        report.p_sq_asymptotic > 0.0 ? report.p_sq_exact / report.p_sq_asymptotic : 0.0;
    report.p_eq = params.p * report.p_sq_exact;

    for (std::int64_t h : degree_targets) {
        const auto model = analytic::lambda_nh(params.n, report.p_eq, h);
        report.degrees.push_back({h, model.lambda});
    }
    for (std::int64_t k : min_degree_targets) {
        const auto decomp = analytic::beta_of(params.n, k, report.p_eq);
        report.min_degrees.push_back({k, decomp.beta, decomp.outside_admissible_window,
                                      analytic::min_degree_limit_prob(k, decomp.beta)});
    }
    return report;
}

void print_analytic_report(std::ostream& os, const AnalyticReport& report) {
    const auto& p = report.params;
    os << "configuration: n=" << p.n << " K=" << p.keys << " P=" << p.pool << " q=" << p.q
       << " p=" << format_double(p.p) << '\n';
    os << "p_sq (exact)      = " << format_double(report.p_sq_exact) << '\n';
    os << "p_sq (asymptotic) = " << format_double(report.p_sq_asymptotic) << '\n';
    os << "exact/asymptotic  = " << format_double(report.asymptotic_ratio) << '\n';
    os << "p_eq              = " << format_double(report.p_eq) << '\n';
    for (const auto& d : report.degrees) {
        os << "lambda[h=" << d.h << "]       = " << format_double(d.lambda) << '\n';
    }
    for (const auto& m : report.min_degrees) {
        os << "k=" << m.k << ": beta = " << format_double(m.beta)
           << ", limit P[min degree >= " << m.k << "] = " << format_double(m.limit_prob);
        if (m.outside_admissible_window) os << "  [outside admissible window]";
        os << '\n';
    }
}

nlohmann::json analytic_report_json(const AnalyticReport& report) {
    nlohmann::json j;
    const auto& p = report.params;
    j["params"] = {{"n", p.n}, {"keys", p.keys}, {"pool", p.pool}, {"q", p.q}, {"p", p.p}};
    j["p_sq_exact"] = report.p_sq_exact;
    j["p_sq_asymptotic"] = report.p_sq_asymptotic;
    j["asymptotic_ratio"] = report.asymptotic_ratio;
    j["p_eq"] = report.p_eq;
    j["degrees"] = nlohmann::json::array();
    for (const auto& d : report.degrees) {
        j["degrees"].push_back({{"h", d.h}, {"lambda", d.lambda}});
    }
    j["min_degrees"] = nlohmann::json::array();
    for (const auto& m : report.min_degrees) {
        j["min_degrees"].push_back({{"k", m.k},
                                    {"beta", m.beta},
                                    {"outside_admissible_window", m.outside_admissible_window},
                                    {"limit_prob", m.limit_prob}});
    }
    return j;
}

ComparedResult compare(const sim::ExperimentConfig& config,
                       const sim::AggregateResult& aggregate) {
    ComparedResult out;
    out.config = config;
    out.aggregate = aggregate;
    out.analytic =
        make_analytic_report(config.params, config.degree_targets, config.min_degree_targets);

    for (const auto& d : out.analytic.degrees) {
        const auto it = aggregate.degree_count_dist.find(d.h);
        if (it == aggregate.degree_count_dist.end()) continue;
        const auto& empirical = it->second;
        const std::size_t support = empirical.size() > 0 ? empirical.size() - 1 : 0;
        const auto poisson = stats::poisson_distribution(d.lambda, support);
        out.degree_comparisons.push_back(
            {d.h, d.lambda, stats::total_variation(empirical, poisson)});
    }
    for (const auto& m : out.analytic.min_degrees) {
        for (const auto& stat : aggregate.min_degree) {
            if (stat.k != m.k) continue;
            ComparedResult::MinDegreeComparison cmp;
            cmp.k = m.k;
            cmp.beta = m.beta;
            cmp.analytic_prob = m.limit_prob;
            cmp.empirical_prob = stat.prob;
            cmp.ci_lo = stat.ci_lo;
            cmp.ci_hi = stat.ci_hi;
            cmp.abs_deviation = std::abs(stat.prob - m.limit_prob);
            out.min_degree_comparisons.push_back(cmp);
        }
    }
    return out;
}

void write_empirical_csv(std::ostream& os, const ComparedResult& result) {
    os << "h,M,empirical_prob,poisson_prob\n";
    for (const auto& d : result.analytic.degrees) {
        const auto it = result.aggregate.degree_count_dist.find(d.h);
        if (it == result.aggregate.degree_count_dist.end()) continue;
        const auto& empirical = it->second;
        // Cover both the observed counts and the analytic curve's bulk.
        const auto poisson_reach = static_cast<std::size_t>(
            std::ceil(d.lambda + 6.0 * std::sqrt(d.lambda) + 10.0));
        const std::size_t support = std::max(empirical.size(), poisson_reach + 1);
        for (std::size_t m = 0; m < support; ++m) {
            os << d.h << ',' << m << ',' << format_double(empirical.mass(m)) << ','
               << format_double(analytic::poisson_pmf(d.lambda, static_cast<std::int64_t>(m)))
               << '\n';
        }
    }
}

void write_analytic_csv(std::ostream& os, const AnalyticReport& report) {
    os << "name,param,value\n";
    os << "p_sq_exact,," << format_double(report.p_sq_exact) << '\n';
    os << "p_sq_asymptotic,," << format_double(report.p_sq_asymptotic) << '\n';
    os << "asymptotic_ratio,," << format_double(report.asymptotic_ratio) << '\n';
    os << "p_eq,," << format_double(report.p_eq) << '\n';
    for (const auto& d : report.degrees) {
        os << "lambda," << d.h << ',' << format_double(d.lambda) << '\n';
    }
    for (const auto& m : report.min_degrees) {
        os << "beta," << m.k << ',' << format_double(m.beta) << '\n';
        os << "min_degree_prob," << m.k << ',' << format_double(m.limit_prob) << '\n';
    }
}

void write_sweep_csv(std::ostream& os, const std::vector<ComparedResult>& results) {
    os << "K,p_sq,p_eq,k,beta,analytic_prob,empirical_prob,ci_lo,ci_hi\n";
    for (const auto& result : results) {
        for (const auto& cmp : result.min_degree_comparisons) {
            os << result.config.params.keys << ',' << format_double(result.analytic.p_sq_exact)
               << ',' << format_double(result.analytic.p_eq) << ',' << cmp.k << ','
               << format_double(cmp.beta) << ',' << format_double(cmp.analytic_prob) << ','
               << format_double(cmp.empirical_prob) << ',' << format_double(cmp.ci_lo) << ','
               << format_double(cmp.ci_hi) << '\n';
        }
    }
}

nlohmann::json config_json(const sim::ExperimentConfig& config) {
    const auto& p = config.params;
    return {{"n", p.n},
            {"keys", p.keys},
            {"pool", p.pool},
            {"q", p.q},
            {"p", p.p},
            {"trials", config.trials},
            {"master_seed", config.master_seed},
            {"degree_targets", config.degree_targets},
            {"min_degree_targets", config.min_degree_targets}};
}

nlohmann::json summary_json(const RunManifest& manifest,
                            const std::vector<ComparedResult>& results) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["command"] = manifest.command;
    j["artifact_version"] = kVersion;
    j["master_seed"] = manifest.master_seed;
    j["threads"] = manifest.threads;
    j["kernels"] = manifest.kernels;
    j["duration_seconds"] = manifest.duration_seconds;
    j["outputs"] = manifest.outputs;
    j["results"] = nlohmann::json::array();
    for (const auto& result : results) {
        nlohmann::json r;
        r["config"] = config_json(result.config);
        r["p_sq"] = result.analytic.p_sq_exact;
        r["p_eq"] = result.analytic.p_eq;
        r["mean_edge_count"] = result.aggregate.mean_edge_count;
        const double n = static_cast<double>(result.config.params.n);
        r["expected_edge_count"] = n * (n - 1.0) / 2.0 * result.analytic.p_eq;
        r["degree_counts"] = nlohmann::json::array();
        for (const auto& cmp : result.degree_comparisons) {
            r["degree_counts"].push_back(
                {{"h", cmp.h}, {"lambda", cmp.lambda}, {"tv_distance", cmp.tv_distance}});
        }
        r["min_degree"] = nlohmann::json::array();
        for (const auto& cmp : result.min_degree_comparisons) {
            r["min_degree"].push_back({{"k", cmp.k},
                                       {"beta", cmp.beta},
                                       {"analytic_prob", cmp.analytic_prob},
                                       {"empirical_prob", cmp.empirical_prob},
                                       {"ci_lo", cmp.ci_lo},
                                       {"ci_hi", cmp.ci_hi},
                                       {"abs_deviation", cmp.abs_deviation}});
        }
        j["results"].push_back(std::move(r));
    }
    return j;
}

}  // namespace keygraph::report
