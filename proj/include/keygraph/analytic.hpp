#pragma once

#include <cstdint>

#include "keygraph/params.hpp"

// Closed-form quantities of the scheme. Everything here is a pure function;
// all combinatorics run in log space so pool sizes in the tens of millions
// are fine.

namespace keygraph::analytic {

/// log(n!): exact table up to 20!, log-gamma beyond.
double log_factorial(std::int64_t n);

/// log C(n, k); -inf when k is outside [0, n].
double log_binomial(std::int64_t n, std::int64_t k);

/// P[|S_a ∩ S_b| = u] for two independent uniform K-subsets of a P-pool:
/// C(K,u) C(P-K,K-u) / C(P,K) on max{0, 2K-P} <= u <= K, else 0.
/// Out-of-range u is legal input; K outside [1, P] is a domain error.
double overlap_pmf(std::int64_t keys, std::int64_t pool, std::int64_t u);

/// P[shared keys >= q] = sum_{u=q}^{K} overlap_pmf. Compensated summation in
/// increasing-u order, clamped to [0,1]. q > K gives 0; q < 1 is a domain
/// error.
double p_sq_exact(std::int64_t keys, std::int64_t pool, std::int64_t q);

/// First-order form (1/q!) (K^2/P)^q. Uncapped; meaningful only while
/// K^2/P is small.
double p_sq_asymptotic(std::int64_t keys, std::int64_t pool, std::int64_t q);

struct EdgeProbabilities {
    double p_sq = 0.0;  // two nodes share >= q keys
    double p_eq = 0.0;  // secure link: p * p_sq
};

EdgeProbabilities edge_probabilities(const SchemeParams& params);

struct PoissonModel {
    std::int64_t h = 0;
    double lambda = 0.0;
};

/// Mean number of degree-h nodes: n (n p_eq)^h e^{-n p_eq} / h!.
PoissonModel lambda_nh(std::int64_t n, double p_eq, std::int64_t h);

/// e^{-lambda} lambda^i / i!.
double poisson_pmf(double lambda, std::int64_t i);

struct ScalingDecomposition {
    std::int64_t k = 0;
    double beta = 0.0;
    // |beta| >= ln ln n: the limit law's admissibility window does not
    // formally cover this point. Diagnostic only, nothing is rejected.
    bool outside_admissible_window = false;
};

/// Residual after writing n p_eq = ln n + (k-1) ln ln n + beta. Exact
/// inversion at finite n; reconstructing p_eq from the result is the
/// identity. Also serves for the (ell, alpha) form, which is identical.
/// Requires n >= 3 so ln ln n is positive.
ScalingDecomposition beta_of(std::int64_t n, std::int64_t k, double p_eq);

/// Limiting P[minimum degree >= k] at residual beta: exp(-e^{-beta}/(k-1)!).
/// Monotone increasing in beta with limits 0 and 1.
double min_degree_limit_prob(std::int64_t k, double beta);

/// Limit law of the minimum degree itself under the (ell, alpha) scaling:
/// mass splits between ell and ell-1. For ell <= 0 the minimum degree is 0
/// with probability one, reported as a point mass.
struct MinDegreeSplit {
    std::int64_t delta_hi = 0;
    std::int64_t delta_lo = 0;
    double prob_hi = 0.0;  // P[delta = delta_hi]
    double prob_lo = 0.0;  // P[delta = delta_lo]
};

MinDegreeSplit min_degree_split_prob(std::int64_t ell, double alpha_star);

}  // namespace keygraph::analytic
