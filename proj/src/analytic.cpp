#include "keygraph/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace keygraph::analytic {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// 0! .. 20! are exact in doubles; taking log of the exact value beats
// lgamma by a few ulps, which matters for the 1e-12 oracle comparisons.
constexpr double kFactorial[21] = {
    1.0,
    1.0,
    2.0,
    6.0,
    24.0,
    120.0,
    720.0,
    5040.0,
    40320.0,
    362880.0,
    3628800.0,
    39916800.0,
    479001600.0,
    6227020800.0,
    87178291200.0,
    1307674368000.0,
    20922789888000.0,
    355687428096000.0,
    6402373705728000.0,
    121645100408832000.0,
    2432902008176640000.0,
};

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

}  // namespace

double log_factorial(std::int64_t n) {
    require(n >= 0, "factorial argument must be non-negative");
    if (n <= 20) return std::log(kFactorial[n]);
    return std::lgamma(static_cast<double>(n) + 1.0);
}

double log_binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n) return kNegInf;
    k = std::min(k, n - k);
    if (n <= 20) return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
    if (k <= 4096) {
        // Compensated sum of log(n-i). Differences of lgamma values lose
        // absolute precision once lgamma reaches 1e9; this path keeps the
        // log accurate to ~1e-12 even at pool sizes in the hundreds of
        // millions.
        double sum = 0.0;
        double carry = 0.0;
        for (std::int64_t i = 0; i < k; ++i) {
            const double term = std::log(static_cast<double>(n - i)) - carry;
            const double next = sum + term;
            carry = (next - sum) - term;
            sum = next;
        }
        return sum - log_factorial(k);
    }
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double overlap_pmf(std::int64_t keys, std::int64_t pool, std::int64_t u) {
    require(keys >= 1 && keys <= pool,
            "keys must satisfy 1 <= K <= P (got K=" + std::to_string(keys) +
                ", P=" + std::to_string(pool) + ")");
    const std::int64_t lo = std::max<std::int64_t>(0, 2 * keys - pool);
    if (u < lo || u > keys) return 0.0;
    const double log_mass = log_binomial(keys, u) + log_binomial(pool - keys, keys - u) -
                            log_binomial(pool, keys);
    return std::exp(log_mass);
}

double p_sq_exact(std::int64_t keys, std::int64_t pool, std::int64_t q) {
    require(q >= 1, "q must be >= 1 (got q=" + std::to_string(q) + ")");
    require(keys >= 1 && keys <= pool,
            "keys must satisfy 1 <= K <= P (got K=" + std::to_string(keys) +
                ", P=" + std::to_string(pool) + ")");
    if (q > keys) return 0.0;

    // Terms span many orders of magnitude; Kahan accumulation in
    // increasing-u order keeps the small leading terms from washing out.
    double sum = 0.0;
    double carry = 0.0;
    for (std::int64_t u = q; u <= keys; ++u) {
        const double term = overlap_pmf(keys, pool, u) - carry;
        const double next = sum + term;
        carry = (next - sum) - term;
        sum = next;
    }
    return std::clamp(sum, 0.0, 1.0);
}

double p_sq_asymptotic(std::int64_t keys, std::int64_t pool, std::int64_t q) {
    require(keys >= 1, "keys must be >= 1");
    require(pool >= 1, "pool must be >= 1");
    require(q >= 1, "q must be >= 1");
    const double ratio = static_cast<double>(keys) * static_cast<double>(keys) /
                         static_cast<double>(pool);
    if (q <= 20) return std::pow(ratio, static_cast<double>(q)) / kFactorial[q];
    return std::exp(static_cast<double>(q) * std::log(ratio) - log_factorial(q));
}

EdgeProbabilities edge_probabilities(const SchemeParams& params) {
    params.validate();
    EdgeProbabilities out;
    out.p_sq = p_sq_exact(params.keys, params.pool, params.q);
    out.p_eq = params.p * out.p_sq;
    return out;
}

PoissonModel lambda_nh(std::int64_t n, double p_eq, std::int64_t h) {
    require(n >= 2, "n must be >= 2");
    require(h >= 0, "h must be >= 0");
    require(p_eq >= 0.0 && p_eq <= 1.0, "p_eq must lie in [0,1]");
    PoissonModel model;
    model.h = h;
    const double nd = static_cast<double>(n);
    if (p_eq == 0.0) {
        model.lambda = h == 0 ? nd : 0.0;
        return model;
    }
    const double mean_degree = nd * p_eq;
    model.lambda = std::exp(std::log(nd) + static_cast<double>(h) * std::log(mean_degree) -
                            mean_degree - log_factorial(h));
    return model;
}

double poisson_pmf(double lambda, std::int64_t i) {
    require(lambda >= 0.0, "lambda must be >= 0");
    require(i >= 0, "i must be >= 0");
    if (lambda == 0.0) return i == 0 ? 1.0 : 0.0;
    return std::exp(-lambda + static_cast<double>(i) * std::log(lambda) - log_factorial(i));
}

ScalingDecomposition beta_of(std::int64_t n, std::int64_t k, double p_eq) {
    require(n >= 3, "n must be >= 3 so ln ln n is positive");
    require(k >= 1, "k must be >= 1");
    const double log_n = std::log(static_cast<double>(n));
    const double log_log_n = std::log(log_n);
    ScalingDecomposition out;
    out.k = k;
    out.beta = static_cast<double>(n) * p_eq - log_n -
               static_cast<double>(k - 1) * log_log_n;
    out.outside_admissible_window = std::abs(out.beta) >= log_log_n;
    return out;
}

double min_degree_limit_prob(std::int64_t k, double beta) {
    require(k >= 1, "k must be >= 1");
    return std::exp(-std::exp(-beta - log_factorial(k - 1)));
}

MinDegreeSplit min_degree_split_prob(std::int64_t ell, double alpha_star) {
    MinDegreeSplit split;
    if (ell <= 0) {
        // Below the threshold window the minimum degree is 0 outright.
        split.delta_hi = 0;
        split.delta_lo = 0;
        split.prob_hi = 1.0;
        split.prob_lo = 0.0;
        return split;
    }
    split.delta_hi = ell;
    split.delta_lo = ell - 1;
    split.prob_hi = min_degree_limit_prob(ell, alpha_star);
    split.prob_lo = 1.0 - split.prob_hi;
    return split;
}

}  // namespace keygraph::analytic
