#pragma once

#include <cstdint>
#include <vector>

namespace keygraph::stats {

/// Probability masses over the contiguous integer support 0..size-1.
class DiscreteDistribution {
  public:
    DiscreteDistribution() = default;

    /// Validates: masses non-negative, total within 1e-12 of 1.
    static DiscreteDistribution from_masses(std::vector<double> masses);

    /// Normalizes raw counts by `total` (defaults to their sum).
    static DiscreteDistribution from_counts(const std::vector<std::uint64_t>& counts,
                                            std::uint64_t total = 0);

    std::size_t size() const { return masses_.size(); }
    double mass(std::size_t i) const { return i < masses_.size() ? masses_[i] : 0.0; }
    const std::vector<double>& masses() const { return masses_; }
    double mean() const;

  private:
    std::vector<double> masses_;
};

/// (1/2) sum_i |a_i - b_i|, the shorter support zero-padded.
double total_variation(const DiscreteDistribution& a, const DiscreteDistribution& b);

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

/// Two-sided Wilson score interval for a binomial proportion.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials,
                         double confidence);

/// Quantile of the standard normal; rational approximation refined with one
/// Halley step against erfc, good to ~1e-14.
double normal_quantile(double prob);

/// Poisson(lambda) truncated to 0..support_max and renormalized; the support
/// is extended automatically until the truncated tail mass is below 1e-9.
DiscreteDistribution poisson_distribution(double lambda, std::size_t support_max);

}  // namespace keygraph::stats
