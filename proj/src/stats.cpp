#include "keygraph/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "keygraph/analytic.hpp"

namespace keygraph::stats {

DiscreteDistribution DiscreteDistribution::from_masses(std::vector<double> masses) {
    if (masses.empty()) throw std::invalid_argument("distribution needs a non-empty support");
    double sum = 0.0;
    for (double m : masses) {
        if (!(m >= 0.0)) throw std::invalid_argument("distribution masses must be >= 0");
        sum += m;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("distribution masses must sum to 1 (got " +
                                    std::to_string(sum) + ")");
    }
    DiscreteDistribution dist;
    dist.masses_ = std::move(masses);
    return dist;
}

DiscreteDistribution DiscreteDistribution::from_counts(
    const std::vector<std::uint64_t>& counts, std::uint64_t total) {
    if (counts.empty()) throw std::invalid_argument("distribution needs a non-empty support");
    if (total == 0) total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    if (total == 0) throw std::invalid_argument("cannot normalize zero counts");
    std::vector<double> masses(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        masses[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    }
    return from_masses(std::move(masses));
}

double DiscreteDistribution::mean() const {
    double mu = 0.0;
    for (std::size_t i = 0; i < masses_.size(); ++i) {
        mu += static_cast<double>(i) * masses_[i];
    }
    return mu;
}

double total_variation(const DiscreteDistribution& a, const DiscreteDistribution& b) {
    const std::size_t support = std::max(a.size(), b.size());
    double l1 = 0.0;
    for (std::size_t i = 0; i < support; ++i) {
        l1 += std::abs(a.mass(i) - b.mass(i));
    }
    return 0.5 * l1;
}

double normal_quantile(double prob) {
    if (!(prob > 0.0) || !(prob < 1.0)) {
        throw std::invalid_argument("normal quantile needs 0 < p < 1");
    }
    // Acklam's rational approximation, then one Halley step against erfc.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (prob < p_low) {
        const double q = std::sqrt(-2.0 * std::log(prob));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (prob <= 1.0 - p_low) {
        const double q = prob - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-prob));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    const double err = 0.5 * std::erfc(-x / std::sqrt(2.0)) - prob;
    const double u = err * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
    return x - u / (1.0 + x * u / 2.0);
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double confidence) {
    if (trials == 0) throw std::invalid_argument("wilson interval needs trials >= 1");
    if (successes > trials) throw std::invalid_argument("successes cannot exceed trials");
    if (!(confidence > 0.0) || !(confidence < 1.0)) {
        throw std::invalid_argument("confidence must lie in (0,1)");
    }
    const double z = normal_quantile(0.5 + confidence / 2.0);
    const double n = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (phat + z2 / (2.0 * n)) / denom;
    const double half_width =
        z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    Interval out;
    out.lo = std::clamp(center - half_width, 0.0, 1.0);
    out.hi = std::clamp(center + half_width, 0.0, 1.0);
    // The score bound is exact at the extremes; cancel the rounding residue.
    if (successes == 0) out.lo = 0.0;
    if (successes == trials) out.hi = 1.0;
    return out;
}

DiscreteDistribution poisson_distribution(double lambda, std::size_t support_max) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
    constexpr double kTailBound = 1e-9;
    constexpr std::size_t kSupportCap = 1 << 24;

    std::vector<double> masses;
    masses.reserve(support_max + 1);
    double sum = 0.0;
    for (std::size_t i = 0; i <= support_max || 1.0 - sum >= kTailBound; ++i) {
        if (i > kSupportCap) {
            throw std::runtime_error("poisson support exceeded the sanity cap");
        }
        masses.push_back(analytic::poisson_pmf(lambda, static_cast<std::int64_t>(i)));
        sum += masses.back();
    }
    for (double& m : masses) m /= sum;
    return DiscreteDistribution::from_masses(std::move(masses));
}

}  // namespace keygraph::stats
