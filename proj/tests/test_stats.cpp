#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "keygraph/rng.hpp"
#include "keygraph/stats.hpp"

using namespace keygraph;
using stats::DiscreteDistribution;

namespace {

DiscreteDistribution random_distribution(rng::SplitMix64& gen, std::size_t support) {
    std::vector<double> masses(support);
    double sum = 0.0;
    for (auto& m : masses) {
        m = gen.next_unit_open();
        sum += m;
    }
    for (auto& m : masses) m /= sum;
    return DiscreteDistribution::from_masses(std::move(masses));
}

}  // namespace

TEST_CASE("distribution construction and validation") {
    CHECK_THROWS(DiscreteDistribution::from_masses({0.5, 0.4}));        // sums to 0.9
    CHECK_THROWS(DiscreteDistribution::from_masses({1.5, -0.5}));       // negative mass
    CHECK_THROWS(DiscreteDistribution::from_masses({}));                // empty support
    const auto d = DiscreteDistribution::from_counts({1, 2, 1});
    CHECK(d.mass(1) == 0.5);
    CHECK(d.mass(17) == 0.0);  // beyond the support
    CHECK(d.mean() == doctest::Approx(1.0));
}

TEST_CASE("total variation basic values") {
    const auto a = DiscreteDistribution::from_masses({1.0});
    const auto b = DiscreteDistribution::from_masses({0.0, 1.0});
    CHECK(stats::total_variation(a, a) == 0.0);
    CHECK(stats::total_variation(a, b) == 1.0);  // disjoint point masses
    const auto c = DiscreteDistribution::from_masses({0.5, 0.5});
    CHECK(stats::total_variation(a, c) == doctest::Approx(0.5));
}

TEST_CASE("total variation is a metric on random triples") {
    rng::SplitMix64 gen(6);
    for (int round = 0; round < 200; ++round) {
        const auto a = random_distribution(gen, 1 + gen.bounded(12));
        const auto b = random_distribution(gen, 1 + gen.bounded(12));
        const auto c = random_distribution(gen, 1 + gen.bounded(12));
        const double ab = stats::total_variation(a, b);
        const double bc = stats::total_variation(b, c);
        const double ac = stats::total_variation(a, c);
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
        CHECK(ab == stats::total_variation(b, a));
        CHECK(ac <= ab + bc + 1e-14);
    }
    const auto d = random_distribution(gen, 8);
    CHECK(stats::total_variation(d, d) == 0.0);
}

TEST_CASE("normal quantile") {
    CHECK(stats::normal_quantile(0.975) == doctest::Approx(1.9599639845400542).epsilon(1e-12));
    CHECK(stats::normal_quantile(0.5) == doctest::Approx(0.0));
    CHECK(stats::normal_quantile(0.025) ==
          doctest::Approx(-1.9599639845400542).epsilon(1e-12));
    CHECK(stats::normal_quantile(0.9986501019683699) == doctest::Approx(3.0).epsilon(1e-10));
    CHECK_THROWS(stats::normal_quantile(0.0));
    CHECK_THROWS(stats::normal_quantile(1.0));
}

TEST_CASE("wilson interval") {
    const auto zero = stats::wilson_interval(0, 50, 0.95);
    CHECK(zero.lo == 0.0);
    CHECK(zero.hi > 0.0);

    const auto full = stats::wilson_interval(50, 50, 0.95);
    CHECK(full.hi == 1.0);
    CHECK(full.lo < 1.0);

    const auto half = stats::wilson_interval(500, 1000, 0.95);
    CHECK(half.lo == doctest::Approx(0.469069600368).epsilon(1e-9));
    CHECK(half.hi == doctest::Approx(0.530930399632).epsilon(1e-9));
    CHECK(half.hi - half.lo == doctest::Approx(0.0618607992638).epsilon(1e-9));
    CHECK(half.lo <= 0.5);
    CHECK(0.5 <= half.hi);

    CHECK_THROWS(stats::wilson_interval(5, 0, 0.95));
    CHECK_THROWS(stats::wilson_interval(5, 4, 0.95));
    CHECK_THROWS(stats::wilson_interval(1, 4, 1.0));
}

TEST_CASE("wilson width shrinks like one over sqrt trials") {
    double prev_width = 0.0;
    for (int doubling = 0; doubling < 8; ++doubling) {
        const std::uint64_t trials = std::uint64_t{250} << doubling;
        const auto ci = stats::wilson_interval(trials / 2, trials, 0.95);
        const double width = ci.hi - ci.lo;
        if (doubling > 0) {
            CHECK(width / prev_width == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.02));
        }
        prev_width = width;
    }
}

TEST_CASE("poisson distribution carrier") {
    const auto point = stats::poisson_distribution(0.0, 5);
    CHECK(point.mass(0) == 1.0);
    CHECK(point.size() == 6);

    const auto unit = stats::poisson_distribution(1.0, 50);
    CHECK(unit.mass(0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));

    for (double lambda : {0.4, 3.3, 12.0, 80.0}) {
        const auto dist = stats::poisson_distribution(lambda, 10);  // forces extension
        double sum = 0.0;
        for (double m : dist.masses()) sum += m;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(dist.mean() == doctest::Approx(lambda).epsilon(1e-6));

        // Log-concavity: m_i^2 >= m_{i-1} m_{i+1} (unimodality).
        for (std::size_t i = 1; i + 1 < dist.size(); ++i) {
            if (dist.mass(i) <= 0.0) continue;
            CHECK(dist.mass(i) * dist.mass(i) >=
                  dist.mass(i - 1) * dist.mass(i + 1) * (1.0 - 1e-12));
        }
    }
}
