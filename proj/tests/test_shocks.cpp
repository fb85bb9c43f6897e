#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "anwser/random.hpp"
#include "anwser/shocks.hpp"

using namespace anwser;

namespace {

double exceedance(const ShockDistribution& dist, double x, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) hits += dist.draw(rng) > x;
    return static_cast<double>(hits) / static_cast<double>(n);
}

double sample_variance(const ShockDistribution& dist, std::size_t n, Rng& rng) {
    long double s = 0.0L, s2 = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        const long double v = dist.draw(rng);
        s += v;
        s2 += v * v;
    }
    const long double mean = s / n;
    return static_cast<double>(s2 / n - mean * mean);
}

// Kolmogorov-Smirnov distance between draws and the model CDF.
double ks_distance(const ShockDistribution& dist, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (double& x : v) x = dist.draw(rng);
    std::sort(v.begin(), v.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double cdf = 1.0 - dist.tail(v[i]);
        d = std::max({d, std::abs(cdf - static_cast<double>(i) / n), std::abs(cdf - static_cast<double>(i + 1) / n)});
    }
    return d;
}

}  // namespace

TEST(StudentT, TailMatchesCauchyAtOneDegree) {
    for (double t : {0.0, 0.1, 0.5, 1.0, 3.0, 10.0, 1e3, -2.0})
        EXPECT_NEAR(student_t_tail(t, 1.0), 0.5 - std::atan(t) / std::numbers::pi, 1e-14) << t;
}

TEST(StudentT, TailMatchesClosedFormAtTwoDegrees) {
    for (double t : {0.2, 1.0, 4.0, 50.0})
        EXPECT_NEAR(student_t_tail(t, 2.0), 0.5 - t / (2.0 * std::sqrt(t * t + 2.0)), 1e-14) << t;
}

TEST(StudentT, QuantileInvertsTail) {
    for (double dof : {1.0, 1.5, 3.0, 30.0})
        for (double p : {0.4, 0.1, 1e-3, 1e-6}) {
            const double q = student_t_upper_quantile(p, dof);
            EXPECT_NEAR(student_t_tail(q, dof) / p, 1.0, 1e-10) << dof << " " << p;
        }
    EXPECT_NEAR(student_t_upper_quantile(1e-3, 1.0), std::tan(std::numbers::pi * (0.5 - 1e-3)), 1e-6);
}

TEST(Calibration, ExponentialRates) {
    EXPECT_NEAR(calibrate_rate(ShockKind::two_sided_exponential, 0.07, 0.1, 1e-3).rate, 0.9 / 0.07 * std::log(500.0),
                1e-12);
    EXPECT_NEAR(calibrate_rate(ShockKind::two_sided_exponential, 0.07, 0.1, 1e-3).rate, 79.90, 0.01);
    EXPECT_NEAR(calibrate_rate(ShockKind::two_sided_exponential, 0.05, 0.1, 1e-3).rate, 111.86, 0.01);
}

TEST(Calibration, ScaledTailHitsTarget) {
    const double threshold = 0.07 / 0.9;
    const auto t = calibrate_rate(ShockKind::student_t, 0.07, 0.1, 1e-3, 1.5);
    EXPECT_NEAR(t.tail(threshold), 1e-3, 1e-12);
    const auto e = calibrate_rate(ShockKind::two_sided_exponential, 0.07, 0.1, 1e-3);
    EXPECT_NEAR(e.tail(threshold), 1e-3, 1e-15);
}

TEST(Calibration, RejectsBadProbability) {
    EXPECT_THROW(calibrate_rate(ShockKind::student_t, 0.07, 0.1, 0.5), ConfigError);
    EXPECT_THROW(calibrate_rate(ShockKind::two_sided_exponential, 0.07, 0.1, 0.0), ConfigError);
}

TEST(Sampling, ExponentialExceedance) {
    const auto dist = ShockDistribution::exponential(79.9);
    const double p = dist.tail(0.0778);
    const double se = std::sqrt(p * (1 - p) / 1e6);
    EXPECT_NEAR(exceedance(dist, 0.0778, 1000000, 1), p, 3 * se);
    EXPECT_NEAR(p, 1e-3, 2e-6);
}

TEST(Sampling, StudentTExceedance) {
    const auto dist = calibrate_rate(ShockKind::student_t, 0.07, 0.1, 1e-3, 1.5);
    const double se = std::sqrt(1e-3 * (1 - 1e-3) / 1e6);
    EXPECT_NEAR(exceedance(dist, 0.07 / 0.9, 1000000, 2), 1e-3, 3 * se);
}

TEST(Sampling, ExponentialMeanZero) {
    const double rate = 50.0;
    const auto dist = ShockDistribution::exponential(rate);
    Rng rng(3);
    long double s = 0.0L;
    const std::size_t n = 1000000;
    for (std::size_t i = 0; i < n; ++i) s += dist.draw(rng);
    const double se = std::sqrt(2.0 / (rate * rate) / n);
    EXPECT_NEAR(static_cast<double>(s / n), 0.0, 3 * se);
}

TEST(Sampling, StudentTSymmetric) {
    // The mean exists at dof 1.5 but has no finite standard error; test the sign balance.
    const double up = exceedance(ShockDistribution::student_t(1.5, 1.0), 0.0, 1000000, 4);
    EXPECT_NEAR(up, 0.5, 3 * std::sqrt(0.25 / 1e6));
}

TEST(Sampling, DistributionMatchesModel) {
    const double crit = 1.63 / std::sqrt(200000.0);  // 1% KS critical value
    EXPECT_LT(ks_distance(ShockDistribution::exponential(20.0), 200000, 5), crit);
    EXPECT_LT(ks_distance(ShockDistribution::student_t(1.5, 0.3), 200000, 6), crit);
    EXPECT_LT(ks_distance(ShockDistribution::student_t(1.0, 1.0), 200000, 7), crit);
    EXPECT_LT(ks_distance(ShockDistribution::student_t(5.0, 2.0), 200000, 8), crit);
}

TEST(Sampling, HeavyTailVarianceGrowsWithSampleSize) {
    const auto dist = ShockDistribution::student_t(1.5, 1.0);
    Rng rng(9);
    constexpr int reps = 40;
    std::vector<double> small, large;
    int larger = 0;
    for (int r = 0; r < reps; ++r) {
        large.push_back(sample_variance(dist, 1000000, rng));
        small.push_back(sample_variance(dist, 10000, rng));
        larger += large.back() > small.back();
    }
    std::nth_element(small.begin(), small.begin() + reps / 2, small.end());
    std::nth_element(large.begin(), large.begin() + reps / 2, large.end());
    EXPECT_GT(large[reps / 2], small[reps / 2]);
    // The exact probability of a larger variance is about 0.89.
    EXPECT_GE(larger, reps * 8 / 10);
}

TEST(Sampling, SeededDrawsReproducible) {
    const auto dist = ShockDistribution::student_t(1.5, 0.05);
    EXPECT_EQ(sample_shock(dist, 7, std::uint64_t{11}), sample_shock(dist, 7, std::uint64_t{11}));
    EXPECT_NE(sample_shock(dist, 7, std::uint64_t{11}), sample_shock(dist, 7, std::uint64_t{12}));
}
