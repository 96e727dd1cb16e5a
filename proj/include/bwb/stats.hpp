#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace bwb {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

MeanSe mean_se(std::span<const double> xs);

/// Upper regularized incomplete gamma Q(a, x).
double gamma_q(double a, double x);

struct ChiSquareResult {
    double statistic = 0.0;
    std::size_t dof = 0;
    double p_value = 1.0;
};

/// Goodness-of-fit of observed counts against expected probabilities.
/// Buckets with expected count below `min_expected` are pooled into one.
ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed,
                               std::span<const double> expected_probs,
                               double min_expected = 5.0);

/// Two-sample chi-square homogeneity test on bucketed counts.
ChiSquareResult chi_square_two_sample(std::span<const std::uint64_t> a,
                                      std::span<const std::uint64_t> b,
                                      double min_expected = 5.0);

/// Ordinary least squares slope of y against x.
double ols_slope(std::span<const double> x, std::span<const double> y);

/// z quantile for a two-sided 99% interval.
constexpr double kZ99 = 2.5758293035489004;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool overlaps(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
};

Interval mean_ci99(std::span<const double> xs);
/// Normal-approximation 99% interval for a binomial proportion.
Interval proportion_ci99(std::uint64_t successes, std::uint64_t trials);

}  // namespace bwb
