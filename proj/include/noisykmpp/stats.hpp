#pragma once

#include <cstdint>

namespace noisykmpp::stats {

// 99% two-sided normal quantile, used for all normal-approximation CIs.
inline constexpr double kZ99 = 2.5758293035489004;

struct MeanCi {
    double mean = 0.0;
    double se = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

// Normal-approximation CI from accumulated sum / sum of squares.
MeanCi mean_ci(double sum, double sumsq, std::uint64_t n, double z = kZ99);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Clopper-Pearson exact binomial interval at the given two-sided confidence
// (e.g. 0.99). Rare events need the exact tail; normal CIs collapse there.
Interval clopper_pearson(std::uint64_t successes, std::uint64_t trials,
                         double confidence = 0.99);

// P(X <= m) for X ~ Binomial(n, p), computed by direct log-space summation.
double binomial_cdf(long m, long n, double p);

// Regularized incomplete beta I_x(a, b) via continued fraction.
double incomplete_beta(double a, double b, double x);

// Standard normal inverse CDF (rational approximation + one Newton step).
double inverse_normal_cdf(double p);

// Standard normal CDF.
double normal_cdf(double x);

} // namespace noisykmpp::stats
