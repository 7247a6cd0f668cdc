#include <doctest.h>

#include "noisykmpp/rng.hpp"
#include "noisykmpp/stats.hpp"

#include <cmath>
#include <vector>

using namespace noisykmpp;

namespace {

// Independent binomial CDF via the pmf product recurrence; no lgamma.
double binomial_cdf_recurrence(long m, long n, double p) {
    if (m < 0) return 0.0;
    if (m >= n) return 1.0;
    double pmf = std::pow(1.0 - p, static_cast<double>(n));
    double acc = pmf;
    for (long j = 0; j < m; ++j) {
        pmf *= static_cast<double>(n - j) / static_cast<double>(j + 1) * p / (1.0 - p);
        acc += pmf;
    }
    return acc;
}

} // namespace

TEST_CASE("CounterRng is deterministic and uniform on [0,1)") {
    CounterRng a(42), b(42), c(43);
    double sum = 0.0;
    bool all_equal = true;
    for (int i = 0; i < 10000; ++i) {
        const double va = a.next_double();
        const double vb = b.next_double();
        CHECK(va == vb);
        CHECK(va >= 0.0);
        CHECK(va < 1.0);
        all_equal = all_equal && (va == c.next_double());
        sum += va;
    }
    CHECK_FALSE(all_equal);
    // mean of 1e4 uniforms: 0.5 +- 4 sigma (sigma = 1/sqrt(12)/100)
    CHECK(std::fabs(sum / 10000.0 - 0.5) < 4.0 * 0.00289);
}

TEST_CASE("split_seed separates streams and is stable") {
    CHECK(split_seed(1, 0) == split_seed(1, 0));
    CHECK(split_seed(1, 0) != split_seed(1, 1));
    CHECK(split_seed(1, 0) != split_seed(2, 0));
    // derived streams do not collide over a small scan
    std::vector<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 1000; ++s) seen.push_back(split_seed(7, s));
    std::sort(seen.begin(), seen.end());
    CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
}

TEST_CASE("mean_ci matches hand computation") {
    // values {1, 2, 3}: mean 2, sample var 1, se = 1/sqrt(3)
    const auto ci = stats::mean_ci(6.0, 14.0, 3, 2.0);
    CHECK(ci.mean == doctest::Approx(2.0));
    CHECK(ci.se == doctest::Approx(1.0 / std::sqrt(3.0)));
    CHECK(ci.lo == doctest::Approx(2.0 - 2.0 / std::sqrt(3.0)));
    CHECK(ci.hi == doctest::Approx(2.0 + 2.0 / std::sqrt(3.0)));
}

TEST_CASE("binomial_cdf agrees with hand values and the recurrence oracle") {
    CHECK(stats::binomial_cdf(0, 2, 0.5) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(stats::binomial_cdf(1, 2, 0.5) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(stats::binomial_cdf(1, 3, 0.25) == doctest::Approx(0.84375).epsilon(1e-12));
    CHECK(stats::binomial_cdf(5, 5, 0.3) == 1.0);
    CHECK(stats::binomial_cdf(-1, 5, 0.3) == 0.0);

    for (const long m : {5L, 9L, 19L, 50L}) {
        CHECK(stats::binomial_cdf(m, 200, 0.2) ==
              doctest::Approx(binomial_cdf_recurrence(m, 200, 0.2)).epsilon(1e-10));
    }
}

TEST_CASE("clopper_pearson bounds invert the binomial tails") {
    // Dual route: the upper bound u solves P(X <= x; n, u) = alpha/2 and the
    // lower bound l solves P(X >= x; n, l) = alpha/2.
    const std::uint64_t x = 3, n = 10;
    const double alpha = 0.05;
    const auto ci = stats::clopper_pearson(x, n, 1.0 - alpha);
    CHECK(stats::binomial_cdf(static_cast<long>(x), static_cast<long>(n), ci.hi) ==
          doctest::Approx(alpha / 2.0).epsilon(1e-7));
    CHECK(1.0 - stats::binomial_cdf(static_cast<long>(x) - 1, static_cast<long>(n), ci.lo) ==
          doctest::Approx(alpha / 2.0).epsilon(1e-7));
    // textbook interval for 3/10 at 95%
    CHECK(ci.lo == doctest::Approx(0.06674).epsilon(1e-3));
    CHECK(ci.hi == doctest::Approx(0.65245).epsilon(1e-3));

    const auto zero = stats::clopper_pearson(0, 100, 0.99);
    CHECK(zero.lo == 0.0);
    CHECK(zero.hi > 0.0);
    CHECK(zero.hi < 0.1);
    const auto full = stats::clopper_pearson(100, 100, 0.99);
    CHECK(full.hi == 1.0);
}

TEST_CASE("inverse_normal_cdf hits known quantiles and round-trips") {
    CHECK(stats::inverse_normal_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(stats::inverse_normal_cdf(0.975) ==
          doctest::Approx(1.959963984540054).epsilon(1e-9));
    CHECK(stats::inverse_normal_cdf(0.995) ==
          doctest::Approx(2.5758293035489004).epsilon(1e-9));
    for (double p = 0.0005; p < 1.0; p += 0.0493) {
        CHECK(stats::normal_cdf(stats::inverse_normal_cdf(p)) ==
              doctest::Approx(p).epsilon(1e-11));
    }
}

TEST_CASE("incomplete_beta basics") {
    CHECK(stats::incomplete_beta(2.0, 2.0, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(stats::incomplete_beta(1.0, 1.0, 0.3) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(stats::incomplete_beta(3.0, 1.0, 0.7) == doctest::Approx(0.343).epsilon(1e-12));
}
