#include <doctest.h>

#include "noisykmpp/core.hpp"
#include "noisykmpp/errors.hpp"
#include "noisykmpp/oracle.hpp"
#include "noisykmpp/rng.hpp"
#include "noisykmpp/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

using namespace noisykmpp;

namespace {

Dataset random_dataset(std::size_t n, std::size_t d, std::uint64_t seed) {
    CounterRng rng(seed);
    std::vector<double> flat(n * d);
    for (double& v : flat) v = 8.0 * (rng.next_double() - 0.5);
    return Dataset(std::move(flat), d);
}

double assignment_cost(const Dataset& data, const std::vector<std::size_t>& assign,
                       std::size_t blocks) {
    const std::size_t d = data.dim();
    std::vector<double> sums(blocks * d, 0.0);
    std::vector<std::size_t> counts(blocks, 0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < d; ++j) sums[assign[i] * d + j] += data.point(i)[j];
        ++counts[assign[i]];
    }
    double cost = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const std::size_t b = assign[i];
        for (std::size_t j = 0; j < d; ++j) {
            const double centroid = sums[b * d + j] / static_cast<double>(counts[b]);
            const double diff = data.point(i)[j] - centroid;
            cost += diff * diff;
        }
    }
    return cost;
}

// Second, independently coded enumerator: every assignment in {0..k-1}^n
// (k^n of them), skipping nothing; centroids by definition.
double exhaustive_assignment_optimum(const Dataset& data, std::size_t k) {
    const std::size_t n = data.size();
    std::vector<std::size_t> assign(n, 0);
    double best = std::numeric_limits<double>::infinity();
    while (true) {
        best = std::min(best, assignment_cost(data, assign, k));

        std::size_t pos = 0;
        while (pos < n && assign[pos] == k - 1) {
            assign[pos] = 0;
            ++pos;
        }
        if (pos == n) break;
        ++assign[pos];
    }
    return best;
}

} // namespace

TEST_CASE("brute force: n = k gives zero cost singletons") {
    const Dataset data = random_dataset(4, 2, 3);
    const auto opt = oracle::brute_force_optimal(data, 4);
    CHECK(opt.cost == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("brute force on the two-pair line") {
    const Dataset line = Dataset::from_points({{0.0}, {1.0}, {10.0}, {11.0}});
    const auto opt = oracle::brute_force_optimal(line, 2);
    CHECK(opt.cost == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(opt.assignment[0] == opt.assignment[1]);
    CHECK(opt.assignment[2] == opt.assignment[3]);
    CHECK(opt.assignment[0] != opt.assignment[2]);
    std::vector<double> centers;
    for (std::size_t c = 0; c < opt.centers.size(); ++c) {
        centers.push_back(opt.centers.center(c)[0]);
    }
    std::sort(centers.begin(), centers.end());
    CHECK(centers[0] == doctest::Approx(0.5));
    CHECK(centers[1] == doctest::Approx(10.5));
}

TEST_CASE("brute force agrees with an independent assignment enumerator") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const Dataset data = random_dataset(9, 2, seed);
        const auto opt = oracle::brute_force_optimal(data, 3);
        const double reference = exhaustive_assignment_optimum(data, 3);
        CHECK(opt.cost == doctest::Approx(reference).epsilon(1e-9));

        // spot check: no random partition beats it (occupied blocks always
        // have their own member, so the centroid division is safe)
        CounterRng rng(split_seed(seed, 5));
        for (int t = 0; t < 10000; ++t) {
            std::vector<std::size_t> assign(9);
            for (auto& a : assign) a = static_cast<std::size_t>(rng.next_below(3));
            CHECK(assignment_cost(data, assign, 3) >= opt.cost - 1e-9);
        }
    }
}

TEST_CASE("brute force cost is permutation and translation invariant") {
    const Dataset data = random_dataset(8, 2, 11);
    const auto base = oracle::brute_force_optimal(data, 3);

    std::vector<Point> permuted;
    for (std::size_t i = data.size(); i-- > 0;) permuted.push_back(data.point_copy(i));
    const auto perm = oracle::brute_force_optimal(Dataset::from_points(permuted), 3);
    CHECK(perm.cost == doctest::Approx(base.cost).epsilon(1e-9));

    std::vector<Point> moved;
    for (std::size_t i = 0; i < data.size(); ++i) {
        Point p = data.point_copy(i);
        p[0] += 4.25;
        p[1] -= 17.5;
        moved.push_back(p);
    }
    const auto shifted = oracle::brute_force_optimal(Dataset::from_points(moved), 3);
    CHECK(shifted.cost == doctest::Approx(base.cost).epsilon(1e-9));
}

TEST_CASE("brute force refuses instances beyond its caps") {
    const Dataset big = random_dataset(13, 2, 1);
    CHECK_THROWS_AS(oracle::brute_force_optimal(big, 3), InputError);
    const Dataset ok = random_dataset(10, 2, 1);
    CHECK_THROWS_AS(oracle::brute_force_optimal(ok, 5), InputError);
}

TEST_CASE("seeded cost is never below the brute-force optimum") {
    const Dataset data = random_dataset(9, 2, 21);
    const auto opt = oracle::brute_force_optimal(data, 3);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto [centers, trace] = seeding::seed(data, 3, {}, seed);
        CHECK(trace.rounds.back().cost_after >= opt.cost - 1e-9);
    }
}

TEST_CASE("empirical_distribution_check basics") {
    // point mass: zero TV regardless of draws
    const ProbVec point_mass{{0.0, 1.0, 0.0}};
    auto both = oracle::empirical_distribution_check([]() { return std::size_t{1}; },
                                                     point_mass, 20000);
    CHECK(both.pass);
    CHECK(both.tv_distance == 0.0);

    // fair coin through the real sampler
    const ProbVec fair{{0.5, 0.5}};
    CounterRng rng(5);
    auto fair_check = oracle::empirical_distribution_check(
        [&]() { return sample_index(fair, rng.next_double()); }, fair, 100000);
    CHECK(fair_check.pass);
    CHECK(fair_check.tv_distance < 0.01);

    // deliberately biased sampler against a skewed vector
    const ProbVec skewed{{0.9, 0.1}};
    CounterRng rng2(5);
    const ProbVec swapped{{0.1, 0.9}};
    auto biased = oracle::empirical_distribution_check(
        [&]() { return sample_index(swapped, rng2.next_double()); }, skewed, 20000);
    CHECK_FALSE(biased.pass);

    CHECK_THROWS_AS(oracle::empirical_distribution_check([]() { return std::size_t{0}; },
                                                         fair, 5000),
                    InputError);
}
