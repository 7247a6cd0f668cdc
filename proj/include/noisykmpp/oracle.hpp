#pragma once

#include "noisykmpp/core.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace noisykmpp::oracle {

struct OptimalClustering {
    std::vector<std::size_t> assignment;  // point index -> block
    CenterSet centers;                    // block centroids
    double cost = 0.0;
};

// Exhaustive search over all partitions of the points into at most k
// nonempty blocks (restricted-growth-string enumeration); centers are block
// centroids. Refuses n > 12 or k > 4.
OptimalClustering brute_force_optimal(const Dataset& data, std::size_t k);

struct DistributionCheck {
    bool pass = false;
    double tv_distance = 0.0;
    double threshold = 0.0;
    std::vector<std::uint64_t> counts;
};

// Draws `draws` samples from the sampler and compares empirical frequencies
// against the exact vector in total variation. Requires draws >= 10^4.
DistributionCheck empirical_distribution_check(const std::function<std::size_t()>& sampler,
                                               const ProbVec& exact, std::uint64_t draws,
                                               double threshold = 0.01);

} // namespace noisykmpp::oracle
