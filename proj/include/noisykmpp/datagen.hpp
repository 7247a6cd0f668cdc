#pragma once

#include "noisykmpp/core.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace noisykmpp::datagen {

enum class Family { GaussianMixture, UniformCube, SeparatedClusters };

Family parse_family(const std::string& name);
std::string family_name(Family family);

struct GenSpec {
    Family family = Family::GaussianMixture;
    std::size_t n = 0;
    std::size_t d = 1;
    std::size_t k_true = 1;
    double separation = 0.0;
    std::uint64_t seed = 0;
};

struct PlantedMeta {
    std::vector<Point> true_means;          // empty for uniform_cube
    std::optional<double> planted_cost;     // sum of squared deviations to true means
    std::vector<std::size_t> assignment;    // planted cluster per point
};

// Deterministic under seed; normal variates come from an inverse-CDF
// transform of the counter generator, so output bytes are platform-stable.
//   gaussian_mixture:    k_true unit-variance spherical clusters, pairwise
//                        mean distance >= separation
//   separated_clusters:  k_true point masses (pairwise distance exactly
//                        separation when d >= k_true, evenly spaced on the
//                        first axis otherwise); planted cost 0
//   uniform_cube:        i.i.d. uniform on [0,1]^d
std::pair<Dataset, PlantedMeta> generate(const GenSpec& spec);

void save_meta_json(const GenSpec& spec, const PlantedMeta& meta, const std::string& path);

// Weight profiles for the sampling game, all with mean 1:
//   "all_ones"      (1, ..., 1)
//   "pareto_tail"   Pareto(1.5) draws, normalized to mean 1
//   "one_heavy(m)"  one element of weight m, the rest (k-m)/(k-1); m <= k
std::vector<double> game_weights(const std::string& generator, std::size_t k,
                                 std::uint64_t seed);

} // namespace noisykmpp::datagen
