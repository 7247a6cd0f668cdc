#pragma once

#include "noisykmpp/core.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace noisykmpp::seeding {

struct SeedingTrace;

// Perturbation strategy over dataset indices. Policies see the round, the
// base distribution and the history so far; they never see the sampler's
// RNG. Multipliers must land in [1-eps, 1+eps] entrywise.
class SeedNoisePolicy {
public:
    virtual ~SeedNoisePolicy() = default;
    virtual std::string name() const = 0;
    virtual void perturb(int round, const ProbVec& base, const SeedingTrace& history,
                         std::span<double> multipliers) = 0;
};

struct NoiseModel {
    double epsilon = 0.0;               // 0 <= epsilon < 1/2
    SeedNoisePolicy* policy = nullptr;  // nullptr: identity (exact k-means++)
};

struct SeedingRound {
    int round = 0;
    ProbVec base;
    ProbVec perturbed;
    std::size_t sampled_index = 0;
    double cost_after = 0.0;
    bool uniform_fallback = false;  // set_cost hit 0 before k centers
};

struct SeedingTrace {
    std::vector<SeedingRound> rounds;
};

struct PerturbCheck {
    bool ok = true;
    long index = -1;   // first offending entry
    double value = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    double sum = 1.0;
    std::string reason;
};

// ok iff every entry of perturbed is within [(1-eps)*base, (1+eps)*base]
// (tolerance 1e-9) and perturbed sums to 1 within 1e-9.
PerturbCheck validate_perturbation(const ProbVec& base, const ProbVec& perturbed,
                                   double epsilon);

// base .* multipliers, renormalized. A pointwise-perturbed vector need not
// sum to 1, so after renormalizing the multipliers are contracted toward 1
// (largest feasible scale of the deviation, then halving on float slack)
// until the band holds again; all-ones is always feasible. Out-of-band raw
// multipliers throw AdversaryViolationError.
ProbVec apply_multipliers(const ProbVec& base, std::span<const double> multipliers,
                          double epsilon, int round);

// Noisy k-means++: round 0 samples from the perturbed uniform distribution,
// every later round from the perturbed D^2 distribution. Exactly k centers,
// all dataset members. If set_cost hits 0 early, remaining centers are drawn
// uniformly from not-yet-chosen indices and those rounds are flagged.
// Consumes one uniform draw per round from CounterRng(split_seed(rng_seed, 0)).
std::pair<CenterSet, SeedingTrace> seed(const Dataset& X, std::size_t k,
                                        const NoiseModel& noise, std::uint64_t rng_seed);

// Alternating assignment / centroid updates; empty clusters keep their
// previous center. Stops when assignments are stable or after max_iters.
CenterSet lloyd_refine(const Dataset& X, const CenterSet& C, std::size_t max_iters);

// CSV columns: round,sampled_index,base_prob_of_sampled,perturbed_prob_of_sampled,cost_after
void save_trace_csv(const SeedingTrace& trace, const std::string& path);

} // namespace noisykmpp::seeding
