#pragma once

#include "noisykmpp/core.hpp"
#include "noisykmpp/rng.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace noisykmpp::adversaries {
class GameAdversary;
}

namespace noisykmpp::game {

// Weight partition of surviving elements: Big (w >= big threshold),
// Small (w <= small threshold), Medium in between. Exactly one holds.
enum class WeightClass : std::uint8_t { Big = 0, Medium = 1, Small = 2 };

struct Thresholds {
    double big = 80.0;
    double small = 2.0;
};

inline WeightClass classify(double w, const Thresholds& th) {
    if (w >= th.big) return WeightClass::Big;
    if (w <= th.small) return WeightClass::Small;
    return WeightClass::Medium;
}

struct GameConfig {
    std::size_t k = 0;
    double epsilon = 0.0;  // 0 <= eps < 1/2
    std::vector<double> initial_weights;
    Thresholds thresholds;

    void validate() const;
};

// Scales weights so the mean initial weight is 1 (total = k).
GameConfig normalize(GameConfig config);

struct GameState {
    int round = 0;
    double epsilon = 0.0;
    Thresholds thresholds;
    std::size_t k = 0;
    std::vector<std::uint32_t> alive;  // element ids, ascending
    std::vector<double> weights;       // aligned with alive
};

GameState initial_state(const GameConfig& config);

struct RoundSnapshot {
    int round = 0;
    long removed_id = -1;  // -1 on the final singleton snapshot
    int size_big = 0, size_medium = 0, size_small = 0;
    double mass_big = 0.0, mass_medium = 0.0, mass_small = 0.0;
    double avg_weight = 0.0;  // w_i(E_i) / (k - i)
    bool degenerate = false;  // total weight 0: uniform fallback over alive
    // Filled only when distributions are recorded.
    std::vector<std::uint32_t> alive;
    ProbVec base;
    ProbVec perturbed;
};

struct GameTrace {
    std::size_t k = 0;
    double epsilon = 0.0;
    Thresholds thresholds;
    bool distributions_recorded = false;
    // k snapshots: one per removal round plus the final singleton.
    std::vector<RoundSnapshot> rounds;
};

struct RunOptions {
    bool record_distributions = false;
    // Disables the class-keyed multiplier fast path; every round goes through
    // the per-element pipeline. For tests.
    bool force_generic = false;
};

// One round of the process: base distribution from current weights, policy
// perturbation (validated against the band), one sampled removal, policy
// reweigh (validated monotone). Degenerate rounds (total weight 0) sample
// uniformly over alive and are flagged.
RoundSnapshot step(GameState& state, adversaries::GameAdversary& policy, CounterRng& rng,
                   const RunOptions& options = {});

// Runs rounds until one element remains; k-1 removals plus the final
// singleton snapshot. One uniform draw per removal round from
// CounterRng(split_seed(rng_seed, 0)).
GameTrace run(const GameConfig& config, adversaries::GameAdversary& policy,
              std::uint64_t rng_seed, const RunOptions& options = {});

struct BadnessEntry {
    int ell = 0;
    long i_ell = -1;       // first round with |S_i| = ell
    long i_2ell = -1;      // first round with |S_i| = 2*ell
    bool attained = false;
    bool mass_low_at_2ell = false;  // w_{i_{2l}}(B) <= upper_mult * l
    bool mass_high_at_ell = false;  // w_{i_l}(B)  >  lower_mult * l
    bool bad = false;               // both
};

struct BadnessReport {
    int s0 = 0;                      // |S_0|
    std::vector<long> first_round;   // i_ell for ell = 1..s0; -1 if unattained
    std::vector<BadnessEntry> entries;  // ell = 1..floor(s0/2)
    int ell_max = 1;                 // largest bad ell, or 1 if none
    double upper_mult = 8.0;
    double lower_mult = 4.0;
};

// Scans a complete trace for bad ell values. The multipliers are
// configurable for sensitivity runs; bound assertions use the defaults.
BadnessReport analyze(const GameTrace& trace, double upper_mult = 8.0,
                      double lower_mult = 4.0);

struct AvgBoundCheck {
    bool ok = true;
    long round = -1;    // violating round if not ok
    double avg = 0.0;
    double bound = 0.0; // 90 * ell_max
};

// Deterministic bound: every round's average weight <= 90 * ell_max (+1e-9).
// Requires a normalized start (round-0 average 1) and default thresholds /
// multipliers; any counterexample indicates a simulator bug.
AvgBoundCheck assert_avg_bound(const GameTrace& trace, const BadnessReport& report);

using PolicyFactory =
    std::function<std::unique_ptr<adversaries::GameAdversary>(std::uint64_t policy_seed)>;

struct RoundStat {
    int round = 0;
    std::uint64_t trials = 0;
    double mean = 0.0, se = 0.0, ci_lo = 0.0, ci_hi = 0.0;
};

struct AdvantageEstimate {
    std::vector<RoundStat> per_round;
    double max_mean = 0.0;
    int argmax_round = 0;
    std::uint64_t bound_counterexamples = 0;
};

struct AdvantageOptions {
    unsigned threads = 1;
    bool check_avg_bound = false;  // analyze + assert_avg_bound on every trace
};

// Monte Carlo estimate of the per-round mean average weight with 99% CIs.
// Trial t uses sampler seed split_seed(master, 2t) and policy seed
// split_seed(master, 2t+1); aggregation order is fixed, so results are
// byte-stable for a fixed thread count.
AdvantageEstimate estimate_advantage(const GameConfig& config, const PolicyFactory& factory,
                                     std::uint64_t trials, std::uint64_t master_seed,
                                     const AdvantageOptions& options = {});

struct BadnessStats {
    std::vector<int> ells;
    std::vector<std::uint64_t> bad_counts;       // aligned with ells
    std::vector<std::uint64_t> attained_counts;  // trials where ell was in range
    std::uint64_t trials = 0;
};

// Frequency of "ell is bad" per requested ell over independent runs.
BadnessStats estimate_badness(const GameConfig& config, const PolicyFactory& factory,
                              std::uint64_t trials, std::uint64_t master_seed,
                              const std::vector<int>& ells, unsigned threads = 1);

struct ChernoffResult {
    double p = 0.0;
    long ell = 0;
    std::uint64_t trials = 0;
    double threshold = 0.0;  // p * ell / 2; the event is sum < threshold
    std::uint64_t tail_count = 0;
    double empirical = 0.0;
    double bound = 0.0;      // e^{-p*ell/8}
    double exact_tail = 0.0; // binomial CDF below the same threshold
    double cp_lo = 0.0, cp_hi = 0.0;  // 99% Clopper-Pearson
    bool within_bound = false;        // empirical <= bound + (cp_hi - empirical)
    bool within_ci_of_exact = false;  // exact in [cp_lo, cp_hi]
};

// Empirical tail of a sum of ell Bernoulli(p) draws vs the e^{-p*ell/8}
// bound and the exact binomial tail. Requires trials >= 10^4.
ChernoffResult chernoff_check(double p, long ell, std::uint64_t trials,
                              std::uint64_t master_seed, unsigned threads = 1);

// CSV columns: round,removed_id,size_b,size_m,size_s,mass_b,mass_m,mass_s,avg_weight,degenerate_flag
void save_trace_csv(const GameTrace& trace, const std::string& path);

// CSV columns: round,mean,ci_lo,ci_hi,trials
void save_advantage_csv(const AdvantageEstimate& estimate, const std::string& path);

} // namespace noisykmpp::game
