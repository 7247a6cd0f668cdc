#pragma once

#include "noisykmpp/core.hpp"
#include "noisykmpp/datagen.hpp"
#include "noisykmpp/game.hpp"
#include "noisykmpp/parallel.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace noisykmpp::harness {

inline constexpr int kSchemaVersion = 1;

// Stable per-tuple seed: FNV-1a of the tuple key folded with the master
// seed. Content-keyed, so adding grid points never perturbs existing rows.
std::uint64_t tuple_seed(std::uint64_t master, const std::string& key);

// ---- ratio experiments -----------------------------------------------------

struct RatioInstance {
    std::string name;
    std::string data_path;                   // CSV path, or
    std::optional<datagen::GenSpec> gen;     // generated instance
    std::size_t k = 0;
    std::string baseline;                    // "brute_force" | "planted"
};

struct RatioCell {
    double eps = 0.0;
    std::string policy;  // "null" | "random"
};

struct RatioPlan {
    std::vector<RatioInstance> instances;
    std::vector<RatioCell> cells;
    std::uint64_t trials = 1;
    std::uint64_t master_seed = 0;
    std::size_t lloyd_iters = 0;  // 0: skip the refined column
};

struct RatioRow {
    std::string instance;
    double eps = 0.0;
    std::string policy;
    std::uint64_t trials = 0;
    std::string baseline;
    double baseline_cost = 0.0;
    double mean_ratio = 0.0, ci_lo = 0.0, ci_hi = 0.0;
    double mean_ratio_lloyd = 0.0;  // NaN when lloyd_iters == 0
    std::uint64_t degenerate_trials = 0;  // cost-0 / cost-0, reported as 1
};

std::vector<RatioRow> run_ratio_experiment(const RatioPlan& plan, unsigned threads);
void save_ratio_csv(const std::vector<RatioRow>& rows, const std::string& path);
std::vector<RatioRow> load_ratio_csv(const std::string& path);

// ---- advantage sweeps ------------------------------------------------------

struct AdvantagePlan {
    std::vector<std::size_t> ks;
    std::vector<double> epsilons;
    std::vector<std::string> policies;
    std::vector<std::string> profiles;  // weight generators
    std::uint64_t trials = 1;
    std::uint64_t master_seed = 0;
};

struct AdvantageRow {
    std::size_t k = 0;
    double eps = 0.0;
    std::string policy;
    std::string profile;
    std::uint64_t trials = 0;
    double max_mean = 0.0, max_ci_hi = 0.0;
    int argmax_round = 0;
    std::uint64_t bound_counterexamples = 0;
};

// Normalized profiles; assert_avg_bound runs on every trace and any
// counterexample throws (deterministic bound, so it is a build-breaking
// simulator bug).
std::vector<AdvantageRow> run_advantage_sweep(const AdvantagePlan& plan, unsigned threads);
void save_advantage_sweep_csv(const std::vector<AdvantageRow>& rows, const std::string& path);
std::vector<AdvantageRow> load_advantage_sweep_csv(const std::string& path);

// ---- badness / chernoff plans ----------------------------------------------

struct BadnessPlan {
    std::size_t k = 0;
    double eps = 0.0;
    std::string policy;
    std::string profile;
    std::vector<int> ells;
    std::uint64_t trials = 1;
    std::uint64_t master_seed = 0;
};

struct ChernoffPlan {
    double p = 0.0;
    long ell = 0;
    std::uint64_t trials = 10000;
    std::uint64_t master_seed = 0;
};

// Runs the plan and writes the same CSV shape as the matching CLI command.
void run_badness_plan(const BadnessPlan& plan, const std::string& out_path, unsigned threads);
void run_chernoff_plan(const ChernoffPlan& plan, const std::string& out_path, unsigned threads);

// ---- JSON plans ------------------------------------------------------------

struct ExperimentPlan {
    std::string kind;  // "ratio" | "advantage" | "badness" | "chernoff"
    RatioPlan ratio;
    AdvantagePlan advantage;
    BadnessPlan badness;
    ChernoffPlan chernoff;
    std::string out_path;
};

ExperimentPlan load_plan(const std::string& path);
ExperimentPlan parse_plan(const std::string& json_text);

// ---- acceptance ------------------------------------------------------------

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

struct AcceptanceOptions {
    std::uint64_t master_seed = 20250801;
    std::string out_dir = "accept-out";
    std::string fixtures_dir = "fixtures";
    unsigned threads = default_threads();
    double trials_scale = 1.0;       // dev knob; the official gate runs at 1
    std::vector<int> criteria;       // empty: all
};

struct AcceptanceReport {
    std::vector<CriterionResult> results;
    bool all_pass = false;
};

// Runs the acceptance criteria, writing one CSV per criterion under
// out_dir/run1 (plus run2 for the determinism rerun). Timing never lands in
// the output files. Prints one pass/fail line per criterion to stdout.
AcceptanceReport run_acceptance(const AcceptanceOptions& options);

// Pilot arm: measures the regression quantities and writes
// <fixtures_dir>/acceptance_caps.json with 50% headroom over the pilot.
void write_pilot_caps(const std::string& fixtures_dir, unsigned threads);

} // namespace noisykmpp::harness
