#pragma once

#include "noisykmpp/game.hpp"
#include "noisykmpp/seeding.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace noisykmpp::adversaries {

// What a game policy is allowed to see in a round: history, the base
// distribution, and the weight partition. Policies never touch the
// sampler's RNG; randomized policies carry their own seeded stream.
struct RoundView {
    int round = 0;
    double epsilon = 0.0;
    game::Thresholds thresholds;
    std::span<const std::uint32_t> alive;        // ids, ascending
    std::span<const double> weights;             // aligned with alive
    std::span<const game::WeightClass> classes;  // aligned with alive
    double mass_big = 0.0, mass_medium = 0.0, mass_small = 0.0;
    int count_big = 0, count_medium = 0, count_small = 0;
    const ProbVec* base = nullptr;         // null on the class-keyed path
    const game::GameTrace* history = nullptr;  // snapshots so far
};

// A weight decrease proposal: position into the current alive arrays.
struct WeightEdit {
    std::uint32_t pos = 0;
    double value = 0.0;
};

class GameAdversary {
public:
    virtual ~GameAdversary() = default;
    virtual std::string name() const = 0;

    // Class-keyed fast path: one multiplier per {Big, Medium, Small}. The
    // engine applies and validates these in O(1) per round. Return false to
    // fall back to per-element multipliers.
    virtual bool class_multipliers(const RoundView& view, std::array<double, 3>& out) {
        (void)view;
        (void)out;
        return false;
    }

    // Per-element multipliers in [1-eps, 1+eps]; the default expands
    // class_multipliers and otherwise leaves everything at 1.
    virtual void perturb(const RoundView& view, std::span<double> multipliers);

    // Weight decreases after the removal, as sparse edits against the
    // post-removal view. Default: no edits.
    virtual void reweigh(const RoundView& view, std::uint32_t removed_id,
                         std::vector<WeightEdit>& edits) {
        (void)view;
        (void)removed_id;
        edits.clear();
    }
};

// Multipliers all 1, weights untouched: the epsilon-free control. Reduces
// the game to its exact form and noisy seeding to exact k-means++.
std::unique_ptr<GameAdversary> null_policy();

// I.i.d. multipliers uniform on [1-eps, 1+eps], one fresh draw per entry per
// round from a counter stream keyed by (seed, round); weights untouched.
std::unique_ptr<GameAdversary> random_policy(double epsilon, std::uint64_t seed);

// Tilts sampling away from big elements (1-eps) and onto small ones (1+eps),
// and truncates every medium element's weight to the small threshold so the
// small set churns. Big weights are never modified.
std::unique_ptr<GameAdversary> drift_policy(double epsilon);

struct ScriptedRule {
    game::WeightClass when;
    double multiplier = 1.0;
};
struct ScriptedReweigh {
    game::WeightClass when;
    double floor_to = 0.0;  // cap: w -> min(w, floor_to)
};

struct ScriptedSpec {
    std::string name = "scripted";
    double epsilon = 0.0;
    std::vector<ScriptedRule> rules;
    std::vector<ScriptedReweigh> reweigh;
};

// Parses a policy spec file:
//   {"name": ..., "epsilon": e, "rules": [{"when": "small", "multiplier": m}, ...],
//    "reweigh": [{"when": "medium", "floor_to": v}, ...]}
// Multipliers outside [1-epsilon, 1+epsilon] are rejected at load time.
ScriptedSpec load_scripted_spec(const std::string& path);
ScriptedSpec parse_scripted_spec(const std::string& json_text);

std::unique_ptr<GameAdversary> scripted_policy(ScriptedSpec spec);

// Registry: "null" | "random" | "drift" | "file:<path>". The returned
// factory builds a fresh policy per trial from a derived seed.
game::PolicyFactory game_policy_factory(const std::string& spec, double epsilon);

// Seed-noise policies for the seeding module: "null" | "random".
std::unique_ptr<seeding::SeedNoisePolicy> make_seed_policy(const std::string& name,
                                                           double epsilon,
                                                           std::uint64_t seed);

bool is_known_game_policy(const std::string& spec);

} // namespace noisykmpp::adversaries
