#include <doctest.h>

#include "noisykmpp/adversaries.hpp"
#include "noisykmpp/csvio.hpp"
#include "noisykmpp/datagen.hpp"
#include "noisykmpp/errors.hpp"
#include "noisykmpp/game.hpp"
#include "noisykmpp/rng.hpp"
#include "noisykmpp/seeding.hpp"
#include "noisykmpp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <memory>

using namespace noisykmpp;

namespace {

game::GameConfig make_config(std::size_t k, double eps, std::vector<double> weights) {
    game::GameConfig config;
    config.k = k;
    config.epsilon = eps;
    config.initial_weights = std::move(weights);
    return config;
}

// Per-element tilt toward one target element; weights untouched.
class TargetTiltPolicy final : public adversaries::GameAdversary {
public:
    TargetTiltPolicy(std::uint32_t target_id, double up, double down = 1.0)
        : target_(target_id), up_(up), down_(down) {}
    std::string name() const override { return "target-tilt"; }
    void perturb(const adversaries::RoundView& view, std::span<double> multipliers) override {
        for (std::size_t i = 0; i < multipliers.size(); ++i) {
            multipliers[i] = view.alive[i] == target_ ? up_ : down_;
        }
    }

private:
    std::uint32_t target_;
    double up_, down_;
};

// Cheating policy: tries to raise a weight.
class WeightRaiser final : public adversaries::GameAdversary {
public:
    std::string name() const override { return "weight-raiser"; }
    void reweigh(const adversaries::RoundView& view, std::uint32_t,
                 std::vector<adversaries::WeightEdit>& edits) override {
        edits.clear();
        if (!view.weights.empty()) {
            edits.push_back({0, view.weights[0] + 1.0});
        }
    }
};

// Independent quadratic re-scan of a trace: for every ell, linear scans for
// i_ell and i_2ell and re-evaluates the two conditions from the raw
// snapshots. No shared code with game::analyze.
struct RescanEntry {
    long i_ell = -1;
    bool bad = false;
};
std::vector<RescanEntry> rescan_badness(const game::GameTrace& trace, int& ell_max_out) {
    const int s0 = trace.rounds.front().size_small;
    std::vector<RescanEntry> entries;
    ell_max_out = 1;
    for (int ell = 1; ell <= s0 / 2; ++ell) {
        RescanEntry entry;
        long i_ell = -1, i_2ell = -1;
        for (std::size_t i = 0; i < trace.rounds.size(); ++i) {
            if (i_ell < 0 && trace.rounds[i].size_small == ell) i_ell = static_cast<long>(i);
        }
        for (std::size_t i = 0; i < trace.rounds.size(); ++i) {
            if (i_2ell < 0 && trace.rounds[i].size_small == 2 * ell) i_2ell = static_cast<long>(i);
        }
        entry.i_ell = i_ell;
        if (i_ell >= 0 && i_2ell >= 0) {
            entry.bad = trace.rounds[i_2ell].mass_big <= 8.0 * ell &&
                        trace.rounds[i_ell].mass_big > 4.0 * ell;
        }
        if (entry.bad) ell_max_out = std::max(ell_max_out, ell);
        entries.push_back(entry);
    }
    return entries;
}

} // namespace

TEST_CASE("normalize scales the mean to exactly 1") {
    const auto c1 = game::normalize(make_config(4, 0.0, {2.0, 2.0, 2.0, 2.0}));
    CHECK(c1.initial_weights == std::vector<double>{1.0, 1.0, 1.0, 1.0});

    const auto c2 = game::normalize(make_config(2, 0.0, {0.0, 4.0}));
    CHECK(c2.initial_weights == std::vector<double>{0.0, 2.0});

    CounterRng rng(31);
    std::vector<double> w(50);
    for (double& v : w) v = 3.0 * rng.next_double();
    const auto c3 = game::normalize(make_config(50, 0.1, std::move(w)));
    double mean = 0.0;
    for (double v : c3.initial_weights) mean += v;
    mean /= 50.0;
    CHECK(mean == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(game::normalize(make_config(3, 0.0, {0.0, 0.0, 0.0})), InputError);
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(make_config(2, 0.5, {1.0, 1.0}).validate(), InputError);
    CHECK_THROWS_AS(make_config(2, -0.1, {1.0, 1.0}).validate(), InputError);
    CHECK_THROWS_AS(make_config(2, 0.1, {1.0}).validate(), InputError);
    CHECK_THROWS_AS(make_config(2, 0.1, {1.0, -1.0}).validate(), InputError);
    auto bad_thresholds = make_config(2, 0.1, {1.0, 1.0});
    bad_thresholds.thresholds = {2.0, 2.0};
    CHECK_THROWS_AS(bad_thresholds.validate(), InputError);
}

TEST_CASE("step: symmetric two-element state removes each side half the time") {
    auto policy = adversaries::null_policy();
    long first = 0;
    const long trials = 4000;
    for (long t = 0; t < trials; ++t) {
        game::GameState st = game::initial_state(make_config(2, 0.0, {1.0, 1.0}));
        CounterRng rng(split_seed(11, static_cast<std::uint64_t>(t)));
        const auto snap = game::step(st, *policy, rng);
        first += snap.removed_id == 0 ? 1 : 0;
        CHECK(st.alive.size() == 1);
        CHECK(st.round == 1);
    }
    const double freq = static_cast<double>(first) / trials;
    CHECK(std::fabs(freq - 0.5) < 4.0 * std::sqrt(0.25 / trials));
}

TEST_CASE("step: all mass on one element forces its removal") {
    auto policy = adversaries::null_policy();
    for (std::uint64_t t = 0; t < 50; ++t) {
        game::GameState st = game::initial_state(make_config(3, 0.0, {0.0, 0.0, 6.0}));
        CounterRng rng(split_seed(13, t));
        const auto snap = game::step(st, *policy, rng);
        CHECK(snap.removed_id == 2);
        CHECK_FALSE(snap.degenerate);
    }
}

TEST_CASE("step: maximal tilt matches the analytically computed distribution") {
    // weights (1,1,1,5), eps 0.25, multiplier 1.25 on the heavy element.
    // Tilted vector (1/8, 1/8, 1/8, 1.25*5/8) renormalizes inside the band,
    // so q = (0.125, 0.125, 0.125, 0.78125) / 1.15625 exactly.
    const double z = 1.15625;
    const double q[4] = {0.125 / z, 0.125 / z, 0.125 / z, 0.78125 / z};

    long counts[4] = {0, 0, 0, 0};
    const long trials = 100000;
    TargetTiltPolicy policy(3, 1.25);
    for (long t = 0; t < trials; ++t) {
        game::GameState st = game::initial_state(make_config(4, 0.25, {1.0, 1.0, 1.0, 5.0}));
        CounterRng rng(split_seed(17, static_cast<std::uint64_t>(t)));
        const auto snap = game::step(st, policy, rng);
        ++counts[snap.removed_id];
    }
    double chi2 = 0.0;
    for (int j = 0; j < 4; ++j) {
        const double expected = q[j] * trials;
        chi2 += (counts[j] - expected) * (counts[j] - expected) / expected;
    }
    CHECK(chi2 < 16.27);  // chi-square df=3 at 99.9%
}

TEST_CASE("run: k=1 gives a single snapshot with the initial weight") {
    auto policy = adversaries::null_policy();
    const auto trace = game::run(make_config(1, 0.0, {3.5}), *policy, 1);
    REQUIRE(trace.rounds.size() == 1);
    CHECK(trace.rounds[0].avg_weight == 3.5);
    CHECK(trace.rounds[0].removed_id == -1);
}

TEST_CASE("run: constant process keeps the average exactly 1") {
    auto policy = adversaries::null_policy();
    const auto trace =
        game::run(make_config(64, 0.0, std::vector<double>(64, 1.0)), *policy, 5);
    REQUIRE(trace.rounds.size() == 64);
    for (const auto& snap : trace.rounds) {
        CHECK(snap.avg_weight == 1.0);
        CHECK_FALSE(snap.degenerate);
    }
}

TEST_CASE("run: monotone-mean sanity at eps 0 over Monte Carlo trials") {
    // Normalized (4,1,1,1,1); per-round mean average weight must stay within
    // 3 standard errors of the telescoped bound 1.
    const auto config = game::normalize(make_config(5, 0.0, {4.0, 1.0, 1.0, 1.0, 1.0}));
    game::AdvantageOptions opts;
    opts.threads = 2;
    const auto est = game::estimate_advantage(
        config, adversaries::game_policy_factory("null", 0.0), 100000, 23, opts);
    for (const auto& r : est.per_round) {
        CHECK(r.mean <= 1.0 + 3.0 * r.se + 1e-12);
    }
}

TEST_CASE("run equals a manual step loop when the endgame refresh covers every round") {
    const std::vector<std::string> policies = {"null", "drift", "random"};
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        for (const auto& name : policies) {
            const double eps = name == "null" ? 0.0 : 0.45;
            CounterRng wrng(split_seed(seed, 40));
            std::vector<double> w(100);
            for (double& v : w) v = 4.0 * wrng.next_double();
            w[0] = 3000.0;  // stays a big element after normalization
            const auto config = game::normalize(make_config(100, eps, std::move(w)));

            auto run_policy = adversaries::game_policy_factory(name, eps)(split_seed(seed, 41));
            const auto trace = game::run(config, *run_policy, seed);

            auto step_policy = adversaries::game_policy_factory(name, eps)(split_seed(seed, 41));
            game::GameState st = game::initial_state(config);
            CounterRng rng(split_seed(seed, 0));  // same stream as run()
            for (std::size_t i = 0; i + 1 < config.k; ++i) {
                const auto snap = game::step(st, *step_policy, rng);
                CHECK(snap.removed_id == trace.rounds[i].removed_id);
                CHECK(snap.mass_big == trace.rounds[i].mass_big);
                CHECK(snap.mass_small == trace.rounds[i].mass_small);
                CHECK(snap.avg_weight == trace.rounds[i].avg_weight);
            }
        }
    }
}

TEST_CASE("trace invariants hold under fuzzed adversaries") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const std::size_t k = 40 + (seed % 3) * 80;
        CounterRng wrng(split_seed(seed, 50));
        std::vector<double> w(k);
        for (double& v : w) v = 5.0 * wrng.next_double();
        if (seed % 2 == 0) w[0] = 30.0 * static_cast<double>(k);
        const auto config = game::normalize(make_config(k, 0.45, std::move(w)));

        auto policy = adversaries::game_policy_factory("drift", 0.45)(0);
        game::RunOptions opts;
        opts.record_distributions = true;
        const auto trace = game::run(config, *policy, seed, opts);

        REQUIRE(trace.rounds.size() == k);
        for (std::size_t i = 0; i < k; ++i) {
            const auto& snap = trace.rounds[i];
            const int alive = static_cast<int>(k - i);
            // partition exhaustive and disjoint
            CHECK(snap.size_big + snap.size_medium + snap.size_small == alive);
            // masses consistent with the average
            CHECK(snap.mass_big + snap.mass_medium + snap.mass_small ==
                  doctest::Approx(snap.avg_weight * alive).epsilon(1e-9));
            // small set drops by at most one
            if (i + 1 < k) {
                CHECK(trace.rounds[i + 1].size_small >= snap.size_small - 1);
            }
            // every recorded distribution passes the band check
            if (i + 1 < k) {
                CHECK(seeding::validate_perturbation(snap.base, snap.perturbed, trace.epsilon).ok);
                CHECK(snap.perturbed.valid());
            }
        }
    }
}

TEST_CASE("recorded distributions reconstruct the incremental masses") {
    // k > 128 exercises the incremental mass path between exact refreshes.
    CounterRng wrng(99);
    std::vector<double> w(300);
    for (double& v : w) v = 4.0 * wrng.next_double();
    w[0] = 150.0;
    w[1] = 95.0;
    const auto config = game::normalize(make_config(300, 0.49, std::move(w)));
    auto policy = adversaries::game_policy_factory("drift", 0.49)(0);
    game::RunOptions opts;
    opts.record_distributions = true;
    const auto trace = game::run(config, *policy, 4, opts);

    for (const auto& snap : trace.rounds) {
        if (snap.degenerate || snap.base.size() == 0) continue;
        const double total = snap.avg_weight * static_cast<double>(snap.base.size());
        double mass_b = 0.0, mass_m = 0.0, mass_s = 0.0;
        for (std::size_t j = 0; j < snap.base.size(); ++j) {
            // nudge reconstructed weights off the class boundaries: the
            // base * total round-trip can move an exact 2.0 by an ulp
            const double weight = snap.base[j] * total;
            const double snapped = std::fabs(weight - trace.thresholds.small) <
                                           1e-9 * trace.thresholds.small
                                       ? trace.thresholds.small
                                       : weight;
            const auto cls = game::classify(snapped, trace.thresholds);
            if (cls == game::WeightClass::Big) mass_b += weight;
            else if (cls == game::WeightClass::Medium) mass_m += weight;
            else mass_s += weight;
        }
        CHECK(mass_b == doctest::Approx(snap.mass_big).epsilon(1e-7));
        CHECK(mass_m == doctest::Approx(snap.mass_medium).epsilon(1e-7));
        CHECK(mass_s == doctest::Approx(snap.mass_small).epsilon(1e-7));
    }
}

TEST_CASE("weight raises are rejected as adversary violations") {
    WeightRaiser policy;
    CHECK_THROWS_AS(game::run(make_config(4, 0.1, {1.0, 1.0, 1.0, 1.0}), policy, 1),
                    AdversaryViolationError);
}

TEST_CASE("degenerate rounds: zero total weight falls back to uniform and is flagged") {
    auto policy = adversaries::null_policy();
    const auto trace = game::run(make_config(3, 0.0, {0.0, 0.0, 6.0}), *policy, 2);
    REQUIRE(trace.rounds.size() == 3);
    CHECK(trace.rounds[0].removed_id == 2);
    CHECK_FALSE(trace.rounds[0].degenerate);
    CHECK(trace.rounds[1].degenerate);  // only zero-weight elements remain
    CHECK(trace.rounds[1].avg_weight == 0.0);
}

TEST_CASE("analyze: no big mass means no bad ell") {
    auto policy = adversaries::null_policy();
    const auto config = game::normalize(make_config(32, 0.0, std::vector<double>(32, 1.0)));
    const auto trace = game::run(config, *policy, 3);
    const auto report = game::analyze(trace);
    CHECK(report.s0 == 32);
    CHECK(report.ell_max == 1);
    for (const auto& entry : report.entries) CHECK_FALSE(entry.bad);
}

TEST_CASE("analyze: handcrafted trace flags ell = 10 as bad") {
    // |S| walks down from 40; big mass is 70 when |S| first hits 20 and 50
    // when it first hits 10, so ell = 10 satisfies both conditions.
    game::GameTrace trace;
    trace.k = 41;
    trace.epsilon = 0.3;
    const int s0 = 40;
    for (int i = 0; i <= s0; ++i) {
        game::RoundSnapshot snap;
        snap.round = i;
        snap.size_small = s0 - i;
        const int s = snap.size_small;
        snap.mass_big = s > 20 ? 100.0 : (s > 10 ? 70.0 : 50.0);
        snap.size_big = 1;
        snap.mass_small = static_cast<double>(s);
        snap.avg_weight = (snap.mass_big + snap.mass_small) / static_cast<double>(41 - i);
        trace.rounds.push_back(snap);
    }
    const auto report = game::analyze(trace);
    REQUIRE(report.entries.size() == static_cast<std::size_t>(s0 / 2));
    const auto& e10 = report.entries[9];
    CHECK(e10.ell == 10);
    CHECK(e10.attained);
    // i_20 is the first round with |S| = 20 -> mass 70 <= 80; i_10 -> mass 50 > 40.
    CHECK(e10.mass_low_at_2ell);
    CHECK(e10.mass_high_at_ell);
    CHECK(e10.bad);
    CHECK(report.ell_max >= 10);
}

TEST_CASE("analyze agrees with an independent quadratic re-scan") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        CounterRng wrng(split_seed(seed, 60));
        std::vector<double> w(90);
        for (double& v : w) v = 3.0 * wrng.next_double();
        if (seed % 3 != 0) w[0] = 2700.0 + 200.0 * wrng.next_double();
        const auto config = game::normalize(make_config(90, 0.49, std::move(w)));
        auto policy = adversaries::game_policy_factory("drift", 0.49)(0);
        const auto trace = game::run(config, *policy, seed);

        const auto report = game::analyze(trace);
        int rescan_ell_max = 1;
        const auto rescan = rescan_badness(trace, rescan_ell_max);
        REQUIRE(report.entries.size() == rescan.size());
        for (std::size_t j = 0; j < rescan.size(); ++j) {
            CHECK(report.entries[j].i_ell == rescan[j].i_ell);
            CHECK(report.entries[j].bad == rescan[j].bad);
        }
        CHECK(report.ell_max == rescan_ell_max);
    }
}

TEST_CASE("assert_avg_bound: constant process and fuzzed runs stay under the bound") {
    auto policy = adversaries::null_policy();
    const auto config = game::normalize(make_config(16, 0.0, std::vector<double>(16, 1.0)));
    const auto trace = game::run(config, *policy, 9);
    const auto report = game::analyze(trace);
    const auto check = game::assert_avg_bound(trace, report);
    CHECK(check.ok);
    CHECK(check.bound == 90.0);

    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const std::size_t k = 16 + (seed % 4) * 40;
        CounterRng wrng(split_seed(seed, 70));
        std::vector<double> w(k);
        for (double& v : w) v = 6.0 * wrng.next_double() * wrng.next_double();
        if (seed % 2 == 0) w[0] = 30.0 * static_cast<double>(k);
        const auto cfg = game::normalize(make_config(k, 0.49, std::move(w)));
        auto pol = adversaries::game_policy_factory(seed % 3 == 0 ? "drift" : "random", 0.49)(
            split_seed(seed, 71));
        const auto tr = game::run(cfg, *pol, seed);
        const auto rep = game::analyze(tr);
        const auto chk = game::assert_avg_bound(tr, rep);
        CHECK(chk.ok);
    }
}

TEST_CASE("assert_avg_bound enforces its preconditions") {
    auto policy = adversaries::null_policy();
    const auto raw = make_config(4, 0.0, {5.0, 5.0, 5.0, 5.0});  // unnormalized
    const auto trace = game::run(raw, *policy, 1);
    const auto report = game::analyze(trace);
    CHECK_THROWS_AS(game::assert_avg_bound(trace, report), InputError);

    auto shifted = game::normalize(make_config(4, 0.0, {1.0, 1.0, 1.0, 1.0}));
    shifted.thresholds = {60.0, 2.0};
    const auto trace2 = game::run(shifted, *policy, 1);
    const auto report2 = game::analyze(trace2);
    CHECK_THROWS_AS(game::assert_avg_bound(trace2, report2), InputError);
}

TEST_CASE("estimate_advantage: two-element worst case matches hand enumeration") {
    // Normalized weights (1.5, 0.5), eps 0.4, tilt (0.6 on heavy, 1.4 on
    // light). The contraction caps the light element's removal probability
    // at 1.4 * 0.25 = 0.35, so E[avg after one removal] =
    // 0.35 * 1.5 + 0.65 * 0.5 = 0.85.
    game::PolicyFactory factory = [](std::uint64_t) {
        return std::make_unique<TargetTiltPolicy>(1, 1.4, 0.6);
    };
    const auto config = make_config(2, 0.4, {1.5, 0.5});
    game::AdvantageOptions opts;
    opts.threads = 2;
    const auto est = game::estimate_advantage(config, factory, 20000, 77, opts);
    REQUIRE(est.per_round.size() == 2);
    CHECK(est.per_round[0].mean == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(est.per_round[1].mean == doctest::Approx(0.85).epsilon(0.02));
    CHECK(est.per_round[1].ci_lo <= 0.85);
    CHECK(est.per_round[1].ci_hi >= 0.85);
}

TEST_CASE("estimate_advantage: null policy never beats the initial mean") {
    const auto config = game::normalize(make_config(24, 0.0, datagen::game_weights("pareto_tail", 24, 3)));
    game::AdvantageOptions opts;
    opts.threads = 2;
    opts.check_avg_bound = true;
    const auto est = game::estimate_advantage(
        config, adversaries::game_policy_factory("null", 0.0), 20000, 5, opts);
    CHECK(est.bound_counterexamples == 0);
    for (const auto& r : est.per_round) {
        CHECK(r.mean <= 1.0 + (r.ci_hi - r.mean) + 1e-12);
    }
}

TEST_CASE("chernoff_check: deterministic and bound cases") {
    // p = 1: the sum is always ell, never below ell/2.
    const auto sure = game::chernoff_check(1.0, 20, 10000, 3);
    CHECK(sure.tail_count == 0);
    CHECK(sure.within_bound);

    const auto res = game::chernoff_check(0.2, 100, 200000, 9, 2);
    CHECK(res.bound == doctest::Approx(std::exp(-2.5)).epsilon(1e-12));
    CHECK(res.within_bound);
    CHECK(res.within_ci_of_exact);
    CHECK(res.empirical < res.bound);

    CHECK_THROWS_AS(game::chernoff_check(0.2, 100, 9999, 1), InputError);
    CHECK_THROWS_AS(game::chernoff_check(0.0, 100, 10000, 1), InputError);
    CHECK_THROWS_AS(game::chernoff_check(1.2, 100, 10000, 1), InputError);
}

TEST_CASE("chernoff_check exact tail matches an independent recurrence at ell = 200") {
    const auto res = game::chernoff_check(0.2, 200, 10000, 21, 2);
    // P(X < 20) = P(X <= 19) for X ~ Bin(200, 0.2), via the pmf recurrence.
    double pmf = std::pow(0.8, 200.0);
    double acc = pmf;
    for (long j = 0; j < 19; ++j) {
        pmf *= static_cast<double>(200 - j) / static_cast<double>(j + 1) * 0.25;
        acc += pmf;
    }
    CHECK(res.exact_tail == doctest::Approx(acc).epsilon(1e-9));
    CHECK(res.within_ci_of_exact);
}

TEST_CASE("step and run validate their state up front") {
    auto policy = adversaries::null_policy();
    CounterRng rng(1);
    game::GameState empty;
    empty.k = 0;
    CHECK_THROWS_AS(game::step(empty, *policy, rng), InputError);

    game::GameState mismatched = game::initial_state(make_config(3, 0.0, {1.0, 1.0, 1.0}));
    mismatched.weights.pop_back();
    CHECK_THROWS_AS(game::step(mismatched, *policy, rng), InputError);

    game::GameState bad_eps = game::initial_state(make_config(3, 0.0, {1.0, 1.0, 1.0}));
    bad_eps.epsilon = 0.5;
    CHECK_THROWS_AS(game::step(bad_eps, *policy, rng), InputError);
}

TEST_CASE("estimate_badness is deterministic and counts attainment") {
    const auto config = game::normalize(make_config(48, 0.45, datagen::game_weights("one_heavy(6)", 48, 1)));
    const std::vector<int> ells = {4, 8, 100};
    const auto a = game::estimate_badness(config, adversaries::game_policy_factory("drift", 0.45),
                                          500, 21, ells, 2);
    const auto b = game::estimate_badness(config, adversaries::game_policy_factory("drift", 0.45),
                                          500, 21, ells, 1);
    CHECK(a.bad_counts == b.bad_counts);
    CHECK(a.attained_counts == b.attained_counts);
    CHECK(a.trials == 500);
    // ell = 100 exceeds floor(|S_0|/2), so it is never attained
    CHECK(a.attained_counts[2] == 0);
    CHECK(a.attained_counts[0] == 500);
}

TEST_CASE("bad-ell frequency stays under the tail bound for every shipped policy") {
    const auto config =
        game::normalize(make_config(256, 0.49, datagen::game_weights("one_heavy(100)", 256, 1)));
    const std::vector<int> ells = {8, 16, 32};
    const std::vector<std::string> policies = {"null", "random", "drift"};
    for (const auto& name : policies) {
        const auto stats_out = game::estimate_badness(
            config, adversaries::game_policy_factory(name, 0.49), 2000, 33, ells, 2);
        for (std::size_t j = 0; j < ells.size(); ++j) {
            const double freq =
                static_cast<double>(stats_out.bad_counts[j]) / static_cast<double>(2000);
            const double bound = std::exp(-ells[j] / 40.0);
            const auto ci = stats::clopper_pearson(stats_out.bad_counts[j], 2000, 0.99);
            CHECK(freq <= bound + (ci.hi - freq));
        }
    }
    // scripted replica of the drift rules
    adversaries::ScriptedSpec spec;
    spec.epsilon = 0.49;
    spec.rules = {{game::WeightClass::Small, 1.49}, {game::WeightClass::Big, 0.51}};
    spec.reweigh = {{game::WeightClass::Medium, 2.0}};
    game::PolicyFactory factory = [&spec](std::uint64_t) {
        return adversaries::scripted_policy(spec);
    };
    const auto stats_out = game::estimate_badness(config, factory, 2000, 34, ells, 2);
    for (std::size_t j = 0; j < ells.size(); ++j) {
        const double freq =
            static_cast<double>(stats_out.bad_counts[j]) / static_cast<double>(2000);
        const auto ci = stats::clopper_pearson(stats_out.bad_counts[j], 2000, 0.99);
        CHECK(freq <= std::exp(-ells[j] / 40.0) + (ci.hi - freq));
    }
}

TEST_CASE("game trace CSV columns and byte determinism") {
    const auto config = game::normalize(make_config(12, 0.3, datagen::game_weights("one_heavy(4)", 12, 1)));
    auto p1 = adversaries::game_policy_factory("drift", 0.3)(1);
    auto p2 = adversaries::game_policy_factory("drift", 0.3)(1);
    const auto t1 = game::run(config, *p1, 8);
    const auto t2 = game::run(config, *p2, 8);

    const auto dir = std::filesystem::temp_directory_path();
    const std::string f1 = (dir / "nkpp_game1.csv").string();
    const std::string f2 = (dir / "nkpp_game2.csv").string();
    game::save_trace_csv(t1, f1);
    game::save_trace_csv(t2, f2);
    const auto rows1 = csvio::read_rows(f1);
    const auto rows2 = csvio::read_rows(f2);
    CHECK(rows1 == rows2);
    REQUIRE(rows1.size() == 13);
    const std::vector<std::string> header = {"round",  "removed_id", "size_b", "size_m",
                                             "size_s", "mass_b",     "mass_m", "mass_s",
                                             "avg_weight", "degenerate_flag"};
    CHECK(rows1[0] == header);
    CHECK(rows1.back()[1] == "-1");  // final singleton row has no removal
}
