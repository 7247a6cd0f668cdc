#include "noisykmpp/game.hpp"

#include "noisykmpp/adversaries.hpp"
#include "noisykmpp/csvio.hpp"
#include "noisykmpp/errors.hpp"
#include "noisykmpp/parallel.hpp"
#include "noisykmpp/seeding.hpp"
#include "noisykmpp/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace noisykmpp::game {

namespace {

constexpr double kTol = 1e-9;
constexpr std::size_t kNpos = std::numeric_limits<std::size_t>::max();

void check_thresholds(const Thresholds& th) {
    if (!(th.big > th.small) || !(th.small > 0.0)) {
        throw InputError("Thresholds: need big > small > 0");
    }
}

// Mutable round state. Class masses and counts are maintained incrementally
// and recomputed exactly on a fixed cadence (and always in the endgame), so
// a full O(alive) pass per round is only needed when a policy asks for
// per-element multipliers.
struct Engine {
    std::vector<std::uint32_t> ids;
    std::vector<double> w;
    std::vector<WeightClass> cls;
    std::array<double, 3> mass{};
    std::array<long, 3> count{};
    double epsilon = 0.0;
    Thresholds th;
    std::size_t k = 0;
    int round = 0;

    ProbVec base_buf;
    std::vector<double> mult_buf;
    std::vector<adversaries::WeightEdit> edits;

    void init(const GameState& state) {
        if (state.alive.size() != state.weights.size()) {
            throw InputError("GameState: alive/weights length mismatch");
        }
        if (state.alive.empty()) throw InputError("GameState: no alive elements");
        check_thresholds(state.thresholds);
        if (!(state.epsilon >= 0.0 && state.epsilon < 0.5)) {
            throw InputError("GameState: epsilon must satisfy 0 <= eps < 1/2");
        }
        ids = state.alive;
        w = state.weights;
        for (double v : w) {
            if (!(v >= 0.0) || !std::isfinite(v)) {
                throw InputError("GameState: weights must be nonnegative and finite");
            }
        }
        epsilon = state.epsilon;
        th = state.thresholds;
        k = state.k;
        round = state.round;
        cls.resize(w.size());
        refresh();
    }

    void refresh() {
        mass = {0.0, 0.0, 0.0};
        count = {0, 0, 0};
        for (std::size_t j = 0; j < w.size(); ++j) {
            const WeightClass c = classify(w[j], th);
            cls[j] = c;
            mass[static_cast<int>(c)] += w[j];
            ++count[static_cast<int>(c)];
        }
    }

    double total_mass() const { return mass[0] + mass[1] + mass[2]; }

    adversaries::RoundView view(const GameTrace& history, const ProbVec* base) const {
        adversaries::RoundView v;
        v.round = round;
        v.epsilon = epsilon;
        v.thresholds = th;
        v.alive = ids;
        v.weights = w;
        v.classes = cls;
        v.mass_big = mass[0];
        v.mass_medium = mass[1];
        v.mass_small = mass[2];
        v.count_big = static_cast<int>(count[0]);
        v.count_medium = static_cast<int>(count[1]);
        v.count_small = static_cast<int>(count[2]);
        v.base = base;
        v.history = &history;
        return v;
    }

    void export_state(GameState& state) const {
        state.round = round;
        state.alive = ids;
        state.weights = w;
    }

    void fill_snapshot_stats(RoundSnapshot& snap) const {
        snap.round = round;
        snap.size_big = static_cast<int>(count[0]);
        snap.size_medium = static_cast<int>(count[1]);
        snap.size_small = static_cast<int>(count[2]);
        snap.mass_big = mass[0];
        snap.mass_medium = mass[1];
        snap.mass_small = mass[2];
        snap.avg_weight = total_mass() / static_cast<double>(ids.size());
    }

    // Walks values[j] = w[j] * scale(class) until the cumulative sum passes
    // u; kNpos when every entry is zero.
    std::size_t walk_scaled(double u, const std::array<double, 3>& scale) const {
        double acc = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) {
            acc += w[j] * scale[static_cast<int>(cls[j])];
            if (u < acc) return j;
        }
        for (std::size_t j = w.size(); j-- > 0;) {
            if (w[j] * scale[static_cast<int>(cls[j])] > 0.0) return j;
        }
        return kNpos;
    }

    std::size_t walk_probs(double u, const ProbVec& probs) const {
        double acc = 0.0;
        for (std::size_t j = 0; j < probs.size(); ++j) {
            acc += probs[j];
            if (u < acc) return j;
        }
        for (std::size_t j = probs.size(); j-- > 0;) {
            if (probs[j] > 0.0) return j;
        }
        return kNpos;
    }

    void remove_at(std::size_t pos) {
        const int c = static_cast<int>(cls[pos]);
        mass[c] -= w[pos];
        --count[c];
        if (count[c] == 0) mass[c] = 0.0;
        else mass[c] = std::max(mass[c], 0.0);
        ids.erase(ids.begin() + static_cast<std::ptrdiff_t>(pos));
        w.erase(w.begin() + static_cast<std::ptrdiff_t>(pos));
        cls.erase(cls.begin() + static_cast<std::ptrdiff_t>(pos));
    }

    void apply_edits(adversaries::GameAdversary& policy, long removed_id,
                     const GameTrace& history) {
        if (ids.empty()) return;
        edits.clear();
        const adversaries::RoundView v = view(history, nullptr);
        policy.reweigh(v, static_cast<std::uint32_t>(removed_id), edits);
        for (const auto& e : edits) {
            if (e.pos >= w.size()) {
                throw AdversaryViolationError("reweigh edit position out of range", round,
                                              static_cast<long>(e.pos), e.value, 0.0, 0.0);
            }
            const double old = w[e.pos];
            if (!(e.value >= 0.0) || !std::isfinite(e.value) || e.value > old) {
                throw AdversaryViolationError("reweigh must satisfy 0 <= new <= old", round,
                                              static_cast<long>(ids[e.pos]), e.value, 0.0, old);
            }
            const int c0 = static_cast<int>(cls[e.pos]);
            const WeightClass nc = classify(e.value, th);
            const int c1 = static_cast<int>(nc);
            mass[c0] -= old;
            --count[c0];
            if (count[c0] == 0) mass[c0] = 0.0;
            else mass[c0] = std::max(mass[c0], 0.0);
            mass[c1] += e.value;
            ++count[c1];
            w[e.pos] = e.value;
            cls[e.pos] = nc;
        }
    }

    // One removal round. Requires at least one alive element. Degenerate
    // rounds (total weight 0) sample from a uniform base over alive, still
    // run through the perturbation pipeline, and are flagged.
    RoundSnapshot removal_round(adversaries::GameAdversary& policy, CounterRng& rng,
                                const RunOptions& options, const GameTrace& history) {
        if ((round & 31) == 0 || ids.size() <= 128) refresh();

        RoundSnapshot snap;
        fill_snapshot_stats(snap);
        bool degenerate = !(total_mass() > 0.0);

        const double u = rng.next_double();
        std::size_t pos = kNpos;

        std::array<double, 3> cm{1.0, 1.0, 1.0};
        if (!degenerate && !options.force_generic &&
            policy.class_multipliers(view(history, nullptr), cm)) {
            pos = fast_round(policy, u, cm, options, snap);
        }
        if (pos == kNpos) {
            if (!degenerate) {
                pos = generic_round(policy, u, false, options, history, snap);
            }
            if (pos == kNpos) {
                // Every entry was zero: either the masses were all zero up
                // front or incremental float residue hid a truly empty
                // distribution. Recompute and fall back to uniform.
                refresh();
                fill_snapshot_stats(snap);
                degenerate = true;
                pos = generic_round(policy, u, true, options, history, snap);
            }
        }
        snap.degenerate = degenerate;

        snap.removed_id = static_cast<long>(ids[pos]);
        remove_at(pos);
        ++round;
        apply_edits(policy, snap.removed_id, history);
        return snap;
    }

    // Class-keyed multipliers: the band check, renormalization and the
    // contraction all reduce to the three class values, so the only
    // per-element work is the sampling walk.
    std::size_t fast_round(adversaries::GameAdversary&, double u,
                           const std::array<double, 3>& cm, const RunOptions& options,
                           RoundSnapshot& snap) {
        for (int c = 0; c < 3; ++c) {
            if (count[c] == 0) continue;
            if (!std::isfinite(cm[c]) || cm[c] < 1.0 - epsilon - kTol ||
                cm[c] > 1.0 + epsilon + kTol) {
                throw AdversaryViolationError("policy multiplier outside [1-eps, 1+eps]",
                                              round, c, cm[c], 1.0 - epsilon, 1.0 + epsilon);
            }
        }
        const double total = total_mass();
        const double inv_total = 1.0 / total;

        bool uniform_tilt = true;
        double first_m = std::numeric_limits<double>::quiet_NaN();
        double renorm = 0.0;
        for (int c = 0; c < 3; ++c) {
            if (!(mass[c] > 0.0)) continue;
            renorm += cm[c] * (mass[c] * inv_total);
            if (std::isnan(first_m)) first_m = cm[c];
            else if (cm[c] != first_m) uniform_tilt = false;
        }

        std::array<double, 3> scale{inv_total, inv_total, inv_total};
        if (!uniform_tilt) {
            const double drift = renorm - 1.0;
            double t = 1.0;
            for (int c = 0; c < 3; ++c) {
                if (!(mass[c] > 0.0)) continue;
                const double dev = cm[c] - 1.0;
                const double slope_lo = dev - (1.0 - epsilon) * drift;
                if (slope_lo < 0.0) t = std::min(t, epsilon / -slope_lo);
                const double slope_hi = (1.0 + epsilon) * drift - dev;
                if (slope_hi < 0.0) t = std::min(t, epsilon / -slope_hi);
            }
            t = std::max(t, 0.0);
            for (int attempt = 0; attempt < 64; ++attempt) {
                const double tt = 1.0 + t * drift;
                bool ok = tt > 0.0;
                double q_sum = 0.0;
                for (int c = 0; c < 3 && ok; ++c) {
                    if (!(mass[c] > 0.0)) continue;
                    const double ratio = (1.0 + t * (cm[c] - 1.0)) / tt;
                    if (ratio < 1.0 - epsilon - kTol || ratio > 1.0 + epsilon + kTol) ok = false;
                    q_sum += ratio * (mass[c] * inv_total);
                }
                if (ok && std::fabs(q_sum - 1.0) <= kTol) {
                    for (int c = 0; c < 3; ++c) {
                        scale[c] = inv_total * ((1.0 + t * (cm[c] - 1.0)) / tt);
                    }
                    break;
                }
                t *= 0.5;
                if (attempt == 63) scale = {inv_total, inv_total, inv_total};
            }
        }

        const std::size_t pos = walk_scaled(u, scale);
        if (pos != kNpos && options.record_distributions) {
            snap.alive.assign(ids.begin(), ids.end());
            snap.base.probs.resize(w.size());
            snap.perturbed.probs.resize(w.size());
            for (std::size_t j = 0; j < w.size(); ++j) {
                snap.base.probs[j] = w[j] * inv_total;
                snap.perturbed.probs[j] = w[j] * scale[static_cast<int>(cls[j])];
            }
        }
        return pos;
    }

    std::size_t generic_round(adversaries::GameAdversary& policy, double u, bool degenerate,
                              const RunOptions& options, const GameTrace& history,
                              RoundSnapshot& snap) {
        const std::size_t a = ids.size();
        base_buf.probs.assign(a, 0.0);
        if (degenerate) {
            base_buf.probs.assign(a, 1.0 / static_cast<double>(a));
        } else {
            double maxw = 0.0;
            for (double v : w) maxw = std::max(maxw, v);
            if (!(maxw > 0.0)) return kNpos;
            const double inv_total = 1.0 / total_mass();
            for (std::size_t j = 0; j < a; ++j) base_buf.probs[j] = w[j] * inv_total;
        }

        mult_buf.assign(a, 1.0);
        policy.perturb(view(history, &base_buf), mult_buf);
        ProbVec perturbed = seeding::apply_multipliers(base_buf, mult_buf, epsilon, round);
        const seeding::PerturbCheck check =
            seeding::validate_perturbation(base_buf, perturbed, epsilon);
        if (!check.ok) {
            throw AdversaryViolationError("round emitted invalid distribution: " + check.reason,
                                          round, check.index, check.value, check.lo, check.hi);
        }

        const std::size_t pos = walk_probs(u, perturbed);
        if (pos != kNpos && options.record_distributions) {
            snap.alive.assign(ids.begin(), ids.end());
            snap.base = base_buf;
            snap.perturbed = std::move(perturbed);
        }
        return pos;
    }
};

} // namespace

void GameConfig::validate() const {
    if (k == 0) throw InputError("GameConfig: k must be >= 1");
    if (initial_weights.size() != k) {
        throw InputError("GameConfig: need exactly k initial weights");
    }
    if (!(epsilon >= 0.0 && epsilon < 0.5)) {
        throw InputError("GameConfig: epsilon must satisfy 0 <= eps < 1/2");
    }
    check_thresholds(thresholds);
    for (double v : initial_weights) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw InputError("GameConfig: weights must be nonnegative and finite");
        }
    }
}

GameConfig normalize(GameConfig config) {
    config.validate();
    double total = 0.0;
    for (double v : config.initial_weights) total += v;
    if (!(total > 0.0)) throw InputError("normalize: total initial weight must be > 0");
    const double scale = static_cast<double>(config.k) / total;
    for (double& v : config.initial_weights) v *= scale;
    return config;
}

GameState initial_state(const GameConfig& config) {
    config.validate();
    GameState st;
    st.round = 0;
    st.epsilon = config.epsilon;
    st.thresholds = config.thresholds;
    st.k = config.k;
    st.alive.resize(config.k);
    for (std::size_t i = 0; i < config.k; ++i) st.alive[i] = static_cast<std::uint32_t>(i);
    st.weights = config.initial_weights;
    return st;
}

RoundSnapshot step(GameState& state, adversaries::GameAdversary& policy, CounterRng& rng,
                   const RunOptions& options) {
    Engine eng;
    eng.init(state);
    GameTrace empty_history;
    empty_history.k = state.k;
    empty_history.epsilon = state.epsilon;
    empty_history.thresholds = state.thresholds;
    RoundSnapshot snap = eng.removal_round(policy, rng, options, empty_history);
    eng.export_state(state);
    return snap;
}

GameTrace run(const GameConfig& config, adversaries::GameAdversary& policy,
              std::uint64_t rng_seed, const RunOptions& options) {
    config.validate();
    GameState st = initial_state(config);
    Engine eng;
    eng.init(st);

    CounterRng rng(split_seed(rng_seed, 0));
    GameTrace trace;
    trace.k = config.k;
    trace.epsilon = config.epsilon;
    trace.thresholds = config.thresholds;
    trace.distributions_recorded = options.record_distributions;
    trace.rounds.reserve(config.k);

    while (eng.ids.size() > 1) {
        trace.rounds.push_back(eng.removal_round(policy, rng, options, trace));
        const std::size_t r = trace.rounds.size();
        if (r >= 2 &&
            trace.rounds[r - 1].size_small < trace.rounds[r - 2].size_small - 1) {
            throw std::logic_error("game invariant broken: |S| dropped by more than 1");
        }
    }

    // Final singleton snapshot: no sampling, no removal.
    eng.refresh();
    RoundSnapshot last;
    eng.fill_snapshot_stats(last);
    last.removed_id = -1;
    if (options.record_distributions) {
        last.alive.assign(eng.ids.begin(), eng.ids.end());
        last.base.probs.assign(1, 1.0);
        last.perturbed.probs.assign(1, 1.0);
    }
    if (trace.rounds.size() >= 1 &&
        last.size_small < trace.rounds.back().size_small - 1) {
        throw std::logic_error("game invariant broken: |S| dropped by more than 1");
    }
    trace.rounds.push_back(std::move(last));
    return trace;
}

BadnessReport analyze(const GameTrace& trace, double upper_mult, double lower_mult) {
    if (trace.rounds.empty()) throw InputError("analyze: empty trace");
    BadnessReport report;
    report.upper_mult = upper_mult;
    report.lower_mult = lower_mult;
    report.s0 = trace.rounds.front().size_small;
    report.first_round.assign(static_cast<std::size_t>(std::max(report.s0, 0)), -1);

    for (std::size_t i = 0; i < trace.rounds.size(); ++i) {
        const int s = trace.rounds[i].size_small;
        if (s >= 1 && s <= report.s0 && report.first_round[s - 1] < 0) {
            report.first_round[s - 1] = static_cast<long>(i);
        }
    }

    const int half = report.s0 / 2;
    report.entries.reserve(static_cast<std::size_t>(std::max(half, 0)));
    for (int ell = 1; ell <= half; ++ell) {
        BadnessEntry entry;
        entry.ell = ell;
        entry.i_ell = report.first_round[ell - 1];
        entry.i_2ell = report.first_round[2 * ell - 1];
        entry.attained = entry.i_ell >= 0 && entry.i_2ell >= 0;
        if (entry.attained) {
            const double mass_at_2ell = trace.rounds[entry.i_2ell].mass_big;
            const double mass_at_ell = trace.rounds[entry.i_ell].mass_big;
            entry.mass_low_at_2ell = mass_at_2ell <= upper_mult * ell;
            entry.mass_high_at_ell = mass_at_ell > lower_mult * ell;
            entry.bad = entry.mass_low_at_2ell && entry.mass_high_at_ell;
        }
        if (entry.bad) report.ell_max = std::max(report.ell_max, ell);
        report.entries.push_back(entry);
    }
    return report;
}

AvgBoundCheck assert_avg_bound(const GameTrace& trace, const BadnessReport& report) {
    if (trace.rounds.empty()) throw InputError("assert_avg_bound: empty trace");
    if (trace.thresholds.big != 80.0 || trace.thresholds.small != 2.0 ||
        report.upper_mult != 8.0 || report.lower_mult != 4.0) {
        throw InputError("assert_avg_bound: requires default thresholds (80, 2) and cutoffs (8l, 4l)");
    }
    if (std::fabs(trace.rounds.front().avg_weight - 1.0) > kTol) {
        throw InputError("assert_avg_bound: trace must start from normalized weights (mean 1)");
    }
    AvgBoundCheck check;
    check.bound = 90.0 * static_cast<double>(report.ell_max);
    for (std::size_t i = 0; i < trace.rounds.size(); ++i) {
        if (trace.rounds[i].avg_weight > check.bound + kTol) {
            check.ok = false;
            check.round = static_cast<long>(i);
            check.avg = trace.rounds[i].avg_weight;
            return check;
        }
    }
    return check;
}

namespace {

struct AdvantageAcc {
    std::vector<double> sum;
    std::vector<double> sumsq;
    std::uint64_t trials = 0;
    std::uint64_t bound_bad = 0;
};

} // namespace

AdvantageEstimate estimate_advantage(const GameConfig& config, const PolicyFactory& factory,
                                     std::uint64_t trials, std::uint64_t master_seed,
                                     const AdvantageOptions& options) {
    config.validate();
    if (trials == 0) throw InputError("estimate_advantage: trials must be >= 1");
    const std::size_t k = config.k;

    auto acc_trial = [&](AdvantageAcc& acc, std::uint64_t t) {
        if (acc.sum.empty()) {
            acc.sum.assign(k, 0.0);
            acc.sumsq.assign(k, 0.0);
        }
        auto policy = factory(split_seed(master_seed, 2 * t + 1));
        const GameTrace trace = run(config, *policy, split_seed(master_seed, 2 * t));
        for (std::size_t i = 0; i < k; ++i) {
            const double v = trace.rounds[i].avg_weight;
            acc.sum[i] += v;
            acc.sumsq[i] += v * v;
        }
        ++acc.trials;
        if (options.check_avg_bound) {
            const BadnessReport report = analyze(trace);
            if (!assert_avg_bound(trace, report).ok) ++acc.bound_bad;
        }
    };
    auto merge = [&](AdvantageAcc& total, const AdvantageAcc& part) {
        if (part.sum.empty()) return;
        if (total.sum.empty()) {
            total = part;
            return;
        }
        for (std::size_t i = 0; i < k; ++i) {
            total.sum[i] += part.sum[i];
            total.sumsq[i] += part.sumsq[i];
        }
        total.trials += part.trials;
        total.bound_bad += part.bound_bad;
    };

    const AdvantageAcc acc =
        run_trials<AdvantageAcc>(trials, options.threads, acc_trial, merge);

    AdvantageEstimate est;
    est.per_round.resize(k);
    est.bound_counterexamples = acc.bound_bad;
    for (std::size_t i = 0; i < k; ++i) {
        const stats::MeanCi ci = stats::mean_ci(acc.sum[i], acc.sumsq[i], acc.trials);
        est.per_round[i] = {static_cast<int>(i), acc.trials, ci.mean, ci.se, ci.lo, ci.hi};
        if (i == 0 || ci.mean > est.max_mean) {
            est.max_mean = ci.mean;
            est.argmax_round = static_cast<int>(i);
        }
    }
    return est;
}

namespace {

struct BadnessAcc {
    std::vector<std::uint64_t> bad;
    std::vector<std::uint64_t> attained;
    std::uint64_t trials = 0;
};

} // namespace

BadnessStats estimate_badness(const GameConfig& config, const PolicyFactory& factory,
                              std::uint64_t trials, std::uint64_t master_seed,
                              const std::vector<int>& ells, unsigned threads) {
    config.validate();
    if (trials == 0) throw InputError("estimate_badness: trials must be >= 1");
    for (int ell : ells) {
        if (ell < 1) throw InputError("estimate_badness: ell values must be >= 1");
    }

    auto acc_trial = [&](BadnessAcc& acc, std::uint64_t t) {
        if (acc.bad.empty()) {
            acc.bad.assign(ells.size(), 0);
            acc.attained.assign(ells.size(), 0);
        }
        auto policy = factory(split_seed(master_seed, 2 * t + 1));
        const GameTrace trace = run(config, *policy, split_seed(master_seed, 2 * t));
        const BadnessReport report = analyze(trace);
        for (std::size_t j = 0; j < ells.size(); ++j) {
            const int ell = ells[j];
            if (ell > static_cast<int>(report.entries.size())) continue;
            const BadnessEntry& entry = report.entries[ell - 1];
            if (!entry.attained) continue;
            ++acc.attained[j];
            if (entry.bad) ++acc.bad[j];
        }
        ++acc.trials;
    };
    auto merge = [&](BadnessAcc& total, const BadnessAcc& part) {
        if (part.bad.empty()) return;
        if (total.bad.empty()) {
            total = part;
            return;
        }
        for (std::size_t j = 0; j < ells.size(); ++j) {
            total.bad[j] += part.bad[j];
            total.attained[j] += part.attained[j];
        }
        total.trials += part.trials;
    };

    const BadnessAcc acc = run_trials<BadnessAcc>(trials, threads, acc_trial, merge);
    BadnessStats out;
    out.ells = ells;
    out.bad_counts = acc.bad;
    out.attained_counts = acc.attained;
    out.trials = acc.trials;
    return out;
}

ChernoffResult chernoff_check(double p, long ell, std::uint64_t trials,
                              std::uint64_t master_seed, unsigned threads) {
    if (!(p > 0.0 && p <= 1.0)) throw InputError("chernoff_check: p must be in (0, 1]");
    if (ell < 1) throw InputError("chernoff_check: ell must be >= 1");
    if (trials < 10000) throw InputError("chernoff_check: need trials >= 10^4");

    const double threshold = p * static_cast<double>(ell) / 2.0;

    struct Acc {
        std::uint64_t tail = 0;
    };
    auto acc_trial = [&](Acc& acc, std::uint64_t t) {
        CounterRng rng(split_seed(master_seed, t));
        long count = 0;
        for (long i = 0; i < ell; ++i) {
            count += rng.next_double() < p ? 1 : 0;
        }
        if (static_cast<double>(count) < threshold) ++acc.tail;
    };
    auto merge = [](Acc& total, const Acc& part) { total.tail += part.tail; };
    const Acc acc = run_trials<Acc>(trials, threads, acc_trial, merge);

    ChernoffResult res;
    res.p = p;
    res.ell = ell;
    res.trials = trials;
    res.threshold = threshold;
    res.tail_count = acc.tail;
    res.empirical = static_cast<double>(acc.tail) / static_cast<double>(trials);
    res.bound = std::exp(-p * static_cast<double>(ell) / 8.0);
    const long below = static_cast<long>(std::ceil(threshold)) - 1;
    res.exact_tail = stats::binomial_cdf(below, ell, p);
    const stats::Interval ci = stats::clopper_pearson(acc.tail, trials, 0.99);
    res.cp_lo = ci.lo;
    res.cp_hi = ci.hi;
    res.within_bound = res.empirical <= res.bound + (res.cp_hi - res.empirical);
    res.within_ci_of_exact = res.exact_tail >= res.cp_lo && res.exact_tail <= res.cp_hi;
    return res;
}

void save_trace_csv(const GameTrace& trace, const std::string& path) {
    std::string out =
        "round,removed_id,size_b,size_m,size_s,mass_b,mass_m,mass_s,avg_weight,degenerate_flag\n";
    for (const auto& r : trace.rounds) {
        out += std::to_string(r.round);
        out.push_back(',');
        out += std::to_string(r.removed_id);
        out.push_back(',');
        out += std::to_string(r.size_big);
        out.push_back(',');
        out += std::to_string(r.size_medium);
        out.push_back(',');
        out += std::to_string(r.size_small);
        out.push_back(',');
        out += csvio::format_double(r.mass_big);
        out.push_back(',');
        out += csvio::format_double(r.mass_medium);
        out.push_back(',');
        out += csvio::format_double(r.mass_small);
        out.push_back(',');
        out += csvio::format_double(r.avg_weight);
        out.push_back(',');
        out += r.degenerate ? "1" : "0";
        out.push_back('\n');
    }
    csvio::write_text(path, out);
}

void save_advantage_csv(const AdvantageEstimate& estimate, const std::string& path) {
    std::string out = "round,mean,ci_lo,ci_hi,trials\n";
    for (const auto& r : estimate.per_round) {
        out += std::to_string(r.round);
        out.push_back(',');
        out += csvio::format_double(r.mean);
        out.push_back(',');
        out += csvio::format_double(r.ci_lo);
        out.push_back(',');
        out += csvio::format_double(r.ci_hi);
        out.push_back(',');
        out += std::to_string(r.trials);
        out.push_back('\n');
    }
    csvio::write_text(path, out);
}

} // namespace noisykmpp::game
