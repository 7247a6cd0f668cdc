#include "noisykmpp/adversaries.hpp"
#include "noisykmpp/csvio.hpp"
#include "noisykmpp/errors.hpp"
#include "noisykmpp/game.hpp"
#include "noisykmpp/harness.hpp"
#include "noisykmpp/oracle.hpp"
#include "noisykmpp/rng.hpp"
#include "noisykmpp/seeding.hpp"
#include "noisykmpp/stats.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

namespace noisykmpp::harness {

namespace {

namespace fs = std::filesystem;

std::uint64_t scaled_trials(std::uint64_t base, double scale, std::uint64_t floor = 1) {
    const double v = static_cast<double>(base) * scale;
    return std::max<std::uint64_t>(floor, static_cast<std::uint64_t>(std::llround(v)));
}

struct Caps {
    double advantage_cap = 0.0;
    double ratio_cap = 0.0;
};

Caps load_caps(const std::string& fixtures_dir) {
    const std::string path = fixtures_dir + "/acceptance_caps.json";
    std::ifstream in(path);
    if (!in) {
        throw InputError("missing pinned caps fixture " + path +
                         " (run `noisykmpp accept --pilot` to produce it)");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(ss.str());
        Caps caps;
        caps.advantage_cap = doc.at("advantage").at("cap").get<double>();
        caps.ratio_cap = doc.at("ratio").at("cap").get<double>();
        return caps;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("acceptance caps: " + std::string(e.what()));
    }
}

adversaries::ScriptedSpec tilt_spec(double eps) {
    adversaries::ScriptedSpec spec;
    spec.name = "scripted";
    spec.epsilon = eps;
    spec.rules = {{game::WeightClass::Small, 1.0 + eps}, {game::WeightClass::Big, 1.0 - eps}};
    spec.reweigh = {{game::WeightClass::Medium, 2.0}};
    return spec;
}

game::PolicyFactory acceptance_policy_factory(const std::string& name, double eps) {
    if (name == "scripted") {
        const adversaries::ScriptedSpec spec = tilt_spec(eps);
        return [spec](std::uint64_t) { return adversaries::scripted_policy(spec); };
    }
    return adversaries::game_policy_factory(name, eps);
}

const std::vector<std::string> kShippedPolicies = {"null", "random", "drift", "scripted"};

// ---- criterion 1: D^2 sampler fidelity -------------------------------------

CriterionResult c1_sampler(const AcceptanceOptions& opt, const fs::path& dir) {
    const Dataset data = Dataset::load_csv(opt.fixtures_dir + "/sampler6.csv");
    CenterSet center;
    center.push_back(data.point(0), 0, 0);
    const ProbVec exact = d2_distribution(data, center);

    CounterRng rng(split_seed(opt.master_seed, 101));
    auto sampler = [&]() { return sample_index(exact, rng.next_double()); };
    const std::uint64_t draws = scaled_trials(100000, opt.trials_scale, 10000);
    const oracle::DistributionCheck check =
        oracle::empirical_distribution_check(sampler, exact, draws, 0.01);

    std::string csv = "index,exact_prob,draws,count,empirical_freq\n";
    for (std::size_t j = 0; j < exact.size(); ++j) {
        csv += std::to_string(j) + "," + csvio::format_double(exact[j]) + "," +
               std::to_string(draws) + "," + std::to_string(check.counts[j]) + "," +
               csvio::format_double(static_cast<double>(check.counts[j]) /
                                    static_cast<double>(draws)) +
               "\n";
    }
    csvio::write_text((dir / "c1_sampler.csv").string(), csv);

    std::ostringstream detail;
    detail << "tv=" << check.tv_distance << " <= 0.01 over " << draws << " draws";
    return {1, "sampler fidelity", check.pass, detail.str()};
}

// ---- criterion 2: band + sum enforcement under fuzz ------------------------

CriterionResult c2_band(const AcceptanceOptions& opt, const fs::path& dir) {
    const std::vector<double> epsilons = {0.1, 0.3, 0.49};
    const std::vector<std::size_t> ks = {8, 16, 32, 48};
    const std::vector<std::string> profiles = {"all_ones", "pareto_tail", "one_heavy(4)"};
    const std::uint64_t target_rounds = scaled_trials(10000, opt.trials_scale, 100);

    std::string csv = "policy,eps,rounds_checked,violations\n";
    std::uint64_t total_violations = 0;
    std::uint64_t total_rounds = 0;

    for (const auto& policy_name : kShippedPolicies) {
        for (const double eps : epsilons) {
            const game::PolicyFactory factory = acceptance_policy_factory(policy_name, eps);
            const std::uint64_t combo_seed = tuple_seed(
                opt.master_seed, "accept-c2|policy=" + policy_name + "|eps=" + std::to_string(eps));
            std::uint64_t rounds = 0;
            std::uint64_t violations = 0;
            std::uint64_t run_idx = 0;
            game::RunOptions run_opts;
            run_opts.record_distributions = true;
            while (rounds < target_rounds) {
                const std::size_t k = ks[run_idx % ks.size()];
                const std::string profile = profiles[run_idx % profiles.size()];
                game::GameConfig config;
                config.k = k;
                config.epsilon = eps;
                config.initial_weights =
                    datagen::game_weights(profile, k, split_seed(combo_seed, 3 * run_idx));
                config = game::normalize(std::move(config));
                auto policy = factory(split_seed(combo_seed, 3 * run_idx + 1));
                const game::GameTrace trace =
                    game::run(config, *policy, split_seed(combo_seed, 3 * run_idx + 2), run_opts);
                for (std::size_t i = 0; i + 1 < trace.rounds.size(); ++i) {
                    const auto& snap = trace.rounds[i];
                    const seeding::PerturbCheck check =
                        seeding::validate_perturbation(snap.base, snap.perturbed, eps);
                    if (!check.ok || !snap.perturbed.valid(1e-9)) ++violations;
                    ++rounds;
                }
                ++run_idx;
            }
            csv += policy_name + "," + csvio::format_double(eps) + "," + std::to_string(rounds) +
                   "," + std::to_string(violations) + "\n";
            total_violations += violations;
            total_rounds += rounds;
        }
    }
    csvio::write_text((dir / "c2_band.csv").string(), csv);

    std::ostringstream detail;
    detail << total_violations << " violations in " << total_rounds
           << " fuzzed rounds (4 policies x eps {0.1,0.3,0.49})";
    return {2, "band enforcement", total_violations == 0, detail.str()};
}

// ---- criterion 3: eps=0 monotonicity ----------------------------------------

CriterionResult c3_monotone(const AcceptanceOptions& opt, const fs::path& dir) {
    game::GameConfig config;
    config.k = 64;
    config.epsilon = 0.0;
    config.initial_weights = datagen::game_weights("one_heavy(4)", 64, 0);
    config = game::normalize(std::move(config));

    game::AdvantageOptions adv;
    adv.threads = opt.threads;
    const std::uint64_t trials = scaled_trials(100000, opt.trials_scale, 1000);
    const game::AdvantageEstimate est =
        game::estimate_advantage(config, acceptance_policy_factory("null", 0.0), trials,
                                 split_seed(opt.master_seed, 300), adv);

    game::save_advantage_csv(est, (dir / "c3_monotone.csv").string());

    bool pass = true;
    double worst_margin = -1.0;
    int worst_round = 0;
    for (const auto& r : est.per_round) {
        const double margin = r.mean - (1.0 + 3.0 * r.se + 1e-12);
        if (margin > worst_margin) {
            worst_margin = margin;
            worst_round = r.round;
        }
        if (margin > 0.0) pass = false;
    }
    std::ostringstream detail;
    detail << "per-round mean <= 1 + 3se over " << trials << " trials; tightest margin "
           << worst_margin << " at round " << worst_round;
    return {3, "eps=0 monotonicity", pass, detail.str()};
}

// ---- criterion 4: deterministic average-weight bound under fuzz -------------

CriterionResult c4_avg_bound(const AcceptanceOptions& opt, const fs::path& dir) {
    const std::vector<std::size_t> ks = {16, 64, 256};
    const std::vector<double> epsilons = {0.1, 0.3, 0.49};
    const std::uint64_t runs = scaled_trials(10000, opt.trials_scale, 100);
    const std::uint64_t base_seed = split_seed(opt.master_seed, 400);

    struct Acc {
        std::uint64_t runs = 0;
        std::uint64_t counterexamples = 0;
    };
    auto per_run = [&](Acc& acc, std::uint64_t i) {
        const std::string policy_name = kShippedPolicies[i % kShippedPolicies.size()];
        const std::size_t k = ks[(i / 4) % ks.size()];
        const double eps = epsilons[(i / 12) % epsilons.size()];
        const char* profiles[] = {"all_ones", "pareto_tail", "one_heavy(6)", "one_heavy(100)"};
        const std::string profile = profiles[(i / 36) % 4];

        game::GameConfig config;
        config.k = k;
        config.epsilon = eps;
        config.initial_weights = datagen::game_weights(
            profile == "one_heavy(100)" && k < 100 ? "one_heavy(6)" : profile, k,
            split_seed(base_seed, 3 * i));
        config = game::normalize(std::move(config));

        auto policy = acceptance_policy_factory(policy_name, eps)(split_seed(base_seed, 3 * i + 1));
        const game::GameTrace trace =
            game::run(config, *policy, split_seed(base_seed, 3 * i + 2));
        const game::BadnessReport report = game::analyze(trace);
        if (!game::assert_avg_bound(trace, report).ok) ++acc.counterexamples;
        ++acc.runs;
    };
    auto merge = [](Acc& total, const Acc& part) {
        total.runs += part.runs;
        total.counterexamples += part.counterexamples;
    };
    const Acc acc = run_trials<Acc>(runs, opt.threads, per_run, merge);

    std::string csv = "runs,counterexamples\n";
    csv += std::to_string(acc.runs) + "," + std::to_string(acc.counterexamples) + "\n";
    csvio::write_text((dir / "c4_avg_bound.csv").string(), csv);

    std::ostringstream detail;
    detail << acc.counterexamples << " counterexamples in " << acc.runs
           << " fuzzed runs (k in {16,64,256}, all policies)";
    return {4, "90*ell_max bound (deterministic)", acc.counterexamples == 0, detail.str()};
}

// ---- criterion 5: bad-ell tail bound ----------------------------------------

CriterionResult c5_bad_ell(const AcceptanceOptions& opt, const fs::path& dir) {
    game::GameConfig config;
    config.k = 1024;
    config.epsilon = 0.49;
    config.initial_weights = datagen::game_weights("one_heavy(100)", 1024, 0);
    config = game::normalize(std::move(config));

    const std::vector<int> ells = {40, 80, 120, 160, 200};
    const std::uint64_t trials = scaled_trials(200000, opt.trials_scale, 1000);
    const game::BadnessStats stats_out = game::estimate_badness(
        config, acceptance_policy_factory("drift", 0.49), trials,
        split_seed(opt.master_seed, 500), ells, opt.threads);

    std::string csv = "ell,trials,attained,bad_count,freq,bound,cp99_hi,pass\n";
    bool pass = true;
    std::ostringstream detail;
    detail << "freq(ell bad) <= e^{-ell/40} + CP99 slack over " << trials << " trials:";
    for (std::size_t j = 0; j < ells.size(); ++j) {
        const double freq =
            static_cast<double>(stats_out.bad_counts[j]) / static_cast<double>(trials);
        const double bound = std::exp(-static_cast<double>(ells[j]) / 40.0);
        const stats::Interval ci = stats::clopper_pearson(stats_out.bad_counts[j], trials, 0.99);
        const double slack = ci.hi - freq;
        const bool ok = freq <= bound + slack;
        pass = pass && ok;
        csv += std::to_string(ells[j]) + "," + std::to_string(trials) + "," +
               std::to_string(stats_out.attained_counts[j]) + "," +
               std::to_string(stats_out.bad_counts[j]) + "," + csvio::format_double(freq) + "," +
               csvio::format_double(bound) + "," + csvio::format_double(ci.hi) + "," +
               (ok ? "1" : "0") + "\n";
        detail << " l=" << ells[j] << ":" << freq << "/" << bound;
    }
    csvio::write_text((dir / "c5_bad_ell.csv").string(), csv);
    return {5, "bad-ell tail bound", pass, detail.str()};
}

// ---- criterion 6: Bernoulli-sum tail vs bound and exact ---------------------

CriterionResult c6_chernoff(const AcceptanceOptions& opt, const fs::path& dir) {
    const std::uint64_t trials = scaled_trials(1000000, opt.trials_scale, 10000);
    const game::ChernoffResult res =
        game::chernoff_check(0.2, 100, trials, split_seed(opt.master_seed, 600), opt.threads);

    std::string csv =
        "p,ell,trials,threshold,tail_count,empirical,bound,exact_tail,cp_lo,cp_hi\n";
    csv += csvio::format_double(res.p) + "," + std::to_string(res.ell) + "," +
           std::to_string(res.trials) + "," + csvio::format_double(res.threshold) + "," +
           std::to_string(res.tail_count) + "," + csvio::format_double(res.empirical) + "," +
           csvio::format_double(res.bound) + "," + csvio::format_double(res.exact_tail) + "," +
           csvio::format_double(res.cp_lo) + "," + csvio::format_double(res.cp_hi) + "\n";
    csvio::write_text((dir / "c6_chernoff.csv").string(), csv);

    std::ostringstream detail;
    detail << "empirical=" << res.empirical << " bound=" << res.bound
           << " exact=" << res.exact_tail << " cp=[" << res.cp_lo << "," << res.cp_hi << "]";
    return {6, "Bernoulli tail bound", res.within_bound && res.within_ci_of_exact, detail.str()};
}

// ---- criterion 7: advantage stays under the pinned cap ----------------------

// Profiles for the advantage sweep at a given k. Mean-1 weights cannot hold
// a big element unless k > 80, so the big-bearing profile only joins for the
// larger k.
std::vector<std::string> sweep_profiles(std::size_t k) {
    const int heavy = static_cast<int>(std::llround(std::log2(static_cast<double>(k))));
    std::vector<std::string> out = {"all_ones", "pareto_tail",
                                    "one_heavy(" + std::to_string(heavy) + ")"};
    if (k > 100) out.push_back("one_heavy(100)");
    return out;
}

CriterionResult c7_advantage_cap(const AcceptanceOptions& opt, const fs::path& dir) {
    const Caps caps = load_caps(opt.fixtures_dir);
    const std::vector<std::size_t> ks = {16, 64, 256, 1024};
    const std::uint64_t trials = scaled_trials(10000, opt.trials_scale, 200);

    std::string csv = "k,eps,policy,profile,trials,max_mean,max_ci_hi,cap,bound_counterexamples\n";
    bool pass = true;
    std::ostringstream detail;
    detail << "max per-round mean <= " << caps.advantage_cap << ":";
    for (const std::size_t k : ks) {
        double k_max = 0.0;
        for (const std::string& profile : sweep_profiles(k)) {
            game::GameConfig config;
            config.k = k;
            config.epsilon = 0.49;
            config.initial_weights =
                datagen::game_weights(profile, k, split_seed(opt.master_seed, 0xA11CE));
            config = game::normalize(std::move(config));

            game::AdvantageOptions adv;
            adv.threads = opt.threads;
            adv.check_avg_bound = true;
            const game::AdvantageEstimate est = game::estimate_advantage(
                config, acceptance_policy_factory("drift", 0.49), trials,
                split_seed(opt.master_seed, 700 + k), adv);

            const bool ok = est.max_mean <= caps.advantage_cap && est.bound_counterexamples == 0;
            pass = pass && ok;
            k_max = std::max(k_max, est.max_mean);
            csv += std::to_string(k) + ",0.49,drift," + profile + "," + std::to_string(trials) +
                   "," + csvio::format_double(est.max_mean) + "," +
                   csvio::format_double(est.per_round[est.argmax_round].ci_hi) + "," +
                   csvio::format_double(caps.advantage_cap) + "," +
                   std::to_string(est.bound_counterexamples) + "\n";
        }
        detail << " k=" << k << ":" << k_max;
    }
    csvio::write_text((dir / "c7_advantage_cap.csv").string(), csv);
    return {7, "advantage regression cap", pass, detail.str()};
}

// ---- criterion 8: desk-scale approximation-ratio regression ------------------

CriterionResult c8_ratio(const AcceptanceOptions& opt, const fs::path& dir) {
    const Caps caps = load_caps(opt.fixtures_dir);
    RatioPlan plan;
    RatioInstance inst;
    inst.name = "ratio12";
    inst.data_path = opt.fixtures_dir + "/ratio12.csv";
    inst.k = 3;
    inst.baseline = "brute_force";
    plan.instances.push_back(inst);
    plan.cells = {{0.0, "null"}, {0.3, "random"}};
    plan.trials = scaled_trials(10000, opt.trials_scale, 200);
    plan.master_seed = split_seed(opt.master_seed, 800);

    const std::vector<RatioRow> rows = run_ratio_experiment(plan, opt.threads);
    save_ratio_csv(rows, (dir / "c8_ratio.csv").string());

    const double noiseless = rows[0].mean_ratio;
    const double noisy = rows[1].mean_ratio;
    const bool finite = std::isfinite(noiseless) && std::isfinite(noisy);
    const bool pass = finite && noisy <= 3.0 * noiseless && noiseless <= caps.ratio_cap;

    std::ostringstream detail;
    detail << "mean ratio eps=0: " << noiseless << " (cap " << caps.ratio_cap
           << "), eps=0.3: " << noisy << " (<= 3x noiseless)";
    return {8, "approximation-ratio regression", pass, detail.str()};
}

using CriterionFn = CriterionResult (*)(const AcceptanceOptions&, const fs::path&);

constexpr struct {
    int id;
    CriterionFn fn;
} kCriteria[] = {
    {1, c1_sampler},      {2, c2_band},     {3, c3_monotone},          {4, c4_avg_bound},
    {5, c5_bad_ell},       {6, c6_chernoff}, {7, c7_advantage_cap}, {8, c8_ratio},
};

std::vector<CriterionResult> run_criteria(const std::set<int>& wanted,
                                          const AcceptanceOptions& opt, const fs::path& dir,
                                          bool verbose) {
    std::vector<CriterionResult> results;
    for (const auto& c : kCriteria) {
        if (!wanted.count(c.id)) continue;
        const auto start = std::chrono::steady_clock::now();
        CriterionResult res;
        try {
            res = c.fn(opt, dir);
        } catch (const std::exception& e) {
            res = {c.id, "criterion " + std::to_string(c.id), false,
                   std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (verbose) {
            std::ostringstream line;
            line << "criterion " << res.id << ": " << (res.pass ? "PASS" : "FAIL") << "  "
                 << res.name << " — " << res.detail << "  [" << std::fixed
                 << std::setprecision(1) << secs << " s]";
            std::cout << line.str() << std::endl;
        }
        results.push_back(std::move(res));
    }
    return results;
}

bool compare_dirs(const fs::path& a, const fs::path& b, std::string& detail) {
    std::set<std::string> names_a, names_b;
    for (const auto& entry : fs::recursive_directory_iterator(a)) {
        if (entry.is_regular_file()) names_a.insert(fs::relative(entry.path(), a).string());
    }
    for (const auto& entry : fs::recursive_directory_iterator(b)) {
        if (entry.is_regular_file()) names_b.insert(fs::relative(entry.path(), b).string());
    }
    if (names_a != names_b) {
        detail = "output file sets differ";
        return false;
    }
    for (const auto& name : names_a) {
        std::ifstream fa(a / name, std::ios::binary);
        std::ifstream fb(b / name, std::ios::binary);
        std::stringstream sa, sb;
        sa << fa.rdbuf();
        sb << fb.rdbuf();
        if (sa.str() != sb.str()) {
            detail = "byte mismatch in " + name;
            return false;
        }
    }
    detail = std::to_string(names_a.size()) + " files byte-identical across reruns";
    return true;
}

} // namespace

AcceptanceReport run_acceptance(const AcceptanceOptions& options) {
    std::set<int> wanted(options.criteria.begin(), options.criteria.end());
    if (wanted.empty()) wanted = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::set<int> concrete = wanted;
    concrete.erase(9);

    const fs::path out_dir(options.out_dir);
    const fs::path run1 = out_dir / "run1";
    const fs::path run2 = out_dir / "run2";
    fs::remove_all(run1);
    fs::create_directories(run1);

    AcceptanceReport report;
    report.results = run_criteria(concrete, options, run1, true);

    if (wanted.count(9)) {
        fs::remove_all(run2);
        fs::create_directories(run2);
        std::cout << "criterion 9: rerunning the suite with the same master seed..." << std::endl;
        const auto start = std::chrono::steady_clock::now();
        run_criteria(concrete, options, run2, false);
        std::string detail;
        const bool pass = compare_dirs(run1, run2, detail);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << "criterion 9: " << (pass ? "PASS" : "FAIL") << "  determinism — " << detail
                  << "  [" << std::fixed << std::setprecision(1) << secs << " s]" << std::endl;
        report.results.push_back({9, "determinism", pass, detail});
    }

    report.all_pass = true;
    std::string summary = "criterion,name,pass\n";
    for (const auto& r : report.results) {
        report.all_pass = report.all_pass && r.pass;
        summary += std::to_string(r.id) + "," + r.name + "," + (r.pass ? "1" : "0") + "\n";
    }
    csvio::write_text((out_dir / "summary.csv").string(), summary);
    return report;
}

void write_pilot_caps(const std::string& fixtures_dir, unsigned threads) {
    const std::uint64_t pilot_seed = 715517;

    // Advantage arm, mirroring criterion 7.
    nlohmann::json by_k;
    double max_mean = 0.0;
    for (const std::size_t k : {16UL, 64UL, 256UL, 1024UL}) {
        double k_max = 0.0;
        for (const std::string& profile : sweep_profiles(k)) {
            game::GameConfig config;
            config.k = k;
            config.epsilon = 0.49;
            config.initial_weights =
                datagen::game_weights(profile, k, split_seed(pilot_seed, 0xA11CE));
            config = game::normalize(std::move(config));

            game::AdvantageOptions adv;
            adv.threads = threads;
            adv.check_avg_bound = true;
            const game::AdvantageEstimate est = game::estimate_advantage(
                config, adversaries::game_policy_factory("drift", 0.49), 10000,
                split_seed(pilot_seed, 700 + k), adv);
            if (est.bound_counterexamples > 0) {
                throw std::logic_error("pilot: deterministic bound violated; simulator bug");
            }
            k_max = std::max(k_max, est.max_mean);
        }
        by_k[std::to_string(k)] = k_max;
        max_mean = std::max(max_mean, k_max);
        std::cout << "pilot advantage k=" << k << ": max mean " << k_max << std::endl;
    }

    // Ratio arm, mirroring criterion 8 at eps=0.
    RatioPlan plan;
    RatioInstance inst;
    inst.name = "ratio12";
    inst.data_path = fixtures_dir + "/ratio12.csv";
    inst.k = 3;
    inst.baseline = "brute_force";
    plan.instances.push_back(inst);
    plan.cells = {{0.0, "null"}};
    plan.trials = 10000;
    plan.master_seed = split_seed(pilot_seed, 800);
    const std::vector<RatioRow> rows = run_ratio_experiment(plan, threads);
    std::cout << "pilot ratio eps=0: mean " << rows[0].mean_ratio << std::endl;

    nlohmann::json doc;
    doc["schema_version"] = 1;
    doc["pilot_seed"] = pilot_seed;
    doc["advantage"] = {{"policy", "drift"},
                     {"eps", 0.49},
                     {"profiles", "all_ones|pareto_tail|one_heavy(log2 k)|one_heavy(100) for k>100"},
                     {"trials", 10000},
                     {"pilot_max_by_k", by_k},
                     {"cap", 1.5 * max_mean}};
    doc["ratio"] = {{"fixture", "ratio12.csv"},
                    {"k", 3},
                    {"trials", 10000},
                    {"pilot_mean_ratio", rows[0].mean_ratio},
                    {"cap", 1.5 * rows[0].mean_ratio}};
    csvio::write_text(fixtures_dir + "/acceptance_caps.json", doc.dump(2) + "\n");
    std::cout << "wrote " << fixtures_dir << "/acceptance_caps.json" << std::endl;
}

} // namespace noisykmpp::harness
