#include "noisykmpp/adversaries.hpp"
#include "noisykmpp/core.hpp"
#include "noisykmpp/csvio.hpp"
#include "noisykmpp/datagen.hpp"
#include "noisykmpp/errors.hpp"
#include "noisykmpp/game.hpp"
#include "noisykmpp/harness.hpp"
#include "noisykmpp/oracle.hpp"
#include "noisykmpp/rng.hpp"
#include "noisykmpp/seeding.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace {

using namespace noisykmpp;

std::vector<double> parse_weights(const std::string& spec, std::size_t k, std::uint64_t seed) {
    if (spec.rfind("generator:", 0) == 0) {
        return datagen::game_weights(spec.substr(10), k, seed);
    }
    const auto rows = csvio::read_rows(spec);
    std::vector<double> weights;
    if (rows.size() == 1 && rows[0].size() > 1) {
        for (const auto& cell : rows[0]) weights.push_back(csvio::parse_double(cell));
    } else {
        for (const auto& row : rows) {
            if (row.size() != 1) throw ParseError("weights CSV: expected one weight per line");
            weights.push_back(csvio::parse_double(row[0]));
        }
    }
    if (weights.size() != k) {
        throw InputError("weights: got " + std::to_string(weights.size()) + " values for k=" +
                         std::to_string(k));
    }
    return weights;
}

std::vector<int> parse_int_list(const std::string& spec) {
    std::vector<int> out;
    for (const auto& cell : csvio::split_line(spec)) {
        out.push_back(static_cast<int>(csvio::parse_long(cell)));
    }
    return out;
}

int cmd_seed(const std::string& data_path, std::size_t k, double eps,
             const std::string& policy_name, std::uint64_t seed, const std::string& trace_out) {
    const Dataset data = Dataset::load_csv(data_path);
    auto policy = policy_name == "null" && eps == 0.0
                      ? nullptr
                      : adversaries::make_seed_policy(policy_name, eps, split_seed(seed, 1));
    seeding::NoiseModel noise{eps, policy.get()};
    auto [centers, trace] = seeding::seed(data, k, noise, seed);

    std::cout << "round,index,cost_after\n";
    for (const auto& r : trace.rounds) {
        std::cout << r.round << "," << r.sampled_index << ","
                  << csvio::format_double(r.cost_after) << "\n";
    }
    std::cout << "final_cost," << csvio::format_double(trace.rounds.back().cost_after) << "\n";
    if (!trace_out.empty()) seeding::save_trace_csv(trace, trace_out);
    return 0;
}

int cmd_game_run(std::size_t k, double eps, const std::string& weights_spec,
                 const std::string& policy_spec, std::uint64_t seed, const std::string& out,
                 bool normalize_weights) {
    game::GameConfig config;
    config.k = k;
    config.epsilon = eps;
    config.initial_weights = parse_weights(weights_spec, k, split_seed(seed, 7));
    if (normalize_weights) config = game::normalize(std::move(config));

    auto policy = adversaries::game_policy_factory(policy_spec, eps)(split_seed(seed, 1));
    const game::GameTrace trace = game::run(config, *policy, seed);
    const game::BadnessReport report = game::analyze(trace);

    if (!out.empty()) game::save_trace_csv(trace, out);
    std::cout << "rounds," << trace.rounds.size() << "\n";
    std::cout << "s0," << report.s0 << "\n";
    std::cout << "ell_max," << report.ell_max << "\n";
    if (normalize_weights) {
        const game::AvgBoundCheck check = game::assert_avg_bound(trace, report);
        std::cout << "avg_bound_ok," << (check.ok ? 1 : 0) << "\n";
        if (!check.ok) {
            std::cerr << "average-weight bound violated at round " << check.round << ": "
                      << check.avg << " > " << check.bound << "\n";
            return 2;
        }
    }
    return 0;
}

int cmd_game_advantage(std::size_t k, double eps, const std::string& weights_spec,
                       const std::string& policy_spec, std::uint64_t trials, std::uint64_t seed,
                       const std::string& out, unsigned threads, bool check_avg_bound) {
    game::GameConfig config;
    config.k = k;
    config.epsilon = eps;
    config.initial_weights = parse_weights(weights_spec, k, split_seed(seed, 7));
    config = game::normalize(std::move(config));

    game::AdvantageOptions opts;
    opts.threads = threads;
    opts.check_avg_bound = check_avg_bound;
    const game::AdvantageEstimate est = game::estimate_advantage(
        config, adversaries::game_policy_factory(policy_spec, eps), trials, seed, opts);

    if (!out.empty()) game::save_advantage_csv(est, out);
    std::cout << "max_mean," << csvio::format_double(est.max_mean) << "\n";
    std::cout << "argmax_round," << est.argmax_round << "\n";
    if (check_avg_bound && est.bound_counterexamples > 0) {
        std::cerr << "deterministic average-weight bound violated on "
                  << est.bound_counterexamples << " trace(s)\n";
        return 2;
    }
    return 0;
}

int cmd_game_badness(std::size_t k, double eps, const std::string& weights_spec,
                     const std::string& policy_spec, std::uint64_t trials, std::uint64_t seed,
                     const std::string& ells_spec, const std::string& out, unsigned threads) {
    game::GameConfig config;
    config.k = k;
    config.epsilon = eps;
    config.initial_weights = parse_weights(weights_spec, k, split_seed(seed, 7));
    config = game::normalize(std::move(config));

    const std::vector<int> ells = parse_int_list(ells_spec);
    const game::BadnessStats stats_out = game::estimate_badness(
        config, adversaries::game_policy_factory(policy_spec, eps), trials, seed, ells, threads);

    std::string csv = "ell,trials,attained,bad_count,freq,bound\n";
    for (std::size_t j = 0; j < ells.size(); ++j) {
        const double freq =
            static_cast<double>(stats_out.bad_counts[j]) / static_cast<double>(trials);
        csv += std::to_string(ells[j]) + "," + std::to_string(trials) + "," +
               std::to_string(stats_out.attained_counts[j]) + "," +
               std::to_string(stats_out.bad_counts[j]) + "," + csvio::format_double(freq) + "," +
               csvio::format_double(std::exp(-ells[j] / 40.0)) + "\n";
    }
    if (!out.empty()) csvio::write_text(out, csv);
    std::cout << csv;
    return 0;
}

int cmd_game_chernoff(double p, long ell, std::uint64_t trials, std::uint64_t seed,
                      const std::string& out, unsigned threads) {
    const game::ChernoffResult res = game::chernoff_check(p, ell, trials, seed, threads);
    std::string csv = "p,ell,trials,tail_count,empirical,bound,exact_tail,cp_lo,cp_hi\n";
    csv += csvio::format_double(res.p) + "," + std::to_string(res.ell) + "," +
           std::to_string(res.trials) + "," + std::to_string(res.tail_count) + "," +
           csvio::format_double(res.empirical) + "," + csvio::format_double(res.bound) + "," +
           csvio::format_double(res.exact_tail) + "," + csvio::format_double(res.cp_lo) + "," +
           csvio::format_double(res.cp_hi) + "\n";
    if (!out.empty()) csvio::write_text(out, csv);
    std::cout << csv;
    return res.within_bound && res.within_ci_of_exact ? 0 : 2;
}

int cmd_oracle_opt(const std::string& data_path, std::size_t k, const std::string& out) {
    const Dataset data = Dataset::load_csv(data_path);
    const oracle::OptimalClustering opt = oracle::brute_force_optimal(data, k);
    std::string csv = "cost," + csvio::format_double(opt.cost) + "\n";
    for (std::size_t i = 0; i < opt.assignment.size(); ++i) {
        csv += std::to_string(i) + "," + std::to_string(opt.assignment[i]) + "\n";
    }
    if (!out.empty()) csvio::write_text(out, csv);
    std::cout << csv;
    return 0;
}

int cmd_datagen(const std::string& family, std::size_t n, std::size_t d, std::size_t k_true,
                double separation, std::uint64_t seed, const std::string& out,
                const std::string& meta_out) {
    datagen::GenSpec spec;
    spec.family = datagen::parse_family(family);
    spec.n = n;
    spec.d = d;
    spec.k_true = k_true;
    spec.separation = separation;
    spec.seed = seed;
    const auto [data, meta] = datagen::generate(spec);
    data.save_csv(out);
    if (!meta_out.empty()) datagen::save_meta_json(spec, meta, meta_out);
    std::cout << "wrote " << data.size() << " points (d=" << data.dim() << ") to " << out << "\n";
    return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& out_override,
                   unsigned threads) {
    harness::ExperimentPlan plan = harness::load_plan(config_path);
    if (!out_override.empty()) plan.out_path = out_override;
    if (plan.out_path.empty()) throw InputError("experiment: no output path (plan 'out' or --out)");
    if (plan.kind == "ratio") {
        const auto rows = harness::run_ratio_experiment(plan.ratio, threads);
        harness::save_ratio_csv(rows, plan.out_path);
        std::cout << "wrote " << rows.size() << " ratio rows to " << plan.out_path << "\n";
    } else if (plan.kind == "advantage") {
        const auto rows = harness::run_advantage_sweep(plan.advantage, threads);
        harness::save_advantage_sweep_csv(rows, plan.out_path);
        std::cout << "wrote " << rows.size() << " advantage rows to " << plan.out_path << "\n";
    } else if (plan.kind == "badness") {
        harness::run_badness_plan(plan.badness, plan.out_path, threads);
        std::cout << "wrote badness rows to " << plan.out_path << "\n";
    } else {
        harness::run_chernoff_plan(plan.chernoff, plan.out_path, threads);
        std::cout << "wrote chernoff row to " << plan.out_path << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"noisy k-means++ seeding and adversarial sampling-game workbench"};
    app.require_subcommand(1);
    app.fallthrough();

    unsigned threads = noisykmpp::default_threads();
    app.add_option("--threads", threads, "worker threads for trial fan-out")->capture_default_str();
    std::uint64_t global_seed = 0;
    auto* global_seed_opt =
        app.add_option("--seed", global_seed, "default RNG seed for any subcommand");
    std::string out_dir;
    app.add_option("--out-dir", out_dir, "directory for relative output paths");

    // seed
    auto* seed_cmd = app.add_subcommand("seed", "run (noisy) k-means++ seeding on a CSV dataset")->fallthrough();
    std::string seed_data, seed_policy = "null", seed_trace_out;
    std::size_t seed_k = 1;
    double seed_eps = 0.0;
    std::uint64_t seed_seed = 1;
    seed_cmd->add_option("--data", seed_data, "dataset CSV (one point per row)")->required();
    seed_cmd->add_option("--k", seed_k, "number of centers")->required();
    seed_cmd->add_option("--eps", seed_eps, "noise level, 0 <= eps < 1/2");
    seed_cmd->add_option("--policy", seed_policy, "noise policy: null|random");
    seed_cmd->add_option("--seed", seed_seed, "RNG seed");
    seed_cmd->add_option("--trace-out", seed_trace_out, "write the per-round trace CSV here");

    // game
    auto* game_cmd = app.add_subcommand("game", "adversarial sampling process")->fallthrough();
    game_cmd->require_subcommand(1);
    std::size_t g_k = 16;
    double g_eps = 0.0, g_p = 0.2;
    std::string g_weights = "generator:all_ones", g_policy = "null", g_out, g_ells = "40,80,120,160,200";
    std::uint64_t g_trials = 10000, g_seed = 1;
    long g_ell = 100;
    bool g_no_normalize = false, g_no_bound_check = false;

    auto add_game_common = [&](CLI::App* cmd, bool with_trials) {
        cmd->add_option("--k", g_k, "element count");
        cmd->add_option("--eps", g_eps, "adversary band, 0 <= eps < 1/2");
        cmd->add_option("--weights", g_weights, "CSV path or generator:<all_ones|pareto_tail|one_heavy(m)>");
        cmd->add_option("--policy", g_policy, "null|random|drift|file:<path>");
        cmd->add_option("--seed", g_seed, "RNG seed");
        cmd->add_option("--out", g_out, "output CSV path");
        if (with_trials) cmd->add_option("--trials", g_trials, "Monte Carlo trials");
    };

    auto* game_run = game_cmd->add_subcommand("run", "single run, trace CSV out")->fallthrough();
    add_game_common(game_run, false);
    game_run->add_flag("--no-normalize", g_no_normalize, "keep raw weights (skip mean-1 scaling)");

    auto* game_adv = game_cmd->add_subcommand("advantage", "per-round mean average weight with CIs")->fallthrough();
    add_game_common(game_adv, true);
    game_adv->add_flag("--no-bound-check", g_no_bound_check, "skip the deterministic bound check");

    auto* game_bad = game_cmd->add_subcommand("badness", "bad-ell frequencies over trials")->fallthrough();
    add_game_common(game_bad, true);
    game_bad->add_option("--ells", g_ells, "comma-separated ell values");

    auto* game_cher = game_cmd->add_subcommand("chernoff", "Bernoulli-sum tail vs bound")->fallthrough();
    game_cher->add_option("--p", g_p, "success probability");
    game_cher->add_option("--ell", g_ell, "number of Bernoulli variables");
    game_cher->add_option("--trials", g_trials, "Monte Carlo trials (>= 10^4)");
    game_cher->add_option("--seed", g_seed, "RNG seed");
    game_cher->add_option("--out", g_out, "output CSV path");

    // oracle
    auto* oracle_cmd = app.add_subcommand("oracle", "brute-force references")->fallthrough();
    oracle_cmd->require_subcommand(1);
    auto* oracle_opt = oracle_cmd->add_subcommand("opt", "exhaustive optimal k-means (n<=12, k<=4)")->fallthrough();
    std::string o_data, o_out;
    std::size_t o_k = 1;
    oracle_opt->add_option("--data", o_data, "dataset CSV")->required();
    oracle_opt->add_option("--k", o_k, "number of clusters")->required();
    oracle_opt->add_option("--out", o_out, "output CSV path");

    // datagen
    auto* datagen_cmd = app.add_subcommand("datagen", "synthetic instance generator")->fallthrough();
    std::string d_family = "gaussian_mixture", d_out, d_meta_out;
    std::size_t d_n = 100, d_d = 2, d_ktrue = 3;
    double d_sep = 10.0;
    std::uint64_t d_seed = 1;
    datagen_cmd->add_option("--family", d_family, "gaussian_mixture|uniform_cube|separated_clusters");
    datagen_cmd->add_option("--n", d_n, "points");
    datagen_cmd->add_option("--d", d_d, "dimension");
    datagen_cmd->add_option("--k-true", d_ktrue, "planted clusters");
    datagen_cmd->add_option("--separation", d_sep, "minimum pairwise mean distance");
    datagen_cmd->add_option("--seed", d_seed, "RNG seed");
    datagen_cmd->add_option("--out", d_out, "dataset CSV path")->required();
    datagen_cmd->add_option("--meta-out", d_meta_out, "planted metadata JSON path");

    // experiment
    auto* exp_cmd = app.add_subcommand("experiment", "run a JSON experiment plan")->fallthrough();
    std::string e_config, e_out;
    exp_cmd->add_option("--config", e_config, "plan JSON")->required();
    exp_cmd->add_option("--out", e_out, "override the plan's output path");

    // accept
    auto* accept_cmd = app.add_subcommand("accept", "run the acceptance suite")->fallthrough();
    noisykmpp::harness::AcceptanceOptions acc;
    std::string acc_criteria;
    bool acc_pilot = false;
    accept_cmd->add_option("--seed", acc.master_seed, "master seed")->capture_default_str();
    accept_cmd->add_option("--out-dir", acc.out_dir, "output directory")->capture_default_str();
    accept_cmd->add_option("--fixtures", acc.fixtures_dir, "fixtures directory")->capture_default_str();
    accept_cmd->add_option("--criteria", acc_criteria, "comma-separated criterion ids (default all)");
    accept_cmd->add_option("--trials-scale", acc.trials_scale,
                           "scale trial counts (dev only; the gate runs at 1.0)");
    accept_cmd->add_flag("--pilot", acc_pilot, "measure and write the pinned regression caps");

    CLI11_PARSE(app, argc, argv);

    // Global fallbacks: a top-level --seed feeds subcommands that did not
    // set their own; --out-dir re-roots relative output paths.
    auto resolve = [&](std::string& path) {
        if (path.empty() || out_dir.empty()) return;
        if (std::filesystem::path(path).is_absolute()) return;
        std::filesystem::create_directories(out_dir);
        path = (std::filesystem::path(out_dir) / path).string();
    };
    if (global_seed_opt->count() > 0) {
        if (seed_cmd->get_option("--seed")->count() == 0) seed_seed = global_seed;
        if (game_cmd->count_all() > 0 &&
            game_run->get_option("--seed")->count() == 0 &&
            game_adv->get_option("--seed")->count() == 0 &&
            game_bad->get_option("--seed")->count() == 0 &&
            game_cher->get_option("--seed")->count() == 0) {
            g_seed = global_seed;
        }
        if (datagen_cmd->get_option("--seed")->count() == 0) d_seed = global_seed;
        if (accept_cmd->get_option("--seed")->count() == 0) acc.master_seed = global_seed;
    }
    for (std::string* path : {&seed_trace_out, &g_out, &o_out, &d_out, &d_meta_out, &e_out}) {
        resolve(*path);
    }
    if (!out_dir.empty() && *accept_cmd &&
        accept_cmd->get_option("--out-dir")->count() == 0) {
        acc.out_dir = (std::filesystem::path(out_dir) / acc.out_dir).string();
    }

    try {
        if (*seed_cmd) {
            return cmd_seed(seed_data, seed_k, seed_eps, seed_policy, seed_seed, seed_trace_out);
        }
        if (*game_cmd) {
            if (*game_run) {
                return cmd_game_run(g_k, g_eps, g_weights, g_policy, g_seed, g_out, !g_no_normalize);
            }
            if (*game_adv) {
                return cmd_game_advantage(g_k, g_eps, g_weights, g_policy, g_trials, g_seed, g_out,
                                          threads, !g_no_bound_check);
            }
            if (*game_bad) {
                return cmd_game_badness(g_k, g_eps, g_weights, g_policy, g_trials, g_seed, g_ells,
                                        g_out, threads);
            }
            if (*game_cher) {
                return cmd_game_chernoff(g_p, g_ell, g_trials, g_seed, g_out, threads);
            }
        }
        if (*oracle_cmd) return cmd_oracle_opt(o_data, o_k, o_out);
        if (*datagen_cmd) {
            return cmd_datagen(d_family, d_n, d_d, d_ktrue, d_sep, d_seed, d_out, d_meta_out);
        }
        if (*exp_cmd) return cmd_experiment(e_config, e_out, threads);
        if (*accept_cmd) {
            acc.threads = threads;
            if (acc_pilot) {
                noisykmpp::harness::write_pilot_caps(acc.fixtures_dir, threads);
                return 0;
            }
            if (!acc_criteria.empty()) acc.criteria = parse_int_list(acc_criteria);
            const auto report = noisykmpp::harness::run_acceptance(acc);
            return report.all_pass ? 0 : 1;
        }
    } catch (const noisykmpp::AdversaryViolationError& e) {
        std::cerr << "adversary violation: " << e.what() << " (round " << e.round << ", index "
                  << e.index << ", value " << e.value << ", bounds [" << e.lo << ", " << e.hi
                  << "])\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
