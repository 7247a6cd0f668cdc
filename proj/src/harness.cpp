#include "noisykmpp/harness.hpp"

#include "noisykmpp/adversaries.hpp"
#include "noisykmpp/csvio.hpp"
#include "noisykmpp/errors.hpp"
#include "noisykmpp/oracle.hpp"
#include "noisykmpp/rng.hpp"
#include "noisykmpp/seeding.hpp"
#include "noisykmpp/stats.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace noisykmpp::harness {

std::uint64_t tuple_seed(std::uint64_t master, const std::string& key) {
    std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
    for (unsigned char c : key) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return mix64(mix64(master) ^ h);
}

namespace {

Dataset load_instance(const RatioInstance& inst, datagen::PlantedMeta* meta_out) {
    if (inst.gen) {
        auto [data, meta] = datagen::generate(*inst.gen);
        if (meta_out) *meta_out = std::move(meta);
        return data;
    }
    if (!inst.data_path.empty()) return Dataset::load_csv(inst.data_path);
    throw InputError("ratio instance '" + inst.name + "': no data path or generator");
}

double instance_baseline(const RatioInstance& inst, const Dataset& data,
                         const datagen::PlantedMeta& meta) {
    if (inst.baseline == "brute_force") {
        return oracle::brute_force_optimal(data, inst.k).cost;
    }
    if (inst.baseline == "planted") {
        if (!meta.planted_cost) {
            throw InputError("ratio instance '" + inst.name +
                             "': planted baseline requires a generated instance with planted cost");
        }
        return *meta.planted_cost;
    }
    throw InputError("ratio instance '" + inst.name + "': baseline must be brute_force|planted");
}

struct RatioAcc {
    double sum = 0.0, sumsq = 0.0;
    double sum_lloyd = 0.0;
    std::uint64_t degenerate = 0;
    std::uint64_t trials = 0;
};

} // namespace

std::vector<RatioRow> run_ratio_experiment(const RatioPlan& plan, unsigned threads) {
    if (plan.instances.empty() || plan.cells.empty()) {
        throw InputError("ratio plan: nonempty instance and cell grids required");
    }
    if (plan.trials == 0) throw InputError("ratio plan: trials must be >= 1");

    std::vector<RatioRow> rows;
    for (const auto& inst : plan.instances) {
        datagen::PlantedMeta meta;
        const Dataset data = load_instance(inst, &meta);
        if (inst.k == 0 || inst.k > data.size()) {
            throw InputError("ratio instance '" + inst.name + "': need 1 <= k <= n");
        }
        const double baseline_cost = instance_baseline(inst, data, meta);

        for (const auto& cell : plan.cells) {
            std::ostringstream key;
            key << "ratio|instance=" << inst.name << "|k=" << inst.k << "|eps=" << cell.eps
                << "|policy=" << cell.policy;
            const std::uint64_t cell_seed = tuple_seed(plan.master_seed, key.str());

            auto per_trial = [&](RatioAcc& acc, std::uint64_t t) {
                const std::uint64_t run_seed = split_seed(cell_seed, 2 * t);
                const std::uint64_t policy_seed = split_seed(cell_seed, 2 * t + 1);
                auto policy = cell.policy == "null"
                                  ? nullptr
                                  : adversaries::make_seed_policy(cell.policy, cell.eps, policy_seed);
                seeding::NoiseModel noise{cell.eps, policy.get()};
                auto [centers, trace] = seeding::seed(data, inst.k, noise, run_seed);
                const double cost = trace.rounds.back().cost_after;

                double ratio;
                if (baseline_cost > 0.0) {
                    ratio = cost / baseline_cost;
                } else if (cost <= 0.0) {
                    ratio = 1.0;  // cost-0 / cost-0 convention
                    ++acc.degenerate;
                } else {
                    throw InputError("ratio instance '" + inst.name +
                                     "': zero baseline with nonzero seeded cost");
                }
                acc.sum += ratio;
                acc.sumsq += ratio * ratio;
                if (plan.lloyd_iters > 0) {
                    const CenterSet refined = seeding::lloyd_refine(data, centers, plan.lloyd_iters);
                    const double lcost = set_cost(data, refined);
                    acc.sum_lloyd += baseline_cost > 0.0 ? lcost / baseline_cost : 1.0;
                }
                ++acc.trials;
            };
            auto merge = [](RatioAcc& total, const RatioAcc& part) {
                total.sum += part.sum;
                total.sumsq += part.sumsq;
                total.sum_lloyd += part.sum_lloyd;
                total.degenerate += part.degenerate;
                total.trials += part.trials;
            };
            const RatioAcc acc = run_trials<RatioAcc>(plan.trials, threads, per_trial, merge);

            RatioRow row;
            row.instance = inst.name;
            row.eps = cell.eps;
            row.policy = cell.policy;
            row.trials = acc.trials;
            row.baseline = inst.baseline;
            row.baseline_cost = baseline_cost;
            const stats::MeanCi ci = stats::mean_ci(acc.sum, acc.sumsq, acc.trials);
            row.mean_ratio = ci.mean;
            row.ci_lo = ci.lo;
            row.ci_hi = ci.hi;
            row.mean_ratio_lloyd = plan.lloyd_iters > 0
                                       ? acc.sum_lloyd / static_cast<double>(acc.trials)
                                       : std::numeric_limits<double>::quiet_NaN();
            row.degenerate_trials = acc.degenerate;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

void save_ratio_csv(const std::vector<RatioRow>& rows, const std::string& path) {
    std::string out =
        "schema,experiment,instance,eps,policy,trials,baseline,baseline_cost,"
        "mean_ratio,ci_lo,ci_hi,mean_ratio_lloyd,degenerate_trials\n";
    for (const auto& r : rows) {
        out += std::to_string(kSchemaVersion);
        out += ",ratio,";
        out += r.instance;
        out.push_back(',');
        out += csvio::format_double(r.eps);
        out.push_back(',');
        out += r.policy;
        out.push_back(',');
        out += std::to_string(r.trials);
        out.push_back(',');
        out += r.baseline;
        out.push_back(',');
        out += csvio::format_double(r.baseline_cost);
        out.push_back(',');
        out += csvio::format_double(r.mean_ratio);
        out.push_back(',');
        out += csvio::format_double(r.ci_lo);
        out.push_back(',');
        out += csvio::format_double(r.ci_hi);
        out.push_back(',');
        out += csvio::format_double(r.mean_ratio_lloyd);
        out.push_back(',');
        out += std::to_string(r.degenerate_trials);
        out.push_back('\n');
    }
    csvio::write_text(path, out);
}

std::vector<RatioRow> load_ratio_csv(const std::string& path) {
    const auto raw = csvio::read_rows(path);
    if (raw.empty()) throw ParseError("ratio CSV empty: " + path);
    std::vector<RatioRow> rows;
    for (std::size_t i = 1; i < raw.size(); ++i) {
        const auto& c = raw[i];
        if (c.size() != 13) throw ParseError("ratio CSV: bad column count");
        if (csvio::parse_long(c[0]) != kSchemaVersion) throw ParseError("ratio CSV: schema mismatch");
        RatioRow r;
        r.instance = c[2];
        r.eps = csvio::parse_double(c[3]);
        r.policy = c[4];
        r.trials = static_cast<std::uint64_t>(csvio::parse_long(c[5]));
        r.baseline = c[6];
        r.baseline_cost = csvio::parse_double(c[7]);
        r.mean_ratio = csvio::parse_double(c[8]);
        r.ci_lo = csvio::parse_double(c[9]);
        r.ci_hi = csvio::parse_double(c[10]);
        r.mean_ratio_lloyd = csvio::parse_double(c[11], true);
        r.degenerate_trials = static_cast<std::uint64_t>(csvio::parse_long(c[12]));
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<AdvantageRow> run_advantage_sweep(const AdvantagePlan& plan, unsigned threads) {
    if (plan.ks.empty() || plan.epsilons.empty() || plan.policies.empty() ||
        plan.profiles.empty()) {
        throw InputError("advantage plan: nonempty grids required");
    }
    if (plan.trials == 0) throw InputError("advantage plan: trials must be >= 1");

    std::vector<AdvantageRow> rows;
    for (const std::size_t k : plan.ks) {
        for (const double eps : plan.epsilons) {
            for (const auto& policy : plan.policies) {
                for (const auto& profile : plan.profiles) {
                    std::ostringstream key;
                    key << "advantage|k=" << k << "|eps=" << eps << "|policy=" << policy
                        << "|profile=" << profile;
                    const std::uint64_t cell_seed = tuple_seed(plan.master_seed, key.str());

                    game::GameConfig config;
                    config.k = k;
                    config.epsilon = eps;
                    config.initial_weights =
                        datagen::game_weights(profile, k, split_seed(cell_seed, 0xA11CE));
                    config = game::normalize(std::move(config));

                    game::AdvantageOptions opts;
                    opts.threads = threads;
                    opts.check_avg_bound = true;
                    const game::AdvantageEstimate est = game::estimate_advantage(
                        config, adversaries::game_policy_factory(policy, eps), plan.trials,
                        cell_seed, opts);
                    if (est.bound_counterexamples > 0) {
                        throw std::logic_error(
                            "advantage sweep: deterministic bound violated on " +
                            std::to_string(est.bound_counterexamples) +
                            " trace(s); simulator bug");
                    }

                    AdvantageRow row;
                    row.k = k;
                    row.eps = eps;
                    row.policy = policy;
                    row.profile = profile;
                    row.trials = plan.trials;
                    row.max_mean = est.max_mean;
                    row.argmax_round = est.argmax_round;
                    row.max_ci_hi = est.per_round[est.argmax_round].ci_hi;
                    row.bound_counterexamples = est.bound_counterexamples;
                    rows.push_back(std::move(row));
                }
            }
        }
    }
    return rows;
}

void save_advantage_sweep_csv(const std::vector<AdvantageRow>& rows, const std::string& path) {
    std::string out =
        "schema,experiment,k,eps,policy,profile,trials,max_mean,max_ci_hi,argmax_round,"
        "bound_counterexamples\n";
    for (const auto& r : rows) {
        out += std::to_string(kSchemaVersion);
        out += ",advantage,";
        out += std::to_string(r.k);
        out.push_back(',');
        out += csvio::format_double(r.eps);
        out.push_back(',');
        out += r.policy;
        out.push_back(',');
        out += r.profile;
        out.push_back(',');
        out += std::to_string(r.trials);
        out.push_back(',');
        out += csvio::format_double(r.max_mean);
        out.push_back(',');
        out += csvio::format_double(r.max_ci_hi);
        out.push_back(',');
        out += std::to_string(r.argmax_round);
        out.push_back(',');
        out += std::to_string(r.bound_counterexamples);
        out.push_back('\n');
    }
    csvio::write_text(path, out);
}

std::vector<AdvantageRow> load_advantage_sweep_csv(const std::string& path) {
    const auto raw = csvio::read_rows(path);
    if (raw.empty()) throw ParseError("advantage CSV empty: " + path);
    std::vector<AdvantageRow> rows;
    for (std::size_t i = 1; i < raw.size(); ++i) {
        const auto& c = raw[i];
        if (c.size() != 11) throw ParseError("advantage CSV: bad column count");
        if (csvio::parse_long(c[0]) != kSchemaVersion) {
            throw ParseError("advantage CSV: schema mismatch");
        }
        AdvantageRow r;
        r.k = static_cast<std::size_t>(csvio::parse_long(c[2]));
        r.eps = csvio::parse_double(c[3]);
        r.policy = c[4];
        r.profile = c[5];
        r.trials = static_cast<std::uint64_t>(csvio::parse_long(c[6]));
        r.max_mean = csvio::parse_double(c[7]);
        r.max_ci_hi = csvio::parse_double(c[8]);
        r.argmax_round = static_cast<int>(csvio::parse_long(c[9]));
        r.bound_counterexamples = static_cast<std::uint64_t>(csvio::parse_long(c[10]));
        rows.push_back(std::move(r));
    }
    return rows;
}

void run_badness_plan(const BadnessPlan& plan, const std::string& out_path, unsigned threads) {
    game::GameConfig config;
    config.k = plan.k;
    config.epsilon = plan.eps;
    config.initial_weights =
        datagen::game_weights(plan.profile, plan.k, split_seed(plan.master_seed, 0xA11CE));
    config = game::normalize(std::move(config));

    const game::BadnessStats stats_out = game::estimate_badness(
        config, adversaries::game_policy_factory(plan.policy, plan.eps), plan.trials,
        plan.master_seed, plan.ells, threads);

    std::string csv = "schema,experiment,ell,trials,attained,bad_count,freq,bound\n";
    for (std::size_t j = 0; j < plan.ells.size(); ++j) {
        const double freq =
            static_cast<double>(stats_out.bad_counts[j]) / static_cast<double>(plan.trials);
        csv += std::to_string(kSchemaVersion) + ",badness," + std::to_string(plan.ells[j]) + "," +
               std::to_string(plan.trials) + "," + std::to_string(stats_out.attained_counts[j]) +
               "," + std::to_string(stats_out.bad_counts[j]) + "," + csvio::format_double(freq) +
               "," + csvio::format_double(std::exp(-plan.ells[j] / 40.0)) + "\n";
    }
    csvio::write_text(out_path, csv);
}

void run_chernoff_plan(const ChernoffPlan& plan, const std::string& out_path, unsigned threads) {
    const game::ChernoffResult res =
        game::chernoff_check(plan.p, plan.ell, plan.trials, plan.master_seed, threads);
    std::string csv =
        "schema,experiment,p,ell,trials,tail_count,empirical,bound,exact_tail,cp_lo,cp_hi\n";
    csv += std::to_string(kSchemaVersion) + ",chernoff," + csvio::format_double(res.p) + "," +
           std::to_string(res.ell) + "," + std::to_string(res.trials) + "," +
           std::to_string(res.tail_count) + "," + csvio::format_double(res.empirical) + "," +
           csvio::format_double(res.bound) + "," + csvio::format_double(res.exact_tail) + "," +
           csvio::format_double(res.cp_lo) + "," + csvio::format_double(res.cp_hi) + "\n";
    csvio::write_text(out_path, csv);
}

namespace {

datagen::GenSpec parse_gen_spec(const nlohmann::json& doc) {
    datagen::GenSpec spec;
    spec.family = datagen::parse_family(doc.at("family").get<std::string>());
    spec.n = doc.at("n").get<std::size_t>();
    spec.d = doc.at("d").get<std::size_t>();
    spec.k_true = doc.at("k_true").get<std::size_t>();
    spec.separation = doc.value("separation", 0.0);
    spec.seed = doc.value("seed", 0ULL);
    return spec;
}

} // namespace

ExperimentPlan parse_plan(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("experiment plan: ") + e.what());
    }
    ExperimentPlan plan;
    try {
        plan.kind = doc.at("kind").get<std::string>();
        plan.out_path = doc.value("out", std::string());
        if (plan.kind == "ratio") {
            plan.ratio.trials = doc.at("trials").get<std::uint64_t>();
            plan.ratio.master_seed = doc.value("master_seed", 0ULL);
            plan.ratio.lloyd_iters = doc.value("lloyd_iters", 0ULL);
            for (const auto& j : doc.at("instances")) {
                RatioInstance inst;
                inst.name = j.at("name").get<std::string>();
                inst.k = j.at("k").get<std::size_t>();
                inst.baseline = j.value("baseline", std::string("brute_force"));
                if (j.contains("data")) inst.data_path = j.at("data").get<std::string>();
                if (j.contains("gen")) inst.gen = parse_gen_spec(j.at("gen"));
                plan.ratio.instances.push_back(std::move(inst));
            }
            for (const auto& j : doc.at("cells")) {
                plan.ratio.cells.push_back({j.at("eps").get<double>(),
                                            j.at("policy").get<std::string>()});
            }
        } else if (plan.kind == "advantage") {
            plan.advantage.trials = doc.at("trials").get<std::uint64_t>();
            plan.advantage.master_seed = doc.value("master_seed", 0ULL);
            plan.advantage.ks = doc.at("ks").get<std::vector<std::size_t>>();
            plan.advantage.epsilons = doc.at("epsilons").get<std::vector<double>>();
            plan.advantage.policies = doc.at("policies").get<std::vector<std::string>>();
            plan.advantage.profiles = doc.at("profiles").get<std::vector<std::string>>();
        } else if (plan.kind == "badness") {
            plan.badness.k = doc.at("k").get<std::size_t>();
            plan.badness.eps = doc.at("eps").get<double>();
            plan.badness.policy = doc.at("policy").get<std::string>();
            plan.badness.profile = doc.value("profile", std::string("all_ones"));
            plan.badness.ells = doc.at("ells").get<std::vector<int>>();
            plan.badness.trials = doc.at("trials").get<std::uint64_t>();
            plan.badness.master_seed = doc.value("master_seed", 0ULL);
        } else if (plan.kind == "chernoff") {
            plan.chernoff.p = doc.at("p").get<double>();
            plan.chernoff.ell = doc.at("ell").get<long>();
            plan.chernoff.trials = doc.at("trials").get<std::uint64_t>();
            plan.chernoff.master_seed = doc.value("master_seed", 0ULL);
        } else {
            throw ParseError("experiment plan: kind must be ratio|advantage|badness|chernoff");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("experiment plan: ") + e.what());
    }
    return plan;
}

ExperimentPlan load_plan(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open experiment plan: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_plan(ss.str());
}

} // namespace noisykmpp::harness
