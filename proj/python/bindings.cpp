#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "noisykmpp/adversaries.hpp"
#include "noisykmpp/core.hpp"
#include "noisykmpp/errors.hpp"
#include "noisykmpp/datagen.hpp"
#include "noisykmpp/game.hpp"
#include "noisykmpp/oracle.hpp"
#include "noisykmpp/rng.hpp"
#include "noisykmpp/seeding.hpp"
#include "noisykmpp/stats.hpp"

namespace py = pybind11;
using namespace noisykmpp;

namespace {

Dataset dataset_from_rows(const std::vector<std::vector<double>>& rows) {
    return Dataset::from_points(rows);
}

std::vector<std::vector<double>> centers_as_rows(const CenterSet& c) {
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const auto sp = c.center(i);
        out.emplace_back(sp.begin(), sp.end());
    }
    return out;
}

game::GameConfig make_config(std::size_t k, double epsilon, std::vector<double> weights,
                             double big_threshold, double small_threshold) {
    game::GameConfig config;
    config.k = k;
    config.epsilon = epsilon;
    config.initial_weights = std::move(weights);
    config.thresholds = {big_threshold, small_threshold};
    return config;
}

} // namespace

PYBIND11_MODULE(_noisykmpp, m) {
    m.doc() = "noisy k-means++ seeding and the adversarial sampling game";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<DegenerateInstanceError>(m, "DegenerateInstanceError",
                                                    PyExc_RuntimeError);
    py::register_exception<AdversaryViolationError>(m, "AdversaryViolationError",
                                                    PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    py::class_<Dataset>(m, "Dataset")
        .def(py::init(&dataset_from_rows), py::arg("points"))
        .def_static("load_csv", &Dataset::load_csv, py::arg("path"))
        .def("save_csv", &Dataset::save_csv, py::arg("path"))
        .def("__len__", &Dataset::size)
        .def_property_readonly("dim", &Dataset::dim)
        .def("point", &Dataset::point_copy, py::arg("i"));

    py::class_<CenterSet>(m, "CenterSet")
        .def(py::init(&CenterSet::from_points), py::arg("centers"))
        .def("__len__", &CenterSet::size)
        .def_property_readonly("points", &centers_as_rows)
        .def_readonly("source_rounds", &CenterSet::source_rounds)
        .def_readonly("source_indices", &CenterSet::source_indices);

    py::class_<ProbVec>(m, "ProbVec")
        .def(py::init([](std::vector<double> probs) { return ProbVec{std::move(probs)}; }))
        .def_readonly("probs", &ProbVec::probs)
        .def("valid", &ProbVec::valid, py::arg("tol") = 1e-9);

    m.def("point_cost",
          [](const Point& x, const CenterSet& c) { return point_cost(x, c); },
          py::arg("x"), py::arg("centers"));
    m.def("set_cost", &set_cost, py::arg("data"), py::arg("centers"));
    m.def("d2_distribution", &d2_distribution, py::arg("data"), py::arg("centers"));
    m.def("sample_index", &sample_index, py::arg("dist"), py::arg("u"));
    m.def("split_seed", &split_seed, py::arg("master"), py::arg("stream"));

    // seeding
    py::class_<seeding::SeedingRound>(m, "SeedingRound")
        .def_readonly("round", &seeding::SeedingRound::round)
        .def_readonly("base", &seeding::SeedingRound::base)
        .def_readonly("perturbed", &seeding::SeedingRound::perturbed)
        .def_readonly("sampled_index", &seeding::SeedingRound::sampled_index)
        .def_readonly("cost_after", &seeding::SeedingRound::cost_after)
        .def_readonly("uniform_fallback", &seeding::SeedingRound::uniform_fallback);
    py::class_<seeding::SeedingTrace>(m, "SeedingTrace")
        .def_readonly("rounds", &seeding::SeedingTrace::rounds);

    m.def(
        "seed",
        [](const Dataset& data, std::size_t k, double epsilon, const std::string& policy,
           std::uint64_t rng_seed) {
            auto pol = policy == "null"
                           ? nullptr
                           : adversaries::make_seed_policy(policy, epsilon,
                                                           split_seed(rng_seed, 1));
            seeding::NoiseModel noise{epsilon, pol.get()};
            return seeding::seed(data, k, noise, rng_seed);
        },
        py::arg("data"), py::arg("k"), py::arg("epsilon") = 0.0, py::arg("policy") = "null",
        py::arg("rng_seed") = 1,
        "Noisy k-means++ seeding; returns (CenterSet, SeedingTrace).");

    m.def(
        "validate_perturbation",
        [](const ProbVec& base, const ProbVec& perturbed, double epsilon) {
            const auto check = seeding::validate_perturbation(base, perturbed, epsilon);
            py::dict out;
            out["ok"] = check.ok;
            out["index"] = check.index;
            out["value"] = check.value;
            out["lo"] = check.lo;
            out["hi"] = check.hi;
            out["sum"] = check.sum;
            out["reason"] = check.reason;
            return out;
        },
        py::arg("base"), py::arg("perturbed"), py::arg("epsilon"));

    m.def("lloyd_refine", &seeding::lloyd_refine, py::arg("data"), py::arg("centers"),
          py::arg("max_iters"));

    // game
    py::class_<game::GameConfig>(m, "GameConfig")
        .def(py::init(&make_config), py::arg("k"), py::arg("epsilon"), py::arg("weights"),
             py::arg("big_threshold") = 80.0, py::arg("small_threshold") = 2.0)
        .def_readonly("k", &game::GameConfig::k)
        .def_readonly("epsilon", &game::GameConfig::epsilon)
        .def_readonly("initial_weights", &game::GameConfig::initial_weights);
    m.def("normalize", &game::normalize, py::arg("config"),
          "Scale weights so the mean initial weight is exactly 1.");

    py::class_<game::RoundSnapshot>(m, "RoundSnapshot")
        .def_readonly("round", &game::RoundSnapshot::round)
        .def_readonly("removed_id", &game::RoundSnapshot::removed_id)
        .def_readonly("size_big", &game::RoundSnapshot::size_big)
        .def_readonly("size_medium", &game::RoundSnapshot::size_medium)
        .def_readonly("size_small", &game::RoundSnapshot::size_small)
        .def_readonly("mass_big", &game::RoundSnapshot::mass_big)
        .def_readonly("mass_medium", &game::RoundSnapshot::mass_medium)
        .def_readonly("mass_small", &game::RoundSnapshot::mass_small)
        .def_readonly("avg_weight", &game::RoundSnapshot::avg_weight)
        .def_readonly("degenerate", &game::RoundSnapshot::degenerate)
        .def_readonly("base", &game::RoundSnapshot::base)
        .def_readonly("perturbed", &game::RoundSnapshot::perturbed);
    py::class_<game::GameTrace>(m, "GameTrace")
        .def_readonly("k", &game::GameTrace::k)
        .def_readonly("epsilon", &game::GameTrace::epsilon)
        .def_readonly("rounds", &game::GameTrace::rounds);

    m.def(
        "game_run",
        [](const game::GameConfig& config, const std::string& policy, std::uint64_t rng_seed,
           bool record_distributions) {
            auto pol = adversaries::game_policy_factory(policy, config.epsilon)(
                split_seed(rng_seed, 1));
            game::RunOptions opts;
            opts.record_distributions = record_distributions;
            return game::run(config, *pol, rng_seed, opts);
        },
        py::arg("config"), py::arg("policy") = "null", py::arg("rng_seed") = 1,
        py::arg("record_distributions") = false);

    py::class_<game::BadnessEntry>(m, "BadnessEntry")
        .def_readonly("ell", &game::BadnessEntry::ell)
        .def_readonly("i_ell", &game::BadnessEntry::i_ell)
        .def_readonly("i_2ell", &game::BadnessEntry::i_2ell)
        .def_readonly("attained", &game::BadnessEntry::attained)
        .def_readonly("bad", &game::BadnessEntry::bad);
    py::class_<game::BadnessReport>(m, "BadnessReport")
        .def_readonly("s0", &game::BadnessReport::s0)
        .def_readonly("entries", &game::BadnessReport::entries)
        .def_readonly("ell_max", &game::BadnessReport::ell_max);
    m.def("analyze", &game::analyze, py::arg("trace"), py::arg("upper_mult") = 8.0,
          py::arg("lower_mult") = 4.0);

    py::class_<game::AvgBoundCheck>(m, "AvgBoundCheck")
        .def_readonly("ok", &game::AvgBoundCheck::ok)
        .def_readonly("round", &game::AvgBoundCheck::round)
        .def_readonly("avg", &game::AvgBoundCheck::avg)
        .def_readonly("bound", &game::AvgBoundCheck::bound);
    m.def("assert_avg_bound", &game::assert_avg_bound, py::arg("trace"), py::arg("report"),
          "Deterministic check: every round's average weight <= 90 * ell_max.");

    py::class_<game::RoundStat>(m, "RoundStat")
        .def_readonly("round", &game::RoundStat::round)
        .def_readonly("trials", &game::RoundStat::trials)
        .def_readonly("mean", &game::RoundStat::mean)
        .def_readonly("se", &game::RoundStat::se)
        .def_readonly("ci_lo", &game::RoundStat::ci_lo)
        .def_readonly("ci_hi", &game::RoundStat::ci_hi);
    py::class_<game::AdvantageEstimate>(m, "AdvantageEstimate")
        .def_readonly("per_round", &game::AdvantageEstimate::per_round)
        .def_readonly("max_mean", &game::AdvantageEstimate::max_mean)
        .def_readonly("argmax_round", &game::AdvantageEstimate::argmax_round)
        .def_readonly("bound_counterexamples",
                      &game::AdvantageEstimate::bound_counterexamples);
    m.def(
        "estimate_advantage",
        [](const game::GameConfig& config, const std::string& policy, std::uint64_t trials,
           std::uint64_t master_seed, unsigned threads, bool check_bound) {
            game::AdvantageOptions opts;
            opts.threads = threads;
            opts.check_avg_bound = check_bound;
            return game::estimate_advantage(
                config, adversaries::game_policy_factory(policy, config.epsilon), trials,
                master_seed, opts);
        },
        py::arg("config"), py::arg("policy"), py::arg("trials"), py::arg("master_seed") = 1,
        py::arg("threads") = 1, py::arg("check_bound") = true);

    py::class_<game::ChernoffResult>(m, "ChernoffResult")
        .def_readonly("p", &game::ChernoffResult::p)
        .def_readonly("ell", &game::ChernoffResult::ell)
        .def_readonly("trials", &game::ChernoffResult::trials)
        .def_readonly("tail_count", &game::ChernoffResult::tail_count)
        .def_readonly("empirical", &game::ChernoffResult::empirical)
        .def_readonly("bound", &game::ChernoffResult::bound)
        .def_readonly("exact_tail", &game::ChernoffResult::exact_tail)
        .def_readonly("cp_lo", &game::ChernoffResult::cp_lo)
        .def_readonly("cp_hi", &game::ChernoffResult::cp_hi)
        .def_readonly("within_bound", &game::ChernoffResult::within_bound)
        .def_readonly("within_ci_of_exact", &game::ChernoffResult::within_ci_of_exact);
    m.def("chernoff_check", &game::chernoff_check, py::arg("p"), py::arg("ell"),
          py::arg("trials"), py::arg("master_seed") = 1, py::arg("threads") = 1);

    // oracle
    py::class_<oracle::OptimalClustering>(m, "OptimalClustering")
        .def_readonly("assignment", &oracle::OptimalClustering::assignment)
        .def_readonly("cost", &oracle::OptimalClustering::cost)
        .def_property_readonly(
            "centers", [](const oracle::OptimalClustering& o) { return centers_as_rows(o.centers); });
    m.def("brute_force_optimal", &oracle::brute_force_optimal, py::arg("data"), py::arg("k"));

    // datagen
    m.def(
        "generate",
        [](const std::string& family, std::size_t n, std::size_t d, std::size_t k_true,
           double separation, std::uint64_t seed) {
            datagen::GenSpec spec;
            spec.family = datagen::parse_family(family);
            spec.n = n;
            spec.d = d;
            spec.k_true = k_true;
            spec.separation = separation;
            spec.seed = seed;
            auto [data, meta] = datagen::generate(spec);
            py::dict meta_out;
            meta_out["true_means"] = meta.true_means;
            meta_out["assignment"] = meta.assignment;
            if (meta.planted_cost) meta_out["planted_cost"] = *meta.planted_cost;
            return py::make_tuple(std::move(data), std::move(meta_out));
        },
        py::arg("family"), py::arg("n"), py::arg("d"), py::arg("k_true"),
        py::arg("separation") = 0.0, py::arg("seed") = 0);
    m.def("game_weights", &datagen::game_weights, py::arg("generator"), py::arg("k"),
          py::arg("seed") = 0);
}
