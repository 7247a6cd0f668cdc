#include "noisykmpp/adversaries.hpp"

#include "noisykmpp/errors.hpp"
#include "noisykmpp/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace noisykmpp::adversaries {

void GameAdversary::perturb(const RoundView& view, std::span<double> multipliers) {
    std::array<double, 3> cm{1.0, 1.0, 1.0};
    if (class_multipliers(view, cm)) {
        for (std::size_t i = 0; i < multipliers.size(); ++i) {
            multipliers[i] = cm[static_cast<int>(view.classes[i])];
        }
    } else {
        std::fill(multipliers.begin(), multipliers.end(), 1.0);
    }
}

namespace {

class NullPolicy final : public GameAdversary {
public:
    std::string name() const override { return "null"; }
    bool class_multipliers(const RoundView&, std::array<double, 3>& out) override {
        out = {1.0, 1.0, 1.0};
        return true;
    }
};

class RandomPolicy final : public GameAdversary {
public:
    RandomPolicy(double epsilon, std::uint64_t seed) : epsilon_(epsilon), seed_(seed) {}
    std::string name() const override { return "random"; }
    void perturb(const RoundView& view, std::span<double> multipliers) override {
        CounterRng rng(split_seed(seed_, static_cast<std::uint64_t>(view.round)));
        for (double& m : multipliers) {
            m = 1.0 - epsilon_ + 2.0 * epsilon_ * rng.next_double();
        }
    }

private:
    double epsilon_;
    std::uint64_t seed_;
};

// Pushes removals onto small elements (1+eps) and away from big ones
// (1-eps); mediums are truncated down to the small threshold each round so
// the small set keeps churning. Big weights are left alone.
class DriftPolicy final : public GameAdversary {
public:
    explicit DriftPolicy(double epsilon) : epsilon_(epsilon) {}
    std::string name() const override { return "drift"; }
    bool class_multipliers(const RoundView&, std::array<double, 3>& out) override {
        out[static_cast<int>(game::WeightClass::Big)] = 1.0 - epsilon_;
        out[static_cast<int>(game::WeightClass::Medium)] = 1.0;
        out[static_cast<int>(game::WeightClass::Small)] = 1.0 + epsilon_;
        return true;
    }
    void reweigh(const RoundView& view, std::uint32_t, std::vector<WeightEdit>& edits) override {
        edits.clear();
        if (view.count_medium == 0) return;
        for (std::size_t i = 0; i < view.classes.size(); ++i) {
            if (view.classes[i] == game::WeightClass::Medium) {
                edits.push_back({static_cast<std::uint32_t>(i), view.thresholds.small});
            }
        }
    }

private:
    double epsilon_;
};

class ScriptedPolicy final : public GameAdversary {
public:
    explicit ScriptedPolicy(ScriptedSpec spec) : spec_(std::move(spec)) {
        cm_ = {1.0, 1.0, 1.0};
        for (const auto& rule : spec_.rules) {
            cm_[static_cast<int>(rule.when)] = rule.multiplier;
        }
    }
    std::string name() const override { return spec_.name; }
    bool class_multipliers(const RoundView&, std::array<double, 3>& out) override {
        out = cm_;
        return true;
    }
    void reweigh(const RoundView& view, std::uint32_t, std::vector<WeightEdit>& edits) override {
        edits.clear();
        if (spec_.reweigh.empty()) return;
        const std::array<long, 3> counts = {static_cast<long>(view.count_big),
                                            static_cast<long>(view.count_medium),
                                            static_cast<long>(view.count_small)};
        for (const auto& rule : spec_.reweigh) {
            if (counts[static_cast<int>(rule.when)] == 0) continue;
            for (std::size_t i = 0; i < view.classes.size(); ++i) {
                if (view.classes[i] == rule.when && view.weights[i] > rule.floor_to) {
                    edits.push_back({static_cast<std::uint32_t>(i), rule.floor_to});
                }
            }
        }
    }

private:
    ScriptedSpec spec_;
    std::array<double, 3> cm_{};
};

game::WeightClass parse_class(const std::string& s, const std::string& field) {
    if (s == "big") return game::WeightClass::Big;
    if (s == "medium") return game::WeightClass::Medium;
    if (s == "small") return game::WeightClass::Small;
    throw ParseError("policy spec: unknown class '" + s + "' in field '" + field +
                     "' (expected big|medium|small)");
}

} // namespace

std::unique_ptr<GameAdversary> null_policy() { return std::make_unique<NullPolicy>(); }

std::unique_ptr<GameAdversary> random_policy(double epsilon, std::uint64_t seed) {
    if (!(epsilon >= 0.0 && epsilon < 0.5)) {
        throw InputError("random_policy: epsilon must satisfy 0 <= eps < 1/2");
    }
    return std::make_unique<RandomPolicy>(epsilon, seed);
}

std::unique_ptr<GameAdversary> drift_policy(double epsilon) {
    if (!(epsilon >= 0.0 && epsilon < 0.5)) {
        throw InputError("drift_policy: epsilon must satisfy 0 <= eps < 1/2");
    }
    return std::make_unique<DriftPolicy>(epsilon);
}

ScriptedSpec parse_scripted_spec(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("policy spec: ") + e.what());
    }
    ScriptedSpec spec;
    try {
        spec.name = doc.value("name", std::string("scripted"));
        if (!doc.contains("epsilon")) throw ParseError("policy spec: missing field 'epsilon'");
        spec.epsilon = doc.at("epsilon").get<double>();
        if (!(spec.epsilon >= 0.0 && spec.epsilon < 0.5)) {
            throw ParseError("policy spec: epsilon must satisfy 0 <= eps < 1/2");
        }
        for (const auto& rule : doc.value("rules", nlohmann::json::array())) {
            ScriptedRule r;
            r.when = parse_class(rule.at("when").get<std::string>(), "rules.when");
            r.multiplier = rule.at("multiplier").get<double>();
            if (!std::isfinite(r.multiplier) || r.multiplier < 1.0 - spec.epsilon ||
                r.multiplier > 1.0 + spec.epsilon) {
                std::ostringstream msg;
                msg << "policy spec: multiplier " << r.multiplier
                    << " outside [1-eps, 1+eps] for eps=" << spec.epsilon;
                throw ParseError(msg.str());
            }
            spec.rules.push_back(r);
        }
        for (const auto& rule : doc.value("reweigh", nlohmann::json::array())) {
            ScriptedReweigh r;
            r.when = parse_class(rule.at("when").get<std::string>(), "reweigh.when");
            r.floor_to = rule.at("floor_to").get<double>();
            if (!std::isfinite(r.floor_to) || r.floor_to < 0.0) {
                throw ParseError("policy spec: floor_to must be finite and >= 0");
            }
            spec.reweigh.push_back(r);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("policy spec: ") + e.what());
    }
    return spec;
}

ScriptedSpec load_scripted_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open policy spec: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scripted_spec(ss.str());
}

std::unique_ptr<GameAdversary> scripted_policy(ScriptedSpec spec) {
    return std::make_unique<ScriptedPolicy>(std::move(spec));
}

game::PolicyFactory game_policy_factory(const std::string& spec, double epsilon) {
    if (spec == "null") {
        return [](std::uint64_t) { return null_policy(); };
    }
    if (spec == "random") {
        return [epsilon](std::uint64_t seed) { return random_policy(epsilon, seed); };
    }
    if (spec == "drift") {
        return [epsilon](std::uint64_t) { return drift_policy(epsilon); };
    }
    if (spec.rfind("file:", 0) == 0) {
        ScriptedSpec parsed = load_scripted_spec(spec.substr(5));
        for (const auto& rule : parsed.rules) {
            if (rule.multiplier < 1.0 - epsilon || rule.multiplier > 1.0 + epsilon) {
                std::ostringstream msg;
                msg << "policy '" << parsed.name << "': multiplier " << rule.multiplier
                    << " outside the run band for eps=" << epsilon;
                throw InputError(msg.str());
            }
        }
        return [parsed](std::uint64_t) { return scripted_policy(parsed); };
    }
    throw InputError("unknown game policy '" + spec + "' (null|random|drift|file:<path>)");
}

bool is_known_game_policy(const std::string& spec) {
    return spec == "null" || spec == "random" || spec == "drift" || spec.rfind("file:", 0) == 0;
}

namespace {

class NullSeedPolicy final : public seeding::SeedNoisePolicy {
public:
    std::string name() const override { return "null"; }
    void perturb(int, const ProbVec&, const seeding::SeedingTrace&,
                 std::span<double> multipliers) override {
        std::fill(multipliers.begin(), multipliers.end(), 1.0);
    }
};

class RandomSeedPolicy final : public seeding::SeedNoisePolicy {
public:
    RandomSeedPolicy(double epsilon, std::uint64_t seed) : epsilon_(epsilon), seed_(seed) {}
    std::string name() const override { return "random"; }
    void perturb(int round, const ProbVec&, const seeding::SeedingTrace&,
                 std::span<double> multipliers) override {
        CounterRng rng(split_seed(seed_, static_cast<std::uint64_t>(round)));
        for (double& m : multipliers) {
            m = 1.0 - epsilon_ + 2.0 * epsilon_ * rng.next_double();
        }
    }

private:
    double epsilon_;
    std::uint64_t seed_;
};

} // namespace

std::unique_ptr<seeding::SeedNoisePolicy> make_seed_policy(const std::string& name,
                                                           double epsilon,
                                                           std::uint64_t seed) {
    if (!(epsilon >= 0.0 && epsilon < 0.5)) {
        throw InputError("make_seed_policy: epsilon must satisfy 0 <= eps < 1/2");
    }
    if (name == "null") return std::make_unique<NullSeedPolicy>();
    if (name == "random") return std::make_unique<RandomSeedPolicy>(epsilon, seed);
    throw InputError("unknown seed-noise policy '" + name + "' (null|random)");
}

} // namespace noisykmpp::adversaries
