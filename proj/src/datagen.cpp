#include "noisykmpp/datagen.hpp"

#include "noisykmpp/csvio.hpp"
#include "noisykmpp/errors.hpp"
#include "noisykmpp/rng.hpp"
#include "noisykmpp/stats.hpp"

#include <json.hpp>

#include <cmath>
#include <numeric>

namespace noisykmpp::datagen {

Family parse_family(const std::string& name) {
    if (name == "gaussian_mixture") return Family::GaussianMixture;
    if (name == "uniform_cube") return Family::UniformCube;
    if (name == "separated_clusters") return Family::SeparatedClusters;
    throw InputError("unknown family '" + name +
                     "' (gaussian_mixture|uniform_cube|separated_clusters)");
}

std::string family_name(Family family) {
    switch (family) {
        case Family::GaussianMixture: return "gaussian_mixture";
        case Family::UniformCube: return "uniform_cube";
        case Family::SeparatedClusters: return "separated_clusters";
    }
    return "?";
}

namespace {

void check_spec(const GenSpec& spec) {
    if (spec.n == 0 || spec.d == 0 || spec.k_true == 0) {
        throw InputError("GenSpec: n, d, k_true must be >= 1");
    }
    if (spec.n < spec.k_true) throw InputError("GenSpec: need n >= k_true");
    if (!(spec.separation >= 0.0)) throw InputError("GenSpec: separation must be >= 0");
}

// Cluster means. Exact pairwise distance `separation` needs a regular
// simplex, which fits when d >= k_true (scaled basis vectors); otherwise
// means sit on the first axis with spacing `separation`, so pairwise
// distances are still >= separation.
std::vector<Point> cluster_means(const GenSpec& spec) {
    std::vector<Point> means(spec.k_true, Point(spec.d, 0.0));
    if (spec.d >= spec.k_true && spec.k_true > 1) {
        const double scale = spec.separation / std::sqrt(2.0);
        for (std::size_t c = 0; c < spec.k_true; ++c) means[c][c] = scale;
    } else {
        for (std::size_t c = 0; c < spec.k_true; ++c) {
            means[c][0] = spec.separation * static_cast<double>(c);
        }
    }
    return means;
}

// Points are dealt round-robin so cluster sizes differ by at most one.
std::size_t planted_cluster(std::size_t i, std::size_t k_true) { return i % k_true; }

} // namespace

std::pair<Dataset, PlantedMeta> generate(const GenSpec& spec) {
    check_spec(spec);
    CounterRng rng(split_seed(spec.seed, 0));
    PlantedMeta meta;
    std::vector<double> flat;
    flat.reserve(spec.n * spec.d);

    switch (spec.family) {
        case Family::UniformCube: {
            for (std::size_t i = 0; i < spec.n * spec.d; ++i) flat.push_back(rng.next_double());
            break;
        }
        case Family::SeparatedClusters: {
            const auto means = cluster_means(spec);
            for (std::size_t i = 0; i < spec.n; ++i) {
                const std::size_t c = planted_cluster(i, spec.k_true);
                meta.assignment.push_back(c);
                flat.insert(flat.end(), means[c].begin(), means[c].end());
            }
            meta.true_means = means;
            meta.planted_cost = 0.0;
            break;
        }
        case Family::GaussianMixture: {
            const auto means = cluster_means(spec);
            double planted = 0.0;
            for (std::size_t i = 0; i < spec.n; ++i) {
                const std::size_t c = planted_cluster(i, spec.k_true);
                meta.assignment.push_back(c);
                for (std::size_t j = 0; j < spec.d; ++j) {
                    const double z = stats::inverse_normal_cdf(rng.next_open_double());
                    flat.push_back(means[c][j] + z);
                    planted += z * z;
                }
            }
            meta.true_means = means;
            meta.planted_cost = planted;
            break;
        }
    }
    return {Dataset(std::move(flat), spec.d), std::move(meta)};
}

void save_meta_json(const GenSpec& spec, const PlantedMeta& meta, const std::string& path) {
    nlohmann::json doc;
    doc["family"] = family_name(spec.family);
    doc["n"] = spec.n;
    doc["d"] = spec.d;
    doc["k_true"] = spec.k_true;
    doc["separation"] = spec.separation;
    doc["seed"] = spec.seed;
    if (!meta.true_means.empty()) doc["true_means"] = meta.true_means;
    if (meta.planted_cost) doc["planted_cost"] = *meta.planted_cost;
    csvio::write_text(path, doc.dump(2) + "\n");
}

std::vector<double> game_weights(const std::string& generator, std::size_t k,
                                 std::uint64_t seed) {
    if (k == 0) throw InputError("game_weights: k must be >= 1");
    if (generator == "all_ones") {
        return std::vector<double>(k, 1.0);
    }
    if (generator == "pareto_tail") {
        // Pareto(alpha = 1.5) tail, then normalized so the mean is exactly 1.
        CounterRng rng(split_seed(seed, 0));
        std::vector<double> w(k);
        double total = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double u = rng.next_open_double();
            w[i] = std::pow(1.0 - u, -1.0 / 1.5);
            total += w[i];
        }
        const double scale = static_cast<double>(k) / total;
        for (double& v : w) v *= scale;
        return w;
    }
    if (generator.rfind("one_heavy(", 0) == 0 && generator.back() == ')') {
        const std::string arg = generator.substr(10, generator.size() - 11);
        const double m = csvio::parse_double(arg);
        if (!(m >= 0.0)) throw InputError("one_heavy: weight must be >= 0");
        if (m > static_cast<double>(k)) {
            throw InputError("one_heavy: weight exceeds k, the rest would be negative");
        }
        std::vector<double> w(k, 0.0);
        w[0] = m;
        if (k > 1) {
            const double rest = (static_cast<double>(k) - m) / static_cast<double>(k - 1);
            for (std::size_t i = 1; i < k; ++i) w[i] = rest;
        } else if (m != 1.0) {
            throw InputError("one_heavy: k = 1 forces weight 1");
        }
        return w;
    }
    throw InputError("unknown weight generator '" + generator +
                     "' (all_ones|pareto_tail|one_heavy(m))");
}

} // namespace noisykmpp::datagen
