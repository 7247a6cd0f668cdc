#include "noisykmpp/seeding.hpp"

#include "noisykmpp/csvio.hpp"
#include "noisykmpp/errors.hpp"
#include "noisykmpp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace noisykmpp::seeding {

namespace {

constexpr double kTol = 1e-9;

void check_noise_model(const NoiseModel& noise) {
    if (!(noise.epsilon >= 0.0 && noise.epsilon < 0.5)) {
        throw InputError("NoiseModel: epsilon must satisfy 0 <= eps < 1/2");
    }
}

// Largest t in [0,1] such that base .* (1 + t*(m-1)), renormalized, stays in
// the band. All constraints are linear in t and hold at t = 0, so the
// feasible set is an interval [0, t*].
double feasible_scale(const ProbVec& base, std::span<const double> m, double epsilon) {
    double total = 0.0;
    for (std::size_t i = 0; i < base.size(); ++i) total += base[i] * m[i];
    const double drift = total - 1.0;
    double t = 1.0;
    for (std::size_t i = 0; i < base.size(); ++i) {
        if (!(base[i] > 0.0)) continue;
        const double a = m[i] - 1.0;
        const double slope_lo = a - (1.0 - epsilon) * drift;
        if (slope_lo < 0.0) t = std::min(t, epsilon / -slope_lo);
        const double slope_hi = (1.0 + epsilon) * drift - a;
        if (slope_hi < 0.0) t = std::min(t, epsilon / -slope_hi);
    }
    return std::max(t, 0.0);
}

ProbVec scaled_perturbation(const ProbVec& base, std::span<const double> m, double t) {
    double total = 0.0;
    for (std::size_t i = 0; i < base.size(); ++i) total += base[i] * m[i];
    const double tt = 1.0 + t * (total - 1.0);
    const double inv = 1.0 / tt;
    ProbVec out;
    out.probs.resize(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        out.probs[i] = base[i] * (1.0 + t * (m[i] - 1.0)) * inv;
    }
    return out;
}

} // namespace

PerturbCheck validate_perturbation(const ProbVec& base, const ProbVec& perturbed,
                                   double epsilon) {
    if (base.size() != perturbed.size()) {
        throw InputError("validate_perturbation: length mismatch");
    }
    PerturbCheck check;
    double sum = 0.0;
    for (std::size_t i = 0; i < base.size(); ++i) {
        sum += perturbed[i];
        const double lo = (1.0 - epsilon) * base[i];
        const double hi = (1.0 + epsilon) * base[i];
        if (check.ok && (perturbed[i] < lo - kTol || perturbed[i] > hi + kTol)) {
            check.ok = false;
            check.index = static_cast<long>(i);
            check.value = perturbed[i];
            check.lo = lo;
            check.hi = hi;
            check.reason = "entry outside [(1-eps)*base, (1+eps)*base]";
        }
    }
    check.sum = sum;
    if (check.ok && std::fabs(sum - 1.0) > kTol) {
        check.ok = false;
        check.reason = "perturbed vector does not sum to 1";
    }
    return check;
}

ProbVec apply_multipliers(const ProbVec& base, std::span<const double> multipliers,
                          double epsilon, int round) {
    if (base.size() != multipliers.size()) {
        throw InputError("apply_multipliers: length mismatch");
    }
    bool uniform_tilt = true;
    for (std::size_t i = 0; i < multipliers.size(); ++i) {
        const double m = multipliers[i];
        if (!std::isfinite(m) || m < 1.0 - epsilon - kTol || m > 1.0 + epsilon + kTol) {
            throw AdversaryViolationError("policy multiplier outside [1-eps, 1+eps]",
                                          round, static_cast<long>(i), m,
                                          1.0 - epsilon, 1.0 + epsilon);
        }
        uniform_tilt = uniform_tilt && m == multipliers[0];
    }
    // A constant multiplier cancels under renormalization.
    if (uniform_tilt) return base;
    double t = feasible_scale(base, multipliers, epsilon);
    for (int attempt = 0; attempt < 64; ++attempt) {
        ProbVec out = scaled_perturbation(base, multipliers, t);
        if (validate_perturbation(base, out, epsilon).ok) return out;
        t *= 0.5;  // halve toward the all-ones anchor
    }
    return scaled_perturbation(base, multipliers, 0.0);
}

std::pair<CenterSet, SeedingTrace> seed(const Dataset& X, std::size_t k,
                                        const NoiseModel& noise, std::uint64_t rng_seed) {
    check_noise_model(noise);
    const std::size_t n = X.size();
    if (k == 0 || k > n) throw InputError("seed: need 1 <= k <= n");

    CounterRng rng(split_seed(rng_seed, 0));
    CenterSet centers;
    SeedingTrace trace;
    std::vector<double> cost(n, std::numeric_limits<double>::infinity());
    std::vector<char> chosen(n, 0);
    std::vector<double> multipliers(n, 1.0);

    for (std::size_t round = 0; round < k; ++round) {
        SeedingRound rec;
        rec.round = static_cast<int>(round);
        rec.base.probs.assign(n, 0.0);

        if (round == 0) {
            const double u = 1.0 / static_cast<double>(n);
            rec.base.probs.assign(n, u);
        } else {
            double total = 0.0;
            for (std::size_t j = 0; j < n; ++j) total += cost[j];
            if (total > 0.0) {
                const double inv = 1.0 / total;
                for (std::size_t j = 0; j < n; ++j) rec.base.probs[j] = cost[j] * inv;
            } else {
                // Duplicate-heavy data: every remaining point already sits on
                // a center. Uniform over not-yet-chosen indices, flagged.
                rec.uniform_fallback = true;
                std::size_t remaining = 0;
                for (std::size_t j = 0; j < n; ++j) remaining += chosen[j] ? 0u : 1u;
                const double u = 1.0 / static_cast<double>(remaining);
                for (std::size_t j = 0; j < n; ++j) rec.base.probs[j] = chosen[j] ? 0.0 : u;
            }
        }

        if (noise.policy != nullptr) {
            std::fill(multipliers.begin(), multipliers.end(), 1.0);
            noise.policy->perturb(rec.round, rec.base, trace, multipliers);
            rec.perturbed = apply_multipliers(rec.base, multipliers, noise.epsilon, rec.round);
        } else {
            rec.perturbed = rec.base;
        }
        const PerturbCheck check = validate_perturbation(rec.base, rec.perturbed, noise.epsilon);
        if (!check.ok) {
            throw AdversaryViolationError("seeding round emitted invalid distribution: " + check.reason,
                                          rec.round, check.index, check.value, check.lo, check.hi);
        }

        const double u = rng.next_double();
        const std::size_t idx = sample_index(rec.perturbed, u);
        rec.sampled_index = idx;
        chosen[idx] = 1;
        centers.push_back(X.point(idx), rec.round, static_cast<long>(idx));

        double total_after = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            cost[j] = std::min(cost[j], squared_distance(X.point(j), X.point(idx)));
            total_after += cost[j];
        }
        rec.cost_after = total_after;
        trace.rounds.push_back(std::move(rec));
    }
    return {std::move(centers), std::move(trace)};
}

CenterSet lloyd_refine(const Dataset& X, const CenterSet& C, std::size_t max_iters) {
    if (C.size() == 0) throw InputError("lloyd_refine: empty center set");
    if (C.dim != X.dim()) throw InputError("lloyd_refine: dimension mismatch");
    const std::size_t n = X.size();
    const std::size_t k = C.size();
    const std::size_t d = X.dim();

    CenterSet current = C;
    std::vector<std::size_t> assign(n, 0);
    std::vector<std::size_t> prev_assign(n, std::numeric_limits<std::size_t>::max());

    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            std::size_t best_c = 0;
            for (std::size_t c = 0; c < k; ++c) {
                const double dist = squared_distance(X.point(i), current.center(c));
                if (dist < best) {
                    best = dist;
                    best_c = c;
                }
            }
            assign[i] = best_c;
        }
        if (assign == prev_assign) break;
        prev_assign = assign;

        std::vector<double> sums(k * d, 0.0);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto p = X.point(i);
            double* dst = sums.data() + assign[i] * d;
            for (std::size_t j = 0; j < d; ++j) dst[j] += p[j];
            ++counts[assign[i]];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;  // empty cluster keeps its center
            const double inv = 1.0 / static_cast<double>(counts[c]);
            for (std::size_t j = 0; j < d; ++j) {
                current.flat[c * d + j] = sums[c * d + j] * inv;
            }
            current.source_indices[c] = -1;
        }
    }
    return current;
}

void save_trace_csv(const SeedingTrace& trace, const std::string& path) {
    std::string out = "round,sampled_index,base_prob_of_sampled,perturbed_prob_of_sampled,cost_after\n";
    for (const auto& r : trace.rounds) {
        out += std::to_string(r.round);
        out.push_back(',');
        out += std::to_string(r.sampled_index);
        out.push_back(',');
        out += csvio::format_double(r.base[r.sampled_index]);
        out.push_back(',');
        out += csvio::format_double(r.perturbed[r.sampled_index]);
        out.push_back(',');
        out += csvio::format_double(r.cost_after);
        out.push_back('\n');
    }
    csvio::write_text(path, out);
}

} // namespace noisykmpp::seeding
