#include "noisykmpp/oracle.hpp"

#include "noisykmpp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace noisykmpp::oracle {

namespace {

// Cost of a fixed partition with centroid centers, written directly against
// per-block sums so the enumeration loop stays cheap:
// sum_j ||x_j||^2 - sum_b ||sum_{j in b} x_j||^2 / |b|.
double partition_cost(const Dataset& data, const std::vector<std::size_t>& assign,
                      std::size_t blocks) {
    const std::size_t d = data.dim();
    std::vector<double> sums(blocks * d, 0.0);
    std::vector<std::size_t> counts(blocks, 0);
    double sq_norms = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto p = data.point(i);
        double* dst = sums.data() + assign[i] * d;
        for (std::size_t j = 0; j < d; ++j) {
            dst[j] += p[j];
            sq_norms += p[j] * p[j];
        }
        ++counts[assign[i]];
    }
    double centered = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) {
        if (counts[b] == 0) continue;
        double block_sq = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            block_sq += sums[b * d + j] * sums[b * d + j];
        }
        centered += block_sq / static_cast<double>(counts[b]);
    }
    return sq_norms - centered;
}

} // namespace

OptimalClustering brute_force_optimal(const Dataset& data, std::size_t k) {
    const std::size_t n = data.size();
    if (k == 0 || k > n) throw InputError("brute_force_optimal: need 1 <= k <= n");
    if (n > 12 || k > 4) {
        throw InputError("brute_force_optimal: caps are n <= 12, k <= 4 (combinatorial blowup)");
    }

    // Restricted growth strings: a[0] = 0, a[i] <= max(a[0..i-1]) + 1, labels
    // capped at k. Enumerates each partition into <= k blocks exactly once.
    std::vector<std::size_t> a(n, 0);
    std::vector<std::size_t> best_assign(n, 0);
    double best_cost = std::numeric_limits<double>::infinity();

    std::vector<std::size_t> prefix_max(n, 0);
    while (true) {
        std::size_t blocks = 0;
        for (std::size_t i = 0; i < n; ++i) blocks = std::max(blocks, a[i] + 1);
        const double cost = partition_cost(data, a, blocks);
        if (cost < best_cost) {
            best_cost = cost;
            best_assign = a;
        }

        // next RGS
        prefix_max[0] = a[0];
        for (std::size_t i = 1; i < n; ++i) prefix_max[i] = std::max(prefix_max[i - 1], a[i]);
        std::size_t i = n;
        while (i-- > 1) {
            const std::size_t cap = std::min(prefix_max[i - 1] + 1, k - 1);
            if (a[i] < cap) break;
        }
        if (i == 0) break;
        ++a[i];
        for (std::size_t j = i + 1; j < n; ++j) a[j] = 0;
    }

    OptimalClustering out;
    out.assignment = best_assign;
    out.cost = std::max(best_cost, 0.0);

    std::size_t blocks = 0;
    for (std::size_t i = 0; i < n; ++i) blocks = std::max(blocks, best_assign[i] + 1);
    const std::size_t d = data.dim();
    std::vector<double> sums(blocks * d, 0.0);
    std::vector<std::size_t> counts(blocks, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = data.point(i);
        for (std::size_t j = 0; j < d; ++j) sums[best_assign[i] * d + j] += p[j];
        ++counts[best_assign[i]];
    }
    for (std::size_t b = 0; b < blocks; ++b) {
        std::vector<double> centroid(d, 0.0);
        if (counts[b] > 0) {
            for (std::size_t j = 0; j < d; ++j) {
                centroid[j] = sums[b * d + j] / static_cast<double>(counts[b]);
            }
        }
        out.centers.push_back(centroid, -1, -1);
    }
    return out;
}

DistributionCheck empirical_distribution_check(const std::function<std::size_t()>& sampler,
                                               const ProbVec& exact, std::uint64_t draws,
                                               double threshold) {
    if (draws < 10000) throw InputError("empirical_distribution_check: need draws >= 10^4");
    if (!exact.valid()) throw InputError("empirical_distribution_check: exact vector invalid");

    DistributionCheck out;
    out.threshold = threshold;
    out.counts.assign(exact.size(), 0);
    for (std::uint64_t t = 0; t < draws; ++t) {
        const std::size_t idx = sampler();
        if (idx >= exact.size()) {
            throw InputError("empirical_distribution_check: sampler returned out-of-range index");
        }
        ++out.counts[idx];
    }
    double tv = 0.0;
    for (std::size_t j = 0; j < exact.size(); ++j) {
        const double emp = static_cast<double>(out.counts[j]) / static_cast<double>(draws);
        tv += std::fabs(emp - exact[j]);
    }
    out.tv_distance = 0.5 * tv;
    out.pass = out.tv_distance <= threshold;
    return out;
}

} // namespace noisykmpp::oracle
