#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace noisykmpp {

using Point = std::vector<double>;

// Immutable point set in R^d, row-major flat storage. Duplicates are kept as
// distinct indices: all sampling is over indices, not distinct values.
class Dataset {
public:
    Dataset(std::vector<double> flat, std::size_t dim);
    static Dataset from_points(const std::vector<Point>& points);

    // CSV: one point per row, fixed column count, no header, decimal reals.
    // Ragged rows and non-finite values are rejected.
    static Dataset load_csv(const std::string& path);
    void save_csv(const std::string& path) const;

    std::size_t size() const { return n_; }
    std::size_t dim() const { return dim_; }
    std::span<const double> point(std::size_t i) const {
        return {flat_.data() + i * dim_, dim_};
    }
    Point point_copy(std::size_t i) const;
    std::span<const double> flat() const { return flat_; }

private:
    std::vector<double> flat_;
    std::size_t n_ = 0;
    std::size_t dim_ = 0;
};

// Ordered centers with provenance. source_rounds / source_indices are -1 for
// centers that are not dataset members (e.g. Lloyd centroids).
struct CenterSet {
    std::vector<double> flat;      // |centers| x dim
    std::size_t dim = 0;
    std::vector<int> source_rounds;
    std::vector<long> source_indices;

    std::size_t size() const { return dim == 0 ? 0 : flat.size() / dim; }
    std::span<const double> center(std::size_t i) const {
        return {flat.data() + i * dim, dim};
    }
    void push_back(std::span<const double> coords, int round, long index);
    static CenterSet from_points(const std::vector<Point>& centers);
};

// Discrete distribution over active indices.
struct ProbVec {
    std::vector<double> probs;

    std::size_t size() const { return probs.size(); }
    double operator[](std::size_t i) const { return probs[i]; }
    double sum() const;
    // Entries nonnegative, sum within tol of 1.
    bool valid(double tol = 1e-9) const;
};

double squared_distance(std::span<const double> a, std::span<const double> b);

// min_{c in C} ||x - c||^2
double point_cost(std::span<const double> x, const CenterSet& centers);
double point_cost(const Point& x, const CenterSet& centers);

// Sum of point_cost over the dataset.
double set_cost(const Dataset& data, const CenterSet& centers);

// D^2 distribution: probs[j] = point_cost(x_j, C) / set_cost(X, C).
// Throws DegenerateInstanceError when set_cost is 0.
ProbVec d2_distribution(const Dataset& data, const CenterSet& centers);

// Inverse-CDF sample from a distribution with a single uniform draw:
// smallest j with u < cumsum(j). Zero entries are never selected; if the
// accumulated sum falls short of u (float slack), the last positive entry
// wins.
std::size_t sample_index(const ProbVec& dist, double u);

} // namespace noisykmpp
