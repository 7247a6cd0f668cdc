#include "noisykmpp/core.hpp"

#include "noisykmpp/csvio.hpp"
#include "noisykmpp/errors.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace noisykmpp {

Dataset::Dataset(std::vector<double> flat, std::size_t dim)
    : flat_(std::move(flat)), dim_(dim) {
    if (dim_ == 0) throw InputError("Dataset: dimension must be >= 1");
    if (flat_.empty() || flat_.size() % dim_ != 0) {
        throw InputError("Dataset: flat size must be a positive multiple of dim");
    }
    n_ = flat_.size() / dim_;
    for (double v : flat_) {
        if (!std::isfinite(v)) throw InputError("Dataset: non-finite coordinate");
    }
}

Dataset Dataset::from_points(const std::vector<Point>& points) {
    if (points.empty()) throw InputError("Dataset: need at least one point");
    const std::size_t dim = points.front().size();
    std::vector<double> flat;
    flat.reserve(points.size() * dim);
    for (const auto& p : points) {
        if (p.size() != dim) throw InputError("Dataset: mixed dimensions");
        flat.insert(flat.end(), p.begin(), p.end());
    }
    return Dataset(std::move(flat), dim);
}

Dataset Dataset::load_csv(const std::string& path) {
    const auto rows = csvio::read_rows(path);
    if (rows.empty()) throw ParseError("dataset CSV is empty: " + path);
    const std::size_t dim = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * dim);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != dim) {
            throw ParseError("dataset CSV ragged row " + std::to_string(r + 1) + ": " + path);
        }
        for (const auto& cell : rows[r]) flat.push_back(csvio::parse_double(cell));
    }
    return Dataset(std::move(flat), dim);
}

void Dataset::save_csv(const std::string& path) const {
    std::string out;
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < dim_; ++j) {
            if (j) out.push_back(',');
            out += csvio::format_double(flat_[i * dim_ + j]);
        }
        out.push_back('\n');
    }
    csvio::write_text(path, out);
}

Point Dataset::point_copy(std::size_t i) const {
    const auto sp = point(i);
    return Point(sp.begin(), sp.end());
}

void CenterSet::push_back(std::span<const double> coords, int round, long index) {
    if (dim == 0) dim = coords.size();
    if (coords.size() != dim) throw InputError("CenterSet: mixed dimensions");
    flat.insert(flat.end(), coords.begin(), coords.end());
    source_rounds.push_back(round);
    source_indices.push_back(index);
}

CenterSet CenterSet::from_points(const std::vector<Point>& centers) {
    CenterSet out;
    for (const auto& c : centers) out.push_back(c, -1, -1);
    return out;
}

double ProbVec::sum() const {
    double s = 0.0;
    for (double p : probs) s += p;
    return s;
}

bool ProbVec::valid(double tol) const {
    for (double p : probs) {
        if (!(p >= 0.0) || !std::isfinite(p)) return false;
    }
    return std::fabs(sum() - 1.0) <= tol;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw InputError("squared_distance: dimension mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

double point_cost(std::span<const double> x, const CenterSet& centers) {
    if (centers.size() == 0) throw InputError("point_cost: empty center set");
    if (centers.dim != x.size()) throw InputError("point_cost: dimension mismatch");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centers.size(); ++c) {
        best = std::min(best, squared_distance(x, centers.center(c)));
    }
    return best;
}

double point_cost(const Point& x, const CenterSet& centers) {
    return point_cost(std::span<const double>(x.data(), x.size()), centers);
}

double set_cost(const Dataset& data, const CenterSet& centers) {
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        total += point_cost(data.point(i), centers);
    }
    return total;
}

ProbVec d2_distribution(const Dataset& data, const CenterSet& centers) {
    std::vector<double> costs(data.size());
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        costs[i] = point_cost(data.point(i), centers);
        total += costs[i];
    }
    if (total <= 0.0) {
        throw DegenerateInstanceError("d2_distribution: set_cost is 0, no mass to sample");
    }
    ProbVec out;
    out.probs.resize(costs.size());
    const double inv = 1.0 / total;
    for (std::size_t i = 0; i < costs.size(); ++i) out.probs[i] = costs[i] * inv;
    return out;
}

std::size_t sample_index(const ProbVec& dist, double u) {
    if (dist.size() == 0) throw InputError("sample_index: empty distribution");
    double acc = 0.0;
    for (std::size_t j = 0; j < dist.size(); ++j) {
        acc += dist.probs[j];
        if (u < acc) return j;
    }
    for (std::size_t j = dist.size(); j-- > 0;) {
        if (dist.probs[j] > 0.0) return j;
    }
    throw DegenerateInstanceError("sample_index: all-zero distribution");
}

} // namespace noisykmpp
