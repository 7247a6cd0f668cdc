#pragma once

#include <stdexcept>
#include <string>

namespace noisykmpp {

// Bad arguments: dimension mismatch, k > n, infeasible generator specs, ...
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// set_cost(X, C) == 0: there is no mass to sample from. Callers decide the
// fallback policy; the core never silently substitutes a uniform draw.
class DegenerateInstanceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A perturbation or reweigh policy broke its contract (multiplier band,
// weight monotonicity, or the final distribution checks).
class AdversaryViolationError : public std::runtime_error {
public:
    AdversaryViolationError(std::string message, int round, long index,
                            double value, double lo, double hi)
        : std::runtime_error(std::move(message)),
          round(round), index(index), value(value), lo(lo), hi(hi) {}

    int round = -1;
    long index = -1;
    double value = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

// Malformed CSV / JSON inputs (datasets, policy specs, experiment plans).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace noisykmpp
