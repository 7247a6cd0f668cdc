#pragma once

#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

namespace noisykmpp {

inline unsigned default_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// Runs trials [0, n) split into contiguous per-worker ranges and merges the
// per-worker accumulators in worker order. With fixed n, seed derivation per
// trial index, and a fixed thread count, the result is byte-stable: trial
// work never depends on scheduling, only the merge order matters and it is
// pinned.
//
// Acc must be default-constructible; accumulate(acc, trial_index) folds one
// trial; merge(total, acc) folds one worker accumulator.
template <typename Acc, typename PerTrial, typename Merge>
Acc run_trials(std::uint64_t n, unsigned threads, PerTrial accumulate, Merge merge) {
    threads = std::max(1u, threads);
    if (n == 0) return Acc{};
    const unsigned workers =
        static_cast<unsigned>(std::min<std::uint64_t>(threads, n));
    std::vector<Acc> partial(workers);
    if (workers == 1) {
        for (std::uint64_t t = 0; t < n; ++t) accumulate(partial[0], t);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            const std::uint64_t lo = n * w / workers;
            const std::uint64_t hi = n * (w + 1) / workers;
            pool.emplace_back([&, w, lo, hi]() {
                for (std::uint64_t t = lo; t < hi; ++t) accumulate(partial[w], t);
            });
        }
        for (auto& th : pool) th.join();
    }
    Acc total = std::move(partial[0]);
    for (unsigned w = 1; w < workers; ++w) merge(total, partial[w]);
    return total;
}

} // namespace noisykmpp
