#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace pcgdn {

// Process-wide worker count used by the compute kernels. 1 = fully
// sequential (the reproducibility mode exercised by the determinism tests).
int num_threads();
void set_num_threads(int n); // n <= 0 picks hardware concurrency

// Splits [0, n) into one contiguous chunk per worker and runs
// fn(chunk_index, begin, end) on each. Chunk boundaries depend only on n and
// the configured thread count, so per-chunk partial results combined in
// chunk order are reproducible for a fixed thread count.
void parallel_for(int64_t n, const std::function<void(int, int64_t, int64_t)>& fn);

// Convenience elementwise form.
inline void parallel_for_each(int64_t n, const std::function<void(int64_t)>& fn) {
    parallel_for(n, [&](int, int64_t b, int64_t e) {
        for (int64_t i = b; i < e; ++i) fn(i);
    });
}

} // namespace pcgdn
