#include "pcgdn/threading.hpp"

namespace pcgdn {

namespace {
int g_threads = 1;
}

int num_threads() { return g_threads; }

void set_num_threads(int n) {
    if (n <= 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        n = hw > 0 ? static_cast<int>(hw) : 1;
    }
    g_threads = n;
}

void parallel_for(int64_t n, const std::function<void(int, int64_t, int64_t)>& fn) {
    if (n <= 0) return;
    const int chunks = static_cast<int>(std::min<int64_t>(g_threads, n));
    if (chunks <= 1) {
        fn(0, 0, n);
        return;
    }
    const int64_t per = (n + chunks - 1) / chunks;
    std::vector<std::thread> workers;
    workers.reserve(static_cast<size_t>(chunks) - 1);
    for (int c = 1; c < chunks; ++c) {
        const int64_t b = c * per;
        const int64_t e = std::min<int64_t>(n, b + per);
        if (b >= e) break;
        workers.emplace_back([&fn, c, b, e] { fn(c, b, e); });
    }
    fn(0, 0, std::min<int64_t>(per, n));
    for (auto& w : workers) w.join();
}

} // namespace pcgdn
