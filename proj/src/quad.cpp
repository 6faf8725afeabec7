#include "lz/quad.hpp"

#include <atomic>
#include <thread>

namespace lz {

namespace {
std::atomic<int> g_threads{1};
}

void set_threads(int threads) { g_threads = std::max(1, threads); }
int get_threads() { return g_threads; }

void parallel_for(int n, const std::function<void(int)>& fn) {
    int workers = std::min(get_threads(), n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (int i = w; i < n; i += workers) fn(i);
        });
    for (auto& t : pool) t.join();
}

double wynn_epsilon(const std::vector<double>& s) {
    const int n = int(s.size());
    if (n < 3) return n ? s.back() : 0.0;
    std::vector<double> prev(n + 1, 0.0), cur(s.begin(), s.end());
    double best = s.back();
    // columns alternate between auxiliary (odd) and estimate (even) entries
    for (int k = 1; k < n; ++k) {
        std::vector<double> next(n - k);
        for (int i = 0; i < n - k; ++i) {
            double d = cur[i + 1] - cur[i];
            if (d == 0.0) return cur[i + 1];
            next[i] = (k == 1 ? 0.0 : prev[i + 1]) + 1.0 / d;
        }
        prev = cur;
        cur = next;
        if (k % 2 == 0 && !cur.empty()) best = cur.back();
    }
    return best;
}

}  // namespace lz
