#include "fracscrew/threading.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>

namespace fracscrew::threading {

int max_threads() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("FRACSCREW_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1 && cap < hw) hw = cap;
    }
    return hw;
}

std::vector<double> parallel_map(std::size_t n,
                                 const std::function<double(std::size_t)>& work) {
    std::vector<double> out(n, 0.0);
    int nt = max_threads();
    if (nt == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) out[i] = work(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    auto runner = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            out[i] = work(i);
        }
    };
    std::vector<std::thread> pool;
    int spawn = std::min<std::size_t>(nt, n);
    pool.reserve(spawn);
    for (int t = 0; t < spawn; ++t) pool.emplace_back(runner);
    for (auto& th : pool) th.join();
    return out;
}

} // namespace fracscrew::threading
