#include "pairclust/threading.hpp"

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace pairclust {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("PAIRCLUST_THREADS")) {
        try {
            int v = std::stoi(env);
            if (v > 0) return v;
        } catch (...) {
            // fall through to hardware concurrency
        }
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_chunks(std::int64_t begin, std::int64_t end, int threads,
                     const std::function<void(std::int64_t, std::int64_t)>& fn) {
    std::int64_t count = end - begin;
    if (count <= 0) return;
    if (threads < 1) threads = 1;
    std::int64_t chunks = std::min<std::int64_t>(threads, count);
    if (chunks == 1) {
        fn(begin, end);
        return;
    }
    std::int64_t base = count / chunks;
    std::int64_t rem = count % chunks;
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(chunks));
    std::int64_t cursor = begin;
    for (std::int64_t c = 0; c < chunks; ++c) {
        std::int64_t len = base + (c < rem ? 1 : 0);
        std::int64_t lo = cursor;
        std::int64_t hi = cursor + len;
        cursor = hi;
        workers.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& w : workers) w.join();
}

}  // namespace pairclust
