#include "nilring/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>

namespace nilring {

namespace {
unsigned g_threads = 0;
}

unsigned default_thread_count() {
    if (const char* env = std::getenv("NILRING_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void set_thread_count(unsigned n) { g_threads = n; }

unsigned thread_count() { return g_threads == 0 ? default_thread_count() : g_threads; }

void parallel_blocks(std::uint64_t n, std::uint64_t block_size,
                     const std::function<void(std::size_t, std::uint64_t, std::uint64_t)>& body) {
    if (n == 0) return;
    if (block_size == 0) block_size = 1;
    const std::uint64_t nblocks = block_count(n, block_size);
    unsigned workers = thread_count();
    if (workers > nblocks) workers = static_cast<unsigned>(nblocks);

    if (workers <= 1) {
        for (std::uint64_t b = 0; b < nblocks; ++b) {
            std::uint64_t lo = b * block_size;
            std::uint64_t hi = lo + block_size < n ? lo + block_size : n;
            body(static_cast<std::size_t>(b), lo, hi);
        }
        return;
    }

    std::atomic<std::uint64_t> next{0};
    auto work = [&]() {
        for (;;) {
            std::uint64_t b = next.fetch_add(1);
            if (b >= nblocks) break;
            std::uint64_t lo = b * block_size;
            std::uint64_t hi = lo + block_size < n ? lo + block_size : n;
            body(static_cast<std::size_t>(b), lo, hi);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
}

}  // namespace nilring
