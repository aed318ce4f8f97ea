#ifndef NILRING_PARALLEL_HPP
#define NILRING_PARALLEL_HPP

#include <cstdint>
#include <functional>
#include <vector>

namespace nilring {

// Default worker count: NILRING_THREADS if set, else hardware concurrency.
unsigned default_thread_count();

// Set the worker count for subsequent parallel sections (0 = default).
void set_thread_count(unsigned n);
unsigned thread_count();

// Splits [0, n) into fixed-size blocks, runs `body(block_index, begin, end)`
// on a pool, and returns when all blocks are done.  Block boundaries depend
// only on n and block_size, never on the thread count, so any block-local
// accumulation combined in block order is reproducible.
void parallel_blocks(std::uint64_t n, std::uint64_t block_size,
                     const std::function<void(std::size_t, std::uint64_t, std::uint64_t)>& body);

inline std::uint64_t block_count(std::uint64_t n, std::uint64_t block_size) {
    return block_size == 0 ? 0 : (n + block_size - 1) / block_size;
}

}  // namespace nilring

#endif
