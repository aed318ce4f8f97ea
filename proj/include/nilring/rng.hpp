#ifndef NILRING_RNG_HPP
#define NILRING_RNG_HPP

#include <cstdint>

namespace nilring {

// Counter-based generator: output i depends only on (seed, i), so sample
// streams can be partitioned across threads without changing the values.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t bits(std::uint64_t counter) const {
        std::uint64_t z = seed_ + (counter + 1) * 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform(std::uint64_t counter) const {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    // Uniform in [-1, 1).
    double symmetric(std::uint64_t counter) const {
        return 2.0 * uniform(counter) - 1.0;
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
};

}  // namespace nilring

#endif
