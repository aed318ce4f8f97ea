#ifndef NILRING_FASTPATH_HPP
#define NILRING_FASTPATH_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <functional>
#include <span>

#include "nilring/group.hpp"
#include "nilring/index_set.hpp"

namespace nilring {

// Fixed-width coordinate vector for enumeration loops (covers d <= 4).
inline constexpr std::size_t kMaxFlatCoords = 12;

struct FlatKey {
    std::array<std::int64_t, kMaxFlatCoords> c{};
    std::uint8_t len = 0;

    friend bool operator==(const FlatKey& a, const FlatKey& b) {
        if (a.len != b.len) return false;
        for (std::uint8_t i = 0; i < a.len; ++i)
            if (a.c[i] != b.c[i]) return false;
        return true;
    }
    friend bool operator<(const FlatKey& a, const FlatKey& b) {
        if (a.len != b.len) return a.len < b.len;
        for (std::uint8_t i = 0; i < a.len; ++i)
            if (a.c[i] != b.c[i]) return a.c[i] < b.c[i];
        return false;
    }
};

struct FlatKeyHash {
    std::size_t operator()(const FlatKey& k) const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (std::uint8_t i = 0; i < k.len; ++i) {
            std::uint64_t v = static_cast<std::uint64_t>(k.c[i]);
            for (int b = 0; b < 8; ++b) {
                h ^= (v >> (8 * b)) & 0xff;
                h *= 0x100000001b3ULL;
            }
        }
        return static_cast<std::size_t>(h);
    }
};

// Group law on raw int64 coordinates (no overflow checks; callers must
// pre-bound the ranges, see fast_path_fits).
void fast_multiply(const IndexSet& ix, const std::int64_t* g, const std::int64_t* h,
                   std::int64_t* out);
void fast_inverse(const IndexSet& ix, const std::int64_t* g, std::int64_t* out);

// Closed-form alternating product of 2r moment-curve factors on int64 input.
void fast_closed_form(const IndexSet& ix, const std::int64_t* n, const std::int64_t* m, int r,
                      Variant variant, std::int64_t* out);

// Per-coordinate magnitude bound of the closed form over inputs |.| <= N.
// Doubles; used to decide whether the int64 path is safe.
double closed_form_coord_bound(int l1, int l2, int r, double N);
bool fast_path_fits(int d, int r, double N, double extra_headroom = 4.0);

FlatKey to_flat_key(const GroupElement& g);           // throws if out of int64 range
GroupElement from_flat_key(int d, const FlatKey& k);

}  // namespace nilring

#endif
