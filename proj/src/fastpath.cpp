#include "nilring/fastpath.hpp"

#include <cmath>
#include <stdexcept>

namespace nilring {

void fast_multiply(const IndexSet& ix, const std::int64_t* g, const std::int64_t* h,
                   std::int64_t* out) {
    const int d = ix.d();
    for (int i = 0; i < d; ++i) out[i] = g[i] + h[i];
    for (std::size_t i = d; i < ix.size(); ++i) {
        auto [l1, l2] = ix.index(i);
        out[i] = g[i] + h[i] + g[l1 - 1] * h[l2 - 1];
    }
}

void fast_inverse(const IndexSet& ix, const std::int64_t* g, std::int64_t* out) {
    const int d = ix.d();
    for (int i = 0; i < d; ++i) out[i] = -g[i];
    for (std::size_t i = d; i < ix.size(); ++i) {
        auto [l1, l2] = ix.index(i);
        out[i] = -g[i] + g[l1 - 1] * g[l2 - 1];
    }
}

void fast_closed_form(const IndexSet& ix, const std::int64_t* n, const std::int64_t* m, int r,
                      Variant variant, std::int64_t* out) {
    const int d = ix.d();
    const bool tilde = variant == Variant::DTilde;
    // Powers up to 2d per slot; r and d are tiny here.
    std::int64_t xp[32][9], yp[32][9];
    for (int j = 0; j < r; ++j) {
        xp[j][0] = 1;
        yp[j][0] = 1;
        for (int l = 1; l <= 2 * d; ++l) {
            xp[j][l] = xp[j][l - 1] * n[j];
            yp[j][l] = yp[j][l - 1] * m[j];
        }
    }
    auto delta = [&](int j, int l) {
        return tilde ? xp[j][l] - yp[j][l] : yp[j][l] - xp[j][l];
    };
    for (int l1 = 1; l1 <= d; ++l1) {
        std::int64_t s = 0;
        for (int j = 0; j < r; ++j) s += delta(j, l1);
        out[l1 - 1] = s;
    }
    for (std::size_t i = d; i < ix.size(); ++i) {
        auto [l1, l2] = ix.index(i);
        std::int64_t s = 0;
        std::int64_t prefix = 0;
        for (int j2 = 0; j2 < r; ++j2) {
            if (j2 > 0) prefix += delta(j2 - 1, l1);
            s += prefix * delta(j2, l2);
        }
        for (int j = 0; j < r; ++j)
            s += (tilde ? yp[j][l1 + l2] : xp[j][l1 + l2]) - xp[j][l1] * yp[j][l2];
        out[i] = s;
    }
}

double closed_form_coord_bound(int l1, int l2, int r, double N) {
    if (l2 == 0) return 2.0 * r * std::pow(N, l1);
    double cross = 0.5 * r * (r - 1) * (2.0 * std::pow(N, l1)) * (2.0 * std::pow(N, l2));
    double diag = 2.0 * r * std::pow(N, l1 + l2);
    return cross + diag;
}

bool fast_path_fits(int d, int r, double N, double extra_headroom) {
    if (r > 32 || IndexSet::get(d).size() > kMaxFlatCoords) return false;
    const IndexSet& ix = IndexSet::get(d);
    const double limit = 9.0e18 / extra_headroom;
    for (std::size_t i = 0; i < ix.size(); ++i) {
        auto [l1, l2] = ix.index(i);
        if (closed_form_coord_bound(l1, l2, r, N) > limit) return false;
    }
    return true;
}

FlatKey to_flat_key(const GroupElement& g) {
    if (g.size() > kMaxFlatCoords) throw std::invalid_argument("degree too large for flat key");
    FlatKey k;
    k.len = static_cast<std::uint8_t>(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!g[i].fits_slong_p()) throw std::invalid_argument("coordinate out of int64 range");
        k.c[i] = g[i].get_si();
    }
    return k;
}

GroupElement from_flat_key(int d, const FlatKey& k) {
    std::vector<mpz_class> coords(k.len);
    for (std::uint8_t i = 0; i < k.len; ++i) coords[i] = static_cast<long>(k.c[i]);
    return GroupElement(d, std::move(coords));
}

}  // namespace nilring
