#include "nilring/weyl.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "nilring/bump.hpp"
#include "nilring/kahan.hpp"
#include "nilring/parallel.hpp"
#include "nilring/rng.hpp"

namespace nilring {

namespace {

constexpr double kTau = 6.283185307179586476925286766559;
constexpr std::size_t kMaxStackCoords = 16;

std::complex<double> phase_e(double z) {  // e(z) = exp(2 pi i z)
    return {std::cos(kTau * z), std::sin(kTau * z)};
}

double ipow(double b, int e) { return std::pow(b, e); }

// Direct enumeration over all tuples.
std::complex<double> weyl_direct(long P, int r, std::span<const double> theta, int d,
                                 const WeightFunction& phi, const WeightFunction& psi,
                                 Variant variant) {
    const long V = 2 * P + 1;
    const std::size_t k = static_cast<std::size_t>(2 * r);
    const std::size_t ncoords = IndexSet::get(d).size();
    std::vector<long> digits(k, 0);
    std::vector<double> x(r), y(r);
    double coords[kMaxStackCoords];
    KahanComplex acc;
    for (;;) {
        double w = 1.0;
        for (int j = 0; j < r; ++j) {
            x[j] = static_cast<double>(digits[j] - P);
            y[j] = static_cast<double>(digits[r + j] - P);
            w *= phi(x[j]) * psi(y[j]);
        }
        if (w != 0.0) {
            closed_form_product_real_into(x, y, d, variant, coords);
            double dot = 0.0;
            for (std::size_t i = 0; i < ncoords; ++i) dot += coords[i] * theta[i];
            acc.add(w * phase_e(-dot));
        }
        std::size_t pos = 0;
        while (pos < k) {
            if (++digits[pos] < V) break;
            digits[pos] = 0;
            ++pos;
        }
        if (pos == k) break;
    }
    return acc.value();
}

// Prefix-sum dynamic program.  The phase splits over steps j = 1..r as
//   phase_j = sum_l theta_{l,0} delta_j^(l)
//           + sum_{(l1,l2) central} theta_{l1,l2} (s_{l1} delta_j^(l2) + diag_j)
// where s is the running sum of earlier deltas and delta/diag depend on the
// variant.  Only power levels l1 with a nonzero central frequency enter the
// state, so a single active level gives a one-dimensional state array.
std::complex<double> weyl_prefix_dp(long P, int r, std::span<const double> theta, int d,
                                    const WeightFunction& phi, const WeightFunction& psi,
                                    Variant variant, const WorkBudget& budget) {
    const IndexSet& ix = IndexSet::get(d);
    const bool tilde = variant == Variant::DTilde;
    const long V = 2 * P + 1;

    std::vector<int> active;  // l1 levels with some nonzero central frequency
    for (int l1 = 2; l1 <= d; ++l1) {
        bool used = false;
        for (std::size_t i = d; i < ix.size(); ++i)
            if (ix.index(i).first == l1 && theta[i] != 0.0) used = true;
        if (used) active.push_back(l1);
    }
    if (active.size() > 1)
        throw BudgetError("prefix strategy supports at most one active central level here");

    // State: running sum of delta^(l) for the single active level (or none).
    const int L = active.empty() ? 0 : active[0];
    const long span = active.empty() ? 0 : 2 * r * static_cast<long>(std::llround(ipow(P, L)));
    const long width = 2 * span + 1;
    budget.check(static_cast<double>(width) * V * V * r, "weyl_sum prefix strategy");

    std::vector<std::complex<double>> cur(width, 0.0), nxt;
    cur[span] = 1.0;  // empty prefix at s = 0

    // Per-pair precomputation: weight, delta for the active level, and the
    // phase pieces independent of / linear in the state.
    struct Pair {
        double w;
        long dl;       // state increment
        double c0;     // constant phase turns
        double cs;     // coefficient of s in phase turns
    };
    std::vector<Pair> pairs;
    pairs.reserve(static_cast<std::size_t>(V) * V);
    for (long a = -P; a <= P; ++a) {
        for (long b = -P; b <= P; ++b) {
            double w = phi(static_cast<double>(a)) * psi(static_cast<double>(b));
            if (w == 0.0) continue;
            double x = static_cast<double>(a), y = static_cast<double>(b);
            auto dl = [&](int l) { return tilde ? ipow(x, l) - ipow(y, l) : ipow(y, l) - ipow(x, l); };
            double c0 = 0.0, cs = 0.0;
            for (int l = 1; l <= d; ++l) c0 += theta[l - 1] * dl(l);
            for (std::size_t i = d; i < ix.size(); ++i) {
                auto [l1, l2] = ix.index(i);
                if (theta[i] == 0.0) continue;
                double diag = (tilde ? ipow(y, l1 + l2) : ipow(x, l1 + l2)) - ipow(x, l1) * ipow(y, l2);
                c0 += theta[i] * diag;
                if (l1 == L) cs += theta[i] * dl(l2);
            }
            Pair p;
            p.w = w;
            p.dl = L == 0 ? 0 : std::llround(dl(L));
            p.c0 = c0;
            p.cs = cs;
            pairs.push_back(p);
        }
    }

    for (int j = 0; j < r; ++j) {
        nxt.assign(width, 0.0);
        for (long si = 0; si < width; ++si) {
            std::complex<double> amp = cur[si];
            if (amp == 0.0) continue;
            const double s = static_cast<double>(si - span);
            for (const Pair& p : pairs) {
                double turns = p.c0 + p.cs * s;
                nxt[si + p.dl] += amp * p.w * phase_e(-turns);
            }
        }
        cur.swap(nxt);
    }
    KahanComplex acc;
    for (const auto& z : cur) acc.add(z);
    return acc.value();
}

struct McAccum {
    std::complex<double> sum{0.0, 0.0};
    double sumsq = 0.0;  // sum of |term|^2
    std::uint64_t count = 0;
};

// Deterministic block reduction: per-block Kahan accumulation, blocks
// combined in index order regardless of thread count.
template <class SampleFn>
McAccum mc_reduce(std::uint64_t samples, SampleFn&& fn) {
    const std::uint64_t kBlock = 65536;
    const std::uint64_t nblocks = block_count(samples, kBlock);
    std::vector<McAccum> partial(nblocks);
    parallel_blocks(samples, kBlock, [&](std::size_t b, std::uint64_t lo, std::uint64_t hi) {
        KahanComplex sum;
        KahanSum sumsq;
        for (std::uint64_t i = lo; i < hi; ++i) {
            std::complex<double> t = fn(i);
            sum.add(t);
            sumsq.add(std::norm(t));
        }
        partial[b].sum = sum.value();
        partial[b].sumsq = sumsq.value();
        partial[b].count = hi - lo;
    });
    McAccum total;
    KahanComplex sum;
    KahanSum sumsq;
    for (const auto& p : partial) {
        sum.add(p.sum);
        sumsq.add(p.sumsq);
        total.count += p.count;
    }
    total.sum = sum.value();
    total.sumsq = sumsq.value();
    return total;
}

McResult phase_integral(int d, std::span<const double> freq, int r, Variant variant, double sign,
                        const McParams& mc, const WorkBudget& budget) {
    const IndexSet& ix = IndexSet::get(d);
    if (freq.size() != ix.size()) throw std::invalid_argument("frequency dimension mismatch");
    if (mc.samples < 1000) throw std::invalid_argument("need at least 1000 samples");
    budget.check(static_cast<double>(mc.samples) * 2 * r, "oscillatory integral");

    CounterRng rng(mc.seed);
    const std::size_t dim = static_cast<std::size_t>(2 * r);
    const std::size_t ncoords = ix.size();
    const double volume = ipow(2.0, 2 * r);

    McAccum acc = mc_reduce(mc.samples, [&](std::uint64_t i) {
        double pt[64];
        double coords[kMaxStackCoords];
        for (std::size_t k = 0; k < dim; ++k) pt[k] = rng.symmetric(i * dim + k);
        std::span<const double> x(pt, static_cast<std::size_t>(r));
        std::span<const double> y(pt + r, static_cast<std::size_t>(r));
        closed_form_product_real_into(x, y, d, variant, coords);
        double dot = 0.0;
        for (std::size_t k = 0; k < ncoords; ++k) dot += coords[k] * freq[k];
        return phase_e(sign * dot);
    });

    McResult out;
    out.samples = acc.count;
    out.seed = mc.seed;
    std::complex<double> mean = acc.sum / static_cast<double>(acc.count);
    out.value = volume * mean;
    double var = acc.sumsq / static_cast<double>(acc.count) - std::norm(mean);
    if (var < 0.0) var = 0.0;
    out.stderr_est = volume * std::sqrt(var / static_cast<double>(acc.count));
    return out;
}

}  // namespace

double WeightFunction::operator()(double x) const {
    if (std::abs(x) > P) return 0.0;
    if (kind == Kind::Indicator) return 1.0;
    return bump_profile(2.0 * x / P);
}

SumResult weyl_sum(long P, int r, std::span<const double> theta, int d, WeightFunction phi,
                   WeightFunction psi, Variant variant, WeylStrategy strategy,
                   const WorkBudget& budget) {
    const IndexSet& ix = IndexSet::get(d);
    if (theta.size() != ix.size())
        throw std::invalid_argument("theta dimension must equal d + d'");
    if (P < 1) throw std::invalid_argument("P must be >= 1");

    const double direct_cost = ipow(static_cast<double>(2 * P + 1), 2 * r) * (2.0 * r);
    std::complex<double> value;
    if (strategy == WeylStrategy::Direct ||
        (strategy == WeylStrategy::Auto && direct_cost <= static_cast<double>(budget.max_ops))) {
        budget.check(direct_cost, "weyl_sum direct strategy");
        value = weyl_direct(P, r, theta, d, phi, psi, variant);
    } else {
        value = weyl_prefix_dp(P, r, theta, d, phi, psi, variant, budget);
    }

    SumResult out;
    out.value = value;
    out.P = P;
    out.r = r;
    out.theta.assign(theta.begin(), theta.end());
    out.normalized_magnitude = std::abs(value) / ipow(static_cast<double>(P), 2 * r);
    return out;
}

std::complex<double> classical_weyl_sum(long P, std::span<const double> theta,
                                        WeightFunction phi) {
    KahanComplex acc;
    for (long n = -P; n <= P; ++n) {
        double w = phi(static_cast<double>(n));
        if (w == 0.0) continue;
        double dot = 0.0;
        double p = 1.0;
        for (double th : theta) {
            p *= static_cast<double>(n);
            dot += th * p;
        }
        acc.add(w * phase_e(-dot));
    }
    return acc.value();
}

McResult oscillatory_integral(int d, std::span<const double> beta, int r, Variant variant,
                              const McParams& mc, const WorkBudget& budget) {
    return phase_integral(d, beta, r, variant, -1.0, mc, budget);
}

McResult singular_integral_phi(int d, std::span<const double> xi, int r, const McParams& mc,
                               const WorkBudget& budget) {
    return phase_integral(d, xi, r, Variant::D, +1.0, mc, budget);
}

std::vector<double> closed_form_cube_bounds(int d, int r) {
    const IndexSet& ix = IndexSet::get(d);
    std::vector<double> bounds(ix.size());
    for (std::size_t i = 0; i < ix.size(); ++i) {
        auto [l1, l2] = ix.index(i);
        if (l2 == 0)
            bounds[i] = 2.0 * r;
        else
            bounds[i] = 2.0 * r * (r - 1) + 2.0 * r;  // cross pairs + diagonal terms
    }
    return bounds;
}

McResult solution_volume_density(int d, std::span<const double> t, int r, double eps,
                                 const McParams& mc, const WorkBudget& budget) {
    const IndexSet& ix = IndexSet::get(d);
    if (t.size() != ix.size()) throw std::invalid_argument("target dimension mismatch");
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    if (mc.samples < 1000) throw std::invalid_argument("need at least 1000 samples");
    budget.check(static_cast<double>(mc.samples) * 2 * r, "solution volume density");

    // Certified empty when the target lies outside the attainable range.
    std::vector<double> bounds = closed_form_cube_bounds(d, r);
    bool out_of_range = false;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (std::abs(t[i]) > bounds[i] + eps) out_of_range = true;

    McResult out;
    out.seed = mc.seed;
    if (out_of_range) {
        out.samples = 0;
        out.value = 0.0;
        out.stderr_est = 0.0;
        out.resolved = true;
        return out;
    }

    CounterRng rng(mc.seed);
    const std::size_t dim = static_cast<std::size_t>(2 * r);
    const std::size_t ncoords = ix.size();
    McAccum acc = mc_reduce(mc.samples, [&](std::uint64_t i) -> std::complex<double> {
        double pt[64];
        double coords[kMaxStackCoords];
        for (std::size_t k = 0; k < dim; ++k) pt[k] = rng.symmetric(i * dim + k);
        std::span<const double> x(pt, static_cast<std::size_t>(r));
        std::span<const double> y(pt + r, static_cast<std::size_t>(r));
        closed_form_product_real_into(x, y, d, Variant::D, coords);
        for (std::size_t k = 0; k < ncoords; ++k)
            if (std::abs(coords[k] - t[k]) > eps) return 0.0;
        return 1.0;
    });

    const double D = static_cast<double>(ix.size());
    const double scale = ipow(2.0, 2 * r) / std::pow(2.0 * eps, D);
    double hits = acc.sum.real();
    double p = hits / static_cast<double>(acc.count);
    out.samples = acc.count;
    out.value = scale * p;
    out.stderr_est = scale * std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(acc.count));
    out.resolved = hits > 0.0;
    return out;
}

}  // namespace nilring
