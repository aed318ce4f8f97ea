#include "nilring/waring.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <stdexcept>

#include "nilring/bump.hpp"
#include "nilring/kahan.hpp"

namespace nilring {

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

std::complex<double> phase_e(double z) { return {std::cos(kTau * z), std::sin(kTau * z)}; }

double ipow(double b, int e) { return std::pow(b, e); }

// Walks all (2N+1)^k assignments of k variables over [-N, N].
template <class F>
void for_each_box_tuple(long N, int k, F&& visit) {
    const long V = 2 * N + 1;
    std::vector<std::int64_t> vals(static_cast<std::size_t>(k), -N);
    std::vector<long> digits(static_cast<std::size_t>(k), 0);
    for (;;) {
        visit(vals.data());
        std::size_t pos = 0;
        while (pos < static_cast<std::size_t>(k)) {
            if (++digits[pos] < V) {
                ++vals[pos];
                break;
            }
            digits[pos] = 0;
            vals[pos] = -N;
            ++pos;
        }
        if (pos == static_cast<std::size_t>(k)) break;
    }
}

mpz_class count_direct_fast(const GroupElement& g, int r, long N) {
    const IndexSet& ix = g.index_set();
    const std::size_t D = ix.size();
    FlatKey target = to_flat_key(g);
    std::int64_t out[kMaxFlatCoords];
    std::int64_t count = 0;
    for_each_box_tuple(N, 2 * r, [&](const std::int64_t* vals) {
        fast_closed_form(ix, vals, vals + r, r, Variant::D, out);
        for (std::size_t i = 0; i < D; ++i)
            if (out[i] != target.c[i]) return;
        ++count;
    });
    return mpz_class(static_cast<long>(count));
}

mpz_class count_direct_exact(const GroupElement& g, int r, long N) {
    const int d = g.d();
    std::vector<mpz_class> n(static_cast<std::size_t>(r)), m(static_cast<std::size_t>(r));
    mpz_class count = 0;
    for_each_box_tuple(N, 2 * r, [&](const std::int64_t* vals) {
        for (int j = 0; j < r; ++j) {
            n[j] = static_cast<long>(vals[j]);
            m[j] = static_cast<long>(vals[r + j]);
        }
        if (closed_form_product(n, m, d, Variant::D) == g) ++count;
    });
    return count;
}

mpz_class count_mim_fast(const GroupElement& g, int r, long N) {
    const IndexSet& ix = g.index_set();
    const std::size_t D = ix.size();
    const int t = (r + 1) / 2;     // left factor takes t pairs
    const int u = r - t;

    std::unordered_map<FlatKey, std::int64_t, FlatKeyHash> left;
    std::int64_t buf[kMaxFlatCoords];
    for_each_box_tuple(N, 2 * t, [&](const std::int64_t* vals) {
        fast_closed_form(ix, vals, vals + t, t, Variant::D, buf);
        FlatKey k;
        k.len = static_cast<std::uint8_t>(D);
        std::copy(buf, buf + D, k.c.begin());
        ++left[k];
    });

    FlatKey gk = to_flat_key(g);
    std::int64_t prod[kMaxFlatCoords], vinv[kMaxFlatCoords];
    std::int64_t count = 0;
    for_each_box_tuple(N, 2 * u, [&](const std::int64_t* vals) {
        // left = g . right^{-1}
        fast_closed_form(ix, vals, vals + u, u, Variant::D, buf);
        fast_inverse(ix, buf, vinv);
        fast_multiply(ix, gk.c.data(), vinv, prod);
        FlatKey k;
        k.len = static_cast<std::uint8_t>(D);
        std::copy(prod, prod + D, k.c.begin());
        auto it = left.find(k);
        if (it != left.end()) count += it->second;
    });
    return mpz_class(static_cast<long>(count));
}

mpz_class count_mim_exact(const GroupElement& g, int r, long N) {
    const int d = g.d();
    const int t = (r + 1) / 2;
    const int u = r - t;
    std::map<std::string, mpz_class> left;
    std::vector<mpz_class> n(static_cast<std::size_t>(t)), m(static_cast<std::size_t>(t));
    for_each_box_tuple(N, 2 * t, [&](const std::int64_t* vals) {
        for (int j = 0; j < t; ++j) {
            n[j] = static_cast<long>(vals[j]);
            m[j] = static_cast<long>(vals[t + j]);
        }
        ++left[to_canonical(closed_form_product(n, m, d, Variant::D))];
    });
    std::vector<mpz_class> n2(static_cast<std::size_t>(u)), m2(static_cast<std::size_t>(u));
    mpz_class count = 0;
    for_each_box_tuple(N, 2 * u, [&](const std::int64_t* vals) {
        for (int j = 0; j < u; ++j) {
            n2[j] = static_cast<long>(vals[j]);
            m2[j] = static_cast<long>(vals[u + j]);
        }
        GroupElement right = closed_form_product(n2, m2, d, Variant::D);
        auto it = left.find(to_canonical(multiply(g, inverse(right))));
        if (it != left.end()) count += it->second;
    });
    return count;
}

// --- Arc kernel: Fourier transform of one scaled radial bump -------------
//
// The kernel value at an integer frequency v is
//   J(v) = prod_i (R / N^{w_i}) * H(|vtilde|),  vtilde_i = v_i R / N^{w_i},
// with R = N^delta and H the radial profile transform of the bump in
// dimension D = d + d'.  H is tabulated once per (D, rho range).

struct RadialProfile {
    int dim = 3;
    double rho_max = 1.0;
    double step = 1e-3;
    std::vector<double> H;  // H[i] at rho = i * step

    double eval(double rho) const {
        if (rho < 0.0) rho = -rho;
        double x = rho / step;
        std::size_t i = static_cast<std::size_t>(x);
        if (i + 1 >= H.size()) return 0.0;
        double f = x - static_cast<double>(i);
        return H[i] * (1.0 - f) + H[i + 1] * f;
    }
};

double sphere_area(int k) {  // surface measure of S^{k-1} in R^k
    return 2.0 * std::pow(M_PI, 0.5 * k) / std::tgamma(0.5 * k);
}

// Cross-section A(t) = integral over the D-1 orthogonal coordinates of the
// radial bump at first coordinate t.
std::vector<double> bump_cross_section(int dim, int nt, double tmax) {
    std::vector<double> A(static_cast<std::size_t>(nt) + 1);
    const double dt = 2.0 * tmax / nt;
    const int k = dim - 1;
    const int ns = 2000;
    for (int i = 0; i <= nt; ++i) {
        double t = -tmax + i * dt;
        if (k == 0) {
            A[i] = bump_profile(std::abs(t));
            continue;
        }
        double smax = std::sqrt(std::max(0.0, 4.0 - t * t));
        if (smax <= 0.0) {
            A[i] = 0.0;
            continue;
        }
        double ds = smax / ns;
        KahanSum acc;  // Simpson in s with weight s^{k-1}
        for (int j = 0; j <= ns; ++j) {
            double s = j * ds;
            double w = (j == 0 || j == ns) ? 1.0 : (j % 2 ? 4.0 : 2.0);
            acc.add(w * bump_profile(std::sqrt(t * t + s * s)) * std::pow(s, k - 1));
        }
        A[i] = sphere_area(k) * acc.value() * ds / 3.0;
    }
    return A;
}

const RadialProfile& radial_profile(int dim, double rho_max) {
    static std::mutex mu;
    static std::map<std::pair<int, long>, RadialProfile> cache;
    long bucket = static_cast<long>(std::ceil(rho_max / 8.0)) * 8;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(dim, bucket);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    RadialProfile prof;
    prof.dim = dim;
    prof.rho_max = static_cast<double>(bucket);
    const double tmax = 2.0;
    const int nt = 16000;  // Simpson nodes for the oscillatory transform
    std::vector<double> A = bump_cross_section(dim, nt, tmax);

    prof.step = 2e-3;
    std::size_t count = static_cast<std::size_t>(prof.rho_max / prof.step) + 2;
    prof.H.resize(count);
    const double dt = 2.0 * tmax / nt;
    for (std::size_t ir = 0; ir < count; ++ir) {
        double rho = static_cast<double>(ir) * prof.step;
        KahanSum re;
        for (int i = 0; i <= nt; ++i) {
            double t = -tmax + i * dt;
            double w = (i == 0 || i == nt) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            re.add(w * A[i] * std::cos(kTau * rho * t));
        }
        prof.H[ir] = re.value() * dt / 3.0;  // imaginary part vanishes by symmetry
    }
    it = cache.emplace(key, std::move(prof)).first;
    return it->second;
}

std::vector<Fraction> arc_fractions(int D, double radius) {
    std::vector<Fraction> out;
    long qmax = static_cast<long>(std::floor(radius));
    if (qmax < 1) qmax = 1;
    for (long q = 1; q <= qmax; ++q) {
        std::vector<std::int64_t> a(static_cast<std::size_t>(D), 0);
        for (;;) {
            std::int64_t g = q;
            for (auto v : a) g = std::gcd(g, static_cast<std::int64_t>(v));
            if (g == 1 || q == 1) {
                Fraction f;
                f.num = a;
                f.den = q;
                out.push_back(f);
            }
            std::size_t pos = 0;
            while (pos < a.size()) {
                if (++a[pos] < q) break;
                a[pos] = 0;
                ++pos;
            }
            if (pos == a.size()) break;
        }
    }
    return out;
}

// Direct tensor-grid quadrature of the arc kernel at one frequency, used as
// a spot check of the profile route.
double arc_kernel_direct(const IndexSet& ix, long N, double radius,
                         const std::vector<std::int64_t>& v) {
    const std::size_t D = ix.size();
    // Box integration over the bump support |N o u| <= 2 radius.
    std::vector<double> len(D);
    for (std::size_t i = 0; i < D; ++i)
        len[i] = 2.0 * radius / ipow(static_cast<double>(N), ix.weight(i));
    std::vector<int> pts(D);
    double cell = 1.0;
    for (std::size_t i = 0; i < D; ++i) {
        double osc = std::abs(static_cast<double>(v[i])) * len[i];
        pts[i] = static_cast<int>(std::min(220.0, 24.0 + 8.0 * osc));
        cell *= 2.0 * len[i] / pts[i];
    }
    std::vector<int> digit(D, 0);
    KahanSum acc;
    for (;;) {
        double turns = 0.0;
        double rho2 = 0.0;
        for (std::size_t i = 0; i < D; ++i) {
            double u = -len[i] + (digit[i] + 0.5) * (2.0 * len[i] / pts[i]);
            turns += static_cast<double>(v[i]) * u;
            double scaled = u * ipow(static_cast<double>(N), ix.weight(i)) / radius;
            rho2 += scaled * scaled;
        }
        acc.add(bump_profile(std::sqrt(rho2)) * std::cos(kTau * turns));
        std::size_t pos = 0;
        while (pos < D) {
            if (++digit[pos] < pts[pos]) break;
            digit[pos] = 0;
            ++pos;
        }
        if (pos == D) break;
    }
    return acc.value() * cell;
}

}  // namespace

mpz_class count_representations(const GroupElement& g, int r, long N, CountStrategy strategy,
                                const WorkBudget& budget) {
    if (r < 1 || N < 1) throw std::invalid_argument("need r >= 1 and N >= 1");
    const double V = static_cast<double>(2 * N + 1);
    const double direct_cost = ipow(V, 2 * r);
    const int t = (r + 1) / 2;
    const double mim_cost = ipow(V, 2 * t) * 4 + ipow(V, 2 * (r - t)) * 4;

    CountStrategy pick = strategy;
    if (pick == CountStrategy::Auto)
        pick = mim_cost < direct_cost ? CountStrategy::MeetInMiddle : CountStrategy::Direct;

    const bool fast = fast_path_fits(g.d(), r, static_cast<double>(N)) && [&] {
        for (std::size_t i = 0; i < g.size(); ++i)
            if (!g[i].fits_slong_p()) return false;
        return true;
    }();

    if (pick == CountStrategy::Direct) {
        budget.check(direct_cost, "count_representations direct");
        return fast ? count_direct_fast(g, r, N) : count_direct_exact(g, r, N);
    }
    budget.check(mim_cost, "count_representations meet-in-the-middle");
    return fast ? count_mim_fast(g, r, N) : count_mim_exact(g, r, N);
}

std::map<FlatKey, std::int64_t> count_table(int d, int r, long N, const WorkBudget& budget) {
    const IndexSet& ix = IndexSet::get(d);
    const double V = static_cast<double>(2 * N + 1);
    budget.check(ipow(V, 2 * r), "count_table");
    if (!fast_path_fits(d, r, static_cast<double>(N)))
        throw BudgetError("count_table needs the fixed-width fast path at this size");

    std::map<FlatKey, std::int64_t> table;
    std::int64_t out[kMaxFlatCoords];
    const std::size_t D = ix.size();
    for_each_box_tuple(N, 2 * r, [&](const std::int64_t* vals) {
        fast_closed_form(ix, vals, vals + r, r, Variant::D, out);
        FlatKey k;
        k.len = static_cast<std::uint8_t>(D);
        std::copy(out, out + D, k.c.begin());
        ++table[k];
    });
    return table;
}

ArcSplitResult arc_split(const GroupElement& g, int r, long N, double delta,
                         const WorkBudget& budget) {
    const int d = g.d();
    const IndexSet& ix = g.index_set();
    const std::size_t D = ix.size();
    const double max_delta = std::pow(10.0 * d, -4.0);
    if (!(delta > 0.0) || delta > max_delta)
        throw ConfigError("delta must lie in (0, (10d)^-4]");
    if (N < 2) throw std::invalid_argument("N must be >= 2");

    const double radius = std::pow(static_cast<double>(N), delta);  // N^delta

    // Arcs must stay clear of their periodic images: the smallest-weight
    // axis must accommodate the support diameter (up to the numerically
    // vanishing tail of the bump profile).
    const double wrap_margin = 1.5e-3;
    double axis = ipow(static_cast<double>(N), ix.weight(0)) / 2.0;
    if (axis / radius < 2.0 - wrap_margin)
        throw NumericPreconditionError(
            "major arcs overlap their periodic images at this N; increase N");

    std::vector<Fraction> fractions = arc_fractions(static_cast<int>(D), radius);
    // Distinct fractions must have disjoint arcs in the scaled metric.
    for (std::size_t i = 0; i < fractions.size(); ++i) {
        for (std::size_t j = i + 1; j < fractions.size(); ++j) {
            double dist2 = 0.0;
            for (std::size_t k = 0; k < D; ++k) {
                double diff = static_cast<double>(fractions[i].num[k]) / fractions[i].den -
                              static_cast<double>(fractions[j].num[k]) / fractions[j].den;
                diff -= std::round(diff);
                diff *= ipow(static_cast<double>(N), ix.weight(k));
                dist2 += diff * diff;
            }
            if (std::sqrt(dist2) <= 4.0 * radius)
                throw NumericPreconditionError("major arcs of distinct fractions overlap");
        }
    }

    auto table = count_table(d, r, N, budget);
    FlatKey gk = to_flat_key(g);

    // Maximal scaled frequency that can appear.
    double rho_need = 0.0;
    for (const auto& [key, cnt] : table) {
        double s = 0.0;
        for (std::size_t i = 0; i < D; ++i) {
            double vi = static_cast<double>(gk.c[i] - key.c[i]) * radius /
                        ipow(static_cast<double>(N), ix.weight(i));
            s += vi * vi;
        }
        rho_need = std::max(rho_need, std::sqrt(s));
    }
    const RadialProfile& prof = radial_profile(static_cast<int>(D), rho_need + 1.0);

    double scale = 1.0;
    for (std::size_t i = 0; i < D; ++i)
        scale *= radius / ipow(static_cast<double>(N), ix.weight(i));

    KahanComplex maj, min;
    std::vector<std::int64_t> v(D);
    mpz_class exact = 0;
    for (const auto& [key, cnt] : table) {
        bool is_g = key == gk;
        if (is_g) exact = static_cast<long>(cnt);
        double rho = 0.0;
        for (std::size_t i = 0; i < D; ++i) {
            v[i] = gk.c[i] - key.c[i];
            double vi = static_cast<double>(v[i]) * radius / ipow(static_cast<double>(N), ix.weight(i));
            rho += vi * vi;
        }
        double J = scale * prof.eval(std::sqrt(rho));
        std::complex<double> frac_sum{0.0, 0.0};
        for (const Fraction& f : fractions) {
            double turns = 0.0;
            for (std::size_t i = 0; i < D; ++i)
                turns += static_cast<double>(v[i] % f.den) * f.num[i] / f.den;
            frac_sum += phase_e(-turns);
        }
        std::complex<double> kernel = J * frac_sum;
        double c = static_cast<double>(cnt);
        maj.add(c * kernel);
        min.add(c * ((is_g ? 1.0 : 0.0) - kernel));
    }

    ArcSplitResult out;
    out.s_maj = maj.value();
    out.s_min = min.value();
    out.exact_count = exact;
    out.partition_defect = std::abs(out.s_maj + out.s_min - exact.get_d());
    out.fraction_count = fractions.size();
    out.cutoff_radius = radius;
    const double norm = ipow(static_cast<double>(N), 2 * r - static_cast<int>(ix.homogeneous_dimension()));
    out.normalized_minor = std::abs(out.s_min) / norm;
    out.relative_minor = std::abs(out.s_min) / ipow(static_cast<double>(2 * N + 1), 2 * r);

    // Spot check of the kernel against direct quadrature on the heaviest
    // frequencies.
    std::vector<std::pair<std::int64_t, FlatKey>> heavy;
    for (const auto& [k, c] : table) heavy.emplace_back(c, k);
    std::sort(heavy.begin(), heavy.end(),
              [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
    double worst = 0.0;
    for (std::size_t s = 0; s < heavy.size() && s < 4; ++s) {
        for (std::size_t i = 0; i < D; ++i) v[i] = gk.c[i] - heavy[s].second.c[i];
        double rho = 0.0;
        for (std::size_t i = 0; i < D; ++i) {
            double vi = static_cast<double>(v[i]) * radius / ipow(static_cast<double>(N), ix.weight(i));
            rho += vi * vi;
        }
        double J = scale * prof.eval(std::sqrt(rho));
        double direct = arc_kernel_direct(ix, N, radius, v);
        worst = std::max(worst, std::abs(J - direct));
    }
    out.kernel_check = worst;
    return out;
}

SingularSeriesEstimate singular_series(const GroupElement& g, int r, long q_max,
                                       const WorkBudget& budget) {
    if (q_max < 1) throw std::invalid_argument("q_max must be >= 1");
    const int d = g.d();
    const IndexSet& ix = g.index_set();
    const std::size_t D = ix.size();

    SingularSeriesEstimate out;
    out.q_max = q_max;

    // Euler route: truncated local factor B at every prime with prime powers
    // up to q_max (exact rationals via solution counts).
    for (std::int64_t p = 2; p <= q_max; ++p) {
        if (!is_prime_small(p)) continue;
        int level = 0;
        std::int64_t pv = 1;
        while (pv * p <= q_max) {
            pv *= p;
            ++level;
        }
        if (level == 0) continue;
        mpq_class B = 1;
        std::int64_t mod = 1;
        for (int v = 1; v <= level; ++v) {
            mod *= p;
            B += coefficient_A(mod, g, r, budget);
            B.canonicalize();
        }
        out.prime_levels.emplace_back(p, level);
        if (B == 0) out.obstructed = true;
        out.euler_exact *= B;
        out.euler_exact.canonicalize();
    }
    out.euler_value = out.euler_exact.get_d();

    // Fraction route: direct complex sum over reduced fractions with
    // denominators up to q_max.
    KahanComplex acc;
    for (std::int64_t q = 1; q <= q_max; ++q) {
        budget.check(ipow(static_cast<double>(q), 2 * r) +
                         ipow(static_cast<double>(q), 2 * static_cast<int>(D)),
                     "singular_series fraction path");
        ResidueElement hq = reduce_mod(g, q);
        auto table = count_solutions_table(d, q, r, budget);
        const double qpow = ipow(static_cast<double>(q), 2 * r);
        std::vector<std::int64_t> a(D, 0);
        for (;;) {
            std::int64_t gcd_all = q;
            for (auto x : a) gcd_all = std::gcd(gcd_all, x);
            if (gcd_all == 1 || q == 1) {
                // conj(G(a/q)) e(-g.a/q) from the count table
                KahanComplex gsum;
                std::vector<std::int64_t> coords(D, 0);
                for (std::size_t idx = 0; idx < table.size(); ++idx) {
                    if (table[idx] != 0) {
                        std::int64_t t = 0;
                        for (std::size_t i = 0; i < D; ++i) t += coords[i] * a[i] % q;
                        gsum.add(static_cast<double>(table[idx]) *
                                 phase_e(static_cast<double>(t % q) / q));
                    }
                    for (std::size_t i = 0; i < D; ++i) {
                        if (++coords[i] < q) break;
                        coords[i] = 0;
                    }
                }
                std::int64_t ha = 0;
                for (std::size_t i = 0; i < D; ++i) ha += hq.coords[i] * a[i] % q;
                acc.add(gsum.value() / qpow * phase_e(-static_cast<double>(ha % q) / q));
            }
            std::size_t pos = 0;
            while (pos < D) {
                if (++a[pos] < q) break;
                a[pos] = 0;
                ++pos;
            }
            if (pos == D) break;
        }
    }
    out.fraction_value = acc.value();
    out.agreement_abs = std::abs(out.fraction_value - std::complex<double>(out.euler_value, 0.0));
    double denom = std::max(std::abs(out.euler_value), 1e-12);
    out.agreement_rel = out.agreement_abs / denom;
    return out;
}

CountReport predict_count(const GroupElement& g, int r, long N, double eps, const McParams& mc,
                          long q_max, CountStrategy strategy, const WorkBudget& budget) {
    const IndexSet& ix = g.index_set();
    CountReport rep;
    rep.d = g.d();
    rep.r = r;
    rep.N = N;
    rep.g_text = to_canonical(g);
    rep.eps = eps;
    rep.normalization =
        ipow(static_cast<double>(N), 2 * r - static_cast<int>(ix.homogeneous_dimension()));

    const double V = static_cast<double>(2 * N + 1);
    const int t = (r + 1) / 2;
    const double count_cost = std::min(ipow(V, 2 * r), ipow(V, 2 * t) * 8);
    if (count_cost <= static_cast<double>(budget.max_ops)) {
        rep.have_exact = true;
        rep.exact_count = count_representations(g, r, N, strategy, budget);
        rep.normalized_count = rep.exact_count.get_d() / rep.normalization;
    }

    rep.series = singular_series(g, r, q_max, budget);

    RealGroupElement scaled = dilate(1.0 / static_cast<double>(N), to_real(g));
    rep.density = solution_volume_density(g.d(), scaled.coords(), r, eps, mc, budget);

    rep.prediction = rep.normalization * rep.series.euler_value * rep.density.value.real();
    rep.predicted_normalized = rep.series.euler_value * rep.density.value.real();
    if (rep.have_exact) {
        rep.residual = rep.normalized_count - rep.predicted_normalized;
        double denom = std::max(std::abs(rep.normalized_count), 1e-12);
        rep.relative_residual = std::abs(rep.residual) / denom;
    }
    return rep;
}

ScanTable residue_class_scan(int d, std::int64_t Q, int r, long N, const WorkBudget& budget) {
    if (Q < 1) throw std::invalid_argument("Q must be >= 1");
    const IndexSet& ix = IndexSet::get(d);
    const std::size_t D = ix.size();
    double classes = ipow(static_cast<double>(Q), static_cast<int>(D));
    budget.check(classes + ipow(static_cast<double>(2 * N + 1), 2 * r), "residue_class_scan");

    ScanTable out;
    out.d = d;
    out.Q = Q;
    out.r = r;
    out.N = N;
    const double norm =
        ipow(static_cast<double>(N), 2 * r - static_cast<int>(ix.homogeneous_dimension()));

    auto table = count_table(d, r, N, budget);

    struct Agg {
        std::int64_t total = 0;
        std::int64_t distinct = 0;
        std::int64_t minc = 0;
        std::int64_t maxc = 0;
    };
    std::map<std::vector<std::int64_t>, Agg> agg;
    for (const auto& [key, cnt] : table) {
        std::vector<std::int64_t> rep(D);
        for (std::size_t i = 0; i < D; ++i) {
            std::int64_t v = key.c[i] % Q;
            rep[i] = v < 0 ? v + Q : v;
        }
        Agg& a = agg[rep];
        a.total += cnt;
        if (a.distinct == 0) {
            a.minc = cnt;
            a.maxc = cnt;
        } else {
            a.minc = std::min(a.minc, cnt);
            a.maxc = std::max(a.maxc, cnt);
        }
        ++a.distinct;
    }

    std::vector<std::int64_t> rep(D, 0);
    for (;;) {
        ScanRow row;
        row.rep = rep;
        auto it = agg.find(rep);
        if (it != agg.end()) {
            row.mass = static_cast<double>(it->second.total) / norm;
            row.distinct_values = it->second.distinct;
            row.min_count = it->second.minc;
            row.max_count = it->second.maxc;
            row.positive = it->second.total > 0 && it->second.minc > 0;
        }
        // Meaningful only when 2 | Q: then the class fixes coordinates mod 2.
        bool ok = true;
        if (Q % 2 == 0)
            for (int l = 2; l <= d; ++l)
                if ((rep[l - 1] - rep[0]) % 2 != 0) ok = false;
        row.parity_ok = ok;
        out.rows.push_back(std::move(row));
        out.total_mass += out.rows.back().mass;

        std::size_t pos = 0;
        while (pos < D) {
            if (++rep[pos] < Q) break;
            rep[pos] = 0;
            ++pos;
        }
        if (pos == D) break;
    }
    return out;
}

}  // namespace nilring
