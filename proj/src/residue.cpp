#include "nilring/residue.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "nilring/fastpath.hpp"
#include "nilring/kahan.hpp"
#include "nilring/parallel.hpp"

namespace nilring {

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

std::complex<double> unit_phase(double turns) {
    double a = -kTau * turns;
    return {std::cos(a), std::sin(a)};
}

std::int64_t mod_pos(std::int64_t a, std::int64_t q) {
    std::int64_t r = a % q;
    return r < 0 ? r + q : r;
}

// Powers of every residue class mod q, up to exponent 2d.
struct ModPowTable {
    std::int64_t q;
    int maxexp;
    std::vector<std::int64_t> p;  // p[v * (maxexp+1) + l] = v^l mod q

    ModPowTable(std::int64_t q_, int maxexp_) : q(q_), maxexp(maxexp_), p(q_ * (maxexp_ + 1)) {
        for (std::int64_t v = 0; v < q; ++v) {
            p[v * (maxexp + 1)] = 1 % q;
            for (int l = 1; l <= maxexp; ++l)
                p[v * (maxexp + 1) + l] = mod_pos(p[v * (maxexp + 1) + l - 1] * v, q);
        }
    }
    std::int64_t get(std::int64_t v, int l) const { return p[v * (maxexp + 1) + l]; }
};

// Closed form mod q at a tuple of residue classes.
void closed_form_mod(const IndexSet& ix, const ModPowTable& pw, const std::int64_t* n,
                     const std::int64_t* m, int r, Variant variant, std::int64_t* out) {
    const int d = ix.d();
    const std::int64_t q = pw.q;
    const bool tilde = variant == Variant::DTilde;
    auto delta = [&](int j, int l) {
        std::int64_t v = tilde ? pw.get(n[j], l) - pw.get(m[j], l)
                               : pw.get(m[j], l) - pw.get(n[j], l);
        return mod_pos(v, q);
    };
    for (int l1 = 1; l1 <= d; ++l1) {
        std::int64_t s = 0;
        for (int j = 0; j < r; ++j) s += delta(j, l1);
        out[l1 - 1] = s % q;
    }
    for (std::size_t i = d; i < ix.size(); ++i) {
        auto [l1, l2] = ix.index(i);
        std::int64_t s = 0;
        std::int64_t prefix = 0;
        for (int j2 = 0; j2 < r; ++j2) {
            if (j2 > 0) prefix = (prefix + delta(j2 - 1, l1)) % q;
            s += prefix * delta(j2, l2);
        }
        s %= q;
        for (int j = 0; j < r; ++j) {
            std::int64_t diag = tilde ? pw.get(m[j], l1 + l2) : pw.get(n[j], l1 + l2);
            s += diag - pw.get(n[j], l1) * pw.get(m[j], l2) % q;
        }
        out[i] = mod_pos(s, q);
    }
}

// Walks all q^{2r} residue tuples; visit(n, m) with pointers to length-r rows.
template <class F>
void for_each_residue_pair(std::int64_t q, int r, F&& visit) {
    std::vector<std::int64_t> digits(2 * r, 0);
    const std::int64_t* n = digits.data();
    const std::int64_t* m = digits.data() + r;
    for (;;) {
        visit(n, m);
        int pos = 0;
        while (pos < 2 * r) {
            if (++digits[pos] < q) break;
            digits[pos] = 0;
            ++pos;
        }
        if (pos == 2 * r) break;
    }
}

double pow_ll(double b, int e) { return std::pow(b, e); }

}  // namespace

Fraction Fraction::reduced(std::vector<std::int64_t> a, std::int64_t q) {
    if (q <= 0) throw std::invalid_argument("fraction denominator must be positive");
    for (auto& v : a) v = mod_pos(v, q);
    std::int64_t g = q;
    for (auto v : a) g = std::gcd(g, v);
    if (g > 1) {
        q /= g;
        for (auto& v : a) v /= g;
    }
    for (auto& v : a) v = mod_pos(v, q);
    Fraction f;
    f.num = std::move(a);
    f.den = q;
    return f;
}

ResidueElement reduce_mod(const GroupElement& g, std::int64_t q) {
    if (q < 1) throw std::invalid_argument("modulus must be >= 1");
    ResidueElement out;
    out.d = g.d();
    out.q = q;
    out.coords.resize(g.size());
    mpz_class qz = static_cast<long>(q);
    for (std::size_t i = 0; i < g.size(); ++i) {
        mpz_class r = g[i] % qz;
        if (r < 0) r += qz;
        out.coords[i] = r.get_si();
    }
    return out;
}

ResidueElement residue_multiply(const ResidueElement& a, const ResidueElement& b) {
    if (a.d != b.d || a.q != b.q) throw std::invalid_argument("mismatched residue elements");
    const IndexSet& ix = IndexSet::get(a.d);
    ResidueElement out;
    out.d = a.d;
    out.q = a.q;
    out.coords.resize(a.coords.size());
    for (int i = 0; i < a.d; ++i) out.coords[i] = (a.coords[i] + b.coords[i]) % a.q;
    for (std::size_t i = a.d; i < ix.size(); ++i) {
        auto [l1, l2] = ix.index(i);
        out.coords[i] =
            mod_pos(a.coords[i] + b.coords[i] + a.coords[l1 - 1] * b.coords[l2 - 1], a.q);
    }
    return out;
}

std::int64_t residue_flat_index(const ResidueElement& h) {
    std::int64_t idx = 0;
    for (std::size_t i = h.coords.size(); i-- > 0;) idx = idx * h.q + h.coords[i];
    return idx;
}

std::vector<std::int64_t> count_solutions_table(int d, std::int64_t q, int r,
                                                const WorkBudget& budget, Variant variant) {
    if (q < 1 || r < 1) throw std::invalid_argument("need q >= 1 and r >= 1");
    const IndexSet& ix = IndexSet::get(d);
    const std::size_t D = ix.size();
    double cells = pow_ll(static_cast<double>(q), static_cast<int>(D));
    budget.check(pow_ll(static_cast<double>(q), 2 * r) + cells, "count_solutions_table");

    std::vector<std::int64_t> table(static_cast<std::size_t>(cells), 0);
    ModPowTable pw(q, 2 * d);
    std::vector<std::int64_t> out(D);
    for_each_residue_pair(q, r, [&](const std::int64_t* n, const std::int64_t* m) {
        closed_form_mod(ix, pw, n, m, r, variant, out.data());
        std::int64_t idx = 0;
        for (std::size_t i = D; i-- > 0;) idx = idx * q + out[i];
        ++table[static_cast<std::size_t>(idx)];
    });
    return table;
}

mpz_class count_solutions_mod(std::int64_t q, const ResidueElement& h, int r,
                              const WorkBudget& budget) {
    if (q != h.q) throw std::invalid_argument("modulus mismatch");
    auto table = count_solutions_table(h.d, q, r, budget);
    return mpz_class(static_cast<long>(table[static_cast<std::size_t>(residue_flat_index(h))]));
}

std::complex<double> gauss_sum(int d, const Fraction& a_over_q, int r, Variant variant,
                               const WorkBudget& budget) {
    const IndexSet& ix = IndexSet::get(d);
    const std::size_t D = ix.size();
    if (a_over_q.dimension() != D)
        throw std::invalid_argument("fraction dimension must equal d + d'");
    const std::int64_t q = a_over_q.den;
    budget.check(pow_ll(static_cast<double>(q), 2 * r), "gauss_sum");

    // Phase table per coordinate: e(-a_i k / q) for k in [0, q).
    std::vector<std::vector<std::complex<double>>> phase(D);
    for (std::size_t i = 0; i < D; ++i) {
        phase[i].resize(q);
        for (std::int64_t k = 0; k < q; ++k)
            phase[i][k] = unit_phase(static_cast<double>(a_over_q.num[i] % q) * k / q);
    }

    ModPowTable pw(q, 2 * d);
    std::vector<std::int64_t> coords(D);
    KahanComplex acc;
    for_each_residue_pair(q, r, [&](const std::int64_t* n, const std::int64_t* m) {
        closed_form_mod(ix, pw, n, m, r, variant, coords.data());
        std::complex<double> term = phase[0][coords[0]];
        for (std::size_t i = 1; i < D; ++i) term *= phase[i][coords[i]];
        acc.add(term);
    });
    double norm = pow_ll(static_cast<double>(q), 2 * r);
    return acc.value() / norm;
}

mpq_class coefficient_A(std::int64_t q, const GroupElement& h, int r, const WorkBudget& budget) {
    if (q < 1) throw std::invalid_argument("modulus must be >= 1");
    if (q == 1) return 1;
    const int D = static_cast<int>(h.size());
    mpq_class result = 1;
    for (auto [p, v] : factorize_small(q)) {
        // A(p^v) = M(p^v)/p^{v(2r-D)} - M(p^{v-1})/p^{(v-1)(2r-D)}
        std::int64_t pv = 1;
        for (int i = 0; i < v; ++i) pv *= p;
        auto ratio = [&](std::int64_t modulus, int level) -> mpq_class {
            if (modulus == 1) return 1;
            mpz_class count = count_solutions_mod(modulus, reduce_mod(h, modulus), r, budget);
            mpz_class scale;
            long e = static_cast<long>(level) * (2 * r - D);
            mpz_ui_pow_ui(scale.get_mpz_t(), static_cast<unsigned long>(p),
                          static_cast<unsigned long>(e >= 0 ? e : -e));
            mpq_class out;
            if (e >= 0)
                out = mpq_class(count) / mpq_class(scale);
            else
                out = mpq_class(count) * mpq_class(scale);
            out.canonicalize();
            return out;
        };
        mpq_class a = ratio(pv, v) - ratio(pv / p, v - 1);
        a.canonicalize();
        result *= a;
        result.canonicalize();
    }
    return result;
}

std::complex<double> coefficient_A_complex(std::int64_t q, const GroupElement& h, int r,
                                           const WorkBudget& budget) {
    const int d = h.d();
    const IndexSet& ix = IndexSet::get(d);
    const std::size_t D = ix.size();
    if (q == 1) return {1.0, 0.0};
    budget.check(pow_ll(static_cast<double>(q), 2 * r) +
                     pow_ll(static_cast<double>(q), 2 * static_cast<int>(D)),
                 "coefficient_A_complex");

    // conj(G(a/q)) from the solution-count table via the finite Fourier
    // transform, then summed over reduced numerators.
    auto table = count_solutions_table(d, q, r, budget);
    ResidueElement hq = reduce_mod(h, q);

    std::vector<std::int64_t> a(D, 0);
    KahanComplex acc;
    double qpow = pow_ll(static_cast<double>(q), 2 * r);
    for (;;) {
        std::int64_t g = q;
        for (auto v : a) g = std::gcd(g, v);
        if (g == 1) {
            KahanComplex gsum;  // conj(G(a/q)) = q^{-2r} sum_h M(q,h) e(+h.a/q)
            std::vector<std::int64_t> coords(D, 0);
            for (std::size_t idx = 0; idx < table.size(); ++idx) {
                if (table[idx] != 0) {
                    std::int64_t t = 0;
                    for (std::size_t i = 0; i < D; ++i) t += coords[i] * a[i];
                    gsum.add(static_cast<double>(table[idx]) *
                             unit_phase(-static_cast<double>(t % q) / q));
                }
                for (std::size_t i = 0; i < D; ++i) {
                    if (++coords[i] < q) break;
                    coords[i] = 0;
                }
            }
            std::int64_t ha = 0;
            for (std::size_t i = 0; i < D; ++i) ha += hq.coords[i] * a[i];
            acc.add(gsum.value() / qpow * unit_phase(static_cast<double>(ha % q) / q));
        }
        std::size_t pos = 0;
        while (pos < D) {
            if (++a[pos] < q) break;
            a[pos] = 0;
            ++pos;
        }
        if (pos == D) break;
    }
    return acc.value();
}

LocalFactorReport local_factor(std::int64_t p, const GroupElement& h, int r, int n,
                               const WorkBudget& budget) {
    if (!is_prime_small(p)) throw std::invalid_argument("local factor requires a prime");
    if (n < 1) throw std::invalid_argument("truncation level must be >= 1");
    const int D = static_cast<int>(h.size());
    LocalFactorReport rep;
    rep.p = p;
    rep.n = n;
    rep.B = 1;
    std::int64_t pv = 1;
    for (int v = 1; v <= n; ++v) {
        pv *= p;
        rep.A.push_back(coefficient_A(pv, h, r, budget));
        rep.B += rep.A.back();
        rep.B.canonicalize();
    }
    // Exact identity: the truncated factor equals the level-n count ratio.
    mpz_class count = count_solutions_mod(pv, reduce_mod(h, pv), r, budget);
    mpz_class scale;
    long e = static_cast<long>(n) * (2 * r - D);
    mpz_ui_pow_ui(scale.get_mpz_t(), static_cast<unsigned long>(p),
                  static_cast<unsigned long>(e >= 0 ? e : -e));
    mpq_class check = e >= 0 ? mpq_class(count) / mpq_class(scale)
                             : mpq_class(count) * mpq_class(scale);
    check.canonicalize();
    if (check != rep.B) throw std::logic_error("local factor identity violated");
    return rep;
}

std::pair<GroupElement, GroupElement> residue_decompose(const GroupElement& g, std::int64_t Q) {
    if (Q < 1) throw std::invalid_argument("Q must be >= 1");
    const int d = g.d();
    GroupElement b(d);
    mpz_class qz = static_cast<long>(Q);
    for (std::size_t i = 0; i < g.size(); ++i) {
        mpz_class r = g[i] % qz;
        if (r < 0) r += qz;
        b[i] = r;
    }
    GroupElement h = multiply(inverse(b), g);
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (h[i] % qz != 0) throw std::logic_error("decomposition failed");
    }
    return {b, h};
}

std::complex<double> classical_gauss_sum(const Fraction& a_over_Q) {
    const std::int64_t Q = a_over_Q.den;
    const int d = static_cast<int>(a_over_Q.dimension());
    KahanComplex acc;
    for (std::int64_t n = 0; n < Q; ++n) {
        std::int64_t t = 0;
        std::int64_t pw = 1;
        for (int l = 1; l <= d; ++l) {
            pw = mod_pos(pw * n, Q);
            t = (t + a_over_Q.num[l - 1] % Q * pw) % Q;
        }
        acc.add(unit_phase(static_cast<double>(t) / Q));
    }
    return acc.value() / static_cast<double>(Q);
}

bool is_prime_small(std::int64_t n) {
    if (n < 2) return false;
    for (std::int64_t p = 2; p * p <= n; ++p)
        if (n % p == 0) return false;
    return true;
}

std::vector<std::pair<std::int64_t, int>> factorize_small(std::int64_t n) {
    if (n < 1) throw std::invalid_argument("cannot factor non-positive value");
    std::vector<std::pair<std::int64_t, int>> out;
    for (std::int64_t p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            int e = 0;
            while (n % p == 0) {
                n /= p;
                ++e;
            }
            out.emplace_back(p, e);
        }
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

}  // namespace nilring
