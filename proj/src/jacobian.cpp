#include "nilring/jacobian.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace nilring {

namespace {

mpz_class pow_int(const mpz_class& base, unsigned long e) {
    mpz_class out;
    mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
    return out;
}

Polynomial::Exponents mono(int nvars, std::initializer_list<std::pair<int, int>> var_exps) {
    Polynomial::Exponents e(static_cast<std::size_t>(nvars), 0);
    for (auto [v, x] : var_exps) e[static_cast<std::size_t>(v)] += static_cast<unsigned char>(x);
    return e;
}

struct GradientCache {
    std::vector<Polynomial> polys;            // d+d' coordinate polynomials
    std::vector<std::vector<Polynomial>> grad;  // [coord][var]
};

const GradientCache& gradient_cache(int d, int r, Variant variant) {
    static std::mutex mu;
    static std::map<std::tuple<int, int, int>, GradientCache> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(d, r, static_cast<int>(variant));
    auto it = cache.find(key);
    if (it == cache.end()) {
        GradientCache gc;
        gc.polys = product_polynomials(d, r, variant);
        gc.grad.resize(gc.polys.size());
        for (std::size_t i = 0; i < gc.polys.size(); ++i) {
            gc.grad[i].reserve(static_cast<std::size_t>(2 * r));
            for (int v = 0; v < 2 * r; ++v) gc.grad[i].push_back(gc.polys[i].derivative(v));
        }
        it = cache.emplace(key, std::move(gc)).first;
    }
    return it->second;
}

}  // namespace

void Polynomial::add_term(const Exponents& e, const mpz_class& c) {
    if (c == 0) return;
    if (e.size() != static_cast<std::size_t>(nvars_))
        throw std::invalid_argument("exponent vector length mismatch");
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        terms_.emplace(e, c);
    } else {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

Polynomial Polynomial::derivative(int var) const {
    Polynomial out(nvars_);
    for (const auto& [e, c] : terms_) {
        unsigned char k = e[static_cast<std::size_t>(var)];
        if (k == 0) continue;
        Exponents e2 = e;
        --e2[static_cast<std::size_t>(var)];
        out.add_term(e2, c * k);
    }
    return out;
}

mpz_class Polynomial::evaluate(std::span<const mpz_class> point) const {
    if (point.size() != static_cast<std::size_t>(nvars_))
        throw std::invalid_argument("evaluation point length mismatch");
    mpz_class total = 0;
    for (const auto& [e, c] : terms_) {
        mpz_class t = c;
        for (std::size_t v = 0; v < e.size(); ++v)
            if (e[v] != 0) t *= pow_int(point[v], e[v]);
        total += t;
    }
    return total;
}

std::string Polynomial::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << c.get_str();
        for (std::size_t v = 0; v < e.size(); ++v) {
            if (e[v] == 0) continue;
            os << "*v" << v;
            if (e[v] > 1) os << "^" << static_cast<int>(e[v]);
        }
    }
    return os.str();
}

std::vector<Polynomial> product_polynomials(int d, int r, Variant variant) {
    const IndexSet& ix = IndexSet::get(d);
    const int nvars = 2 * r;  // x_j = var j, y_j = var r + j
    const bool tilde = variant == Variant::DTilde;
    const int sgn = tilde ? -1 : 1;  // delta_j^(l) = sgn * (y_j^l - x_j^l)

    std::vector<Polynomial> out;
    out.reserve(ix.size());
    for (int l1 = 1; l1 <= d; ++l1) {
        Polynomial p(nvars);
        for (int j = 0; j < r; ++j) {
            p.add_term(mono(nvars, {{r + j, l1}}), sgn);
            p.add_term(mono(nvars, {{j, l1}}), -sgn);
        }
        out.push_back(std::move(p));
    }
    for (std::size_t i = d; i < ix.size(); ++i) {
        auto [l1, l2] = ix.index(i);
        Polynomial p(nvars);
        // Cross terms: product of deltas picks up sgn^2 = 1.
        for (int j1 = 0; j1 < r; ++j1) {
            for (int j2 = j1 + 1; j2 < r; ++j2) {
                p.add_term(mono(nvars, {{r + j1, l1}, {r + j2, l2}}), 1);
                p.add_term(mono(nvars, {{r + j1, l1}, {j2, l2}}), -1);
                p.add_term(mono(nvars, {{j1, l1}, {r + j2, l2}}), -1);
                p.add_term(mono(nvars, {{j1, l1}, {j2, l2}}), 1);
            }
        }
        for (int j = 0; j < r; ++j) {
            if (tilde)
                p.add_term(mono(nvars, {{r + j, l1 + l2}}), 1);
            else
                p.add_term(mono(nvars, {{j, l1 + l2}}), 1);
            p.add_term(mono(nvars, {{j, l1}, {r + j, l2}}), -1);
        }
        out.push_back(std::move(p));
    }
    return out;
}

int rank(const RationalMatrix& m) {
    const std::size_t rows = m.rows(), cols = m.cols();
    // Clear denominators row by row, then run fraction-free elimination.
    std::vector<std::vector<mpz_class>> a(rows, std::vector<mpz_class>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        mpz_class lcm = 1;
        for (std::size_t j = 0; j < cols; ++j) {
            mpz_class den = m.at(i, j).get_den();
            mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), den.get_mpz_t());
        }
        for (std::size_t j = 0; j < cols; ++j) {
            mpq_class scaled = m.at(i, j) * mpq_class(lcm);
            scaled.canonicalize();
            a[i][j] = scaled.get_num();
        }
    }

    mpz_class prev = 1;
    std::size_t rk = 0;
    std::vector<std::size_t> rperm(rows), cperm(cols);
    for (std::size_t i = 0; i < rows; ++i) rperm[i] = i;
    for (std::size_t j = 0; j < cols; ++j) cperm[j] = j;

    const std::size_t steps = std::min(rows, cols);
    for (std::size_t k = 0; k < steps; ++k) {
        // Full pivoting: largest magnitude entry of the active submatrix.
        std::size_t pi = k, pj = k;
        mpz_class best = 0;
        for (std::size_t i = k; i < rows; ++i) {
            for (std::size_t j = k; j < cols; ++j) {
                mpz_class mag = abs(a[rperm[i]][cperm[j]]);
                if (mag > best) {
                    best = mag;
                    pi = i;
                    pj = j;
                }
            }
        }
        if (best == 0) break;
        std::swap(rperm[k], rperm[pi]);
        std::swap(cperm[k], cperm[pj]);
        const mpz_class& pivot = a[rperm[k]][cperm[k]];
        for (std::size_t i = k + 1; i < rows; ++i) {
            for (std::size_t j = k + 1; j < cols; ++j) {
                mpz_class num = a[rperm[i]][cperm[j]] * pivot - a[rperm[i]][cperm[k]] * a[rperm[k]][cperm[j]];
                mpz_divexact(a[rperm[i]][cperm[j]].get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
            }
            a[rperm[i]][cperm[k]] = 0;
        }
        prev = pivot;
        ++rk;
    }
    return static_cast<int>(rk);
}

namespace {

RationalMatrix jacobian_block(std::span<const mpz_class> n, std::span<const mpz_class> m, int d,
                              Variant variant, bool x_only) {
    if (n.size() != m.size()) throw std::invalid_argument("tuple lengths differ");
    const int r = static_cast<int>(n.size());
    const GradientCache& gc = gradient_cache(d, r, variant);
    std::vector<mpz_class> point;
    point.reserve(static_cast<std::size_t>(2 * r));
    point.insert(point.end(), n.begin(), n.end());
    point.insert(point.end(), m.begin(), m.end());

    const std::size_t cols = x_only ? static_cast<std::size_t>(r) : static_cast<std::size_t>(2 * r);
    RationalMatrix out(gc.polys.size(), cols);
    for (std::size_t i = 0; i < gc.polys.size(); ++i)
        for (std::size_t j = 0; j < cols; ++j)
            out.at(i, j) = mpq_class(gc.grad[i][j].evaluate(point));
    return out;
}

}  // namespace

RationalMatrix jacobian_at(std::span<const mpz_class> n, std::span<const mpz_class> m, int d,
                           Variant variant) {
    return jacobian_block(n, m, d, variant, false);
}

RationalMatrix jacobian_x_at(std::span<const mpz_class> n, std::span<const mpz_class> m, int d,
                             Variant variant) {
    return jacobian_block(n, m, d, variant, true);
}

WitnessSearch find_full_rank_point(int d, int r, long box) {
    const IndexSet& ix = IndexSet::get(d);
    const int target = static_cast<int>(ix.size());
    WitnessSearch out;
    if (2 * r < target) {
        out.feasible = false;
        return out;
    }

    // Values ordered small magnitudes outward: 0, 1, -1, 2, -2, ...
    std::vector<long> values;
    values.push_back(0);
    for (long v = 1; v <= box; ++v) {
        values.push_back(v);
        values.push_back(-v);
    }
    const std::size_t V = values.size();
    const std::size_t k = static_cast<std::size_t>(2 * r);
    std::vector<std::size_t> digits(k, 0);
    std::vector<mpz_class> n(r), m(r);
    for (;;) {
        for (int j = 0; j < r; ++j) {
            n[j] = values[digits[j]];
            m[j] = values[digits[r + j]];
        }
        ++out.examined;
        if (rank(jacobian_at(n, m, d)) == target) {
            out.found = true;
            out.n = n;
            out.m = m;
            return out;
        }
        // Odometer with the last coordinate fastest: lexicographic in
        // (n_1..n_r, m_1..m_r) over the magnitude-ordered value list.
        std::size_t pos = k;
        while (pos > 0) {
            --pos;
            if (++digits[pos] < V) break;
            digits[pos] = 0;
            if (pos == 0) return out;  // exhausted
        }
    }
}

NonsingularZeroResult nonsingular_zero(
    int d, int r,
    std::optional<std::pair<std::vector<mpz_class>, std::vector<mpz_class>>> witness,
    long search_box) {
    std::vector<mpz_class> n, m;
    if (witness) {
        n = witness->first;
        m = witness->second;
        if (n.size() != static_cast<std::size_t>(r) || m.size() != static_cast<std::size_t>(r))
            throw std::invalid_argument("witness length must equal r");
        if (rank(jacobian_at(n, m, d)) != static_cast<int>(IndexSet::get(d).size()))
            throw std::invalid_argument("witness does not have full rank");
    } else {
        WitnessSearch ws = find_full_rank_point(d, r, search_box);
        if (!ws.feasible)
            throw std::invalid_argument("2r < d + d': full rank impossible");
        if (!ws.found) throw NumericPreconditionError("full-rank search exhausted");
        n = ws.n;
        m = ws.m;
    }

    NonsingularZeroResult out;
    out.witness_n = n;
    out.witness_m = m;
    // z0 = (n, reversed m), w0 = (m, reversed n); the 2r-fold product
    // telescopes to the identity there.
    out.z0 = n;
    out.w0 = m;
    for (int j = r - 1; j >= 0; --j) out.z0.push_back(m[static_cast<std::size_t>(j)]);
    for (int j = r - 1; j >= 0; --j) out.w0.push_back(n[static_cast<std::size_t>(j)]);

    GroupElement val = iterated_product(out.z0, out.w0, d, Variant::D);
    if (!val.is_identity()) throw std::logic_error("doubled point does not map to identity");
    out.rank_at_zero = rank(jacobian_at(out.z0, out.w0, d));
    if (out.rank_at_zero != static_cast<int>(IndexSet::get(d).size()))
        throw std::logic_error("doubled point lost full rank");
    return out;
}

mpz_class degenerate_count(int d, int r, long N, std::span<const mpz_class> m,
                           const WorkBudget& budget) {
    if (m.size() != static_cast<std::size_t>(r)) throw std::invalid_argument("m length mismatch");
    const int target = static_cast<int>(IndexSet::get(d).size());
    const double V = static_cast<double>(2 * N + 1);
    budget.check(std::pow(V, r) * target * target * r, "degenerate_count");

    std::vector<mpz_class> n(r, mpz_class(-N));
    std::vector<long> digits(static_cast<std::size_t>(r), 0);
    mpz_class count = 0;
    for (;;) {
        for (int j = 0; j < r; ++j) n[j] = digits[j] - N;
        if (rank(jacobian_x_at(n, m, d)) < target) ++count;
        std::size_t pos = 0;
        while (pos < static_cast<std::size_t>(r)) {
            if (++digits[pos] < 2 * N + 1) break;
            digits[pos] = 0;
            ++pos;
        }
        if (pos == static_cast<std::size_t>(r)) break;
    }
    return count;
}

}  // namespace nilring
