#ifndef NILRING_JACOBIAN_HPP
#define NILRING_JACOBIAN_HPP

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nilring/errors.hpp"
#include "nilring/group.hpp"

namespace nilring {

// Sparse integer-coefficient polynomial; monomials keyed by exponent vectors.
class Polynomial {
public:
    using Exponents = std::vector<unsigned char>;

    explicit Polynomial(int nvars) : nvars_(nvars) {}

    int nvars() const { return nvars_; }
    const std::map<Exponents, mpz_class>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(const Exponents& e, const mpz_class& c);
    Polynomial derivative(int var) const;
    mpz_class evaluate(std::span<const mpz_class> point) const;
    std::string to_string() const;

    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
    }

private:
    int nvars_;
    std::map<Exponents, mpz_class> terms_;
};

// The d+d' coordinate polynomials of the alternating product in the 2r
// variables (x_1..x_r, y_1..y_r).
std::vector<Polynomial> product_polynomials(int d, int r, Variant variant);

// Exact rational matrix; rank by fraction-free elimination, no tolerances.
class RationalMatrix {
public:
    RationalMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    mpq_class& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const mpq_class& at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

private:
    std::size_t rows_, cols_;
    std::vector<mpq_class> a_;
};

int rank(const RationalMatrix& m);

// Exact gradient matrix of the alternating product at an integer point;
// rows indexed by coordinates, columns by (x_1..x_r, y_1..y_r).
RationalMatrix jacobian_at(std::span<const mpz_class> n, std::span<const mpz_class> m, int d,
                           Variant variant = Variant::D);

// Same for the x-block only (first r columns).
RationalMatrix jacobian_x_at(std::span<const mpz_class> n, std::span<const mpz_class> m, int d,
                             Variant variant = Variant::D);

struct WitnessSearch {
    bool feasible = true;   // false when 2r < d + d'
    bool found = false;
    std::vector<mpz_class> n, m;
    std::uint64_t examined = 0;
};

// First point (magnitude-ordered, 0,1,-1,2,-2,... per coordinate) in
// [-box, box]^{2r} where the full gradient has rank d + d'.
WitnessSearch find_full_rank_point(int d, int r, long box);

struct NonsingularZeroResult {
    std::vector<mpz_class> z0, w0;  // length 2r each
    std::vector<mpz_class> witness_n, witness_m;
    int rank_at_zero = 0;
};

// Doubling construction: from a full-rank witness (n, m) build the point
// (z0, w0) = ((n, m-reversed), (m, n-reversed)) of the 2r-fold product,
// which maps to the identity with full-rank gradient.
NonsingularZeroResult nonsingular_zero(int d, int r,
                                       std::optional<std::pair<std::vector<mpz_class>,
                                                               std::vector<mpz_class>>>
                                           witness = std::nullopt,
                                       long search_box = 2);

// Number of n in [-N, N]^r where the x-gradient at (n, m) drops rank.
mpz_class degenerate_count(int d, int r, long N, std::span<const mpz_class> m,
                           const WorkBudget& budget);

}  // namespace nilring

#endif
