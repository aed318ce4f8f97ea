#ifndef NILRING_RESIDUE_HPP
#define NILRING_RESIDUE_HPP

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "nilring/errors.hpp"
#include "nilring/group.hpp"

namespace nilring {

// Reduced rational point a/q: gcd(a_1,...,a_m,q) = 1 and each a_i in [0,q).
// Equal fractions always have the same representation.
struct Fraction {
    std::vector<std::int64_t> num;
    std::int64_t den = 1;

    static Fraction reduced(std::vector<std::int64_t> a, std::int64_t q);

    std::size_t dimension() const { return num.size(); }
    friend bool operator==(const Fraction& a, const Fraction& b) {
        return a.den == b.den && a.num == b.num;
    }
};

// Coordinates of a group element modulo q, in the IndexSet layout.
struct ResidueElement {
    int d = 1;
    std::int64_t q = 1;
    std::vector<std::int64_t> coords;  // each in [0,q)
};

ResidueElement reduce_mod(const GroupElement& g, std::int64_t q);
ResidueElement residue_multiply(const ResidueElement& a, const ResidueElement& b);
std::int64_t residue_flat_index(const ResidueElement& h);

// Full table of solution counts of the alternating product equation mod q:
// entry at the flat index of h is |{(m,n) in Z_q^{2r} : D(n,m) = h mod q}|.
// Cost q^{2r}.
std::vector<std::int64_t> count_solutions_table(int d, std::int64_t q, int r,
                                                const WorkBudget& budget,
                                                Variant variant = Variant::D);

mpz_class count_solutions_mod(std::int64_t q, const ResidueElement& h, int r,
                              const WorkBudget& budget);

// Normalized complete exponential sum over Z_q^{2r}; |result| <= 1.
std::complex<double> gauss_sum(int d, const Fraction& a_over_q, int r, Variant variant,
                               const WorkBudget& budget);

// Multiplicative coefficient, exact: built from solution-count ratios at
// prime powers and extended multiplicatively.
mpq_class coefficient_A(std::int64_t q, const GroupElement& h, int r, const WorkBudget& budget);

// Cross-validation path: direct complex sum over reduced fractions with
// denominator exactly q.
std::complex<double> coefficient_A_complex(std::int64_t q, const GroupElement& h, int r,
                                           const WorkBudget& budget);

// Truncated local factor at a prime.
struct LocalFactorReport {
    std::int64_t p = 2;
    int n = 1;
    std::vector<mpq_class> A;  // A(p^v, h), v = 1..n
    mpq_class B;               // 1 + sum of A
};

LocalFactorReport local_factor(std::int64_t p, const GroupElement& h, int r, int n,
                               const WorkBudget& budget);

// Unique factorization g = b . h with b coordinates in [0,Q) and h in the
// scale-Q subgroup (all coordinates divisible by Q).
std::pair<GroupElement, GroupElement> residue_decompose(const GroupElement& g, std::int64_t Q);

// One-dimensional complete sum Q^{-1} sum_n e(-(a_1 n + ... + a_d n^d)/Q).
std::complex<double> classical_gauss_sum(const Fraction& a_over_Q);

// Primes and factorization by trial division (q is always small here).
bool is_prime_small(std::int64_t n);
std::vector<std::pair<std::int64_t, int>> factorize_small(std::int64_t n);

}  // namespace nilring

#endif
