#ifndef NILRING_GROUP_HPP
#define NILRING_GROUP_HPP

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nilring/index_set.hpp"

namespace nilring {

enum class Variant { D, DTilde };

// Element of the discrete step-2 group of degree d: one exact integer per
// coordinate in the IndexSet layout.
class GroupElement {
public:
    explicit GroupElement(int d) : d_(d), coords_(IndexSet::get(d).size()) {}
    GroupElement(int d, std::vector<mpz_class> coords);

    static GroupElement identity(int d) { return GroupElement(d); }

    int d() const { return d_; }
    const IndexSet& index_set() const { return IndexSet::get(d_); }
    std::size_t size() const { return coords_.size(); }

    const mpz_class& operator[](std::size_t i) const { return coords_[i]; }
    mpz_class& operator[](std::size_t i) { return coords_[i]; }
    const std::vector<mpz_class>& coords() const { return coords_; }

    // Non-central block (l2 = 0), length d.
    std::span<const mpz_class> noncentral() const {
        return {coords_.data(), static_cast<std::size_t>(d_)};
    }
    // Central block (l2 >= 1), length d(d-1)/2.
    std::span<const mpz_class> central() const {
        return {coords_.data() + d_, coords_.size() - static_cast<std::size_t>(d_)};
    }

    bool is_identity() const;

    friend bool operator==(const GroupElement& a, const GroupElement& b) {
        return a.d_ == b.d_ && a.coords_ == b.coords_;
    }
    friend bool operator!=(const GroupElement& a, const GroupElement& b) { return !(a == b); }

private:
    int d_;
    std::vector<mpz_class> coords_;
};

// Same shape with floating coordinates, for non-integer dilations.
class RealGroupElement {
public:
    explicit RealGroupElement(int d) : d_(d), coords_(IndexSet::get(d).size(), 0.0) {}
    RealGroupElement(int d, std::vector<double> coords);

    int d() const { return d_; }
    const IndexSet& index_set() const { return IndexSet::get(d_); }
    std::size_t size() const { return coords_.size(); }
    double operator[](std::size_t i) const { return coords_[i]; }
    double& operator[](std::size_t i) { return coords_[i]; }
    const std::vector<double>& coords() const { return coords_; }

private:
    int d_;
    std::vector<double> coords_;
};

GroupElement multiply(const GroupElement& g, const GroupElement& h);
GroupElement inverse(const GroupElement& g);

// Coordinate (l1,l2) scaled by lambda^(l1+l2); a homomorphism for integer lambda.
GroupElement dilate(const mpz_class& lambda, const GroupElement& g);
RealGroupElement dilate(double lambda, const RealGroupElement& g);

// Lossless embedding; throws if a coordinate exceeds the double mantissa.
RealGroupElement to_real(const GroupElement& g);

// The canonical polynomial sequence: coordinate (l1,0) = n^l1, central zero.
GroupElement moment_curve(const mpz_class& n, int d);

// Literal left-to-right alternating product of 2r moment-curve factors.
GroupElement iterated_product(std::span<const mpz_class> n, std::span<const mpz_class> m, int d,
                              Variant variant);

// Same value through the explicit polynomial formulas.
GroupElement closed_form_product(std::span<const mpz_class> n, std::span<const mpz_class> m, int d,
                                 Variant variant);

// Closed-form evaluation over doubles (continuum points).
std::vector<double> closed_form_product_real(std::span<const double> x, std::span<const double> y,
                                             int d, Variant variant);

// Allocation-free variant for hot loops; out must hold d + d' doubles, r <= 32.
void closed_form_product_real_into(std::span<const double> x, std::span<const double> y, int d,
                                   Variant variant, double* out);

// Text form "d=2;[x10,x20,x21]" with coordinates in the documented order.
std::string to_canonical(const GroupElement& g);
GroupElement parse_canonical(const std::string& text);

}  // namespace nilring

#endif
