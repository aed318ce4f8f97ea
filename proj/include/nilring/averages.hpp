#ifndef NILRING_AVERAGES_HPP
#define NILRING_AVERAGES_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "nilring/errors.hpp"
#include "nilring/fastpath.hpp"
#include "nilring/group.hpp"

namespace nilring {

// Finitely supported function on the group, living on a weighted box
// (radius B^{l1+l2} per coordinate for a scale B, or custom radii).
class BoxFunction {
public:
    BoxFunction(int d, long scale);
    BoxFunction(int d, std::vector<std::int64_t> radii);

    int d() const { return d_; }
    const std::vector<std::int64_t>& radii() const { return radii_; }
    const std::map<FlatKey, std::complex<double>>& values() const { return values_; }
    std::size_t support_size() const { return values_.size(); }

    bool inside(std::span<const std::int64_t> coords) const;
    void set(std::span<const std::int64_t> coords, std::complex<double> v);
    void add(std::span<const std::int64_t> coords, std::complex<double> v);
    std::complex<double> at(std::span<const std::int64_t> coords) const;

    double l1_norm() const;
    double l2_norm() const;

    static BoxFunction delta(int d, long scale = 1);

private:
    int d_;
    std::vector<std::int64_t> radii_;
    std::map<FlatKey, std::complex<double>> values_;
};

// Group convolution (f * K)(x) = sum_y f(y^{-1} x) K(y).  The output box is
// the input box enlarged by the kernel support.
BoxFunction convolve(const BoxFunction& f, const BoxFunction& kernel, const WorkBudget& budget);

// Moment-curve kernel: sum_n N^{-1} chi(n/N) at the curve point of n, where
// chi is the standard central bump (1 on [-1,1], supported in [-2,2]).
BoxFunction smoothing_kernel(int d, long N);

// Smoothed average along the curve: f convolved with the scale-N kernel.
BoxFunction smoothed_average(const BoxFunction& f, long N, const WorkBudget& budget);

struct MaximalResult {
    BoxFunction sup;        // pointwise sup over scales of |f * K_{2^k}|
    double input_l2 = 0.0;
    double sup_l2 = 0.0;
    double ratio = 0.0;
};

MaximalResult maximal_function(const BoxFunction& f, std::span<const int> scales,
                               const WorkBudget& budget);

// Supremum over increasing subsequences of the l^rho increment norm.
double variation_seminorm(std::span<const std::complex<double>> a, double rho);

struct RademacherMenshovResult {
    double lhs = 0.0;  // variation seminorm over [j0, 2^m]
    double rhs = 0.0;  // sqrt(2) * sum of dyadic square functions
    bool holds = false;
};

RademacherMenshovResult rademacher_menshov_check(std::span<const std::complex<double>> a, long j0,
                                                 int m, double rho = 2.0);

// Size / derivative / cancellation bounds for a one-dimensional kernel,
// checked numerically on [-R, R]; throws NumericPreconditionError on failure.
void check_calderon_zygmund(const std::function<double(double)>& kernel, long R);

struct SingularResult {
    BoxFunction out;
    double input_l2 = 0.0;
    double output_l2 = 0.0;
    double ratio = 0.0;
};

// Truncated singular average sum_{|n| <= R} K(n) f(curve(n)^{-1} . g).
SingularResult singular_operator(const BoxFunction& f, const std::function<double(double)>& kernel,
                                 long R, const WorkBudget& budget);

}  // namespace nilring

#endif
