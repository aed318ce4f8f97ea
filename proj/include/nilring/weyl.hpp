#ifndef NILRING_WEYL_HPP
#define NILRING_WEYL_HPP

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nilring/errors.hpp"
#include "nilring/group.hpp"

namespace nilring {

// Cutoff weight on [-P, P]: sharp indicator or a smooth bump that is 1 on
// [-P/2, P/2] and vanishes at the endpoints.
struct WeightFunction {
    enum class Kind { Indicator, SmoothBump };
    Kind kind = Kind::Indicator;
    double P = 1.0;

    double operator()(double x) const;
    static WeightFunction indicator(double P) { return {Kind::Indicator, P}; }
    static WeightFunction smooth(double P) { return {Kind::SmoothBump, P}; }
};

enum class WeylStrategy { Auto, Direct, PrefixDp };

struct SumResult {
    std::complex<double> value;
    long P = 1;
    int r = 1;
    std::vector<double> theta;
    double normalized_magnitude = 0.0;  // |value| / P^{2r}
};

// Exponential sum over pairs of r-tuples in [-P, P] with the alternating
// product phase.  Direct cost (2P+1)^{2r}; the prefix strategy runs a dynamic
// program over running power sums (cost ~ r * states * (2P+1)^2) and is exact
// to rounding.
SumResult weyl_sum(long P, int r, std::span<const double> theta, int d, WeightFunction phi,
                   WeightFunction psi, Variant variant, WeylStrategy strategy,
                   const WorkBudget& budget);

// One-dimensional analogue with polynomial phase of degree d = theta size.
std::complex<double> classical_weyl_sum(long P, std::span<const double> theta,
                                        WeightFunction phi);

struct McParams {
    std::uint64_t seed = 0;
    std::uint64_t samples = 1'000'000;
};

struct McResult {
    std::complex<double> value;
    double stderr_est = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    bool resolved = true;
};

// Monte Carlo estimate of the phase integral over [-1,1]^{2r} with phase
// e(-D(x,y).beta).
McResult oscillatory_integral(int d, std::span<const double> beta, int r, Variant variant,
                              const McParams& mc, const WorkBudget& budget);

// Same integral with the conjugate phase e(+D(z,w).xi).
McResult singular_integral_phi(int d, std::span<const double> xi, int r, const McParams& mc,
                               const WorkBudget& budget);

// (2 eps)^{-(d+d')} * vol{(z,w) in [-1,1]^{2r} : |D(z,w)_i - t_i| <= eps}.
// As eps -> 0 this estimates the Fourier integral of the phase volume.
// `resolved` is false when no sample hit and the target is not certified
// out of range.
McResult solution_volume_density(int d, std::span<const double> t, int r, double eps,
                                 const McParams& mc, const WorkBudget& budget);

// Interval bound: max possible |D coordinate| over the unit cube.
std::vector<double> closed_form_cube_bounds(int d, int r);

}  // namespace nilring

#endif
