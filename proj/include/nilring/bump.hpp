#ifndef NILRING_BUMP_HPP
#define NILRING_BUMP_HPP

#include <cmath>

namespace nilring {

// Smooth step built from exp(-1/t): 0 on (-inf,0], 1 on [1,inf).
inline double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    double a = std::exp(-1.0 / t);
    double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

// Radial profile with 1 on [0,1], smooth descent on [1,2], 0 on [2,inf).
inline double bump_profile(double t) {
    t = std::abs(t);
    if (t <= 1.0) return 1.0;
    if (t >= 2.0) return 0.0;
    return smooth_step(2.0 - t);
}

// Rescaled central cutoff: 1 on [-1,1], supported in [-2,2].
inline double central_bump(double t) { return bump_profile(t); }

}  // namespace nilring

#endif
