#include "relret/rng.hpp"

#include <cmath>

namespace relret {

double Rng::normal() {
    // Box-Muller; u1 nudged away from zero so log stays finite
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double Rng::truncated_normal(double stddev, double trunc_sigmas) {
    for (;;) {
        double z = normal();
        if (std::fabs(z) <= trunc_sigmas) return z * stddev;
    }
}

} // namespace relret
