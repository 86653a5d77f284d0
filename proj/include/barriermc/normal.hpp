#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace barriermc {

inline double normal_pdf(double x) {
    static const double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

// Φ via erfc keeps full relative accuracy in the lower tail.
inline double normal_cdf(double x) {
    static const double inv_sqrt2 = 0.7071067811865475244;
    return 0.5 * std::erfc(-x * inv_sqrt2);
}

// Φ⁻¹, Wichura's AS241 (PPND16): ~16 significant digits over the whole of
// (0,1), including the extreme tails the survival sampler lands in when a
// path sits far from the barrier. Rejects p outside (0,1).
double normal_quantile(double p);

// Engine-internal variant: clamps the argument into [1e-16, 1-1e-16] and
// counts the clamp events instead of rejecting.
double normal_quantile_clamped(double p, std::uint64_t& clamp_count);

struct InvalidQuantileArgument : std::domain_error {
    using std::domain_error::domain_error;
};

}  // namespace barriermc
