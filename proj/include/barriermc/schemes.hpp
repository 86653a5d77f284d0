#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>

#include "barriermc/model.hpp"

namespace barriermc {

struct StepInput {
    double s;       // current state S_n
    double t;       // t_n
    double h;       // step width, > 0
    const Model* model;
    const ParamVector* theta;
    double barrier;
};

// Raised when the one-step survival set carries zero probability mass.
struct DegenerateSurvival : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SurvivalBranch : std::uint8_t {
    interval,    // survival set is (z_lo, z_hi); z_lo may be -inf, z_hi +inf
    two_tail,    // survival set is (-inf, z_lo) U (z_hi, +inf)
    whole_line,  // parabola never reaches the barrier: p = 1
    empty,       // no mass below the barrier: p = 0
};

// Characterization of {z : one-step image < B} in standard-normal space,
// carrying the coefficients it was computed from so the step evaluation does
// not have to re-query the model.
struct SurvivalSplit {
    SurvivalBranch branch = SurvivalBranch::interval;
    double p_minus = 0.0;    // Phi mass strictly below the survival set
    double p = 0.0;          // survival probability
    double z_lo = -std::numeric_limits<double>::infinity();
    double z_hi = std::numeric_limits<double>::infinity();
    double left_mass = 0.0;  // two_tail only: Phi(z_lo)
    bool linear = false;     // sigma' (effectively) zero: simplified scheme
    double mu = 0.0;         // coefficients frozen at (s_n, t_n)
    double sig = 0.0;
    double sigp = 0.0;
};

// Solves {z : a z^2 + b z + c < 0} for the normalized one-step quadratic.
// |a| < lin_threshold falls back to the linear case. Root extraction uses
// the cancellation-free q-form.
SurvivalSplit solve_survival_quadratic(double a, double b, double c, double lin_threshold);

double milstein_step(const StepInput& inp, double z);
double euler_step(const StepInput& inp, double z);

// Survival probabilities p~-, p~ for the step out of inp.s.
// Requires s < B and sigma(s,t) > 0.
SurvivalSplit survival_split(const StepInput& inp);

// Maps a uniform u in (0,1) to the constrained standard-normal draw within
// the split's survival set. Throws DegenerateSurvival on the empty branch.
double sample_survival_z(const SurvivalSplit& split, double u, std::uint64_t& clamp_count);

// Modified (one-step survival) step: the scheme evaluated at the constrained
// draw. Output is strictly below the barrier; `barrier_clamps` counts the
// rounding events where that had to be enforced.
double oss_step(const StepInput& inp, const SurvivalSplit& split, double u,
                std::uint64_t& quantile_clamps, std::uint64_t& barrier_clamps);
double oss_step(const StepInput& inp, double u);

// Brownian-bridge crossing probability between two recorded states, with
// positive parts (value 1 once either state is at or above B).
double bb_crossing_prob(double s_n, double s_next, double sigma_n, double h, double barrier);

// Crossing probability for the survival-constrained path: both states must
// be strictly below B.
double oss_crossing_prob(double s_n, double s_next, double sigma_n, double h, double barrier);

}  // namespace barriermc
