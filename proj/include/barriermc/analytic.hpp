#pragma once

#include <stdexcept>

namespace barriermc {

// Black-Scholes inputs for the closed-form references.
struct BsParams {
    double s0;
    double strike;
    double barrier;
    double rate;
    double sigma;
    double tau;  // T - t0

    void validate() const {
        if (!(sigma > 0.0) || !(tau > 0.0) || !(barrier > strike)) {
            throw std::invalid_argument("BsParams: requires sigma > 0, tau > 0, B > K");
        }
    }
};

double bs_call(const BsParams& p);
double bs_put(const BsParams& p);

// Continuously monitored up-and-out call (reflection-principle closed form).
// Returns 0 at or above the barrier.
double bs_up_and_out_call(const BsParams& p);

enum class BsComponent { spot, vol, rate, strike, barrier };

// Richardson-extrapolated central differences of the closed form; order 1 or 2.
double bs_barrier_greek(const BsParams& p, BsComponent component, int order);

}  // namespace barriermc
