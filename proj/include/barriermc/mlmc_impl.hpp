#pragma once

#include <cmath>

#include "barriermc/normal.hpp"

namespace barriermc {

template <class Uniforms>
double oss_coarse_path_payoff(const Model& model, const ContractView& c, const ParamVector& theta,
                              int n_coarse_steps, const Uniforms& uniforms, Diagnostics& diag) {
    const double h = c.horizon() / (2.0 * n_coarse_steps);  // fine half-step width
    const double sqrt_h = std::sqrt(h);
    double s = c.s0;
    double t = c.t0;
    ProductAccumulator survival;
    ProductAccumulator non_crossing;

    for (int n = 0; n < n_coarse_steps; ++n) {
        // Coefficients frozen at the coarse-left state for the whole 2h step.
        const double mu = model.mu(s, t, theta);
        const double sig = model.sigma(s, t, theta);
        const double sigp = model.level_dependent_vol() ? model.sigma_prime(s, t, theta) : 0.0;
        const double sig_sqrt_h = sig * sqrt_h;
        const double nu = sig * sigp * h;

        // First half-step: the standard constrained step out of s.
        const StepInput inp{s, t, h, &model, &theta, c.barrier};
        const SurvivalSplit split1 = survival_split(inp);
        if (split1.branch == SurvivalBranch::empty) {
            ++diag.degenerate_survival;
            return 0.0;
        }
        if (split1.branch == SurvivalBranch::two_tail) ++diag.two_tail_steps;
        const double u1 = uniforms[static_cast<std::size_t>(2 * n)];
        const double z1 = sample_survival_z(split1, u1, diag.quantile_clamps);
        double s_half = s + mu * h + sig_sqrt_h * z1 + 0.5 * nu * (z1 * z1 - 1.0);
        if (s_half >= c.barrier) {
            s_half = std::nextafter(c.barrier, -std::numeric_limits<double>::infinity());
            ++diag.barrier_clamps;
        }

        // Second half-step keeps the frozen coefficients and reuses z1 in the
        // cross term: image(z2) = s_half + mu h + sig sqrt(h) z2
        //                         + nu/2 (2 z1 z2 + z2^2 - 1).
        const double qa = 0.5 * sigp * sqrt_h;
        const double qb = 1.0 + sigp * sqrt_h * z1;
        const double qc = (s_half + mu * h - 0.5 * nu - c.barrier) / sig_sqrt_h;
        const SurvivalSplit split2 =
            solve_survival_quadratic(qa, qb, qc, 1e-12 * sig_sqrt_h);
        if (split2.branch == SurvivalBranch::empty) {
            ++diag.degenerate_survival;
            return 0.0;
        }
        if (split2.branch == SurvivalBranch::two_tail) ++diag.two_tail_steps;
        const double u2 = uniforms[static_cast<std::size_t>(2 * n + 1)];
        const double z2 = sample_survival_z(split2, u2, diag.quantile_clamps);
        double s_next =
            s_half + mu * h + sig_sqrt_h * z2 + 0.5 * nu * (2.0 * z1 * z2 + z2 * z2 - 1.0);
        if (s_next >= c.barrier) {
            s_next = std::nextafter(c.barrier, -std::numeric_limits<double>::infinity());
            ++diag.barrier_clamps;
        }

        survival.multiply(split1.p);
        survival.multiply(split2.p);
        non_crossing.multiply(1.0 - oss_crossing_prob(s, s_half, sig, h, c.barrier));
        non_crossing.multiply(1.0 - oss_crossing_prob(s_half, s_next, sig, h, c.barrier));

        s = s_next;
        t += 2.0 * h;
    }
    return std::max(s - c.strike, 0.0) * survival.value() * non_crossing.value();
}

}  // namespace barriermc
