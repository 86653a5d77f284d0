#include "barriermc/schemes.hpp"

#include <algorithm>
#include <cmath>

#include "barriermc/normal.hpp"

namespace barriermc {

namespace {

double clamp_unit(double p) { return std::clamp(p, 0.0, 1.0); }

double cdf_or_limit(double z) {
    if (std::isinf(z)) return z > 0.0 ? 1.0 : 0.0;
    return normal_cdf(z);
}

}  // namespace

SurvivalSplit solve_survival_quadratic(double a, double b, double c, double lin_threshold) {
    SurvivalSplit split;
    if (std::abs(a) < lin_threshold) {
        split.linear = true;
        constexpr double b_tiny = 1e-300;
        if (std::abs(b) < b_tiny) {
            if (c < 0.0) {
                split.branch = SurvivalBranch::whole_line;
                split.p = 1.0;
            } else {
                split.branch = SurvivalBranch::empty;
            }
            return split;
        }
        const double root = -c / b;
        split.branch = SurvivalBranch::interval;
        if (b > 0.0) {
            split.z_hi = root;
            split.p = cdf_or_limit(root);
        } else {
            split.z_lo = root;
            split.p_minus = cdf_or_limit(root);
            split.p = clamp_unit(1.0 - split.p_minus);
        }
        return split;
    }

    const double disc = b * b - 4.0 * a * c;
    if (disc <= 0.0) {
        // The parabola never crosses zero: all-or-nothing by the sign of a.
        split.branch = a > 0.0 ? SurvivalBranch::empty : SurvivalBranch::whole_line;
        split.p = a > 0.0 ? 0.0 : 1.0;
        return split;
    }
    const double sqrt_disc = std::sqrt(disc);
    const double q = -0.5 * (b + std::copysign(sqrt_disc, b == 0.0 ? 1.0 : b));
    const double r1 = q / a;
    const double r2 = c / q;
    const double z_lo = std::min(r1, r2);
    const double z_hi = std::max(r1, r2);

    if (a > 0.0) {
        split.branch = SurvivalBranch::interval;
        split.z_lo = z_lo;
        split.z_hi = z_hi;
        split.p_minus = cdf_or_limit(z_lo);
        split.p = clamp_unit(cdf_or_limit(z_hi) - split.p_minus);
    } else {
        split.branch = SurvivalBranch::two_tail;
        split.z_lo = z_lo;
        split.z_hi = z_hi;
        split.left_mass = cdf_or_limit(z_lo);
        split.p = clamp_unit(split.left_mass + 1.0 - cdf_or_limit(z_hi));
    }
    return split;
}

double milstein_step(const StepInput& inp, double z) {
    const double mu = inp.model->mu(inp.s, inp.t, *inp.theta);
    const double sig = inp.model->sigma(inp.s, inp.t, *inp.theta);
    const double sigp = inp.model->sigma_prime(inp.s, inp.t, *inp.theta);
    const double sqrt_h = std::sqrt(inp.h);
    return inp.s + mu * inp.h + sig * sqrt_h * z + 0.5 * sig * sigp * inp.h * (z * z - 1.0);
}

double euler_step(const StepInput& inp, double z) {
    const double mu = inp.model->mu(inp.s, inp.t, *inp.theta);
    const double sig = inp.model->sigma(inp.s, inp.t, *inp.theta);
    return inp.s + mu * inp.h + sig * std::sqrt(inp.h) * z;
}

SurvivalSplit survival_split(const StepInput& inp) {
    if (!(inp.s < inp.barrier)) {
        throw std::invalid_argument("survival_split: state must be strictly below the barrier");
    }
    const double mu = inp.model->mu(inp.s, inp.t, *inp.theta);
    const double sig = inp.model->sigma(inp.s, inp.t, *inp.theta);
    if (!(sig > 0.0)) {
        throw std::invalid_argument("survival_split: volatility must be positive");
    }
    const double sqrt_h = std::sqrt(inp.h);
    const double sig_sqrt_h = sig * sqrt_h;
    const double sigp = inp.model->level_dependent_vol()
                            ? inp.model->sigma_prime(inp.s, inp.t, *inp.theta)
                            : 0.0;
    const double a = 0.5 * sigp * sqrt_h;
    if (std::abs(a) < 1e-12 * sig_sqrt_h) {
        // sigma' vanishes (or is numerically negligible): the scheme is Euler
        // and the survival set is the half-line below the drifted barrier gap.
        const double gap = (inp.barrier - inp.s - mu * inp.h) / sig_sqrt_h;
        SurvivalSplit split;
        split.linear = true;
        split.branch = SurvivalBranch::interval;
        split.z_hi = gap;
        split.p = normal_cdf(gap);
        split.mu = mu;
        split.sig = sig;
        split.sigp = 0.0;
        return split;
    }
    const double k = (inp.barrier - inp.s - mu * inp.h + 0.5 * sig * sigp * inp.h) / sig_sqrt_h;
    SurvivalSplit split = solve_survival_quadratic(a, 1.0, -k, 0.0);
    split.mu = mu;
    split.sig = sig;
    split.sigp = sigp;
    return split;
}

double sample_survival_z(const SurvivalSplit& split, double u, std::uint64_t& clamp_count) {
    switch (split.branch) {
        case SurvivalBranch::empty:
            throw DegenerateSurvival("sample_survival_z: survival set has zero mass");
        case SurvivalBranch::whole_line:
            return normal_quantile_clamped(u, clamp_count);
        case SurvivalBranch::interval:
            return normal_quantile_clamped(split.p_minus + split.p * u, clamp_count);
        case SurvivalBranch::two_tail: {
            const double t = split.p * u;
            const double arg = t <= split.left_mass ? t : 1.0 - split.p + t;
            return normal_quantile_clamped(arg, clamp_count);
        }
    }
    return 0.0;  // unreachable
}

double oss_step(const StepInput& inp, const SurvivalSplit& split, double u,
                std::uint64_t& quantile_clamps, std::uint64_t& barrier_clamps) {
    const double z = sample_survival_z(split, u, quantile_clamps);
    const double sqrt_h = std::sqrt(inp.h);
    double s_next = inp.s + split.mu * inp.h + split.sig * sqrt_h * z;
    if (!split.linear) {
        s_next += 0.5 * split.sig * split.sigp * inp.h * (z * z - 1.0);
    }
    if (s_next >= inp.barrier) {
        // Rounding pushed the constrained image onto/over the barrier.
        s_next = std::nextafter(inp.barrier, -std::numeric_limits<double>::infinity());
        ++barrier_clamps;
    }
    return s_next;
}

double oss_step(const StepInput& inp, double u) {
    std::uint64_t qc = 0, bc = 0;
    return oss_step(inp, survival_split(inp), u, qc, bc);
}

double bb_crossing_prob(double s_n, double s_next, double sigma_n, double h, double barrier) {
    const double d0 = std::max(barrier - s_n, 0.0);
    const double d1 = std::max(barrier - s_next, 0.0);
    return std::exp(-2.0 * d0 * d1 / (sigma_n * sigma_n * h));
}

double oss_crossing_prob(double s_n, double s_next, double sigma_n, double h, double barrier) {
    if (!(s_n < barrier) || !(s_next < barrier)) {
        throw std::invalid_argument("oss_crossing_prob: states must be strictly below the barrier");
    }
    return std::exp(-2.0 * (barrier - s_n) * (barrier - s_next) / (sigma_n * sigma_n * h));
}

}  // namespace barriermc
