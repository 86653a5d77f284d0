#pragma once

#include <array>
#include <cmath>
#include <string>

#include "barriermc/normal.hpp"

namespace barriermc {

namespace detail {

// Coefficient values and local derivatives at (s, t).
struct Coeffs {
    double mu, sig, sigp;
    double mu_s, sig_s, sigp_s;

    static Coeffs at(const Model& m, double s, double t, const ParamVector& th) {
        return {m.mu(s, t, th),   m.sigma(s, t, th),   m.sigma_prime(s, t, th),
                m.mu_s(s, t, th), m.sigma_s(s, t, th), m.sigma_prime_s(s, t, th)};
    }
};

// Tangent of the crossing factor exponent E = -2(B-s)(B-s')/(sig^2 h).
inline double crossing_exponent_tangent(double barrier, double s, double s_next, double sig,
                                        double h, double d_s, double d_s_next, double d_sig,
                                        double d_barrier) {
    const double inv = 1.0 / (sig * sig * h);
    const double g0 = barrier - s;
    const double g1 = barrier - s_next;
    return 2.0 * g1 * inv * d_s + 2.0 * g0 * inv * d_s_next +
           4.0 * g0 * g1 * inv / sig * d_sig - 2.0 * (g0 + g1) * inv * d_barrier;
}

[[noreturn]] inline void throw_nonfinite(const char* what, int step) {
    throw NonFiniteTangent(std::string(what) + " became non-finite at step " +
                           std::to_string(step));
}

}  // namespace detail

template <class Uniforms>
double oss_path_tangents(const Model& model, const ContractView& c, const ParamVector& theta,
                         int n_steps, const Uniforms& uniforms,
                         std::span<const ComponentRef> comps, std::span<double> d_out,
                         Diagnostics& diag) {
    const std::size_t nc = comps.size();
    if (nc > kMaxGreekComponents || d_out.size() < nc) {
        throw std::invalid_argument("oss_path_tangents: bad component span");
    }
    const double h = c.horizon() / n_steps;
    const double sqrt_h = std::sqrt(h);

    double s = c.s0;
    double t = c.t0;
    double prod_surv = 1.0;   // prod p~_n
    double prod_cross = 1.0;  // prod (1 - p*_n)
    std::array<double, kMaxGreekComponents> d_s{}, d_prod_surv{}, d_prod_cross{};
    for (std::size_t i = 0; i < nc; ++i) d_s[i] = comps[i].is_s0 ? 1.0 : 0.0;

    for (int n = 0; n < n_steps; ++n) {
        const StepInput inp{s, t, h, &model, &theta, c.barrier};
        const SurvivalSplit split = survival_split(inp);
        if (split.branch == SurvivalBranch::empty) {
            ++diag.degenerate_survival;
            for (std::size_t i = 0; i < nc; ++i) d_out[i] = 0.0;
            return 0.0;
        }
        if (split.branch == SurvivalBranch::two_tail) ++diag.two_tail_steps;

        const auto cf = detail::Coeffs::at(model, s, t, theta);
        const double sig_sqrt_h = cf.sig * sqrt_h;

        // Realized constrained draw shared by every component.
        const double u = uniforms[static_cast<std::size_t>(n)];
        const double z = sample_survival_z(split, u, diag.quantile_clamps);
        double s_next = s + split.mu * h + split.sig * sqrt_h * z;
        if (!split.linear) s_next += 0.5 * split.sig * split.sigp * h * (z * z - 1.0);
        if (s_next >= c.barrier) {
            s_next = std::nextafter(c.barrier, -std::numeric_limits<double>::infinity());
            ++diag.barrier_clamps;
        }
        const double pdf_z = normal_pdf(z);
        const double gap = c.barrier - s - cf.mu * h;  // B - s - mu h
        const double p_star = oss_crossing_prob(s, s_next, cf.sig, h, c.barrier);

        std::array<double, kMaxGreekComponents> d_s_next;
        for (std::size_t i = 0; i < nc; ++i) {
            const int ci = comps[i].theta_index;
            const double d_b = comps[i].is_barrier ? 1.0 : 0.0;
            const double d_mu = cf.mu_s * d_s[i] + model.mu_param(ci, s, t, theta);
            const double d_sig = cf.sig_s * d_s[i] + model.sigma_param(ci, s, t, theta);
            const double d_sigp = cf.sigp_s * d_s[i] + model.sigma_prime_param(ci, s, t, theta);

            // Survival-probability tangents.
            double d_p_minus = 0.0;
            double d_p = 0.0;
            double d_arg;  // tangent of the quantile argument actually sampled
            if (split.linear) {
                const double z_star = split.z_hi;
                const double dz = (d_b - d_s[i] - h * d_mu) / sig_sqrt_h - z_star / cf.sig * d_sig;
                d_p = normal_pdf(z_star) * dz;
                d_arg = u * d_p;
            } else if (split.branch == SurvivalBranch::whole_line) {
                d_arg = 0.0;
            } else {
                // Implicit differentiation of F(z) = 1/2 sig' sqrt(h) z^2 + z - k.
                auto root_tangent = [&](double zr) {
                    const double g = (sqrt_h / cf.sig) * d_mu + gap / (cf.sig * sig_sqrt_h) * d_sig +
                                     0.5 * sqrt_h * (zr * zr - 1.0) * d_sigp +
                                     (d_s[i] - d_b) / sig_sqrt_h;
                    return -g / (cf.sigp * sqrt_h * zr + 1.0);
                };
                const double dz_lo = root_tangent(split.z_lo);
                const double dz_hi = root_tangent(split.z_hi);
                const double pdf_lo = normal_pdf(split.z_lo);
                const double pdf_hi = normal_pdf(split.z_hi);
                if (split.branch == SurvivalBranch::interval) {
                    d_p_minus = pdf_lo * dz_lo;
                    d_p = pdf_hi * dz_hi - d_p_minus;
                    d_arg = d_p_minus + u * d_p;
                } else {  // two_tail: survival mass on both sides of (z_lo, z_hi)
                    d_p = pdf_lo * dz_lo - pdf_hi * dz_hi;
                    d_arg = split.p * u <= split.left_mass ? u * d_p : (u - 1.0) * d_p;
                }
            }

            // Step tangent through the constrained draw z = Phi^-1(arg).
            const double d_z = d_arg / pdf_z;
            double dsn = d_s[i] + h * d_mu + sqrt_h * z * d_sig;
            if (!split.linear) {
                dsn += 0.5 * h * (z * z - 1.0) * (cf.sigp * d_sig + cf.sig * d_sigp) +
                       (sig_sqrt_h + cf.sig * cf.sigp * h * z) * d_z;
            } else {
                dsn += sig_sqrt_h * d_z;
            }
            if (!std::isfinite(dsn)) detail::throw_nonfinite("state tangent", n);
            d_s_next[i] = dsn;

            // Crossing-factor tangent and the two product-rule accumulators.
            const double d_e = detail::crossing_exponent_tangent(c.barrier, s, s_next, cf.sig, h,
                                                                 d_s[i], dsn, d_sig, d_b);
            const double d_p_star = p_star * d_e;
            d_prod_surv[i] = d_prod_surv[i] * split.p + d_p * prod_surv;
            d_prod_cross[i] = d_prod_cross[i] * (1.0 - p_star) - d_p_star * prod_cross;
        }

        prod_surv *= split.p;
        prod_cross *= 1.0 - p_star;
        for (std::size_t i = 0; i < nc; ++i) d_s[i] = d_s_next[i];
        s = s_next;
        t += h;
    }

    const double q = std::max(s - c.strike, 0.0);
    const double indicator = s > c.strike ? 1.0 : 0.0;
    for (std::size_t i = 0; i < nc; ++i) {
        const double d_k = comps[i].is_strike ? 1.0 : 0.0;
        const double d = indicator * (d_s[i] - d_k) * prod_surv * prod_cross +
                         q * d_prod_surv[i] * prod_cross + q * prod_surv * d_prod_cross[i];
        if (!std::isfinite(d)) detail::throw_nonfinite("payoff tangent", n_steps);
        d_out[i] = d;
    }
    return q * prod_surv * prod_cross;
}

template <class Uniforms>
double bb_path_tangents(const Model& model, const ContractView& c, const ParamVector& theta,
                        Scheme scheme, int n_steps, const Uniforms& uniforms,
                        std::span<const ComponentRef> comps, std::span<double> d_out,
                        Diagnostics& diag) {
    const std::size_t nc = comps.size();
    if (nc > kMaxGreekComponents || d_out.size() < nc) {
        throw std::invalid_argument("bb_path_tangents: bad component span");
    }
    const double h = c.horizon() / n_steps;
    const double sqrt_h = std::sqrt(h);
    const bool milstein = scheme == Scheme::milstein;

    double s = c.s0;
    double t = c.t0;
    double weight = 1.0;  // prod (1 - p_hat_n)
    std::array<double, kMaxGreekComponents> d_s{}, d_weight{};
    for (std::size_t i = 0; i < nc; ++i) d_s[i] = comps[i].is_s0 ? 1.0 : 0.0;

    for (int n = 0; n < n_steps; ++n) {
        const double z = normal_quantile_clamped(uniforms[static_cast<std::size_t>(n)],
                                                 diag.quantile_clamps);
        const auto cf = detail::Coeffs::at(model, s, t, theta);
        const double s_next = s + cf.mu * h + cf.sig * sqrt_h * z +
                              (milstein ? 0.5 * cf.sig * cf.sigp * h * (z * z - 1.0) : 0.0);
        const double p_hat = bb_crossing_prob(s, s_next, cf.sig, h, c.barrier);
        const bool interior = s < c.barrier && s_next < c.barrier;

        for (std::size_t i = 0; i < nc; ++i) {
            const int ci = comps[i].theta_index;
            const double d_b = comps[i].is_barrier ? 1.0 : 0.0;
            const double d_mu = cf.mu_s * d_s[i] + model.mu_param(ci, s, t, theta);
            const double d_sig = cf.sig_s * d_s[i] + model.sigma_param(ci, s, t, theta);
            double dsn = d_s[i] + h * d_mu + sqrt_h * z * d_sig;
            if (milstein) {
                const double d_sigp = cf.sigp_s * d_s[i] + model.sigma_prime_param(ci, s, t, theta);
                dsn += 0.5 * h * (z * z - 1.0) * (cf.sigp * d_sig + cf.sig * d_sigp);
            }
            if (!std::isfinite(dsn)) detail::throw_nonfinite("state tangent", n);

            double d_p_hat = 0.0;
            if (interior) {
                const double d_e = detail::crossing_exponent_tangent(
                    c.barrier, s, s_next, cf.sig, h, d_s[i], dsn, d_sig, d_b);
                d_p_hat = p_hat * d_e;
            }
            d_weight[i] = d_weight[i] * (1.0 - p_hat) - d_p_hat * weight;
            d_s[i] = dsn;
        }
        weight *= 1.0 - p_hat;
        s = s_next;
        t += h;

        if (weight == 0.0) {
            bool live = false;
            for (std::size_t i = 0; i < nc; ++i) live = live || d_weight[i] != 0.0;
            if (!live) {
                ++diag.early_knockouts;
                for (std::size_t i = 0; i < nc; ++i) d_out[i] = 0.0;
                return 0.0;
            }
        }
    }

    const double q = std::max(s - c.strike, 0.0);
    const double indicator = s > c.strike ? 1.0 : 0.0;
    for (std::size_t i = 0; i < nc; ++i) {
        const double d_k = comps[i].is_strike ? 1.0 : 0.0;
        const double d = indicator * (d_s[i] - d_k) * weight + q * d_weight[i];
        if (!std::isfinite(d)) detail::throw_nonfinite("payoff tangent", n_steps);
        d_out[i] = d;
    }
    return q * weight;
}

}  // namespace barriermc
