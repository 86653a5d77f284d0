#pragma once

#include <cmath>
#include <vector>

#include "barriermc/exec.hpp"
#include "barriermc/normal.hpp"

namespace barriermc {

namespace detail {

inline double call_payoff(double s, double strike) { return std::max(s - strike, 0.0); }

inline double scheme_step(const Model& model, const ParamVector& theta, Scheme scheme, double s,
                          double t, double h, double barrier, double z) {
    StepInput inp{s, t, h, &model, &theta, barrier};
    return scheme == Scheme::milstein ? milstein_step(inp, z) : euler_step(inp, z);
}

}  // namespace detail

template <class Uniforms>
double baseline_path_payoff(const Model& model, const ContractView& c, const ParamVector& theta,
                            Scheme scheme, int n_steps, const Uniforms& uniforms,
                            Diagnostics& diag) {
    const double h = c.horizon() / n_steps;
    double s = c.s0;
    if (s > c.barrier) return 0.0;
    double t = c.t0;
    for (int n = 0; n < n_steps; ++n) {
        const double z = normal_quantile_clamped(uniforms[static_cast<std::size_t>(n)],
                                                 diag.quantile_clamps);
        s = detail::scheme_step(model, theta, scheme, s, t, h, c.barrier, z);
        t += h;
        if (s > c.barrier) {
            ++diag.early_knockouts;
            return 0.0;
        }
    }
    return detail::call_payoff(s, c.strike);
}

template <class Uniforms>
double bb_path_payoff(const Model& model, const ContractView& c, const ParamVector& theta,
                      Scheme scheme, int n_steps, const Uniforms& uniforms, Diagnostics& diag) {
    const double h = c.horizon() / n_steps;
    double s = c.s0;
    double t = c.t0;
    double weight = 1.0;
    for (int n = 0; n < n_steps; ++n) {
        const double z = normal_quantile_clamped(uniforms[static_cast<std::size_t>(n)],
                                                 diag.quantile_clamps);
        const double sig = model.sigma(s, t, theta);
        const double s_next = detail::scheme_step(model, theta, scheme, s, t, h, c.barrier, z);
        weight *= 1.0 - bb_crossing_prob(s, s_next, sig, h, c.barrier);
        s = s_next;
        t += h;
        if (weight < 1e-300) {
            ++diag.early_knockouts;
            return 0.0;
        }
    }
    return detail::call_payoff(s, c.strike) * weight;
}

template <class Uniforms>
double oss_path_payoff(const Model& model, const ContractView& c, const ParamVector& theta,
                       int n_steps, const Uniforms& uniforms, Diagnostics& diag) {
    const double h = c.horizon() / n_steps;
    double s = c.s0;
    double t = c.t0;
    ProductAccumulator survival;
    ProductAccumulator non_crossing;
    for (int n = 0; n < n_steps; ++n) {
        StepInput inp{s, t, h, &model, &theta, c.barrier};
        const SurvivalSplit split = survival_split(inp);
        if (split.branch == SurvivalBranch::empty) {
            ++diag.degenerate_survival;
            return 0.0;
        }
        if (split.branch == SurvivalBranch::two_tail) ++diag.two_tail_steps;
        const double s_next = oss_step(inp, split, uniforms[static_cast<std::size_t>(n)],
                                       diag.quantile_clamps, diag.barrier_clamps);
        survival.multiply(split.p);
        non_crossing.multiply(1.0 - oss_crossing_prob(s, s_next, split.sig, h, c.barrier));
        s = s_next;
        t += h;
    }
    return detail::call_payoff(s, c.strike) * survival.value() * non_crossing.value();
}

template <class PathFn>
void run_paths(const SimConfig& cfg, RunningStats& stats, Diagnostics& diag,
               const PathFn& path_fn) {
    const std::uint64_t n = cfg.n_paths;
    const std::size_t n_chunks = static_cast<std::size_t>((n + kChunkSize - 1) / kChunkSize);
    std::vector<RunningStats> chunk_stats(n_chunks);
    std::vector<Diagnostics> chunk_diag(n_chunks);

    parallel_chunks(n, cfg.threads, [&](std::size_t chunk, std::uint64_t begin, std::uint64_t end) {
        RunningStats local;
        Diagnostics local_diag;
        for (std::uint64_t m = begin; m < end; ++m) {
            RngStream stream(cfg.seed, cfg.stream_base + m);
            local.add(path_fn(m, stream, local_diag));
        }
        chunk_stats[chunk] = local;
        chunk_diag[chunk] = local_diag;
    });

    for (std::size_t c = 0; c < n_chunks; ++c) {
        stats.merge(chunk_stats[c]);
        diag.merge(chunk_diag[c]);
    }
}

}  // namespace barriermc
