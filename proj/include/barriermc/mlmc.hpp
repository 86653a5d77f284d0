#pragma once

#include <cstdint>
#include <vector>

#include "barriermc/estimators.hpp"

namespace barriermc {

struct MaxLevelExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LevelStats {
    int level = 0;
    double h = 0.0;  // (T - t0) / (N0 * 2^level)
    std::uint64_t m_samples = 0;
    double mean_y = 0.0;   // E[P_l - P_{l-1}] (P_0 at level 0)
    double var_y = 0.0;
    double mean_fine = 0.0;  // E[P_l], for the level-variance diagnostics
    double var_fine = 0.0;
    double cost_per_sample = 0.0;  // fine + coarse step count
};

struct MlmcConfig {
    double eps = 2e-4;        // target RMS accuracy
    int n0 = 1;               // base steps at level 0
    int l_max = 14;
    std::uint64_t m_init = 10000;
    std::uint64_t m_floor = 128;  // never allocate fewer samples per level
    std::uint64_t seed = 0;
    std::uint64_t stream_base = 0;
    bool discount = false;
    double discount_rate = 0.0;
    int threads = 0;

    SimConfig sim_at(int level_steps) const {
        SimConfig s;
        s.n_steps = level_steps;
        s.seed = seed;
        s.stream_base = stream_base;
        s.discount = discount;
        s.discount_rate = discount_rate;
        s.threads = threads;
        return s;
    }
};

struct MlmcResult {
    double price = 0.0;
    double eps = 0.0;
    double total_cost = 0.0;  // sum over levels of M_l * N0 * 2^l steps
    std::vector<LevelStats> levels;
};

// Coarse-path payoff of Algorithm-style coupling: each coarse step of width
// 2h is simulated as two constrained half-steps with coefficients frozen at
// the coarse-left state, the first half's draw reused inside the second
// half's cross term, and bridge factors applied to both halves. Consumes the
// fine path's uniforms: coarse step n reads (u[2n], u[2n+1]).
template <class Uniforms>
double oss_coarse_path_payoff(const Model& model, const ContractView& c, const ParamVector& theta,
                              int n_coarse_steps, const Uniforms& uniforms, Diagnostics& diag);

// One level of the multilevel estimator: level 0 is the plain one-step
// survival estimator on the coarsest grid; level l couples a fine path on
// N0*2^l steps with the coarse path above sharing its uniforms.
LevelStats level_estimator(const Model& model, const OptionSpec& opt, const ParamVector& theta,
                           int level, std::uint64_t m_samples, const MlmcConfig& cfg);

// Standard MLMC driver: pilot variances, optimal sample allocation, level
// extension until the weak-error proxy |mean Y_L|/(2^alpha - 1) < eps/sqrt(2)
// with alpha = 1. Throws MaxLevelExceeded if l_max is hit first.
MlmcResult mlmc_price(const Model& model, const OptionSpec& opt, const ParamVector& theta,
                      const MlmcConfig& cfg);

// Complexity sweep: one full driver run at the tightest accuracy fixes the
// level schedule and calibrates the per-level variances; each target then
// gets a fresh production run sized by the optimal allocation for that eps.
// The reported cost is sum_l M_l * N0 * 2^l over the production samples, so
// the eps^-2 scaling of the allocation is measured directly.
std::vector<MlmcResult> mlmc_cost_sweep(const Model& model, const OptionSpec& opt,
                                        const ParamVector& theta, const MlmcConfig& cfg,
                                        std::span<const double> eps_grid);

}  // namespace barriermc

#include "barriermc/mlmc_impl.hpp"
