#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>

#include "barriermc/model.hpp"
#include "barriermc/rng.hpp"
#include "barriermc/schemes.hpp"
#include "barriermc/stats.hpp"

namespace barriermc {

enum class Scheme : std::uint8_t { euler, milstein };

struct SimConfig {
    int n_steps = 256;
    std::uint64_t n_paths = 100000;
    Scheme scheme = Scheme::milstein;
    std::uint64_t seed = 0;
    std::uint64_t stream_base = 0;
    bool discount = false;
    double discount_rate = 0.0;
    int threads = 0;  // 0: hardware concurrency

    double step_width(const OptionSpec& opt) const {
        return opt.horizon() / static_cast<double>(n_steps);
    }
    void validate() const {
        if (n_steps < 1 || n_paths < 1) {
            throw std::invalid_argument("SimConfig: requires N >= 1 and M >= 1");
        }
    }
};

// Numeric view of the contract with S0/B/K taken from theta when present,
// so bumped parameter vectors steer the whole simulation.
struct ContractView {
    double s0;
    double barrier;
    double strike;
    double t0;
    double expiry;
    double horizon() const { return expiry - t0; }
};

ContractView make_contract(const OptionSpec& opt, const ParamVector& theta);

// Adapts a stream to the indexable-uniforms shape the path kernels consume,
// drawing lazily so early-terminated paths cost nothing extra.
struct StreamUniforms {
    const RngStream* stream;
    double operator[](std::size_t i) const { return stream->uniform_at(i); }
};

// --- per-path kernels -------------------------------------------------------
// Kernels consume exactly one uniform per step (uniforms[n] drives step n) and
// return the undiscounted weighted payoff of a single path. `Uniforms` is any
// type indexable by std::size_t yielding doubles in (0,1).

template <class Uniforms>
double baseline_path_payoff(const Model& model, const ContractView& c, const ParamVector& theta,
                            Scheme scheme, int n_steps, const Uniforms& uniforms,
                            Diagnostics& diag);

template <class Uniforms>
double bb_path_payoff(const Model& model, const ContractView& c, const ParamVector& theta,
                      Scheme scheme, int n_steps, const Uniforms& uniforms, Diagnostics& diag);

template <class Uniforms>
double oss_path_payoff(const Model& model, const ContractView& c, const ParamVector& theta,
                       int n_steps, const Uniforms& uniforms, Diagnostics& diag);

// --- estimators --------------------------------------------------------------

// Discrete-monitoring baseline: q(S_N) * 1{max_n S_n <= B}. Exists to exhibit
// the alpha = 1/2 weak-order ceiling.
EstimatorReport price_discrete_baseline(const Model& model, const OptionSpec& opt,
                                        const ParamVector& theta, const SimConfig& cfg);

// Brownian-bridge estimator: q(S_N) * prod(1 - p_hat_n).
EstimatorReport price_bb(const Model& model, const OptionSpec& opt, const ParamVector& theta,
                         const SimConfig& cfg);

// One-step survival Brownian-bridge estimator:
// q(S_N) * prod(1 - p*_n) * prod(p~_n). cfg.scheme == euler runs the model
// through an EulerView so the simplified scheme is used throughout.
EstimatorReport price_oss_bb(const Model& model, const OptionSpec& opt, const ParamVector& theta,
                             const SimConfig& cfg);

// Shared driver: runs `path_fn(path_index, stream, diag) -> double` over
// cfg.n_paths paths with deterministic chunking and in-order reduction.
template <class PathFn>
void run_paths(const SimConfig& cfg, RunningStats& stats, Diagnostics& diag,
               const PathFn& path_fn);

}  // namespace barriermc

#include "barriermc/estimators_impl.hpp"
