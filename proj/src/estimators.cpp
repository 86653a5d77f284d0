#include "barriermc/estimators.hpp"

#include <chrono>
#include <cmath>

namespace barriermc {

namespace {

double discount_factor(const SimConfig& cfg, const OptionSpec& opt) {
    return cfg.discount ? std::exp(-cfg.discount_rate * opt.horizon()) : 1.0;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

ContractView make_contract(const OptionSpec& opt, const ParamVector& theta) {
    ContractView c{0.0, opt.barrier, opt.strike, opt.t0, opt.expiry};
    const int s0_idx = theta.index_of("S0");
    if (s0_idx < 0) {
        throw std::invalid_argument("make_contract: theta must carry an S0 component");
    }
    c.s0 = theta.value(s0_idx);
    if (const int b_idx = theta.index_of("B"); b_idx >= 0) c.barrier = theta.value(b_idx);
    if (const int k_idx = theta.index_of("K"); k_idx >= 0) c.strike = theta.value(k_idx);
    return c;
}

EstimatorReport price_discrete_baseline(const Model& model, const OptionSpec& opt,
                                        const ParamVector& theta, const SimConfig& cfg) {
    const auto t0 = Clock::now();
    cfg.validate();
    const ContractView c = make_contract(opt, theta);
    RunningStats stats;
    Diagnostics diag;
    run_paths(cfg, stats, diag, [&](std::uint64_t, const RngStream& stream, Diagnostics& d) {
        return baseline_path_payoff(model, c, theta, cfg.scheme, cfg.n_steps,
                                    StreamUniforms{&stream}, d);
    });
    return EstimatorReport::from(stats, cfg.n_steps, seconds_since(t0), diag,
                                 discount_factor(cfg, opt));
}

EstimatorReport price_bb(const Model& model, const OptionSpec& opt, const ParamVector& theta,
                         const SimConfig& cfg) {
    const auto t0 = Clock::now();
    cfg.validate();
    const ContractView c = make_contract(opt, theta);
    RunningStats stats;
    Diagnostics diag;
    run_paths(cfg, stats, diag, [&](std::uint64_t, const RngStream& stream, Diagnostics& d) {
        return bb_path_payoff(model, c, theta, cfg.scheme, cfg.n_steps, StreamUniforms{&stream},
                              d);
    });
    return EstimatorReport::from(stats, cfg.n_steps, seconds_since(t0), diag,
                                 discount_factor(cfg, opt));
}

EstimatorReport price_oss_bb(const Model& model, const OptionSpec& opt, const ParamVector& theta,
                             const SimConfig& cfg) {
    const auto t0 = Clock::now();
    cfg.validate();
    const ContractView c = make_contract(opt, theta);
    if (!(c.s0 < c.barrier)) {
        throw std::invalid_argument("price_oss_bb: requires S0 < B");
    }
    const EulerView euler_view(model);
    const Model& routed = cfg.scheme == Scheme::euler ? static_cast<const Model&>(euler_view)
                                                      : model;
    RunningStats stats;
    Diagnostics diag;
    run_paths(cfg, stats, diag, [&](std::uint64_t, const RngStream& stream, Diagnostics& d) {
        return oss_path_payoff(routed, c, theta, cfg.n_steps, StreamUniforms{&stream}, d);
    });
    return EstimatorReport::from(stats, cfg.n_steps, seconds_since(t0), diag,
                                 discount_factor(cfg, opt));
}

}  // namespace barriermc
