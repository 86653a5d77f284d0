#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "barriermc/estimators.hpp"

namespace barriermc {

struct NonFiniteTangent : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Differentiation target resolved against the theta layout. The contract
// components S0/B/K get explicit seed terms in the recursion; model
// parameters enter through the coefficient partials.
struct ComponentRef {
    int theta_index = -1;
    bool is_s0 = false;
    bool is_barrier = false;
    bool is_strike = false;
    std::string name;
};

std::vector<ComponentRef> resolve_components(const ParamVector& theta,
                                             std::span<const std::string> names);

enum class GreekOrder : std::uint8_t {
    first_pathwise,
    first_fd,
    second_fd,
    second_fd_of_pathwise,
};

struct GreekRequest {
    std::vector<std::string> components;
    GreekOrder order = GreekOrder::first_pathwise;
    std::vector<double> fd_steps;  // per component; used by the fd orders
};

enum class BaseEstimator : std::uint8_t { bb, oss_bb };

inline constexpr std::size_t kMaxGreekComponents = 8;

// --- per-path kernels (tangent propagation along one path) -------------------
// Both return the path payoff and fill d_out[i] = d payoff / d theta_i for the
// same realized uniforms. Throws NonFiniteTangent if a tangent degenerates.

template <class Uniforms>
double oss_path_tangents(const Model& model, const ContractView& c, const ParamVector& theta,
                         int n_steps, const Uniforms& uniforms,
                         std::span<const ComponentRef> comps, std::span<double> d_out,
                         Diagnostics& diag);

template <class Uniforms>
double bb_path_tangents(const Model& model, const ContractView& c, const ParamVector& theta,
                        Scheme scheme, int n_steps, const Uniforms& uniforms,
                        std::span<const ComponentRef> comps, std::span<double> d_out,
                        Diagnostics& diag);

// --- estimators ---------------------------------------------------------------

// Pathwise first-order Greeks of the one-step survival Brownian-bridge payoff;
// one report per requested component.
std::vector<EstimatorReport> oss_pathwise_greeks(const Model& model, const OptionSpec& opt,
                                                 const ParamVector& theta, const SimConfig& cfg,
                                                 const GreekRequest& req);

// Pathwise first-order Greeks of the plain Brownian-bridge payoff.
std::vector<EstimatorReport> bb_pathwise_greeks(const Model& model, const OptionSpec& opt,
                                                const ParamVector& theta, const SimConfig& cfg,
                                                const GreekRequest& req);

// Common-random-numbers finite differences with per-path differencing: the
// report's variance is the variance of the differenced payoff.
EstimatorReport fd_greek(const Model& model, const OptionSpec& opt, const ParamVector& theta,
                         const SimConfig& cfg, const std::string& component, int order,
                         double step, BaseEstimator base);

// Third Gamma route: central difference of the pathwise first-order Greek.
EstimatorReport fd_of_pathwise_greek(const Model& model, const OptionSpec& opt,
                                     const ParamVector& theta, const SimConfig& cfg,
                                     const std::string& component, double step);

// --- stability scan -----------------------------------------------------------

struct StabilityRow {
    std::uint64_t m_paths;
    double var_estimator;  // Var(D_h P_bar_M) across replications
};

struct StabilityScan {
    std::vector<StabilityRow> rows;
    double slope = 0.0;      // of log Var vs log M; -1 certifies stability
    double intercept = 0.0;  // log C
    double fitted_c = 0.0;
};

StabilityScan stability_scan(const Model& model, const OptionSpec& opt, const ParamVector& theta,
                             const SimConfig& cfg, BaseEstimator base, const std::string& component,
                             int order, double step, std::span<const std::uint64_t> m_grid,
                             int replications);

// Least-squares line fit, shared by the scan and the convergence module.
struct LineFit {
    double slope;
    double intercept;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace barriermc

#include "barriermc/greeks_impl.hpp"
