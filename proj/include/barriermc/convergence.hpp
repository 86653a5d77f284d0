#pragma once

#include <span>
#include <vector>

#include "barriermc/estimators.hpp"

namespace barriermc {

struct InsufficientPrecision : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class EstKind : std::uint8_t { baseline, bb, oss_bb };

EstimatorReport run_estimator(EstKind kind, const Model& model, const OptionSpec& opt,
                              const ParamVector& theta, const SimConfig& cfg);

struct WeakOrderRow {
    int n_steps;
    double h;
    double mean;
    double std_error;
    double bias;  // mean - oracle
    bool in_fit;
};

struct WeakOrderResult {
    double slope = 0.0;  // fitted weak order alpha
    std::uint64_t m_used = 0;
    std::vector<WeakOrderRow> rows;
};

// Regresses log|mean - oracle| on log h over a geometric N-grid. M starts at
// cfg.n_paths and quadruples until the statistical error at the finest grid
// is below a third of the bias there (m_cap bounds the escalation); rows with
// |bias| <= 5 std errors are excluded from the fit.
WeakOrderResult weak_order(const Model& model, const OptionSpec& opt, const ParamVector& theta,
                           EstKind kind, std::span<const int> n_grid, double oracle_price,
                           const SimConfig& cfg, std::uint64_t m_cap);

}  // namespace barriermc
