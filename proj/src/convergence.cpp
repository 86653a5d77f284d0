#include "barriermc/convergence.hpp"

#include <algorithm>
#include <cmath>

#include "barriermc/greeks.hpp"

namespace barriermc {

EstimatorReport run_estimator(EstKind kind, const Model& model, const OptionSpec& opt,
                              const ParamVector& theta, const SimConfig& cfg) {
    switch (kind) {
        case EstKind::baseline: return price_discrete_baseline(model, opt, theta, cfg);
        case EstKind::bb: return price_bb(model, opt, theta, cfg);
        case EstKind::oss_bb: return price_oss_bb(model, opt, theta, cfg);
    }
    throw std::logic_error("run_estimator: bad kind");
}

WeakOrderResult weak_order(const Model& model, const OptionSpec& opt, const ParamVector& theta,
                           EstKind kind, std::span<const int> n_grid, double oracle_price,
                           const SimConfig& cfg, std::uint64_t m_cap) {
    if (n_grid.size() < 2) throw std::invalid_argument("weak_order: need >= 2 grid points");
    for (std::size_t i = 1; i < n_grid.size(); ++i) {
        if (n_grid[i] <= n_grid[i - 1]) {
            throw std::invalid_argument("weak_order: N-grid must be increasing");
        }
    }

    const int n_finest = n_grid.back();
    std::uint64_t m = cfg.n_paths;
    std::uint64_t run = 0;
    EstimatorReport finest;

    // Escalate M until the finest grid point resolves its own bias.
    for (;;) {
        SimConfig rc = cfg;
        rc.n_steps = n_finest;
        rc.n_paths = m;
        rc.stream_base = cfg.stream_base + (run++ << 40);
        finest = run_estimator(kind, model, opt, theta, rc);
        const double bias = std::abs(finest.mean - oracle_price);
        if (finest.std_error < bias / 3.0) break;
        if (m >= m_cap) {
            throw InsufficientPrecision(
                "weak_order: statistical noise still swamps the bias at the M cap");
        }
        m = std::min(m_cap, m * 4);
    }

    WeakOrderResult result;
    result.m_used = m;
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        const int n = n_grid[i];
        EstimatorReport rep;
        if (n == n_finest) {
            rep = finest;
        } else {
            SimConfig rc = cfg;
            rc.n_steps = n;
            rc.n_paths = m;
            rc.stream_base = cfg.stream_base + (run++ << 40);
            rep = run_estimator(kind, model, opt, theta, rc);
        }
        WeakOrderRow row;
        row.n_steps = n;
        row.h = opt.horizon() / n;
        row.mean = rep.mean;
        row.std_error = rep.std_error;
        row.bias = rep.mean - oracle_price;
        row.in_fit = std::abs(row.bias) > 5.0 * rep.std_error;
        result.rows.push_back(row);
    }

    std::vector<double> lx, ly;
    for (const auto& row : result.rows) {
        if (!row.in_fit) continue;
        lx.push_back(std::log(row.h));
        ly.push_back(std::log(std::abs(row.bias)));
    }
    if (lx.size() < 2) {
        throw InsufficientPrecision("weak_order: fewer than two grid points resolve their bias");
    }
    result.slope = fit_line(lx, ly).slope;
    return result;
}

}  // namespace barriermc
