#include "barriermc/greeks.hpp"

#include <chrono>
#include <cmath>

#include "barriermc/exec.hpp"

namespace barriermc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double discount_factor(const SimConfig& cfg, const OptionSpec& opt) {
    return cfg.discount ? std::exp(-cfg.discount_rate * opt.horizon()) : 1.0;
}

const Model& route_scheme(const Model& model, const SimConfig& cfg, const EulerView& euler_view) {
    return cfg.scheme == Scheme::euler ? static_cast<const Model&>(euler_view) : model;
}

// Accumulates per-component stats over paths with deterministic chunking.
template <class PathFn>
void run_component_paths(const SimConfig& cfg, std::size_t n_components,
                         std::vector<RunningStats>& stats, Diagnostics& diag,
                         const PathFn& path_fn) {
    const std::uint64_t n = cfg.n_paths;
    const std::size_t n_chunks = static_cast<std::size_t>((n + kChunkSize - 1) / kChunkSize);
    std::vector<std::vector<RunningStats>> chunk_stats(n_chunks);
    std::vector<Diagnostics> chunk_diag(n_chunks);

    parallel_chunks(n, cfg.threads, [&](std::size_t chunk, std::uint64_t begin, std::uint64_t end) {
        std::vector<RunningStats> local(n_components);
        Diagnostics local_diag;
        std::vector<double> values(n_components);
        for (std::uint64_t m = begin; m < end; ++m) {
            RngStream stream(cfg.seed, cfg.stream_base + m);
            path_fn(stream, values, local_diag);
            for (std::size_t i = 0; i < n_components; ++i) local[i].add(values[i]);
        }
        chunk_stats[chunk] = std::move(local);
        chunk_diag[chunk] = local_diag;
    });

    stats.assign(n_components, RunningStats{});
    for (std::size_t c = 0; c < n_chunks; ++c) {
        for (std::size_t i = 0; i < n_components; ++i) stats[i].merge(chunk_stats[c][i]);
        diag.merge(chunk_diag[c]);
    }
}

std::vector<EstimatorReport> reports_from(const std::vector<RunningStats>& stats,
                                          const SimConfig& cfg, double wall_time,
                                          const Diagnostics& diag, double scale) {
    std::vector<EstimatorReport> out;
    out.reserve(stats.size());
    for (const auto& st : stats) {
        out.push_back(EstimatorReport::from(st, cfg.n_steps, wall_time, diag, scale));
    }
    return out;
}

}  // namespace

std::vector<ComponentRef> resolve_components(const ParamVector& theta,
                                             std::span<const std::string> names) {
    std::vector<ComponentRef> out;
    out.reserve(names.size());
    for (const auto& name : names) {
        ComponentRef ref;
        ref.theta_index = theta.require(name);
        ref.is_s0 = name == "S0";
        ref.is_barrier = name == "B";
        ref.is_strike = name == "K";
        ref.name = name;
        out.push_back(ref);
    }
    return out;
}

std::vector<EstimatorReport> oss_pathwise_greeks(const Model& model, const OptionSpec& opt,
                                                 const ParamVector& theta, const SimConfig& cfg,
                                                 const GreekRequest& req) {
    const auto t0 = Clock::now();
    const ContractView c = make_contract(opt, theta);
    const auto comps = resolve_components(theta, req.components);
    const EulerView euler_view(model);
    const Model& routed = route_scheme(model, cfg, euler_view);

    std::vector<RunningStats> stats;
    Diagnostics diag;
    run_component_paths(cfg, comps.size(), stats, diag,
                        [&](const RngStream& stream, std::vector<double>& values, Diagnostics& d) {
                            oss_path_tangents(routed, c, theta, cfg.n_steps,
                                              StreamUniforms{&stream}, comps,
                                              std::span<double>(values), d);
                        });
    return reports_from(stats, cfg, seconds_since(t0), diag, discount_factor(cfg, opt));
}

std::vector<EstimatorReport> bb_pathwise_greeks(const Model& model, const OptionSpec& opt,
                                                const ParamVector& theta, const SimConfig& cfg,
                                                const GreekRequest& req) {
    const auto t0 = Clock::now();
    const ContractView c = make_contract(opt, theta);
    const auto comps = resolve_components(theta, req.components);

    std::vector<RunningStats> stats;
    Diagnostics diag;
    run_component_paths(cfg, comps.size(), stats, diag,
                        [&](const RngStream& stream, std::vector<double>& values, Diagnostics& d) {
                            bb_path_tangents(model, c, theta, cfg.scheme, cfg.n_steps,
                                             StreamUniforms{&stream}, comps,
                                             std::span<double>(values), d);
                        });
    return reports_from(stats, cfg, seconds_since(t0), diag, discount_factor(cfg, opt));
}

EstimatorReport fd_greek(const Model& model, const OptionSpec& opt, const ParamVector& theta,
                         const SimConfig& cfg, const std::string& component, int order,
                         double step, BaseEstimator base) {
    if (!(step > 0.0)) throw std::invalid_argument("fd_greek: step must be positive");
    if (order != 1 && order != 2) throw std::invalid_argument("fd_greek: order must be 1 or 2");
    const auto t0 = Clock::now();
    const int idx = theta.require(component);

    const ParamVector theta_up = theta.bumped(idx, step);
    const ParamVector theta_dn = theta.bumped(idx, -step);
    const ContractView c_up = make_contract(opt, theta_up);
    const ContractView c_mid = make_contract(opt, theta);
    const ContractView c_dn = make_contract(opt, theta_dn);

    const EulerView euler_view(model);
    const Model& routed = route_scheme(model, cfg, euler_view);

    auto eval = [&](const ContractView& c, const ParamVector& th, std::span<const double> u,
                    Diagnostics& d) {
        if (base == BaseEstimator::bb) {
            return bb_path_payoff(model, c, th, cfg.scheme, cfg.n_steps, u, d);
        }
        return oss_path_payoff(routed, c, th, cfg.n_steps, u, d);
    };

    RunningStats stats;
    Diagnostics diag;
    const int n_steps = cfg.n_steps;
    run_paths(cfg, stats, diag, [&](std::uint64_t, const RngStream& stream, Diagnostics& d) {
        // Materialize the uniforms once: identical draws across the bumps.
        thread_local std::vector<double> u;
        u.resize(static_cast<std::size_t>(n_steps));
        for (int i = 0; i < n_steps; ++i) {
            u[static_cast<std::size_t>(i)] = stream.uniform_at(static_cast<std::uint64_t>(i));
        }
        const std::span<const double> uv(u);
        const double up = eval(c_up, theta_up, uv, d);
        const double dn = eval(c_dn, theta_dn, uv, d);
        if (order == 1) return (up - dn) / (2.0 * step);
        const double mid = eval(c_mid, theta, uv, d);
        return (up - 2.0 * mid + dn) / (step * step);
    });
    return EstimatorReport::from(stats, cfg.n_steps, seconds_since(t0), diag,
                                 discount_factor(cfg, opt));
}

EstimatorReport fd_of_pathwise_greek(const Model& model, const OptionSpec& opt,
                                     const ParamVector& theta, const SimConfig& cfg,
                                     const std::string& component, double step) {
    if (!(step > 0.0)) {
        throw std::invalid_argument("fd_of_pathwise_greek: step must be positive");
    }
    const auto t0 = Clock::now();
    const int idx = theta.require(component);

    const ParamVector theta_up = theta.bumped(idx, step);
    const ParamVector theta_dn = theta.bumped(idx, -step);
    const ContractView c_up = make_contract(opt, theta_up);
    const ContractView c_dn = make_contract(opt, theta_dn);

    const std::vector<std::string> names{component};
    const auto comps_up = resolve_components(theta_up, names);
    const auto comps_dn = resolve_components(theta_dn, names);

    const EulerView euler_view(model);
    const Model& routed = route_scheme(model, cfg, euler_view);

    RunningStats stats;
    Diagnostics diag;
    const int n_steps = cfg.n_steps;
    run_paths(cfg, stats, diag, [&](std::uint64_t, const RngStream& stream, Diagnostics& d) {
        thread_local std::vector<double> u;
        u.resize(static_cast<std::size_t>(n_steps));
        for (int i = 0; i < n_steps; ++i) {
            u[static_cast<std::size_t>(i)] = stream.uniform_at(static_cast<std::uint64_t>(i));
        }
        const std::span<const double> uv(u);
        double d_up, d_dn;
        oss_path_tangents(routed, c_up, theta_up, n_steps, uv, comps_up, {&d_up, 1}, d);
        oss_path_tangents(routed, c_dn, theta_dn, n_steps, uv, comps_dn, {&d_dn, 1}, d);
        return (d_up - d_dn) / (2.0 * step);
    });
    return EstimatorReport::from(stats, cfg.n_steps, seconds_since(t0), diag,
                                 discount_factor(cfg, opt));
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw std::invalid_argument("fit_line: need >= 2 points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double nn = static_cast<double>(n);
    const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    return {slope, (sy - slope * sx) / nn};
}

StabilityScan stability_scan(const Model& model, const OptionSpec& opt, const ParamVector& theta,
                             const SimConfig& cfg, BaseEstimator base, const std::string& component,
                             int order, double step, std::span<const std::uint64_t> m_grid,
                             int replications) {
    if (replications < 2) throw std::invalid_argument("stability_scan: need >= 2 replications");
    for (std::size_t i = 1; i < m_grid.size(); ++i) {
        if (m_grid[i] <= m_grid[i - 1]) {
            throw std::invalid_argument("stability_scan: M-grid must be increasing");
        }
    }
    StabilityScan scan;
    std::uint64_t run = 0;
    for (const std::uint64_t m : m_grid) {
        RunningStats across;
        for (int rep = 0; rep < replications; ++rep, ++run) {
            SimConfig rc = cfg;
            rc.n_paths = m;
            rc.stream_base = cfg.stream_base + run * (std::uint64_t{1} << 40);
            across.add(fd_greek(model, opt, theta, rc, component, order, step, base).mean);
        }
        scan.rows.push_back({m, across.sample_variance()});
    }
    std::vector<double> lx, ly;
    for (const auto& row : scan.rows) {
        lx.push_back(std::log(static_cast<double>(row.m_paths)));
        ly.push_back(std::log(row.var_estimator));
    }
    const LineFit fit = fit_line(lx, ly);
    scan.slope = fit.slope;
    scan.intercept = fit.intercept;
    scan.fitted_c = std::exp(fit.intercept);
    return scan;
}

}  // namespace barriermc
