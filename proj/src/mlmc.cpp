#include "barriermc/mlmc.hpp"

#include <algorithm>
#include <cmath>

#include "barriermc/exec.hpp"

namespace barriermc {

namespace {

// Per-level running state; samples are extendable so the driver can grow
// M_l without discarding earlier paths.
struct LevelAccum {
    RunningStats y;
    RunningStats fine;
    Diagnostics diag;
    std::uint64_t next_path = 0;
};

std::uint64_t level_stream(std::uint64_t base, int level, std::uint64_t path) {
    return base + (static_cast<std::uint64_t>(level) << 48) + path;
}

double level_cost(const MlmcConfig& cfg, int level) {
    const double fine_steps = static_cast<double>(cfg.n0) * std::pow(2.0, level);
    return level > 0 ? 2.0 * fine_steps : fine_steps;
}

// Extends the accumulators of one level up to m_target paths.
void extend_level(const Model& model, const ContractView& c, const ParamVector& theta, int level,
                  std::uint64_t m_target, const MlmcConfig& cfg, LevelAccum& acc) {
    if (m_target <= acc.next_path) return;
    const std::uint64_t begin_path = acc.next_path;
    const std::uint64_t count = m_target - begin_path;
    const int n_fine = cfg.n0 << level;
    const int n_coarse = level > 0 ? (n_fine >> 1) : 0;

    const std::size_t n_chunks = static_cast<std::size_t>((count + kChunkSize - 1) / kChunkSize);
    std::vector<RunningStats> cy(n_chunks), cf(n_chunks);
    std::vector<Diagnostics> cd(n_chunks);

    parallel_chunks(count, cfg.threads,
                    [&](std::size_t chunk, std::uint64_t begin, std::uint64_t end) {
                        RunningStats ly, lf;
                        Diagnostics ld;
                        for (std::uint64_t i = begin; i < end; ++i) {
                            RngStream stream(cfg.seed,
                                             level_stream(cfg.stream_base, level, begin_path + i));
                            const StreamUniforms u{&stream};
                            const double p_fine =
                                oss_path_payoff(model, c, theta, n_fine, u, ld);
                            double y = p_fine;
                            if (level > 0) {
                                y -= oss_coarse_path_payoff(model, c, theta, n_coarse, u, ld);
                            }
                            ly.add(y);
                            lf.add(p_fine);
                        }
                        cy[chunk] = ly;
                        cf[chunk] = lf;
                        cd[chunk] = ld;
                    });
    for (std::size_t i = 0; i < n_chunks; ++i) {
        acc.y.merge(cy[i]);
        acc.fine.merge(cf[i]);
        acc.diag.merge(cd[i]);
    }
    acc.next_path = m_target;
}

LevelStats stats_from(const LevelAccum& acc, int level, const MlmcConfig& cfg,
                      const OptionSpec& opt, double df) {
    LevelStats ls;
    ls.level = level;
    ls.h = opt.horizon() / (static_cast<double>(cfg.n0) * std::pow(2.0, level));
    ls.m_samples = acc.y.n;
    ls.mean_y = acc.y.mean() * df;
    ls.var_y = acc.y.sample_variance() * df * df;
    ls.mean_fine = acc.fine.mean() * df;
    ls.var_fine = acc.fine.sample_variance() * df * df;
    ls.cost_per_sample = level_cost(cfg, level);
    return ls;
}

}  // namespace

LevelStats level_estimator(const Model& model, const OptionSpec& opt, const ParamVector& theta,
                           int level, std::uint64_t m_samples, const MlmcConfig& cfg) {
    if (level < 0) throw std::invalid_argument("level_estimator: level must be >= 0");
    const ContractView c = make_contract(opt, theta);
    LevelAccum acc;
    extend_level(model, c, theta, level, m_samples, cfg, acc);
    const double df = cfg.discount ? std::exp(-cfg.discount_rate * opt.horizon()) : 1.0;
    return stats_from(acc, level, cfg, opt, df);
}

MlmcResult mlmc_price(const Model& model, const OptionSpec& opt, const ParamVector& theta,
                      const MlmcConfig& cfg) {
    if (!(cfg.eps > 0.0)) throw std::invalid_argument("mlmc_price: eps must be positive");
    const ContractView c = make_contract(opt, theta);
    const double df = cfg.discount ? std::exp(-cfg.discount_rate * opt.horizon()) : 1.0;
    const double eps = cfg.eps;

    std::vector<LevelAccum> levels(1);
    extend_level(model, c, theta, 0, cfg.m_init, cfg, levels[0]);

    for (;;) {
        // Optimal allocation given the current variance estimates.
        const int top = static_cast<int>(levels.size()) - 1;
        double sum_vc = 0.0;
        for (int l = 0; l <= top; ++l) {
            const double v = std::max(levels[l].y.sample_variance() * df * df, 1e-30);
            sum_vc += std::sqrt(v * level_cost(cfg, l));
        }
        bool extended = false;
        for (int l = 0; l <= top; ++l) {
            const double v = std::max(levels[l].y.sample_variance() * df * df, 1e-30);
            const double m_opt =
                std::ceil(2.0 / (eps * eps) * std::sqrt(v / level_cost(cfg, l)) * sum_vc);
            const std::uint64_t m_target =
                std::max<std::uint64_t>(cfg.m_floor, static_cast<std::uint64_t>(m_opt));
            if (m_target > levels[l].next_path) {
                extend_level(model, c, theta, l, m_target, cfg, levels[l]);
                extended = true;
            }
        }
        if (extended) continue;

        // Weak-error proxy with alpha = 1 over the last three levels: each
        // |mean Y_{L-j}| extrapolated forward by 2^-j estimates the remaining
        // bias; the maximum guards against pre-asymptotic sign changes.
        double rem = 0.0;
        for (int j = 0; j <= std::min(top, 2); ++j) {
            const double extrapolated =
                std::abs(levels[top - j].y.mean() * df) / std::pow(2.0, j);
            rem = std::max(rem, extrapolated);
        }
        if (rem < eps / std::sqrt(2.0)) break;

        if (top + 1 > cfg.l_max) {
            throw MaxLevelExceeded("mlmc_price: weak error still above target at l_max = " +
                                   std::to_string(cfg.l_max));
        }
        levels.emplace_back();
        extend_level(model, c, theta, top + 1, cfg.m_init, cfg, levels.back());
    }

    MlmcResult out;
    out.eps = eps;
    for (int l = 0; l < static_cast<int>(levels.size()); ++l) {
        const LevelStats ls = stats_from(levels[l], l, cfg, opt, df);
        out.price += ls.mean_y;
        out.total_cost += static_cast<double>(ls.m_samples) * cfg.n0 * std::pow(2.0, l);
        out.levels.push_back(ls);
    }
    return out;
}

std::vector<MlmcResult> mlmc_cost_sweep(const Model& model, const OptionSpec& opt,
                                        const ParamVector& theta, const MlmcConfig& cfg,
                                        std::span<const double> eps_grid) {
    if (eps_grid.empty()) throw std::invalid_argument("mlmc_cost_sweep: empty eps grid");
    const ContractView c = make_contract(opt, theta);
    const double df = cfg.discount ? std::exp(-cfg.discount_rate * opt.horizon()) : 1.0;

    // Calibration pass at the tightest accuracy: fixes the level schedule
    // and the variance estimates used by every allocation below.
    double eps_min = eps_grid[0];
    for (const double e : eps_grid) eps_min = std::min(eps_min, e);
    MlmcConfig calib_cfg = cfg;
    calib_cfg.eps = eps_min;
    const MlmcResult calib = mlmc_price(model, opt, theta, calib_cfg);
    const int top = static_cast<int>(calib.levels.size()) - 1;

    double sum_vc = 0.0;
    for (const auto& ls : calib.levels) {
        sum_vc += std::sqrt(std::max(ls.var_y, 1e-30) * ls.cost_per_sample);
    }

    std::vector<MlmcResult> out;
    std::uint64_t stream_shift = 1;  // fresh streams per production run
    for (const double eps : eps_grid) {
        MlmcResult res;
        res.eps = eps;
        for (int l = 0; l <= top; ++l) {
            const double v = std::max(calib.levels[l].var_y, 1e-30);
            const double m_opt = std::ceil(2.0 / (eps * eps) *
                                           std::sqrt(v / calib.levels[l].cost_per_sample) *
                                           sum_vc);
            const std::uint64_t m =
                std::max<std::uint64_t>(2, static_cast<std::uint64_t>(m_opt));
            MlmcConfig run_cfg = cfg;
            run_cfg.stream_base = cfg.stream_base + (stream_shift++ << 44);
            LevelAccum acc;
            extend_level(model, c, theta, l, m, run_cfg, acc);
            const LevelStats ls = stats_from(acc, l, cfg, opt, df);
            res.price += ls.mean_y;
            res.total_cost += static_cast<double>(ls.m_samples) * cfg.n0 * std::pow(2.0, l);
            res.levels.push_back(ls);
        }
        out.push_back(res);
    }
    return out;
}

}  // namespace barriermc
