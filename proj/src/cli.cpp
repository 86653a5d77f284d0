#include "barriermc/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <memory>

#include "barriermc/analytic.hpp"
#include "barriermc/convergence.hpp"
#include "barriermc/csv.hpp"
#include "barriermc/estimators.hpp"
#include "barriermc/greeks.hpp"
#include "barriermc/mlmc.hpp"
#include "barriermc/version.hpp"

namespace barriermc {

namespace {

// Resolved run configuration. Defaults are the benchmark up-and-out call:
// t0=0, T=1, S0=1, B=1.1, r=5%, sigma=20%, K=1.
struct RunConfig {
    std::string model = "gbm";  // gbm | gbm_euler | cev
    double s0 = 1.0;
    double barrier = 1.1;
    double strike = 1.0;
    double rate = 0.05;
    double sigma = 0.2;
    double t0 = 0.0;
    double expiry = 1.0;
    double cev_gamma = 0.5;

    int steps = 256;
    std::uint64_t paths = 100000;
    std::string scheme = "milstein";
    std::uint64_t seed = 0;
    std::uint64_t stream_base = 0;
    int threads = 0;
    bool discount = true;
    std::string out = "-";

    ParamVector theta() const {
        return ParamVector{
            {"S0", s0}, {"r", rate}, {"sigma", sigma}, {"B", barrier}, {"K", strike}};
    }
    OptionSpec option() const { return OptionSpec{barrier, strike, t0, expiry}; }
    std::unique_ptr<Model> make_model(const ParamVector& th) const {
        if (model == "gbm") return gbm_model(th);
        if (model == "gbm_euler") return gbm_model(th, "r", "sigma", true);
        if (model == "cev") return cev_model(th, cev_gamma);
        throw CLI::ValidationError("--model", "unknown model '" + model + "'");
    }
    SimConfig sim() const {
        SimConfig s;
        s.n_steps = steps;
        s.n_paths = paths;
        s.scheme = scheme == "euler" ? Scheme::euler : Scheme::milstein;
        s.seed = seed;
        s.stream_base = stream_base;
        s.discount = discount;
        s.discount_rate = rate;
        s.threads = threads;
        return s;
    }
    BsParams bs() const { return BsParams{s0, strike, barrier, rate, sigma, expiry - t0}; }
    double oracle_price() const {
        const double v = bs_up_and_out_call(bs());
        return discount ? v : v * std::exp(rate * (expiry - t0));
    }

    void preamble(CsvWriter& w, const std::string& subcommand) const {
        w.comment("barriermc " + std::string(kVersion) + " " + subcommand);
        w.comment("model=" + model + " scheme=" + scheme +
                  (model == "cev" ? " cev_gamma=" + CsvWriter::num(cev_gamma) : ""));
        w.comment("S0=" + CsvWriter::num(s0) + " B=" + CsvWriter::num(barrier) +
                  " K=" + CsvWriter::num(strike) + " r=" + CsvWriter::num(rate) +
                  " sigma=" + CsvWriter::num(sigma) + " t0=" + CsvWriter::num(t0) +
                  " T=" + CsvWriter::num(expiry));
        w.comment("steps=" + std::to_string(steps) + " paths=" + std::to_string(paths) +
                  " seed=" + std::to_string(seed) + " stream_base=" + std::to_string(stream_base) +
                  " threads=" + std::to_string(threads) +
                  " discount=" + std::string(discount ? "1" : "0"));
    }
};

struct PriceOptions {
    std::string estimator = "oss_bb";
};

struct GreekOptions {
    std::string method = "pathwise";
    std::string estimator = "oss_bb";
    std::vector<std::string> components{"S0"};
    int order = 1;
    double step = 1e-4;
};

struct MlmcOptions {
    double eps = 2e-4;
    int n0 = 1;
    int l_max = 14;
    std::uint64_t m_init = 10000;
};

struct ConvergeOptions {
    std::string estimator = "oss_bb";
    int grid_base = 8;
    int grid_count = 7;
    std::uint64_t paths_cap = 16000000;
};

struct FigureOptions {
    std::string which;
    int levels = 8;
};

EstKind parse_est_kind(const std::string& name) {
    if (name == "baseline") return EstKind::baseline;
    if (name == "bb") return EstKind::bb;
    if (name == "oss_bb") return EstKind::oss_bb;
    throw CLI::ValidationError("--estimator", "unknown estimator '" + name + "'");
}

void emit_price_row(CsvWriter& w, const std::string& name, const EstimatorReport& r) {
    w.row({name, std::to_string(r.n_steps), std::to_string(r.n_paths), CsvWriter::num(r.mean),
           CsvWriter::num(r.sample_variance), CsvWriter::num(r.std_error),
           CsvWriter::num(r.wall_time_s)});
}

int cmd_price(const RunConfig& rc, const PriceOptions& po) {
    const ParamVector theta = rc.theta();
    const auto model = rc.make_model(theta);
    const OptionSpec opt = rc.option();
    opt.validate();
    CsvWriter w(rc.out);
    rc.preamble(w, "price");
    w.header({"estimator", "N", "M", "mean", "variance", "std_error", "wall_time"});
    auto one = [&](const std::string& name) {
        emit_price_row(w, name, run_estimator(parse_est_kind(name), *model, opt, theta, rc.sim()));
    };
    if (po.estimator == "all") {
        one("baseline");
        one("bb");
        one("oss_bb");
    } else {
        one(po.estimator);
    }
    return 0;
}

int cmd_greeks(const RunConfig& rc, const GreekOptions& go) {
    const ParamVector theta = rc.theta();
    const auto model = rc.make_model(theta);
    const OptionSpec opt = rc.option();
    opt.validate();
    CsvWriter w(rc.out);
    rc.preamble(w, "greeks");
    w.header({"method", "component", "order", "step", "estimate", "variance", "std_error"});
    auto emit = [&](const std::string& method, const std::string& comp, int order, double step,
                    const EstimatorReport& r) {
        w.row({method, comp, std::to_string(order), CsvWriter::num(step), CsvWriter::num(r.mean),
               CsvWriter::num(r.sample_variance), CsvWriter::num(r.std_error)});
    };

    if (go.method == "pathwise") {
        GreekRequest req;
        req.components = go.components;
        const auto reports = go.estimator == "bb"
                                 ? bb_pathwise_greeks(*model, opt, theta, rc.sim(), req)
                                 : oss_pathwise_greeks(*model, opt, theta, rc.sim(), req);
        for (std::size_t i = 0; i < reports.size(); ++i) {
            emit("pathwise_" + go.estimator, go.components[i], 1, 0.0, reports[i]);
        }
        return 0;
    }
    if (go.method == "fd") {
        const BaseEstimator base =
            go.estimator == "bb" ? BaseEstimator::bb : BaseEstimator::oss_bb;
        for (const auto& comp : go.components) {
            emit("fd_" + go.estimator, comp, go.order, go.step,
                 fd_greek(*model, opt, theta, rc.sim(), comp, go.order, go.step, base));
        }
        return 0;
    }
    if (go.method == "fd_of_pathwise") {
        for (const auto& comp : go.components) {
            emit("fd_of_pathwise", comp, 2, go.step,
                 fd_of_pathwise_greek(*model, opt, theta, rc.sim(), comp, go.step));
        }
        return 0;
    }
    throw CLI::ValidationError("--method", "unknown method '" + go.method + "'");
}

int cmd_mlmc(const RunConfig& rc, const MlmcOptions& mo) {
    const ParamVector theta = rc.theta();
    const auto model = rc.make_model(theta);
    const OptionSpec opt = rc.option();
    opt.validate();
    MlmcConfig mc;
    mc.eps = mo.eps;
    mc.n0 = mo.n0;
    mc.l_max = mo.l_max;
    mc.m_init = mo.m_init;
    mc.seed = rc.seed;
    mc.stream_base = rc.stream_base;
    mc.discount = rc.discount;
    mc.discount_rate = rc.rate;
    mc.threads = rc.threads;
    const MlmcResult res = mlmc_price(*model, opt, theta, mc);
    CsvWriter w(rc.out);
    rc.preamble(w, "mlmc");
    w.comment("eps=" + CsvWriter::num(mo.eps) + " n0=" + std::to_string(mo.n0));
    w.header({"level", "h", "M", "mean_Y", "var_Y", "cost"});
    for (const auto& ls : res.levels) {
        w.row({std::to_string(ls.level), CsvWriter::num(ls.h), std::to_string(ls.m_samples),
               CsvWriter::num(ls.mean_y), CsvWriter::num(ls.var_y),
               CsvWriter::num(ls.cost_per_sample * static_cast<double>(ls.m_samples))});
    }
    w.row({"summary", CsvWriter::num(res.price), CsvWriter::num(res.eps),
           CsvWriter::num(res.total_cost), "", ""});
    return 0;
}

int cmd_converge(const RunConfig& rc, const ConvergeOptions& co) {
    const ParamVector theta = rc.theta();
    const auto model = rc.make_model(theta);
    const OptionSpec opt = rc.option();
    opt.validate();
    std::vector<int> grid;
    for (int k = 0; k < co.grid_count; ++k) grid.push_back(co.grid_base << k);
    const WeakOrderResult res = weak_order(*model, opt, theta, parse_est_kind(co.estimator), grid,
                                           rc.oracle_price(), rc.sim(), co.paths_cap);
    CsvWriter w(rc.out);
    rc.preamble(w, "converge");
    w.comment("oracle=" + CsvWriter::num(rc.oracle_price()) +
              " m_used=" + std::to_string(res.m_used));
    w.header({"estimator", "N", "h", "mean", "bias", "std_error", "in_fit"});
    for (const auto& row : res.rows) {
        w.row({co.estimator, std::to_string(row.n_steps), CsvWriter::num(row.h),
               CsvWriter::num(row.mean), CsvWriter::num(row.bias), CsvWriter::num(row.std_error),
               row.in_fit ? "1" : "0"});
    }
    w.row({"summary_slope", CsvWriter::num(res.slope), "", "", "", "", ""});
    return 0;
}

int cmd_oracle(const RunConfig& rc) {
    CsvWriter w(rc.out);
    rc.preamble(w, "oracle");
    w.header({"quantity", "value"});
    const BsParams p = rc.bs();
    w.row({"bs_call", CsvWriter::num(bs_call(p))});
    w.row({"bs_up_and_out_call", CsvWriter::num(bs_up_and_out_call(p))});
    w.row({"delta", CsvWriter::num(bs_barrier_greek(p, BsComponent::spot, 1))});
    w.row({"gamma", CsvWriter::num(bs_barrier_greek(p, BsComponent::spot, 2))});
    w.row({"vega", CsvWriter::num(bs_barrier_greek(p, BsComponent::vol, 1))});
    return 0;
}

int cmd_figures(const RunConfig& rc, const FigureOptions& fo) {
    const ParamVector theta = rc.theta();
    const auto model = rc.make_model(theta);
    const OptionSpec opt = rc.option();
    opt.validate();

    if (fo.which == "fig1") {
        // MSE of the price vs M and vs CPU, both estimators.
        CsvWriter w(rc.out);
        rc.preamble(w, "figures fig1");
        const double ref = rc.oracle_price();
        w.comment("reference=" + CsvWriter::num(ref));
        w.header({"estimator", "M", "mean", "std_error", "mse", "cpu_seconds"});
        for (std::uint64_t m = 1024; m <= (std::uint64_t{1} << 20); m *= 4) {
            SimConfig cfg = rc.sim();
            cfg.n_paths = m;
            for (const auto& name : {std::string("bb"), std::string("oss_bb")}) {
                const auto r = run_estimator(parse_est_kind(name), *model, opt, theta, cfg);
                const double mse = (r.mean - ref) * (r.mean - ref) + r.std_error * r.std_error;
                w.row({name, std::to_string(m), CsvWriter::num(r.mean),
                       CsvWriter::num(r.std_error), CsvWriter::num(mse),
                       CsvWriter::num(r.wall_time_s)});
            }
        }
        return 0;
    }
    if (fo.which == "fig2") {
        // Same comparison for the pathwise Delta.
        CsvWriter w(rc.out);
        rc.preamble(w, "figures fig2");
        const double ref = bs_barrier_greek(rc.bs(), BsComponent::spot, 1) *
                           (rc.discount ? 1.0 : std::exp(rc.rate * (rc.expiry - rc.t0)));
        w.comment("reference=" + CsvWriter::num(ref));
        w.header({"estimator", "M", "delta", "std_error", "mse", "cpu_seconds"});
        GreekRequest req;
        req.components = {"S0"};
        for (std::uint64_t m = 1024; m <= (std::uint64_t{1} << 20); m *= 4) {
            SimConfig cfg = rc.sim();
            cfg.n_paths = m;
            const auto bb = bb_pathwise_greeks(*model, opt, theta, cfg, req).front();
            const auto oss = oss_pathwise_greeks(*model, opt, theta, cfg, req).front();
            for (const auto& [name, r] :
                 {std::pair<std::string, const EstimatorReport&>("bb", bb),
                  std::pair<std::string, const EstimatorReport&>("oss_bb", oss)}) {
                const double mse = (r.mean - ref) * (r.mean - ref) + r.std_error * r.std_error;
                w.row({name, std::to_string(m), CsvWriter::num(r.mean),
                       CsvWriter::num(r.std_error), CsvWriter::num(mse),
                       CsvWriter::num(r.wall_time_s)});
            }
        }
        return 0;
    }
    if (fo.which == "fig3") {
        // Gamma sweep over S0: second-order finite differences, step 1e-3,
        // M = 1e5, both estimators, with the closed-form overlay.
        CsvWriter w(rc.out);
        rc.preamble(w, "figures fig3");
        w.header({"S0", "gamma_bb", "gamma_oss", "gamma_ref"});
        for (double s0 = 0.80; s0 <= 1.0801; s0 += 0.02) {
            RunConfig rs = rc;
            rs.s0 = s0;
            rs.paths = 100000;
            const ParamVector th = rs.theta();
            const auto m = rs.make_model(th);
            const double g_bb =
                fd_greek(*m, opt, th, rs.sim(), "S0", 2, 1e-3, BaseEstimator::bb).mean;
            const double g_oss =
                fd_greek(*m, opt, th, rs.sim(), "S0", 2, 1e-3, BaseEstimator::oss_bb).mean;
            const double g_ref = bs_barrier_greek(rs.bs(), BsComponent::spot, 2) *
                                 (rs.discount ? 1.0 : std::exp(rs.rate * (rs.expiry - rs.t0)));
            w.row({CsvWriter::num(s0), CsvWriter::num(g_bb), CsvWriter::num(g_oss),
                   CsvWriter::num(g_ref)});
        }
        return 0;
    }
    if (fo.which == "fig4") {
        // log2 variance of P_l and of Y_l = P_l - P_{l-1} per level.
        CsvWriter w(rc.out);
        rc.preamble(w, "figures fig4");
        w.header({"level", "var_fine", "var_diff", "log2_var_fine", "log2_var_diff", "mean_diff"});
        MlmcConfig mc;
        mc.seed = rc.seed;
        mc.stream_base = rc.stream_base;
        mc.discount = rc.discount;
        mc.discount_rate = rc.rate;
        mc.threads = rc.threads;
        for (int l = 0; l <= fo.levels; ++l) {
            const LevelStats ls = level_estimator(*model, opt, theta, l, rc.paths, mc);
            w.row({std::to_string(l), CsvWriter::num(ls.var_fine), CsvWriter::num(ls.var_y),
                   CsvWriter::num(std::log2(ls.var_fine)), CsvWriter::num(std::log2(ls.var_y)),
                   CsvWriter::num(ls.mean_y)});
        }
        return 0;
    }
    throw CLI::ValidationError("figure", "unknown figure '" + fo.which + "'");
}

}  // namespace

int run(int argc, const char* const* argv) {
    RunConfig rc;
    PriceOptions po;
    GreekOptions go;
    MlmcOptions mo;
    ConvergeOptions co;
    FigureOptions fo;

    CLI::App app{"Monte Carlo engine for continuously monitored up-and-out barrier options"};
    app.set_version_flag("--version", std::string(kVersion));
    app.set_config("--config", "", "flat key=value config file; flags override file values");
    app.allow_config_extras(false);

    app.add_option("--model", rc.model, "gbm | gbm_euler | cev")->capture_default_str();
    app.add_option("--s0", rc.s0, "initial price")->capture_default_str();
    app.add_option("--barrier", rc.barrier, "up-and-out barrier B")->capture_default_str();
    app.add_option("--strike", rc.strike, "strike K")->capture_default_str();
    app.add_option("--rate", rc.rate, "drift / discount rate r")->capture_default_str();
    app.add_option("--sigma", rc.sigma, "volatility parameter")->capture_default_str();
    app.add_option("--t0", rc.t0, "start time")->capture_default_str();
    app.add_option("--expiry", rc.expiry, "maturity T")->capture_default_str();
    app.add_option("--cev-gamma", rc.cev_gamma, "CEV exponent")->capture_default_str();
    app.add_option("--steps", rc.steps, "time steps N")->capture_default_str();
    app.add_option("--paths", rc.paths, "Monte Carlo paths M")->capture_default_str();
    app.add_option("--scheme", rc.scheme, "euler | milstein")->capture_default_str();
    app.add_option("--seed", rc.seed, "RNG seed")->capture_default_str();
    app.add_option("--stream-base", rc.stream_base, "base stream id")->capture_default_str();
    app.add_option("--threads", rc.threads, "worker cap; 0 = hardware")->capture_default_str();
    app.add_flag("--discount,!--no-discount", rc.discount, "apply exp(-r(T-t0)) to results")
        ->capture_default_str();
    app.add_option("--out", rc.out, "output CSV path; - for stdout")->capture_default_str();

    auto* price = app.add_subcommand("price", "price the option");
    price->fallthrough();
    price->add_option("--estimator", po.estimator, "baseline | bb | oss_bb | all")
        ->capture_default_str();

    auto* greeks = app.add_subcommand("greeks", "sensitivities");
    greeks->fallthrough();
    greeks->add_option("--method", go.method, "pathwise | fd | fd_of_pathwise")
        ->capture_default_str();
    greeks->add_option("--estimator", go.estimator, "bb | oss_bb")->capture_default_str();
    greeks->add_option("--component", go.components, "theta components (S0, B, K, r, sigma)")
        ->capture_default_str();
    greeks->add_option("--order", go.order, "fd order: 1 | 2")->capture_default_str();
    greeks->add_option("--step", go.step, "fd step width")->capture_default_str();

    auto* mlmc = app.add_subcommand("mlmc", "multilevel Monte Carlo price");
    mlmc->fallthrough();
    mlmc->add_option("--eps", mo.eps, "target RMS accuracy")->capture_default_str();
    mlmc->add_option("--n0", mo.n0, "base steps at level 0")->capture_default_str();
    mlmc->add_option("--lmax", mo.l_max, "maximum level")->capture_default_str();
    mlmc->add_option("--minit", mo.m_init, "pilot samples per level")->capture_default_str();

    auto* converge = app.add_subcommand("converge", "empirical weak-order estimation");
    converge->fallthrough();
    converge->add_option("--estimator", co.estimator, "baseline | bb | oss_bb")
        ->capture_default_str();
    converge->add_option("--grid-base", co.grid_base, "coarsest N")->capture_default_str();
    converge->add_option("--grid-count", co.grid_count, "number of doublings")
        ->capture_default_str();
    converge->add_option("--paths-cap", co.paths_cap, "M escalation cap")->capture_default_str();

    auto* oracle = app.add_subcommand("oracle", "closed-form reference values");
    oracle->fallthrough();

    auto* figures = app.add_subcommand("figures", "canned experiment recipes");
    figures->fallthrough();
    figures->add_option("figure", fo.which, "fig1 | fig2 | fig3 | fig4")->required();
    figures->add_option("--levels", fo.levels, "top level for fig4")->capture_default_str();

    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
        if (price->parsed()) return cmd_price(rc, po);
        if (greeks->parsed()) return cmd_greeks(rc, go);
        if (mlmc->parsed()) return cmd_mlmc(rc, mo);
        if (converge->parsed()) return cmd_converge(rc, co);
        if (oracle->parsed()) return cmd_oracle(rc);
        if (figures->parsed()) return cmd_figures(rc, fo);
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace barriermc
