// Acceptance suite: one pass/fail line per criterion. Exit code equals the
// number of failed criteria. Individual criteria can be selected by number
// on the command line (default: all).

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <set>
#include <string>
#include <vector>

#include "barriermc/analytic.hpp"
#include "barriermc/convergence.hpp"
#include "barriermc/estimators.hpp"
#include "barriermc/greeks.hpp"
#include "barriermc/mlmc.hpp"
#include "support/oracles.hpp"

using namespace barriermc;

namespace {

const ParamVector kTheta{{"S0", 1.0}, {"r", 0.05}, {"sigma", 0.2}, {"B", 1.1}, {"K", 1.0}};
const OptionSpec kOpt{1.1, 1.0, 0.0, 1.0};
const BsParams kBs{1.0, 1.0, 1.1, 0.05, 0.2, 1.0};

// One-time fine-grid pin of the analytic oracle: Brownian-bridge estimator,
// N = 2^14, M = 1e7, seed 20260811, discounted. Regenerate with
//   barriermc price --estimator bb --steps 16384 --paths 10000000 \
//     --seed 20260811 --threads 2
const double kPinnedFineGridMean = 0.0011859470705866957;
const double kPinnedFineGridStdError = 2.3370477888451707e-06;

// Bias-model constant for the oracle-bias criterion, fitted from the
// measured bb bias curve (|bias| ~ 1.07e-3 * h over N = 8..128) with a
// factor-2 margin.
const double kFittedBiasC = 2e-3;

SimConfig table_cfg(int n_steps, std::uint64_t n_paths, std::uint64_t seed) {
    SimConfig cfg;
    cfg.n_steps = n_steps;
    cfg.n_paths = n_paths;
    cfg.seed = seed;
    cfg.discount = true;
    cfg.discount_rate = 0.05;
    cfg.threads = 0;
    return cfg;
}

double combined_3se(const EstimatorReport& a, const EstimatorReport& b) {
    return 3.0 * std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

bool report(int id, const char* name, bool pass, const std::string& detail, double seconds) {
    std::printf("[%s] criterion %d: %s  (%s; %.1fs)\n", pass ? "PASS" : "FAIL", id, name,
                detail.c_str(), seconds);
    std::fflush(stdout);
    return pass;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

// --- criterion 1: variance reduction ----------------------------------------
bool criterion1() {
    Timer t;
    const auto model = gbm_model(kTheta);
    bool pass = true;
    std::string detail;
    for (int n : {16, 64, 256}) {
        Timer cell;
        const std::uint64_t m = 1000000;
        const auto bb = price_bb(*model, kOpt, kTheta, table_cfg(n, m, 1));
        const auto oss = price_oss_bb(*model, kOpt, kTheta, table_cfg(n, m, 1));
        const double slack = 1.0 + 5.0 / std::sqrt(static_cast<double>(m));
        const bool ok = oss.sample_variance <= bb.sample_variance * slack;
        const bool fast = cell.seconds() < 120.0;
        pass = pass && ok && fast;
        detail += fmt("N=%d ratio=%.3f cell=%.0fs ", n,
                      oss.sample_variance / bb.sample_variance, cell.seconds());
    }
    return report(1, "variance reduction Var[oss] <= Var[bb] * (1 + 5/sqrt(M))", pass, detail,
                  t.seconds());
}

// --- criterion 2: unbiasedness across seeds ----------------------------------
bool criterion2() {
    Timer t;
    const auto model = gbm_model(kTheta);
    bool pass = true;
    std::string detail;
    for (int n : {16, 64, 256}) {
        int exceedances = 0;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto bb = price_bb(*model, kOpt, kTheta, table_cfg(n, 1000000, 100 + seed));
            const auto oss =
                price_oss_bb(*model, kOpt, kTheta, table_cfg(n, 1000000, 100 + seed));
            if (std::abs(bb.mean - oss.mean) > combined_3se(bb, oss)) ++exceedances;
        }
        pass = pass && exceedances <= 2;
        detail += fmt("N=%d exceed=%d/20 ", n, exceedances);
    }
    return report(2, "unbiasedness E[oss] = E[bb] (z-test, 20 seeds, <= 2 exceedances)", pass,
                  detail, t.seconds());
}

// --- criterion 3: oracle bias -------------------------------------------------
bool criterion3() {
    Timer t;
    const double analytic = bs_up_and_out_call(kBs);
    std::string detail = fmt("analytic=%.8f ", analytic);
    bool pass = true;

    // arm the oracle: closed form vs independent reflection quadrature
    const double quad = oracles::uo_call_reflection_quadrature(kBs);
    pass = pass && std::abs(analytic - quad) < 1e-10;

    // and vs the one-time fine-grid Brownian-bridge pin
    if (kPinnedFineGridMean > 0.0) {
        const double gap = std::abs(kPinnedFineGridMean - analytic);
        const double tol = 3.0 * kPinnedFineGridStdError;
        pass = pass && gap <= tol;
        detail += fmt("pin_gap=%.2e (tol %.2e) ", gap, tol);
    } else {
        detail += "pin=UNSET ";
        pass = false;
    }

    const auto model = gbm_model(kTheta);
    const double h = 1.0 / 256.0;
    for (const bool use_oss : {false, true}) {
        const auto rep = use_oss ? price_oss_bb(*model, kOpt, kTheta, table_cfg(256, 1000000, 7))
                                 : price_bb(*model, kOpt, kTheta, table_cfg(256, 1000000, 7));
        const double tol = std::max(3.0 * rep.std_error, kFittedBiasC * h);
        const double bias = std::abs(rep.mean - analytic);
        pass = pass && bias <= tol;
        detail += fmt("%s_bias=%.2e(tol %.2e) ", use_oss ? "oss" : "bb", bias, tol);
    }
    return report(3, "oracle bias at N=256, M=1e6 within max(3 se, C h)", pass, detail,
                  t.seconds());
}

// --- criterion 4: convergence orders ------------------------------------------
bool criterion4() {
    Timer t;
    const auto model = gbm_model(kTheta);
    const double oracle = bs_up_and_out_call(kBs);
    bool pass = true;
    std::string detail;

    {
        const std::vector<int> grid{8, 16, 32, 64, 128, 256, 512};
        const auto res = weak_order(*model, kOpt, kTheta, EstKind::baseline, grid, oracle,
                                    table_cfg(0, 1000000, 41), 4000000);
        pass = pass && res.slope >= 0.35 && res.slope <= 0.65;
        detail += fmt("baseline=%.3f ", res.slope);
    }
    for (const EstKind kind : {EstKind::bb, EstKind::oss_bb}) {
        const std::vector<int> grid{8, 16, 32, 64};
        const auto res = weak_order(*model, kOpt, kTheta, kind, grid, oracle,
                                    table_cfg(0, 4000000, 42), 16000000);
        pass = pass && res.slope >= 0.8 && res.slope <= 1.2;
        detail += fmt("%s=%.3f ", kind == EstKind::bb ? "bb" : "oss", res.slope);
    }
    return report(4, "weak orders: baseline in [0.35,0.65]; bb, oss in [0.8,1.2]", pass, detail,
                  t.seconds());
}

// --- criterion 5: pathwise delta ----------------------------------------------
bool criterion5() {
    Timer t;
    const auto model = gbm_model(kTheta);
    const SimConfig cfg = table_cfg(64, 1000000, 17);
    bool pass = true;
    std::string detail;

    GreekRequest req;
    req.components = {"S0"};
    const auto oss_pw = oss_pathwise_greeks(*model, kOpt, kTheta, cfg, req)[0];
    const auto oss_fd = fd_greek(*model, kOpt, kTheta, cfg, "S0", 1, 1e-4, BaseEstimator::oss_bb);
    const double gap = std::abs(oss_pw.mean - oss_fd.mean);
    const double tol = std::max(combined_3se(oss_pw, oss_fd), 1e-3);
    pass = pass && gap <= tol;
    detail += fmt("pw=%.5f fd=%.5f gap=%.2e(tol %.2e) ", oss_pw.mean, oss_fd.mean, gap, tol);

    // per-path tangent vs per-path finite difference, 1e3 random paths
    {
        const auto comps = resolve_components(kTheta, std::vector<std::string>{"S0"});
        const ContractView c = make_contract(kOpt, kTheta);
        const int n_steps = 64;
        RngStream master(4242, 0);
        int checked = 0, bad = 0;
        for (int path = 0; path < 1000; ++path) {
            std::vector<double> u(n_steps);
            for (auto& v : u) v = master.next_uniform();
            Diagnostics diag;
            double d = 0.0;
            const double payoff = oss_path_tangents(*model, c, kTheta, n_steps,
                                                    std::span<const double>(u), comps,
                                                    std::span<double>(&d, 1), diag);
            if (payoff < 1e-12) continue;
            auto eval = [&](double bump) {
                ParamVector th = kTheta;
                th.set("S0", th.get("S0") + bump);
                const ContractView cb = make_contract(kOpt, th);
                Diagnostics dg;
                return oss_path_payoff(*model, cb, th, n_steps, std::span<const double>(u), dg);
            };
            const double step = 1e-6;
            const double up = eval(step), dn = eval(-step);
            if (std::abs(up - dn) > 0.5 * payoff) continue;  // payoff kink
            const double fd = (up - dn) / (2.0 * step);
            const double scale = std::max({std::abs(fd), std::abs(d), 1e-6});
            if (std::abs(d - fd) / scale > 1e-4) ++bad;
            ++checked;
        }
        pass = pass && bad == 0 && checked > 100;
        detail += fmt("per-path=%d/%d ok ", checked - bad, checked);
    }

    const auto bb_pw = bb_pathwise_greeks(*model, kOpt, kTheta, cfg, req)[0];
    pass = pass && oss_pw.sample_variance < bb_pw.sample_variance;
    detail += fmt("var_oss=%.2e < var_bb=%.2e", oss_pw.sample_variance, bb_pw.sample_variance);
    return report(5, "pathwise delta: matches CRN FD, per-path tangents, variance ordering",
                  pass, detail, t.seconds());
}

// --- criterion 6: second-order stability ---------------------------------------
bool criterion6() {
    Timer t;
    const auto model = gbm_model(kTheta);
    bool pass = true;
    std::string detail;

    {
        SimConfig cfg = table_cfg(16, 0, 23);
        const std::vector<std::uint64_t> m_grid{1000, 10000, 100000, 1000000};
        const auto scan = stability_scan(*model, kOpt, kTheta, cfg, BaseEstimator::oss_bb, "S0",
                                         2, 1e-3, m_grid, 32);
        pass = pass && std::abs(scan.slope + 1.0) <= 0.15;
        detail += fmt("scan_slope=%.3f ", scan.slope);
    }
    {
        const SimConfig cfg = table_cfg(64, 100000, 29);
        const auto oss = fd_greek(*model, kOpt, kTheta, cfg, "S0", 2, 1e-3, BaseEstimator::oss_bb);
        const auto bb = fd_greek(*model, kOpt, kTheta, cfg, "S0", 2, 1e-3, BaseEstimator::bb);
        const double ratio = oss.sample_variance / bb.sample_variance;
        pass = pass && ratio <= 0.1;
        detail += fmt("var_ratio=%.3f ", ratio);

        const auto fd_pw = fd_of_pathwise_greek(*model, kOpt, kTheta, cfg, "S0", 1e-3);
        const double gamma_ref = bs_barrier_greek(kBs, BsComponent::spot, 2);
        const bool p1 = std::abs(oss.mean - fd_pw.mean) <= combined_3se(oss, fd_pw);
        const bool p2 = std::abs(oss.mean - gamma_ref) <= 3.0 * oss.std_error;
        const bool p3 = std::abs(fd_pw.mean - gamma_ref) <= 3.0 * fd_pw.std_error;
        pass = pass && p1 && p2 && p3;
        detail += fmt("gamma: fd2=%.3f fd_pw=%.3f ref=%.3f pairs=%d%d%d", oss.mean, fd_pw.mean,
                      gamma_ref, p1, p2, p3);
    }
    return report(6, "second-order stability: Var ~ C/M, oss/bb <= 0.1, three gamma routes",
                  pass, detail, t.seconds());
}

// --- criterion 7: multilevel --------------------------------------------------
bool criterion7() {
    Timer t;
    const auto model = gbm_model(kTheta);
    const double analytic = bs_up_and_out_call(kBs);
    bool pass = true;
    std::string detail;

    MlmcConfig cfg;
    cfg.seed = 31;
    cfg.discount = true;
    cfg.discount_rate = 0.05;

    {
        std::vector<double> lx, ly;
        for (int l = 3; l <= 8; ++l) {
            const LevelStats ls = level_estimator(*model, kOpt, kTheta, l, 300000, cfg);
            lx.push_back(static_cast<double>(l));
            ly.push_back(std::log2(ls.var_y));
        }
        const double beta = -fit_line(lx, ly).slope;
        pass = pass && beta >= 1.3;
        detail += fmt("beta=%.3f ", beta);
    }
    {
        cfg.eps = 2e-4;
        const MlmcResult res = mlmc_price(*model, kOpt, kTheta, cfg);
        const double err = std::abs(res.price - analytic);
        pass = pass && err <= 3.0 * cfg.eps;
        detail += fmt("price_err=%.2e(tol %.1e) ", err, 3.0 * cfg.eps);
    }
    {
        const std::vector<double> eps_grid{4e-4, 2e-4, 1e-4};
        const auto rows = mlmc_cost_sweep(*model, kOpt, kTheta, cfg, eps_grid);
        std::vector<double> lx, ly;
        for (const auto& r : rows) {
            pass = pass && std::abs(r.price - analytic) <= 3.0 * r.eps;
            lx.push_back(std::log(r.eps));
            ly.push_back(std::log(r.total_cost));
        }
        const double slope = fit_line(lx, ly).slope;
        pass = pass && slope >= -2.4 && slope <= -1.8;
        detail += fmt("cost_slope=%.3f", slope);
    }
    return report(7, "mlmc: beta >= 1.3, price within 3 eps, cost slope in [-2.4,-1.8]", pass,
                  detail, t.seconds());
}

// --- criterion 8: determinism ---------------------------------------------------
bool criterion8() {
    Timer t;
    const auto model = gbm_model(kTheta);
    bool pass = true;
    std::string detail;

    auto run_with_threads = [&](int threads) {
        SimConfig cfg = table_cfg(64, 100000, 13);
        cfg.threads = threads;
        return price_oss_bb(*model, kOpt, kTheta, cfg);
    };
    const auto r1 = run_with_threads(1);
    const auto r2 = run_with_threads(2);
    const auto r3 = run_with_threads(3);
    const auto r1b = run_with_threads(1);
    pass = pass && r1.mean == r2.mean && r2.mean == r3.mean && r1.mean == r1b.mean;
    pass = pass && r1.sample_variance == r2.sample_variance &&
           r2.sample_variance == r3.sample_variance;
    detail += fmt("price mean=%.10e identical across threads/runs: %d ", r1.mean, pass);

    GreekRequest req;
    req.components = {"S0"};
    SimConfig g1 = table_cfg(32, 50000, 14);
    g1.threads = 1;
    SimConfig g2 = g1;
    g2.threads = 2;
    const auto d1 = oss_pathwise_greeks(*model, kOpt, kTheta, g1, req)[0];
    const auto d2 = oss_pathwise_greeks(*model, kOpt, kTheta, g2, req)[0];
    pass = pass && d1.mean == d2.mean && d1.sample_variance == d2.sample_variance;

    MlmcConfig mc;
    mc.seed = 15;
    mc.threads = 1;
    const auto l1 = level_estimator(*model, kOpt, kTheta, 4, 30000, mc);
    mc.threads = 2;
    const auto l2 = level_estimator(*model, kOpt, kTheta, 4, 30000, mc);
    pass = pass && l1.mean_y == l2.mean_y && l1.var_y == l2.var_y;
    return report(8, "determinism: bit-identical reports across runs and --threads", pass, detail,
                  t.seconds());
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
    auto want = [&](int id) { return selected.empty() || selected.count(id) > 0; };

    int failures = 0;
    if (want(1) && !criterion1()) ++failures;
    if (want(2) && !criterion2()) ++failures;
    if (want(3) && !criterion3()) ++failures;
    if (want(4) && !criterion4()) ++failures;
    if (want(5) && !criterion5()) ++failures;
    if (want(6) && !criterion6()) ++failures;
    if (want(7) && !criterion7()) ++failures;
    if (want(8) && !criterion8()) ++failures;
    std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
                failures);
    return failures;
}
