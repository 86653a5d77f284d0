#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "barriermc/analytic.hpp"
#include "barriermc/estimators.hpp"
#include "support/european.hpp"
#include "support/oracles.hpp"

using namespace barriermc;

namespace {

const ParamVector kTheta{{"S0", 1.0}, {"r", 0.05}, {"sigma", 0.2}, {"B", 1.1}, {"K", 1.0}};
const OptionSpec kOpt{1.1, 1.0, 0.0, 1.0};

SimConfig quick_cfg(int n_steps, std::uint64_t n_paths, std::uint64_t seed = 0) {
    SimConfig cfg;
    cfg.n_steps = n_steps;
    cfg.n_paths = n_paths;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("knocked out at inception prices to zero") {
    ParamVector theta = kTheta;
    theta.set("S0", 1.2);  // above the barrier
    const auto model = gbm_model(theta);
    const auto rep = price_discrete_baseline(*model, kOpt, theta, quick_cfg(16, 1000));
    CHECK(rep.mean == 0.0);
    CHECK(rep.sample_variance == 0.0);

    const auto bb = price_bb(*model, kOpt, theta, quick_cfg(16, 1000));
    CHECK(bb.mean == 0.0);
    CHECK(bb.diagnostics.early_knockouts == 1000);

    CHECK_THROWS_AS(price_oss_bb(*model, kOpt, theta, quick_cfg(16, 1000)),
                    std::invalid_argument);
}

TEST_CASE("baseline with an unreachable barrier equals plain European MC bit-exactly") {
    ParamVector theta = kTheta;
    theta.set("B", 1e12);
    OptionSpec opt = kOpt;
    opt.barrier = 1e12;
    const auto model = gbm_model(theta);
    const SimConfig cfg = quick_cfg(32, 20000);
    const auto rep = price_discrete_baseline(*model, opt, theta, cfg);
    const auto euro = testsupport::european_mc(*model, make_contract(opt, theta), theta, cfg);
    CHECK(rep.mean == euro.mean());
    CHECK(rep.sample_variance == euro.sample_variance());
}

TEST_CASE("bb with an unreachable barrier equals plain European MC bit-exactly") {
    ParamVector theta = kTheta;
    theta.set("B", 1e12);
    OptionSpec opt = kOpt;
    opt.barrier = 1e12;
    const auto model = gbm_model(theta);
    const SimConfig cfg = quick_cfg(32, 20000);
    CHECK(price_bb(*model, opt, theta, cfg).mean ==
          testsupport::european_mc(*model, make_contract(opt, theta), theta, cfg).mean());
}

TEST_CASE("oss with an unreachable barrier coincides with bb under the same seed") {
    ParamVector theta = kTheta;
    theta.set("B", 1e12);
    OptionSpec opt = kOpt;
    opt.barrier = 1e12;
    const auto model = gbm_model(theta);
    const SimConfig cfg = quick_cfg(32, 20000);
    const auto bb = price_bb(*model, opt, theta, cfg);
    const auto oss = price_oss_bb(*model, opt, theta, cfg);
    // weights are exactly 1 and the constrained draw reduces to Phi^-1(u)
    CHECK(oss.mean == doctest::Approx(bb.mean).epsilon(1e-13));
    CHECK(std::abs(oss.mean - bb.mean) <=
          3.0 * std::sqrt(oss.std_error * oss.std_error + bb.std_error * bb.std_error) + 1e-15);
}

TEST_CASE("spot close to the barrier: price collapses and oss wins on variance") {
    ParamVector theta = kTheta;
    theta.set("S0", 1.1 * (1.0 - 1e-6));
    const auto model = gbm_model(theta);
    const SimConfig cfg = quick_cfg(16, 50000);
    const auto bb = price_bb(*model, kOpt, theta, cfg);
    const auto oss = price_oss_bb(*model, kOpt, theta, cfg);
    CHECK(oss.mean < 1e-4);
    CHECK(oss.sample_variance <= bb.sample_variance);
    CHECK(oss.sample_variance < 0.5 * bb.sample_variance);
}

TEST_CASE("variance ordering and agreement at the benchmark parameters") {
    const auto model = gbm_model(kTheta);
    for (int n_steps : {16, 64}) {
        const SimConfig cfg = quick_cfg(n_steps, 100000, 3);
        const auto bb = price_bb(*model, kOpt, kTheta, cfg);
        const auto oss = price_oss_bb(*model, kOpt, kTheta, cfg);
        const double slack = 1.0 + 5.0 / std::sqrt(static_cast<double>(cfg.n_paths));
        CHECK(oss.sample_variance <= bb.sample_variance * slack);
        const double tol = 3.0 * std::sqrt(bb.std_error * bb.std_error +
                                           oss.std_error * oss.std_error);
        CHECK(std::abs(bb.mean - oss.mean) <= tol);
    }
}

TEST_CASE("baseline matches the backward-induction discrete price") {
    const BsParams p{1.0, 1.0, 1.1, 0.05, 0.2, 1.0};
    const int n_steps = 16;
    const double reference = oracles::discrete_uo_call_backward_induction(p, n_steps);
    const auto model = gbm_model(kTheta);
    const auto rep = price_discrete_baseline(*model, kOpt, kTheta, quick_cfg(n_steps, 400000, 1));
    CHECK(std::abs(rep.mean - reference) <= 3.0 * rep.std_error);
    // and with the Euler transition
    SimConfig cfg = quick_cfg(n_steps, 400000, 2);
    cfg.scheme = Scheme::euler;
    const double ref_euler = oracles::discrete_uo_call_backward_induction(p, n_steps, false);
    const auto rep_euler = price_discrete_baseline(*model, kOpt, kTheta, cfg);
    CHECK(std::abs(rep_euler.mean - ref_euler) <= 3.0 * rep_euler.std_error);
}

TEST_CASE("baseline at production scale matches the backward-induction price") {
    const BsParams p{1.0, 1.0, 1.1, 0.05, 0.2, 1.0};
    const double reference = oracles::discrete_uo_call_backward_induction(p, 128);
    const auto model = gbm_model(kTheta);
    const auto rep = price_discrete_baseline(*model, kOpt, kTheta, quick_cfg(128, 1000000, 6));
    CHECK(std::abs(rep.mean - reference) <= 3.0 * rep.std_error);
}

TEST_CASE("cev model prices end to end") {
    ParamVector theta{{"S0", 1.0}, {"r", 0.05}, {"sigma", 0.2}, {"B", 1.1}, {"K", 1.0}};
    const auto cev = cev_model(theta, 0.7);
    const SimConfig cfg = quick_cfg(32, 50000, 8);
    const auto bb = price_bb(*cev, kOpt, theta, cfg);
    const auto oss = price_oss_bb(*cev, kOpt, theta, cfg);
    CHECK(bb.mean > 0.0);
    CHECK(oss.mean > 0.0);
    CHECK(oss.sample_variance <= bb.sample_variance * (1.0 + 5.0 / std::sqrt(50000.0)));
    const double tol = 3.0 * std::sqrt(bb.std_error * bb.std_error +
                                       oss.std_error * oss.std_error);
    CHECK(std::abs(bb.mean - oss.mean) <= tol);
}

TEST_CASE("per-path payoffs never exceed the hard bound B - K") {
    const auto model = gbm_model(kTheta);
    const ContractView c = make_contract(kOpt, kTheta);
    Diagnostics diag;
    const double bound = kOpt.barrier - kOpt.strike;
    for (std::uint64_t m = 0; m < 20000; ++m) {
        RngStream stream(9, m);
        const StreamUniforms u{&stream};
        CHECK(baseline_path_payoff(*model, c, kTheta, Scheme::milstein, 16, u, diag) <= bound);
        CHECK(bb_path_payoff(*model, c, kTheta, Scheme::milstein, 16, u, diag) <= bound);
        CHECK(oss_path_payoff(*model, c, kTheta, 16, u, diag) <= bound);
    }
}

TEST_CASE("reports are deterministic across runs and thread counts") {
    const auto model = gbm_model(kTheta);
    SimConfig cfg = quick_cfg(32, 60000, 17);
    cfg.threads = 1;
    const auto r1 = price_oss_bb(*model, kOpt, kTheta, cfg);
    cfg.threads = 2;
    const auto r2 = price_oss_bb(*model, kOpt, kTheta, cfg);
    cfg.threads = 5;
    const auto r3 = price_oss_bb(*model, kOpt, kTheta, cfg);
    CHECK(r1.mean == r2.mean);
    CHECK(r1.sample_variance == r2.sample_variance);
    CHECK(r2.mean == r3.mean);

    const auto b1 = price_bb(*model, kOpt, kTheta, cfg);
    cfg.threads = 1;
    const auto b2 = price_bb(*model, kOpt, kTheta, cfg);
    CHECK(b1.mean == b2.mean);
    CHECK(b1.sample_variance == b2.sample_variance);
}

TEST_CASE("different seeds and stream bases decorrelate runs") {
    const auto model = gbm_model(kTheta);
    const auto a = price_bb(*model, kOpt, kTheta, quick_cfg(16, 10000, 0));
    const auto b = price_bb(*model, kOpt, kTheta, quick_cfg(16, 10000, 1));
    CHECK(a.mean != b.mean);
    SimConfig cfg = quick_cfg(16, 10000, 0);
    cfg.stream_base = 1u << 20;
    CHECK(price_bb(*model, kOpt, kTheta, cfg).mean != a.mean);
}

TEST_CASE("discounting scales the report by exp(-r(T-t0))") {
    const auto model = gbm_model(kTheta);
    SimConfig cfg = quick_cfg(16, 20000, 4);
    const auto plain = price_oss_bb(*model, kOpt, kTheta, cfg);
    cfg.discount = true;
    cfg.discount_rate = 0.05;
    const auto discounted = price_oss_bb(*model, kOpt, kTheta, cfg);
    const double df = std::exp(-0.05);
    CHECK(discounted.mean == doctest::Approx(plain.mean * df).epsilon(1e-15));
    CHECK(discounted.sample_variance ==
          doctest::Approx(plain.sample_variance * df * df).epsilon(1e-15));
}

TEST_CASE("report invariant: std_error = sqrt(variance / M)") {
    const auto model = gbm_model(kTheta);
    const auto rep = price_bb(*model, kOpt, kTheta, quick_cfg(16, 5000));
    CHECK(rep.std_error ==
          doctest::Approx(std::sqrt(rep.sample_variance / static_cast<double>(rep.n_paths))));
    CHECK(rep.n_paths == 5000);
}

TEST_CASE("euler scheme routes the oss estimator through the simplified scheme") {
    const auto model = gbm_model(kTheta);
    SimConfig cfg = quick_cfg(16, 20000, 5);
    cfg.scheme = Scheme::euler;
    const auto euler_run = price_oss_bb(*model, kOpt, kTheta, cfg);
    // identical to declaring sigma' = 0 at the model level
    const auto declared = gbm_model(kTheta, "r", "sigma", true);
    SimConfig cfg2 = cfg;
    cfg2.scheme = Scheme::milstein;
    const auto declared_run = price_oss_bb(*declared, kOpt, kTheta, cfg2);
    CHECK(euler_run.mean == declared_run.mean);
    CHECK(euler_run.sample_variance == declared_run.sample_variance);
}
