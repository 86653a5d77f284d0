#include "barriermc/analytic.hpp"

#include <cmath>

#include "barriermc/normal.hpp"

namespace barriermc {

namespace {

double d1(double s, double k, double r, double sigma, double tau) {
    return (std::log(s / k) + (r + 0.5 * sigma * sigma) * tau) / (sigma * std::sqrt(tau));
}

}  // namespace

double bs_call(const BsParams& p) {
    p.validate();
    const double dp = d1(p.s0, p.strike, p.rate, p.sigma, p.tau);
    const double dm = dp - p.sigma * std::sqrt(p.tau);
    return p.s0 * normal_cdf(dp) - p.strike * std::exp(-p.rate * p.tau) * normal_cdf(dm);
}

double bs_put(const BsParams& p) {
    p.validate();
    const double dp = d1(p.s0, p.strike, p.rate, p.sigma, p.tau);
    const double dm = dp - p.sigma * std::sqrt(p.tau);
    return p.strike * std::exp(-p.rate * p.tau) * normal_cdf(-dm) - p.s0 * normal_cdf(-dp);
}

double bs_up_and_out_call(const BsParams& p) {
    p.validate();
    if (p.s0 >= p.barrier) return 0.0;
    if (p.strike >= p.barrier) return 0.0;

    const double sq_tau = std::sqrt(p.tau);
    const double vol_sq = p.sigma * p.sigma;
    const double mu = p.rate / vol_sq - 0.5;
    const double df = std::exp(-p.rate * p.tau);
    const double hs = p.barrier / p.s0;

    const double x1 = std::log(p.s0 / p.strike) / (p.sigma * sq_tau) + (1.0 + mu) * p.sigma * sq_tau;
    const double x2 = std::log(p.s0 / p.barrier) / (p.sigma * sq_tau) + (1.0 + mu) * p.sigma * sq_tau;
    const double y1 = std::log(hs * p.barrier / p.strike) / (p.sigma * sq_tau) +
                      (1.0 + mu) * p.sigma * sq_tau;
    const double y2 = std::log(hs) / (p.sigma * sq_tau) + (1.0 + mu) * p.sigma * sq_tau;

    const double term_a =
        p.s0 * normal_cdf(x1) - p.strike * df * normal_cdf(x1 - p.sigma * sq_tau);
    const double term_b =
        p.s0 * normal_cdf(x2) - p.strike * df * normal_cdf(x2 - p.sigma * sq_tau);

    // Reflected terms: the Gaussian factor decays faster than the power can
    // grow, so a zero Phi is taken before the possibly huge power.
    auto reflected = [&](double y) {
        const double phi_s = normal_cdf(-y);
        const double phi_k = normal_cdf(-y + p.sigma * sq_tau);
        const double pow_s = phi_s == 0.0 ? 0.0 : std::pow(hs, 2.0 * (mu + 1.0)) * phi_s;
        const double pow_k = phi_k == 0.0 ? 0.0 : std::pow(hs, 2.0 * mu) * phi_k;
        return p.s0 * pow_s - p.strike * df * pow_k;
    };

    return term_a - term_b + reflected(y1) - reflected(y2);
}

double bs_barrier_greek(const BsParams& p, BsComponent component, int order) {
    if (order != 1 && order != 2) {
        throw std::invalid_argument("bs_barrier_greek: order must be 1 or 2");
    }
    auto at = [&](double bump) {
        BsParams q = p;
        switch (component) {
            case BsComponent::spot: q.s0 += bump; break;
            case BsComponent::vol: q.sigma += bump; break;
            case BsComponent::rate: q.rate += bump; break;
            case BsComponent::strike: q.strike += bump; break;
            case BsComponent::barrier: q.barrier += bump; break;
        }
        return bs_up_and_out_call(q);
    };
    double scale = 1.0;
    switch (component) {
        case BsComponent::spot: scale = p.s0; break;
        case BsComponent::vol: scale = p.sigma; break;
        case BsComponent::rate: scale = std::max(std::abs(p.rate), 0.01); break;
        case BsComponent::strike: scale = p.strike; break;
        case BsComponent::barrier: scale = p.barrier; break;
    }
    const double h = 1e-5 * scale;
    if (order == 1) {
        auto central = [&](double step) { return (at(step) - at(-step)) / (2.0 * step); };
        const double coarse = central(h);
        const double fine = central(0.5 * h);
        return (4.0 * fine - coarse) / 3.0;
    }
    auto second = [&](double step) {
        return (at(step) - 2.0 * at(0.0) + at(-step)) / (step * step);
    };
    const double h2 = 100.0 * h;  // second differences need a wider stencil
    const double coarse = second(h2);
    const double fine = second(0.5 * h2);
    return (4.0 * fine - coarse) / 3.0;
}

}  // namespace barriermc
