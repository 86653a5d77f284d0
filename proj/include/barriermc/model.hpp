#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

#include "barriermc/params.hpp"

namespace barriermc {

// Up-and-out call on a single underlying, continuously monitored on [t0, T].
struct OptionSpec {
    double barrier;
    double strike;
    double t0;
    double expiry;

    void validate() const {
        if (!(barrier > strike) || strike < 0.0) {
            throw std::invalid_argument("OptionSpec: requires B > K >= 0");
        }
        if (!(expiry > t0)) {
            throw std::invalid_argument("OptionSpec: requires T > t0");
        }
    }
    double horizon() const { return expiry - t0; }
};

inline double payoff_q(double s_terminal, const OptionSpec& opt) {
    return std::max(s_terminal - opt.strike, 0.0);
}

// Scalar SDE dS = mu(S,t,theta) dt + sigma(S,t,theta) dW with analytic
// derivatives. sigma_prime is the Milstein correction coefficient; a model
// may declare it identically zero to force the Euler branch of the survival
// machinery, in which case sigma_s still reports the true dsigma/ds for the
// tangent recursions. All *_param functions are partials at fixed s with
// respect to the theta component with the given index; unknown components
// must return 0. Immutable after construction; safe to share across workers.
class Model {
public:
    virtual ~Model() = default;

    virtual double mu(double s, double t, const ParamVector& theta) const = 0;
    virtual double sigma(double s, double t, const ParamVector& theta) const = 0;
    virtual double sigma_prime(double s, double t, const ParamVector& theta) const = 0;

    virtual double mu_s(double s, double t, const ParamVector& theta) const = 0;
    virtual double sigma_s(double s, double t, const ParamVector& theta) const = 0;
    virtual double sigma_prime_s(double s, double t, const ParamVector& theta) const = 0;

    virtual double mu_param(int component, double s, double t, const ParamVector& theta) const = 0;
    virtual double sigma_param(int component, double s, double t, const ParamVector& theta) const = 0;
    virtual double sigma_prime_param(int component, double s, double t,
                                     const ParamVector& theta) const = 0;

    // false routes every step through the simplified (Euler) scheme.
    virtual bool level_dependent_vol() const = 0;
};

// Geometric Brownian motion: mu = r*s, sigma = vol*s, sigma' = vol.
// With declare_sigma_prime_zero the model reports sigma' == 0 and the
// schemes reduce to Euler-Maruyama.
class GbmModel final : public Model {
public:
    GbmModel(int rate_index, int vol_index, bool declare_sigma_prime_zero = false)
        : rate_idx_(rate_index), vol_idx_(vol_index), euler_only_(declare_sigma_prime_zero) {}

    double mu(double s, double, const ParamVector& th) const override {
        return th.value(rate_idx_) * s;
    }
    double sigma(double s, double, const ParamVector& th) const override {
        return th.value(vol_idx_) * s;
    }
    double sigma_prime(double, double, const ParamVector& th) const override {
        return euler_only_ ? 0.0 : th.value(vol_idx_);
    }
    double mu_s(double, double, const ParamVector& th) const override {
        return th.value(rate_idx_);
    }
    double sigma_s(double, double, const ParamVector& th) const override {
        return th.value(vol_idx_);
    }
    double sigma_prime_s(double, double, const ParamVector&) const override { return 0.0; }

    double mu_param(int c, double s, double, const ParamVector&) const override {
        return c == rate_idx_ ? s : 0.0;
    }
    double sigma_param(int c, double s, double, const ParamVector&) const override {
        return c == vol_idx_ ? s : 0.0;
    }
    double sigma_prime_param(int c, double, double, const ParamVector&) const override {
        if (euler_only_) return 0.0;
        return c == vol_idx_ ? 1.0 : 0.0;
    }
    bool level_dependent_vol() const override { return !euler_only_; }

private:
    int rate_idx_;
    int vol_idx_;
    bool euler_only_;
};

// Constant-elasticity local-volatility example: sigma = vol * s^gamma with
// fixed exponent gamma, so sigma' = vol*gamma*s^(gamma-1) is genuinely
// level-dependent. Drift mu = r*s.
class CevModel final : public Model {
public:
    CevModel(int rate_index, int vol_index, double gamma)
        : rate_idx_(rate_index), vol_idx_(vol_index), gamma_(gamma) {}

    double mu(double s, double, const ParamVector& th) const override {
        return th.value(rate_idx_) * s;
    }
    double sigma(double s, double, const ParamVector& th) const override {
        return th.value(vol_idx_) * std::pow(s, gamma_);
    }
    double sigma_prime(double s, double, const ParamVector& th) const override {
        return th.value(vol_idx_) * gamma_ * std::pow(s, gamma_ - 1.0);
    }
    double mu_s(double, double, const ParamVector& th) const override {
        return th.value(rate_idx_);
    }
    double sigma_s(double s, double t, const ParamVector& th) const override {
        return sigma_prime(s, t, th);
    }
    double sigma_prime_s(double s, double, const ParamVector& th) const override {
        return th.value(vol_idx_) * gamma_ * (gamma_ - 1.0) * std::pow(s, gamma_ - 2.0);
    }
    double mu_param(int c, double s, double, const ParamVector&) const override {
        return c == rate_idx_ ? s : 0.0;
    }
    double sigma_param(int c, double s, double, const ParamVector&) const override {
        return c == vol_idx_ ? std::pow(s, gamma_) : 0.0;
    }
    double sigma_prime_param(int c, double s, double, const ParamVector&) const override {
        return c == vol_idx_ ? gamma_ * std::pow(s, gamma_ - 1.0) : 0.0;
    }
    bool level_dependent_vol() const override { return true; }

private:
    int rate_idx_;
    int vol_idx_;
    double gamma_;
};

// Presents any model with sigma' identically zero, routing every step of the
// survival machinery through the simplified (Euler) scheme.
class EulerView final : public Model {
public:
    explicit EulerView(const Model& base) : base_(&base) {}

    double mu(double s, double t, const ParamVector& th) const override {
        return base_->mu(s, t, th);
    }
    double sigma(double s, double t, const ParamVector& th) const override {
        return base_->sigma(s, t, th);
    }
    double sigma_prime(double, double, const ParamVector&) const override { return 0.0; }
    double mu_s(double s, double t, const ParamVector& th) const override {
        return base_->mu_s(s, t, th);
    }
    double sigma_s(double s, double t, const ParamVector& th) const override {
        return base_->sigma_s(s, t, th);
    }
    double sigma_prime_s(double, double, const ParamVector&) const override { return 0.0; }
    double mu_param(int c, double s, double t, const ParamVector& th) const override {
        return base_->mu_param(c, s, t, th);
    }
    double sigma_param(int c, double s, double t, const ParamVector& th) const override {
        return base_->sigma_param(c, s, t, th);
    }
    double sigma_prime_param(int, double, double, const ParamVector&) const override {
        return 0.0;
    }
    bool level_dependent_vol() const override { return false; }

private:
    const Model* base_;
};

// Factories validate the bound parameters and resolve component indices once.
std::unique_ptr<Model> gbm_model(const ParamVector& theta, const std::string& rate_name = "r",
                                 const std::string& vol_name = "sigma",
                                 bool declare_sigma_prime_zero = false);
std::unique_ptr<Model> cev_model(const ParamVector& theta, double gamma,
                                 const std::string& rate_name = "r",
                                 const std::string& vol_name = "sigma");

}  // namespace barriermc
