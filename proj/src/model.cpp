#include "barriermc/model.hpp"

#include <cmath>

namespace barriermc {

std::unique_ptr<Model> gbm_model(const ParamVector& theta, const std::string& rate_name,
                                 const std::string& vol_name, bool declare_sigma_prime_zero) {
    const int rate_idx = theta.require(rate_name);
    const int vol_idx = theta.require(vol_name);
    if (!(theta.value(vol_idx) > 0.0)) {
        throw std::invalid_argument("gbm_model: volatility must be positive");
    }
    return std::make_unique<GbmModel>(rate_idx, vol_idx, declare_sigma_prime_zero);
}

std::unique_ptr<Model> cev_model(const ParamVector& theta, double gamma,
                                 const std::string& rate_name, const std::string& vol_name) {
    const int rate_idx = theta.require(rate_name);
    const int vol_idx = theta.require(vol_name);
    if (!(theta.value(vol_idx) > 0.0)) {
        throw std::invalid_argument("cev_model: volatility must be positive");
    }
    if (!std::isfinite(gamma)) {
        throw std::invalid_argument("cev_model: gamma must be finite");
    }
    return std::make_unique<CevModel>(rate_idx, vol_idx, gamma);
}

}  // namespace barriermc
