#include "kmv/estimators.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "kmv/special_functions.hpp"

namespace kmv {

namespace {

void check_shape(const KthValues& kv, std::uint32_t k, std::uint32_t m) {
    if (k == 0 || m == 0) {
        throw std::invalid_argument("estimator: k and m must be positive");
    }
    if (kv.values.size() != m) {
        throw std::invalid_argument("estimator: KthValues size does not match m");
    }
}

Estimate make_estimate(std::string id, double value, std::uint32_t k, std::uint32_t m) {
    if (!std::isfinite(value) || !(value > 0.0)) {
        throw std::runtime_error("estimator '" + id + "' produced a non-positive or non-finite value");
    }
    return Estimate{std::move(id), value, k, m};
}

std::string moment_id(double alpha) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "moment:%g", alpha);
    return buf;
}

}  // namespace

Estimate xi_hat(const KthValues& kv, std::uint32_t k, std::uint32_t m) {
    check_shape(kv, k, m);
    if (static_cast<std::uint64_t>(k) * m < 3) {
        // km >= 3 keeps the estimator's variance theta^2 / (km - 2) finite
        throw std::invalid_argument("xi-hat: k*m must be at least 3");
    }
    const double km = static_cast<double>(k) * static_cast<double>(m);
    return make_estimate("xi-hat", (km - 1.0) / kv.sum_s, k, m);
}

Estimate xi3_log(const KthValues& kv, std::uint32_t k, std::uint32_t m) {
    check_shape(kv, k, m);
    if (k == 1 && m == 1) {
        throw std::invalid_argument("xi3: k = m = 1 is outside the estimator's domain");
    }
    const double log_constant =
        log_gamma(static_cast<double>(k) - 1.0 / m) - log_gamma(static_cast<double>(k));
    double sum_log = 0.0;
    for (double v : kv.values) {
        if (!(v > 0.0)) throw std::invalid_argument("xi3: entries must be positive");
        sum_log += std::log(v);
    }
    const double value = std::exp(-static_cast<double>(m) * log_constant - sum_log / m);
    return make_estimate("xi3", value, k, m);
}

Estimate xi_moment(const KthValues& kv, std::uint32_t k, std::uint32_t m, double alpha) {
    check_shape(kv, k, m);
    if (alpha == 0.0) {
        throw std::invalid_argument("moment estimator: alpha must be nonzero");
    }
    if (!(static_cast<double>(k) + alpha > 0.0)) {
        throw std::invalid_argument("moment estimator: k + alpha must be positive");
    }
    const double constant =
        std::exp(log_gamma(static_cast<double>(k) + alpha) - log_gamma(static_cast<double>(k)));
    double sum_pow = 0.0;
    for (double v : kv.values) {
        if (!(v > 0.0)) throw std::invalid_argument("moment estimator: entries must be positive");
        sum_pow += std::pow(v, alpha);
    }
    const double mean_pow = sum_pow / m;
    const double value = std::pow(constant / mean_pow, 1.0 / alpha);
    return make_estimate(moment_id(alpha), value, k, m);
}

Estimate estimate(std::string_view estimator_id, const KthValues& kv,
                  std::uint32_t k, std::uint32_t m) {
    if (estimator_id == "xi-hat") return xi_hat(kv, k, m);
    if (estimator_id == "xi3") return xi3_log(kv, k, m);
    constexpr std::string_view kMomentPrefix = "moment:";
    if (estimator_id.substr(0, kMomentPrefix.size()) == kMomentPrefix) {
        const std::string alpha_text(estimator_id.substr(kMomentPrefix.size()));
        std::size_t consumed = 0;
        double alpha = 0.0;
        try {
            alpha = std::stod(alpha_text, &consumed);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad moment exponent in estimator id '" +
                                        std::string(estimator_id) + "'");
        }
        if (consumed != alpha_text.size()) {
            throw std::invalid_argument("bad moment exponent in estimator id '" +
                                        std::string(estimator_id) + "'");
        }
        return xi_moment(kv, k, m, alpha);
    }
    throw std::invalid_argument("unknown estimator id '" + std::string(estimator_id) +
                                "' (expected xi-hat, xi3, or moment:ALPHA)");
}

}  // namespace kmv
