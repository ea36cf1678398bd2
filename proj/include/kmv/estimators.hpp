#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "kmv/sketch.hpp"

namespace kmv {

// A point estimate of the number of distinct elements, tagged with the
// estimator that produced it and the sketch shape it was computed from.
struct Estimate {
    std::string estimator_id;
    double value = 0.0;
    std::uint32_t k = 0;
    std::uint32_t m = 0;
};

// xi-hat = (k*m - 1) / S with S the sum of the m renormalized k-th minima.
// Unbiased with variance theta^2 / (km - 2) when the minima are independent
// Gamma(k, theta) variables. Note it reads the sketch only through KthValues:
// the k*m - m smaller stored values carry no extra information.
Estimate xi_hat(const KthValues& kv, std::uint32_t k, std::uint32_t m);

// Log-family estimator
//   (Gamma(k - 1/m) / Gamma(k))^-m * exp(-(1/m) * sum log entries),
// evaluated in log space so large k*m cannot overflow the Gamma factors.
// Rejects k = m = 1 where the constant would need Gamma(0).
Estimate xi3_log(const KthValues& kv, std::uint32_t k, std::uint32_t m);

// Power-moment family: for exponent alpha (alpha != 0, k + alpha > 0),
//   estimate = [ c(k, alpha) / ((1/m) * sum entries^alpha) ]^(1/alpha)
// with c(k, alpha) = Gamma(k + alpha) / Gamma(k), the constant that makes the
// per-bucket moment match E[X^alpha] = c * theta^-alpha under the Gamma
// model. alpha = -1 is the inverse family, alpha = 1/2 the square-root one.
Estimate xi_moment(const KthValues& kv, std::uint32_t k, std::uint32_t m, double alpha);

// Dispatch by estimator id: "xi-hat", "xi3", or "moment:ALPHA" (e.g.
// "moment:-1", "moment:0.5"). Unknown ids throw std::invalid_argument.
Estimate estimate(std::string_view estimator_id, const KthValues& kv,
                  std::uint32_t k, std::uint32_t m);

}  // namespace kmv
