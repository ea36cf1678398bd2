#pragma once

namespace kmv {

// Natural log of the Gamma function for x > 0. Stirling-de Moivre series
// after shifting the argument above 12 with the recurrence
// lgamma(x) = lgamma(x + 1) - log(x). Absolute error is well below 1e-10
// across [0.05, 1e4]. Throws std::domain_error for x <= 0.
double log_gamma(double x);

// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a),
// the CDF of a rate-1 Gamma(a) variable. Series expansion for x < a + 1,
// continued fraction otherwise. Throws std::domain_error for a <= 0 or x < 0.
double regularized_gamma_p(double a, double x);

}  // namespace kmv
