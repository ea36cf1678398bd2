#include "kmv/special_functions.hpp"

#include <cmath>
#include <stdexcept>

namespace kmv {

namespace {

// B_2n / (2n (2n - 1)) for the Stirling-de Moivre asymptotic series.
// With the argument shifted to >= 12 the first omitted term is below 1e-16.
constexpr double kStirlingCoeff[] = {
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
};

constexpr double kHalfLogTwoPi = 0.91893853320467274178032973640562;

constexpr int kMaxIterations = 500;
constexpr double kConvergenceEps = 1.0e-16;

}  // namespace

double log_gamma(double x) {
    if (!(x > 0.0)) {
        throw std::domain_error("log_gamma: argument must be positive");
    }

    double shift = 0.0;
    while (x < 12.0) {
        shift += std::log(x);
        x += 1.0;
    }

    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    double series = kStirlingCoeff[6];
    for (int i = 5; i >= 0; --i) {
        series = series * inv2 + kStirlingCoeff[i];
    }
    series *= inv;

    return (x - 0.5) * std::log(x) - x + kHalfLogTwoPi + series - shift;
}

double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0)) {
        throw std::domain_error("regularized_gamma_p: shape must be positive");
    }
    if (x < 0.0) {
        throw std::domain_error("regularized_gamma_p: argument must be non-negative");
    }
    if (x == 0.0) return 0.0;

    const double log_prefix = a * std::log(x) - x - log_gamma(a);

    if (x < a + 1.0) {
        // Lower series: P(a,x) = x^a e^-x / Gamma(a) * sum x^n / (a (a+1)...(a+n))
        double term = 1.0 / a;
        double sum = term;
        double ap = a;
        for (int n = 0; n < kMaxIterations; ++n) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * kConvergenceEps) break;
        }
        return sum * std::exp(log_prefix);
    }

    // Upper continued fraction (modified Lentz), then P = 1 - Q.
    constexpr double kTiny = 1.0e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double frac = d;
    for (int n = 1; n <= kMaxIterations; ++n) {
        const double an = -n * (n - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        frac *= delta;
        if (std::abs(delta - 1.0) < kConvergenceEps) break;
    }
    return 1.0 - std::exp(log_prefix) * frac;
}

}  // namespace kmv
