#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace kmv {

enum class Model { kIndependent, kExact };

// One Monte-Carlo experiment: `trials` repetitions at true cardinality
// `theta` with sketch shape (k, m). Under the independent model each trial
// draws the m k-th minima directly as Gamma(k, theta) variables; under the
// exact model each trial pushes theta uniform values through a real Sketch.
struct ModelSpec {
    Model model = Model::kIndependent;
    std::uint64_t theta = 1;
    std::uint32_t k = 8;
    std::uint32_t m = 128;
    std::uint64_t trials = 1;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

struct TrialStats {
    std::string estimator_id;
    double sample_mean = 0.0;
    double sample_variance = 0.0;        // unbiased (n - 1); zero for a single trial
    double standard_error = 0.0;         // sqrt(sample_variance / trials)
    std::uint64_t trials = 0;
    std::uint64_t theta = 0;
};

struct CoverageReport {
    double empirical_p = 0.0;  // fraction of trials with every k-th minimum below 1
    double bound = 0.0;        // 1 - 2m exp(-theta / (2 m^2)); may be negative (vacuous)
    std::uint64_t trials = 0;
};

// Stream splitting for parallel trials: trial i uses an engine seeded with
// trial_seed(rng_seed, i), so results do not depend on thread count.
std::uint64_t trial_seed(std::uint64_t rng_seed, std::uint64_t trial_index);

// Uniform draw in (0, 1]; never returns zero.
double uniform_unit(std::mt19937_64& rng);

// Gamma(k, rate theta) variate for integer shape, as the sum of k
// exponential(theta) draws.
double sample_gamma(std::uint32_t k, double theta, std::mt19937_64& rng);

// Per-trial estimates, one inner vector per estimator id, all estimators
// evaluated on the same draws (paired comparisons stay tight). Inner vectors
// are indexed by trial, so output is independent of scheduling.
std::vector<std::vector<double>> run_independent_estimates(
    const ModelSpec& spec, std::span<const std::string> estimator_ids);
std::vector<std::vector<double>> run_exact_estimates(
    const ModelSpec& spec, std::span<const std::string> estimator_ids);

TrialStats run_independent(const ModelSpec& spec, const std::string& estimator_id);
TrialStats run_exact(const ModelSpec& spec, const std::string& estimator_id);

// Fraction of exact-model trials where every bucket holds k values with its
// k-th minimum inside the bucket, against the analytic lower bound.
CoverageReport coverage_probability(const ModelSpec& spec);
double coverage_bound(double theta, double m);

// All m*trials values theta * (renormalized k-th minimum) from exact-model
// runs, trial-major. In the large-theta limit these are i.i.d. Gamma(k, 1).
std::vector<double> exact_scaled_kth_values(std::uint64_t theta, std::uint32_t k,
                                            std::uint32_t m, std::uint64_t trials,
                                            std::uint64_t rng_seed);

// Kolmogorov-Smirnov statistic of the pooled scaled k-th minima against the
// Gamma(k, 1) CDF.
double limit_law_ks(std::uint64_t theta, std::uint32_t k, std::uint32_t m,
                    std::uint64_t trials, std::uint64_t rng_seed);

// Monte-Carlo statistics of the minimum of theta uniforms (mean 1/(theta+1)).
TrialStats naive_min_expectation(std::uint64_t theta, std::uint64_t trials,
                                 std::uint64_t rng_seed);

// KS statistic of a sample against an arbitrary CDF.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);

TrialStats summarize(std::string estimator_id, std::uint64_t theta,
                     std::span<const double> values);

// CSV reporting (one row per model/estimator/theta/k/m combination).
std::string trial_stats_csv_header();
std::string trial_stats_csv_row(std::string_view model, const TrialStats& stats,
                                std::uint32_t k, std::uint32_t m, std::uint64_t rng_seed);

// Runs chunk(first, last) over a partition of [0, n), possibly on several
// threads. Callers write results by index only.
void parallel_for(std::uint64_t n,
                  const std::function<void(std::uint64_t, std::uint64_t)>& chunk);

}  // namespace kmv
