#include "kmv/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "kmv/estimators.hpp"
#include "kmv/sketch.hpp"
#include "kmv/special_functions.hpp"

namespace kmv {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void ModelSpec::validate() const {
    if (theta < 1) throw std::invalid_argument("ModelSpec: theta must be at least 1");
    if (trials < 1) throw std::invalid_argument("ModelSpec: trials must be at least 1");
    SketchConfig{k, m, 0}.validate();
}

std::uint64_t trial_seed(std::uint64_t rng_seed, std::uint64_t trial_index) {
    return splitmix64(rng_seed + (trial_index + 1) * 0x9e3779b97f4a7c15ULL);
}

double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

double sample_gamma(std::uint32_t k, double theta, std::mt19937_64& rng) {
    double sum_log = 0.0;
    for (std::uint32_t i = 0; i < k; ++i) sum_log += std::log(uniform_unit(rng));
    return -sum_log / theta;
}

void parallel_for(std::uint64_t n,
                  const std::function<void(std::uint64_t, std::uint64_t)>& chunk) {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::uint64_t workers = std::min<std::uint64_t>(hw, n);
    if (workers <= 1) {
        chunk(0, n);
        return;
    }
    const std::uint64_t per_worker = (n + workers - 1) / workers;
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::uint64_t w = 0; w < workers; ++w) {
        const std::uint64_t first = w * per_worker;
        const std::uint64_t last = std::min(n, first + per_worker);
        if (first >= last) break;
        threads.emplace_back([&chunk, first, last] { chunk(first, last); });
    }
    for (auto& t : threads) t.join();
}

namespace {

using TrialFn = std::function<void(std::uint64_t, std::mt19937_64&)>;

void run_trials(const ModelSpec& spec, const TrialFn& one_trial) {
    parallel_for(spec.trials, [&](std::uint64_t first, std::uint64_t last) {
        for (std::uint64_t t = first; t < last; ++t) {
            std::mt19937_64 rng(trial_seed(spec.rng_seed, t));
            one_trial(t, rng);
        }
    });
}

std::vector<std::vector<double>> run_model_estimates(
    const ModelSpec& spec, std::span<const std::string> estimator_ids, Model expected) {
    spec.validate();
    if (spec.model != expected) {
        throw std::invalid_argument("ModelSpec: wrong model for this runner");
    }
    if (estimator_ids.empty()) {
        throw std::invalid_argument("run: at least one estimator id required");
    }

    std::vector<std::vector<double>> results(estimator_ids.size(),
                                             std::vector<double>(spec.trials));
    const double theta = static_cast<double>(spec.theta);

    run_trials(spec, [&](std::uint64_t t, std::mt19937_64& rng) {
        KthValues kv;
        if (spec.model == Model::kIndependent) {
            std::vector<double> draws(spec.m);
            for (auto& d : draws) d = sample_gamma(spec.k, theta, rng);
            kv = KthValues::from_values(std::move(draws));
        } else {
            Sketch sketch(SketchConfig{spec.k, spec.m, 0});
            for (std::uint64_t i = 0; i < spec.theta; ++i) {
                sketch.insert_value(uniform_unit(rng));
            }
            kv = sketch.kth_values();
        }
        for (std::size_t e = 0; e < estimator_ids.size(); ++e) {
            results[e][t] = estimate(estimator_ids[e], kv, spec.k, spec.m).value;
        }
    });
    return results;
}

}  // namespace

std::vector<std::vector<double>> run_independent_estimates(
    const ModelSpec& spec, std::span<const std::string> estimator_ids) {
    return run_model_estimates(spec, estimator_ids, Model::kIndependent);
}

std::vector<std::vector<double>> run_exact_estimates(
    const ModelSpec& spec, std::span<const std::string> estimator_ids) {
    return run_model_estimates(spec, estimator_ids, Model::kExact);
}

TrialStats run_independent(const ModelSpec& spec, const std::string& estimator_id) {
    const std::string ids[] = {estimator_id};
    const auto values = run_independent_estimates(spec, ids);
    return summarize(estimator_id, spec.theta, values[0]);
}

TrialStats run_exact(const ModelSpec& spec, const std::string& estimator_id) {
    const std::string ids[] = {estimator_id};
    const auto values = run_exact_estimates(spec, ids);
    return summarize(estimator_id, spec.theta, values[0]);
}

double coverage_bound(double theta, double m) {
    return 1.0 - 2.0 * m * std::exp(-theta / (2.0 * m * m));
}

CoverageReport coverage_probability(const ModelSpec& spec) {
    spec.validate();
    if (spec.model != Model::kExact) {
        throw std::invalid_argument("coverage_probability: exact model required");
    }
    std::vector<char> covered(spec.trials, 0);
    // every bucket full with its k-th minimum strictly inside the bucket,
    // i.e. every entry below the deficiency sentinel 1/m
    const double sentinel = 1.0 / static_cast<double>(spec.m);
    run_trials(spec, [&](std::uint64_t t, std::mt19937_64& rng) {
        Sketch sketch(SketchConfig{spec.k, spec.m, 0});
        for (std::uint64_t i = 0; i < spec.theta; ++i) {
            sketch.insert_value(uniform_unit(rng));
        }
        const auto kv = sketch.kth_values();
        covered[t] = std::all_of(kv.values.begin(), kv.values.end(),
                                 [sentinel](double v) { return v < sentinel; })
                         ? 1
                         : 0;
    });
    std::uint64_t hits = 0;
    for (char c : covered) hits += c;
    return CoverageReport{
        static_cast<double>(hits) / static_cast<double>(spec.trials),
        coverage_bound(static_cast<double>(spec.theta), static_cast<double>(spec.m)),
        spec.trials};
}

std::vector<double> exact_scaled_kth_values(std::uint64_t theta, std::uint32_t k,
                                            std::uint32_t m, std::uint64_t trials,
                                            std::uint64_t rng_seed) {
    ModelSpec spec{Model::kExact, theta, k, m, trials, rng_seed};
    spec.validate();
    std::vector<double> pooled(trials * m);
    const double theta_real = static_cast<double>(theta);
    run_trials(spec, [&](std::uint64_t t, std::mt19937_64& rng) {
        Sketch sketch(SketchConfig{k, m, 0});
        for (std::uint64_t i = 0; i < theta; ++i) {
            sketch.insert_value(uniform_unit(rng));
        }
        const auto kv = sketch.kth_values();
        for (std::uint32_t i = 0; i < m; ++i) {
            pooled[t * m + i] = theta_real * kv.values[i];
        }
    });
    return pooled;
}

double limit_law_ks(std::uint64_t theta, std::uint32_t k, std::uint32_t m,
                    std::uint64_t trials, std::uint64_t rng_seed) {
    auto pooled = exact_scaled_kth_values(theta, k, m, trials, rng_seed);
    const double shape = static_cast<double>(k);
    return ks_statistic(std::move(pooled),
                        [shape](double x) { return regularized_gamma_p(shape, x); });
}

TrialStats naive_min_expectation(std::uint64_t theta, std::uint64_t trials,
                                 std::uint64_t rng_seed) {
    if (theta < 1) throw std::invalid_argument("naive_min_expectation: theta must be at least 1");
    if (trials < 1) throw std::invalid_argument("naive_min_expectation: trials must be at least 1");
    std::vector<double> minima(trials);
    parallel_for(trials, [&](std::uint64_t first, std::uint64_t last) {
        for (std::uint64_t t = first; t < last; ++t) {
            std::mt19937_64 rng(trial_seed(rng_seed, t));
            double lo = 1.0;
            for (std::uint64_t i = 0; i < theta; ++i) {
                lo = std::min(lo, uniform_unit(rng));
            }
            minima[t] = lo;
        }
    });
    return summarize("naive-min", theta, minima);
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        const double lo = f - static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n - f;
        d = std::max({d, lo, hi});
    }
    return d;
}

TrialStats summarize(std::string estimator_id, std::uint64_t theta,
                     std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("summarize: no values");
    const auto n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double variance = values.size() > 1 ? ss / (n - 1.0) : 0.0;
    return TrialStats{std::move(estimator_id), mean, variance, std::sqrt(variance / n),
                      values.size(), theta};
}

std::string trial_stats_csv_header() {
    return "model,estimator,theta,k,m,trials,mean,variance,se,rel_bias,rel_var_ratio,seed";
}

std::string trial_stats_csv_row(std::string_view model, const TrialStats& stats,
                                std::uint32_t k, std::uint32_t m, std::uint64_t rng_seed) {
    const double theta = static_cast<double>(stats.theta);
    const double km = static_cast<double>(k) * static_cast<double>(m);
    const double rel_bias = (stats.sample_mean - theta) / theta;
    const double rel_var_ratio = stats.sample_variance * (km - 2.0) / (theta * theta);
    std::string row(model);
    row += ',';
    row += stats.estimator_id;
    row += ',' + std::to_string(stats.theta);
    row += ',' + std::to_string(k);
    row += ',' + std::to_string(m);
    row += ',' + std::to_string(stats.trials);
    row += ',' + format_double(stats.sample_mean);
    row += ',' + format_double(stats.sample_variance);
    row += ',' + format_double(stats.standard_error);
    row += ',' + format_double(rel_bias);
    row += ',' + format_double(rel_var_ratio);
    row += ',' + std::to_string(rng_seed);
    return row;
}

}  // namespace kmv
