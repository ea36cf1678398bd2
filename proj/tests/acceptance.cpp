// Acceptance suite: every statistical and structural claim the library is
// shipped against, one pass/fail line each. Exits with the number of failed
// criteria.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "kmv/estimators.hpp"
#include "kmv/simulation.hpp"
#include "kmv/sketch.hpp"
#include "kmv/special_functions.hpp"

namespace {

int failures = 0;

void report(int number, const char* name, bool pass, const std::string& detail) {
    std::printf("criterion %d: %s  %s  (%s)\n", number, pass ? "PASS" : "FAIL", name,
                detail.c_str());
    if (!pass) ++failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct MeanSe {
    double mean;
    double se;
};

MeanSe mean_se(const std::vector<double>& values) {
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

// ---------------------------------------------------------------------------
// Criteria 1-3: one shared independent-model run at theta = 1e6, k = 3,
// m = 64, 1e4 trials, all estimators evaluated on the same draws.

void criteria_independent_model() {
    const std::uint64_t theta = 1'000'000;
    const kmv::ModelSpec spec{kmv::Model::kIndependent, theta, 3, 64, 10'000, 20240801};
    const std::vector<std::string> ids = {"xi-hat", "xi3", "moment:-1", "moment:0.5"};
    const auto estimates = kmv::run_independent_estimates(spec, ids);

    const auto stats = kmv::summarize("xi-hat", theta, estimates[0]);
    const double theta_real = static_cast<double>(theta);

    const double mean_gap = std::abs(stats.sample_mean - theta_real);
    report(1, "independent-model unbiasedness of xi-hat",
           mean_gap <= 3.0 * stats.standard_error,
           "|mean - theta| = " + fmt(mean_gap) + " <= 3*SE = " +
               fmt(3.0 * stats.standard_error));

    const double want_var = theta_real * theta_real / 190.0;
    const bool var_ok = stats.sample_variance >= 0.9 * want_var &&
                        stats.sample_variance <= 1.1 * want_var;
    report(2, "independent-model variance of xi-hat theta^2/(km-2)", var_ok,
           "sample var / (theta^2/190) = " + fmt(stats.sample_variance / want_var) +
               " in [0.9, 1.1]");

    // Paired MSE comparison on common draws: the standard error of the
    // per-trial difference is the combined error of the two MSE estimates.
    std::vector<double> sq_hat(estimates[0].size());
    for (std::size_t t = 0; t < sq_hat.size(); ++t) {
        const double e = estimates[0][t] - theta_real;
        sq_hat[t] = e * e;
    }
    bool dominance = true;
    std::string detail;
    for (std::size_t j = 1; j < ids.size(); ++j) {
        std::vector<double> diff(sq_hat.size());
        for (std::size_t t = 0; t < diff.size(); ++t) {
            const double e = estimates[j][t] - theta_real;
            diff[t] = e * e - sq_hat[t];
        }
        const auto d = mean_se(diff);
        const bool ok = d.mean >= 3.0 * d.se;
        dominance = dominance && ok;
        if (!detail.empty()) detail += ", ";
        detail += ids[j] + ": margin = " + fmt(d.mean / (theta_real * theta_real)) +
                  " theta^2 = " + fmt(d.mean / d.se) + " se";
    }
    report(3, "xi-hat MSE dominates xi3, moment:-1, moment:0.5", dominance, detail);
}

// ---------------------------------------------------------------------------
// Criterion 4: exact model through the production sketch.

void criterion_exact_agreement() {
    const std::uint64_t theta = 100'000;
    const kmv::ModelSpec spec{kmv::Model::kExact, theta, 3, 64, 2000, 20240804};
    const auto stats = kmv::run_exact(spec, "xi-hat");
    const double theta_real = static_cast<double>(theta);
    const double rel_bias = std::abs(stats.sample_mean / theta_real - 1.0);
    const double var_ratio = stats.sample_variance * 190.0 / (theta_real * theta_real);
    const bool pass = rel_bias <= 0.01 && var_ratio >= 0.8 && var_ratio <= 1.2;
    report(4, "exact-model agreement through the sketch", pass,
           "rel bias = " + fmt(rel_bias) + " <= 0.01, var ratio = " + fmt(var_ratio) +
               " in [0.8, 1.2]");
}

// ---------------------------------------------------------------------------
// Criterion 5: limit law of the scaled k-th minima.

void criterion_limit_law() {
    const double d = kmv::limit_law_ks(1'000'000, 3, 16, 100, 20240805);
    const double critical = 1.63 / std::sqrt(1600.0);
    report(5, "scaled k-th minima match Gamma(3,1) (pooled KS)", d <= critical,
           "D = " + fmt(d) + " <= " + fmt(critical) + " (1% critical)");
}

// ---------------------------------------------------------------------------
// Criterion 6: coverage probability against the analytic bound.

void criterion_coverage() {
    const kmv::ModelSpec spec{kmv::Model::kExact, 10'000, 3, 10, 10'000, 20240806};
    const auto report_cov = kmv::coverage_probability(spec);
    const double slack = 3.0 * std::sqrt(0.25 / 10'000.0);
    const bool pass = report_cov.empirical_p >= report_cov.bound - slack;
    report(6, "all-buckets-covered probability meets the bound", pass,
           "empirical p = " + fmt(report_cov.empirical_p) + " >= " +
               fmt(report_cov.bound - slack) + " (bound - 3*MC error)");
}

// ---------------------------------------------------------------------------
// Criterion 7: mean of the naive minimum.

void criterion_naive_minimum() {
    bool pass = true;
    std::string detail;
    for (std::uint64_t theta : {std::uint64_t{1}, std::uint64_t{999}}) {
        const auto stats = kmv::naive_min_expectation(theta, 1'000'000, 20240807);
        const double want = 1.0 / (static_cast<double>(theta) + 1.0);
        const double gap = std::abs(stats.sample_mean - want);
        pass = pass && gap <= 3.0 * stats.standard_error;
        if (!detail.empty()) detail += ", ";
        detail += "theta=" + std::to_string(theta) + ": |mean - 1/(theta+1)| = " + fmt(gap) +
                  " <= " + fmt(3.0 * stats.standard_error);
    }
    report(7, "naive minimum has mean 1/(theta+1)", pass, detail);
}

// ---------------------------------------------------------------------------
// Criterion 8: randomized structural properties, 1000 cases each.

std::vector<std::string> random_words(std::mt19937_64& rng, std::size_t count,
                                      std::size_t vocabulary) {
    std::uniform_int_distribution<std::size_t> pick(0, vocabulary - 1);
    std::vector<std::string> words;
    words.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        words.push_back("w" + std::to_string(pick(rng)));
    }
    return words;
}

kmv::Sketch sketch_of(const kmv::SketchConfig& config,
                      const std::vector<std::string>& words) {
    kmv::Sketch sk(config);
    for (const auto& w : words) sk.insert(w);
    return sk;
}

void criterion_properties() {
    constexpr int kCases = 1000;
    int bad_permutation = 0, bad_duplicate = 0, bad_merge = 0, bad_roundtrip = 0,
        bad_memory = 0, bad_monotone = 0;
    std::mt19937_64 rng(20240808);

    for (int c = 0; c < kCases; ++c) {
        kmv::SketchConfig config{static_cast<std::uint32_t>(1 + rng() % 6),
                                 static_cast<std::uint32_t>(1 + rng() % 8), rng()};
        if (std::uint64_t{config.k} * config.m < 3) config.m += 3;
        auto words = random_words(rng, 1 + rng() % 300, 1 + rng() % 250);

        const kmv::Sketch whole = sketch_of(config, words);

        // permutation invariance
        auto shuffled = words;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        bad_permutation += !(sketch_of(config, shuffled) == whole);

        // duplicate invariance
        std::vector<std::string> distinct;
        std::set<std::string> seen;
        for (const auto& w : words) {
            if (seen.insert(w).second) distinct.push_back(w);
        }
        bad_duplicate += !(sketch_of(config, distinct) == whole);

        // merge equals concatenation
        const std::size_t cut = rng() % (words.size() + 1);
        const kmv::Sketch merged =
            merge(sketch_of(config, {words.begin(), words.begin() + cut}),
                  sketch_of(config, {words.begin() + cut, words.end()}));
        bad_merge += !(merged == whole && merged.serialize() == whole.serialize());

        // serialization roundtrip
        bad_roundtrip += !(kmv::Sketch::deserialize(whole.serialize()) == whole);

        // bounded memory
        bad_memory += !(whole.stored_values() <= std::uint64_t{config.k} * config.m);

        // monotone k-th minima along a growing stream
        kmv::Sketch growing(config);
        auto prev = growing.kth_values().values;
        bool monotone = true;
        for (std::size_t i = 0; i < words.size(); ++i) {
            growing.insert(words[i]);
            if (i % 25 == 0 || i + 1 == words.size()) {
                const auto now = growing.kth_values().values;
                for (std::size_t j = 0; j < now.size(); ++j) {
                    monotone = monotone && now[j] <= prev[j];
                }
                prev = now;
            }
        }
        bad_monotone += !monotone;
    }

    const int total = bad_permutation + bad_duplicate + bad_merge + bad_roundtrip +
                      bad_memory + bad_monotone;
    report(8, "structural property suites (1000 randomized cases each)", total == 0,
           "failures: permutation " + std::to_string(bad_permutation) + ", duplicate " +
               std::to_string(bad_duplicate) + ", merge " + std::to_string(bad_merge) +
               ", roundtrip " + std::to_string(bad_roundtrip) + ", memory " +
               std::to_string(bad_memory) + ", monotone " + std::to_string(bad_monotone));
}

// ---------------------------------------------------------------------------
// Criterion 9: numeric identities at 1e-10.

void criterion_numerics() {
    std::mt19937_64 rng(20240809);
    std::uniform_real_distribution<double> ux(1e-9, 100.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double x = ux(rng);
        worst = std::max(worst, std::abs(kmv::log_gamma(x + 1.0) - kmv::log_gamma(x) -
                                         std::log(x)));
    }
    std::uniform_real_distribution<double> ur(0.05, 0.95);
    for (int i = 0; i < 1000; ++i) {
        const double x = ur(rng);
        const double lhs = kmv::log_gamma(x) + kmv::log_gamma(1.0 - x);
        const double rhs = std::log(std::numbers::pi / std::sin(std::numbers::pi * x));
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    worst = std::max(worst, std::abs(kmv::log_gamma(1.0)));
    worst = std::max(worst, std::abs(kmv::log_gamma(2.0)));
    worst = std::max(worst,
                     std::abs(kmv::log_gamma(0.5) - 0.5 * std::log(std::numbers::pi)));

    const auto inv = kmv::KthValues::from_values({0.1});
    worst = std::max(worst, std::abs(kmv::xi3_log(inv, 2, 1).value - 10.0) / 10.0);
    const auto geo = kmv::KthValues::from_values({0.25, 0.25});
    const double want = 4.0 / std::numbers::pi;
    worst = std::max(worst, std::abs(kmv::xi3_log(geo, 1, 2).value - want) / want);

    report(9, "log-gamma identities and xi3 analytic points", worst <= 1e-10,
           "worst deviation = " + fmt(worst) + " <= 1e-10");
}

}  // namespace

int main() {
    criteria_independent_model();
    criterion_exact_agreement();
    criterion_limit_law();
    criterion_coverage();
    criterion_naive_minimum();
    criterion_properties();
    criterion_numerics();
    std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "OK" : "FAILED", failures);
    return failures;
}
