#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "kmv/estimators.hpp"
#include "kmv/simulation.hpp"
#include "kmv/sketch.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) throw std::runtime_error("error reading " + path);
    return bytes;
}

void write_file_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("error writing " + path);
}

kmv::Sketch load_sketch(const std::string& path) {
    const auto bytes = read_file_bytes(path);
    return kmv::Sketch::deserialize(bytes);
}

struct CountOptions {
    std::vector<std::string> inputs;
    std::uint32_t k = 8;
    std::uint32_t m = 128;
    std::uint64_t seed = 0;
    std::string estimator = "xi-hat";
    std::string tokens = "line";
    std::string out = "text";
    std::string sketch_in;
    std::string sketch_out;
    bool all_estimators = false;
    bool k_set = false, m_set = false, seed_set = false;
};

void stream_tokens(std::istream& in, const std::string& mode, kmv::Sketch& sketch) {
    if (mode == "line") {
        std::string line;
        while (std::getline(in, line)) sketch.insert(line);
    } else {
        std::string word;
        while (in >> word) sketch.insert(word);
    }
    if (in.bad()) throw std::runtime_error("error reading input stream");
}

std::vector<std::string> estimator_ids_for(const CountOptions& opt) {
    if (!opt.all_estimators) return {opt.estimator};
    std::vector<std::string> ids = {"xi-hat", "xi3", "moment:-1", "moment:0.5"};
    if (std::find(ids.begin(), ids.end(), opt.estimator) == ids.end()) {
        ids.insert(ids.begin(), opt.estimator);
    }
    return ids;
}

int run_count(const CountOptions& opt) {
    kmv::SketchConfig config{opt.k, opt.m, opt.seed};
    if (!opt.sketch_in.empty()) {
        const auto loaded = load_sketch(opt.sketch_in);
        const auto& stored = loaded.config();
        if ((opt.k_set && opt.k != stored.k) || (opt.m_set && opt.m != stored.m) ||
            (opt.seed_set && opt.seed != stored.seed)) {
            throw std::runtime_error("sketch " + opt.sketch_in +
                                     " was built with k=" + std::to_string(stored.k) +
                                     " m=" + std::to_string(stored.m) +
                                     " seed=" + std::to_string(stored.seed) +
                                     ", which contradicts the flags given");
        }
        config = stored;
    }

    kmv::Sketch sketch = opt.sketch_in.empty()
                             ? kmv::Sketch(config)
                             : load_sketch(opt.sketch_in);

    if (opt.inputs.empty()) {
        std::ios::sync_with_stdio(false);
        stream_tokens(std::cin, opt.tokens, sketch);
    } else {
        for (const auto& path : opt.inputs) {
            std::ifstream in(path, std::ios::binary);
            if (!in) throw std::runtime_error("cannot open " + path);
            stream_tokens(in, opt.tokens, sketch);
        }
    }

    const auto kv = sketch.kth_values();
    const auto ids = estimator_ids_for(opt);
    std::vector<kmv::Estimate> estimates;
    estimates.reserve(ids.size());
    for (const auto& id : ids) estimates.push_back(kmv::estimate(id, kv, config.k, config.m));

    if (!opt.sketch_out.empty()) write_file_bytes(opt.sketch_out, sketch.serialize());

    if (opt.out == "json") {
        json doc{{"command", "count"},
                 {"k", config.k},
                 {"m", config.m},
                 {"seed", config.seed},
                 {"items_seen", sketch.items_seen()},
                 {"stored_values", sketch.stored_values()},
                 {"estimator", opt.estimator}};
        json values = json::object();
        for (const auto& e : estimates) values[e.estimator_id] = e.value;
        doc["estimates"] = values;
        doc["estimate"] = estimates.front().value;
        std::cout << doc.dump(2) << '\n';
    } else if (opt.out == "csv") {
        std::cout << "estimator,estimate,k,m,seed,items_seen\n";
        for (const auto& e : estimates) {
            std::cout << e.estimator_id << ',' << format_double(e.value) << ',' << config.k
                      << ',' << config.m << ',' << config.seed << ',' << sketch.items_seen()
                      << '\n';
        }
    } else {
        for (const auto& e : estimates) {
            std::cout << "estimate " << e.estimator_id << ": " << format_double(e.value)
                      << '\n';
        }
        std::cout << "k: " << config.k << "\nm: " << config.m << "\nseed: " << config.seed
                  << "\nitems_seen: " << sketch.items_seen()
                  << "\nstored_values: " << sketch.stored_values() << '\n';
    }
    return kExitOk;
}

int run_merge(const std::vector<std::string>& inputs, const std::string& sketch_out) {
    kmv::Sketch merged = load_sketch(inputs.front());
    for (std::size_t i = 1; i < inputs.size(); ++i) {
        merged = kmv::merge(merged, load_sketch(inputs[i]));
    }
    write_file_bytes(sketch_out, merged.serialize());
    std::cout << "merged " << inputs.size() << " sketches into " << sketch_out << '\n';
    return kExitOk;
}

int run_inspect(const std::string& input, const std::string& out) {
    const auto sketch = load_sketch(input);
    const auto& config = sketch.config();
    const auto kv = sketch.kth_values();
    std::uint32_t full = 0;
    for (std::uint32_t i = 0; i < config.m; ++i) {
        if (sketch.bucket(i).size() == config.k) ++full;
    }
    const auto est = kmv::xi_hat(kv, config.k, config.m);

    if (out == "json") {
        json doc{{"command", "inspect"},
                 {"k", config.k},
                 {"m", config.m},
                 {"seed", config.seed},
                 {"hash_algorithm_id", kmv::kHashAlgorithmId},
                 {"stored_values", sketch.stored_values()},
                 {"full_buckets", full},
                 {"sum_s", kv.sum_s},
                 {"estimate_xi_hat", est.value}};
        std::cout << doc.dump(2) << '\n';
    } else {
        std::cout << "k: " << config.k << "\nm: " << config.m << "\nseed: " << config.seed
                  << "\nhash_algorithm_id: " << int(kmv::kHashAlgorithmId)
                  << "\nstored_values: " << sketch.stored_values()
                  << "\nfull_buckets: " << full << '/' << config.m
                  << "\nsum_s: " << format_double(kv.sum_s)
                  << "\nestimate xi-hat: " << format_double(est.value) << '\n';
    }
    return kExitOk;
}

struct SimulateOptions {
    std::string model = "independent";
    double theta = 0.0;
    std::uint32_t k = 8;
    std::uint32_t m = 128;
    std::uint64_t trials = 1000;
    std::uint64_t rng_seed = 0;
    std::string estimator = "xi-hat";
    std::string checks;
    std::string out = "text";
    bool coverage = false;
    bool ks = false;
};

struct CheckResult {
    std::string name;
    bool pass;
    double observed;
    double limit;
    std::string detail;
};

std::vector<std::string> split_csv_list(const std::string& text) {
    std::vector<std::string> items;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto item = text.substr(start, comma == std::string::npos ? comma : comma - start);
        if (!item.empty()) items.push_back(item);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return items;
}

int run_simulate(const SimulateOptions& opt) {
    if (!(opt.theta >= 1.0) || opt.theta != std::floor(opt.theta)) {
        throw std::runtime_error("--theta must be a positive integer");
    }
    const auto theta = static_cast<std::uint64_t>(opt.theta);
    const auto model = opt.model == "exact" ? kmv::Model::kExact : kmv::Model::kIndependent;
    kmv::ModelSpec spec{model, theta, opt.k, opt.m, opt.trials, opt.rng_seed};
    spec.validate();

    const auto requested = split_csv_list(opt.checks);
    for (const auto& name : requested) {
        if (name != "mean" && name != "variance") {
            throw std::runtime_error("unknown check '" + name + "' (expected mean, variance)");
        }
    }

    const bool run_estimator = !(opt.coverage || opt.ks) || !requested.empty();
    std::vector<CheckResult> checks;
    json doc{{"command", "simulate"}, {"model", opt.model},   {"theta", theta},
             {"k", opt.k},            {"m", opt.m},           {"trials", opt.trials},
             {"rng_seed", opt.rng_seed}};
    std::vector<std::string> text_lines;
    std::vector<std::string> csv_lines;

    if (run_estimator) {
        const auto stats = model == kmv::Model::kExact ? kmv::run_exact(spec, opt.estimator)
                                                       : kmv::run_independent(spec, opt.estimator);
        const double theta_real = static_cast<double>(theta);
        const double km = static_cast<double>(opt.k) * opt.m;
        const double rel_bias = (stats.sample_mean - theta_real) / theta_real;
        const double rel_var_ratio = stats.sample_variance * (km - 2.0) / (theta_real * theta_real);

        doc["estimator"] = stats.estimator_id;
        doc["stats"] = {{"mean", stats.sample_mean},
                        {"variance", stats.sample_variance},
                        {"se", stats.standard_error},
                        {"rel_bias", rel_bias},
                        {"rel_var_ratio", rel_var_ratio}};
        csv_lines.push_back(kmv::trial_stats_csv_header());
        csv_lines.push_back(
            kmv::trial_stats_csv_row(opt.model, stats, opt.k, opt.m, opt.rng_seed));
        text_lines.push_back("model: " + opt.model);
        text_lines.push_back("estimator: " + stats.estimator_id);
        text_lines.push_back("mean: " + format_double(stats.sample_mean));
        text_lines.push_back("variance: " + format_double(stats.sample_variance));
        text_lines.push_back("se: " + format_double(stats.standard_error));
        text_lines.push_back("rel_bias: " + format_double(rel_bias));
        text_lines.push_back("rel_var_ratio: " + format_double(rel_var_ratio));

        for (const auto& name : requested) {
            if (name == "mean") {
                const double observed = std::abs(stats.sample_mean - theta_real);
                const double limit = 3.0 * stats.standard_error;
                checks.push_back({"mean", observed <= limit, observed, limit,
                                  "|mean - theta| vs 3*se"});
            } else {
                // exact-model trials get the wider asymptotic band
                const double tolerance = model == kmv::Model::kExact ? 0.2 : 0.1;
                const bool pass = rel_var_ratio >= 1.0 - tolerance &&
                                  rel_var_ratio <= 1.0 + tolerance;
                checks.push_back({"variance", pass, rel_var_ratio, tolerance,
                                  "variance*(km-2)/theta^2 vs 1 +- tol"});
            }
        }
    }

    if (opt.coverage) {
        if (model != kmv::Model::kExact) {
            throw std::runtime_error("--coverage requires --model exact");
        }
        const auto report = kmv::coverage_probability(spec);
        const double slack = 3.0 * std::sqrt(0.25 / static_cast<double>(opt.trials));
        checks.push_back({"coverage", report.empirical_p >= report.bound - slack,
                          report.empirical_p, report.bound - slack,
                          "empirical_p vs bound - 3*sqrt(0.25/trials)"});
        doc["coverage"] = {{"empirical_p", report.empirical_p},
                           {"bound", report.bound},
                           {"trials", report.trials}};
        text_lines.push_back("coverage empirical_p: " + format_double(report.empirical_p));
        text_lines.push_back("coverage bound: " + format_double(report.bound));
        csv_lines.push_back("model,check,theta,k,m,trials,empirical_p,bound,seed");
        csv_lines.push_back(opt.model + ",coverage," + std::to_string(theta) + ',' +
                            std::to_string(opt.k) + ',' + std::to_string(opt.m) + ',' +
                            std::to_string(opt.trials) + ',' +
                            format_double(report.empirical_p) + ',' +
                            format_double(report.bound) + ',' + std::to_string(opt.rng_seed));
    }

    if (opt.ks) {
        if (model != kmv::Model::kExact) {
            throw std::runtime_error("--ks requires --model exact");
        }
        const double d = kmv::limit_law_ks(theta, opt.k, opt.m, opt.trials, opt.rng_seed);
        const double n = static_cast<double>(opt.trials) * opt.m;
        const double critical = 1.63 / std::sqrt(n);
        checks.push_back({"ks", d <= critical, d, critical, "pooled KS vs 1% critical value"});
        doc["ks"] = {{"statistic", d}, {"critical_1pct", critical}, {"pooled_n", n}};
        text_lines.push_back("ks statistic: " + format_double(d));
        text_lines.push_back("ks critical (1%): " + format_double(critical));
        csv_lines.push_back("model,check,theta,k,m,trials,statistic,critical,seed");
        csv_lines.push_back(opt.model + ",ks," + std::to_string(theta) + ',' +
                            std::to_string(opt.k) + ',' + std::to_string(opt.m) + ',' +
                            std::to_string(opt.trials) + ',' + format_double(d) + ',' +
                            format_double(critical) + ',' + std::to_string(opt.rng_seed));
    }

    bool all_pass = true;
    json check_json = json::array();
    for (const auto& c : checks) {
        all_pass = all_pass && c.pass;
        check_json.push_back({{"name", c.name},
                              {"pass", c.pass},
                              {"observed", c.observed},
                              {"limit", c.limit},
                              {"detail", c.detail}});
        text_lines.push_back("check " + c.name + ": " + (c.pass ? "PASS" : "FAIL") +
                             " (observed " + format_double(c.observed) + ", limit " +
                             format_double(c.limit) + ")");
    }
    doc["checks"] = check_json;
    doc["pass"] = all_pass;

    if (opt.out == "json") {
        std::cout << doc.dump(2) << '\n';
    } else if (opt.out == "csv") {
        for (const auto& line : csv_lines) std::cout << line << '\n';
    } else {
        for (const auto& line : text_lines) std::cout << line << '\n';
    }
    return all_pass ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Streaming distinct-element counting with a bucketed k-minimum-values sketch"};
    app.require_subcommand(1);

    CountOptions count_opt;
    auto* count = app.add_subcommand("count", "Estimate the number of distinct tokens in inputs");
    count->add_option("inputs", count_opt.inputs, "Input files (standard input when omitted)");
    auto* k_opt = count->add_option("--k", count_opt.k, "Minima kept per bucket");
    auto* m_opt = count->add_option("--m", count_opt.m, "Number of buckets");
    auto* seed_opt = count->add_option("--seed", count_opt.seed, "Word-hash seed");
    count->add_option("--estimator", count_opt.estimator,
                      "Estimator id: xi-hat, xi3, or moment:ALPHA");
    count->add_option("--tokens", count_opt.tokens, "Tokenization mode")
        ->check(CLI::IsMember({"line", "word"}));
    count->add_option("--out", count_opt.out, "Output format")
        ->check(CLI::IsMember({"text", "json", "csv"}));
    count->add_option("--sketch-in", count_opt.sketch_in, "Resume from a sketch file");
    count->add_option("--sketch-out", count_opt.sketch_out, "Write the final sketch here");
    count->add_flag("--all", count_opt.all_estimators, "Print every built-in estimator");

    std::vector<std::string> merge_inputs;
    std::string merge_out;
    auto* merge_cmd = app.add_subcommand("merge", "Merge sketches built with one config");
    merge_cmd->add_option("inputs", merge_inputs, "Sketch files")->expected(2, -1)->required();
    merge_cmd->add_option("--sketch-out", merge_out, "Merged sketch path")->required();

    std::string inspect_input, inspect_out = "text";
    auto* inspect_cmd = app.add_subcommand("inspect", "Describe a sketch file");
    inspect_cmd->add_option("input", inspect_input, "Sketch file")->required();
    inspect_cmd->add_option("--out", inspect_out, "Output format")
        ->check(CLI::IsMember({"text", "json"}));

    SimulateOptions sim_opt;
    auto* simulate_cmd =
        app.add_subcommand("simulate", "Monte-Carlo experiments on the estimators");
    simulate_cmd->add_option("--model", sim_opt.model, "Trial model")
        ->check(CLI::IsMember({"independent", "exact"}));
    simulate_cmd->add_option("--theta", sim_opt.theta, "True cardinality")->required();
    simulate_cmd->add_option("--k", sim_opt.k, "Minima kept per bucket");
    simulate_cmd->add_option("--m", sim_opt.m, "Number of buckets");
    simulate_cmd->add_option("--trials", sim_opt.trials, "Monte-Carlo trials");
    simulate_cmd->add_option("--rng-seed", sim_opt.rng_seed, "Simulation RNG seed");
    simulate_cmd->add_option("--estimator", sim_opt.estimator, "Estimator id");
    simulate_cmd->add_option("--check", sim_opt.checks,
                             "Comma-separated acceptance checks: mean,variance");
    simulate_cmd->add_option("--out", sim_opt.out, "Output format")
        ->check(CLI::IsMember({"text", "json", "csv"}));
    simulate_cmd->add_flag("--coverage", sim_opt.coverage,
                           "Measure the all-buckets-covered probability (exact model)");
    simulate_cmd->add_flag("--ks", sim_opt.ks,
                           "KS statistic of scaled k-th minima against Gamma(k,1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        count_opt.k_set = k_opt->count() > 0;
        count_opt.m_set = m_opt->count() > 0;
        count_opt.seed_set = seed_opt->count() > 0;
        if (count->parsed()) return run_count(count_opt);
        if (merge_cmd->parsed()) return run_merge(merge_inputs, merge_out);
        if (inspect_cmd->parsed()) return run_inspect(inspect_input, inspect_out);
        if (simulate_cmd->parsed()) return run_simulate(sim_opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
