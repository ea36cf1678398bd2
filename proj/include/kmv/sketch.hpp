#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "kmv/unit_hash.hpp"

namespace kmv {

struct SketchFormatError : std::runtime_error {
    explicit SketchFormatError(const std::string& message) : std::runtime_error(message) {}
};

// k minima kept per bucket, m buckets, and the word-hash seed. Memory held by
// a sketch is exactly k * m stored values.
struct SketchConfig {
    std::uint32_t k = 8;
    std::uint32_t m = 128;
    std::uint64_t seed = 0;

    // k*m >= 3 keeps the xi-hat variance theta^2 / (km - 2) finite and positive.
    void validate() const {
        if (k == 0 || m == 0) {
            throw std::invalid_argument("SketchConfig: k and m must be positive");
        }
        if (static_cast<std::uint64_t>(k) * m < 3) {
            throw std::invalid_argument("SketchConfig: k*m must be at least 3");
        }
    }

    friend bool operator==(const SketchConfig&, const SketchConfig&) = default;
};

// The m bucket-relative k-th minima: entry i is the offset of bucket i's
// k-th smallest value above the bucket's left edge when the bucket holds k
// values, and the sentinel 1/m (the full bucket width) otherwise, so entries
// lie in (0, 1/m]. For theta distinct inserts each full-bucket entry is the
// k-th point of a rate-theta process, which is what the estimators' Gamma
// unbiasing constants assume. sum_s accumulates entries left to right so
// results are bit-reproducible.
struct KthValues {
    std::vector<double> values;
    double sum_s = 0.0;

    // For model-driven callers that synthesize the k-th minima directly
    // (values need not stay below 1 there, only positive).
    static KthValues from_values(std::vector<double> entries) {
        KthValues kv;
        double sum = 0.0;
        for (double v : entries) {
            if (!(v > 0.0) || !std::isfinite(v)) {
                throw std::invalid_argument("KthValues: entries must be positive and finite");
            }
            sum += v;
        }
        kv.values = std::move(entries);
        kv.sum_s = sum;
        return kv;
    }
};

// One-pass distinct-count sketch: each hashed word lands in one of m cells of
// the unit interval and the cell keeps its k smallest distinct values. Bucket
// i covers ((i-1)/m, i/m]; a value exactly on a cell boundary counts as the
// lower cell's right endpoint, which keeps the extracted k-th minima strictly
// above their bucket's left edge.
//
// Single writer; concurrent reads of a quiescent sketch are fine. Parallel
// ingestion goes through sharding plus merge().
class Sketch {
public:
    explicit Sketch(SketchConfig config)
        : config_(config),
          hash_(config.seed),
          m_real_(static_cast<double>(config.m)),
          buckets_(config.m) {
        config_.validate();
    }

    const SketchConfig& config() const noexcept { return config_; }
    std::uint64_t items_seen() const noexcept { return items_seen_; }

    std::uint32_t bucket_index(double x) const noexcept {
        return static_cast<std::uint32_t>(std::ceil(m_real_ * x)) - 1;
    }

    void insert(std::string_view word) { insert_value(hash_(word)); }

    // Direct insertion of an already-hashed value in (0, 1]. Used by the
    // simulation harness to drive the production update path without words.
    void insert_value(double x) {
        if (!(x > 0.0) || !(x <= 1.0)) {
            throw std::invalid_argument("Sketch::insert_value: value must be in (0, 1]");
        }
        ++items_seen_;
        auto& bucket = buckets_[bucket_index(x)];
        if (bucket.size() == config_.k && x >= bucket.back()) {
            return;  // not among the k smallest for this cell
        }
        const auto pos = std::lower_bound(bucket.begin(), bucket.end(), x);
        if (pos != bucket.end() && *pos == x) {
            return;  // repeated value; order statistics must not shift
        }
        bucket.insert(pos, x);
        if (bucket.size() > config_.k) bucket.pop_back();
    }

    KthValues kth_values() const;

    // Stored values of one bucket, ascending. Exposed for inspection and tests.
    std::span<const double> bucket(std::uint32_t index) const {
        return buckets_.at(index);
    }

    std::uint64_t stored_values() const noexcept;

    std::vector<std::uint8_t> serialize() const;
    static Sketch deserialize(std::span<const std::uint8_t> bytes);

    // Equality covers config and stored values; items_seen is a diagnostic
    // counter and deliberately excluded (it is not persisted either).
    friend bool operator==(const Sketch& a, const Sketch& b) {
        return a.config_ == b.config_ && a.buckets_ == b.buckets_;
    }

    friend Sketch merge(const Sketch& a, const Sketch& b);

private:
    SketchConfig config_;
    UnitHash hash_;
    double m_real_;
    std::vector<std::vector<double>> buckets_;
    std::uint64_t items_seen_ = 0;
};

// Union of two sketches over the same config: each result bucket holds the k
// smallest distinct values of the union of the inputs' buckets, so merging
// the sketches of two streams equals the sketch of their concatenation.
Sketch merge(const Sketch& a, const Sketch& b);

}  // namespace kmv
