#include "kmv/sketch.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <string>

namespace kmv {

namespace {

constexpr char kMagic[4] = {'K', 'M', 'V', 'C'};
constexpr std::uint8_t kFormatVersion = 1;

void append_u8(std::vector<std::uint8_t>& out, std::uint8_t v) { out.push_back(v); }

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void append_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void append_f64(std::vector<std::uint8_t>& out, double v) {
    append_u64(out, std::bit_cast<std::uint64_t>(v));
}

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint8_t u8() { return take(1)[0]; }

    std::uint32_t u32() {
        const auto b = take(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
        return v;
    }

    std::uint64_t u64() {
        const auto b = take(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
        return v;
    }

    double f64() { return std::bit_cast<double>(u64()); }

    bool exhausted() const { return offset_ == bytes_.size(); }

private:
    std::span<const std::uint8_t> take(std::size_t n) {
        if (bytes_.size() - offset_ < n) {
            throw SketchFormatError("sketch payload truncated");
        }
        const auto view = bytes_.subspan(offset_, n);
        offset_ += n;
        return view;
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t offset_ = 0;
};

}  // namespace

KthValues Sketch::kth_values() const {
    KthValues out;
    out.values.reserve(config_.m);
    const double sentinel = 1.0 / m_real_;  // deficient bucket: full bucket width
    double sum = 0.0;
    for (std::uint32_t i = 0; i < config_.m; ++i) {
        double entry = sentinel;
        const auto& bucket = buckets_[i];
        if (bucket.size() == config_.k) {
            // bucket_index guarantees m*x lies in (i, i+1], so the numerator
            // is exact and positive; dividing by m keeps it in (0, 1/m].
            entry = (m_real_ * bucket.back() - static_cast<double>(i)) / m_real_;
        }
        out.values.push_back(entry);
        sum += entry;
    }
    out.sum_s = sum;
    return out;
}

std::uint64_t Sketch::stored_values() const noexcept {
    std::uint64_t total = 0;
    for (const auto& bucket : buckets_) total += bucket.size();
    return total;
}

std::vector<std::uint8_t> Sketch::serialize() const {
    std::vector<std::uint8_t> out;
    out.reserve(22 + buckets_.size() * (4 + 8 * config_.k));
    out.insert(out.end(), kMagic, kMagic + 4);
    append_u8(out, kFormatVersion);
    append_u8(out, kHashAlgorithmId);
    append_u32(out, config_.k);
    append_u32(out, config_.m);
    append_u64(out, config_.seed);
    for (const auto& bucket : buckets_) {
        append_u32(out, static_cast<std::uint32_t>(bucket.size()));
        for (double v : bucket) append_f64(out, v);
    }
    return out;
}

Sketch Sketch::deserialize(std::span<const std::uint8_t> bytes) {
    Reader in(bytes);
    char magic[4];
    for (char& c : magic) c = static_cast<char>(in.u8());
    if (std::memcmp(magic, kMagic, 4) != 0) {
        throw SketchFormatError("bad magic, not a sketch file");
    }
    if (const auto version = in.u8(); version != kFormatVersion) {
        throw SketchFormatError("unsupported sketch format version " + std::to_string(version));
    }
    if (const auto hash_id = in.u8(); hash_id != kHashAlgorithmId) {
        throw SketchFormatError("unsupported hash algorithm id " + std::to_string(hash_id));
    }

    SketchConfig config;
    config.k = in.u32();
    config.m = in.u32();
    config.seed = in.u64();
    try {
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw SketchFormatError(e.what());
    }

    Sketch sketch(config);
    for (std::uint32_t i = 0; i < config.m; ++i) {
        const std::uint32_t count = in.u32();
        if (count > config.k) {
            throw SketchFormatError("bucket holds more than k values");
        }
        auto& bucket = sketch.buckets_[i];
        bucket.reserve(count);
        double prev = 0.0;
        for (std::uint32_t j = 0; j < count; ++j) {
            const double v = in.f64();
            if (!(v > 0.0) || !(v <= 1.0)) {
                throw SketchFormatError("stored value outside (0, 1]");
            }
            if (j > 0 && !(v > prev)) {
                throw SketchFormatError("bucket values not strictly ascending");
            }
            if (sketch.bucket_index(v) != i) {
                throw SketchFormatError("stored value outside its bucket's interval");
            }
            bucket.push_back(v);
            prev = v;
        }
    }
    if (!in.exhausted()) {
        throw SketchFormatError("trailing bytes after sketch payload");
    }
    return sketch;
}

Sketch merge(const Sketch& a, const Sketch& b) {
    if (a.config_ != b.config_) {
        throw std::invalid_argument("merge: sketch configs differ (k, m, or seed)");
    }
    Sketch out = a;
    for (std::uint32_t i = 0; i < out.config_.m; ++i) {
        const auto& extra = b.buckets_[i];
        if (extra.empty()) continue;
        auto& bucket = out.buckets_[i];
        std::vector<double> merged;
        merged.reserve(bucket.size() + extra.size());
        std::merge(bucket.begin(), bucket.end(), extra.begin(), extra.end(),
                   std::back_inserter(merged));
        merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
        if (merged.size() > out.config_.k) merged.resize(out.config_.k);
        bucket = std::move(merged);
    }
    out.items_seen_ += b.items_seen_;
    return out;
}

}  // namespace kmv
