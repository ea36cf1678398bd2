#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace kmv {

// Identifies the word-hash algorithm stored in sketch file headers. Sketches
// produced with different algorithms must never be merged, so the id is part
// of the persistent format.
inline constexpr std::uint8_t kHashAlgorithmId = 1;  // murmur2-64a

// 64-bit MurmurHash2, variant A. Input bytes are consumed little-endian via
// explicit byte assembly, so the value is identical on any host.
inline std::uint64_t murmur2_64a(std::string_view data, std::uint64_t seed) noexcept {
    constexpr std::uint64_t kMul = 0xc6a4a7935bd1e995ULL;
    constexpr int kShift = 47;

    const auto* p = reinterpret_cast<const unsigned char*>(data.data());
    std::size_t len = data.size();
    std::uint64_t h = seed ^ (static_cast<std::uint64_t>(len) * kMul);

    for (; len >= 8; p += 8, len -= 8) {
        std::uint64_t k = static_cast<std::uint64_t>(p[0]) |
                          static_cast<std::uint64_t>(p[1]) << 8 |
                          static_cast<std::uint64_t>(p[2]) << 16 |
                          static_cast<std::uint64_t>(p[3]) << 24 |
                          static_cast<std::uint64_t>(p[4]) << 32 |
                          static_cast<std::uint64_t>(p[5]) << 40 |
                          static_cast<std::uint64_t>(p[6]) << 48 |
                          static_cast<std::uint64_t>(p[7]) << 56;
        k *= kMul;
        k ^= k >> kShift;
        k *= kMul;
        h ^= k;
        h *= kMul;
    }

    switch (len) {
        case 7: h ^= static_cast<std::uint64_t>(p[6]) << 48; [[fallthrough]];
        case 6: h ^= static_cast<std::uint64_t>(p[5]) << 40; [[fallthrough]];
        case 5: h ^= static_cast<std::uint64_t>(p[4]) << 32; [[fallthrough]];
        case 4: h ^= static_cast<std::uint64_t>(p[3]) << 24; [[fallthrough]];
        case 3: h ^= static_cast<std::uint64_t>(p[2]) << 16; [[fallthrough]];
        case 2: h ^= static_cast<std::uint64_t>(p[1]) << 8;  [[fallthrough]];
        case 1: h ^= static_cast<std::uint64_t>(p[0]);
                h *= kMul;
                break;
        default: break;
    }

    h ^= h >> kShift;
    h *= kMul;
    h ^= h >> kShift;
    return h;
}

// Seeded map from byte-string words to the unit interval. A word's image is
// the correctly rounded value of (h + 1) / 2^64, where h is the word's 64-bit
// hash, so outputs lie in (0, 1]. Exact zero is excluded on purpose: the
// estimators downstream divide by and take logarithms of these values.
class UnitHash {
public:
    constexpr explicit UnitHash(std::uint64_t seed) noexcept : seed_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t raw(std::string_view word) const noexcept {
        return murmur2_64a(word, seed_);
    }

    // (h + 1) / 2^64 rounded once to double precision.
    static double unit_from_raw(std::uint64_t h) noexcept {
        const std::uint64_t shifted = h + 1;  // wraps to 0 only for h == 2^64 - 1
        if (shifted == 0) return 1.0;
        return static_cast<double>(shifted) * 0x1.0p-64;
    }

    double operator()(std::string_view word) const noexcept {
        return unit_from_raw(raw(word));
    }

private:
    std::uint64_t seed_;
};

}  // namespace kmv
