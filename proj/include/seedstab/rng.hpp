#pragma once

#include <cstdint>
#include <string_view>

namespace seedstab {

/// SplitMix64 stream. All randomness in the library is drawn from one of
/// these so that results are bit-exact across platforms and languages.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1) with 53 bits of resolution.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n); n must be positive.
    std::uint64_t below(std::uint64_t n) noexcept;

    // Standard normal via Box-Muller (cosine branch only; two uniforms per draw).
    double normal() noexcept;

private:
    std::uint64_t state_;
};

/// One splitmix64 step applied to master ^ stream_tag.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_tag) noexcept;

/// FNV-1a 64-bit over the raw bytes.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

} // namespace seedstab
