#pragma once

#include <cstdint>

namespace sglc {

/// Deterministic pseudo-random generator used everywhere reproducibility
/// across platforms and toolchains matters (weight init, noise fields,
/// corruption placement, test data).
///
/// Algorithm: SplitMix64. state advances by the 64-bit golden-ratio
/// constant 0x9E3779B97F4A7C15; each output is the advanced state mixed by
///   z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
///   z ^= z >> 27; z *= 0x94D049BB133111EB;
///   z ^= z >> 31;
/// Doubles are (z >> 11) * 2^-53 in [0,1). Bounded integers use the
/// multiply-shift reduction high64(z * bound). These mappings are part of
/// the contract: two builds given the same seed produce identical streams.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform float in [lo, hi).
    float next_float(float lo, float hi) {
        return lo + static_cast<float>(next_double()) * (hi - lo);
    }

    /// Uniform integer in [0, bound). bound must be nonzero.
    std::uint32_t next_below(std::uint32_t bound) {
        return static_cast<std::uint32_t>(
            (static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

private:
    std::uint64_t state_;
};

/// Stateless mix of two 64-bit values (SplitMix64 finalizer applied to
/// a ^ rotated b). Used to derive lattice-point hashes from (seed, coords).
inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2));
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace sglc
