#pragma once

#include <cstdint>
#include <random>

namespace lerw {

using Rng = std::mt19937_64;

// Recorded in every run manifest.
inline constexpr const char* kRngAlgorithm = "mt19937_64 seeded by std::seed_seq(seed, replica)";
inline constexpr int kRngVersion = 1;

// Split-stream construction: each (seed, replica) pair seeds its own
// generator through seed_seq, whose output is fixed by the standard.
inline Rng rng_stream(std::uint64_t seed, std::uint64_t replica) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(replica), static_cast<std::uint32_t>(replica >> 32),
                      0x4c455257u};
    return Rng(seq);
}

// Uniform in [0, 1) with 53 random bits; independent of the library's
// distribution implementations.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Standard normal by Box-Muller (polar form avoided to keep draw counts fixed).
double standard_normal(Rng& rng);

}  // namespace lerw
