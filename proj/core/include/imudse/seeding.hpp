#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace imudse {

// Stable, platform-independent seed derivation and random streams. The
// standard <random> distributions are implementation-defined, so everything
// that ends up in a results file draws from these instead.

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// FNV-1a over the bytes, finished with a splitmix64 round.
std::uint64_t stable_hash(std::string_view text) noexcept;

std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) noexcept;
std::uint64_t hash_combine(std::uint64_t seed, std::string_view text) noexcept;
std::uint64_t hash_combine(std::uint64_t seed, std::span<const int> values) noexcept;

/// SplitMix64 stream with the handful of draws the toolkit needs.
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next_u64() noexcept;
    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform() noexcept;
    /// Uniform integer in [0, bound) without modulo bias. bound must be > 0.
    std::uint64_t bounded(std::uint64_t bound) noexcept;
    /// Standard normal via Box-Muller (one value per call, no caching).
    double normal() noexcept;

private:
    std::uint64_t state_;
};

} // namespace imudse
