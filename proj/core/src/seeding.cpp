#include "imudse/seeding.hpp"

#include <cmath>
#include <numbers>

namespace imudse {

std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t stable_hash(std::string_view text) noexcept
{
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return splitmix64(h);
}

std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) noexcept
{
    return splitmix64(seed ^ (splitmix64(value) + 0x9E3779B97F4A7C15ULL + (seed << 6) + (seed >> 2)));
}

std::uint64_t hash_combine(std::uint64_t seed, std::string_view text) noexcept
{
    return hash_combine(seed, stable_hash(text));
}

std::uint64_t hash_combine(std::uint64_t seed, std::span<const int> values) noexcept
{
    std::uint64_t h = hash_combine(seed, static_cast<std::uint64_t>(values.size()));
    for (int v : values)
        h = hash_combine(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(v)));
    return h;
}

std::uint64_t Rng::next_u64() noexcept
{
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double Rng::uniform() noexcept
{
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::bounded(std::uint64_t bound) noexcept
{
    const std::uint64_t limit = -bound % bound; // 2^64 mod bound
    for (;;) {
        const std::uint64_t r = next_u64();
        if (r >= limit)
            return r % bound;
    }
}

double Rng::normal() noexcept
{
    double u1 = uniform();
    while (u1 <= 0.0)
        u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace imudse
