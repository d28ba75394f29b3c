#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace shepherd {

/// splitmix64 finalizer; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x);

/// Seed for a named sub-stream of a master seed. Distinct names (and indices)
/// give statistically independent streams.
std::uint64_t derive_seed(std::uint64_t master, std::string_view name, std::uint64_t index = 0);

/// Counter-based uniform double in [0, 1) for a (seed, a, b) triple. Pure.
double hash_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

/// 64-bit FNV-1a of a byte string, as 16 lowercase hex digits.
std::string fnv_digest(std::string_view text);

/// A named deterministic random stream.
class RandomStream {
public:
    RandomStream() = default;
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform integer in [0, n).
    int uniform_index(int n);
    /// Uniform real in [0, 1).
    double uniform_real();

    friend bool operator==(const RandomStream&, const RandomStream&) = default;

private:
    std::mt19937_64 engine_{0};
};

}  // namespace shepherd
