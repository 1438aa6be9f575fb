// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

namespace jssr {

/// Stream domains. Each (seed, domain, index) triple names an independent
/// generator, so sample i of a dataset draws the same numbers regardless of
/// chunking or thread count.
enum class StreamDomain : std::uint64_t {
    Activity = 1,
    Channel = 2,
    Noise = 3,
    Pilots = 4,
    EncoderInit = 5,
    DecoderInit = 6,
    Shuffle = 7,
    TrainNoise = 8,
    Reinit = 9,
    Split = 10,
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Derive a child seed; used to split one user seed into train/val/test seeds.
constexpr std::uint64_t derive_seed(std::uint64_t seed, StreamDomain domain, std::uint64_t index) {
    return mix64(mix64(seed ^ mix64(static_cast<std::uint64_t>(domain))) + index);
}

/// Seeded 64-bit generator (mt19937_64 keyed by a SplitMix64-derived seed).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}
    Rng(std::uint64_t seed, StreamDomain domain, std::uint64_t index)
        : engine_(derive_seed(seed, domain, index)) {}

    double normal(double stddev = 1.0) { return stddev * normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    bool bernoulli(double p) { return uniform() < p; }
    std::uint64_t next_u64() { return engine_(); }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

} // namespace jssr
