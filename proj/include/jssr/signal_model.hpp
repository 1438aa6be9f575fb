// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "jssr/complex_matrix.hpp"
#include "jssr/rng.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace jssr {

/// Group activity model: N devices in G equal groups; odd groups (1-based)
/// are active with probability p1, even groups with p2.
struct GroupSparsityConfig {
    Index N = 0;
    Index G = 0;
    double p1 = 0.0;
    double p2 = 0.0;

    void validate() const;
    Index group_size() const { return N / G; }
    Index odd_groups() const { return (G + 1) / 2; }
    Index even_groups() const { return G / 2; }
    /// Mean activity probability (G1 p1 + G2 p2) / G.
    double mean_activity() const;

    /// Solve for (p1, p2) from the mean p and the ratio p1/p2.
    static GroupSparsityConfig from_mean(Index N, Index G, double p, double p1_over_p2);
};

struct ActivityVector {
    std::vector<std::uint8_t> values;

    ActivityVector() = default;
    explicit ActivityVector(Index n) : values(static_cast<std::size_t>(n), 0) {}
    ActivityVector(std::initializer_list<std::uint8_t> v) : values(v) {}

    Index size() const { return static_cast<Index>(values.size()); }
    std::uint8_t operator[](Index n) const { return values[static_cast<std::size_t>(n)]; }
    std::uint8_t& operator[](Index n) { return values[static_cast<std::size_t>(n)]; }
    Index count_active() const;

    friend bool operator==(const ActivityVector&, const ActivityVector&) = default;
};

struct JointSignal {
    ComplexMatrix X;          // N x M
    ActivityVector activity;  // length N
};

struct MeasurementBatch {
    ComplexMatrix Y;  // L x M
    double sigma2 = 0.0;
};

/// One Bernoulli draw per group; every device in the group inherits it.
ActivityVector sample_activity(const GroupSparsityConfig& cfg, Rng& rng);

/// N x M matrix of standard complex Gaussians (re, im each N(0, 1/2)).
ComplexMatrix sample_channels(Index N, Index M, Rng& rng);

/// L x M complex noise with re, im each N(0, sigma2/2).
ComplexMatrix sample_noise(Index L, Index M, double sigma2, Rng& rng);

/// X(n, m) = alpha(n) H(n, m).
JointSignal build_signal(const ActivityVector& activity, const ComplexMatrix& H);

/// Noiseless part AX plus a supplied noise matrix. Shared by measure() and the
/// encoder so both produce bit-identical outputs.
ComplexMatrix apply_sensing(const ComplexMatrix& A, const ComplexMatrix& X, const ComplexMatrix& Z);

/// Y = AX + Z with freshly drawn noise.
MeasurementBatch measure(const ComplexMatrix& A, const ComplexMatrix& X, double sigma2, Rng& rng);

/// Number of samples a generator materializes at once.
inline constexpr Index kDefaultChunk = 1024;

/// Deterministic sample i of the dataset keyed by seed. Activity and channels
/// come from per-sample streams so any subset can be regenerated in isolation.
JointSignal generate_sample(const GroupSparsityConfig& cfg, Index M, std::uint64_t seed, Index index);

/// Measurement noise for test sample i; identical for every scheme with the
/// same L, which keeps cross-scheme comparisons on identical inputs.
ComplexMatrix sample_noise_for(Index L, Index M, double sigma2, std::uint64_t seed, Index index);

struct Dataset {
    GroupSparsityConfig cfg;
    Index M = 0;
    std::uint64_t seed = 0;
    std::vector<JointSignal> samples;

    Index size() const { return static_cast<Index>(samples.size()); }
    Index N() const { return cfg.N; }
};

/// Calls `sink(first_index, chunk)` for consecutive chunks of at most
/// `chunk` samples. Samples within a chunk are generated in parallel.
void generate_chunks(const GroupSparsityConfig& cfg, Index M, Index count, std::uint64_t seed, Index chunk,
                     const std::function<void(Index, std::vector<JointSignal>&)>& sink);

Dataset generate_dataset(const GroupSparsityConfig& cfg, Index M, Index count, std::uint64_t seed,
                         Index chunk = kDefaultChunk);

} // namespace jssr
