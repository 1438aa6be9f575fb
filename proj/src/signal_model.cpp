// SPDX-License-Identifier: Apache-2.0
#include "jssr/signal_model.hpp"

#include "jssr/error.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace jssr {

void GroupSparsityConfig::validate() const {
    if (N < 1) throw ConfigError("N must be positive");
    if (G < 1) throw ConfigError("G must be positive");
    if (N % G != 0) {
        throw ConfigError("G = " + std::to_string(G) + " does not divide N = " + std::to_string(N));
    }
    auto probability = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!probability(p1) || !probability(p2)) throw ConfigError("p1 and p2 must lie in [0, 1]");
}

double GroupSparsityConfig::mean_activity() const {
    return (static_cast<double>(odd_groups()) * p1 + static_cast<double>(even_groups()) * p2) /
           static_cast<double>(G);
}

GroupSparsityConfig GroupSparsityConfig::from_mean(Index N, Index G, double p, double p1_over_p2) {
    if (!(p1_over_p2 > 0.0)) throw ConfigError("p1/p2 must be positive");
    GroupSparsityConfig cfg{N, G, 0.0, 0.0};
    if (G < 1) throw ConfigError("G must be positive");
    const double g1 = static_cast<double>(cfg.odd_groups());
    const double g2 = static_cast<double>(cfg.even_groups());
    cfg.p2 = p * static_cast<double>(G) / (g1 * p1_over_p2 + g2);
    cfg.p1 = p1_over_p2 * cfg.p2;
    cfg.validate();
    return cfg;
}

Index ActivityVector::count_active() const {
    return std::count(values.begin(), values.end(), std::uint8_t{1});
}

ActivityVector sample_activity(const GroupSparsityConfig& cfg, Rng& rng) {
    cfg.validate();
    ActivityVector alpha(cfg.N);
    const Index size = cfg.group_size();
    for (Index j = 0; j < cfg.G; ++j) {
        // Groups are numbered from 1: index j here is group j + 1.
        const double p = (j % 2 == 0) ? cfg.p1 : cfg.p2;
        const std::uint8_t xi = rng.bernoulli(p) ? 1 : 0;
        std::fill_n(alpha.values.begin() + j * size, size, xi);
    }
    return alpha;
}

ComplexMatrix sample_channels(Index N, Index M, Rng& rng) {
    if (N < 1 || M < 1) throw ConfigError("sample_channels: N and M must be positive");
    const double sd = std::sqrt(0.5);
    ComplexMatrix H(N, M);
    for (Index m = 0; m < M; ++m) {
        for (Index n = 0; n < N; ++n) {
            H.re(n, m) = rng.normal(sd);
            H.im(n, m) = rng.normal(sd);
        }
    }
    return H;
}

ComplexMatrix sample_noise(Index L, Index M, double sigma2, Rng& rng) {
    if (sigma2 < 0.0) throw ConfigError("noise variance must be non-negative");
    ComplexMatrix Z(L, M);
    if (sigma2 == 0.0) return Z;
    const double sd = std::sqrt(sigma2 / 2.0);
    for (Index m = 0; m < M; ++m) {
        for (Index l = 0; l < L; ++l) {
            Z.re(l, m) = rng.normal(sd);
            Z.im(l, m) = rng.normal(sd);
        }
    }
    return Z;
}

JointSignal build_signal(const ActivityVector& activity, const ComplexMatrix& H) {
    if (activity.size() != H.rows()) {
        throw DimensionError("build_signal: activity length " + std::to_string(activity.size()) +
                             " vs channel rows " + std::to_string(H.rows()));
    }
    JointSignal s{H, activity};
    for (Index n = 0; n < H.rows(); ++n) {
        if (activity[n] == 0) {
            s.X.re.row(n).setZero();
            s.X.im.row(n).setZero();
        }
    }
    return s;
}

ComplexMatrix apply_sensing(const ComplexMatrix& A, const ComplexMatrix& X, const ComplexMatrix& Z) {
    if (A.cols() != X.rows()) {
        throw DimensionError("A has " + std::to_string(A.cols()) + " columns but X has " +
                             std::to_string(X.rows()) + " rows");
    }
    if (Z.rows() != A.rows() || Z.cols() != X.cols()) throw DimensionError("noise shape does not match AX");
    return multiply_add(A, X, Z);
}

MeasurementBatch measure(const ComplexMatrix& A, const ComplexMatrix& X, double sigma2, Rng& rng) {
    if (sigma2 < 0.0) throw ConfigError("measure: negative noise variance");
    if (A.cols() != X.rows()) throw DimensionError("measure: A and X do not conform");
    const ComplexMatrix Z = sample_noise(A.rows(), X.cols(), sigma2, rng);
    return {apply_sensing(A, X, Z), sigma2};
}

JointSignal generate_sample(const GroupSparsityConfig& cfg, Index M, std::uint64_t seed, Index index) {
    const auto i = static_cast<std::uint64_t>(index);
    Rng activity_rng(seed, StreamDomain::Activity, i);
    Rng channel_rng(seed, StreamDomain::Channel, i);
    const ActivityVector alpha = sample_activity(cfg, activity_rng);
    return build_signal(alpha, sample_channels(cfg.N, M, channel_rng));
}

ComplexMatrix sample_noise_for(Index L, Index M, double sigma2, std::uint64_t seed, Index index) {
    Rng rng(seed, StreamDomain::Noise, static_cast<std::uint64_t>(index));
    return sample_noise(L, M, sigma2, rng);
}

void generate_chunks(const GroupSparsityConfig& cfg, Index M, Index count, std::uint64_t seed, Index chunk,
                     const std::function<void(Index, std::vector<JointSignal>&)>& sink) {
    cfg.validate();
    if (count < 1) throw ConfigError("dataset count must be at least 1");
    if (M < 1) throw ConfigError("M must be positive");
    if (chunk < 1) throw ConfigError("chunk size must be positive");
    std::vector<JointSignal> buffer;
    for (Index first = 0; first < count; first += chunk) {
        const Index n = std::min(chunk, count - first);
        buffer.assign(static_cast<std::size_t>(n), JointSignal{});
#pragma omp parallel for schedule(static)
        for (Index k = 0; k < n; ++k) {
            buffer[static_cast<std::size_t>(k)] = generate_sample(cfg, M, seed, first + k);
        }
        sink(first, buffer);
    }
}

Dataset generate_dataset(const GroupSparsityConfig& cfg, Index M, Index count, std::uint64_t seed, Index chunk) {
    Dataset ds{cfg, M, seed, {}};
    if (count > 0) ds.samples.reserve(static_cast<std::size_t>(count));
    generate_chunks(cfg, M, count, seed, chunk, [&](Index, std::vector<JointSignal>& part) {
        std::move(part.begin(), part.end(), std::back_inserter(ds.samples));
    });
    return ds;
}

} // namespace jssr
