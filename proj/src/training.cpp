// SPDX-License-Identifier: Apache-2.0
#include "jssr/training.hpp"

#include "jssr/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

namespace jssr {

void AdamConfig::validate() const {
    if (!(lr > 0.0)) throw ConfigError("learning rate must be positive");
    if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
        throw ConfigError("ADAM betas must lie in (0, 1)");
    }
    if (!(eps > 0.0)) throw ConfigError("ADAM epsilon must be positive");
}

void TrainConfig::validate() const {
    adam.validate();
    if (batch < 1) throw ConfigError("batch size must be positive");
    if (epochs < 1) throw ConfigError("epoch count must be positive");
    if (patience < 1) throw ConfigError("patience must be positive");
    if (sigma2 < 0.0) throw ConfigError("sigma2 must be non-negative");
}

void adam_step(std::span<const std::span<double>> params, std::span<const std::span<const double>> grads,
               AdamState& state, const AdamConfig& cfg) {
    if (params.size() != grads.size()) throw DimensionError("adam_step: tensor counts differ");
    if (state.first.empty()) {
        for (const auto& p : params) {
            state.first.emplace_back(p.size(), 0.0);
            state.second.emplace_back(p.size(), 0.0);
        }
    }
    if (state.first.size() != params.size()) throw DimensionError("adam_step: state does not match parameters");
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(cfg.beta1, t);
    const double c2 = 1.0 - std::pow(cfg.beta2, t);
    for (std::size_t k = 0; k < params.size(); ++k) {
        auto p = params[k];
        auto g = grads[k];
        auto& m = state.first[k];
        auto& v = state.second[k];
        if (g.size() != p.size() || m.size() != p.size()) throw DimensionError("adam_step: tensor size mismatch");
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            const double m_hat = m[i] / c1;
            const double v_hat = v[i] / c2;
            p[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
        }
    }
}

ComplexMatrix gather_signals(const Dataset& ds, std::span<const Index> indices) {
    const Index M = ds.M;
    ComplexMatrix X(ds.N(), static_cast<Index>(indices.size()) * M);
    for (std::size_t b = 0; b < indices.size(); ++b) {
        X.set_col_block(static_cast<Index>(b) * M, ds.samples[static_cast<std::size_t>(indices[b])].X);
    }
    return X;
}

Eigen::MatrixXd gather_activity(const Dataset& ds, std::span<const Index> indices) {
    Eigen::MatrixXd truth(ds.N(), static_cast<Index>(indices.size()));
    for (std::size_t b = 0; b < indices.size(); ++b) {
        const auto& alpha = ds.samples[static_cast<std::size_t>(indices[b])].activity;
        for (Index n = 0; n < ds.N(); ++n) truth(n, static_cast<Index>(b)) = alpha[n];
    }
    return truth;
}

ComplexMatrix measure_dataset(const ComplexMatrix& A, const Dataset& ds, double sigma2, Index first, Index count) {
    if (count < 0) count = ds.size() - first;
    if (first < 0 || first + count > ds.size()) throw DimensionError("measure_dataset: range out of bounds");
    if (A.cols() != ds.N()) throw DimensionError("measure_dataset: A does not match N");
    const Index M = ds.M;
    ComplexMatrix Y(A.rows(), count * M);
#pragma omp parallel for schedule(static)
    for (Index k = 0; k < count; ++k) {
        const Index i = first + k;
        const ComplexMatrix Z = sample_noise_for(A.rows(), M, sigma2, ds.seed, i);
        Y.set_col_block(k * M, apply_sensing(A, ds.samples[static_cast<std::size_t>(i)].X, Z));
    }
    return Y;
}

namespace {

constexpr Index kEvalChunk = 512;

} // namespace

Eigen::MatrixXd score_dataset(const ModelParams& params, const Dataset& ds, double sigma2, kernels::Backend backend) {
    const ComplexMatrix A = params.encoder.as_complex();
    Eigen::MatrixXd scores(ds.N(), ds.size());
    for (Index first = 0; first < ds.size(); first += kEvalChunk) {
        const Index n = std::min(kEvalChunk, ds.size() - first);
        const ComplexMatrix Y = measure_dataset(A, ds, sigma2, first, n);
        scores.middleCols(first, n) = infer_batch(params, Y, backend);
    }
    return scores;
}

double evaluate_loss(const ModelParams& params, const Dataset& ds, double sigma2, kernels::Backend backend) {
    const Eigen::MatrixXd scores = score_dataset(params, ds, sigma2, backend);
    std::vector<Index> all(static_cast<std::size_t>(ds.size()));
    std::iota(all.begin(), all.end(), Index{0});
    return bce_loss(gather_activity(ds, all), scores);
}

TrainResult train(const Dataset& train_set, const Dataset& val_set, const TrainConfig& cfg,
                  const DecoderConfig& arch, const EpochCallback& on_epoch) {
    cfg.validate();
    arch.validate();
    if (train_set.size() == 0 || val_set.size() == 0) throw ConfigError("train: datasets must be non-empty");
    if (train_set.N() != arch.N || val_set.N() != arch.N || train_set.M != arch.M || val_set.M != arch.M) {
        throw DimensionError("train: dataset dimensions do not match the architecture");
    }

    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();

    TrainResult result;
    ModelParams params = init_params(arch, cfg.sigma2, cfg.seed);
    result.initial_val_loss = evaluate_loss(params, val_set, cfg.sigma2, cfg.backend);
    result.best = params;
    double best_val = result.initial_val_loss;

    Rng shuffle_rng(cfg.seed, StreamDomain::Shuffle, 0);
    Rng reinit_rng(cfg.seed, StreamDomain::Reinit, 0);
    std::vector<Index> order(static_cast<std::size_t>(train_set.size()));
    std::iota(order.begin(), order.end(), Index{0});
    AdamState adam;
    std::uint64_t pass = 0;
    int stale = 0;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng.engine());
        double loss_sum = 0.0;
        for (std::size_t first = 0; first < order.size(); first += static_cast<std::size_t>(cfg.batch)) {
            const std::size_t n = std::min(static_cast<std::size_t>(cfg.batch), order.size() - first);
            const std::span<const Index> idx(order.data() + first, n);
            ComplexMatrix X = gather_signals(train_set, idx);
            ComplexMatrix Z;
            if (cfg.noise == NoisePolicy::FreshEachPass) {
                Rng noise_rng(cfg.seed, StreamDomain::TrainNoise, pass);
                Z = sample_noise(arch.L, X.cols(), cfg.sigma2, noise_rng);
            } else {
                Z = ComplexMatrix(arch.L, X.cols());
                for (std::size_t b = 0; b < n; ++b) {
                    Z.set_col_block(static_cast<Index>(b) * arch.M,
                                    sample_noise_for(arch.L, arch.M, cfg.sigma2, train_set.seed, idx[b]));
                }
            }
            ++pass;
            const Eigen::MatrixXd truth = gather_activity(train_set, idx);
            const BatchCache cache = forward_batch(params, std::move(X), Z, arch.M, cfg.backend);
            if (!cache.decoder.scores.allFinite()) {
                throw DivergenceError("non-finite decoder output at epoch " + std::to_string(epoch));
            }
            const double loss = bce_loss(truth, cache.decoder.scores);
            if (!std::isfinite(loss)) {
                throw DivergenceError("non-finite training loss at epoch " + std::to_string(epoch));
            }
            loss_sum += loss * static_cast<double>(n);
            const Gradients g = backward(params, cache, truth, cfg.backend);
            const auto p = tensors(params.encoder, params.decoder);
            const auto d = tensors(g.encoder, g.decoder);
            adam_step(p, d, adam, cfg.adam);
            project_columns(params.encoder, reinit_rng);
        }

        EpochLog entry;
        entry.epoch = epoch;
        entry.train_loss = loss_sum / static_cast<double>(train_set.size());
        entry.val_loss = evaluate_loss(params, val_set, cfg.sigma2, cfg.backend);
        entry.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
        if (!std::isfinite(entry.val_loss)) {
            throw DivergenceError("non-finite validation loss at epoch " + std::to_string(epoch));
        }
        result.log.push_back(entry);
        if (on_epoch) on_epoch(entry);

        if (entry.val_loss < best_val) {
            best_val = entry.val_loss;
            result.best = params;
            result.best_epoch = epoch;
            stale = 0;
        } else if (++stale >= cfg.patience) {
            break;
        }
    }
    result.last = std::move(params);
    return result;
}

} // namespace jssr
