// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "jssr/autoencoder.hpp"
#include "jssr/signal_model.hpp"

#include <functional>
#include <span>
#include <vector>

namespace jssr {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    void validate() const;
};

struct AdamState {
    long step = 0;
    std::vector<std::vector<double>> first;
    std::vector<std::vector<double>> second;
};

/// One bias-corrected ADAM update over matching parameter/gradient tensors.
/// Increments state.step before use, so the first call runs with t = 1.
void adam_step(std::span<const std::span<double>> params, std::span<const std::span<const double>> grads,
               AdamState& state, const AdamConfig& cfg);

enum class NoisePolicy {
    FreshEachPass,  // new Z on every forward pass during training
    FixedPerSample, // Z tied to the sample index
};

struct TrainConfig {
    AdamConfig adam;
    Index batch = 128;
    int epochs = 200;
    int patience = 20;
    std::uint64_t seed = 0;
    double sigma2 = 0.1;
    NoisePolicy noise = NoisePolicy::FreshEachPass;
    kernels::Backend backend = kernels::Backend::Parallel;

    void validate() const;
};

struct EpochLog {
    int epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double wall_seconds = 0.0;
};

struct TrainResult {
    ModelParams best;       // lowest validation loss seen
    ModelParams last;       // parameters after the final epoch
    std::vector<EpochLog> log;
    double initial_val_loss = 0.0;
    int best_epoch = 0;     // 0 means the initial parameters were never beaten
};

using EpochCallback = std::function<void(const EpochLog&)>;

/// Minibatch ADAM on the mean BCE, projecting the encoder columns after every
/// step. Returns the best-validation parameters; stops after `patience`
/// epochs without improvement. Throws DivergenceError on a non-finite loss.
TrainResult train(const Dataset& train_set, const Dataset& val_set, const TrainConfig& cfg,
                  const DecoderConfig& arch, const EpochCallback& on_epoch = {});

/// Gather samples [indices] into the side-by-side batch layout.
ComplexMatrix gather_signals(const Dataset& ds, std::span<const Index> indices);
Eigen::MatrixXd gather_activity(const Dataset& ds, std::span<const Index> indices);

/// Measurements of every sample under A with the dataset's shared noise
/// (sample_noise_for keyed by the dataset seed), side by side.
ComplexMatrix measure_dataset(const ComplexMatrix& A, const Dataset& ds, double sigma2, Index first = 0,
                              Index count = -1);

/// Mean BCE of the model over a dataset with the shared per-sample noise.
double evaluate_loss(const ModelParams& params, const Dataset& ds, double sigma2,
                     kernels::Backend backend = kernels::Backend::Parallel);

/// N x count matrix of decoder scores over a dataset with shared noise.
Eigen::MatrixXd score_dataset(const ModelParams& params, const Dataset& ds, double sigma2,
                              kernels::Backend backend = kernels::Backend::Parallel);

} // namespace jssr
