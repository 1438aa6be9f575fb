// Central finite-difference check of backward() over every trainable value.
#pragma once

#include "jssr/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace test {

struct GradCheck {
    double worst_relative = 0.0;
    std::size_t checked = 0;
    std::size_t encoder_checked = 0;
};

inline double fd_relative(double analytic, double numeric) {
    const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
    return std::abs(analytic - numeric) / scale;
}

/// Random batch of `B` samples, truth drawn at random.
inline GradCheck gradient_check(jssr::ModelParams params, jssr::Index B, std::uint32_t seed, double h = 1e-5) {
    using namespace jssr;
    const Index N = params.arch.N, L = params.arch.L, M = params.arch.M;
    std::mt19937 gen(seed);
    std::normal_distribution<double> d;
    ComplexMatrix X(N, B * M), Z(L, B * M);
    for (Index i = 0; i < X.re.size(); ++i) {
        X.re.data()[i] = d(gen);
        X.im.data()[i] = d(gen);
    }
    for (Index i = 0; i < Z.re.size(); ++i) {
        Z.re.data()[i] = 0.3 * d(gen);
        Z.im.data()[i] = 0.3 * d(gen);
    }
    Eigen::MatrixXd truth(N, B);
    std::bernoulli_distribution coin(0.4);
    for (Index i = 0; i < truth.size(); ++i) truth.data()[i] = coin(gen) ? 1.0 : 0.0;

    const auto loss = [&](const ModelParams& p) {
        return bce_loss(truth, forward_batch(p, X, Z, M, kernels::Backend::Serial).decoder.scores);
    };
    const BatchCache cache = forward_batch(params, X, Z, M, kernels::Backend::Serial);
    Gradients g = backward(params, cache, truth, kernels::Backend::Serial);

    auto values = tensors(params.encoder, params.decoder);
    const auto grads = tensors(g.encoder, g.decoder);
    GradCheck out;
    for (std::size_t t = 0; t < values.size(); ++t) {
        for (std::size_t i = 0; i < values[t].size(); ++i) {
            const double keep = values[t][i];
            values[t][i] = keep + h;
            const double up = loss(params);
            values[t][i] = keep - h;
            const double down = loss(params);
            values[t][i] = keep;
            const double numeric = (up - down) / (2.0 * h);
            out.worst_relative = std::max(out.worst_relative, fd_relative(grads[t][i], numeric));
            ++out.checked;
            if (t < 2) ++out.encoder_checked;
        }
    }
    return out;
}

} // namespace test
