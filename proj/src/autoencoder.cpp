// SPDX-License-Identifier: Apache-2.0
#include "jssr/autoencoder.hpp"

#include "jssr/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace jssr {

void DecoderConfig::validate() const {
    if (L < 1 || N < 1 || M < 1) throw ConfigError("decoder: L, N and M must be positive");
    if (hidden_layers < 0) throw ConfigError("decoder: hidden layer count must be non-negative");
    if (width < 0) throw ConfigError("decoder: width must be non-negative");
}

Index DecoderConfig::input_width() const {
    return features == FeatureKind::Covariance ? 2 * L * L : 2 * L * M;
}

Eigen::MatrixXd CovFeatures::re_block() const {
    return Eigen::Map<const Eigen::MatrixXd>(values.data(), L, L);
}

Eigen::MatrixXd CovFeatures::im_block() const {
    return Eigen::Map<const Eigen::MatrixXd>(values.data() + L * L, L, L);
}

ComplexMatrix encoder_forward(const ComplexMatrix& X, const EncoderWeights& w, const ComplexMatrix& Z) {
    return apply_sensing(w.as_complex(), X, Z);
}

CovFeatures covariance_features(const ComplexMatrix& Y) {
    if (Y.cols() < 1) throw DimensionError("covariance_features: Y has no columns");
    return {Y.rows(), kernels::parallel::covariance_features(Y, Y.cols()).col(0)};
}

Eigen::VectorXd raw_features(const ComplexMatrix& Y) {
    return kernels::parallel::raw_features(Y, Y.cols()).col(0);
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double clamp_score(double s) {
    return std::clamp(s, kScoreClamp, 1.0 - kScoreClamp);
}

DecoderCache decoder_forward(const Eigen::MatrixXd& features, const DecoderWeights& w) {
    if (w.layers.empty()) throw DimensionError("decoder has no layers");
    DecoderCache cache;
    cache.inputs.reserve(w.layers.size());
    cache.inputs.push_back(features);
    for (std::size_t k = 0; k < w.layers.size(); ++k) {
        const auto& layer = w.layers[k];
        const Eigen::MatrixXd& in = cache.inputs.back();
        if (layer.weight.cols() != in.rows() || layer.bias.size() != layer.weight.rows()) {
            throw DimensionError("decoder layer " + std::to_string(k) + " expects " +
                                 std::to_string(layer.weight.cols()) + " inputs, got " + std::to_string(in.rows()));
        }
        Eigen::MatrixXd z = layer.weight * in;
        z.colwise() += layer.bias;
        if (k + 1 < w.layers.size()) {
            cache.inputs.push_back(z.cwiseMax(0.0));
        } else {
            cache.logits = std::move(z);
        }
    }
    cache.scores = cache.logits.unaryExpr([](double z) { return clamp_score(sigmoid(z)); });
    return cache;
}

Eigen::VectorXd decoder_forward(const CovFeatures& f, const DecoderWeights& w) {
    return decoder_forward(Eigen::MatrixXd(f.values), w).scores.col(0);
}

double bce_loss(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& scores) {
    if (truth.rows() != scores.rows() || truth.cols() != scores.cols()) {
        throw DimensionError("bce_loss: truth and score shapes differ");
    }
    if (scores.size() == 0) throw DimensionError("bce_loss: empty batch");
    double sum = 0.0;
    for (Index u = 0; u < scores.cols(); ++u) {
        for (Index n = 0; n < scores.rows(); ++n) {
            const double s = scores(n, u);
            if (!(s >= kScoreClamp && s <= 1.0 - kScoreClamp)) {
                throw InternalError("bce_loss: score " + std::to_string(s) + " outside the clamp range");
            }
            const double a = truth(n, u);
            sum += a * std::log(s) + (1.0 - a) * std::log(1.0 - s);
        }
    }
    return -sum / static_cast<double>(scores.size());
}

BatchCache forward_batch(const ModelParams& params, ComplexMatrix X, const ComplexMatrix& Z, Index M,
                         kernels::Backend backend) {
    BatchCache cache;
    cache.M = M;
    cache.Y = kernels::encode(backend, params.encoder.as_complex(), X, Z);
    cache.X = std::move(X);
    Eigen::MatrixXd features = params.arch.features == FeatureKind::Covariance
                                   ? kernels::covariance_features(backend, cache.Y, M)
                                   : kernels::raw_features(backend, cache.Y, M);
    cache.decoder = decoder_forward(features, params.decoder);
    return cache;
}

Gradients backward(const ModelParams& params, const BatchCache& cache, const Eigen::MatrixXd& truth,
                   kernels::Backend backend) {
    if (!cache.valid()) throw InternalError("backward called without a forward cache");
    const auto& dc = cache.decoder;
    const auto& layers = params.decoder.layers;
    if (truth.rows() != dc.scores.rows() || truth.cols() != dc.scores.cols()) {
        throw DimensionError("backward: truth shape does not match the cached scores");
    }

    // d loss / d logits for the mean BCE; zero where the clamp is active.
    const double inv_count = 1.0 / static_cast<double>(dc.scores.size());
    Eigen::MatrixXd delta(dc.logits.rows(), dc.logits.cols());
    for (Index u = 0; u < delta.cols(); ++u) {
        for (Index n = 0; n < delta.rows(); ++n) {
            const double s = sigmoid(dc.logits(n, u));
            const bool clamped = s < kScoreClamp || s > 1.0 - kScoreClamp;
            delta(n, u) = clamped ? 0.0 : (s - truth(n, u)) * inv_count;
        }
    }

    Gradients g;
    g.decoder.layers.resize(layers.size());
    for (std::size_t k = layers.size(); k-- > 0;) {
        const Eigen::MatrixXd& in = dc.inputs[k];
        g.decoder.layers[k].weight.noalias() = delta * in.transpose();
        g.decoder.layers[k].bias = delta.rowwise().sum();
        Eigen::MatrixXd upstream = layers[k].weight.transpose() * delta;
        if (k > 0) {
            // inputs[k] = ReLU(z_{k}); its derivative is 1 where the output is positive.
            delta = upstream.cwiseProduct((in.array() > 0.0).cast<double>().matrix());
        } else {
            delta = std::move(upstream);
        }
    }

    const Index L = params.arch.L;
    const ComplexMatrix dY = params.arch.features == FeatureKind::Covariance
                                 ? kernels::covariance_backward(backend, cache.Y, delta, cache.M)
                                 : kernels::raw_backward(backend, delta, L, cache.M);
    const ComplexMatrix dA = kernels::sensing_gradient(backend, dY, cache.X);
    g.encoder = {dA.re, dA.im};
    return g;
}

void project_columns(EncoderWeights& w, Rng& rng) {
    const double target = std::sqrt(static_cast<double>(w.L()));
    for (Index n = 0; n < w.N(); ++n) {
        double norm = std::sqrt(w.re.col(n).squaredNorm() + w.im.col(n).squaredNorm());
        if (norm < 1e-12) {
            const double sd = std::sqrt(0.5);
            for (Index l = 0; l < w.L(); ++l) {
                w.re(l, n) = rng.normal(sd);
                w.im(l, n) = rng.normal(sd);
            }
            norm = std::sqrt(w.re.col(n).squaredNorm() + w.im.col(n).squaredNorm());
        }
        const double scale = target / norm;
        w.re.col(n) *= scale;
        w.im.col(n) *= scale;
    }
}

ComplexMatrix extract_sensing_matrix(const EncoderWeights& w, double tol) {
    const double target = std::sqrt(static_cast<double>(w.L()));
    for (Index n = 0; n < w.N(); ++n) {
        const double norm = std::sqrt(w.re.col(n).squaredNorm() + w.im.col(n).squaredNorm());
        if (std::abs(norm - target) > tol * target) {
            throw ConfigError("column " + std::to_string(n) + " has norm " + std::to_string(norm) +
                              ", expected sqrt(L) = " + std::to_string(target));
        }
    }
    return w.as_complex();
}

ModelParams init_params(const DecoderConfig& arch, double sigma2, std::uint64_t seed) {
    arch.validate();
    ModelParams p;
    p.arch = arch;
    p.sigma2 = sigma2;
    p.seed = seed;

    Rng enc_rng(seed, StreamDomain::EncoderInit, 0);
    p.encoder.re.resize(arch.L, arch.N);
    p.encoder.im.resize(arch.L, arch.N);
    const double sd = std::sqrt(0.5);
    for (Index n = 0; n < arch.N; ++n) {
        for (Index l = 0; l < arch.L; ++l) {
            p.encoder.re(l, n) = enc_rng.normal(sd);
            p.encoder.im(l, n) = enc_rng.normal(sd);
        }
    }
    project_columns(p.encoder, enc_rng);

    Rng dec_rng(seed, StreamDomain::DecoderInit, 0);
    Index fan_in = arch.input_width();
    for (int k = 0; k <= arch.hidden_layers; ++k) {
        const Index fan_out = k < arch.hidden_layers ? arch.hidden_width() : arch.N;
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        DenseLayer layer{Eigen::MatrixXd(fan_out, fan_in), Eigen::VectorXd::Zero(fan_out)};
        for (Index c = 0; c < fan_in; ++c) {
            for (Index r = 0; r < fan_out; ++r) layer.weight(r, c) = limit * (2.0 * dec_rng.uniform() - 1.0);
        }
        p.decoder.layers.push_back(std::move(layer));
        fan_in = fan_out;
    }
    return p;
}

namespace {

template <class Span, class Enc, class Dec>
std::vector<Span> collect(Enc& enc, Dec& dec) {
    std::vector<Span> out;
    auto add = [&](auto& m) { out.emplace_back(m.data(), static_cast<std::size_t>(m.size())); };
    add(enc.re);
    add(enc.im);
    for (auto& layer : dec.layers) {
        add(layer.weight);
        add(layer.bias);
    }
    return out;
}

} // namespace

std::vector<std::span<double>> tensors(EncoderWeights& enc, DecoderWeights& dec) {
    return collect<std::span<double>>(enc, dec);
}

std::vector<std::span<const double>> tensors(const EncoderWeights& enc, const DecoderWeights& dec) {
    return collect<std::span<const double>>(enc, dec);
}

Eigen::VectorXd infer(const ModelParams& params, const ComplexMatrix& Y) {
    return infer_batch(params, Y, kernels::Backend::Serial).col(0);
}

Eigen::MatrixXd infer_batch(const ModelParams& params, const ComplexMatrix& Y, kernels::Backend backend) {
    const Index M = params.arch.M;
    if (Y.rows() != params.arch.L) throw DimensionError("infer: Y has the wrong number of rows");
    const Eigen::MatrixXd features = params.arch.features == FeatureKind::Covariance
                                         ? kernels::covariance_features(backend, Y, M)
                                         : kernels::raw_features(backend, Y, M);
    return decoder_forward(features, params.decoder).scores;
}

} // namespace jssr
