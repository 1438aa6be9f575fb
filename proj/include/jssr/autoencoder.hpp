// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "jssr/complex_matrix.hpp"
#include "jssr/kernels.hpp"
#include "jssr/rng.hpp"
#include "jssr/signal_model.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace jssr {

/// What the decoder sees: the empirical covariance YY^H/M (2L^2 inputs) or,
/// for the naive ablation, the raw measurements (2LM inputs).
enum class FeatureKind { Covariance, Raw };

struct DecoderConfig {
    Index L = 0;
    Index N = 0;
    Index M = 0;
    int hidden_layers = 1;  // V
    Index width = 0;        // Q; 0 selects 2N
    FeatureKind features = FeatureKind::Covariance;

    void validate() const;
    Index input_width() const;
    Index hidden_width() const { return width > 0 ? width : 2 * N; }
};

/// Re(A) and Im(A) as trainable weights.
struct EncoderWeights {
    Eigen::MatrixXd re;  // L x N
    Eigen::MatrixXd im;  // L x N

    Index L() const { return re.rows(); }
    Index N() const { return re.cols(); }
    ComplexMatrix as_complex() const { return {re, im}; }
    static EncoderWeights from_complex(const ComplexMatrix& A) { return {A.re, A.im}; }
};

struct DenseLayer {
    Eigen::MatrixXd weight;  // fan_out x fan_in
    Eigen::VectorXd bias;    // fan_out
};

/// Hidden layers first (ReLU), output layer last (sigmoid).
struct DecoderWeights {
    std::vector<DenseLayer> layers;
};

struct ModelParams {
    DecoderConfig arch;
    EncoderWeights encoder;
    DecoderWeights decoder;
    double sigma2 = 0.0;
    std::optional<double> threshold;
    std::uint64_t seed = 0;
};

/// Covariance features [vec(Re(YY^H)/M) ; vec(Im(YY^H)/M)], column-major vec.
struct CovFeatures {
    Index L = 0;
    Eigen::VectorXd values;

    Eigen::MatrixXd re_block() const;
    Eigen::MatrixXd im_block() const;
    /// The L x L empirical covariance YY^H/M.
    ComplexMatrix covariance() const { return {re_block(), im_block()}; }
};

/// Lower and upper clamp applied to sigmoid outputs before the log loss.
inline constexpr double kScoreClamp = 1e-7;

ComplexMatrix encoder_forward(const ComplexMatrix& X, const EncoderWeights& w, const ComplexMatrix& Z);
CovFeatures covariance_features(const ComplexMatrix& Y);
Eigen::VectorXd raw_features(const ComplexMatrix& Y);

struct DecoderCache {
    std::vector<Eigen::MatrixXd> inputs;  // input of every layer; inputs[0] is the feature batch
    Eigen::MatrixXd logits;               // N x B pre-sigmoid output
    Eigen::MatrixXd scores;               // N x B clamped sigmoid output
};

/// Batched decoder: `features` is input_width x B.
DecoderCache decoder_forward(const Eigen::MatrixXd& features, const DecoderWeights& w);
Eigen::VectorXd decoder_forward(const CovFeatures& f, const DecoderWeights& w);

double sigmoid(double z);
double clamp_score(double s);

/// Mean binary cross-entropy over all N x U entries. `truth` and `scores` are N x U.
double bce_loss(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& scores);

/// Forward state for one minibatch (samples side by side, see kernels.hpp).
struct BatchCache {
    ComplexMatrix X;
    ComplexMatrix Y;
    Index M = 0;
    DecoderCache decoder;
    bool valid() const { return !decoder.inputs.empty(); }
};

struct Gradients {
    EncoderWeights encoder;
    DecoderWeights decoder;
};

BatchCache forward_batch(const ModelParams& params, ComplexMatrix X, const ComplexMatrix& Z, Index M,
                         kernels::Backend backend = kernels::Backend::Parallel);

/// Exact gradients of bce_loss(truth, cache.decoder.scores) w.r.t. every
/// decoder weight and, through the feature layer and Y = AX + Z, w.r.t. Re(A)
/// and Im(A). Entries held at the clamp contribute zero gradient.
Gradients backward(const ModelParams& params, const BatchCache& cache, const Eigen::MatrixXd& truth,
                   kernels::Backend backend = kernels::Backend::Parallel);

/// Rescale each complex column of A to norm sqrt(L). Columns with norm below
/// 1e-12 are redrawn from the standard complex Gaussian first.
void project_columns(EncoderWeights& w, Rng& rng);

/// A = Re + i Im, after checking every column norm is sqrt(L) within `tol` (relative).
ComplexMatrix extract_sensing_matrix(const EncoderWeights& w, double tol = 1e-6);

/// Glorot-uniform decoder weights, zero biases; encoder from i.i.d. standard
/// complex Gaussians, projected.
ModelParams init_params(const DecoderConfig& arch, double sigma2, std::uint64_t seed);

/// Flat views over trainable tensors in a fixed order (Re A, Im A, then
/// weight/bias per layer). Used by the optimizer and by checkpoints.
std::vector<std::span<double>> tensors(EncoderWeights& enc, DecoderWeights& dec);
std::vector<std::span<const double>> tensors(const EncoderWeights& enc, const DecoderWeights& dec);

/// Decoder scores for one measurement matrix (L x M).
Eigen::VectorXd infer(const ModelParams& params, const ComplexMatrix& Y);

/// Scores for many measurement matrices at once (L x (B M) layout).
Eigen::MatrixXd infer_batch(const ModelParams& params, const ComplexMatrix& Y,
                            kernels::Backend backend = kernels::Backend::Parallel);

} // namespace jssr
