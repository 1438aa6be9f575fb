// SPDX-License-Identifier: Apache-2.0
#pragma once

// Batched kernels behind the autoencoder. A batch of B samples with M
// columns each is laid out side by side: X is N x (B M), Y is L x (B M) and
// sample b owns columns [b M, (b + 1) M).
//
// `serial` holds plain-loop reference implementations used by the tests;
// `parallel` holds the OpenMP versions used in training and inference.

#include "jssr/complex_matrix.hpp"

namespace jssr::kernels {

enum class Backend { Serial, Parallel };

namespace serial {

/// Y = A X + Z.
ComplexMatrix encode(const ComplexMatrix& A, const ComplexMatrix& X, const ComplexMatrix& Z);

/// Column b: [vec(Re(Y_b Y_b^H)) ; vec(Im(Y_b Y_b^H))] / M, column-major vec.
Eigen::MatrixXd covariance_features(const ComplexMatrix& Y, Index M);

/// Gradient w.r.t. Y given the gradient w.r.t. the covariance features.
ComplexMatrix covariance_backward(const ComplexMatrix& Y, const Eigen::MatrixXd& dF, Index M);

/// Column b: [vec(Re(Y_b)) ; vec(Im(Y_b))].
Eigen::MatrixXd raw_features(const ComplexMatrix& Y, Index M);
ComplexMatrix raw_backward(const Eigen::MatrixXd& dF, Index L, Index M);

/// Gradient of the loss w.r.t. A given dL/dY, summed over the batch:
/// dRe(A) = dRe(Y) Re(X)^T + dIm(Y) Im(X)^T, dIm(A) = dIm(Y) Re(X)^T - dRe(Y) Im(X)^T.
ComplexMatrix sensing_gradient(const ComplexMatrix& dY, const ComplexMatrix& X);

} // namespace serial

namespace parallel {

ComplexMatrix encode(const ComplexMatrix& A, const ComplexMatrix& X, const ComplexMatrix& Z);
Eigen::MatrixXd covariance_features(const ComplexMatrix& Y, Index M);
ComplexMatrix covariance_backward(const ComplexMatrix& Y, const Eigen::MatrixXd& dF, Index M);
Eigen::MatrixXd raw_features(const ComplexMatrix& Y, Index M);
ComplexMatrix raw_backward(const Eigen::MatrixXd& dF, Index L, Index M);
ComplexMatrix sensing_gradient(const ComplexMatrix& dY, const ComplexMatrix& X);

} // namespace parallel

inline ComplexMatrix encode(Backend b, const ComplexMatrix& A, const ComplexMatrix& X, const ComplexMatrix& Z) {
    return b == Backend::Serial ? serial::encode(A, X, Z) : parallel::encode(A, X, Z);
}
inline Eigen::MatrixXd covariance_features(Backend b, const ComplexMatrix& Y, Index M) {
    return b == Backend::Serial ? serial::covariance_features(Y, M) : parallel::covariance_features(Y, M);
}
inline ComplexMatrix covariance_backward(Backend b, const ComplexMatrix& Y, const Eigen::MatrixXd& dF, Index M) {
    return b == Backend::Serial ? serial::covariance_backward(Y, dF, M) : parallel::covariance_backward(Y, dF, M);
}
inline Eigen::MatrixXd raw_features(Backend b, const ComplexMatrix& Y, Index M) {
    return b == Backend::Serial ? serial::raw_features(Y, M) : parallel::raw_features(Y, M);
}
inline ComplexMatrix raw_backward(Backend b, const Eigen::MatrixXd& dF, Index L, Index M) {
    return b == Backend::Serial ? serial::raw_backward(dF, L, M) : parallel::raw_backward(dF, L, M);
}
inline ComplexMatrix sensing_gradient(Backend b, const ComplexMatrix& dY, const ComplexMatrix& X) {
    return b == Backend::Serial ? serial::sensing_gradient(dY, X) : parallel::sensing_gradient(dY, X);
}

/// Batch size implied by a side-by-side layout; throws if cols % M != 0.
Index batch_count(Index cols, Index M);

} // namespace jssr::kernels
