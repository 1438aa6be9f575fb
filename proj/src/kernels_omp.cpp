// SPDX-License-Identifier: Apache-2.0
#include "jssr/kernels.hpp"

#include "jssr/error.hpp"

#include <omp.h>

#include <algorithm>
#include <vector>

namespace jssr::kernels::parallel {

namespace {

// Reductions over the batch are split into fixed blocks of samples and the
// partial sums are added in block order, so results do not depend on the
// thread count.
constexpr Index kReduceBlock = 32;

Eigen::MatrixXd vec_block(const Eigen::MatrixXd& F, Index b, Index offset, Index L) {
    return Eigen::Map<const Eigen::MatrixXd>(F.col(b).data() + offset, L, L);
}

} // namespace

ComplexMatrix encode(const ComplexMatrix& A, const ComplexMatrix& X, const ComplexMatrix& Z) {
    if (A.cols() != X.rows() || Z.rows() != A.rows() || Z.cols() != X.cols()) {
        throw DimensionError("encode: shapes do not conform");
    }
    ComplexMatrix Y(A.rows(), X.cols());
    const Index cols = X.cols();
    const Index block = 256;
#pragma omp parallel for schedule(static)
    for (Index first = 0; first < cols; first += block) {
        const Index n = std::min(block, cols - first);
        auto yr = Y.re.middleCols(first, n);
        auto yi = Y.im.middleCols(first, n);
        yr.noalias() = A.re * X.re.middleCols(first, n);
        yr.noalias() -= A.im * X.im.middleCols(first, n);
        yr += Z.re.middleCols(first, n);
        yi.noalias() = A.im * X.re.middleCols(first, n);
        yi.noalias() += A.re * X.im.middleCols(first, n);
        yi += Z.im.middleCols(first, n);
    }
    return Y;
}

Eigen::MatrixXd covariance_features(const ComplexMatrix& Y, Index M) {
    const Index B = batch_count(Y.cols(), M);
    const Index L = Y.rows();
    Eigen::MatrixXd F(2 * L * L, B);
    const double scale = 1.0 / static_cast<double>(M);
#pragma omp parallel for schedule(static)
    for (Index b = 0; b < B; ++b) {
        const auto yr = Y.re.middleCols(b * M, M);
        const auto yi = Y.im.middleCols(b * M, M);
        Eigen::Map<Eigen::MatrixXd> cre(F.col(b).data(), L, L);
        Eigen::Map<Eigen::MatrixXd> cim(F.col(b).data() + L * L, L, L);
        cre.noalias() = yr * yr.transpose();
        cre.noalias() += yi * yi.transpose();
        cre *= scale;
        cim.noalias() = yi * yr.transpose();
        cim.noalias() -= yr * yi.transpose();
        cim *= scale;
    }
    return F;
}

ComplexMatrix covariance_backward(const ComplexMatrix& Y, const Eigen::MatrixXd& dF, Index M) {
    const Index B = batch_count(Y.cols(), M);
    const Index L = Y.rows();
    if (dF.rows() != 2 * L * L || dF.cols() != B) throw DimensionError("covariance_backward: dF shape");
    ComplexMatrix dY(L, Y.cols());
    const double scale = 1.0 / static_cast<double>(M);
#pragma omp parallel for schedule(static)
    for (Index b = 0; b < B; ++b) {
        const Eigen::MatrixXd gre = vec_block(dF, b, 0, L);
        const Eigen::MatrixXd gim = vec_block(dF, b, L * L, L);
        const Eigen::MatrixXd sym = (gre + gre.transpose()) * scale;
        const Eigen::MatrixXd skew = (gim.transpose() - gim) * scale;
        const auto yr = Y.re.middleCols(b * M, M);
        const auto yi = Y.im.middleCols(b * M, M);
        dY.re.middleCols(b * M, M).noalias() = sym * yr + skew * yi;
        dY.im.middleCols(b * M, M).noalias() = sym * yi - skew * yr;
    }
    return dY;
}

Eigen::MatrixXd raw_features(const ComplexMatrix& Y, Index M) {
    const Index B = batch_count(Y.cols(), M);
    const Index L = Y.rows();
    Eigen::MatrixXd F(2 * L * M, B);
#pragma omp parallel for schedule(static)
    for (Index b = 0; b < B; ++b) {
        Eigen::Map<Eigen::MatrixXd>(F.col(b).data(), L, M) = Y.re.middleCols(b * M, M);
        Eigen::Map<Eigen::MatrixXd>(F.col(b).data() + L * M, L, M) = Y.im.middleCols(b * M, M);
    }
    return F;
}

ComplexMatrix raw_backward(const Eigen::MatrixXd& dF, Index L, Index M) {
    if (dF.rows() != 2 * L * M) throw DimensionError("raw_backward: dF shape");
    const Index B = dF.cols();
    ComplexMatrix dY(L, B * M);
#pragma omp parallel for schedule(static)
    for (Index b = 0; b < B; ++b) {
        dY.re.middleCols(b * M, M) = Eigen::Map<const Eigen::MatrixXd>(dF.col(b).data(), L, M);
        dY.im.middleCols(b * M, M) = Eigen::Map<const Eigen::MatrixXd>(dF.col(b).data() + L * M, L, M);
    }
    return dY;
}

ComplexMatrix sensing_gradient(const ComplexMatrix& dY, const ComplexMatrix& X) {
    if (dY.cols() != X.cols()) throw DimensionError("sensing_gradient: column counts differ");
    const Index cols = X.cols();
    const Index blocks = std::max<Index>(1, (cols + kReduceBlock - 1) / kReduceBlock);
    std::vector<ComplexMatrix> partial(static_cast<std::size_t>(blocks));
#pragma omp parallel for schedule(static)
    for (Index k = 0; k < blocks; ++k) {
        const Index first = k * kReduceBlock;
        const Index n = std::min(kReduceBlock, cols - first);
        ComplexMatrix& p = partial[static_cast<std::size_t>(k)];
        p = ComplexMatrix(dY.rows(), X.rows());
        if (n <= 0) continue;
        const auto dyr = dY.re.middleCols(first, n);
        const auto dyi = dY.im.middleCols(first, n);
        const auto xr = X.re.middleCols(first, n);
        const auto xi = X.im.middleCols(first, n);
        p.re.noalias() = dyr * xr.transpose();
        p.re.noalias() += dyi * xi.transpose();
        p.im.noalias() = dyi * xr.transpose();
        p.im.noalias() -= dyr * xi.transpose();
    }
    ComplexMatrix dA(dY.rows(), X.rows());
    for (const auto& p : partial) {
        dA.re += p.re;
        dA.im += p.im;
    }
    return dA;
}

} // namespace jssr::kernels::parallel
