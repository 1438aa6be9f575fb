// SPDX-License-Identifier: Apache-2.0
#include "jssr/kernels.hpp"

#include "jssr/error.hpp"

#include <string>

namespace jssr::kernels {

Index batch_count(Index cols, Index M) {
    if (M < 1 || cols % M != 0) {
        throw DimensionError("batch layout: " + std::to_string(cols) + " columns is not a multiple of M = " +
                             std::to_string(M));
    }
    return cols / M;
}

namespace serial {

ComplexMatrix encode(const ComplexMatrix& A, const ComplexMatrix& X, const ComplexMatrix& Z) {
    if (A.cols() != X.rows() || Z.rows() != A.rows() || Z.cols() != X.cols()) {
        throw DimensionError("encode: shapes do not conform");
    }
    ComplexMatrix Y = Z;
    for (Index c = 0; c < X.cols(); ++c) {
        for (Index n = 0; n < A.cols(); ++n) {
            const double xr = X.re(n, c);
            const double xi = X.im(n, c);
            for (Index l = 0; l < A.rows(); ++l) {
                Y.re(l, c) += A.re(l, n) * xr - A.im(l, n) * xi;
                Y.im(l, c) += A.im(l, n) * xr + A.re(l, n) * xi;
            }
        }
    }
    return Y;
}

Eigen::MatrixXd covariance_features(const ComplexMatrix& Y, Index M) {
    const Index B = batch_count(Y.cols(), M);
    const Index L = Y.rows();
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(2 * L * L, B);
    const double scale = 1.0 / static_cast<double>(M);
    for (Index b = 0; b < B; ++b) {
        for (Index l = 0; l < L; ++l) {
            for (Index k = 0; k < L; ++k) {
                double cre = 0.0;
                double cim = 0.0;
                for (Index m = b * M; m < (b + 1) * M; ++m) {
                    cre += Y.re(k, m) * Y.re(l, m) + Y.im(k, m) * Y.im(l, m);
                    cim += Y.im(k, m) * Y.re(l, m) - Y.re(k, m) * Y.im(l, m);
                }
                F(k + l * L, b) = cre * scale;
                F(L * L + k + l * L, b) = cim * scale;
            }
        }
    }
    return F;
}

ComplexMatrix covariance_backward(const ComplexMatrix& Y, const Eigen::MatrixXd& dF, Index M) {
    const Index B = batch_count(Y.cols(), M);
    const Index L = Y.rows();
    if (dF.rows() != 2 * L * L || dF.cols() != B) throw DimensionError("covariance_backward: dF shape");
    ComplexMatrix dY(L, Y.cols());
    const double scale = 1.0 / static_cast<double>(M);
    for (Index b = 0; b < B; ++b) {
        auto gre = [&](Index k, Index l) { return dF(k + l * L, b); };
        auto gim = [&](Index k, Index l) { return dF(L * L + k + l * L, b); };
        for (Index m = b * M; m < (b + 1) * M; ++m) {
            for (Index k = 0; k < L; ++k) {
                double acc_re = 0.0;
                double acc_im = 0.0;
                for (Index l = 0; l < L; ++l) {
                    const double sym = gre(k, l) + gre(l, k);
                    const double skew = gim(l, k) - gim(k, l);
                    acc_re += sym * Y.re(l, m) + skew * Y.im(l, m);
                    acc_im += sym * Y.im(l, m) - skew * Y.re(l, m);
                }
                dY.re(k, m) = acc_re * scale;
                dY.im(k, m) = acc_im * scale;
            }
        }
    }
    return dY;
}

Eigen::MatrixXd raw_features(const ComplexMatrix& Y, Index M) {
    const Index B = batch_count(Y.cols(), M);
    const Index L = Y.rows();
    Eigen::MatrixXd F(2 * L * M, B);
    for (Index b = 0; b < B; ++b) {
        for (Index m = 0; m < M; ++m) {
            for (Index l = 0; l < L; ++l) {
                F(l + m * L, b) = Y.re(l, b * M + m);
                F(L * M + l + m * L, b) = Y.im(l, b * M + m);
            }
        }
    }
    return F;
}

ComplexMatrix raw_backward(const Eigen::MatrixXd& dF, Index L, Index M) {
    if (dF.rows() != 2 * L * M) throw DimensionError("raw_backward: dF shape");
    const Index B = dF.cols();
    ComplexMatrix dY(L, B * M);
    for (Index b = 0; b < B; ++b) {
        for (Index m = 0; m < M; ++m) {
            for (Index l = 0; l < L; ++l) {
                dY.re(l, b * M + m) = dF(l + m * L, b);
                dY.im(l, b * M + m) = dF(L * M + l + m * L, b);
            }
        }
    }
    return dY;
}

ComplexMatrix sensing_gradient(const ComplexMatrix& dY, const ComplexMatrix& X) {
    if (dY.cols() != X.cols()) throw DimensionError("sensing_gradient: column counts differ");
    ComplexMatrix dA(dY.rows(), X.rows());
    for (Index c = 0; c < X.cols(); ++c) {
        for (Index n = 0; n < X.rows(); ++n) {
            const double xr = X.re(n, c);
            const double xi = X.im(n, c);
            for (Index l = 0; l < dY.rows(); ++l) {
                dA.re(l, n) += dY.re(l, c) * xr + dY.im(l, c) * xi;
                dA.im(l, n) += dY.im(l, c) * xr - dY.re(l, c) * xi;
            }
        }
    }
    return dA;
}

} // namespace serial
} // namespace jssr::kernels
