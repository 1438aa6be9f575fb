// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

namespace jssr {

using Index = Eigen::Index;

/// Complex matrix held as two real matrices of identical shape.
///
/// This is the only complex representation in the library; every complex
/// product is expanded into real products so that the same code paths serve
/// the signal model, the encoder and the baselines.
struct ComplexMatrix {
    Eigen::MatrixXd re;
    Eigen::MatrixXd im;

    ComplexMatrix() = default;
    ComplexMatrix(Index rows, Index cols)
        : re(Eigen::MatrixXd::Zero(rows, cols)), im(Eigen::MatrixXd::Zero(rows, cols)) {}
    ComplexMatrix(Eigen::MatrixXd real, Eigen::MatrixXd imag);

    Index rows() const { return re.rows(); }
    Index cols() const { return re.cols(); }

    /// Columns [first, first + count) as a new matrix.
    ComplexMatrix col_block(Index first, Index count) const;
    void set_col_block(Index first, const ComplexMatrix& block);

    ComplexMatrix adjoint() const;
    double squared_norm() const { return re.squaredNorm() + im.squaredNorm(); }

    friend bool operator==(const ComplexMatrix& a, const ComplexMatrix& b) {
        return a.re == b.re && a.im == b.im;
    }
};

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);

/// a * b through the four real products
/// re = a.re b.re - a.im b.im, im = a.im b.re + a.re b.im.
ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b);

/// a * b + c, evaluated in the same order as multiply() followed by the add.
ComplexMatrix multiply_add(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& c);

} // namespace jssr
