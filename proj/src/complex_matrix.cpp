// SPDX-License-Identifier: Apache-2.0
#include "jssr/complex_matrix.hpp"

#include "jssr/error.hpp"

#include <string>

namespace jssr {

namespace {

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(std::string(what) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                             std::to_string(b.cols()));
    }
}

} // namespace

ComplexMatrix::ComplexMatrix(Eigen::MatrixXd real, Eigen::MatrixXd imag)
    : re(std::move(real)), im(std::move(imag)) {
    if (re.rows() != im.rows() || re.cols() != im.cols()) {
        throw DimensionError("ComplexMatrix: real and imaginary parts differ in shape");
    }
}

ComplexMatrix ComplexMatrix::col_block(Index first, Index count) const {
    return {re.middleCols(first, count), im.middleCols(first, count)};
}

void ComplexMatrix::set_col_block(Index first, const ComplexMatrix& block) {
    if (block.rows() != rows() || first + block.cols() > cols()) {
        throw DimensionError("set_col_block: block does not fit");
    }
    re.middleCols(first, block.cols()) = block.re;
    im.middleCols(first, block.cols()) = block.im;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    return {re.transpose(), -im.transpose()};
}

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_shape(a, b, "operator+");
    return {a.re + b.re, a.im + b.im};
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_shape(a, b, "operator-");
    return {a.re - b.re, a.im - b.im};
}

ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("multiply: inner dimensions " + std::to_string(a.cols()) + " and " +
                             std::to_string(b.rows()) + " differ");
    }
    ComplexMatrix out;
    out.re.noalias() = a.re * b.re;
    out.re.noalias() -= a.im * b.im;
    out.im.noalias() = a.im * b.re;
    out.im.noalias() += a.re * b.im;
    return out;
}

ComplexMatrix multiply_add(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& c) {
    ComplexMatrix out = multiply(a, b);
    require_same_shape(out, c, "multiply_add");
    out.re += c.re;
    out.im += c.im;
    return out;
}

} // namespace jssr
