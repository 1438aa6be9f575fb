// Helpers shared by the unit tests. The std::complex conversions give an
// arithmetic path that never touches the re/im expansions under test.
#pragma once

#include "jssr/complex_matrix.hpp"

#include <Eigen/Dense>

#include <complex>
#include <random>

namespace test {

using jssr::ComplexMatrix;
using jssr::Index;

inline ComplexMatrix random_complex(Index rows, Index cols, std::uint32_t seed, double sd = 1.0) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> d(0.0, sd);
    ComplexMatrix out(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) {
            out.re(i, j) = d(gen);
            out.im(i, j) = d(gen);
        }
    }
    return out;
}

inline Eigen::MatrixXcd to_std(const ComplexMatrix& m) {
    Eigen::MatrixXcd out(m.rows(), m.cols());
    for (Index j = 0; j < m.cols(); ++j) {
        for (Index i = 0; i < m.rows(); ++i) out(i, j) = {m.re(i, j), m.im(i, j)};
    }
    return out;
}

inline ComplexMatrix from_std(const Eigen::MatrixXcd& m) { return {m.real(), m.imag()}; }

inline double rel_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    const double scale = std::max(b.norm(), 1e-300);
    return (a - b).norm() / scale;
}

inline double rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const double scale = std::max(b.norm(), 1e-300);
    return (a - b).norm() / scale;
}

} // namespace test
