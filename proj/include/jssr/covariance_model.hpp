// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "jssr/complex_matrix.hpp"
#include "jssr/signal_model.hpp"

#include <cstdint>

namespace jssr {

/// Column n is conj(a_n) kron a_n, i.e. vec(a_n a_n^H) in column-major order.
/// Result is L^2 x N.
ComplexMatrix khatri_rao_conj(const ComplexMatrix& A);

/// Split of vec(YY^H/M) into the power term (A* kr A) r, the cross-device
/// term E1 and the noise term E2, each computed on its own code path.
struct Eq4Decomposition {
    ComplexMatrix lhs;          // vec(YY^H/M), L^2 x 1
    ComplexMatrix linear_term;  // (A* kr A) r, L^2 x 1
    ComplexMatrix E1;           // L x L
    ComplexMatrix E2;           // L x L
    Eigen::VectorXd power;      // r(n) = ||X_{n,:}||^2 / M

    /// ||lhs - linear - vec(E1) - vec(E2)|| / ||lhs||.
    double relative_residual() const;
};

/// Y = AX + Z is formed internally.
Eq4Decomposition eq4_decompose(const ComplexMatrix& A, const ComplexMatrix& X, const ComplexMatrix& Z);

/// YY^H / M for an L x M matrix.
ComplexMatrix sample_covariance(const ComplexMatrix& Y);

/// A diag(r) A^H + sigma2 I.
ComplexMatrix model_covariance(const ComplexMatrix& A, const Eigen::VectorXd& power, double sigma2);

struct AsymptoticReport {
    Index M = 0;
    int trials = 0;
    /// Root-mean-square over trials of ||YY^H/M - Sigma||_F / ||Sigma||_F.
    double residual = 0.0;
    /// RMS over trials of ||E1||_F / ||Sigma||_F and ||E2 - sigma2 I||_F / ||Sigma||_F.
    double e1_residual = 0.0;
    double e2_residual = 0.0;
};

/// Draws unit-power complex Gaussian channels for the fixed activity pattern
/// and compares the empirical covariance with its limit, where the exact
/// per-row mean power is r = alpha.
AsymptoticReport asymptotic_covariance_check(const ComplexMatrix& A, const ActivityVector& activity, double sigma2,
                                             Index M, std::uint64_t seed, int trials = 1);

} // namespace jssr
