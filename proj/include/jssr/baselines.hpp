// SPDX-License-Identifier: Apache-2.0
#pragma once

// Classical detectors used as comparison points. None of them is trained;
// each maps one measurement matrix (or its sample covariance) to per-device
// scores, which then go through the same threshold calibration as the
// learned decoder.

#include "jssr/complex_matrix.hpp"

#include <cstdint>
#include <vector>

namespace jssr {

struct SolverConfig {
    int max_iterations = 1000;
    double tolerance = 1e-6;
    double lambda = 0.0;
    double damping = 0.0;
    /// Record the objective after every iteration (tests and audits).
    bool trace = false;

    void validate() const;
};

/// i.i.d. CN(0, 1) entries, not normalized.
ComplexMatrix gaussian_pilots(Index N, Index L, std::uint64_t seed);

/// Map a non-negative power-like quantity into [0, 1) for thresholding.
double power_score(double power);

struct PowerEstimate {
    Eigen::VectorXd values;  // non-negative
    int iterations = 0;
    bool converged = false;
    std::vector<double> objective_trace;
};

/// Non-negative LASSO on the covariance model:
///   min_{r >= 0} 1/2 ||vec(S) - (A* kr A) r||^2 + lambda sum(r)
/// solved by projected ISTA with step 1 / ||A* kr A||_2^2.
class CovarianceLasso {
public:
    explicit CovarianceLasso(const ComplexMatrix& A);

    PowerEstimate solve(const ComplexMatrix& sample_cov, const SolverConfig& cfg) const;
    /// Evaluated directly from the residual, not from the Gram form used by solve().
    double objective(const ComplexMatrix& sample_cov, const Eigen::VectorXd& r, double lambda) const;
    /// Smallest lambda with r = 0 as the solution: max_n a_n^H S a_n.
    double lambda_max(const ComplexMatrix& sample_cov) const;
    double lipschitz() const { return lipschitz_; }

private:
    Eigen::VectorXd correlations(const ComplexMatrix& sample_cov) const;

    ComplexMatrix A_;
    ComplexMatrix kr_;       // L^2 x N
    Eigen::MatrixXd gram_;   // |a_i^H a_j|^2
    double lipschitz_ = 0.0;
};

struct GroupLassoResult {
    ComplexMatrix X;
    Eigen::VectorXd row_norms;
    int iterations = 0;
    bool converged = false;
    std::vector<double> objective_trace;
};

/// min_X 1/2 ||Y - AX||_F^2 + lambda sum_n ||X_{n,:}||_2 by block ISTA with
/// step 1 / ||A||_2^2.
class GroupLasso {
public:
    explicit GroupLasso(const ComplexMatrix& A);

    GroupLassoResult solve(const ComplexMatrix& Y, const SolverConfig& cfg) const;
    double objective(const ComplexMatrix& Y, const ComplexMatrix& X, double lambda) const;
    /// max_n ||(A^H Y)_{n,:}||_2.
    double lambda_max(const ComplexMatrix& Y) const;
    double step() const { return step_; }

private:
    ComplexMatrix A_;
    ComplexMatrix AH_;
    double step_ = 0.0;
};

struct AmpPrior {
    double activity = 0.1;          // p
    double channel_variance = 1.0;  // variance of active entries of X
};

struct AmpResult {
    Eigen::VectorXd posterior;  // per-device activity probability
    int iterations = 0;
    bool diverged = false;
    bool retried_with_damping = false;
};

/// MMV approximate message passing with the row-wise MMSE denoiser for a
/// Bernoulli / complex-Gaussian prior and an Onsager-corrected residual; the
/// effective noise level is re-estimated from the residual each iteration.
AmpResult mmv_amp(const ComplexMatrix& Y, const ComplexMatrix& A, const AmpPrior& prior, const SolverConfig& cfg);

/// Damping applied when the undamped run diverges.
inline constexpr double kAmpRetryDamping = 0.3;

struct MlResult {
    Eigen::VectorXd gamma;
    int sweeps = 0;
    bool converged = false;
    /// Negative log-likelihood after every accepted coordinate update.
    std::vector<double> nll_trace;
};

/// log det(Sigma) + tr(Sigma^{-1} S) for Sigma = A diag(gamma) A^H + sigma2 I,
/// evaluated directly by Cholesky of the real embedding.
double ml_negative_log_likelihood(const ComplexMatrix& sample_cov, const ComplexMatrix& A,
                                  const Eigen::VectorXd& gamma, double sigma2);

/// Minimizer over d >= -gamma_n of log(1 + d q) - d s / (1 + d q), where
/// q = a^H Sigma^{-1} a and s = a^H Sigma^{-1} S Sigma^{-1} a.
double ml_coordinate_step(double q, double s, double gamma_n);

/// Coordinate descent over gamma_1..gamma_N with Sherman-Morrison updates
/// of Sigma^{-1}. Stops after max_iterations sweeps or when the relative
/// likelihood change of a sweep drops below tolerance.
MlResult cov_ml(const ComplexMatrix& sample_cov, const ComplexMatrix& A, double sigma2, const SolverConfig& cfg);

/// Largest eigenvalue of a Hermitian matrix via its real symmetric embedding.
double hermitian_max_eigenvalue(const ComplexMatrix& H);

} // namespace jssr
