// SPDX-License-Identifier: Apache-2.0
#include "jssr/baselines.hpp"

#include "jssr/covariance_model.hpp"
#include "jssr/error.hpp"
#include "jssr/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace jssr {

void SolverConfig::validate() const {
    if (max_iterations < 1) throw ConfigError("solver: max_iterations must be positive");
    if (tolerance < 0.0) throw ConfigError("solver: tolerance must be non-negative");
    if (lambda < 0.0) throw ConfigError("solver: lambda must be non-negative");
    if (damping < 0.0 || damping >= 1.0) throw ConfigError("solver: damping must lie in [0, 1)");
}

ComplexMatrix gaussian_pilots(Index N, Index L, std::uint64_t seed) {
    if (N < 1 || L < 1) throw ConfigError("gaussian_pilots: N and L must be positive");
    Rng rng(seed, StreamDomain::Pilots, 0);
    const double sd = std::sqrt(0.5);
    ComplexMatrix A(L, N);
    for (Index n = 0; n < N; ++n) {
        for (Index l = 0; l < L; ++l) {
            A.re(l, n) = rng.normal(sd);
            A.im(l, n) = rng.normal(sd);
        }
    }
    return A;
}

double power_score(double power) {
    const double p = std::max(power, 0.0);
    return p / (1.0 + p);
}

namespace {

Eigen::MatrixXd real_embedding(const ComplexMatrix& H) {
    const Index L = H.rows();
    Eigen::MatrixXd E(2 * L, 2 * L);
    E.topLeftCorner(L, L) = H.re;
    E.topRightCorner(L, L) = -H.im;
    E.bottomLeftCorner(L, L) = H.im;
    E.bottomRightCorner(L, L) = H.re;
    return E;
}

Eigen::VectorXd vec(const Eigen::MatrixXd& m) {
    return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

bool small_step(const Eigen::VectorXd& next, const Eigen::VectorXd& prev, double tol) {
    const double scale = std::max(1.0, prev.cwiseAbs().maxCoeff());
    return (next - prev).cwiseAbs().maxCoeff() <= tol * scale;
}

} // namespace

double hermitian_max_eigenvalue(const ComplexMatrix& H) {
    if (H.rows() != H.cols()) throw DimensionError("hermitian_max_eigenvalue: matrix is not square");
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(real_embedding(H), Eigen::EigenvaluesOnly);
    return eig.eigenvalues().maxCoeff();
}

// ---------------------------------------------------------------------------
// Covariance LASSO

CovarianceLasso::CovarianceLasso(const ComplexMatrix& A) : A_(A), kr_(khatri_rao_conj(A)) {
    gram_.noalias() = kr_.re.transpose() * kr_.re;
    gram_.noalias() += kr_.im.transpose() * kr_.im;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram_, Eigen::EigenvaluesOnly);
    lipschitz_ = eig.eigenvalues().maxCoeff();
}

Eigen::VectorXd CovarianceLasso::correlations(const ComplexMatrix& S) const {
    if (S.rows() != A_.rows() || S.cols() != A_.rows()) throw DimensionError("CovarianceLasso: covariance shape");
    return kr_.re.transpose() * vec(S.re) + kr_.im.transpose() * vec(S.im);
}

double CovarianceLasso::lambda_max(const ComplexMatrix& S) const {
    return std::max(0.0, correlations(S).maxCoeff());
}

double CovarianceLasso::objective(const ComplexMatrix& S, const Eigen::VectorXd& r, double lambda) const {
    const Eigen::VectorXd res_re = vec(S.re) - kr_.re * r;
    const Eigen::VectorXd res_im = vec(S.im) - kr_.im * r;
    return 0.5 * (res_re.squaredNorm() + res_im.squaredNorm()) + lambda * r.sum();
}

PowerEstimate CovarianceLasso::solve(const ComplexMatrix& S, const SolverConfig& cfg) const {
    cfg.validate();
    const Eigen::VectorXd c = correlations(S);
    const double step = 1.0 / lipschitz_;
    PowerEstimate out;
    Eigen::VectorXd r = Eigen::VectorXd::Zero(A_.cols());
    for (int it = 1; it <= cfg.max_iterations; ++it) {
        const Eigen::VectorXd grad = gram_ * r - c;
        Eigen::VectorXd next = (r - step * (grad.array() + cfg.lambda).matrix()).cwiseMax(0.0);
        const bool done = small_step(next, r, cfg.tolerance);
        r = std::move(next);
        out.iterations = it;
        if (cfg.trace) out.objective_trace.push_back(objective(S, r, cfg.lambda));
        if (done) {
            out.converged = true;
            break;
        }
    }
    out.values = std::move(r);
    return out;
}

// ---------------------------------------------------------------------------
// Group LASSO

GroupLasso::GroupLasso(const ComplexMatrix& A) : A_(A), AH_(A.adjoint()) {
    step_ = 1.0 / hermitian_max_eigenvalue(multiply(A_, AH_));
}

double GroupLasso::lambda_max(const ComplexMatrix& Y) const {
    const ComplexMatrix C = multiply(AH_, Y);
    return (C.re.rowwise().squaredNorm() + C.im.rowwise().squaredNorm()).cwiseSqrt().maxCoeff();
}

double GroupLasso::objective(const ComplexMatrix& Y, const ComplexMatrix& X, double lambda) const {
    const ComplexMatrix R = Y - multiply(A_, X);
    const Eigen::VectorXd norms = (X.re.rowwise().squaredNorm() + X.im.rowwise().squaredNorm()).cwiseSqrt();
    return 0.5 * R.squared_norm() + lambda * norms.sum();
}

GroupLassoResult GroupLasso::solve(const ComplexMatrix& Y, const SolverConfig& cfg) const {
    cfg.validate();
    if (Y.rows() != A_.rows()) throw DimensionError("GroupLasso: Y has the wrong number of rows");
    const Index N = A_.cols();
    const Index M = Y.cols();
    GroupLassoResult out;
    const Index L = A_.rows();
    ComplexMatrix X(N, M);
    ComplexMatrix V(N, M);
    Eigen::MatrixXd Rre(L, M), Rim(L, M);
    for (int it = 1; it <= cfg.max_iterations; ++it) {
        Rre.noalias() = A_.re * X.re;
        Rre.noalias() -= A_.im * X.im;
        Rre -= Y.re;
        Rim.noalias() = A_.re * X.im;
        Rim.noalias() += A_.im * X.re;
        Rim -= Y.im;
        V.re = X.re;
        V.re.noalias() -= step_ * (AH_.re * Rre);
        V.re.noalias() += step_ * (AH_.im * Rim);
        V.im = X.im;
        V.im.noalias() -= step_ * (AH_.re * Rim);
        V.im.noalias() -= step_ * (AH_.im * Rre);
        double max_change = 0.0;
        double max_entry = 0.0;
        for (Index n = 0; n < N; ++n) {
            const double norm = std::sqrt(V.re.row(n).squaredNorm() + V.im.row(n).squaredNorm());
            const double shrink = norm > 0.0 ? std::max(0.0, 1.0 - step_ * cfg.lambda / norm) : 0.0;
            V.re.row(n) *= shrink;
            V.im.row(n) *= shrink;
            max_change = std::max({max_change, (V.re.row(n) - X.re.row(n)).cwiseAbs().maxCoeff(),
                                   (V.im.row(n) - X.im.row(n)).cwiseAbs().maxCoeff()});
            max_entry = std::max({max_entry, X.re.row(n).cwiseAbs().maxCoeff(), X.im.row(n).cwiseAbs().maxCoeff()});
        }
        std::swap(X, V);
        out.iterations = it;
        if (cfg.trace) out.objective_trace.push_back(objective(Y, X, cfg.lambda));
        if (max_change <= cfg.tolerance * std::max(1.0, max_entry)) {
            out.converged = true;
            break;
        }
    }
    out.row_norms = (X.re.rowwise().squaredNorm() + X.im.rowwise().squaredNorm()).cwiseSqrt();
    out.X = std::move(X);
    return out;
}

// ---------------------------------------------------------------------------
// MMV-AMP

namespace {

struct AmpRun {
    Eigen::VectorXd posterior;
    int iterations = 0;
    bool diverged = false;
};

AmpRun run_amp(const ComplexMatrix& Y, const ComplexMatrix& As, const ComplexMatrix& AsH, double beta, double p,
               const SolverConfig& cfg, double damping) {
    const Index L = As.rows();
    const Index N = As.cols();
    const Index M = Y.cols();
    const double log_prior = std::log(p / (1.0 - p));
    const double inv_l = 1.0 / static_cast<double>(L);

    AmpRun run;
    run.posterior = Eigen::VectorXd::Constant(N, p);
    ComplexMatrix X(N, M);
    ComplexMatrix R = Y;
    std::vector<double> residual_norms;
    for (int it = 1; it <= cfg.max_iterations; ++it) {
        const double tau2 = std::max(R.squared_norm() / static_cast<double>(L * M), 1e-12);
        const ComplexMatrix Xt = X + multiply(AsH, R);
        const double shrink = beta / (beta + tau2);
        const double kappa = beta / (tau2 * (beta + tau2));
        const double llr_offset = static_cast<double>(M) * std::log(tau2 / (beta + tau2)) + log_prior;

        ComplexMatrix next(N, M);
        ComplexMatrix onsager(M, M);
        for (Index n = 0; n < N; ++n) {
            const double q = Xt.re.row(n).squaredNorm() + Xt.im.row(n).squaredNorm();
            const double phi = 1.0 / (1.0 + std::exp(-(llr_offset + q * kappa)));
            run.posterior(n) = phi;
            const double g = phi * shrink;
            const double dg = shrink * phi * (1.0 - phi) * kappa;
            next.re.row(n) = g * Xt.re.row(n);
            next.im.row(n) = g * Xt.im.row(n);
            // Holomorphic Jacobian of the row denoiser: g I + g' x^H x.
            onsager.re.diagonal().array() += g;
            const auto xr = Xt.re.row(n);
            const auto xi = Xt.im.row(n);
            onsager.re.noalias() += dg * (xr.transpose() * xr + xi.transpose() * xi);
            onsager.im.noalias() += dg * (xr.transpose() * xi - xi.transpose() * xr);
        }
        onsager.re *= inv_l;
        onsager.im *= inv_l;
        if (damping > 0.0) {
            next.re = (1.0 - damping) * next.re + damping * X.re;
            next.im = (1.0 - damping) * next.im + damping * X.im;
        }
        const double change = std::sqrt((next - X).squared_norm());
        const double size = std::sqrt(next.squared_norm());
        R = Y - multiply(As, next) + multiply(R, onsager);
        X = std::move(next);
        run.iterations = it;

        const double rn = std::sqrt(R.squared_norm());
        residual_norms.push_back(rn);
        if (!std::isfinite(rn)) {
            run.diverged = true;
            break;
        }
        if (residual_norms.size() > 5) {
            const double before = residual_norms[residual_norms.size() - 6];
            if (rn > 10.0 * before && before > 0.0) {
                run.diverged = true;
                break;
            }
        }
        if (change <= cfg.tolerance * std::max(size, 1e-300)) break;
    }
    return run;
}

} // namespace

AmpResult mmv_amp(const ComplexMatrix& Y, const ComplexMatrix& A, const AmpPrior& prior, const SolverConfig& cfg) {
    cfg.validate();
    if (!(prior.activity > 0.0 && prior.activity < 1.0)) throw ConfigError("mmv_amp: activity must lie in (0, 1)");
    if (!(prior.channel_variance > 0.0)) throw ConfigError("mmv_amp: channel variance must be positive");
    if (Y.rows() != A.rows()) throw DimensionError("mmv_amp: Y and A row counts differ");

    // Rescale to unit average column norm; X absorbs the factor.
    const double col_scale = std::sqrt(A.squared_norm() / static_cast<double>(A.cols()));
    ComplexMatrix As = A;
    As.re /= col_scale;
    As.im /= col_scale;
    const ComplexMatrix AsH = As.adjoint();
    const double beta = col_scale * col_scale * prior.channel_variance;

    AmpResult out;
    AmpRun run = run_amp(Y, As, AsH, beta, prior.activity, cfg, cfg.damping);
    if (run.diverged && cfg.damping == 0.0) {
        out.retried_with_damping = true;
        run = run_amp(Y, As, AsH, beta, prior.activity, cfg, kAmpRetryDamping);
    }
    out.posterior = std::move(run.posterior);
    out.iterations = run.iterations;
    out.diverged = run.diverged;
    return out;
}

// ---------------------------------------------------------------------------
// Covariance ML

double ml_negative_log_likelihood(const ComplexMatrix& S, const ComplexMatrix& A, const Eigen::VectorXd& gamma,
                                  double sigma2) {
    if (gamma.size() != A.cols()) throw DimensionError("ml: gamma length does not match A");
    const ComplexMatrix sigma = model_covariance(A, gamma, sigma2);
    const Eigen::LLT<Eigen::MatrixXd> llt(real_embedding(sigma));
    if (llt.info() != Eigen::Success) throw InternalError("ml: model covariance is not positive definite");
    // The real embedding doubles every eigenvalue's multiplicity.
    const double logdet = 0.5 * 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    const Eigen::MatrixXd solved = llt.solve(real_embedding(S));
    return logdet + 0.5 * solved.trace();
}

double ml_coordinate_step(double q, double s, double gamma_n) {
    if (!(q > 0.0)) throw InternalError("ml: non-positive quadratic form");
    return std::max((s - q) / (q * q), -gamma_n);
}

MlResult cov_ml(const ComplexMatrix& S, const ComplexMatrix& A, double sigma2, const SolverConfig& cfg) {
    cfg.validate();
    if (!(sigma2 > 0.0)) throw ConfigError("cov_ml: sigma2 must be positive");
    const Index L = A.rows();
    const Index N = A.cols();
    if (S.rows() != L || S.cols() != L) throw DimensionError("cov_ml: covariance shape does not match A");

    MlResult out;
    out.gamma = Eigen::VectorXd::Zero(N);
    ComplexMatrix inv(L, L);
    inv.re.diagonal().setConstant(1.0 / sigma2);
    double nll = ml_negative_log_likelihood(S, A, out.gamma, sigma2);
    if (cfg.trace) out.nll_trace.push_back(nll);

    ComplexMatrix a(L, 1);
    for (int sweep = 1; sweep <= cfg.max_iterations; ++sweep) {
        const double start = nll;
        for (Index n = 0; n < N; ++n) {
            a.re = A.re.col(n);
            a.im = A.im.col(n);
            const ComplexMatrix v = multiply(inv, a);
            const double q = a.re.col(0).dot(v.re.col(0)) + a.im.col(0).dot(v.im.col(0));
            const ComplexMatrix w = multiply(S, v);
            const double s = v.re.col(0).dot(w.re.col(0)) + v.im.col(0).dot(w.im.col(0));
            const double d = ml_coordinate_step(q, s, out.gamma(n));
            if (d == 0.0) continue;
            out.gamma(n) += d;
            const double denom = 1.0 + d * q;
            const double c = d / denom;
            // inv -= c v v^H
            inv.re.noalias() -= c * (v.re * v.re.transpose() + v.im * v.im.transpose());
            inv.im.noalias() -= c * (v.im * v.re.transpose() - v.re * v.im.transpose());
            nll += std::log(denom) - d * s / denom;
            if (cfg.trace) out.nll_trace.push_back(nll);
        }
        out.sweeps = sweep;
        if (std::abs(start - nll) <= cfg.tolerance * std::abs(start)) {
            out.converged = true;
            break;
        }
    }
    out.gamma = out.gamma.cwiseMax(0.0);
    return out;
}

} // namespace jssr
