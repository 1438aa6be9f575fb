// SPDX-License-Identifier: Apache-2.0
#include "jssr/covariance_model.hpp"

#include "jssr/error.hpp"

#include <cmath>

namespace jssr {

namespace {

ComplexMatrix vectorize(const ComplexMatrix& m) {
    return {Eigen::Map<const Eigen::MatrixXd>(m.re.data(), m.re.size(), 1),
            Eigen::Map<const Eigen::MatrixXd>(m.im.data(), m.im.size(), 1)};
}

} // namespace

ComplexMatrix khatri_rao_conj(const ComplexMatrix& A) {
    const Index L = A.rows();
    ComplexMatrix K(L * L, A.cols());
    for (Index n = 0; n < A.cols(); ++n) {
        for (Index l = 0; l < L; ++l) {
            // conj(a_l) * a_k
            const double cr = A.re(l, n);
            const double ci = -A.im(l, n);
            for (Index k = 0; k < L; ++k) {
                K.re(k + l * L, n) = cr * A.re(k, n) - ci * A.im(k, n);
                K.im(k + l * L, n) = cr * A.im(k, n) + ci * A.re(k, n);
            }
        }
    }
    return K;
}

ComplexMatrix sample_covariance(const ComplexMatrix& Y) {
    if (Y.cols() < 1) throw DimensionError("sample_covariance: no columns");
    ComplexMatrix S = multiply(Y, Y.adjoint());
    const double scale = 1.0 / static_cast<double>(Y.cols());
    S.re *= scale;
    S.im *= scale;
    return S;
}

ComplexMatrix model_covariance(const ComplexMatrix& A, const Eigen::VectorXd& power, double sigma2) {
    if (power.size() != A.cols()) throw DimensionError("model_covariance: power length does not match A");
    ComplexMatrix scaled = A;
    for (Index n = 0; n < A.cols(); ++n) {
        scaled.re.col(n) *= power(n);
        scaled.im.col(n) *= power(n);
    }
    ComplexMatrix S = multiply(scaled, A.adjoint());
    S.re.diagonal().array() += sigma2;
    return S;
}

double Eq4Decomposition::relative_residual() const {
    const ComplexMatrix rest = linear_term + vectorize(E1) + vectorize(E2);
    const double denom = std::sqrt(lhs.squared_norm());
    const double num = std::sqrt((lhs - rest).squared_norm());
    return denom > 0.0 ? num / denom : num;
}

Eq4Decomposition eq4_decompose(const ComplexMatrix& A, const ComplexMatrix& X, const ComplexMatrix& Z) {
    const Index L = A.rows();
    const Index N = A.cols();
    const Index M = X.cols();
    if (X.rows() != N || Z.rows() != L || Z.cols() != M) throw DimensionError("eq4_decompose: shapes do not conform");
    const double inv_m = 1.0 / static_cast<double>(M);

    Eq4Decomposition d;
    d.lhs = vectorize(sample_covariance(apply_sensing(A, X, Z)));

    d.power.resize(N);
    for (Index n = 0; n < N; ++n) {
        d.power(n) = (X.re.row(n).squaredNorm() + X.im.row(n).squaredNorm()) * inv_m;
    }
    const ComplexMatrix K = khatri_rao_conj(A);
    d.linear_term = {K.re * d.power, K.im * d.power};

    // Cross-device Gram of the signal rows: C(i, j) = sum_m x_m(i) conj(x_m(j)).
    const ComplexMatrix C = multiply(X, X.adjoint());
    d.E1 = ComplexMatrix(L, L);
    for (Index k = 0; k < L; ++k) {
        for (Index l = 0; l < L; ++l) {
            double er = 0.0;
            double ei = 0.0;
            for (Index i = 0; i < N; ++i) {
                for (Index j = 0; j < N; ++j) {
                    if (i == j) continue;
                    // A(k, i) conj(A(l, j)) C(i, j)
                    const double pr = A.re(k, i) * A.re(l, j) + A.im(k, i) * A.im(l, j);
                    const double pi = A.im(k, i) * A.re(l, j) - A.re(k, i) * A.im(l, j);
                    er += pr * C.re(i, j) - pi * C.im(i, j);
                    ei += pr * C.im(i, j) + pi * C.re(i, j);
                }
            }
            d.E1.re(k, l) = er * inv_m;
            d.E1.im(k, l) = ei * inv_m;
        }
    }

    const ComplexMatrix AX = multiply(A, X);
    const ComplexMatrix cross = multiply(AX, Z.adjoint());
    d.E2 = cross + cross.adjoint() + multiply(Z, Z.adjoint());
    d.E2.re *= inv_m;
    d.E2.im *= inv_m;
    return d;
}

AsymptoticReport asymptotic_covariance_check(const ComplexMatrix& A, const ActivityVector& activity, double sigma2,
                                             Index M, std::uint64_t seed, int trials) {
    if (activity.size() != A.cols()) throw DimensionError("asymptotic check: activity length does not match A");
    if (M < 1 || trials < 1) throw ConfigError("asymptotic check: M and trials must be positive");
    const Index L = A.rows();
    Eigen::VectorXd power(A.cols());
    for (Index n = 0; n < A.cols(); ++n) power(n) = activity[n];
    const ComplexMatrix sigma = model_covariance(A, power, sigma2);
    const double scale = std::sqrt(sigma.squared_norm());

    AsymptoticReport rep;
    rep.M = M;
    rep.trials = trials;
    double sum = 0.0;
    double sum_e1 = 0.0;
    double sum_e2 = 0.0;
    for (int t = 0; t < trials; ++t) {
        Rng channel_rng(seed, StreamDomain::Channel, static_cast<std::uint64_t>(t));
        const JointSignal x = build_signal(activity, sample_channels(A.cols(), M, channel_rng));
        const ComplexMatrix Z = sample_noise_for(L, M, sigma2, seed, t);
        const ComplexMatrix S = sample_covariance(apply_sensing(A, x.X, Z));
        const double res = std::sqrt((S - sigma).squared_norm()) / (scale > 0.0 ? scale : 1.0);
        sum += res * res;

        const ComplexMatrix AX = multiply(A, x.X);
        ComplexMatrix AXXA = multiply(AX, AX.adjoint());
        const double inv_m = 1.0 / static_cast<double>(M);
        AXXA.re *= inv_m;
        AXXA.im *= inv_m;
        // E1 = AXX^HA^H/M - A diag(r) A^H with r the realized row powers.
        Eigen::VectorXd realized(A.cols());
        for (Index n = 0; n < A.cols(); ++n) {
            realized(n) = (x.X.re.row(n).squaredNorm() + x.X.im.row(n).squaredNorm()) * inv_m;
        }
        const ComplexMatrix e1 = AXXA - model_covariance(A, realized, 0.0);
        ComplexMatrix e2 = S - AXXA;
        e2.re.diagonal().array() -= sigma2;
        const double norm = scale > 0.0 ? scale : 1.0;
        sum_e1 += e1.squared_norm() / (norm * norm);
        sum_e2 += e2.squared_norm() / (norm * norm);
    }
    rep.residual = std::sqrt(sum / trials);
    rep.e1_residual = std::sqrt(sum_e1 / trials);
    rep.e2_residual = std::sqrt(sum_e2 / trials);
    return rep;
}

} // namespace jssr
