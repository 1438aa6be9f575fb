#include "doctest.h"
#include "support.hpp"

#include "jssr/covariance_model.hpp"
#include "jssr/error.hpp"

#include <cmath>

using namespace jssr;

TEST_CASE("Khatri-Rao columns are vec(a a^H)") {
    const ComplexMatrix A = test::random_complex(3, 4, 1);
    const ComplexMatrix K = khatri_rao_conj(A);
    const Eigen::MatrixXcd Ac = test::to_std(A);
    for (Index n = 0; n < 4; ++n) {
        const Eigen::MatrixXcd outer = Ac.col(n) * Ac.col(n).adjoint();
        const Eigen::Map<const Eigen::VectorXcd> v(outer.data(), 9);
        CHECK(test::rel_diff(Eigen::MatrixXcd(test::to_std(K).col(n)), Eigen::MatrixXcd(v)) < 1e-14);
    }
}

TEST_CASE("Eq4 identity on random instances") {
    for (std::uint32_t s = 0; s < 100; ++s) {
        const ComplexMatrix A = test::random_complex(4, 10, 1000 + s);
        const ComplexMatrix X = test::random_complex(10, 3, 2000 + s);
        const ComplexMatrix Z = test::random_complex(4, 3, 3000 + s, 0.3);
        const Eq4Decomposition d = eq4_decompose(A, X, Z);
        CHECK(d.relative_residual() < 1e-10);

        const Eigen::MatrixXcd Y = test::to_std(A) * test::to_std(X) + test::to_std(Z);
        const Eigen::MatrixXcd C = Y * Y.adjoint() / 3.0;
        const Eigen::Map<const Eigen::VectorXcd> v(C.data(), 16);
        CHECK(test::rel_diff(test::to_std(d.lhs), Eigen::MatrixXcd(v)) < 1e-13);
    }
}

TEST_CASE("Eq4 terms vanish in their degenerate cases") {
    const ComplexMatrix A = test::random_complex(3, 5, 4);
    const ComplexMatrix X = test::random_complex(5, 4, 5);
    const Eq4Decomposition noiseless = eq4_decompose(A, X, ComplexMatrix(3, 4));
    CHECK(noiseless.E2.squared_norm() == 0.0);

    ComplexMatrix one(5, 4);
    one.re.row(2) = X.re.row(2);
    one.im.row(2) = X.im.row(2);
    const Eq4Decomposition single = eq4_decompose(A, one, test::random_complex(3, 4, 6));
    CHECK(single.E1.squared_norm() == 0.0);
    CHECK(single.relative_residual() < 1e-12);
    CHECK(single.power(2) == doctest::Approx(X.re.row(2).squaredNorm() / 4 + X.im.row(2).squaredNorm() / 4));
    CHECK_THROWS_AS(eq4_decompose(A, X, ComplexMatrix(3, 3)), DimensionError);
}

TEST_CASE("model and sample covariance") {
    const ComplexMatrix A = test::random_complex(3, 5, 7);
    Eigen::VectorXd r(5);
    r << 1, 0, 2, 0, 0.5;
    const Eigen::MatrixXcd Ac = test::to_std(A);
    const Eigen::MatrixXcd expect =
        Ac * r.cast<std::complex<double>>().asDiagonal() * Ac.adjoint() + 0.1 * Eigen::MatrixXcd::Identity(3, 3);
    CHECK(test::rel_diff(test::to_std(model_covariance(A, r, 0.1)), expect) < 1e-14);

    const ComplexMatrix Y = test::random_complex(3, 6, 8);
    const Eigen::MatrixXcd S = test::to_std(Y) * test::to_std(Y).adjoint() / 6.0;
    CHECK(test::rel_diff(test::to_std(sample_covariance(Y)), S) < 1e-14);
}

TEST_CASE("covariance limit: trivial cases") {
    const ComplexMatrix A = test::random_complex(4, 8, 9);
    const AsymptoticReport silent = asymptotic_covariance_check(A, ActivityVector(8), 0.0, 50, 1);
    CHECK(silent.residual == 0.0);

    ComplexMatrix I(4, 4);
    I.re.setIdentity();
    ActivityVector one(4);
    one[1] = 1;
    Rng rng(2);
    const JointSignal x = build_signal(one, sample_channels(4, 20, rng));
    const ComplexMatrix S = sample_covariance(apply_sensing(I, x.X, ComplexMatrix(4, 20)));
    for (Index i = 0; i < 4; ++i) {
        for (Index j = 0; j < 4; ++j) {
            if (i == 1 && j == 1) {
                CHECK(S.re(i, j) > 0.0);
            } else {
                CHECK(S.re(i, j) == 0.0);
                CHECK(S.im(i, j) == 0.0);
            }
        }
    }
}

TEST_CASE("empirical covariance approaches its limit") {
    GroupSparsityConfig g{20, 4, 0.5, 0.5};
    Rng rng(3);
    ActivityVector alpha = sample_activity(g, rng);
    alpha[0] = 1;
    const ComplexMatrix A = test::random_complex(6, 20, 10, std::sqrt(0.5));
    const AsymptoticReport big = asymptotic_covariance_check(A, alpha, 0.1, 10000, 4, 3);
    CHECK(big.residual < 0.1);
    CHECK(big.e1_residual < 0.1);
    CHECK(big.e2_residual < 0.02);

    const AsymptoticReport small = asymptotic_covariance_check(A, alpha, 0.1, 10, 5, 200);
    const double ratio = small.residual / big.residual;
    CHECK(ratio > std::sqrt(1000.0) / 3.0);
    CHECK(ratio < std::sqrt(1000.0) * 3.0);
}
