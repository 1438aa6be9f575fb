#include "doctest.h"
#include "support.hpp"

#include "jssr/baselines.hpp"
#include "jssr/covariance_model.hpp"
#include "jssr/error.hpp"
#include "jssr/thresholding.hpp"

#include <cmath>
#include <random>

using namespace jssr;

namespace {

ComplexMatrix identity(Index n) {
    ComplexMatrix I(n, n);
    I.re.setIdentity();
    return I;
}

bool non_increasing(const std::vector<double>& v, double slack = 1e-12) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[i - 1] + slack * std::max(1.0, std::abs(v[i - 1]))) return false;
    }
    return true;
}

long double ml_line(long double d, long double q, long double s) {
    return std::log1p(d * q) - d * s / (1.0L + d * q);
}

long double golden_section(long double lo, long double hi, long double q, long double s) {
    const long double g = (std::sqrt(5.0L) - 1.0L) / 2.0L;
    long double a = lo, b = hi;
    long double c = b - g * (b - a), d = a + g * (b - a);
    long double fc = ml_line(c, q, s), fd = ml_line(d, q, s);
    for (int it = 0; it < 400 && b - a > 1e-15L * std::max(1.0L, std::abs(a)); ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = ml_line(c, q, s);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = ml_line(d, q, s);
        }
    }
    return (a + b) / 2.0L;
}

} // namespace

TEST_CASE("gaussian pilots") {
    CHECK(gaussian_pilots(5, 3, 9).re == gaussian_pilots(5, 3, 9).re);
    CHECK(gaussian_pilots(5, 3, 9).im == gaussian_pilots(5, 3, 9).im);
    const ComplexMatrix A = gaussian_pilots(1000, 1000, 4);
    const double per_entry = A.squared_norm() / 1e6;
    CHECK(per_entry == doctest::Approx(1.0).epsilon(0.01));
    CHECK(A.re.array().square().mean() == doctest::Approx(0.5).epsilon(0.01));
    const ComplexMatrix B = gaussian_pilots(20000, 10, 5);
    CHECK(B.squared_norm() / 20000.0 == doctest::Approx(10.0).epsilon(0.02));
}

TEST_CASE("power score") {
    CHECK(power_score(0.0) == 0.0);
    CHECK(power_score(1.0) == 0.5);
    CHECK(power_score(1e6) < 1.0);
    CHECK(power_score(2.0) > power_score(1.0));
}

TEST_CASE("solver config validation") {
    SolverConfig c;
    c.max_iterations = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.lambda = -1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("covariance LASSO") {
    const ComplexMatrix A = test::random_complex(4, 8, 11, std::sqrt(0.5));
    const CovarianceLasso solver(A);
    const ComplexMatrix Y = test::random_complex(4, 6, 12);
    const ComplexMatrix S = sample_covariance(Y);

    SUBCASE("large lambda kills every entry") {
        SolverConfig c;
        c.lambda = solver.lambda_max(S);
        CHECK(solver.solve(S, c).values.isZero(0.0));
    }

    SUBCASE("noiseless covariance is recovered with lambda 0") {
        Eigen::VectorXd r(8);
        r << 1.0, 0.0, 0.5, 0.0, 2.0, 0.0, 0.0, 0.3;
        SolverConfig c;
        c.max_iterations = 1000000;
        c.tolerance = 1e-15;
        const PowerEstimate est = solver.solve(model_covariance(A, r, 0.0), c);
        CHECK((est.values - r).cwiseAbs().maxCoeff() < 1e-6);
    }

    SUBCASE("objective descent and long-run reference") {
        SolverConfig c;
        c.lambda = 0.05 * solver.lambda_max(S);
        c.trace = true;
        c.max_iterations = 50000;
        c.tolerance = 1e-14;
        const PowerEstimate est = solver.solve(S, c);
        CHECK(non_increasing(est.objective_trace));
        CHECK(est.objective_trace.back() == doctest::Approx(solver.objective(S, est.values, c.lambda)).epsilon(1e-12));

        SolverConfig ref = c;
        ref.trace = false;
        ref.max_iterations = 1000000;
        ref.tolerance = 0.0;
        const PowerEstimate long_run = solver.solve(S, ref);
        const double f_ref = solver.objective(S, long_run.values, c.lambda);
        const double f = solver.objective(S, est.values, c.lambda);
        CHECK(std::abs(f - f_ref) <= 1e-8 * std::max(1.0, std::abs(f_ref)));
    }

    SUBCASE("objective is evaluated from the residual") {
        Eigen::VectorXd r = Eigen::VectorXd::LinSpaced(8, 0.0, 0.7);
        const ComplexMatrix R = S - model_covariance(A, r, 0.0);
        CHECK(solver.objective(S, r, 0.3) == doctest::Approx(0.5 * R.squared_norm() + 0.3 * r.sum()).epsilon(1e-12));
    }
}

TEST_CASE("group LASSO") {
    const ComplexMatrix A = test::random_complex(5, 10, 21, std::sqrt(0.5));
    const GroupLasso solver(A);
    const ComplexMatrix Y = test::random_complex(5, 2, 22);

    SUBCASE("large lambda kills every row") {
        SolverConfig c;
        c.lambda = solver.lambda_max(Y);
        CHECK(solver.solve(Y, c).row_norms.maxCoeff() <= 1e-12 * c.lambda);
        c.lambda *= 1.0 + 1e-9;
        CHECK(solver.solve(Y, c).row_norms.isZero(0.0));
    }

    SUBCASE("identity sensing recovers X in one step") {
        const ComplexMatrix X = test::random_complex(6, 3, 23);
        const GroupLasso id(identity(6));
        SolverConfig c;
        c.max_iterations = 1;
        const GroupLassoResult res = id.solve(X, c);
        CHECK(test::rel_diff(test::to_std(res.X), test::to_std(X)) < 1e-15);
    }

    SUBCASE("objective descent and long-run reference") {
        SolverConfig c;
        c.lambda = 0.1 * solver.lambda_max(Y);
        c.trace = true;
        c.max_iterations = 50000;
        c.tolerance = 1e-14;
        const GroupLassoResult res = solver.solve(Y, c);
        CHECK(non_increasing(res.objective_trace));

        SolverConfig ref = c;
        ref.trace = false;
        ref.max_iterations = 1000000;
        ref.tolerance = 0.0;
        const GroupLassoResult long_run = solver.solve(Y, ref);
        const double f_ref = solver.objective(Y, long_run.X, c.lambda);
        const double f = solver.objective(Y, res.X, c.lambda);
        CHECK(std::abs(f - f_ref) <= 1e-8 * std::max(1.0, std::abs(f_ref)));
        for (Index n = 0; n < 10; ++n) {
            const double norm = std::sqrt(res.X.re.row(n).squaredNorm() + res.X.im.row(n).squaredNorm());
            CHECK(res.row_norms(n) == doctest::Approx(norm));
        }
    }
}

TEST_CASE("MMV-AMP") {
    const AmpPrior prior{0.15, 1.0};
    SolverConfig c;
    c.max_iterations = 50;
    c.tolerance = 1e-8;

    SUBCASE("zero measurements favour inactivity") {
        const AmpResult res = mmv_amp(ComplexMatrix(8, 4), gaussian_pilots(12, 8, 1), prior, c);
        CHECK(res.posterior.maxCoeff() < prior.activity);
    }

    SUBCASE("identity sensing with tiny noise") {
        const GroupSparsityConfig g{12, 12, 0.3, 0.3};
        for (Index i = 0; i < 20; ++i) {
            const JointSignal x = generate_sample(g, 4, 31, i);
            const ComplexMatrix Y = apply_sensing(identity(12), x.X, sample_noise_for(12, 4, 1e-8, 32, i));
            const AmpResult res = mmv_amp(Y, identity(12), AmpPrior{0.3, 1.0}, c);
            CHECK_FALSE(res.diverged);
            CHECK(apply_threshold(res.posterior, 0.5) == x.activity);
        }
    }

    SUBCASE("beats row-norm thresholding of A^H Y") {
        const GroupSparsityConfig g{12, 12, 0.15, 0.15};
        const Index T = 2000;
        const ComplexMatrix A = gaussian_pilots(12, 8, 41);
        const ComplexMatrix AH = A.adjoint();
        Eigen::MatrixXd amp_scores(12, T), norm_scores(12, T);
        std::vector<ActivityVector> truth;
        for (Index t = 0; t < T; ++t) {
            const JointSignal x = generate_sample(g, 4, 42, t);
            const ComplexMatrix Y = apply_sensing(A, x.X, sample_noise_for(8, 4, 0.1, 43, t));
            amp_scores.col(t) = mmv_amp(Y, A, prior, c).posterior;
            const ComplexMatrix R = multiply(AH, Y);
            const Eigen::VectorXd p = (R.re.rowwise().squaredNorm() + R.im.rowwise().squaredNorm()) / 4.0;
            norm_scores.col(t) = p.unaryExpr([](double v) { return power_score(v / 8.0); });
            truth.push_back(x.activity);
        }
        const double amp_err = calibrate_threshold(amp_scores, truth).error_rate;
        const double norm_err = calibrate_threshold(norm_scores, truth).error_rate;
        MESSAGE("amp " << amp_err << " row-norm " << norm_err);
        CHECK(amp_err <= norm_err);
    }
}

TEST_CASE("ML coordinate step matches golden-section search") {
    std::mt19937 gen(5);
    std::uniform_real_distribution<double> u(0.05, 5.0);
    for (int i = 0; i < 200; ++i) {
        const double q = u(gen), s = u(gen) * u(gen), gamma = (i % 3 == 0) ? 0.0 : u(gen);
        const double d = ml_coordinate_step(q, s, gamma);
        const long double free = (static_cast<long double>(s) - q) / (static_cast<long double>(q) * q);
        const long double hi = std::max(4.0L * std::abs(free), 10.0L / q) + gamma;
        const long double oracle = golden_section(-static_cast<long double>(gamma), hi, q, s);
        CHECK(std::abs(d - static_cast<double>(oracle)) <= 1e-8 * std::max(1.0, std::abs(d)));
    }
    CHECK_THROWS_AS(ml_coordinate_step(0.0, 1.0, 0.0), InternalError);
}

TEST_CASE("covariance ML") {
    SUBCASE("diagonal model has the closed form") {
        ComplexMatrix S(5, 5);
        S.re.diagonal() << 0.05, 0.3, 1.7, 0.1, 2.5;
        SolverConfig c;
        c.max_iterations = 3;
        const MlResult res = cov_ml(S, identity(5), 0.1, c);
        for (Index n = 0; n < 5; ++n) CHECK(res.gamma(n) == doctest::Approx(std::max(S.re(n, n) - 0.1, 0.0)).epsilon(1e-12));
    }

    SUBCASE("tracked likelihood is non-increasing and exact") {
        const ComplexMatrix A = gaussian_pilots(20, 6, 51);
        const GroupSparsityConfig g{20, 4, 0.3, 0.1};
        const JointSignal x = generate_sample(g, 8, 52, 0);
        const ComplexMatrix S = sample_covariance(apply_sensing(A, x.X, sample_noise_for(6, 8, 0.1, 53, 0)));
        SolverConfig c;
        c.max_iterations = 20;
        c.tolerance = 0.0;
        c.trace = true;
        const MlResult res = cov_ml(S, A, 0.1, c);
        CHECK(non_increasing(res.nll_trace, 1e-10));
        CHECK((res.gamma.array() >= 0.0).all());
        const double direct = ml_negative_log_likelihood(S, A, res.gamma, 0.1);
        CHECK(res.nll_trace.back() == doctest::Approx(direct).epsilon(1e-9));
    }

    SUBCASE("input errors") {
        const ComplexMatrix A = gaussian_pilots(4, 3, 1);
        CHECK_THROWS_AS(cov_ml(ComplexMatrix(3, 3), A, 0.0, {}), ConfigError);
        CHECK_THROWS_AS(cov_ml(ComplexMatrix(2, 2), A, 0.1, {}), DimensionError);
    }
}

TEST_CASE("Hermitian max eigenvalue") {
    const ComplexMatrix B = test::random_complex(5, 5, 61);
    const Eigen::MatrixXcd H = test::to_std(B) * test::to_std(B).adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    CHECK(hermitian_max_eigenvalue(test::from_std(H)) == doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-12));
}
