#include "doctest.h"
#include "support.hpp"

#include "jssr/error.hpp"

using namespace jssr;

TEST_CASE("multiply matches std::complex arithmetic") {
    const ComplexMatrix a = test::random_complex(5, 7, 1);
    const ComplexMatrix b = test::random_complex(7, 3, 2);
    const Eigen::MatrixXcd expect = test::to_std(a) * test::to_std(b);
    CHECK(test::rel_diff(test::to_std(multiply(a, b)), expect) < 1e-14);
}

TEST_CASE("multiply_add adds after the product") {
    const ComplexMatrix a = test::random_complex(3, 4, 3);
    const ComplexMatrix b = test::random_complex(4, 2, 4);
    const ComplexMatrix c = test::random_complex(3, 2, 5);
    CHECK(multiply_add(a, b, c) == multiply(a, b) + c);
}

TEST_CASE("adjoint conjugates and transposes") {
    const ComplexMatrix a = test::random_complex(3, 5, 6);
    CHECK(test::to_std(a.adjoint()) == test::to_std(a).adjoint());
}

TEST_CASE("column blocks") {
    ComplexMatrix a = test::random_complex(2, 6, 7);
    const ComplexMatrix mid = a.col_block(2, 3);
    CHECK(mid.re == a.re.middleCols(2, 3));
    CHECK(mid.im == a.im.middleCols(2, 3));

    ComplexMatrix z(2, 3);
    a.set_col_block(3, z);
    CHECK(a.re.middleCols(3, 3).isZero(0.0));
    CHECK_THROWS_AS(a.set_col_block(4, z), DimensionError);
}

TEST_CASE("shape checks") {
    CHECK_THROWS_AS(multiply(ComplexMatrix(2, 3), ComplexMatrix(2, 3)), DimensionError);
    CHECK_THROWS_AS(ComplexMatrix(2, 3) + ComplexMatrix(3, 2), DimensionError);
    CHECK_THROWS_AS(ComplexMatrix(Eigen::MatrixXd(2, 2), Eigen::MatrixXd(2, 3)), DimensionError);
}

TEST_CASE("squared norm") {
    ComplexMatrix a(1, 2);
    a.re << 3, 0;
    a.im << 4, 1;
    CHECK(a.squared_norm() == doctest::Approx(26.0));
}
