#include "dichotomy/linalg.hpp"

#include "support.hpp"

#include <Eigen/LU>
#include <doctest.h>

using namespace dichotomy;
using testing::mat2;
using testing::vec2;

TEST_CASE("vector norms") {
    const Vector x = vec2(3.0, -4.0);
    CHECK(vector_norm(x, NormKind::max) == 4.0);
    CHECK(vector_norm(x, NormKind::spectral) == doctest::Approx(5.0));
}

TEST_CASE("operator norms") {
    const Matrix a = mat2(1.0, -2.0, 3.0, 0.5);
    CHECK(operator_norm(a, NormKind::max) == 3.5);
    // Largest singular value from the eigenvalues of AᵀA.
    const Matrix ata = a.transpose() * a;
    const double tr = ata.trace();
    const double det = ata.determinant();
    const double smax = std::sqrt(0.5 * (tr + std::sqrt(tr * tr - 4.0 * det)));
    CHECK(operator_norm(a, NormKind::spectral) == doctest::Approx(smax).epsilon(1e-12));
    CHECK(operator_norm(Matrix::Zero(3, 3), NormKind::spectral) == 0.0);
}

TEST_CASE("norm names round trip") {
    for (auto k : {NormKind::max, NormKind::spectral}) CHECK(norm_kind_from_string(to_string(k)) == k);
    CHECK_THROWS_AS((void)norm_kind_from_string("frobenius"), std::invalid_argument);
}

TEST_CASE("range basis and rank of projections") {
    const Matrix p = mat2(1.0, 0.7, 0.0, 0.0);  // oblique projection onto e1
    CHECK(numerical_rank(p) == 1);
    const Matrix b = range_basis(p);
    REQUIRE(b.cols() == 1);
    CHECK(std::abs(std::abs(b(0, 0)) - 1.0) < 1e-12);
    CHECK(std::abs(b(1, 0)) < 1e-12);
    CHECK(range_basis(Matrix::Zero(2, 2)).cols() == 0);
    CHECK(range_basis(Matrix::Identity(3, 3)).cols() == 3);
}

TEST_CASE("relative Frobenius residual") {
    const Matrix a = Matrix::Identity(2, 2);
    CHECK(relative_frobenius(a, a) == 0.0);
    CHECK(relative_frobenius(2.0 * a, a) == doctest::Approx(1.0));
    // The floor keeps tiny references from inflating the residual.
    CHECK(relative_frobenius(a * 1e-12, Matrix::Zero(2, 2)) == doctest::Approx(std::sqrt(2.0) * 1e-12));
}
