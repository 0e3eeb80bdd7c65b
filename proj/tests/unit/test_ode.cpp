#include "dichotomy/ode.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace dichotomy;

namespace {

Matrix diag2(double a, double b) { return testing::mat2(a, 0.0, 0.0, b); }

}  // namespace

TEST_CASE("constant coefficients match the exponential") {
    const CoefficientFn a = [](double) { return diag2(-2.0, 3.0); };
    const Matrix u = propagate(a, Matrix::Identity(2, 2), 0.0, 1.0);
    CHECK(testing::rel_err(u(0, 0), std::exp(-2.0)) <= 1e-6);
    CHECK(testing::rel_err(u(1, 1), std::exp(3.0)) <= 1e-6);
    CHECK(std::abs(u(0, 1)) == 0.0);
}

TEST_CASE("zero field leaves the identity") {
    const CoefficientFn a = [](double) { return Matrix::Zero(3, 3); };
    CHECK(propagate(a, Matrix::Identity(3, 3), 0.5, 4.0).isApprox(Matrix::Identity(3, 3)));
}

TEST_CASE("separable scalar equations") {
    const CoefficientFn a = [](double t) { return diag2(-1.0 / (t + 1.0), 1.0 / (t + 1.0)); };
    for (double t : {1.0, 4.0, 10.0}) {
        const Matrix u = propagate(a, Matrix::Identity(2, 2), 0.0, t);
        CHECK(testing::rel_err(u(0, 0), 1.0 / (t + 1.0)) <= 1e-6);
        CHECK(testing::rel_err(u(1, 1), t + 1.0) <= 1e-6);
    }
}

TEST_CASE("rotation preserves norms") {
    const CoefficientFn a = [](double) { return testing::mat2(0.0, 1.0, -1.0, 0.0); };
    const Matrix u = propagate(a, Matrix::Identity(2, 2), 0.0, 3.0);
    CHECK(u(0, 0) == doctest::Approx(std::cos(3.0)).epsilon(1e-7));
    CHECK(u(0, 1) == doctest::Approx(std::sin(3.0)).epsilon(1e-7));
}

TEST_CASE("backward integration inverts forward integration") {
    const CoefficientFn a = [](double t) { return testing::mat2(-1.0, std::sin(t), 0.5, 0.3); };
    const Matrix fwd = propagate(a, Matrix::Identity(2, 2), 0.0, 2.0);
    const Matrix back = propagate(a, fwd, 2.0, 0.0);
    CHECK((back - Matrix::Identity(2, 2)).norm() <= 1e-6);
}

TEST_CASE("results are deterministic") {
    const CoefficientFn a = [](double t) { return testing::mat2(-1.0, t, 0.0, 2.0); };
    const Matrix u1 = propagate(a, Matrix::Identity(2, 2), 0.0, 3.0);
    const Matrix u2 = propagate(a, Matrix::Identity(2, 2), 0.0, 3.0);
    CHECK(u1 == u2);
}

TEST_CASE("blow-up exhausts the step control") {
    const CoefficientFn a = [](double t) {
        Matrix m(1, 1);
        m(0, 0) = 1.0 / ((1.0 - t) * (1.0 - t));
        return m;
    };
    OdeSettings s;
    s.max_steps = 20000;
    CHECK_THROWS_AS((void)propagate(a, Matrix::Identity(1, 1), 0.0, 2.0, s), IntegrationError);
}
