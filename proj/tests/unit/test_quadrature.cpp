#include "dichotomy/quadrature.hpp"

#include "dichotomy/growth.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace dichotomy;

TEST_CASE("polynomials and smooth integrands") {
    const QuadSettings q;
    CHECK(integrate([](double x) { return x * x; }, 0.0, 3.0, q).value == doctest::Approx(9.0).epsilon(1e-14));
    CHECK(integrate([](double x) { return std::exp(-x); }, 0.0, 10.0, q).value ==
          doctest::Approx(1.0 - std::exp(-10.0)).epsilon(1e-12));
    CHECK(integrate([](double x) { return std::sin(x); }, 0.0, M_PI, q).value == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(integrate([](double) { return 1.0; }, 2.0, 2.0, q).value == 0.0);
}

TEST_CASE("reversed limits flip the sign") {
    const QuadSettings q;
    const auto f = [](double x) { return x * x * x + 1.0; };
    CHECK(integrate(f, 3.0, 1.0, q).value == doctest::Approx(-integrate(f, 1.0, 3.0, q).value));
}

TEST_CASE("kinks are resolved adaptively") {
    const QuadSettings q;
    const auto r = integrate([](double x) { return std::abs(x - 1.0 / 3.0); }, 0.0, 1.0, q);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(1.0 / 18.0 + 4.0 / 18.0).epsilon(1e-10));
}

TEST_CASE("interval budget is reported") {
    QuadSettings q;
    q.max_intervals = 3;
    const auto r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, q);
    CHECK_FALSE(r.converged);
    QuadSettings generous;
    generous.rel_tol = 1e-6;
    CHECK(integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, generous).value ==
          doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("tail of a power law in mu is exact") {
    // f = (μ′/μ) μ^{−k}; its tail from T is μ(T)^{−k} / k.
    for (const auto& rate : {GrowthRate::exponential(), GrowthRate::polynomial(), GrowthRate::sqrt_shift()}) {
        for (double k : {0.5, 1.0, 3.0}) {
            const auto f = [&](double t) { return rate.log_derivative(t) * std::exp(-k * rate.log_value(t)); };
            const double T = 20.0;
            const auto tail = estimate_tail(f, rate, 0.0, T);
            INFO(rate.description() << " k=" << k);
            CHECK_FALSE(tail.diverging);
            CHECK(tail.decay_rate == doctest::Approx(k).epsilon(1e-9));
            CHECK(tail.value == doctest::Approx(std::exp(-k * rate.log_value(T)) / k).epsilon(1e-9));
        }
    }
}

TEST_CASE("growing integrands are flagged as diverging") {
    const auto rate = GrowthRate::exponential();
    const auto tail = estimate_tail([](double t) { return std::exp(0.2 * t); }, rate, 0.0, 30.0);
    CHECK(tail.diverging);
    CHECK(std::isinf(tail.value));
    const auto flat = estimate_tail([](double) { return 1.0; }, rate, 0.0, 30.0);
    CHECK(flat.diverging);
}

TEST_CASE("zero integrands have no tail") {
    const auto tail = estimate_tail([](double) { return 0.0; }, GrowthRate::exponential(), 0.0, 10.0);
    CHECK_FALSE(tail.diverging);
    CHECK(tail.value == 0.0);
}

TEST_CASE("semi-infinite integral combines body and tail") {
    const auto rate = GrowthRate::polynomial();
    // ∫_0^∞ (t+1)^{−2} dt = 1.
    const auto f = [](double t) { return 1.0 / ((t + 1.0) * (t + 1.0)); };
    const auto r = integrate_to_infinity(f, rate, 0.0, 50.0, QuadSettings{});
    CHECK(r.body.value == doctest::Approx(1.0 - 1.0 / 51.0).epsilon(1e-12));
    CHECK(r.total() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.error() >= r.tail.value);
}
