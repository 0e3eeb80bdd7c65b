#include "dichotomy/evolution.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace dichotomy;
using testing::mat2;
using testing::vec2;

namespace {

std::vector<TimePair> pair_grid() {
    std::vector<TimePair> out;
    for (double s : testing::range(0.0, 5.0, 0.5)) {
        for (double gap : testing::range(0.0, 5.0, 0.5)) out.push_back({s + gap, s});
    }
    return out;
}

std::vector<Triple> random_triples(std::uint64_t seed, int n, double hi) {
    auto g = testing::rng(seed);
    std::vector<Triple> out;
    for (int i = 0; i < n; ++i) {
        double v[3] = {testing::uniform(g, 0.0, hi), testing::uniform(g, 0.0, hi), testing::uniform(g, 0.0, hi)};
        std::sort(v, v + 3);
        out.push_back({v[2], v[1], v[0]});
    }
    return out;
}

CompatiblePair diag_exp_pair() {
    // U(t,s) = diag(e^{−2(t−s)}, e^{3(t−s)}), P = diag(1, 0).
    return build_diagonal(GrowthRate::exponential(), std::vector<double>{-2.0, 3.0});
}

}  // namespace

TEST_CASE("Example 1 has the displayed stable-branch norm") {
    const auto rate = GrowthRate::exponential();
    for (double eps : {0.0, 0.1}) {
        const auto pair = build_example1(rate, 2.0, 3.0, eps);
        CHECK(pair.norm() == NormKind::max);
        for (const auto& [t, s] : pair_grid()) {
            const double got = operator_norm(pair.U()(t, s) * pair.P()(s), NormKind::max);
            const double want = std::exp(-2.0 * (t - s) + eps * s);
            CHECK(testing::rel_err(got, want) <= 1e-10);
        }
    }
}

TEST_CASE("Example 1 complement norm and non-uniformity") {
    const auto rate = GrowthRate::exponential();
    const auto pair = build_example1(rate, 2.0, 3.0, 0.1);
    for (double t : testing::range(0.0, 40.0, 2.5)) {
        const double mu_eps = std::exp(0.1 * t);
        CHECK(operator_norm(pair.Q(t), NormKind::max) == doctest::Approx(std::max(mu_eps - 1.0, 1.0)));
        CHECK(operator_norm(pair.P()(t), NormKind::max) == doctest::Approx(mu_eps));
    }
}

TEST_CASE("Example 1 closed-form U_Q agrees with the restricted inverse") {
    const auto rate = GrowthRate::polynomial();
    const auto pair = build_example1(rate, 2.0, 3.0, 0.3);
    REQUIRE(pair.has_closed_form_uq());
    for (const auto& [t, s] : pair_grid()) {
        const Matrix closed = pair.uq(s, t);
        const Matrix generic = restricted_inverse(pair.U()(t, s), pair.P()(s), pair.P()(t));
        CHECK(relative_frobenius(generic, closed) <= 1e-9);
        const double ratio = std::pow(rate(t) / rate(s), -3.0);
        CHECK(relative_frobenius(closed, ratio * pair.Q(s)) <= 1e-12);
    }
}

TEST_CASE("cocycle law") {
    const auto triples = random_triples(3, 50, 8.0);
    const auto pair = diag_exp_pair();
    const auto rep = check_cocycle(pair.U(), triples, 1e-12);
    CHECK(rep.pass());
    CHECK(rep.per_point.size() == triples.size());
    const std::vector<Triple> same{{2.0, 2.0, 2.0}};
    CHECK(check_cocycle(build_example1(GrowthRate::exponential(), 2, 3, 0.1).U(), same, 1e-14).pass());
    const std::vector<Triple> disordered{{1.0, 2.0, 0.0}};
    CHECK_THROWS_AS((void)check_cocycle(pair.U(), disordered, 1e-8), std::invalid_argument);
}

TEST_CASE("cocycle violations are detected") {
    // U(t,s) = e^{t−s} + (t − s)² is not a cocycle.
    EvolutionOperator bad(
        1, [](double t, double s) { return Matrix::Constant(1, 1, std::exp(t - s) + (t - s) * (t - s)); },
        Backend::closed_form);
    const std::vector<Triple> triples{{3.0, 1.0, 0.0}};
    CHECK_FALSE(check_cocycle(bad, triples, 1e-8).pass());
}

TEST_CASE("evolution operator rejects t < s") {
    CHECK_THROWS_AS((void)diag_exp_pair().U()(1.0, 2.0), std::invalid_argument);
}

TEST_CASE("compatibility of the built-in systems") {
    const auto grid = pair_grid();
    for (double eps : {0.0, 0.25}) {
        for (const auto& rate : {GrowthRate::exponential(), GrowthRate::polynomial(), GrowthRate::sqrt_shift()}) {
            const auto rep = check_compatibility(build_example1(rate, 2.0, 3.0, eps), grid, 1e-8);
            INFO(rate.description() << " eps=" << eps);
            CHECK(rep.pass());
            CHECK(rep.at("commutation").worst <= 1e-8);
        }
    }
    CHECK(check_compatibility(build_example2(3.0, 3.0, 0.5), grid, 1e-8).pass());
    CHECK(check_compatibility(diag_exp_pair(), grid, 1e-8).pass());
}

TEST_CASE("identity projection makes Q vacuous") {
    EvolutionOperator u(
        2, [](double t, double s) { return Matrix(std::exp(-(t - s)) * Matrix::Identity(2, 2)); },
        Backend::closed_form);
    CompatiblePair pair(u, ProjectionFamily::constant(Matrix::Identity(2, 2)), NormKind::spectral);
    CHECK(check_compatibility(pair, pair_grid(), 1e-8).pass());
    CHECK(pair.uq(0.0, 1.0).isZero(0.0));
}

TEST_CASE("non-commuting projection fails compatibility") {
    const auto base = diag_exp_pair();
    // A fixed oblique projection that U does not preserve.
    CompatiblePair bad(base.U(), ProjectionFamily::constant(mat2(1.0, 1.0, 0.0, 0.0)), NormKind::spectral);
    const auto rep = check_compatibility(bad, pair_grid(), 1e-8);
    CHECK_FALSE(rep.at("commutation").pass);
}

TEST_CASE("singular restriction is reported") {
    // U kills the second coordinate, which spans range Q.
    const Matrix u = mat2(1.0, 0.0, 0.0, 0.0);
    const Matrix p = mat2(1.0, 0.0, 0.0, 0.0);
    CHECK_THROWS_AS((void)restricted_inverse(u, p, p), SingularRestriction);
    // Rank change between Q(s) and Q(t).
    CHECK_THROWS_AS((void)restricted_inverse(Matrix::Identity(2, 2), p, Matrix::Identity(2, 2)), SingularRestriction);
}

TEST_CASE("U_Q examples") {
    const auto pair = diag_exp_pair();
    CHECK(pair.uq(1.0, 1.0).isApprox(pair.Q(1.0)));
    const Matrix m = evaluate_UQ(pair, 0.0, 1.0);
    CHECK(m(0, 0) == 0.0);
    CHECK(m(1, 1) == doctest::Approx(std::exp(-3.0)).epsilon(1e-14));
    CHECK_THROWS_AS((void)pair.uq(2.0, 1.0), std::invalid_argument);
}

TEST_CASE("Green function examples") {
    const auto pair = build_example1(GrowthRate::exponential(), 2.0, 3.0, 0.0);
    const Vector forward = green(pair, 2.0, 1.0, vec2(1.0, 0.0));
    CHECK(forward(0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    CHECK(forward(1) == 0.0);
    const Vector backward = green(pair, 0.0, 1.0, vec2(0.0, 1.0));
    CHECK(backward(0) == 0.0);
    CHECK(backward(1) == doctest::Approx(-std::exp(-3.0)).epsilon(1e-14));
    const auto nonuni = build_example1(GrowthRate::exponential(), 2.0, 3.0, 0.1);
    const Vector x = vec2(0.3, -0.7);
    CHECK(green(nonuni, 1.5, 1.5, x).isApprox(nonuni.P()(1.5) * x));
}

TEST_CASE("Example 2 closed form") {
    const auto pair = build_example2(3.0, 3.0, 0.0);
    const double mu1 = 1.0 + std::sqrt(2.0);
    const double want = (1.0 / (1.0 + 1.0 / std::sqrt(2.0))) * std::pow(mu1, -3.0);
    CHECK(pair.U()(1.0, 0.0)(0, 0) == doctest::Approx(want).epsilon(1e-14));
    const auto osc = build_example2(3.0, 4.0, 0.5);
    for (double t : {0.0, 0.7, 3.0, 11.0}) CHECK(osc.U()(t, t)(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(osc.norm() == NormKind::spectral);
    CHECK(osc.P()(4.0).isApprox(mat2(1.0, 0.0, 0.0, 0.0)));
}

TEST_CASE("Example 2 parameter constraints") {
    CHECK_THROWS_AS((void)build_example2(3.0, 3.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS((void)build_example2(1.0, 3.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)build_example2(3.0, 3.0, -0.1), std::invalid_argument);
    CHECK_NOTHROW((void)build_example2(3.0, 3.0, 1.99));
}

TEST_CASE("projection checks") {
    const auto grid = testing::range(0.0, 5.0, 0.5);
    CHECK(check_projection(build_example1(GrowthRate::exponential(), 2, 3, 0.2).P(), grid).pass());
    ProjectionFamily not_idem(2, [](double t) { return mat2(1.0 + t, 0.0, 0.0, 0.0); });
    CHECK_FALSE(check_projection(not_idem, grid).at("idempotent").pass);
    ProjectionFamily rank_jump(2, [](double t) { return t < 2.0 ? mat2(1.0, 0.0, 0.0, 0.0) : Matrix::Identity(2, 2); });
    CHECK_FALSE(check_projection(rank_jump, grid).at("constant_rank").pass);
}

TEST_CASE("ODE-backed operators match closed forms") {
    const auto a = parse_expression_matrix({{"-2", "0"}, {"0", "3"}});
    const auto u = build_from_coefficients(a);
    CHECK(u.backend() == Backend::ode_backed);
    const Matrix m = u(1.0, 0.0);
    CHECK(testing::rel_err(m(0, 0), std::exp(-2.0)) <= 1e-6);
    CHECK(testing::rel_err(m(1, 1), std::exp(3.0)) <= 1e-6);
    const Matrix tri = u(2.0, 0.0);
    const Matrix composed = u(2.0, 1.0) * u(1.0, 0.0);
    CHECK(relative_frobenius(composed, tri) <= 1e-5);

    const auto sep = build_from_coefficients(parse_expression_matrix({{"-1/(t+1)", "0"}, {"0", "1/(t+1)"}}));
    for (double t : testing::range(0.0, 10.0, 1.0)) {
        const Matrix v = sep(t, 0.0);
        CHECK(testing::rel_err(v(0, 0), 1.0 / (t + 1.0)) <= 1e-6);
        CHECK(testing::rel_err(v(1, 1), t + 1.0) <= 1e-6);
    }
    const auto zero = build_from_coefficients(parse_expression_matrix({{"0", "0"}, {"0", "0"}}));
    CHECK(zero(3.0, 1.0).isApprox(Matrix::Identity(2, 2)));
}

TEST_CASE("ODE-backed pair computes U_Q by backward integration") {
    const CoefficientFn a = [](double) { return mat2(-2.0, 0.0, 0.0, 3.0); };
    const auto pair = make_ode_pair(a, ProjectionFamily::constant(mat2(1.0, 0.0, 0.0, 0.0)), NormKind::spectral);
    const Matrix m = pair.uq(0.0, 1.0);
    CHECK(testing::rel_err(m(1, 1), std::exp(-3.0)) <= 1e-6);
    CHECK(std::abs(m(0, 0)) <= 1e-12);
    CHECK(check_compatibility(pair, pair_grid(), 1e-6).pass());
}

TEST_CASE("expression matrices must be square") {
    CHECK_THROWS_AS((void)parse_expression_matrix({{"1", "2"}}), std::invalid_argument);
    CHECK_THROWS_AS((void)parse_expression_matrix({}), std::invalid_argument);
    CHECK_THROWS_AS((void)parse_expression_matrix({{"t +"}}), ParseError);
}

TEST_CASE("backend names") {
    CHECK(to_string(Backend::closed_form) == "closed_form");
    CHECK(to_string(Backend::ode_backed) == "ode_backed");
}
