#pragma once

// Evolution operators U(t, s) on R^d, projection valued functions P(t),
// their compatibility, the inverse U_Q(s, t) of U(t, s) restricted to the
// unstable range, and the Green function.

#include "dichotomy/expression.hpp"
#include "dichotomy/growth.hpp"
#include "dichotomy/linalg.hpp"
#include "dichotomy/ode.hpp"
#include "dichotomy/validation.hpp"

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dichotomy {

/// U(t, s) restricted to Q(s)X → Q(t)X is not (numerically) invertible.
class SingularRestriction : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Backend { closed_form, ode_backed };

[[nodiscard]] std::string_view to_string(Backend backend) noexcept;

class ProjectionFamily {
public:
    using Fn = std::function<Matrix(double)>;

    ProjectionFamily(int dim, Fn eval);
    static ProjectionFamily constant(Matrix p);

    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] Matrix operator()(double t) const { return eval_(t); }
    /// Q(t) = Id − P(t).
    [[nodiscard]] Matrix complement(double t) const;

private:
    int dim_;
    Fn eval_;
};

/// Idempotence within `tol` (Frobenius) and constant rank over the grid.
[[nodiscard]] ValidationReport check_projection(const ProjectionFamily& p, std::span<const double> grid,
                                                double tol = 1e-9);

class EvolutionOperator {
public:
    using Fn = std::function<Matrix(double t, double s)>;

    EvolutionOperator(int dim, Fn eval, Backend backend);

    /// U(t, s); throws std::invalid_argument unless t ≥ s ≥ 0.
    [[nodiscard]] Matrix operator()(double t, double s) const;
    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] Backend backend() const noexcept { return backend_; }

private:
    int dim_;
    Fn eval_;
    Backend backend_;
};

/// An evolution operator with a compatible projection family. Optional
/// closed forms for U(t,s)P(s) and U_Q(s,t)Q(t) avoid cancellation and
/// overflow in the branch that is not needed.
class CompatiblePair {
public:
    using PairFn = std::function<Matrix(double, double)>;

    CompatiblePair(EvolutionOperator u, ProjectionFamily p, NormKind norm, std::string name = "custom",
                   PairFn uq = {}, PairFn stable = {});

    [[nodiscard]] const EvolutionOperator& U() const noexcept { return u_; }
    [[nodiscard]] const ProjectionFamily& P() const noexcept { return p_; }
    [[nodiscard]] Matrix Q(double t) const { return p_.complement(t); }
    [[nodiscard]] int dim() const noexcept { return u_.dim(); }

    /// U(t, s) P(s), t ≥ s.
    [[nodiscard]] Matrix stable(double t, double s) const;
    /// U_Q(s, t) Q(t), t ≥ s. Throws SingularRestriction.
    [[nodiscard]] Matrix uq(double s, double t) const;
    [[nodiscard]] bool has_closed_form_uq() const noexcept { return static_cast<bool>(uq_); }

    [[nodiscard]] NormKind norm() const noexcept { return norm_; }
    [[nodiscard]] CompatiblePair with_norm(NormKind norm) const;
    [[nodiscard]] const std::string& name() const noexcept { return name_; }

private:
    EvolutionOperator u_;
    ProjectionFamily p_;
    NormKind norm_;
    std::string name_;
    PairFn uq_;
    PairFn stable_;
};

/// U_Q(s, t) Q(t) from a restricted least-squares solve on orthonormal
/// bases of Q(s)X and Q(t)X, with a residual check of 1e-7 relative.
/// Throws SingularRestriction when the restriction is singular (smallest
/// singular value below 1e-10) or the residual check fails.
[[nodiscard]] Matrix restricted_inverse(const Matrix& u_ts, const Matrix& p_s, const Matrix& p_t);

[[nodiscard]] Matrix evaluate_UQ(const CompatiblePair& pair, double s, double t);

/// G(τ, t)x: U(τ,t)P(t)x for τ > t, −U_Q(τ,t)Q(t)x for τ < t, and P(t)x at
/// τ = t.
[[nodiscard]] Vector green(const CompatiblePair& pair, double tau, double t, const Vector& x);
/// The operator G(τ, t) itself, same convention.
[[nodiscard]] Matrix green_matrix(const CompatiblePair& pair, double tau, double t);

struct Triple {
    double t;
    double tau;
    double s;
};

struct TimePair {
    double t;
    double s;
};

/// Relative Frobenius residual of U(t,τ)U(τ,s) − U(t,s) per triple.
/// `per_point` in the report holds one residual per triple.
/// Throws std::invalid_argument on a triple violating t ≥ τ ≥ s ≥ 0.
[[nodiscard]] ValidationReport check_cocycle(const EvolutionOperator& u, std::span<const Triple> triples,
                                             double tol);

/// Commutation P(t)U(t,s) = U(t,s)P(s), invertibility of the restriction
/// to Q, both one-sided inverse identities for U_Q, and the composition
/// U_Q(s,τ)U_Q(τ,t) = U_Q(s,t) at the midpoint τ. Singular restrictions
/// are reported as failures.
[[nodiscard]] ValidationReport check_compatibility(const CompatiblePair& pair, std::span<const TimePair> pairs,
                                                   double tol);

/// U(t,s) = (μ(t)/μ(s))^{-a} P(s) + (μ(t)/μ(s))^{b} Q(t) on R² with
/// P(t)(x1, x2) = (x1 + (μ(t)^ε − 1) x2, 0). Uses the max norm.
[[nodiscard]] CompatiblePair build_example1(const GrowthRate& rate, double a, double b, double epsilon);

/// Diagonal system on R² over μ(t) = t + sqrt(t² + 1) with oscillating
/// nonuniform factor of strength α and P(t)(x1, x2) = (x1, 0).
/// Requires a, b > 1 and α + 1 < min{a, b}; throws std::invalid_argument.
[[nodiscard]] CompatiblePair build_example2(double a, double b, double alpha);

/// U(t,s) = diag((μ(t)/μ(s))^{λ_i}); P projects onto the coordinates with
/// λ_i < 0.
[[nodiscard]] CompatiblePair build_diagonal(const GrowthRate& rate, std::span<const double> exponents);

using ExpressionMatrix = std::vector<std::vector<Expression>>;

/// Parses a square matrix of expression strings. Throws ParseError or
/// std::invalid_argument on shape errors.
[[nodiscard]] ExpressionMatrix parse_expression_matrix(const std::vector<std::vector<std::string>>& text);
[[nodiscard]] CoefficientFn coefficient_function(const ExpressionMatrix& a);

/// Fundamental matrix of X′ = A(t)X. Results are memoised per (t, s)
/// behind a mutex; the cache never changes observed values.
[[nodiscard]] EvolutionOperator build_from_coefficients(CoefficientFn a, int dim, const OdeSettings& settings = {});
[[nodiscard]] EvolutionOperator build_from_coefficients(const ExpressionMatrix& a,
                                                        const OdeSettings& settings = {});

/// Pairs an ode-backed operator with a projection family; U_Q is obtained
/// by integrating the system backward from Q(t).
[[nodiscard]] CompatiblePair make_ode_pair(CoefficientFn a, ProjectionFamily p, NormKind norm,
                                           const OdeSettings& settings = {});

}  // namespace dichotomy
