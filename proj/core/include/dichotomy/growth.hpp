#pragma once

// Growth rates μ : [0, ∞) → [1, ∞) with μ(0) = 1, μ increasing and
// unbounded, together with the grid checks that relate μ′/μ to
// exponential envelopes.

#include "dichotomy/expression.hpp"
#include "dichotomy/validation.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace dichotomy {

enum class GrowthKind { exponential, polynomial, sqrt_shift, custom };

[[nodiscard]] std::string_view to_string(GrowthKind kind) noexcept;

/// A differentiable growth rate. Immutable; copies share the callables.
class GrowthRate {
public:
    using Fn = std::function<double(double)>;

    /// μ(t) = e^t.
    static GrowthRate exponential();
    /// μ(t) = t + 1.
    static GrowthRate polynomial();
    /// μ(t) = t + sqrt(t² + 1).
    static GrowthRate sqrt_shift();
    /// Custom rate from an expression in t; μ′ comes from the symbolic
    /// derivative of the parsed tree.
    static GrowthRate from_expression(std::string_view text);

    GrowthRate(GrowthKind kind, Fn value, Fn derivative, std::optional<double> known_K,
               std::string description);

    [[nodiscard]] double operator()(double t) const { return value_(t); }
    [[nodiscard]] double derivative(double t) const { return derivative_(t); }
    /// log μ(t); exact for the exponential rate at any t.
    [[nodiscard]] double log_value(double t) const;
    /// μ′(t)/μ(t); exact for the exponential rate at any t.
    [[nodiscard]] double log_derivative(double t) const;
    /// log(μ(t)/μ(s)).
    [[nodiscard]] double log_ratio(double t, double s) const { return log_value(t) - log_value(s); }

    [[nodiscard]] GrowthKind kind() const noexcept { return kind_; }
    [[nodiscard]] const std::optional<double>& known_K() const noexcept { return known_K_; }
    /// Preset name or the canonical expression text.
    [[nodiscard]] const std::string& description() const noexcept { return description_; }

private:
    GrowthKind kind_;
    Fn value_;
    Fn derivative_;
    std::optional<double> known_K_;
    std::string description_;
};

/// Checks μ(0) = 1, μ ≥ 1, monotonicity on the grid, unboundedness
/// (μ(T) > 1e3 for some T ≤ 1e6) and agreement of μ′ with a central
/// difference of μ to relative tolerance `tol`.
///
/// Throws std::invalid_argument if the grid is empty, unsorted or does not
/// start at 0. A rate taking values below 1 is reported, not thrown.
[[nodiscard]] ValidationReport validate_growth_rate(const GrowthRate& rate, std::span<const double> grid,
                                                    double tol = 1e-5);

struct KmuEstimate {
    double value = 0.0;             ///< max of μ′/μ over the grid
    std::optional<double> known;    ///< analytic K_μ if the rate carries one
    bool exceeds_known = false;     ///< grid value above known + 1e-9
    double argmax = 0.0;
};

[[nodiscard]] KmuEstimate estimate_K_mu(const GrowthRate& rate, std::span<const double> grid);

/// Three grid verdicts that are equivalent for differentiable rates:
///   (i)   μ′(t)/μ(t) ≤ K
///   (ii)  μ(t) ≤ μ(t0) e^{K(t−t0)}         for grid pairs t ≥ t0
///   (iii) μ(t+δ)/μ(t) ≤ e^{Kδ}             for grid t and every δ
/// Residuals are in log space; a verdict passes when its worst residual
/// is at most `tol`.
struct Lemma1Report {
    CheckResult log_derivative_bound;
    CheckResult exponential_envelope;
    CheckResult increment_bound;
    bool verdicts_agree = true;

    [[nodiscard]] bool all_pass() const noexcept {
        return log_derivative_bound.pass && exponential_envelope.pass && increment_bound.pass;
    }
};

[[nodiscard]] Lemma1Report lemma1_check(const GrowthRate& rate, double K, std::span<const double> grid,
                                        std::span<const double> deltas, double tol = 1e-9);

}  // namespace dichotomy
