#pragma once

// Lyapunov functions for nonuniform μ-dichotomies.
//
// For H with ‖H(t)x‖ ≤ w(t) μ(t)^γ ‖P(t)x‖ + w(t) μ(t)^{−γ} ‖Q(t)x‖,
// w = (μ′/μ)^{1/p}, the function
//
//   L(t,x) = 2^{p−1} ( ∫_t^∞ ‖H(τ)U(τ,t)P(t)x‖^p dτ − ∫_0^t ‖H(τ)U_Q(τ,t)Q(t)x‖^p dτ )
//
// decreases along trajectories, is sign-split by P/Q, and is bounded by the
// integral-criterion constant.

#include "dichotomy/evolution.hpp"
#include "dichotomy/growth.hpp"
#include "dichotomy/quadrature.hpp"
#include "dichotomy/validation.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace dichotomy {

class HFunction {
public:
    using Fn = std::function<Vector(double, const Vector&)>;

    HFunction(Fn eval, double gamma, double p, std::string label);
    /// With evaluators specialised to vectors already in range P(t) / Q(t).
    /// They must agree with `eval` there; they avoid re-splitting y, whose
    /// rounding error would otherwise be amplified by μ^γ.
    HFunction(Fn eval, Fn on_stable, Fn on_unstable, double gamma, double p, std::string label);

    [[nodiscard]] Vector operator()(double t, const Vector& x) const { return eval_(t, x); }
    [[nodiscard]] Vector on_stable(double t, const Vector& y) const { return on_stable_ ? on_stable_(t, y) : eval_(t, y); }
    [[nodiscard]] Vector on_unstable(double t, const Vector& y) const {
        return on_unstable_ ? on_unstable_(t, y) : eval_(t, y);
    }
    [[nodiscard]] double gamma() const noexcept { return gamma_; }
    [[nodiscard]] double p() const noexcept { return p_; }
    [[nodiscard]] const std::string& label() const noexcept { return label_; }

    /// c · H, same parameters.
    [[nodiscard]] HFunction scaled(double c) const;

private:
    Fn eval_;
    Fn on_stable_;
    Fn on_unstable_;
    double gamma_;
    double p_;
    std::string label_;
};

/// H(t)x = w(t) μ(t)^γ P(t)x + w(t) μ(t)^{−γ} Q(t)x.
/// Throws std::invalid_argument unless γ > 0 and p ≥ 1.
[[nodiscard]] HFunction canonical_H(const CompatiblePair& pair, const GrowthRate& rate, double gamma, double p);

struct StatePoint {
    double t;
    Vector x;
};

/// Worst ratio ‖H(t)x‖ / (w μ^γ ‖P(t)x‖ + w μ^{−γ} ‖Q(t)x‖); passes at
/// ≤ 1 + 1e-9.
[[nodiscard]] ValidationReport check_H_membership(const HFunction& h, const CompatiblePair& pair,
                                                  const GrowthRate& rate, double gamma, double p,
                                                  std::span<const StatePoint> grid);

class LyapunovFunction {
public:
    using Fn = std::function<double(double, const Vector&)>;

    /// (t, x, T) ↦ L(t, x) with the forward integral cut at the absolute time T
    /// and no tail.
    using TruncatedFn = std::function<double(double, const Vector&, double)>;

    /// Wraps any evaluator, e.g. an externally supplied candidate.
    explicit LyapunovFunction(Fn eval, std::string label = "user", TruncatedFn truncated = {});

    [[nodiscard]] double operator()(double t, const Vector& x) const { return eval_(t, x); }
    [[nodiscard]] bool has_truncated() const noexcept { return static_cast<bool>(truncated_); }
    [[nodiscard]] double truncated(double t, const Vector& x, double T) const { return truncated_(t, x, T); }
    [[nodiscard]] const std::string& label() const noexcept { return label_; }

    double horizon = 0.0;
    QuadSettings quad;
    std::vector<std::string> warnings;

private:
    Fn eval_;
    std::string label_;
    TruncatedFn truncated_;
};

/// Evaluator for L with both integrals by adaptive quadrature. The forward
/// integral is truncated at t + horizon (quad.horizon, default 200) with
/// the tail estimate added; a non-decaying tail makes L(t, x) = +inf and
/// is recorded as a warning when detected at construction.
[[nodiscard]] LyapunovFunction construct_L(const CompatiblePair& pair, const GrowthRate& rate, const HFunction& h,
                                           double p, const QuadSettings& quad = {});

struct LyapunovSample {
    double t;
    double s;
    Vector x;
};

/// Target constants for the bound condition.
struct LyapunovBound {
    double gamma = 1.0;
    double epsilon = 0.0;
    double D = 1.0;
};

/// (i) decrease along trajectories, (ii) sign split, (iii) bound
///   μ^{−pγ} L(t,Px) − μ^{pγ} L(t,Qx) ≤ 2^{p−1} D μ^{pε} ‖x‖^p
/// on every sample (t ≥ s). Decrease residuals are relative to
/// max(1, |L(s,x)|); `per_point` holds them in input order. When L has a
/// truncated form, both sides of (i) are cut at the same absolute time
/// t + horizon: their forward tails are the same integral and cancel.
[[nodiscard]] ValidationReport check_L_conditions(const LyapunovFunction& l, const CompatiblePair& pair,
                                                  const GrowthRate& rate, const HFunction& h, double p,
                                                  const LyapunovBound& bound,
                                                  std::span<const LyapunovSample> samples, double tol = 1e-6,
                                                  std::size_t workers = 0);

struct QuadraticCertificate {
    std::function<Matrix(double)> W;
};

/// Quadratic-form version for p = 2 in the Euclidean inner product:
///   ⟨U*W(t)U x, x⟩ + ∫_s^t ‖H(τ)U(τ,s)x‖² dτ ≤ ⟨W(s)x, x⟩,
///   ⟨W P x, P x⟩ ≥ 0 ≥ ⟨W Q x, Q x⟩,
///   μ^{−2γ}⟨W P x, P x⟩ − μ^{2γ}⟨W Q x, Q x⟩ ≤ D μ^{2ε} ‖x‖².
/// Symmetry of W (1e-10) is checked first; if it fails the inequalities
/// are skipped.
[[nodiscard]] ValidationReport check_quadratic_certificate(const QuadraticCertificate& w,
                                                           const CompatiblePair& pair, const GrowthRate& rate,
                                                           const HFunction& h, const LyapunovBound& bound,
                                                           std::span<const LyapunovSample> samples,
                                                           double tol = 1e-6, const QuadSettings& quad = {});

}  // namespace dichotomy
