#pragma once

// The weighted Green-function integral
//
//   I(t, x) = ∫_0^∞ μ′(τ)/μ(τ) · (μ(τ)/μ(t))^{pγ·sign(τ−t)} · ‖G(τ,t)x‖^p dτ
//
// its bound D μ(t)^{pε} ‖x‖^p, the growth hypothesis on ‖G‖, and the
// dichotomy constants that follow from both.

#include "dichotomy/evolution.hpp"
#include "dichotomy/growth.hpp"
#include "dichotomy/quadrature.hpp"
#include "dichotomy/validation.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dichotomy {

struct DatkoParams {
    double p = 1.0;
    double gamma = 1.0;
    double epsilon = 0.0;
    double D = 1.0;

    /// Throws std::invalid_argument unless p > 0, γ > 0, ε ≥ 0, D > 0.
    void validate() const;
};

/// ‖G(t,s)‖ ≤ M μ′(s)/μ(s) (μ(t)/μ(s))^{ω sign(t−s)} μ(s)^α for t ≠ s.
struct GrowthBound {
    double M = 1.0;
    double omega = 1.0;
    double alpha = 0.0;

    /// Throws std::invalid_argument unless M ≥ 1, ω > 0, α ≥ 0.
    void validate() const;
};

enum class Provenance { estimated, derived, user_claimed };

[[nodiscard]] std::string_view to_string(Provenance p) noexcept;
[[nodiscard]] Provenance provenance_from_string(std::string_view name);

/// Constants of a nonuniform μ-dichotomy:
///   ‖U(t,s)P(s)‖   ≤ N1 (μ(t)/μ(s))^{-a} μ(s)^ε
///   ‖U_Q(s,t)Q(t)‖ ≤ N2 (μ(t)/μ(s))^{-b} μ(t)^ε      for t ≥ s ≥ 0.
struct DichotomyCertificate {
    double a = 1.0;
    double b = 1.0;
    double epsilon = 0.0;
    double N1 = 1.0;
    double N2 = 1.0;
    Provenance provenance = Provenance::user_claimed;

    /// Throws std::invalid_argument unless a, b > 0, ε ≥ 0, N1, N2 ≥ 1.
    void validate() const;
};

/// Integrand at τ, with sign(0) = 0 and G(t,t) = P(t). Requires x ≠ 0.
[[nodiscard]] double datko_integrand(const CompatiblePair& pair, const GrowthRate& rate, double p, double gamma,
                                     double tau, double t, const Vector& x);

struct DatkoIntegral {
    QuadResult unstable;  ///< ∫_0^t
    QuadResult stable;    ///< ∫_t^{T_max}
    TailEstimate tail;    ///< estimate of ∫_{T_max}^∞
    double T_max = 0.0;

    /// Mass computed by quadrature, without the tail.
    [[nodiscard]] double computed() const noexcept { return unstable.value + stable.value; }
    /// computed() + tail; +inf when the tail diverges.
    [[nodiscard]] double total() const noexcept;
    [[nodiscard]] double error() const noexcept;
    [[nodiscard]] bool diverging() const noexcept { return tail.diverging; }
};

/// Quadrature over [0, t] and [t, T_max] (split at the kink τ = t) plus
/// the tail estimate. Throws std::invalid_argument if T_max ≤ t or x = 0.
[[nodiscard]] DatkoIntegral datko_integral(const CompatiblePair& pair, const GrowthRate& rate, double p,
                                           double gamma, double t, const Vector& x, double T_max,
                                           const QuadSettings& quad = {});

/// D = N1^p/(p(a−γ)) + N2^p/(p(b−γ)). Throws std::invalid_argument unless
/// 0 < γ < min{a, b}, p > 0 and N1, N2 ≥ 1.
[[nodiscard]] double theoretical_D(double N1, double N2, double p, double a, double b, double gamma);

/// 40/(p(a_est − γ)) when a decay estimate above γ is known, else 200.
[[nodiscard]] double default_horizon(double p, double gamma, std::optional<double> a_est);

struct DatkoPoint {
    double t = 0.0;
    Vector x;
    DatkoIntegral integral;
    double ratio = 0.0;  ///< total / (μ(t)^{pε} ‖x‖^p)
};

struct DatkoReport {
    DatkoParams params;
    double horizon = 0.0;
    NormKind norm = NormKind::spectral;
    std::vector<DatkoPoint> points;  ///< t-major, x-minor, in input order
    double max_ratio = 0.0;
    std::size_t argmax = 0;
    double threshold = 0.0;  ///< D (1 + 1e-6)
    bool tail_divergence = false;
    bool pass = false;
    std::vector<std::string> warnings;
};

/// Evaluates the integral at every (t, x) and compares the largest ratio to
/// D. Points are evaluated concurrently; the report is ordered by index.
/// The truncation horizon is quad.horizon if set, else default_horizon.
[[nodiscard]] DatkoReport check_datko_condition(const CompatiblePair& pair, const GrowthRate& rate,
                                                const DatkoParams& params, std::span<const double> t_grid,
                                                std::span<const Vector> x_samples, const QuadSettings& quad = {},
                                                std::optional<double> a_est = std::nullopt,
                                                std::size_t workers = 0);

struct GridPoint {
    double t;
    double s;
};

/// Worst ratio of ‖G(t,s)‖ to the growth-bound right-hand side; passes at
/// ≤ 1 + 1e-9. Pairs with t = s are rejected.
[[nodiscard]] ValidationReport check_growth_bound(const CompatiblePair& pair, const GrowthRate& rate,
                                                  const GrowthBound& bound, std::span<const GridPoint> grid);

/// Dichotomy constants from a passing integral bound with p ≥ 1 and γ > α
/// together with the growth bound and K_μ = sup μ′/μ:
///   a = γ − α,  b = γ + α,  ε′ = ε + α,
///   N1 = max{ (D M^p K^{p−1} e^{K(ω+γ)p})^{1/p},   M K e^{K(ω+γ−α)} },
///   N2 = max{ (D M^p K^{p−1} e^{K(α+ω+γ)p})^{1/p}, M K e^{K(ω+γ+α)} },
/// each N clamped at ≥ 1. Throws std::invalid_argument on p < 1 or γ ≤ α.
[[nodiscard]] DichotomyCertificate derive_certificate(const DatkoParams& params, const GrowthBound& bound,
                                                      double K_mu);

/// Both dichotomy inequalities on the grid (t ≥ s); passes when every
/// ratio is at most 1 + tol.
[[nodiscard]] ValidationReport verify_certificate(const CompatiblePair& pair, const GrowthRate& rate,
                                                  const DichotomyCertificate& cert, std::span<const TimePair> grid,
                                                  double tol = 1e-9);

}  // namespace dichotomy
