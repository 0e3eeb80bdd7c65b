#pragma once

// Adaptive Gauss–Kronrod (7/15) quadrature with global subdivision, and a
// tail estimator for integrals truncated at a finite horizon.

#include <functional>
#include <limits>
#include <optional>

namespace dichotomy {

class GrowthRate;

/// Shared by the integral criterion and the Lyapunov construction.
struct QuadSettings {
    double abs_tol = 1e-13;
    double rel_tol = 1e-10;
    int max_intervals = 4000;
    /// Truncation horizon beyond the lower limit of a semi-infinite
    /// integral. Unset means "choose from the decay estimate".
    std::optional<double> horizon;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    bool converged = true;
};

using Integrand = std::function<double(double)>;

[[nodiscard]] QuadResult integrate(const Integrand& f, double lo, double hi, const QuadSettings& settings);

/// Estimate of ∫_T^∞ f, from fitting f(τ) ≈ C μ(τ)^{-k} μ′(τ)/μ(τ) to the
/// upper envelope of f over the second half of [lo, T]. Then the tail is
/// C μ(T)^{-k} / k. `diverging` is set when the fitted k is not positive.
struct TailEstimate {
    double value = 0.0;
    double decay_rate = std::numeric_limits<double>::quiet_NaN();  ///< fitted k
    bool diverging = false;
};

[[nodiscard]] TailEstimate estimate_tail(const Integrand& f, const GrowthRate& rate, double lo, double T);

/// Integral over [lo, lo + horizon] plus the tail estimate beyond.
struct SemiInfiniteResult {
    QuadResult body;
    TailEstimate tail;
    double upper = 0.0;

    /// body + tail; +inf when the tail diverges.
    [[nodiscard]] double total() const noexcept {
        return tail.diverging ? std::numeric_limits<double>::infinity() : body.value + tail.value;
    }
    [[nodiscard]] double error() const noexcept {
        return tail.diverging ? std::numeric_limits<double>::infinity() : body.error + tail.value;
    }
};

[[nodiscard]] SemiInfiniteResult integrate_to_infinity(const Integrand& f, const GrowthRate& rate, double lo,
                                                       double upper, const QuadSettings& settings);

}  // namespace dichotomy
