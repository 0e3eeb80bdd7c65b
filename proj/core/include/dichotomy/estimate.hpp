#pragma once

// Fitting dichotomy constants to sampled branch norms. Both inequalities
// are linear in log space,
//
//   log‖U(t,s)P(s)‖   ≤ log N1 − a · log(μ(t)/μ(s)) + ε · log μ(s)
//   log‖U_Q(s,t)Q(t)‖ ≤ log N2 − b · log(μ(t)/μ(s)) + ε · log μ(t)
//
// so each branch is an ordinary least-squares problem followed by an
// intercept lift that makes the fitted bound dominate every sample.

#include "dichotomy/evolution.hpp"
#include "dichotomy/growth.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dichotomy {

class RankDeficientDesign : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct NormSample {
    double t = 0.0;
    double s = 0.0;
    double log_ratio = 0.0;               ///< log(μ(t)/μ(s))
    double log_mu_s = 0.0;
    std::optional<double> log_stable;     ///< log‖U(t,s)P(s)‖, absent if the norm is 0
    double log_mu_t = 0.0;
    std::optional<double> log_unstable;   ///< log‖U_Q(s,t)Q(t)‖, absent if the norm is 0
};

struct SampleTable {
    std::vector<NormSample> rows;
    std::size_t dropped_stable = 0;
    std::size_t dropped_unstable = 0;
    std::vector<std::string> notes;

    /// RFC-4180 CSV with a header row; empty fields mark dropped norms.
    [[nodiscard]] std::string to_csv() const;
};

/// One row per grid pair (t ≥ s), in grid order.
[[nodiscard]] SampleTable sample_norms(const CompatiblePair& pair, const GrowthRate& rate,
                                       std::span<const TimePair> grid, std::size_t workers = 0);

/// Default sample grid: s ∈ {0, h, …, S}, t − s ∈ {h, …, T}.
[[nodiscard]] std::vector<TimePair> default_sample_grid(double s_max = 5.0, double gap_max = 5.0, double step = 0.5);

struct BranchFit {
    double log_N = 0.0;       ///< after the envelope lift, before clamping
    double rate = 0.0;        ///< a (stable) or b (unstable)
    double epsilon = 0.0;     ///< branch-local ε from the regression
    double residual = 0.0;    ///< max |OLS residual|
    double lift = 0.0;        ///< intercept increase applied for the envelope
    std::size_t samples = 0;
};

struct DichotomyEstimate {
    /// Absent when every row of that branch was dropped (zero projection).
    std::optional<BranchFit> stable;
    std::optional<BranchFit> unstable;

    double a_hat = 0.0;
    double b_hat = 0.0;
    double epsilon_hat = 0.0;   ///< max of branch ε, clamped at ≥ 0
    double logN1_hat = 0.0;     ///< clamped at ≥ 0
    double logN2_hat = 0.0;
    double residual_P = 0.0;
    double residual_Q = 0.0;
    std::size_t samples_P = 0;
    std::size_t samples_Q = 0;
};

/// Throws RankDeficientDesign (naming the missing variation) or
/// std::invalid_argument when a non-empty branch has fewer than 3 rows.
[[nodiscard]] DichotomyEstimate fit_constants(const SampleTable& samples);

/// Largest violation of the fitted bound over the samples, in log units.
/// Nonpositive (up to roundoff) after fit_constants.
[[nodiscard]] double envelope_violation(const DichotomyEstimate& est, const SampleTable& samples);

enum class Uniformity { uniform, nonuniform, not_dichotomic };

[[nodiscard]] std::string_view to_string(Uniformity u) noexcept;

/// not_dichotomic if a present branch has rate ≤ tol; uniform if ε̂ ≤ tol;
/// nonuniform otherwise.
[[nodiscard]] Uniformity classify_uniformity(const DichotomyEstimate& est, double tol = 1e-3);

}  // namespace dichotomy
