#pragma once

#include <string>
#include <vector>

namespace dichotomy {

/// One named check with its verdict and the worst residual observed.
/// `worst` follows the convention of the producing operation (a residual
/// for identities, a ratio for bounds); `limit` is the pass threshold.
struct CheckResult {
    std::string name;
    bool pass = true;
    double worst = 0.0;
    double limit = 0.0;
    std::string detail;
};

/// Outcome of a grid-based check. "pass" means no violation was found on
/// the sampled points, not a proof.
struct ValidationReport {
    std::vector<CheckResult> checks;
    std::vector<std::string> notes;
    /// Optional per-input residuals, in input order.
    std::vector<double> per_point;

    [[nodiscard]] bool pass() const noexcept;
    [[nodiscard]] const CheckResult* find(const std::string& name) const noexcept;
    /// Throws std::out_of_range if absent.
    [[nodiscard]] const CheckResult& at(const std::string& name) const;

    CheckResult& add(std::string name, bool pass, double worst, double limit, std::string detail = {});
};

}  // namespace dichotomy
