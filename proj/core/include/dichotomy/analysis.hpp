#pragma once
// End-to-end analysis of a SystemSpec: growth validation, compatibility,
// estimation, integral criterion per γ, certificates and Lyapunov checks,
// assembled into a JSON report.

#include "dichotomy/estimate.hpp"
#include "dichotomy/spec.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>

namespace dichotomy {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr std::uint64_t kDefaultSeed = 1;

struct AnalysisOptions {
    std::uint64_t seed = kDefaultSeed;
    std::size_t workers = 0;  ///< 0: DICHOTOMY_LAB_THREADS or hardware concurrency
};

struct AnalysisResult {
    nlohmann::json report;
    bool pass = false;
    std::optional<SampleTable> samples;  ///< absent if sampling was skipped or failed
};

/// Numerical failures become report entries; nothing here throws for them.
[[nodiscard]] AnalysisResult run_analysis(const SystemSpec& spec, const AnalysisOptions& options = {});

/// Checks a certificate against the spec's system on its sample grid.
[[nodiscard]] AnalysisResult run_verify(const SystemSpec& spec, const DichotomyCertificate& cert);

/// The report without its "timing" block, for reproducibility comparisons.
[[nodiscard]] nlohmann::json strip_timing(nlohmann::json report);

[[nodiscard]] const char* toolkit_version() noexcept;

}  // namespace dichotomy
