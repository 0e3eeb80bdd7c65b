#pragma once
// System specifications: JSON documents describing a growth rate, an
// evolution operator with its projection family, and the analysis to run.

#include "dichotomy/datko.hpp"
#include "dichotomy/evolution.hpp"
#include "dichotomy/growth.hpp"

#include <json.hpp>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dichotomy {

/// Load-time rejection. `pointer` is a JSON pointer into the document,
/// `constraint` names the violated rule.
class SpecError : public std::runtime_error {
public:
    SpecError(std::string pointer, std::string constraint);
    [[nodiscard]] const std::string& pointer() const noexcept { return pointer_; }
    [[nodiscard]] const std::string& constraint() const noexcept { return constraint_; }

private:
    std::string pointer_;
    std::string constraint_;
};

/// File could not be read.
class SpecIOError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GrowthSpec {
    GrowthKind kind = GrowthKind::exponential;
    std::string expression;  ///< canonical form; only for custom
};

enum class OperatorKind { example1, example2, diagonal, ode };
[[nodiscard]] std::string_view to_string(OperatorKind kind) noexcept;

struct OperatorSpec {
    OperatorKind kind = OperatorKind::example1;
    double a = 0.0;
    double b = 0.0;
    double epsilon = 0.0;  ///< example1
    double alpha = 0.0;    ///< example2
    std::vector<double> exponents;                    ///< diagonal
    std::vector<std::vector<std::string>> matrix;     ///< ode, canonical expressions
};

enum class ProjectionKind { builtin, constant, expression };
[[nodiscard]] std::string_view to_string(ProjectionKind kind) noexcept;

struct ProjectionSpec {
    ProjectionKind kind = ProjectionKind::builtin;
    std::vector<std::vector<double>> constant;
    std::vector<std::vector<std::string>> expression;
};

struct GridSpec {
    double start = 0.0;
    double stop = 10.0;
    double step = 0.5;
};

struct XSampleSpec {
    std::size_t random = 8;
    bool include_basis = true;
};

struct SampleGridSpec {
    double s_max = 5.0;
    double gap_max = 5.0;
    double step = 0.5;
};

struct LyapunovSpec {
    bool enabled = true;
    std::size_t triples = 100;
    double span = 5.0;  ///< max t − s of a random triple
    double tol = 1e-6;
};

enum class NormChoice { automatic, max, spectral };

struct AnalysisSpec {
    double p = 1.0;
    std::vector<double> gamma;
    std::optional<double> epsilon;  ///< default: fitted ε
    std::optional<double> D;        ///< default: constant from the fitted estimate
    GridSpec t_grid;
    XSampleSpec x_samples;
    std::optional<double> horizon;  ///< default: from the fitted decay rate
    double quad_tol = 1e-10;
    NormChoice norm = NormChoice::automatic;
    std::optional<GrowthBound> growth_bound;
    SampleGridSpec sample_grid;
    LyapunovSpec lyapunov;
    std::optional<DichotomyCertificate> claimed_certificate;
};

struct SystemSpec {
    GrowthSpec growth_rate;
    int dimension = 2;
    OperatorSpec op;
    ProjectionSpec projection;
    AnalysisSpec analysis;
};

/// Validates and fills defaults. Throws SpecError.
[[nodiscard]] SystemSpec parse_spec(const nlohmann::json& doc);
/// Parses JSON text; syntax errors become SpecError at pointer "".
[[nodiscard]] SystemSpec parse_spec_text(const std::string& text);
/// Reads a file; throws SpecIOError if it cannot be read.
[[nodiscard]] SystemSpec load_spec(const std::filesystem::path& path);

/// Canonical form with every default written out.
[[nodiscard]] nlohmann::json to_json(const SystemSpec& spec);

/// Certificate object {a, b, epsilon, N1, N2[, provenance]}; `base` prefixes
/// error pointers.
[[nodiscard]] DichotomyCertificate parse_certificate(const nlohmann::json& doc, const std::string& base = "");
[[nodiscard]] nlohmann::json to_json(const DichotomyCertificate& cert);

[[nodiscard]] GrowthRate make_growth_rate(const SystemSpec& spec);
[[nodiscard]] NormKind resolved_norm(const SystemSpec& spec);
[[nodiscard]] CompatiblePair make_pair(const SystemSpec& spec, const GrowthRate& rate);

/// One line per preset with its parameter constraints.
[[nodiscard]] std::vector<std::string> builtin_descriptions();

}  // namespace dichotomy
