#pragma once

// Dense linear algebra helpers shared by every module: matrix aliases,
// the two operator norms the toolkit supports, and subspace bases used by
// the restricted inverse on unstable ranges.

#include <Eigen/Core>

#include <string_view>

namespace dichotomy {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Which norm on X (and the induced operator norm) a computation uses.
///   max       ‖x‖ = max |x_i|,   ‖A‖ = max row sum of |a_ij|
///   spectral  ‖x‖ = Euclidean,   ‖A‖ = largest singular value
enum class NormKind { max, spectral };

[[nodiscard]] std::string_view to_string(NormKind kind) noexcept;
[[nodiscard]] NormKind norm_kind_from_string(std::string_view name);

[[nodiscard]] double vector_norm(const Vector& x, NormKind kind);
[[nodiscard]] double operator_norm(const Matrix& a, NormKind kind);

/// ‖a − b‖_F / max(‖b‖_F, floor). Used for identity residuals.
[[nodiscard]] double relative_frobenius(const Matrix& a, const Matrix& b, double floor = 1.0);

/// Orthonormal basis (columns) of the range of a projection, rank decided
/// by singular values above `rank_tol` relative to the largest one.
[[nodiscard]] Matrix range_basis(const Matrix& projection, double rank_tol = 1e-9);

[[nodiscard]] int numerical_rank(const Matrix& a, double rank_tol = 1e-9);

}  // namespace dichotomy
