#pragma once

#include "dichotomy/linalg.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace dichotomy {

/// Points on the Euclidean unit sphere in R^d from a seeded generator.
[[nodiscard]] std::vector<Vector> unit_sphere_samples(std::mt19937_64& rng, int dim, std::size_t count);

/// Standard basis vectors e_1, …, e_d.
[[nodiscard]] std::vector<Vector> basis_vectors(int dim);

/// Evenly spaced points lo, lo + step, … up to hi (inclusive within 1e-9).
[[nodiscard]] std::vector<double> linear_grid(double lo, double hi, double step);

}  // namespace dichotomy
