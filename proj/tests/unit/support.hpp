#pragma once
// Shared helpers for the unit tests: relative comparisons and seeded
// generators for property checks.

#include "dichotomy/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace testing {

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline dichotomy::Vector unit_vector(std::mt19937_64& g, int dim) {
    std::normal_distribution<double> n(0.0, 1.0);
    dichotomy::Vector v(dim);
    do {
        for (int i = 0; i < dim; ++i) v(i) = n(g);
    } while (v.norm() < 1e-6);
    return v / v.norm();
}

inline dichotomy::Vector vec2(double a, double b) {
    dichotomy::Vector v(2);
    v << a, b;
    return v;
}

inline dichotomy::Matrix mat2(double a, double b, double c, double d) {
    dichotomy::Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

inline std::vector<double> range(double lo, double hi, double step) {
    std::vector<double> out;
    for (int i = 0; lo + i * step <= hi + 1e-9; ++i) out.push_back(lo + i * step);
    return out;
}

}  // namespace testing
