#pragma once

// Fundamental-matrix integration for X′ = A(t) X with an adaptive
// Dormand–Prince 5(4) scheme.

#include "dichotomy/linalg.hpp"

#include <functional>
#include <stdexcept>
#include <string>

namespace dichotomy {

class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using CoefficientFn = std::function<Matrix(double)>;

struct OdeSettings {
    double rel_tol = 1e-8;
    double abs_tol = 1e-20;
    double min_step = 1e-12;
    long max_steps = 2'000'000;
};

/// Integrates X′ = A(t)X from `from` to `to` (either direction) starting at
/// X(from) = x0. Deterministic for identical inputs. Throws IntegrationError
/// when the step size underflows or the step budget is exhausted.
[[nodiscard]] Matrix propagate(const CoefficientFn& a, const Matrix& x0, double from, double to,
                               const OdeSettings& settings = {});

}  // namespace dichotomy
