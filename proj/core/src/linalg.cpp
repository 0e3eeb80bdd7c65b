#include "dichotomy/linalg.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <stdexcept>
#include <string>

namespace dichotomy {

std::string_view to_string(NormKind kind) noexcept {
    switch (kind) {
        case NormKind::max: return "max";
        case NormKind::spectral: return "spectral";
    }
    return "unknown";
}

NormKind norm_kind_from_string(std::string_view name) {
    if (name == "max") return NormKind::max;
    if (name == "spectral") return NormKind::spectral;
    throw std::invalid_argument("unknown norm '" + std::string(name) + "' (expected max or spectral)");
}

double vector_norm(const Vector& x, NormKind kind) {
    if (x.size() == 0) return 0.0;
    switch (kind) {
        case NormKind::max: return x.cwiseAbs().maxCoeff();
        case NormKind::spectral: return x.norm();
    }
    return x.norm();
}

double operator_norm(const Matrix& a, NormKind kind) {
    if (a.size() == 0) return 0.0;
    switch (kind) {
        case NormKind::max: return a.cwiseAbs().rowwise().sum().maxCoeff();
        case NormKind::spectral: {
            Eigen::JacobiSVD<Matrix> svd(a);
            return svd.singularValues()(0);
        }
    }
    return 0.0;
}

double relative_frobenius(const Matrix& a, const Matrix& b, double floor) {
    return (a - b).norm() / std::max(b.norm(), floor);
}

int numerical_rank(const Matrix& a, double rank_tol) {
    if (a.size() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(a);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > rank_tol * std::max(1.0, sv(0))) ++rank;
    }
    return rank;
}

Matrix range_basis(const Matrix& projection, double rank_tol) {
    Eigen::JacobiSVD<Matrix> svd(projection, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > rank_tol * std::max(1.0, sv(0))) ++rank;
    }
    return svd.matrixU().leftCols(rank);
}

}  // namespace dichotomy
