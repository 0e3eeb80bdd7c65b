#include "dichotomy/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace dichotomy {

std::vector<Vector> unit_sphere_samples(std::mt19937_64& rng, int dim, std::size_t count) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Vector> out;
    out.reserve(count);
    while (out.size() < count) {
        Vector v(dim);
        for (int i = 0; i < dim; ++i) v(i) = normal(rng);
        const double n = v.norm();
        if (n < 1e-12) continue;
        out.push_back(v / n);
    }
    return out;
}

std::vector<Vector> basis_vectors(int dim) {
    std::vector<Vector> out;
    for (int i = 0; i < dim; ++i) out.push_back(Vector::Unit(dim, i));
    return out;
}

std::vector<double> linear_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi >= lo)) throw std::invalid_argument("grid needs step > 0 and hi >= lo");
    std::vector<double> out;
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
    return out;
}

}  // namespace dichotomy
