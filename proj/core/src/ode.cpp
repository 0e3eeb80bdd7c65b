#include "dichotomy/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dichotomy {

namespace {

// Dormand–Prince tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b* (fifth minus fourth order weights), used for the error estimate.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

Matrix propagate(const CoefficientFn& a, const Matrix& x0, double from, double to, const OdeSettings& settings) {
    Matrix x = x0;
    if (from == to) return x;

    const double dir = to > from ? 1.0 : -1.0;
    const double span = std::abs(to - from);
    double h = std::min(span, 1e-2);
    double t = from;

    auto rhs = [&](double tt, const Matrix& y) -> Matrix { return a(tt) * y; };

    Matrix k1 = rhs(t, x);
    long steps = 0;
    while (dir * (to - t) > 0.0) {
        if (++steps > settings.max_steps) {
            throw IntegrationError("step budget exhausted before reaching t=" + std::to_string(to));
        }
        const bool last = h >= std::abs(to - t);
        if (last) h = std::abs(to - t);
        const double hs = dir * h;

        const Matrix k2 = rhs(t + c2 * hs, x + hs * (a21 * k1));
        const Matrix k3 = rhs(t + c3 * hs, x + hs * (a31 * k1 + a32 * k2));
        const Matrix k4 = rhs(t + c4 * hs, x + hs * (a41 * k1 + a42 * k2 + a43 * k3));
        const Matrix k5 = rhs(t + c5 * hs, x + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Matrix k6 = rhs(t + hs, x + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const Matrix xn = x + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const double tn = last ? to : t + hs;
        const Matrix k7 = rhs(tn, xn);
        const Matrix err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double acc = 0.0;
        for (Eigen::Index i = 0; i < err.size(); ++i) {
            const double scale =
                settings.abs_tol + settings.rel_tol * std::max(std::abs(x(i)), std::abs(xn(i)));
            const double r = err(i) / scale;
            acc += r * r;
        }
        const double enorm = std::sqrt(acc / static_cast<double>(err.size()));
        if (!std::isfinite(enorm)) {
            h *= 0.25;
        } else if (enorm <= 1.0) {
            t = tn;
            x = xn;
            k1 = k7;  // first-same-as-last
            const double grow = enorm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(enorm, -0.2), 0.2, 5.0);
            h *= grow;
            continue;
        } else {
            h *= std::clamp(0.9 * std::pow(enorm, -0.2), 0.2, 1.0);
        }
        if (h < settings.min_step * std::max(1.0, std::abs(t))) {
            std::ostringstream os;
            os << "step size underflow at t=" << t;
            throw IntegrationError(os.str());
        }
    }
    return x;
}

}  // namespace dichotomy
