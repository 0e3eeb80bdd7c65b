#include "dichotomy/quadrature.hpp"

#include "dichotomy/growth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace dichotomy {

namespace {

// Kronrod 15-point nodes on [-1, 1] (nonnegative half); odd indices are
// the embedded 7-point Gauss nodes.
constexpr std::array<double, 8> kXk{0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWk{0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg{0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double lo;
    double hi;
    double value;
    double error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gauss_kronrod(const Integrand& f, double lo, double hi, int& evals) {
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    const double fc = f(c);
    double kronrod = fc * kWk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXk[j];
        const double f1 = f(c - dx);
        const double f2 = f(c + dx);
        kronrod += kWk[j] * (f1 + f2);
        if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
    }
    evals += 15;
    kronrod *= h;
    gauss *= h;
    return Segment{lo, hi, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

QuadResult integrate(const Integrand& f, double lo, double hi, const QuadSettings& settings) {
    QuadResult result;
    if (hi == lo) return result;
    if (hi < lo) {
        result = integrate(f, hi, lo, settings);
        result.value = -result.value;
        return result;
    }

    std::priority_queue<Segment> heap;
    auto first = gauss_kronrod(f, lo, hi, result.evaluations);
    double total = first.value;
    double error = first.error;
    heap.push(first);

    int intervals = 1;
    while (error > std::max(settings.abs_tol, settings.rel_tol * std::abs(total))) {
        if (intervals >= settings.max_intervals || !std::isfinite(total)) {
            result.converged = false;
            break;
        }
        auto worst = heap.top();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi)) {
            result.converged = false;
            break;
        }
        heap.pop();
        auto left = gauss_kronrod(f, worst.lo, mid, result.evaluations);
        auto right = gauss_kronrod(f, mid, worst.hi, result.evaluations);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++intervals;
    }

    // Re-sum to drop the accumulated cancellation from incremental updates.
    total = 0.0;
    error = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    result.value = total;
    result.error = error;
    return result;
}

TailEstimate estimate_tail(const Integrand& f, const GrowthRate& rate, double lo, double T) {
    constexpr int kChunks = 4;
    constexpr int kSamplesPerChunk = 64;
    constexpr int kRefine = 16;
    TailEstimate tail;
    if (!(T > lo)) return tail;

    const double start = lo + 0.5 * (T - lo);
    const double width = (T - start) / kChunks;
    const double step = width / kSamplesPerChunk;

    // Upper envelope of g = f / (μ′/μ) per chunk, against log μ. The coarse
    // maximum is refined on a finer grid around it, since oscillating
    // integrands otherwise give chunk maxima of uneven quality.
    std::vector<double> xs;
    std::vector<double> ys;
    bool last_positive = false;
    bool nonfinite = false;
    auto g_at = [&](double tau) {
        const double w = rate.log_derivative(tau);
        if (!(w > 0.0)) return 0.0;
        const double g = f(tau) / w;
        if (!std::isfinite(g)) nonfinite = true;
        return g;
    };
    for (int c = 0; c < kChunks; ++c) {
        const double c_lo = start + width * c;
        const double c_hi = c_lo + width;
        double best = 0.0;
        double best_tau = c_lo;
        for (int i = 0; i <= kSamplesPerChunk; ++i) {
            const double tau = c_lo + step * i;
            const double g = g_at(tau);
            if (g > best) {
                best = g;
                best_tau = tau;
            }
        }
        if (best > 0.0) {
            const double r_lo = std::max(c_lo, best_tau - step);
            const double r_hi = std::min(c_hi, best_tau + step);
            for (int i = 1; i < kRefine; ++i) {
                const double tau = r_lo + (r_hi - r_lo) * i / kRefine;
                const double g = g_at(tau);
                if (g > best) {
                    best = g;
                    best_tau = tau;
                }
            }
        }
        if (nonfinite) {
            tail.diverging = true;
            tail.value = std::numeric_limits<double>::infinity();
            return tail;
        }
        if (best > 0.0) {
            xs.push_back(rate.log_value(best_tau));
            ys.push_back(std::log(best));
        }
        last_positive = best > 0.0;
    }

    if (xs.empty()) return tail;
    if (xs.size() < 2) {
        if (!last_positive) return tail;
        tail.diverging = true;
        tail.value = std::numeric_limits<double>::infinity();
        return tail;
    }

    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) {
        tail.diverging = true;
        tail.value = std::numeric_limits<double>::infinity();
        return tail;
    }
    const double k = -sxy / sxx;
    tail.decay_rate = k;
    if (!(k > 1e-6)) {
        tail.diverging = true;
        tail.value = std::numeric_limits<double>::infinity();
        return tail;
    }
    double log_c = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < xs.size(); ++i) log_c = std::max(log_c, ys[i] + k * xs[i]);
    tail.value = std::exp(log_c - k * rate.log_value(T) - std::log(k));
    return tail;
}

SemiInfiniteResult integrate_to_infinity(const Integrand& f, const GrowthRate& rate, double lo, double upper,
                                         const QuadSettings& settings) {
    SemiInfiniteResult r;
    r.upper = upper;
    r.body = integrate(f, lo, upper, settings);
    r.tail = estimate_tail(f, rate, lo, upper);
    return r;
}

}  // namespace dichotomy
