#include "dichotomy/growth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dichotomy {

std::string_view to_string(GrowthKind kind) noexcept {
    switch (kind) {
        case GrowthKind::exponential: return "exponential";
        case GrowthKind::polynomial: return "polynomial";
        case GrowthKind::sqrt_shift: return "sqrt_shift";
        case GrowthKind::custom: return "custom";
    }
    return "unknown";
}

GrowthRate::GrowthRate(GrowthKind kind, Fn value, Fn derivative, std::optional<double> known_K,
                       std::string description)
    : kind_(kind),
      value_(std::move(value)),
      derivative_(std::move(derivative)),
      known_K_(known_K),
      description_(std::move(description)) {}

GrowthRate GrowthRate::exponential() {
    return GrowthRate(
        GrowthKind::exponential, [](double t) { return std::exp(t); }, [](double t) { return std::exp(t); }, 1.0,
        "exponential");
}

GrowthRate GrowthRate::polynomial() {
    return GrowthRate(
        GrowthKind::polynomial, [](double t) { return t + 1.0; }, [](double) { return 1.0; }, 1.0, "polynomial");
}

GrowthRate GrowthRate::sqrt_shift() {
    return GrowthRate(
        GrowthKind::sqrt_shift, [](double t) { return t + std::hypot(t, 1.0); },
        [](double t) { return 1.0 + t / std::hypot(t, 1.0); }, 1.0, "sqrt_shift");
}

GrowthRate GrowthRate::from_expression(std::string_view text) {
    auto expr = Expression::parse(text);
    auto deriv = expr.derivative();
    return GrowthRate(
        GrowthKind::custom, [expr](double t) { return expr(t); }, [deriv](double t) { return deriv(t); },
        std::nullopt, expr.to_string());
}

double GrowthRate::log_value(double t) const {
    if (kind_ == GrowthKind::exponential) return t;
    return std::log(value_(t));
}

double GrowthRate::log_derivative(double t) const {
    if (kind_ == GrowthKind::exponential) return 1.0;
    return derivative_(t) / value_(t);
}

namespace {

void require_grid(std::span<const double> grid, bool starts_at_zero) {
    if (grid.empty()) throw std::invalid_argument("grid must be nonempty");
    if (!std::is_sorted(grid.begin(), grid.end())) throw std::invalid_argument("grid must be sorted ascending");
    if (starts_at_zero && grid.front() != 0.0) throw std::invalid_argument("grid must start at 0");
    if (grid.front() < 0.0) throw std::invalid_argument("grid points must be nonnegative");
}

std::string at_point(double t) {
    std::ostringstream os;
    os.precision(17);
    os << "t=" << t;
    return os.str();
}

}  // namespace

ValidationReport validate_growth_rate(const GrowthRate& rate, std::span<const double> grid, double tol) {
    require_grid(grid, true);
    ValidationReport report;

    const double mu0 = rate(0.0);
    const double r0 = std::abs(mu0 - 1.0);
    report.add("mu_at_zero", r0 <= 1e-12, r0, 1e-12);

    double worst_below = 0.0;
    double worst_below_t = 0.0;
    for (double t : grid) {
        const double v = rate(t);
        const double deficit = std::isfinite(v) ? std::max(0.0, 1.0 - v) : std::numeric_limits<double>::infinity();
        if (deficit > worst_below) {
            worst_below = deficit;
            worst_below_t = t;
        }
    }
    report.add("at_least_one", worst_below == 0.0, worst_below, 0.0,
               worst_below > 0.0 ? at_point(worst_below_t) : std::string{});

    double worst_drop = 0.0;
    double worst_drop_t = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double drop = rate(grid[i - 1]) - rate(grid[i]);
        if (drop > worst_drop) {
            worst_drop = drop;
            worst_drop_t = grid[i];
        }
    }
    report.add("nondecreasing", worst_drop == 0.0, worst_drop, 0.0,
               worst_drop > 0.0 ? at_point(worst_drop_t) : std::string{});

    // Probe T = 1, 2, 4, ... up to 1e6 and stop at the first μ(T) > 1e3.
    double reached = 1.0;
    double reached_at = 0.0;
    for (double T = 1.0; T <= 1e6; T *= 2.0) {
        const double v = rate(T);
        if (std::isfinite(v)) {
            reached = std::max(reached, v);
            reached_at = T;
        }
        if (v > 1e3) break;
    }
    report.add("unbounded", reached > 1e3, reached, 1e3, at_point(reached_at));

    double worst_fd = 0.0;
    double worst_fd_t = 0.0;
    for (double t : grid) {
        const double h = std::max(1e-6, 1e-6 * t);
        // Second-order one-sided difference where μ is undefined below 0.
        const double fd = t - h < 0.0
                              ? (-3.0 * rate(t) + 4.0 * rate(t + h) - rate(t + 2.0 * h)) / (2.0 * h)
                              : (rate(t + h) - rate(t - h)) / (2.0 * h);
        const double d = rate.derivative(t);
        double rel = std::abs(fd - d) / std::max({std::abs(d), std::abs(fd), 1e-300});
        if (std::abs(fd - d) <= 1e-10) rel = 0.0;
        if (!std::isfinite(rel)) rel = std::numeric_limits<double>::infinity();
        if (rel > worst_fd) {
            worst_fd = rel;
            worst_fd_t = t;
        }
    }
    report.add("derivative_consistency", worst_fd <= tol, worst_fd, tol,
               worst_fd > 0.0 ? at_point(worst_fd_t) : std::string{});
    return report;
}

KmuEstimate estimate_K_mu(const GrowthRate& rate, std::span<const double> grid) {
    if (grid.empty()) throw std::invalid_argument("grid must be nonempty");
    KmuEstimate est;
    est.value = -std::numeric_limits<double>::infinity();
    for (double t : grid) {
        const double w = rate.log_derivative(t);
        if (w > est.value) {
            est.value = w;
            est.argmax = t;
        }
    }
    est.value = std::max(est.value, 0.0);
    est.known = rate.known_K();
    est.exceeds_known = est.known && est.value > *est.known + 1e-9;
    return est;
}

Lemma1Report lemma1_check(const GrowthRate& rate, double K, std::span<const double> grid,
                          std::span<const double> deltas, double tol) {
    if (!(K > 0.0)) throw std::invalid_argument("K must be positive");
    if (grid.empty() || deltas.empty()) throw std::invalid_argument("grid and deltas must be nonempty");
    for (double d : deltas) {
        if (!(d > 0.0)) throw std::invalid_argument("deltas must be positive");
    }

    Lemma1Report r;

    double w1 = -std::numeric_limits<double>::infinity();
    for (double t : grid) w1 = std::max(w1, rate.log_derivative(t) - K);
    r.log_derivative_bound = {"log_derivative_bound", w1 <= tol, w1, tol, {}};

    std::vector<double> logs(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) logs[i] = rate.log_value(grid[i]);
    double w2 = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < grid.size(); ++j) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (grid[i] < grid[j]) continue;
            w2 = std::max(w2, logs[i] - logs[j] - K * (grid[i] - grid[j]));
        }
    }
    r.exponential_envelope = {"exponential_envelope", w2 <= tol, w2, tol, {}};

    double w3 = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (double d : deltas) w3 = std::max(w3, rate.log_value(grid[i] + d) - logs[i] - K * d);
    }
    r.increment_bound = {"increment_bound", w3 <= tol, w3, tol, {}};

    r.verdicts_agree = r.log_derivative_bound.pass == r.exponential_envelope.pass &&
                       r.exponential_envelope.pass == r.increment_bound.pass;
    return r;
}

}  // namespace dichotomy
