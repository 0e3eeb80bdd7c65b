#include "dichotomy/lyapunov.hpp"

#include "dichotomy/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dichotomy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double pnorm(const Vector& v, NormKind norm, double p) {
    const double n = vector_norm(v, norm);
    return n == 0.0 ? 0.0 : std::pow(n, p);
}

}  // namespace

HFunction::HFunction(Fn eval, double gamma, double p, std::string label)
    : eval_(std::move(eval)), gamma_(gamma), p_(p), label_(std::move(label)) {}

HFunction::HFunction(Fn eval, Fn on_stable, Fn on_unstable, double gamma, double p, std::string label)
    : eval_(std::move(eval)),
      on_stable_(std::move(on_stable)),
      on_unstable_(std::move(on_unstable)),
      gamma_(gamma),
      p_(p),
      label_(std::move(label)) {}

HFunction HFunction::scaled(double c) const {
    auto scale = [c](Fn f) -> Fn {
        if (!f) return {};
        return [f, c](double t, const Vector& x) { return Vector(c * f(t, x)); };
    };
    std::ostringstream os;
    os << c << "*" << label_;
    return HFunction(scale(eval_), scale(on_stable_), scale(on_unstable_), gamma_, p_, os.str());
}

HFunction canonical_H(const CompatiblePair& pair, const GrowthRate& rate, double gamma, double p) {
    if (!(gamma > 0.0)) throw std::invalid_argument("canonical H requires gamma > 0");
    if (!(p >= 1.0)) throw std::invalid_argument("canonical H requires p >= 1");
    auto proj = pair.P();
    // Scalar weights w μ^{±γ}.
    auto up = [rate, gamma, p](double t) { return std::exp(std::log(rate.log_derivative(t)) / p + gamma * rate.log_value(t)); };
    auto down = [rate, gamma, p](double t) { return std::exp(std::log(rate.log_derivative(t)) / p - gamma * rate.log_value(t)); };
    return HFunction(
        [proj, up, down](double t, const Vector& x) {
            const Vector px = proj(t) * x;
            const Vector qx = x - px;
            return Vector(up(t) * px + down(t) * qx);
        },
        [up](double t, const Vector& y) { return Vector(up(t) * y); },
        [down](double t, const Vector& y) { return Vector(down(t) * y); }, gamma, p, "canonical");
}

ValidationReport check_H_membership(const HFunction& h, const CompatiblePair& pair, const GrowthRate& rate,
                                    double gamma, double p, std::span<const StatePoint> grid) {
    if (grid.empty()) throw std::invalid_argument("membership grid must be nonempty");
    double worst = 0.0;
    double worst_t = 0.0;
    for (const auto& [t, x] : grid) {
        const double lhs = vector_norm(h(t, x), pair.norm());
        const Vector px = pair.P()(t) * x;
        const Vector qx = x - px;
        const double w = std::pow(rate.log_derivative(t), 1.0 / p);
        const double lm = gamma * rate.log_value(t);
        const double rhs = w * (std::exp(lm) * vector_norm(px, pair.norm()) + std::exp(-lm) * vector_norm(qx, pair.norm()));
        double ratio = 0.0;
        if (lhs > 0.0) ratio = rhs > 0.0 ? lhs / rhs : kInf;
        if (ratio > worst) {
            worst = ratio;
            worst_t = t;
        }
    }
    ValidationReport report;
    std::ostringstream os;
    os << "H=" << h.label() << ", worst at t=" << worst_t;
    report.add("membership", worst <= 1.0 + 1e-9, worst, 1.0 + 1e-9, os.str());
    return report;
}

LyapunovFunction::LyapunovFunction(Fn eval, std::string label, TruncatedFn truncated)
    : eval_(std::move(eval)), label_(std::move(label)), truncated_(std::move(truncated)) {}

LyapunovFunction construct_L(const CompatiblePair& pair, const GrowthRate& rate, const HFunction& h, double p,
                             const QuadSettings& quad) {
    if (!(p >= 1.0)) throw std::invalid_argument("Lyapunov construction requires p >= 1");
    const double horizon = quad.horizon.value_or(200.0);
    const double factor = std::pow(2.0, p - 1.0);

    const NormKind norm = pair.norm();
    auto forward = [pair, h, p, norm](double t, const Vector& x) {
        return [&pair, &h, p, norm, t, x](double tau) { return pnorm(h.on_stable(tau, pair.stable(tau, t) * x), norm, p); };
    };
    auto backward = [pair, h, p, norm, quad](double t, const Vector& x) {
        auto f = [&](double tau) { return pnorm(h.on_unstable(tau, pair.uq(tau, t) * x), norm, p); };
        return integrate(f, 0.0, t, quad).value;
    };

    auto eval = [forward, backward, rate, quad, horizon, factor](double t, const Vector& x) {
        if (x.isZero(0.0)) return 0.0;
        const auto fwd = integrate_to_infinity(forward(t, x), rate, t, t + horizon, quad);
        return factor * (fwd.total() - backward(t, x));
    };
    auto truncated = [forward, backward, quad, factor](double t, const Vector& x, double T) {
        if (x.isZero(0.0)) return 0.0;
        const double fwd = T > t ? integrate(forward(t, x), t, T, quad).value : 0.0;
        return factor * (fwd - backward(t, x));
    };

    LyapunovFunction l(eval, "constructed(" + h.label() + ")", truncated);
    l.horizon = horizon;
    l.quad = quad;
    l.quad.horizon = horizon;

    // Probe for a non-decaying forward integrand on the basis vectors.
    for (int i = 0; i < pair.dim(); ++i) {
        const Vector e = Vector::Unit(pair.dim(), i);
        if (std::isinf(l(0.0, e))) {
            l.warnings.push_back("forward integrand does not decay at the horizon (gamma at or above the decay rate)");
            break;
        }
    }
    return l;
}

ValidationReport check_L_conditions(const LyapunovFunction& l, const CompatiblePair& pair, const GrowthRate& rate,
                                    const HFunction& h, double p, const LyapunovBound& bound,
                                    std::span<const LyapunovSample> samples, double tol, std::size_t workers) {
    if (samples.empty()) throw std::invalid_argument("Lyapunov samples must be nonempty");
    for (const auto& smp : samples) {
        if (!(smp.t >= smp.s && smp.s >= 0.0)) throw std::invalid_argument("Lyapunov samples require t >= s >= 0");
    }
    const double factor = std::pow(2.0, p - 1.0);
    const QuadSettings quad = l.quad;

    struct Outcome {
        double decrease = 0.0;
        double sign_stable = 0.0;
        double sign_unstable = 0.0;
        double bound = 0.0;
    };
    std::vector<Outcome> out(samples.size());

    auto point_checks = [&](double t, const Vector& x, Outcome& o) {
        const double nx = vector_norm(x, pair.norm());
        if (nx == 0.0) return;
        const double nxp = std::pow(nx, p);
        const Vector px = pair.P()(t) * x;
        const Vector qx = pair.Q(t) * x;
        const double lp = l(t, px);
        const double lq = l(t, qx);
        o.sign_stable = std::max(o.sign_stable, -lp / nxp);
        o.sign_unstable = std::max(o.sign_unstable, lq / nxp);
        const double lm = p * bound.gamma * rate.log_value(t);
        const double lhs = std::exp(-lm) * lp - std::exp(lm) * lq;
        const double rhs = factor * bound.D * std::exp(p * bound.epsilon * rate.log_value(t)) * nxp;
        o.bound = std::max(o.bound, lhs / rhs);
    };

    parallel_for(
        samples.size(),
        [&](std::size_t i) {
            const auto& [t, s, x] = samples[i];
            Outcome o;
            const Vector ux = pair.U()(t, s) * x;
            const double cut = t + l.horizon;
            const bool common = l.has_truncated() && l.horizon > 0.0;
            const double l_after = common ? l.truncated(t, ux, cut) : l(t, ux);
            const double l_before = common ? l.truncated(s, x, cut) : l(s, x);
            // H is linear: split U(τ,s)x into its range-P and range-Q parts.
            auto along = [&](double tau) {
                const Vector st = pair.stable(tau, s) * x;
                const Vector un = pair.U()(tau, s) * x - st;
                return pnorm(h.on_stable(tau, st) + h.on_unstable(tau, un), pair.norm(), p);
            };
            const double dissipated = integrate(along, s, t, quad).value;
            const double scale = std::max({1.0, std::abs(l_before), std::abs(l_after)});
            o.decrease = (l_after + dissipated - l_before) / scale;
            point_checks(t, x, o);
            point_checks(s, x, o);
            out[i] = o;
        },
        workers);

    ValidationReport report;
    Outcome worst{-kInf, 0.0, 0.0, 0.0};
    for (const auto& o : out) {
        report.per_point.push_back(o.decrease);
        worst.decrease = std::max(worst.decrease, o.decrease);
        worst.sign_stable = std::max(worst.sign_stable, o.sign_stable);
        worst.sign_unstable = std::max(worst.sign_unstable, o.sign_unstable);
        worst.bound = std::max(worst.bound, o.bound);
    }
    report.add("decrease", worst.decrease <= tol, worst.decrease, tol, "L=" + l.label() + ", H=" + h.label());
    report.add("sign_stable", worst.sign_stable <= tol, worst.sign_stable, tol);
    report.add("sign_unstable", worst.sign_unstable <= tol, worst.sign_unstable, tol);
    report.add("bound", worst.bound <= 1.0 + tol, worst.bound, 1.0 + tol);
    return report;
}

ValidationReport check_quadratic_certificate(const QuadraticCertificate& w, const CompatiblePair& pair,
                                             const GrowthRate& rate, const HFunction& h, const LyapunovBound& bound,
                                             std::span<const LyapunovSample> samples, double tol,
                                             const QuadSettings& quad) {
    if (samples.empty()) throw std::invalid_argument("certificate samples must be nonempty");
    ValidationReport report;

    double asym = 0.0;
    for (const auto& smp : samples) {
        for (double t : {smp.t, smp.s}) {
            const Matrix m = w.W(t);
            asym = std::max(asym, (m - m.transpose()).norm());
        }
    }
    report.add("symmetry", asym <= 1e-10, asym, 1e-10);
    if (asym > 1e-10) {
        report.notes.emplace_back("W is not symmetric; inequality checks skipped");
        return report;
    }

    auto form = [](const Matrix& m, const Vector& x) { return x.dot(m * x); };
    double decrease = -kInf;
    double sign_p = 0.0;
    double sign_q = 0.0;
    double bnd = 0.0;
    auto point_checks = [&](double t, const Vector& x) {
        const double nx2 = x.squaredNorm();
        if (nx2 == 0.0) return;
        const Matrix m = w.W(t);
        const Vector px = pair.P()(t) * x;
        const Vector qx = pair.Q(t) * x;
        const double fp = form(m, px);
        const double fq = form(m, qx);
        sign_p = std::max(sign_p, -fp / nx2);
        sign_q = std::max(sign_q, fq / nx2);
        const double lm = 2.0 * bound.gamma * rate.log_value(t);
        const double lhs = std::exp(-lm) * fp - std::exp(lm) * fq;
        const double rhs = bound.D * std::exp(2.0 * bound.epsilon * rate.log_value(t)) * nx2;
        bnd = std::max(bnd, lhs / rhs);
    };

    for (const auto& [t, s, x] : samples) {
        if (!(t >= s && s >= 0.0)) throw std::invalid_argument("certificate samples require t >= s >= 0");
        const Matrix u = pair.U()(t, s);
        const double after = form(u.transpose() * w.W(t) * u, x);
        const double before = form(w.W(s), x);
        auto along = [&](double tau) { return h(tau, pair.U()(tau, s) * x).squaredNorm(); };
        const double dissipated = integrate(along, s, t, quad).value;
        const double scale = std::max({1.0, std::abs(before), std::abs(after)});
        decrease = std::max(decrease, (after + dissipated - before) / scale);
        point_checks(t, x);
        point_checks(s, x);
    }
    report.add("decrease", decrease <= tol, decrease, tol);
    report.add("sign_stable", sign_p <= tol, sign_p, tol);
    report.add("sign_unstable", sign_q <= tol, sign_q, tol);
    report.add("bound", bnd <= 1.0 + tol, bnd, 1.0 + tol);
    return report;
}

}  // namespace dichotomy
