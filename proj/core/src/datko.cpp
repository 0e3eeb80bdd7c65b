#include "dichotomy/datko.hpp"

#include "dichotomy/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dichotomy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// exp(log w + e·lr + p log n) with n = 0 ↦ 0, so that neither factor can
// overflow into inf·0.
double weighted_power(double weight, double exponent_times_log_ratio, double p, double norm) {
    if (norm == 0.0 || weight == 0.0) return 0.0;
    return std::exp(std::log(weight) + exponent_times_log_ratio + p * std::log(norm));
}

std::string describe(const char* what, double v) {
    std::ostringstream os;
    os << what << " (got " << v << ")";
    return os.str();
}

}  // namespace

void DatkoParams::validate() const {
    if (!(p > 0.0)) throw std::invalid_argument(describe("p must be positive", p));
    if (!(gamma > 0.0)) throw std::invalid_argument(describe("gamma must be positive", gamma));
    if (!(epsilon >= 0.0)) throw std::invalid_argument(describe("epsilon must be nonnegative", epsilon));
    if (!(D > 0.0)) throw std::invalid_argument(describe("D must be positive", D));
}

void GrowthBound::validate() const {
    if (!(M >= 1.0)) throw std::invalid_argument(describe("M must be at least 1", M));
    if (!(omega > 0.0)) throw std::invalid_argument(describe("omega must be positive", omega));
    if (!(alpha >= 0.0)) throw std::invalid_argument(describe("alpha must be nonnegative", alpha));
}

std::string_view to_string(Provenance p) noexcept {
    switch (p) {
        case Provenance::estimated: return "estimated";
        case Provenance::derived: return "derived";
        case Provenance::user_claimed: return "user_claimed";
    }
    return "unknown";
}

Provenance provenance_from_string(std::string_view name) {
    if (name == "estimated") return Provenance::estimated;
    if (name == "derived") return Provenance::derived;
    if (name == "user_claimed") return Provenance::user_claimed;
    throw std::invalid_argument("unknown provenance '" + std::string(name) + "'");
}

void DichotomyCertificate::validate() const {
    if (!(a > 0.0)) throw std::invalid_argument(describe("certificate a must be positive", a));
    if (!(b > 0.0)) throw std::invalid_argument(describe("certificate b must be positive", b));
    if (!(epsilon >= 0.0)) throw std::invalid_argument(describe("certificate epsilon must be nonnegative", epsilon));
    if (!(N1 >= 1.0)) throw std::invalid_argument(describe("certificate N1 must be at least 1", N1));
    if (!(N2 >= 1.0)) throw std::invalid_argument(describe("certificate N2 must be at least 1", N2));
}

double datko_integrand(const CompatiblePair& pair, const GrowthRate& rate, double p, double gamma, double tau,
                       double t, const Vector& x) {
    if (!(tau >= 0.0) || !(t >= 0.0)) throw std::invalid_argument("integrand requires tau, t >= 0");
    if (x.size() == 0 || x.isZero(0.0)) throw std::invalid_argument("integrand requires x != 0");
    const double n = vector_norm(green(pair, tau, t, x), pair.norm());
    const double sign = tau > t ? 1.0 : (tau < t ? -1.0 : 0.0);
    return weighted_power(rate.log_derivative(tau), p * gamma * sign * rate.log_ratio(tau, t), p, n);
}

double DatkoIntegral::total() const noexcept { return tail.diverging ? kInf : computed() + tail.value; }

double DatkoIntegral::error() const noexcept {
    return tail.diverging ? kInf : unstable.error + stable.error + tail.value;
}

DatkoIntegral datko_integral(const CompatiblePair& pair, const GrowthRate& rate, double p, double gamma, double t,
                             const Vector& x, double T_max, const QuadSettings& quad) {
    if (!(t >= 0.0)) throw std::invalid_argument("t must be nonnegative");
    if (!(T_max > t)) throw std::invalid_argument(describe("T_max must exceed t", T_max));
    if (x.size() != pair.dim() || x.isZero(0.0)) throw std::invalid_argument("x must be a nonzero vector of dimension d");

    const NormKind norm = pair.norm();
    const Vector px = pair.P()(t) * x;
    const Vector qx = pair.Q(t) * x;
    const double pg = p * gamma;

    // Both branches apply the operator to the projected vector directly.
    auto stable_f = [&](double tau) {
        const double n = vector_norm(pair.stable(tau, t) * px, norm);
        return weighted_power(rate.log_derivative(tau), pg * rate.log_ratio(tau, t), p, n);
    };
    auto unstable_f = [&](double tau) {
        const double n = vector_norm(pair.uq(tau, t) * qx, norm);
        return weighted_power(rate.log_derivative(tau), pg * rate.log_ratio(t, tau), p, n);
    };

    DatkoIntegral r;
    r.T_max = T_max;
    r.unstable = integrate(unstable_f, 0.0, t, quad);
    r.stable = integrate(stable_f, t, T_max, quad);
    r.tail = estimate_tail(stable_f, rate, t, T_max);
    return r;
}

double theoretical_D(double N1, double N2, double p, double a, double b, double gamma) {
    if (!(p > 0.0)) throw std::invalid_argument(describe("p must be positive", p));
    if (!(N1 >= 1.0) || !(N2 >= 1.0)) throw std::invalid_argument("N1 and N2 must be at least 1");
    if (!(gamma > 0.0) || !(gamma < std::min(a, b))) {
        std::ostringstream os;
        os << "gamma must satisfy 0 < gamma < min{a, b} (got gamma=" << gamma << ", a=" << a << ", b=" << b << ")";
        throw std::invalid_argument(os.str());
    }
    return std::pow(N1, p) / (p * (a - gamma)) + std::pow(N2, p) / (p * (b - gamma));
}

double default_horizon(double p, double gamma, std::optional<double> a_est) {
    if (a_est && *a_est > gamma && p > 0.0) return 40.0 / (p * (*a_est - gamma));
    return 200.0;
}

DatkoReport check_datko_condition(const CompatiblePair& pair, const GrowthRate& rate, const DatkoParams& params,
                                  std::span<const double> t_grid, std::span<const Vector> x_samples,
                                  const QuadSettings& quad, std::optional<double> a_est, std::size_t workers) {
    params.validate();
    if (t_grid.empty() || x_samples.empty()) throw std::invalid_argument("t grid and x samples must be nonempty");
    for (const auto& x : x_samples) {
        if (x.size() != pair.dim() || x.isZero(0.0)) throw std::invalid_argument("x samples must be nonzero");
    }

    DatkoReport report;
    report.params = params;
    report.norm = pair.norm();
    report.horizon = quad.horizon.value_or(default_horizon(params.p, params.gamma, a_est));
    report.threshold = params.D * (1.0 + 1e-6);
    report.points.resize(t_grid.size() * x_samples.size());

    parallel_for(
        report.points.size(),
        [&](std::size_t k) {
            const double t = t_grid[k / x_samples.size()];
            const Vector& x = x_samples[k % x_samples.size()];
            DatkoPoint pt;
            pt.t = t;
            pt.x = x;
            pt.integral = datko_integral(pair, rate, params.p, params.gamma, t, x, t + report.horizon, quad);
            const double scale =
                std::exp(params.p * params.epsilon * rate.log_value(t) + params.p * std::log(vector_norm(x, pair.norm())));
            pt.ratio = pt.integral.total() / scale;
            report.points[k] = std::move(pt);
        },
        workers);

    report.max_ratio = 0.0;
    for (std::size_t k = 0; k < report.points.size(); ++k) {
        const auto& pt = report.points[k];
        if (pt.integral.diverging()) report.tail_divergence = true;
        if (!pt.integral.stable.converged || !pt.integral.unstable.converged) {
            std::ostringstream os;
            os << "quadrature did not converge at t=" << pt.t;
            report.warnings.push_back(os.str());
        }
        if (!(pt.ratio <= report.max_ratio) || k == 0) {
            report.max_ratio = pt.ratio;
            report.argmax = k;
        }
    }
    if (report.tail_divergence) {
        report.warnings.emplace_back(
            "integrand is not decaying at the truncation horizon (gamma at or above the decay rate)");
    }
    report.pass = !report.tail_divergence && report.max_ratio <= report.threshold;
    return report;
}

ValidationReport check_growth_bound(const CompatiblePair& pair, const GrowthRate& rate, const GrowthBound& bound,
                                    std::span<const GridPoint> grid) {
    bound.validate();
    if (grid.empty()) throw std::invalid_argument("growth-bound grid must be nonempty");
    double worst = 0.0;
    GridPoint worst_at{0.0, 0.0};
    for (const auto& [t, s] : grid) {
        if (t == s) throw std::invalid_argument("growth bound is only defined for t != s");
        double g = 0.0;
        try {
            g = operator_norm(green_matrix(pair, t, s), pair.norm());
        } catch (const SingularRestriction&) {
            g = kInf;
        }
        const double sign = t > s ? 1.0 : -1.0;
        const double log_rhs = std::log(bound.M) + std::log(rate.log_derivative(s)) +
                               bound.omega * sign * rate.log_ratio(t, s) + bound.alpha * rate.log_value(s);
        const double ratio = g == 0.0 ? 0.0 : std::exp(std::log(g) - log_rhs);
        if (!(ratio <= worst)) {
            worst = ratio;
            worst_at = {t, s};
        }
    }
    ValidationReport report;
    std::ostringstream os;
    os << "worst at t=" << worst_at.t << ", s=" << worst_at.s;
    report.add("growth_bound", worst <= 1.0 + 1e-9, worst, 1.0 + 1e-9, os.str());
    return report;
}

DichotomyCertificate derive_certificate(const DatkoParams& params, const GrowthBound& bound, double K_mu) {
    params.validate();
    bound.validate();
    if (!(params.p >= 1.0)) throw std::invalid_argument(describe("certificate derivation requires p >= 1", params.p));
    if (!(params.gamma > bound.alpha)) {
        std::ostringstream os;
        os << "certificate derivation requires gamma > alpha (got gamma=" << params.gamma << ", alpha=" << bound.alpha
           << ")";
        throw std::invalid_argument(os.str());
    }
    if (!(K_mu > 0.0)) throw std::invalid_argument(describe("K_mu must be positive", K_mu));

    const double p = params.p;
    const double g = params.gamma;
    const double w = bound.omega;
    const double al = bound.alpha;
    const double M = bound.M;
    const double K = K_mu;
    const double D = params.D;

    // Far range (t ≥ s + 1) in p-th power form, near range (t < s + 1) directly.
    const double n1_far = std::pow(D * std::pow(M, p) * std::pow(K, p - 1.0) * std::exp(K * (w + g) * p), 1.0 / p);
    const double n1_near = M * K * std::exp(K * (w + g - al));
    const double n2_far =
        std::pow(D * std::pow(M, p) * std::pow(K, p - 1.0) * std::exp(K * (al + w + g) * p), 1.0 / p);
    const double n2_near = M * K * std::exp(K * (w + g + al));

    DichotomyCertificate cert;
    cert.a = g - al;
    cert.b = g + al;
    cert.epsilon = params.epsilon + al;
    cert.N1 = std::max({n1_far, n1_near, 1.0});
    cert.N2 = std::max({n2_far, n2_near, 1.0});
    cert.provenance = Provenance::derived;
    return cert;
}

ValidationReport verify_certificate(const CompatiblePair& pair, const GrowthRate& rate,
                                    const DichotomyCertificate& cert, std::span<const TimePair> grid, double tol) {
    cert.validate();
    if (grid.empty()) throw std::invalid_argument("certificate grid must be nonempty");
    double worst_p = 0.0;
    double worst_q = 0.0;
    TimePair at_p{0, 0};
    TimePair at_q{0, 0};
    std::string singular;
    for (const auto& [t, s] : grid) {
        if (!(t >= s)) throw std::invalid_argument("certificate grid requires t >= s");
        const double lr = rate.log_ratio(t, s);
        const double np = operator_norm(pair.stable(t, s), pair.norm());
        const double rp =
            np == 0.0 ? 0.0 : std::exp(std::log(np) - std::log(cert.N1) + cert.a * lr - cert.epsilon * rate.log_value(s));
        if (!(rp <= worst_p)) {
            worst_p = rp;
            at_p = {t, s};
        }
        double nq = 0.0;
        try {
            nq = operator_norm(pair.uq(s, t), pair.norm());
        } catch (const SingularRestriction& e) {
            singular = e.what();
            nq = kInf;
        }
        const double rq =
            nq == 0.0 ? 0.0 : std::exp(std::log(nq) - std::log(cert.N2) + cert.b * lr - cert.epsilon * rate.log_value(t));
        if (!(rq <= worst_q)) {
            worst_q = rq;
            at_q = {t, s};
        }
    }
    auto where = [](TimePair tp) {
        std::ostringstream os;
        os << "worst at t=" << tp.t << ", s=" << tp.s;
        return os.str();
    };
    ValidationReport report;
    report.add("stable_branch", worst_p <= 1.0 + tol, worst_p, 1.0 + tol, where(at_p));
    report.add("unstable_branch", worst_q <= 1.0 + tol, worst_q, 1.0 + tol, singular.empty() ? where(at_q) : singular);
    return report;
}

}  // namespace dichotomy
