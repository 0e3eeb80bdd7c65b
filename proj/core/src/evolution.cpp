#include "dichotomy/evolution.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <utility>

namespace dichotomy {

std::string_view to_string(Backend backend) noexcept {
    switch (backend) {
        case Backend::closed_form: return "closed_form";
        case Backend::ode_backed: return "ode_backed";
    }
    return "unknown";
}

ProjectionFamily::ProjectionFamily(int dim, Fn eval) : dim_(dim), eval_(std::move(eval)) {
    if (dim <= 0) throw std::invalid_argument("projection dimension must be positive");
}

ProjectionFamily ProjectionFamily::constant(Matrix p) {
    if (p.rows() != p.cols()) throw std::invalid_argument("projection matrix must be square");
    const int d = static_cast<int>(p.rows());
    return ProjectionFamily(d, [p = std::move(p)](double) { return p; });
}

Matrix ProjectionFamily::complement(double t) const {
    return Matrix::Identity(dim_, dim_) - eval_(t);
}

ValidationReport check_projection(const ProjectionFamily& p, std::span<const double> grid, double tol) {
    ValidationReport report;
    double worst = 0.0;
    int rank0 = -1;
    bool constant_rank = true;
    for (double t : grid) {
        const Matrix m = p(t);
        worst = std::max(worst, (m * m - m).norm());
        const int r = numerical_rank(m);
        if (rank0 < 0) rank0 = r;
        constant_rank = constant_rank && r == rank0;
    }
    report.add("idempotent", worst <= tol, worst, tol);
    report.add("constant_rank", constant_rank, constant_rank ? 0.0 : 1.0, 0.0,
               "rank at first grid point: " + std::to_string(std::max(rank0, 0)));
    return report;
}

EvolutionOperator::EvolutionOperator(int dim, Fn eval, Backend backend)
    : dim_(dim), eval_(std::move(eval)), backend_(backend) {
    if (dim <= 0) throw std::invalid_argument("operator dimension must be positive");
}

Matrix EvolutionOperator::operator()(double t, double s) const {
    if (!(t >= s) || !(s >= 0.0)) {
        std::ostringstream os;
        os << "evolution operator requires t >= s >= 0 (got t=" << t << ", s=" << s << ")";
        throw std::invalid_argument(os.str());
    }
    return eval_(t, s);
}

CompatiblePair::CompatiblePair(EvolutionOperator u, ProjectionFamily p, NormKind norm, std::string name, PairFn uq,
                               PairFn stable)
    : u_(std::move(u)),
      p_(std::move(p)),
      norm_(norm),
      name_(std::move(name)),
      uq_(std::move(uq)),
      stable_(std::move(stable)) {
    if (u_.dim() != p_.dim()) throw std::invalid_argument("operator and projection dimensions differ");
}

Matrix CompatiblePair::stable(double t, double s) const {
    if (stable_) {
        if (!(t >= s) || !(s >= 0.0)) throw std::invalid_argument("stable branch requires t >= s >= 0");
        return stable_(t, s);
    }
    return u_(t, s) * p_(s);
}

Matrix CompatiblePair::uq(double s, double t) const {
    if (!(t >= s) || !(s >= 0.0)) throw std::invalid_argument("U_Q(s, t) requires t >= s >= 0");
    if (t == s) return Q(t);
    if (uq_) return uq_(s, t);
    return restricted_inverse(u_(t, s), p_(s), p_(t));
}

CompatiblePair CompatiblePair::with_norm(NormKind norm) const {
    CompatiblePair copy = *this;
    copy.norm_ = norm;
    return copy;
}

Matrix restricted_inverse(const Matrix& u_ts, const Matrix& p_s, const Matrix& p_t) {
    const auto d = u_ts.rows();
    const Matrix q_s = Matrix::Identity(d, d) - p_s;
    const Matrix q_t = Matrix::Identity(d, d) - p_t;
    const Matrix bs = range_basis(q_s);
    const Matrix bt = range_basis(q_t);
    if (bs.cols() != bt.cols()) {
        throw SingularRestriction("rank of Q(s) (" + std::to_string(bs.cols()) + ") differs from rank of Q(t) (" +
                                  std::to_string(bt.cols()) + ")");
    }
    if (bs.cols() == 0) return Matrix::Zero(d, d);

    // Coordinates of U(t,s)|_{Q(s)} in the bases bs -> bt.
    const Matrix c = bt.transpose() * u_ts * bs;
    Eigen::JacobiSVD<Matrix> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) < 1e-10) {
        std::ostringstream os;
        os << "restriction of U(t,s) to Q(s)X is singular (smallest singular value " << sv(sv.size() - 1) << ")";
        throw SingularRestriction(os.str());
    }
    const Matrix m = bs * svd.solve(bt.transpose() * q_t);

    for (Eigen::Index j = 0; j < bt.cols(); ++j) {
        const Vector q = bt.col(j);
        const double res = (u_ts * (m * q) - q).norm();
        if (res > 1e-7 * q.norm()) {
            std::ostringstream os;
            os << "restricted solve residual " << res << " exceeds 1e-7 (U(t,s) does not map Q(s)X onto Q(t)X)";
            throw SingularRestriction(os.str());
        }
    }
    return m;
}

Matrix evaluate_UQ(const CompatiblePair& pair, double s, double t) { return pair.uq(s, t); }

Matrix green_matrix(const CompatiblePair& pair, double tau, double t) {
    if (!(tau >= 0.0) || !(t >= 0.0)) throw std::invalid_argument("Green function requires tau, t >= 0");
    if (tau > t) return pair.stable(tau, t);
    if (tau < t) return -pair.uq(tau, t);
    return pair.P()(t);
}

Vector green(const CompatiblePair& pair, double tau, double t, const Vector& x) {
    return green_matrix(pair, tau, t) * x;
}

ValidationReport check_cocycle(const EvolutionOperator& u, std::span<const Triple> triples, double tol) {
    for (const auto& tr : triples) {
        if (!(tr.t >= tr.tau && tr.tau >= tr.s && tr.s >= 0.0)) {
            std::ostringstream os;
            os << "cocycle triple must satisfy t >= tau >= s >= 0 (got " << tr.t << ", " << tr.tau << ", " << tr.s
               << ")";
            throw std::invalid_argument(os.str());
        }
    }
    ValidationReport report;
    double worst = 0.0;
    std::size_t failures = 0;
    for (const auto& tr : triples) {
        const Matrix lhs = u(tr.t, tr.tau) * u(tr.tau, tr.s);
        const Matrix rhs = u(tr.t, tr.s);
        const double r = relative_frobenius(lhs, rhs, 1e-300);
        report.per_point.push_back(r);
        worst = std::max(worst, r);
        if (!(r <= tol)) ++failures;
    }
    report.add("cocycle", failures == 0, worst, tol, std::to_string(failures) + " failing triples");
    return report;
}

ValidationReport check_compatibility(const CompatiblePair& pair, std::span<const TimePair> pairs, double tol) {
    for (const auto& tp : pairs) {
        if (!(tp.t >= tp.s && tp.s >= 0.0)) throw std::invalid_argument("compatibility pairs must satisfy t >= s >= 0");
    }
    const auto d = pair.dim();
    const Matrix id = Matrix::Identity(d, d);

    double commutation = 0.0;
    double right_inv = 0.0;
    double left_inv = 0.0;
    double composition = 0.0;
    double min_sv = std::numeric_limits<double>::infinity();
    std::string singular_detail;

    for (const auto& [t, s] : pairs) {
        const Matrix u = pair.U()(t, s);
        const Matrix pt = pair.P()(t);
        const Matrix ps = pair.P()(s);
        commutation = std::max(commutation, (pt * u - u * ps).norm() / std::max(u.norm(), 1.0));

        const Matrix qs = id - ps;
        const Matrix qt = id - pt;
        const Matrix bs = range_basis(qs);
        const Matrix bt = range_basis(qt);
        if (bs.cols() > 0 && bs.cols() == bt.cols()) {
            Eigen::JacobiSVD<Matrix> svd(bt.transpose() * u * bs);
            min_sv = std::min(min_sv, svd.singularValues()(svd.singularValues().size() - 1));
        } else if (bs.cols() != bt.cols()) {
            min_sv = 0.0;
        }

        try {
            const Matrix m = pair.uq(s, t);
            right_inv = std::max(right_inv, relative_frobenius(u * m, qt));
            left_inv = std::max(left_inv, relative_frobenius(m * u * qs, qs));
            const double tau = 0.5 * (t + s);
            const Matrix composed = pair.uq(s, tau) * pair.uq(tau, t);
            composition = std::max(composition, relative_frobenius(composed, m));
        } catch (const SingularRestriction& e) {
            singular_detail = e.what();
            right_inv = left_inv = composition = std::numeric_limits<double>::infinity();
        }
    }

    ValidationReport report;
    report.add("commutation", commutation <= tol, commutation, tol);
    const bool invertible = singular_detail.empty() && !(min_sv < 1e-10);
    report.add("restriction_invertible", invertible, std::isfinite(min_sv) ? min_sv : 0.0, 1e-10,
               singular_detail.empty() ? std::string("smallest restricted singular value") : singular_detail);
    report.add("uq_right_inverse", right_inv <= tol, right_inv, tol);
    report.add("uq_left_inverse", left_inv <= tol, left_inv, tol);
    report.add("uq_composition", composition <= tol, composition, tol);
    if (!std::isfinite(min_sv)) report.notes.emplace_back("Q is the zero projection; inverse identities are vacuous");
    return report;
}

CompatiblePair build_example1(const GrowthRate& rate, double a, double b, double epsilon) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("example1 requires a, b > 0");
    if (!(epsilon >= 0.0)) throw std::invalid_argument("example1 requires epsilon >= 0");

    // μ(t)^ε − 1, computed as expm1 to stay exact for small ε log μ.
    auto lift = [rate, epsilon](double t) { return std::expm1(epsilon * rate.log_value(t)); };
    auto proj = [lift](double t) {
        Matrix p(2, 2);
        p << 1.0, lift(t), 0.0, 0.0;
        return p;
    };
    auto comp = [lift](double t) {
        Matrix q(2, 2);
        q << 0.0, -lift(t), 0.0, 1.0;
        return q;
    };
    EvolutionOperator u(
        2,
        [rate, a, b, proj, comp](double t, double s) {
            const double lr = rate.log_ratio(t, s);
            return Matrix(std::exp(-a * lr) * proj(s) + std::exp(b * lr) * comp(t));
        },
        Backend::closed_form);
    auto stable = [rate, a, proj](double t, double s) { return Matrix(std::exp(-a * rate.log_ratio(t, s)) * proj(s)); };
    auto uq = [rate, b, comp](double s, double t) { return Matrix(std::exp(-b * rate.log_ratio(t, s)) * comp(s)); };
    return CompatiblePair(std::move(u), ProjectionFamily(2, proj), NormKind::max, "example1", uq, stable);
}

CompatiblePair build_example2(double a, double b, double alpha) {
    if (!(a > 1.0) || !(b > 1.0)) throw std::invalid_argument("example2 requires a, b > 1");
    if (!(alpha >= 0.0)) throw std::invalid_argument("example2 requires alpha >= 0");
    if (!(alpha + 1.0 < std::min(a, b))) {
        std::ostringstream os;
        os << "example2 requires alpha + 1 < min{a, b} (got alpha=" << alpha << ", a=" << a << ", b=" << b << ")";
        throw std::invalid_argument(os.str());
    }
    const auto rate = GrowthRate::sqrt_shift();
    // Oscillating exponent α sin²(t) log μ(t).
    auto osc = [rate, alpha](double t) {
        const double st = std::sin(t);
        return alpha * st * st * rate.log_value(t);
    };
    auto u1 = [rate, a, osc](double t, double s) {
        return rate.derivative(s) / rate.derivative(t) * std::exp(-a * rate.log_ratio(t, s) + osc(s) - osc(t));
    };
    auto u2 = [rate, b, osc](double t, double s) {
        return rate.derivative(s) / rate.derivative(t) * std::exp(b * rate.log_ratio(t, s) + osc(t) - osc(s));
    };
    EvolutionOperator u(
        2,
        [u1, u2](double t, double s) {
            Matrix m = Matrix::Zero(2, 2);
            m(0, 0) = u1(t, s);
            m(1, 1) = u2(t, s);
            return m;
        },
        Backend::closed_form);
    Matrix p = Matrix::Zero(2, 2);
    p(0, 0) = 1.0;
    auto stable = [u1](double t, double s) {
        Matrix m = Matrix::Zero(2, 2);
        m(0, 0) = u1(t, s);
        return m;
    };
    auto uq = [u2](double s, double t) {
        Matrix m = Matrix::Zero(2, 2);
        m(1, 1) = 1.0 / u2(t, s);
        return m;
    };
    return CompatiblePair(std::move(u), ProjectionFamily::constant(p), NormKind::spectral, "example2", uq, stable);
}

CompatiblePair build_diagonal(const GrowthRate& rate, std::span<const double> exponents) {
    if (exponents.empty()) throw std::invalid_argument("diagonal system needs at least one exponent");
    const int d = static_cast<int>(exponents.size());
    const Vector lambda = Eigen::Map<const Vector>(exponents.data(), d);
    Vector stable_mask(d);
    for (int i = 0; i < d; ++i) stable_mask(i) = lambda(i) < 0.0 ? 1.0 : 0.0;
    const Matrix p = stable_mask.asDiagonal();

    EvolutionOperator u(
        d,
        [rate, lambda](double t, double s) {
            const double lr = rate.log_ratio(t, s);
            return Matrix((lambda * lr).array().exp().matrix().asDiagonal());
        },
        Backend::closed_form);
    auto stable = [rate, lambda, stable_mask](double t, double s) {
        const double lr = rate.log_ratio(t, s);
        return Matrix((stable_mask.array() * (lambda * lr).array().exp()).matrix().asDiagonal());
    };
    auto uq = [rate, lambda, stable_mask](double s, double t) {
        const double lr = rate.log_ratio(t, s);
        return Matrix(((1.0 - stable_mask.array()) * (-lambda * lr).array().exp()).matrix().asDiagonal());
    };
    return CompatiblePair(std::move(u), ProjectionFamily::constant(p), NormKind::spectral, "diagonal", uq, stable);
}

ExpressionMatrix parse_expression_matrix(const std::vector<std::vector<std::string>>& text) {
    if (text.empty()) throw std::invalid_argument("coefficient matrix must be nonempty");
    ExpressionMatrix m;
    m.reserve(text.size());
    for (const auto& row : text) {
        if (row.size() != text.size()) throw std::invalid_argument("coefficient matrix must be square");
        std::vector<Expression> parsed;
        parsed.reserve(row.size());
        for (const auto& cell : row) parsed.push_back(Expression::parse(cell));
        m.push_back(std::move(parsed));
    }
    return m;
}

CoefficientFn coefficient_function(const ExpressionMatrix& a) {
    return [a](double t) {
        const auto d = static_cast<Eigen::Index>(a.size());
        Matrix m(d, d);
        for (Eigen::Index i = 0; i < d; ++i) {
            for (Eigen::Index j = 0; j < d; ++j) m(i, j) = a[i][j](t);
        }
        return m;
    };
}

namespace {

class FundamentalMatrixCache {
public:
    FundamentalMatrixCache(CoefficientFn a, int dim, OdeSettings settings)
        : a_(std::move(a)), dim_(dim), settings_(settings) {}

    Matrix get(double t, double s) {
        {
            std::lock_guard lock(mutex_);
            if (auto it = cache_.find({t, s}); it != cache_.end()) return it->second;
        }
        Matrix u = propagate(a_, Matrix::Identity(dim_, dim_), s, t, settings_);
        std::lock_guard lock(mutex_);
        if (cache_.size() >= kCapacity) cache_.clear();
        cache_.emplace(std::make_pair(t, s), u);
        return u;
    }

private:
    static constexpr std::size_t kCapacity = 8192;
    CoefficientFn a_;
    int dim_;
    OdeSettings settings_;
    std::mutex mutex_;
    std::map<std::pair<double, double>, Matrix> cache_;
};

}  // namespace

EvolutionOperator build_from_coefficients(CoefficientFn a, int dim, const OdeSettings& settings) {
    auto cache = std::make_shared<FundamentalMatrixCache>(std::move(a), dim, settings);
    return EvolutionOperator(
        dim, [cache](double t, double s) { return cache->get(t, s); }, Backend::ode_backed);
}

EvolutionOperator build_from_coefficients(const ExpressionMatrix& a, const OdeSettings& settings) {
    return build_from_coefficients(coefficient_function(a), static_cast<int>(a.size()), settings);
}

CompatiblePair make_ode_pair(CoefficientFn a, ProjectionFamily p, NormKind norm, const OdeSettings& settings) {
    const int d = p.dim();
    auto u = build_from_coefficients(a, d, settings);
    auto uq = [a, p, settings](double s, double t) { return propagate(a, p.complement(t), t, s, settings); };
    return CompatiblePair(std::move(u), std::move(p), norm, "ode", uq);
}

}  // namespace dichotomy
