#include "dichotomy/estimate.hpp"

#include "dichotomy/parallel.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>

namespace dichotomy {

namespace {

std::string csv_number(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return ec == std::errc{} ? std::string(buf.data(), end) : std::string{};
}

std::string csv_optional(const std::optional<double>& v) { return v ? csv_number(*v) : std::string{}; }

struct Design {
    std::vector<double> x1;  // log ratio
    std::vector<double> x2;  // log μ at the nonuniformity point
    std::vector<double> y;
};

bool varies(const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo > 1e-12 * std::max({1.0, std::abs(*lo), std::abs(*hi)});
}

BranchFit fit_branch(const Design& d, const char* branch, const char* mu_name) {
    const auto n = static_cast<Eigen::Index>(d.y.size());
    if (n < 3) {
        throw std::invalid_argument(std::string(branch) + " branch has " + std::to_string(n) +
                                    " samples; at least 3 are needed for 3 unknowns");
    }
    if (!varies(d.x1)) {
        throw RankDeficientDesign(std::string(branch) + " branch: no variation in log(mu(t)/mu(s)) across samples");
    }
    if (!varies(d.x2)) {
        throw RankDeficientDesign(std::string(branch) + " branch: no variation in " + mu_name +
                                  " across samples (all samples share one time)");
    }
    Matrix x(n, 3);
    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        x(i, 0) = 1.0;
        x(i, 1) = d.x1[i];
        x(i, 2) = d.x2[i];
        y(i) = d.y[i];
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(x);
    qr.setThreshold(1e-10);
    if (qr.rank() < 3) {
        throw RankDeficientDesign(std::string(branch) + " branch: log(mu(t)/mu(s)) and " + mu_name +
                                  " are collinear across samples");
    }
    const Vector beta = qr.solve(y);
    const Vector resid = y - x * beta;

    BranchFit fit;
    fit.samples = static_cast<std::size_t>(n);
    fit.residual = resid.cwiseAbs().maxCoeff();
    fit.lift = std::max(0.0, resid.maxCoeff());
    fit.log_N = beta(0) + fit.lift;
    fit.rate = -beta(1);
    fit.epsilon = beta(2);
    return fit;
}

}  // namespace

std::string SampleTable::to_csv() const {
    std::string out = "log_ratio,log_mu_s,log_stable_norm,log_mu_t,log_unstable_norm\r\n";
    for (const auto& r : rows) {
        out += csv_number(r.log_ratio) + ',' + csv_number(r.log_mu_s) + ',' + csv_optional(r.log_stable) + ',' +
               csv_number(r.log_mu_t) + ',' + csv_optional(r.log_unstable) + "\r\n";
    }
    return out;
}

SampleTable sample_norms(const CompatiblePair& pair, const GrowthRate& rate, std::span<const TimePair> grid,
                         std::size_t workers) {
    if (grid.empty()) throw std::invalid_argument("sample grid must be nonempty");
    for (const auto& [t, s] : grid) {
        if (!(t >= s && s >= 0.0)) throw std::invalid_argument("sample grid requires t >= s >= 0");
    }
    SampleTable table;
    table.rows.resize(grid.size());
    std::vector<std::string> errors(grid.size());
    parallel_for(
        grid.size(),
        [&](std::size_t i) {
            const auto [t, s] = grid[i];
            NormSample row;
            row.t = t;
            row.s = s;
            row.log_ratio = rate.log_ratio(t, s);
            row.log_mu_s = rate.log_value(s);
            row.log_mu_t = rate.log_value(t);
            const double np = operator_norm(pair.stable(t, s), pair.norm());
            if (np > 0.0) row.log_stable = std::log(np);
            try {
                const double nq = operator_norm(pair.uq(s, t), pair.norm());
                if (nq > 0.0) row.log_unstable = std::log(nq);
            } catch (const SingularRestriction& e) {
                errors[i] = e.what();
            }
            table.rows[i] = row;
        },
        workers);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!table.rows[i].log_stable) ++table.dropped_stable;
        if (!table.rows[i].log_unstable) ++table.dropped_unstable;
        if (!errors[i].empty()) table.notes.push_back(errors[i]);
    }
    return table;
}

std::vector<TimePair> default_sample_grid(double s_max, double gap_max, double step) {
    if (!(step > 0.0) || !(s_max >= 0.0) || !(gap_max >= step)) {
        throw std::invalid_argument("sample grid needs step > 0, s_max >= 0 and gap_max >= step");
    }
    std::vector<TimePair> grid;
    const auto ns = static_cast<int>(std::floor(s_max / step + 1e-9));
    const auto ng = static_cast<int>(std::floor(gap_max / step + 1e-9));
    for (int i = 0; i <= ns; ++i) {
        for (int j = 1; j <= ng; ++j) {
            const double s = i * step;
            grid.push_back({s + j * step, s});
        }
    }
    return grid;
}

DichotomyEstimate fit_constants(const SampleTable& samples) {
    Design dp;
    Design dq;
    for (const auto& r : samples.rows) {
        if (r.log_stable) {
            dp.x1.push_back(r.log_ratio);
            dp.x2.push_back(r.log_mu_s);
            dp.y.push_back(*r.log_stable);
        }
        if (r.log_unstable) {
            dq.x1.push_back(r.log_ratio);
            dq.x2.push_back(r.log_mu_t);
            dq.y.push_back(*r.log_unstable);
        }
    }
    if (dp.y.empty() && dq.y.empty()) throw std::invalid_argument("no nonzero branch norms to fit");

    DichotomyEstimate est;
    if (!dp.y.empty()) est.stable = fit_branch(dp, "stable", "log mu(s)");
    if (!dq.y.empty()) est.unstable = fit_branch(dq, "unstable", "log mu(t)");

    double eps = 0.0;
    if (est.stable) eps = std::max(eps, est.stable->epsilon);
    if (est.unstable) eps = std::max(eps, est.unstable->epsilon);
    est.epsilon_hat = eps;

    if (est.stable) {
        est.a_hat = est.stable->rate;
        est.logN1_hat = std::max(0.0, est.stable->log_N);
        est.residual_P = est.stable->residual;
        est.samples_P = est.stable->samples;
    }
    if (est.unstable) {
        est.b_hat = est.unstable->rate;
        est.logN2_hat = std::max(0.0, est.unstable->log_N);
        est.residual_Q = est.unstable->residual;
        est.samples_Q = est.unstable->samples;
    }
    return est;
}

double envelope_violation(const DichotomyEstimate& est, const SampleTable& samples) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& r : samples.rows) {
        if (r.log_stable && est.stable) {
            const double bound = est.logN1_hat - est.a_hat * r.log_ratio + est.epsilon_hat * r.log_mu_s;
            worst = std::max(worst, *r.log_stable - bound);
        }
        if (r.log_unstable && est.unstable) {
            const double bound = est.logN2_hat - est.b_hat * r.log_ratio + est.epsilon_hat * r.log_mu_t;
            worst = std::max(worst, *r.log_unstable - bound);
        }
    }
    return worst;
}

std::string_view to_string(Uniformity u) noexcept {
    switch (u) {
        case Uniformity::uniform: return "uniform";
        case Uniformity::nonuniform: return "nonuniform";
        case Uniformity::not_dichotomic: return "not_dichotomic";
    }
    return "unknown";
}

Uniformity classify_uniformity(const DichotomyEstimate& est, double tol) {
    if ((est.stable && est.a_hat <= tol) || (est.unstable && est.b_hat <= tol)) return Uniformity::not_dichotomic;
    if (est.epsilon_hat <= tol) return Uniformity::uniform;
    return Uniformity::nonuniform;
}

}  // namespace dichotomy
