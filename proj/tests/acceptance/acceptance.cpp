// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include "dichotomy/analysis.hpp"
#include "dichotomy/datko.hpp"
#include "dichotomy/estimate.hpp"
#include "dichotomy/evolution.hpp"
#include "dichotomy/growth.hpp"
#include "dichotomy/lyapunov.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace dichotomy;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double rel_err(double got, double want) {
    if (want == 0.0) return std::abs(got) <= 1e-12 ? 0.0 : std::abs(got);
    return std::abs(got - want) / std::abs(want);
}

std::vector<double> steps(double lo, double hi, double step) {
    std::vector<double> out;
    for (int i = 0; lo + i * step <= hi + 1e-9; ++i) out.push_back(lo + i * step);
    return out;
}

Vector vec2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

Vector unit2(std::mt19937_64& g) {
    std::normal_distribution<double> n;
    Vector v(2);
    do {
        v << n(g), n(g);
    } while (v.norm() < 1e-6);
    return v / v.norm();
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// s ∈ {0,…,5}, t − s ∈ {0,…,5}, step 0.5.
std::vector<TimePair> example_grid() {
    std::vector<TimePair> out;
    for (double s : steps(0.0, 5.0, 0.5)) {
        for (double gap : steps(0.0, 5.0, 0.5)) out.push_back({s + gap, s});
    }
    return out;
}

Outcome example1_exactness() {
    const auto rate = GrowthRate::exponential();
    double worst = 0.0;
    for (double eps : {0.0, 0.1}) {
        const auto pair = build_example1(rate, 2.0, 3.0, eps);
        for (const auto& [t, s] : example_grid()) {
            const double got = operator_norm(pair.stable(t, s), NormKind::max);
            const double want = std::exp(-2.0 * (t - s) + eps * s);
            worst = std::max(worst, rel_err(got, want));
        }
    }
    return {worst <= 1e-10, "worst relative error " + fmt(worst)};
}

Outcome datko_forward_bound() {
    const auto rate = GrowthRate::exponential();
    const auto pair = build_example1(rate, 2.0, 3.0, 0.0);
    const auto t_grid = steps(0.0, 9.5, 0.5);
    double worst = 0.0;
    for (double t : t_grid) {
        worst = std::max(worst, std::abs(datko_integral(pair, rate, 1, 1, t, vec2(1, 0), t + 40).total() - 1.0));
        const double want = (1.0 - std::exp(-2.0 * t)) / 2.0;
        worst = std::max(worst, std::abs(datko_integral(pair, rate, 1, 1, t, vec2(0, 1), t + 40).total() - want));
    }
    std::mt19937_64 g(2024);
    std::vector<Vector> xs;
    for (int i = 0; i < 8; ++i) xs.push_back(unit2(g));
    const double D = theoretical_D(1, 1, 1, 2, 3, 1);
    const auto rep = check_datko_condition(pair, rate, DatkoParams{1, 1, 0, D}, t_grid, xs);
    const bool ok = worst <= 1e-6 && D == 1.5 && rep.max_ratio <= D * (1 + 1e-6);
    return {ok, "closed-form error " + fmt(worst) + ", max ratio " + fmt(rep.max_ratio) + " vs D " + fmt(D)};
}

Outcome constant_formula() {
    struct Case {
        double N1, N2, p, a, b, gamma, want;
    };
    const Case cases[] = {
        {1, 1, 1, 2, 3, 1, 1.5},
        {1, 1, 2, 2, 3, 1, 0.75},
        {2, 3, 1, 4, 5, 1, 2.0 / 3.0 + 3.0 / 4.0},
        {2, 1, 2, 3, 3, 2, 2.5},
        {1, 1, 1, 3, 3, 2, 2.0},
        {3, 2, 3, 5, 6, 4, 27.0 / 3.0 + 8.0 / 6.0},
    };
    double worst = 0.0;
    for (const auto& c : cases) worst = std::max(worst, rel_err(theoretical_D(c.N1, c.N2, c.p, c.a, c.b, c.gamma), c.want));
    return {worst <= 1e-12, std::to_string(std::size(cases)) + " tuples, worst relative error " + fmt(worst)};
}

Outcome round_trip() {
    const auto rate = GrowthRate::exponential();
    const auto pair = build_example1(rate, 2.0, 3.0, 0.0);
    const auto grid = example_grid();
    std::vector<GridPoint> off;
    for (const auto& [t, s] : grid) {
        if (t != s) {
            off.push_back({t, s});
            off.push_back({s, t});
        }
    }
    const GrowthBound bound{1.0, 0.1, 0.0};
    if (!check_growth_bound(pair, rate, bound, off).pass()) return {false, "growth bound failed on the grid"};
    const DatkoParams params{1.0, 1.0, 0.0, 1.5};
    const std::vector<Vector> xs{vec2(1, 0), vec2(0, 1), vec2(std::sqrt(0.5), std::sqrt(0.5))};
    if (!check_datko_condition(pair, rate, params, steps(0.0, 10.0, 0.5), xs).pass) return {false, "integral check failed"};
    const auto cert = derive_certificate(params, bound, rate.known_K().value_or(1.0));
    const auto rep = verify_certificate(pair, rate, cert, grid);
    const double worst = std::max(rep.at("stable_branch").worst, rep.at("unstable_branch").worst);
    return {rep.pass() && worst <= 1.0,
            "derived a=" + fmt(cert.a) + " b=" + fmt(cert.b) + " N1=" + fmt(cert.N1) + ", worst ratio " + fmt(worst)};
}

Outcome example2_pipeline() {
    const auto start = std::chrono::steady_clock::now();
    const auto rate = GrowthRate::sqrt_shift();
    const auto pair = build_example2(3.0, 3.0, 0.5);
    std::vector<GridPoint> off;
    for (double t : steps(0.0, 10.0, 0.5)) {
        for (double s : steps(0.0, 10.0, 0.5)) {
            if (t != s) off.push_back({t, s});
        }
    }
    const auto gb = check_growth_bound(pair, rate, GrowthBound{1.0, 0.5, 1.5}, off);
    std::mt19937_64 g(7);
    std::vector<Vector> xs{vec2(1, 0), vec2(0, 1)};
    for (int i = 0; i < 4; ++i) xs.push_back(unit2(g));
    const auto rep = check_datko_condition(pair, rate, DatkoParams{1.0, 2.0, 1.5, 2.0}, steps(0.0, 10.0, 0.5), xs);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {gb.pass() && rep.pass && secs <= 60.0,
            "growth bound worst " + fmt(gb.at("growth_bound").worst) + ", max ratio " + fmt(rep.max_ratio) +
                " vs D 2, " + fmt(secs) + " s"};
}

Outcome lemma1_agreement() {
    const std::vector<GrowthRate> rates{GrowthRate::exponential(), GrowthRate::polynomial(), GrowthRate::sqrt_shift()};
    std::vector<double> grid;
    for (int i = 0; i < 50; ++i) grid.push_back(0.1 * i);
    std::vector<double> deltas;
    for (int i = 1; i <= 10; ++i) deltas.push_back(0.2 * i);
    int cases = 0;
    int agree = 0;
    for (const auto& rate : rates) {
        const double k_mu = rate.known_K().value_or(estimate_K_mu(rate, grid).value);
        for (double K : {0.5 * k_mu, k_mu, 2.0 * k_mu}) {
            const auto rep = lemma1_check(rate, K, grid, deltas);
            const bool i = rep.log_derivative_bound.pass;
            const bool ii = rep.exponential_envelope.pass;
            const bool iii = rep.increment_bound.pass;
            const bool ok = (i && ii && iii) || (!i && (!ii || !iii));
            ++cases;
            if (ok && rep.verdicts_agree) ++agree;
        }
    }
    return {agree == cases, std::to_string(agree) + "/" + std::to_string(cases) + " rate/K combinations agree"};
}

Outcome lyapunov_closed_forms() {
    const auto rate = GrowthRate::exponential();
    const auto pair = build_example1(rate, 2.0, 3.0, 0.0);
    const auto h = canonical_H(pair, rate, 1.0, 1.0);
    const auto l = construct_L(pair, rate, h, 1.0);
    double worst = 0.0;
    for (double t : steps(0.0, 5.0, 0.5)) {
        const Vector px = pair.P()(t) * vec2(1, 0);
        const Vector qx = pair.Q(t) * vec2(0, 1);
        worst = std::max(worst, rel_err(l(t, px), std::exp(t)));
        worst = std::max(worst, rel_err(l(t, qx), -(std::exp(-t) - std::exp(-3 * t)) / 2.0));
    }
    std::mt19937_64 g(99);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    std::vector<LyapunovSample> samples;
    for (int i = 0; i < 100; ++i) {
        const double s = u(g);
        const double t = s + u(g);
        samples.push_back({t, s, unit2(g)});
    }
    const auto rep = check_L_conditions(l, pair, rate, h, 1.0, LyapunovBound{1.0, 0.0, 1.5}, samples, 1e-6);
    return {worst <= 1e-6 && rep.pass(),
            "closed-form error " + fmt(worst) + ", decrease " + fmt(rep.at("decrease").worst) + ", bound " +
                fmt(rep.at("bound").worst)};
}

Outcome estimator_recovery() {
    std::mt19937_64 g(31337);
    std::uniform_real_distribution<double> rate_d(0.5, 4.0);
    std::uniform_real_distribution<double> eps_d(0.0, 0.5);
    std::uniform_real_distribution<double> n_d(1.0, 3.0);
    std::uniform_real_distribution<double> time_d(0.0, 5.0);
    double worst = 0.0;
    double violation = -1.0;
    for (int sys = 0; sys < 20; ++sys) {
        const double a = rate_d(g);
        const double b = rate_d(g);
        const double eps = eps_d(g);
        const double n1 = n_d(g);
        const double n2 = n_d(g);
        SampleTable table;
        for (int i = 0; i < 60; ++i) {
            NormSample r;
            r.s = time_d(g);
            r.t = r.s + time_d(g);
            r.log_ratio = r.t - r.s;
            r.log_mu_s = r.s;
            r.log_mu_t = r.t;
            r.log_stable = std::log(n1) - a * r.log_ratio + eps * r.s;
            r.log_unstable = std::log(n2) - b * r.log_ratio + eps * r.t;
            table.rows.push_back(r);
        }
        const auto est = fit_constants(table);
        for (auto [got, want] : {std::pair{est.a_hat, a}, {est.b_hat, b}, {est.epsilon_hat, eps},
                                 {std::exp(est.logN1_hat), n1}, {std::exp(est.logN2_hat), n2}}) {
            worst = std::max(worst, rel_err(got, want));
        }
        violation = std::max(violation, envelope_violation(est, table));
    }
    return {worst <= 1e-6 && violation <= 1e-12,
            "worst relative error " + fmt(worst) + ", worst envelope violation " + fmt(violation)};
}

Outcome ode_backend() {
    OdeSettings settings;
    settings.rel_tol = 1e-10;
    const auto constant = build_from_coefficients(
        [](double) {
            Matrix a = Matrix::Zero(2, 2);
            a(0, 0) = -2.0;
            a(1, 1) = 3.0;
            return a;
        },
        2, settings);
    const auto separable = build_from_coefficients(
        [](double t) {
            Matrix a = Matrix::Zero(2, 2);
            a(0, 0) = -1.0 / (t + 1.0);
            a(1, 1) = 1.0 / (t + 1.0);
            return a;
        },
        2, settings);
    double worst = 0.0;
    auto compare = [&worst](const Matrix& got, double d0, double d1) {
        worst = std::max({worst, rel_err(got(0, 0), d0), rel_err(got(1, 1), d1), std::abs(got(0, 1)) / std::max(d0, d1),
                          std::abs(got(1, 0)) / std::max(d0, d1)});
    };
    for (double t : steps(0.0, 10.0, 0.5)) {
        for (double s : steps(0.0, t, 2.5)) {
            compare(constant(t, s), std::exp(-2.0 * (t - s)), std::exp(3.0 * (t - s)));
            compare(separable(t, s), (s + 1.0) / (t + 1.0), (t + 1.0) / (s + 1.0));
        }
    }
    std::mt19937_64 g(5);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    std::vector<Triple> triples;
    for (int i = 0; i < 50; ++i) {
        std::array<double, 3> v{u(g), u(g), u(g)};
        std::sort(v.begin(), v.end());
        triples.push_back({v[2], v[1], v[0]});
    }
    const auto c1 = check_cocycle(constant, triples, 1e-5);
    const auto c2 = check_cocycle(separable, triples, 1e-5);
    const double cocycle = std::max(c1.at("cocycle").worst, c2.at("cocycle").worst);
    return {worst <= 1e-5 && c1.pass() && c2.pass(),
            "closed-form error " + fmt(worst) + ", cocycle residual " + fmt(cocycle)};
}

int run_cli(const std::string& cli, const std::string& args, const fs::path& log) {
    const std::string cmd = "\"" + cli + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1 || !WIFEXITED(status)) return -1;
    return WEXITSTATUS(status);
}

std::string read_stripped(const fs::path& path) {
    std::ifstream in(path);
    auto doc = nlohmann::json::parse(in);
    return strip_timing(std::move(doc)).dump();
}

Outcome determinism_and_exit_codes(const std::string& cli, const fs::path& data, const fs::path& work) {
    if (cli.empty()) return {false, "no CLI executable given"};
    fs::create_directories(work);
    const std::string spec = "--spec \"" + (data / "ex1_pass.json").string() + "\"";
    const int r1 = run_cli(cli, "analyze " + spec + " --seed 7 --out \"" + (work / "run1.json").string() + "\"", work / "run1.log");
    const int r2 = run_cli(cli, "analyze " + spec + " --seed 7 --out \"" + (work / "run2.json").string() + "\"", work / "run2.log");
    bool same = false;
    if (r1 == 0 && r2 == 0) same = read_stripped(work / "run1.json") == read_stripped(work / "run2.json");
    const int fail = run_cli(cli, "analyze --spec \"" + (data / "ex1_fail_D.json").string() + "\"", work / "fail.log");
    const int bad = run_cli(cli, "analyze --spec \"" + (data / "not_json.json").string() + "\"", work / "bad.log");
    const bool ok = same && r1 == 0 && fail == 1 && bad == 2;
    return {ok, std::string("reports ") + (same ? "identical" : "differ") + ", exit codes " + std::to_string(r1) + "/" +
                    std::to_string(fail) + "/" + std::to_string(bad) + " (want 0/1/2)"};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance checks"};
    std::string cli;
    std::string data;
    std::string work = "acceptance_work";
    app.add_option("--cli", cli, "dichotomy-lab executable");
    app.add_option("--data", data, "directory with golden specs")->required();
    app.add_option("--work", work, "scratch directory");
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"Example 1 exactness", example1_exactness},
        {"integral criterion forward bound", datko_forward_bound},
        {"integral constant formula", constant_formula},
        {"certificate round trip", round_trip},
        {"Example 2 pipeline", example2_pipeline},
        {"growth-rate verdict agreement", lemma1_agreement},
        {"Lyapunov closed forms", lyapunov_closed_forms},
        {"estimator recovery", estimator_recovery},
        {"ODE backend", ode_backend},
        {"determinism and exit codes", [&] { return determinism_and_exit_codes(cli, data, work); }},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome out;
        try {
            out = criteria[i].second();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        if (!out.pass) ++failures;
        std::cout << "criterion " << (i + 1) << ": " << (out.pass ? "PASS" : "FAIL") << "  " << criteria[i].first
                  << " (" << out.detail << ")" << std::endl;
    }
    std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failures == 0 ? 0 : 1;
}
