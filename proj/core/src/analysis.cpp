#include "dichotomy/analysis.hpp"

#include "dichotomy/lyapunov.hpp"
#include "dichotomy/parallel.hpp"
#include "dichotomy/sampling.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

namespace dichotomy {

using nlohmann::json;

const char* toolkit_version() noexcept { return DICHOTOMY_LAB_VERSION; }

namespace {

// Independent random streams per purpose, all derived from the report seed.
enum class Stream : std::uint64_t { x_samples = 1, lyapunov = 2 };

std::mt19937_64 stream(std::uint64_t seed, Stream purpose, std::uint64_t index = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(purpose), static_cast<std::uint32_t>(index)};
    return std::mt19937_64(seq);
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vec(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(num(v(i)));
    return out;
}

json to_json(const ValidationReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks) {
        checks.push_back({{"name", c.name}, {"pass", c.pass}, {"worst", num(c.worst)}, {"limit", num(c.limit)}, {"detail", c.detail}});
    }
    return {{"status", r.pass() ? "pass" : "fail"}, {"pass", r.pass()}, {"checks", checks}, {"notes", r.notes}};
}

json skipped(const std::string& reason) { return {{"status", "skipped"}, {"pass", nullptr}, {"reason", reason}}; }
json failed(const std::string& error) { return {{"status", "error"}, {"pass", false}, {"error", error}}; }

json to_json(const BranchFit& f) {
    return {{"log_N", num(f.log_N)}, {"rate", num(f.rate)}, {"epsilon", num(f.epsilon)},
            {"residual", num(f.residual)}, {"lift", num(f.lift)}, {"samples", f.samples}};
}

json to_json(const CheckResult& c) {
    return {{"name", c.name}, {"pass", c.pass}, {"worst", num(c.worst)}, {"limit", num(c.limit)}, {"detail", c.detail}};
}

class Clock {
public:
    void lap(json& timing, const std::string& name) {
        const auto now = std::chrono::steady_clock::now();
        timing[name] = std::chrono::duration<double, std::milli>(now - last_).count();
        last_ = now;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

double preset_epsilon(const SystemSpec& spec) {
    if (spec.op.kind == OperatorKind::example1) return spec.op.epsilon;
    if (spec.op.kind == OperatorKind::example2) return spec.op.alpha + 1.0;
    return std::numeric_limits<double>::quiet_NaN();
}

std::vector<TimePair> sample_pairs(const SystemSpec& spec) {
    const auto& g = spec.analysis.sample_grid;
    return default_sample_grid(g.s_max, g.gap_max, g.step);
}

std::vector<double> growth_grid(const SystemSpec& spec) {
    const double hi = std::max({spec.analysis.t_grid.stop, spec.analysis.sample_grid.s_max + spec.analysis.sample_grid.gap_max,
                                spec.analysis.lyapunov.span + spec.analysis.t_grid.stop, 1.0});
    return linear_grid(0.0, hi, 0.1);
}

struct GammaSetup {
    DatkoParams params;
    std::string D_source;
    std::string epsilon_source;
};

}  // namespace

json strip_timing(json report) {
    report.erase("timing");
    return report;
}

AnalysisResult run_analysis(const SystemSpec& spec, const AnalysisOptions& options) {
    AnalysisResult result;
    json& r = result.report;
    json timing = json::object();
    Clock clock;
    const auto& an = spec.analysis;
    const std::size_t workers = options.workers;

    r["schema_version"] = kReportSchemaVersion;
    r["spec"] = to_json(spec);
    r["seed"] = options.seed;
    r["toolkit_version"] = toolkit_version();

    bool pass = true;
    auto record = [&](const json& j) {
        if (j.contains("pass") && j["pass"].is_boolean() && !j["pass"].get<bool>()) pass = false;
    };

    QuadSettings quad;
    quad.rel_tol = an.quad_tol;
    quad.horizon = an.horizon;

    // Growth rate.
    std::optional<GrowthRate> rate;
    std::optional<double> K_mu;
    bool growth_ok = false;
    try {
        rate = make_growth_rate(spec);
        const auto grid = growth_grid(spec);
        json g = to_json(validate_growth_rate(*rate, grid));
        const auto k = estimate_K_mu(*rate, grid);
        K_mu = k.known.value_or(k.value);
        g["description"] = rate->description();
        g["grid"] = {{"start", grid.front()}, {"stop", grid.back()}, {"step", 0.1}};
        g["K_mu"] = {{"grid_max", num(k.value)}, {"known", k.known ? json(*k.known) : json(nullptr)},
                     {"argmax", num(k.argmax)}, {"exceeds_known", k.exceeds_known}};
        const std::vector<double> deltas{0.1, 0.25, 0.5, 1.0, 2.0};
        const auto l1 = lemma1_check(*rate, *K_mu, grid, deltas);
        g["lemma1"] = {{"K", num(*K_mu)},
                       {"deltas", deltas},
                       {"log_derivative_bound", to_json(l1.log_derivative_bound)},
                       {"exponential_envelope", to_json(l1.exponential_envelope)},
                       {"increment_bound", to_json(l1.increment_bound)},
                       {"verdicts_agree", l1.verdicts_agree}};
        growth_ok = g["pass"].get<bool>();
        r["growth"] = g;
    } catch (const std::exception& e) {
        r["growth"] = failed(e.what());
    }
    record(r["growth"]);
    clock.lap(timing, "growth");

    // Operator and compatibility.
    std::optional<CompatiblePair> pair;
    bool compat_ok = false;
    const auto pairs = sample_pairs(spec);
    if (!growth_ok) {
        r["compatibility"] = skipped("growth rate validation did not pass");
    } else {
        try {
            pair = make_pair(spec, *rate);
            json c = json::object();
            c["operator"] = pair->name();
            c["backend"] = std::string(to_string(pair->U().backend()));
            c["norm"] = std::string(to_string(pair->norm()));
            const auto proj = check_projection(pair->P(), growth_grid(spec));
            std::vector<Triple> triples;
            for (const auto& [t, s] : pairs) triples.push_back({t, 0.5 * (t + s), s});
            const double cocycle_tol = pair->U().backend() == Backend::ode_backed ? 1e-5 : 1e-7;
            const auto cocycle = check_cocycle(pair->U(), triples, cocycle_tol);
            const auto compat = check_compatibility(*pair, pairs, 1e-7);
            c["projection"] = to_json(proj);
            c["cocycle"] = to_json(cocycle);
            c["cocycle"]["tol"] = cocycle_tol;
            c["compatibility"] = to_json(compat);
            c["compatibility"]["tol"] = 1e-7;
            compat_ok = proj.pass() && cocycle.pass() && compat.pass();
            c["status"] = compat_ok ? "pass" : "fail";
            c["pass"] = compat_ok;
            r["compatibility"] = c;
        } catch (const std::exception& e) {
            r["compatibility"] = failed(e.what());
        }
    }
    record(r["compatibility"]);
    clock.lap(timing, "compatibility");

    // Sampling and estimation.
    std::optional<DichotomyEstimate> est;
    if (!compat_ok) {
        r["estimate"] = skipped("compatibility checks did not pass");
    } else {
        try {
            result.samples = sample_norms(*pair, *rate, pairs, workers);
            const auto& table = *result.samples;
            json e = json::object();
            e["sample_grid"] = r["spec"]["analysis"]["sample_grid"];
            e["samples"] = table.rows.size();
            e["dropped_stable"] = table.dropped_stable;
            e["dropped_unstable"] = table.dropped_unstable;
            e["notes"] = table.notes;
            est = fit_constants(table);
            e["a_hat"] = num(est->a_hat);
            e["b_hat"] = num(est->b_hat);
            e["epsilon_hat"] = num(est->epsilon_hat);
            e["logN1_hat"] = num(est->logN1_hat);
            e["logN2_hat"] = num(est->logN2_hat);
            e["N1_hat"] = num(std::exp(est->logN1_hat));
            e["N2_hat"] = num(std::exp(est->logN2_hat));
            e["residual_P"] = num(est->residual_P);
            e["residual_Q"] = num(est->residual_Q);
            e["stable_branch"] = est->stable ? to_json(*est->stable) : json(nullptr);
            e["unstable_branch"] = est->unstable ? to_json(*est->unstable) : json(nullptr);
            e["envelope_violation"] = num(envelope_violation(*est, table));
            const auto cls = classify_uniformity(*est);
            e["classification"] = std::string(to_string(cls));
            e["pass"] = cls != Uniformity::not_dichotomic;
            e["status"] = e["pass"].get<bool>() ? "pass" : "fail";
            r["estimate"] = e;
        } catch (const std::exception& e) {
            r["estimate"] = failed(e.what());
            est.reset();
        }
    }
    record(r["estimate"]);
    clock.lap(timing, "estimate");

    // Shared x samples: basis vectors first, then seeded unit vectors.
    std::vector<Vector> xs;
    if (an.x_samples.include_basis) xs = basis_vectors(spec.dimension);
    {
        auto rng = stream(options.seed, Stream::x_samples);
        for (auto& x : unit_sphere_samples(rng, spec.dimension, an.x_samples.random)) xs.push_back(std::move(x));
    }
    const auto t_grid = linear_grid(an.t_grid.start, an.t_grid.stop, an.t_grid.step);

    // Per-γ integral criterion.
    std::vector<std::optional<GammaSetup>> setups(an.gamma.size());
    std::vector<std::optional<DatkoReport>> datko(an.gamma.size());
    r["datko"] = json::array();
    for (std::size_t i = 0; i < an.gamma.size(); ++i) {
        const double gamma = an.gamma[i];
        json d{{"gamma", gamma}};
        if (!compat_ok) {
            d.update(skipped("compatibility checks did not pass"));
            r["datko"].push_back(d);
            continue;
        }
        try {
            GammaSetup setup;
            setup.params.p = an.p;
            setup.params.gamma = gamma;
            if (an.epsilon) {
                setup.params.epsilon = *an.epsilon;
                setup.epsilon_source = "spec";
            } else if (est) {
                setup.params.epsilon = est->epsilon_hat;
                setup.epsilon_source = "estimate";
            } else if (std::isfinite(preset_epsilon(spec))) {
                setup.params.epsilon = preset_epsilon(spec);
                setup.epsilon_source = "operator";
            } else {
                throw std::runtime_error("no epsilon: not in spec and the estimate is unavailable");
            }
            if (an.D) {
                setup.params.D = *an.D;
                setup.D_source = "spec";
            } else if (est) {
                setup.params.D = theoretical_D(std::exp(est->logN1_hat), std::exp(est->logN2_hat), an.p, est->a_hat,
                                               est->b_hat, gamma);
                setup.D_source = "estimate";
            } else {
                throw std::runtime_error("no D: not in spec and the estimate is unavailable");
            }
            d["p"] = an.p;
            d["epsilon"] = setup.params.epsilon;
            d["epsilon_source"] = setup.epsilon_source;
            d["D"] = setup.params.D;
            d["D_source"] = setup.D_source;
            setups[i] = setup;

            const std::optional<double> a_est = est ? std::optional<double>(est->a_hat) : std::nullopt;
            auto rep = check_datko_condition(*pair, *rate, setup.params, t_grid, xs, quad, a_est, workers);
            d["horizon"] = num(rep.horizon);
            d["norm"] = std::string(to_string(rep.norm));
            d["t_grid"] = r["spec"]["analysis"]["t_grid"];
            d["x_samples"] = xs.size();
            d["threshold"] = num(rep.threshold);
            d["max_ratio"] = num(rep.max_ratio);
            if (!rep.points.empty()) {
                const auto& worst = rep.points[rep.argmax];
                d["argmax"] = {{"t", worst.t}, {"x", vec(worst.x)}};
            }
            d["tail_divergence"] = rep.tail_divergence;
            d["warnings"] = rep.warnings;
            json pts = json::array();
            for (const auto& p : rep.points) {
                pts.push_back({{"t", p.t},
                               {"x", vec(p.x)},
                               {"ratio", num(p.ratio)},
                               {"computed", num(p.integral.computed())},
                               {"tail", num(p.integral.tail.value)},
                               {"error", num(p.integral.error())}});
            }
            d["points"] = pts;
            d["pass"] = rep.pass;
            d["status"] = rep.pass ? "pass" : "fail";
            datko[i] = std::move(rep);
        } catch (const std::exception& e) {
            d.update(failed(e.what()));
        }
        record(d);
        r["datko"].push_back(d);
    }
    clock.lap(timing, "datko");

    // Certificates.
    json certs = json::object();
    std::vector<std::pair<DichotomyCertificate, std::string>> to_verify;
    if (est) {
        DichotomyCertificate c;
        c.a = est->a_hat;
        c.b = est->b_hat;
        c.epsilon = est->epsilon_hat;
        c.N1 = std::max(1.0, std::exp(est->logN1_hat));
        c.N2 = std::max(1.0, std::exp(est->logN2_hat));
        c.provenance = Provenance::estimated;
        to_verify.emplace_back(c, "estimated");
    }
    if (!an.growth_bound) {
        certs["growth_bound"] = skipped("no growth bound in the spec");
        certs["derived"] = json::array();
    } else if (!compat_ok) {
        certs["growth_bound"] = skipped("compatibility checks did not pass");
        certs["derived"] = json::array();
    } else {
        bool bound_ok = false;
        try {
            std::vector<GridPoint> grid;
            for (const auto& [t, s] : pairs) {
                if (t == s) continue;
                grid.push_back({t, s});
                grid.push_back({s, t});
            }
            json gb = to_json(check_growth_bound(*pair, *rate, *an.growth_bound, grid));
            gb["M"] = an.growth_bound->M;
            gb["omega"] = an.growth_bound->omega;
            gb["alpha"] = an.growth_bound->alpha;
            bound_ok = gb["pass"].get<bool>();
            certs["growth_bound"] = gb;
        } catch (const std::exception& e) {
            certs["growth_bound"] = failed(e.what());
        }
        record(certs["growth_bound"]);
        json derived = json::array();
        for (std::size_t i = 0; i < an.gamma.size(); ++i) {
            json d{{"gamma", an.gamma[i]}};
            if (!bound_ok) {
                d.update(skipped("growth bound did not pass"));
            } else if (!datko[i] || !datko[i]->pass) {
                d.update(skipped("integral criterion did not pass for this gamma"));
            } else {
                try {
                    const auto c = derive_certificate(setups[i]->params, *an.growth_bound, *K_mu);
                    d["certificate"] = to_json(c);
                    d["K_mu"] = *K_mu;
                    d["status"] = "derived";
                    to_verify.emplace_back(c, "derived (gamma=" + json(an.gamma[i]).dump() + ")");
                } catch (const std::exception& e) {
                    d.update(failed(e.what()));
                }
            }
            record(d);
            derived.push_back(d);
        }
        certs["derived"] = derived;
    }
    if (an.claimed_certificate) to_verify.emplace_back(*an.claimed_certificate, "claimed");

    json verified = json::array();
    for (const auto& [cert, label] : to_verify) {
        json v{{"label", label}, {"certificate", to_json(cert)}};
        if (!compat_ok) {
            v.update(skipped("compatibility checks did not pass"));
        } else {
            try {
                v.update(to_json(verify_certificate(*pair, *rate, cert, pairs)));
            } catch (const std::exception& e) {
                v.update(failed(e.what()));
            }
        }
        record(v);
        verified.push_back(v);
    }
    certs["verified"] = verified;
    r["certificates"] = certs;
    clock.lap(timing, "certificates");

    // Lyapunov functions.
    json lyap = json::array();
    for (std::size_t i = 0; i < an.gamma.size(); ++i) {
        const double gamma = an.gamma[i];
        json l{{"gamma", gamma}};
        if (!an.lyapunov.enabled) {
            l.update(skipped("disabled in the spec"));
        } else if (!setups[i] || !datko[i]) {
            l.update(skipped("integral criterion was not evaluated for this gamma"));
        } else {
            try {
                const auto& params = setups[i]->params;
                QuadSettings lq = quad;
                lq.horizon = datko[i]->horizon;
                auto rng = stream(options.seed, Stream::lyapunov, i);
                std::uniform_real_distribution<double> s_dist(an.t_grid.start, an.t_grid.stop);
                std::uniform_real_distribution<double> gap(0.0, an.lyapunov.span);
                std::vector<LyapunovSample> samples;
                samples.reserve(an.lyapunov.triples);
                for (std::size_t k = 0; k < an.lyapunov.triples; ++k) {
                    const double s = s_dist(rng);
                    const double t = s + gap(rng);
                    samples.push_back({t, s, unit_sphere_samples(rng, spec.dimension, 1).front()});
                }
                std::vector<StatePoint> membership_grid;
                for (const auto& smp : samples) membership_grid.push_back({smp.s, smp.x});

                const LyapunovBound bound{gamma, params.epsilon, params.D};
                const auto canonical = canonical_H(*pair, *rate, gamma, an.p);
                json tested = json::array();
                bool all_ok = true;
                for (const auto& h : {canonical, canonical.scaled(0.5)}) {
                    const auto member = check_H_membership(h, *pair, *rate, gamma, an.p, membership_grid);
                    const auto L = construct_L(*pair, *rate, h, an.p, lq);
                    const auto cond = check_L_conditions(L, *pair, *rate, h, an.p, bound, samples, an.lyapunov.tol, workers);
                    json entry{{"H", h.label()},
                               {"membership", to_json(member)},
                               {"conditions", to_json(cond)},
                               {"warnings", L.warnings}};
                    const bool ok = member.pass() && cond.pass() && L.warnings.empty();
                    entry["pass"] = ok;
                    all_ok = all_ok && ok;
                    tested.push_back(entry);
                }
                l["p"] = an.p;
                l["epsilon"] = params.epsilon;
                l["D"] = params.D;
                l["horizon"] = datko[i]->horizon;
                l["triples"] = samples.size();
                l["tol"] = an.lyapunov.tol;
                l["H_tested"] = tested;
                l["pass"] = all_ok;
                l["status"] = all_ok ? "pass" : "fail";
            } catch (const std::exception& e) {
                l.update(failed(e.what()));
            }
        }
        record(l);
        lyap.push_back(l);
    }
    r["lyapunov"] = lyap;
    clock.lap(timing, "lyapunov");

    r["pass"] = pass;
    r["timing"] = timing;
    result.pass = pass;
    return result;
}

AnalysisResult run_verify(const SystemSpec& spec, const DichotomyCertificate& cert) {
    AnalysisResult result;
    json& r = result.report;
    r["schema_version"] = kReportSchemaVersion;
    r["spec"] = to_json(spec);
    r["toolkit_version"] = toolkit_version();
    r["certificate"] = to_json(cert);
    try {
        const auto rate = make_growth_rate(spec);
        const auto pair = make_pair(spec, rate);
        const auto pairs = sample_pairs(spec);
        r["verification"] = to_json(verify_certificate(pair, rate, cert, pairs));
    } catch (const std::exception& e) {
        r["verification"] = failed(e.what());
    }
    result.pass = r["verification"]["pass"].is_boolean() && r["verification"]["pass"].get<bool>();
    r["pass"] = result.pass;
    return result;
}

}  // namespace dichotomy
