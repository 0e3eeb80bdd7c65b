#include "dichotomy/spec.hpp"

#include "dichotomy/expression.hpp"
#include "dichotomy/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace dichotomy {

using nlohmann::json;

SpecError::SpecError(std::string pointer, std::string constraint)
    : std::runtime_error((pointer.empty() ? std::string("/") : pointer) + ": " + constraint),
      pointer_(std::move(pointer)),
      constraint_(std::move(constraint)) {}

std::string_view to_string(OperatorKind kind) noexcept {
    switch (kind) {
        case OperatorKind::example1: return "example1";
        case OperatorKind::example2: return "example2";
        case OperatorKind::diagonal: return "diagonal";
        case OperatorKind::ode: return "ode";
    }
    return "unknown";
}

std::string_view to_string(ProjectionKind kind) noexcept {
    switch (kind) {
        case ProjectionKind::builtin: return "builtin";
        case ProjectionKind::constant: return "constant";
        case ProjectionKind::expression: return "expression";
    }
    return "unknown";
}

namespace {

std::string_view to_string(NormChoice n) {
    switch (n) {
        case NormChoice::automatic: return "auto";
        case NormChoice::max: return "max";
        case NormChoice::spectral: return "spectral";
    }
    return "auto";
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// Typed access to one JSON object with pointer-annotated errors and
// rejection of unknown keys.
class Obj {
public:
    Obj(const json& j, std::string ptr) : j_(j), ptr_(std::move(ptr)) {
        if (!j_.is_object()) throw SpecError(ptr_, "must be an object");
    }

    [[nodiscard]] std::string at(const std::string& key) const { return ptr_ + "/" + key; }

    [[nodiscard]] bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key) && !j_.at(key).is_null();
    }

    const json& raw(const std::string& key) {
        if (!has(key)) throw SpecError(at(key), "required key is missing");
        return j_.at(key);
    }

    double number(const std::string& key) {
        const auto& v = raw(key);
        if (!v.is_number()) throw SpecError(at(key), "must be a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw SpecError(at(key), "must be finite");
        return d;
    }
    double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }
    std::optional<double> optional_number(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return number(key);
    }

    std::size_t count(const std::string& key, std::size_t fallback) {
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) throw SpecError(at(key), "must be a nonnegative integer");
        return static_cast<std::size_t>(v.get<long long>());
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_boolean()) throw SpecError(at(key), "must be a boolean");
        return v.get<bool>();
    }

    std::string string(const std::string& key) {
        const auto& v = raw(key);
        if (!v.is_string()) throw SpecError(at(key), "must be a string");
        return v.get<std::string>();
    }
    std::string string(const std::string& key, const std::string& fallback) {
        return has(key) ? string(key) : fallback;
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.count(key)) throw SpecError(at(key), "unknown key");
        }
    }

private:
    const json& j_;
    std::string ptr_;
    std::set<std::string> seen_;
};

std::vector<double> number_list(const json& v, const std::string& ptr) {
    if (!v.is_array()) throw SpecError(ptr, "must be an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
            throw SpecError(ptr + "/" + std::to_string(i), "must be a finite number");
        }
        out.push_back(v[i].get<double>());
    }
    return out;
}

template <class Cell>
std::vector<std::vector<Cell>> square_matrix(const json& v, const std::string& ptr, int dim, Cell (*cell)(const json&, const std::string&)) {
    const std::string shape = "must be a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix";
    if (!v.is_array() || v.size() != static_cast<std::size_t>(dim)) throw SpecError(ptr, shape);
    std::vector<std::vector<Cell>> out;
    for (int i = 0; i < dim; ++i) {
        const auto& row = v[static_cast<std::size_t>(i)];
        const std::string rptr = ptr + "/" + std::to_string(i);
        if (!row.is_array() || row.size() != static_cast<std::size_t>(dim)) throw SpecError(rptr, shape);
        std::vector<Cell> r;
        for (int k = 0; k < dim; ++k) r.push_back(cell(row[static_cast<std::size_t>(k)], rptr + "/" + std::to_string(k)));
        out.push_back(std::move(r));
    }
    return out;
}

double number_cell(const json& v, const std::string& ptr) {
    if (!v.is_number() || !std::isfinite(v.get<double>())) throw SpecError(ptr, "must be a finite number");
    return v.get<double>();
}

std::string expression_cell(const json& v, const std::string& ptr) {
    Expression e = Expression::constant(0.0);
    if (v.is_number()) {
        e = Expression::constant(v.get<double>());
    } else if (v.is_string()) {
        try {
            e = Expression::parse(v.get<std::string>());
        } catch (const ParseError& err) {
            throw SpecError(ptr, std::string("expression syntax: ") + err.what());
        }
    } else {
        throw SpecError(ptr, "must be an expression string or a number");
    }
    return e.to_string();
}

void require(bool ok, const std::string& ptr, const std::string& constraint) {
    if (!ok) throw SpecError(ptr, constraint);
}

GrowthSpec parse_growth(const json& j) {
    Obj o(j, "/growth_rate");
    GrowthSpec g;
    const std::string kind = o.string("kind");
    if (kind == "exponential") {
        g.kind = GrowthKind::exponential;
    } else if (kind == "polynomial") {
        g.kind = GrowthKind::polynomial;
    } else if (kind == "sqrt_shift") {
        g.kind = GrowthKind::sqrt_shift;
    } else if (kind == "custom") {
        g.kind = GrowthKind::custom;
        g.expression = expression_cell(o.raw("expression"), o.at("expression"));
    } else {
        throw SpecError(o.at("kind"), "must be one of exponential, polynomial, sqrt_shift, custom");
    }
    if (g.kind != GrowthKind::custom && o.has("expression")) {
        throw SpecError(o.at("expression"), "only allowed with kind custom");
    }
    o.finish();
    return g;
}

OperatorSpec parse_operator(const json& j, std::optional<int>& dim) {
    Obj o(j, "/operator");
    OperatorSpec op;
    const std::string kind = o.string("kind");
    if (kind == "example1") {
        op.kind = OperatorKind::example1;
        op.a = o.number("a");
        op.b = o.number("b");
        op.epsilon = o.number("epsilon", 0.0);
        require(op.a > 0.0, o.at("a"), "a > 0");
        require(op.b > 0.0, o.at("b"), "b > 0");
        require(op.epsilon >= 0.0, o.at("epsilon"), "epsilon >= 0");
    } else if (kind == "example2") {
        op.kind = OperatorKind::example2;
        op.a = o.number("a");
        op.b = o.number("b");
        op.alpha = o.number("alpha");
        require(op.a > 1.0, o.at("a"), "a > 1");
        require(op.b > 1.0, o.at("b"), "b > 1");
        require(op.alpha >= 0.0, o.at("alpha"), "alpha >= 0");
        require(op.alpha + 1.0 < std::min(op.a, op.b), o.at("alpha"), "alpha + 1 < min{a, b}");
    } else if (kind == "diagonal") {
        op.kind = OperatorKind::diagonal;
        op.exponents = number_list(o.raw("exponents"), o.at("exponents"));
        require(!op.exponents.empty(), o.at("exponents"), "at least one exponent");
        if (!dim) dim = static_cast<int>(op.exponents.size());
        require(static_cast<int>(op.exponents.size()) == *dim, o.at("exponents"), "length must equal dimension");
    } else if (kind == "ode") {
        op.kind = OperatorKind::ode;
        const auto& m = o.raw("matrix");
        if (!dim) dim = m.is_array() ? static_cast<int>(m.size()) : 0;
        require(*dim >= 1, o.at("matrix"), "must be a nonempty square matrix");
        op.matrix = square_matrix<std::string>(m, o.at("matrix"), *dim, expression_cell);
    } else {
        throw SpecError(o.at("kind"), "must be one of example1, example2, diagonal, ode");
    }
    o.finish();
    if (op.kind == OperatorKind::example1 || op.kind == OperatorKind::example2) {
        if (!dim) dim = 2;
        require(*dim == 2, "/dimension", std::string(to_string(op.kind)) + " is two-dimensional");
    }
    return op;
}

ProjectionSpec parse_projection(const json* j, const OperatorSpec& op, int dim) {
    ProjectionSpec p;
    if (j) {
        Obj o(*j, "/projection");
        const std::string kind = o.string("kind", "builtin");
        if (kind == "builtin") {
            p.kind = ProjectionKind::builtin;
        } else if (kind == "constant") {
            p.kind = ProjectionKind::constant;
            p.constant = square_matrix<double>(o.raw("matrix"), o.at("matrix"), dim, number_cell);
            Matrix m(dim, dim);
            for (int r = 0; r < dim; ++r) {
                for (int c = 0; c < dim; ++c) m(r, c) = p.constant[r][c];
            }
            require((m * m - m).norm() <= 1e-9 * std::max(1.0, m.norm()), o.at("matrix"), "must be idempotent (P^2 = P)");
        } else if (kind == "expression") {
            p.kind = ProjectionKind::expression;
            p.expression = square_matrix<std::string>(o.raw("matrix"), o.at("matrix"), dim, expression_cell);
        } else {
            throw SpecError(o.at("kind"), "must be one of builtin, constant, expression");
        }
        o.finish();
    }
    if (op.kind == OperatorKind::ode) {
        require(p.kind != ProjectionKind::builtin, "/projection", "ode operators need a constant or expression projection");
    } else {
        require(p.kind == ProjectionKind::builtin, "/projection/kind",
                std::string(to_string(op.kind)) + " operators carry their own projection (builtin)");
    }
    return p;
}

AnalysisSpec parse_analysis(const json& j, const OperatorSpec& op) {
    Obj o(j, "/analysis");
    AnalysisSpec a;
    a.p = o.number("p", 1.0);
    require(a.p >= 1.0, o.at("p"), "p >= 1");

    const auto& g = o.raw("gamma");
    a.gamma = g.is_number() ? number_list(json::array({g}), o.at("gamma")) : number_list(g, o.at("gamma"));
    require(!a.gamma.empty(), o.at("gamma"), "at least one gamma");
    for (std::size_t i = 0; i < a.gamma.size(); ++i) {
        const std::string ptr = o.at("gamma") + "/" + std::to_string(i);
        require(a.gamma[i] > 0.0, ptr, "gamma > 0");
        if (op.kind == OperatorKind::example1 || op.kind == OperatorKind::example2) {
            require(a.gamma[i] < std::min(op.a, op.b), ptr,
                    "0 < gamma < min{a, b} (a=" + fmt(op.a) + ", b=" + fmt(op.b) + ")");
        }
    }

    a.epsilon = o.optional_number("epsilon");
    if (a.epsilon) require(*a.epsilon >= 0.0, o.at("epsilon"), "epsilon >= 0");
    a.D = o.optional_number("D");
    if (a.D) require(*a.D > 0.0, o.at("D"), "D > 0");

    if (o.has("t_grid")) {
        Obj t(o.raw("t_grid"), o.at("t_grid"));
        a.t_grid.start = t.number("start", a.t_grid.start);
        a.t_grid.stop = t.number("stop", a.t_grid.stop);
        a.t_grid.step = t.number("step", a.t_grid.step);
        t.finish();
        require(a.t_grid.start >= 0.0, t.at("start"), "start >= 0");
        require(a.t_grid.stop >= a.t_grid.start, t.at("stop"), "stop >= start");
        require(a.t_grid.step > 0.0, t.at("step"), "step > 0");
        require((a.t_grid.stop - a.t_grid.start) / a.t_grid.step <= 1e5, t.at("step"), "at most 1e5 grid points");
    }
    if (o.has("x_samples")) {
        Obj x(o.raw("x_samples"), o.at("x_samples"));
        a.x_samples.random = x.count("random", a.x_samples.random);
        a.x_samples.include_basis = x.boolean("include_basis", a.x_samples.include_basis);
        x.finish();
        require(a.x_samples.random > 0 || a.x_samples.include_basis, o.at("x_samples"),
                "needs random > 0 or include_basis");
    }
    a.horizon = o.optional_number("horizon");
    if (a.horizon) require(*a.horizon > 0.0, o.at("horizon"), "horizon > 0");
    a.quad_tol = o.number("quad_tol", a.quad_tol);
    require(a.quad_tol > 0.0 && a.quad_tol < 1.0, o.at("quad_tol"), "0 < quad_tol < 1");

    const std::string norm = o.string("norm", "auto");
    if (norm == "auto") {
        a.norm = NormChoice::automatic;
    } else if (norm == "max") {
        a.norm = NormChoice::max;
    } else if (norm == "spectral") {
        a.norm = NormChoice::spectral;
    } else {
        throw SpecError(o.at("norm"), "must be one of auto, max, spectral");
    }

    if (o.has("growth_bound")) {
        Obj gb(o.raw("growth_bound"), o.at("growth_bound"));
        GrowthBound bound;
        bound.M = gb.number("M");
        bound.omega = gb.number("omega");
        bound.alpha = gb.number("alpha", 0.0);
        gb.finish();
        require(bound.M >= 1.0, gb.at("M"), "M >= 1");
        require(bound.omega > 0.0, gb.at("omega"), "omega > 0");
        require(bound.alpha >= 0.0, gb.at("alpha"), "alpha >= 0");
        a.growth_bound = bound;
    }
    if (o.has("sample_grid")) {
        Obj sg(o.raw("sample_grid"), o.at("sample_grid"));
        a.sample_grid.s_max = sg.number("s_max", a.sample_grid.s_max);
        a.sample_grid.gap_max = sg.number("gap_max", a.sample_grid.gap_max);
        a.sample_grid.step = sg.number("step", a.sample_grid.step);
        sg.finish();
        require(a.sample_grid.s_max >= 0.0, sg.at("s_max"), "s_max >= 0");
        require(a.sample_grid.gap_max > 0.0, sg.at("gap_max"), "gap_max > 0");
        require(a.sample_grid.step > 0.0, sg.at("step"), "step > 0");
        require(a.sample_grid.gap_max >= a.sample_grid.step, sg.at("gap_max"), "gap_max >= step");
    }
    if (o.has("lyapunov")) {
        Obj l(o.raw("lyapunov"), o.at("lyapunov"));
        a.lyapunov.enabled = l.boolean("enabled", a.lyapunov.enabled);
        a.lyapunov.triples = l.count("triples", a.lyapunov.triples);
        a.lyapunov.span = l.number("span", a.lyapunov.span);
        a.lyapunov.tol = l.number("tol", a.lyapunov.tol);
        l.finish();
        require(a.lyapunov.triples >= 1, l.at("triples"), "triples >= 1");
        require(a.lyapunov.span >= 0.0, l.at("span"), "span >= 0");
        require(a.lyapunov.tol > 0.0, l.at("tol"), "tol > 0");
    }
    if (o.has("claimed_certificate")) {
        a.claimed_certificate = parse_certificate(o.raw("claimed_certificate"), o.at("claimed_certificate"));
        a.claimed_certificate->provenance = Provenance::user_claimed;
    }
    o.finish();
    return a;
}

// Expressions must evaluate finitely on every time the analysis touches.
void check_expressions_finite(const SystemSpec& s) {
    const double hi = std::max(s.analysis.t_grid.stop, s.analysis.sample_grid.s_max + s.analysis.sample_grid.gap_max);
    const auto window = linear_grid(0.0, hi, std::min(0.25, hi > 0.0 ? hi : 0.25));
    auto check = [&](const std::string& text, const std::string& ptr) {
        try {
            Expression::parse(text).require_finite_on(window);
        } catch (const ParseError& err) {
            throw SpecError(ptr, std::string("must be finite on the analysis window: ") + err.what());
        }
    };
    if (s.growth_rate.kind == GrowthKind::custom) {
        check(s.growth_rate.expression, "/growth_rate/expression");
        const auto rate = GrowthRate::from_expression(s.growth_rate.expression);
        require(std::abs(rate(0.0) - 1.0) <= 1e-12, "/growth_rate/expression", "mu(0) = 1");
    }
    auto check_matrix = [&](const std::vector<std::vector<std::string>>& m, const std::string& ptr) {
        for (std::size_t r = 0; r < m.size(); ++r) {
            for (std::size_t c = 0; c < m[r].size(); ++c) {
                check(m[r][c], ptr + "/" + std::to_string(r) + "/" + std::to_string(c));
            }
        }
    };
    check_matrix(s.op.matrix, "/operator/matrix");
    check_matrix(s.projection.expression, "/projection/matrix");
}

}  // namespace

SystemSpec parse_spec(const json& doc) {
    Obj top(doc, "");
    SystemSpec s;
    s.growth_rate = parse_growth(top.raw("growth_rate"));

    std::optional<int> dim;
    if (top.has("dimension")) {
        const auto& d = top.raw("dimension");
        if (!d.is_number_integer() || d.get<long long>() < 1 || d.get<long long>() > 64) {
            throw SpecError("/dimension", "must be an integer in [1, 64]");
        }
        dim = static_cast<int>(d.get<long long>());
    }
    s.op = parse_operator(top.raw("operator"), dim);
    if (!dim) throw SpecError("/dimension", "required for this operator kind");
    s.dimension = *dim;
    if (s.op.kind == OperatorKind::example2) {
        require(s.growth_rate.kind == GrowthKind::sqrt_shift, "/growth_rate/kind",
                "example2 is defined for the sqrt_shift rate");
    }
    s.projection = parse_projection(top.has("projection") ? &top.raw("projection") : nullptr, s.op, s.dimension);
    s.analysis = parse_analysis(top.raw("analysis"), s.op);
    top.finish();
    check_expressions_finite(s);
    return s;
}

SystemSpec parse_spec_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& err) {
        throw SpecError("", std::string("invalid JSON: ") + err.what());
    }
    return parse_spec(doc);
}

SystemSpec load_spec(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SpecIOError("cannot open spec file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_spec_text(buf.str());
}

DichotomyCertificate parse_certificate(const json& doc, const std::string& base) {
    Obj o(doc, base);
    DichotomyCertificate c;
    c.a = o.number("a");
    c.b = o.number("b");
    c.epsilon = o.number("epsilon", 0.0);
    c.N1 = o.number("N1");
    c.N2 = o.number("N2");
    if (o.has("provenance")) {
        try {
            c.provenance = provenance_from_string(o.string("provenance"));
        } catch (const std::invalid_argument&) {
            throw SpecError(o.at("provenance"), "must be one of estimated, derived, user_claimed");
        }
    }
    o.finish();
    require(c.a > 0.0, o.at("a"), "a > 0");
    require(c.b > 0.0, o.at("b"), "b > 0");
    require(c.epsilon >= 0.0, o.at("epsilon"), "epsilon >= 0");
    require(c.N1 >= 1.0, o.at("N1"), "N1 >= 1");
    require(c.N2 >= 1.0, o.at("N2"), "N2 >= 1");
    return c;
}

json to_json(const DichotomyCertificate& cert) {
    return json{{"a", cert.a},
                {"b", cert.b},
                {"epsilon", cert.epsilon},
                {"N1", cert.N1},
                {"N2", cert.N2},
                {"provenance", std::string(to_string(cert.provenance))}};
}

json to_json(const SystemSpec& s) {
    json growth{{"kind", std::string(to_string(s.growth_rate.kind))}};
    if (s.growth_rate.kind == GrowthKind::custom) growth["expression"] = s.growth_rate.expression;

    json op{{"kind", std::string(to_string(s.op.kind))}};
    switch (s.op.kind) {
        case OperatorKind::example1:
            op["a"] = s.op.a;
            op["b"] = s.op.b;
            op["epsilon"] = s.op.epsilon;
            break;
        case OperatorKind::example2:
            op["a"] = s.op.a;
            op["b"] = s.op.b;
            op["alpha"] = s.op.alpha;
            break;
        case OperatorKind::diagonal: op["exponents"] = s.op.exponents; break;
        case OperatorKind::ode: op["matrix"] = s.op.matrix; break;
    }

    json proj{{"kind", std::string(to_string(s.projection.kind))}};
    if (s.projection.kind == ProjectionKind::constant) proj["matrix"] = s.projection.constant;
    if (s.projection.kind == ProjectionKind::expression) proj["matrix"] = s.projection.expression;

    const auto& a = s.analysis;
    json analysis{
        {"p", a.p},
        {"gamma", a.gamma},
        {"epsilon", a.epsilon ? json(*a.epsilon) : json(nullptr)},
        {"D", a.D ? json(*a.D) : json(nullptr)},
        {"t_grid", {{"start", a.t_grid.start}, {"stop", a.t_grid.stop}, {"step", a.t_grid.step}}},
        {"x_samples", {{"random", a.x_samples.random}, {"include_basis", a.x_samples.include_basis}}},
        {"horizon", a.horizon ? json(*a.horizon) : json(nullptr)},
        {"quad_tol", a.quad_tol},
        {"norm", std::string(to_string(a.norm))},
        {"sample_grid", {{"s_max", a.sample_grid.s_max}, {"gap_max", a.sample_grid.gap_max}, {"step", a.sample_grid.step}}},
        {"lyapunov",
         {{"enabled", a.lyapunov.enabled}, {"triples", a.lyapunov.triples}, {"span", a.lyapunov.span}, {"tol", a.lyapunov.tol}}},
    };
    analysis["growth_bound"] = a.growth_bound
                                   ? json{{"M", a.growth_bound->M}, {"omega", a.growth_bound->omega}, {"alpha", a.growth_bound->alpha}}
                                   : json(nullptr);
    if (a.claimed_certificate) {
        analysis["claimed_certificate"] = to_json(*a.claimed_certificate);
    } else {
        analysis["claimed_certificate"] = nullptr;
    }

    return json{{"growth_rate", growth},
                {"dimension", s.dimension},
                {"operator", op},
                {"projection", proj},
                {"analysis", analysis}};
}

GrowthRate make_growth_rate(const SystemSpec& spec) {
    switch (spec.growth_rate.kind) {
        case GrowthKind::exponential: return GrowthRate::exponential();
        case GrowthKind::polynomial: return GrowthRate::polynomial();
        case GrowthKind::sqrt_shift: return GrowthRate::sqrt_shift();
        case GrowthKind::custom: return GrowthRate::from_expression(spec.growth_rate.expression);
    }
    throw std::logic_error("unhandled growth kind");
}

NormKind resolved_norm(const SystemSpec& spec) {
    switch (spec.analysis.norm) {
        case NormChoice::max: return NormKind::max;
        case NormChoice::spectral: return NormKind::spectral;
        case NormChoice::automatic: break;
    }
    return spec.op.kind == OperatorKind::example1 ? NormKind::max : NormKind::spectral;
}

CompatiblePair make_pair(const SystemSpec& spec, const GrowthRate& rate) {
    const NormKind norm = resolved_norm(spec);
    const int dim = spec.dimension;
    switch (spec.op.kind) {
        case OperatorKind::example1: return build_example1(rate, spec.op.a, spec.op.b, spec.op.epsilon).with_norm(norm);
        case OperatorKind::example2: return build_example2(spec.op.a, spec.op.b, spec.op.alpha).with_norm(norm);
        case OperatorKind::diagonal: return build_diagonal(rate, spec.op.exponents).with_norm(norm);
        case OperatorKind::ode: break;
    }
    ProjectionFamily projection = [&] {
        if (spec.projection.kind == ProjectionKind::constant) {
            Matrix m(dim, dim);
            for (int r = 0; r < dim; ++r) {
                for (int c = 0; c < dim; ++c) m(r, c) = spec.projection.constant[r][c];
            }
            return ProjectionFamily::constant(m);
        }
        return ProjectionFamily(dim, coefficient_function(parse_expression_matrix(spec.projection.expression)));
    }();
    OdeSettings ode;
    ode.rel_tol = std::min(1e-8, spec.analysis.quad_tol);
    return make_ode_pair(coefficient_function(parse_expression_matrix(spec.op.matrix)), projection, norm, ode);
}

std::vector<std::string> builtin_descriptions() {
    return {
        "growth exponential   mu(t) = e^t               K_mu = 1",
        "growth polynomial    mu(t) = t + 1             K_mu = 1",
        "growth sqrt_shift    mu(t) = t + sqrt(t^2+1)   K_mu = 1",
        "growth custom        mu(t) = <expression>      mu(0) = 1, nondecreasing, unbounded",
        "operator example1    a, b, epsilon             a > 0, b > 0, epsilon >= 0; dimension 2; any growth rate",
        "operator example2    a, b, alpha               a > 1, b > 1, alpha >= 0, alpha + 1 < min{a, b}; dimension 2; growth sqrt_shift",
        "operator diagonal    exponents[d]              U = diag((mu(t)/mu(s))^lambda_i); P spans lambda_i < 0",
        "operator ode         matrix[d][d] expressions  x' = A(t) x; projection constant or expression",
        "analysis gamma       list                      0 < gamma < min{a, b} for example1/example2",
        "analysis p           number                    p >= 1",
    };
}

}  // namespace dichotomy
