#include "dichotomy/expression.hpp"

#include <array>
#include <charconv>
#include <cctype>
#include <cmath>
#include <utility>

namespace dichotomy {

ParseError::ParseError(std::string message, std::size_t offset)
    : std::runtime_error(message + " at byte " + std::to_string(offset)), offset_(offset) {}

enum class Op { number, var, neg, add, sub, mul, div, pow, exp, log, sqrt, sin, cos };

struct Expression::Node {
    Op op = Op::number;
    double value = 0.0;
    std::size_t offset = 0;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

constexpr std::array<std::pair<std::string_view, Op>, 5> kFunctions{{
    {"exp", Op::exp}, {"log", Op::log}, {"sqrt", Op::sqrt}, {"sin", Op::sin}, {"cos", Op::cos}}};

std::string_view function_name(Op op) {
    for (const auto& [name, f] : kFunctions) {
        if (f == op) return name;
    }
    return "?";
}

NodePtr make(Op op, NodePtr lhs, NodePtr rhs = nullptr, std::size_t offset = 0) {
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    n->offset = offset;
    return n;
}

NodePtr number(double v, std::size_t offset = 0) {
    auto n = std::make_shared<Expression::Node>();
    n->op = Op::number;
    n->value = v;
    n->offset = offset;
    return n;
}

NodePtr variable(std::size_t offset = 0) {
    auto n = std::make_shared<Expression::Node>();
    n->op = Op::var;
    n->offset = offset;
    return n;
}

double apply_function(Op op, double x) {
    switch (op) {
        case Op::exp: return std::exp(x);
        case Op::log: return std::log(x);
        case Op::sqrt: return std::sqrt(x);
        case Op::sin: return std::sin(x);
        case Op::cos: return std::cos(x);
        default: return x;
    }
}

double eval(const Expression::Node& n, double t) {
    switch (n.op) {
        case Op::number: return n.value;
        case Op::var: return t;
        case Op::neg: return -eval(*n.lhs, t);
        case Op::add: return eval(*n.lhs, t) + eval(*n.rhs, t);
        case Op::sub: return eval(*n.lhs, t) - eval(*n.rhs, t);
        case Op::mul: return eval(*n.lhs, t) * eval(*n.rhs, t);
        case Op::div: return eval(*n.lhs, t) / eval(*n.rhs, t);
        case Op::pow: return std::pow(eval(*n.lhs, t), eval(*n.rhs, t));
        default: return apply_function(n.op, eval(*n.lhs, t));
    }
}

bool is_number(const NodePtr& n, double v) { return n->op == Op::number && n->value == v; }
bool is_const(const NodePtr& n) { return n->op == Op::number; }

// Smart constructors: fold constants and drop neutral elements.
NodePtr s_neg(NodePtr a) {
    if (is_const(a)) return number(-a->value);
    if (a->op == Op::neg) return a->lhs;
    return make(Op::neg, std::move(a));
}
NodePtr s_add(NodePtr a, NodePtr b) {
    if (is_number(a, 0)) return b;
    if (is_number(b, 0)) return a;
    if (is_const(a) && is_const(b)) return number(a->value + b->value);
    return make(Op::add, std::move(a), std::move(b));
}
NodePtr s_sub(NodePtr a, NodePtr b) {
    if (is_number(b, 0)) return a;
    if (is_number(a, 0)) return s_neg(std::move(b));
    if (is_const(a) && is_const(b)) return number(a->value - b->value);
    return make(Op::sub, std::move(a), std::move(b));
}
NodePtr s_mul(NodePtr a, NodePtr b) {
    if (is_number(a, 0) || is_number(b, 0)) return number(0);
    if (is_number(a, 1)) return b;
    if (is_number(b, 1)) return a;
    if (is_const(a) && is_const(b)) return number(a->value * b->value);
    return make(Op::mul, std::move(a), std::move(b));
}
NodePtr s_div(NodePtr a, NodePtr b) {
    if (is_number(a, 0)) return number(0);
    if (is_number(b, 1)) return a;
    if (is_const(a) && is_const(b) && b->value != 0) return number(a->value / b->value);
    return make(Op::div, std::move(a), std::move(b));
}
NodePtr s_pow(NodePtr a, NodePtr b) {
    if (is_number(b, 0)) return number(1);
    if (is_number(b, 1)) return a;
    if (is_const(a) && is_const(b)) return number(std::pow(a->value, b->value));
    return make(Op::pow, std::move(a), std::move(b));
}
NodePtr s_fn(Op op, NodePtr a) {
    if (is_const(a)) return number(apply_function(op, a->value));
    return make(op, std::move(a));
}

NodePtr differentiate(const NodePtr& n) {
    switch (n->op) {
        case Op::number: return number(0);
        case Op::var: return number(1);
        case Op::neg: return s_neg(differentiate(n->lhs));
        case Op::add: return s_add(differentiate(n->lhs), differentiate(n->rhs));
        case Op::sub: return s_sub(differentiate(n->lhs), differentiate(n->rhs));
        case Op::mul:
            return s_add(s_mul(differentiate(n->lhs), n->rhs), s_mul(n->lhs, differentiate(n->rhs)));
        case Op::div: {
            auto num = s_sub(s_mul(differentiate(n->lhs), n->rhs), s_mul(n->lhs, differentiate(n->rhs)));
            return s_div(std::move(num), s_pow(n->rhs, number(2)));
        }
        case Op::pow: {
            auto du = differentiate(n->lhs);
            if (is_const(n->rhs)) {
                // d(u^c) = c u^(c-1) u'
                return s_mul(s_mul(n->rhs, s_pow(n->lhs, number(n->rhs->value - 1))), du);
            }
            // d(u^v) = u^v (v' log u + v u'/u)
            auto dv = differentiate(n->rhs);
            auto inner = s_add(s_mul(dv, s_fn(Op::log, n->lhs)), s_div(s_mul(n->rhs, du), n->lhs));
            return s_mul(n, std::move(inner));
        }
        case Op::exp: return s_mul(n, differentiate(n->lhs));
        case Op::log: return s_div(differentiate(n->lhs), n->lhs);
        case Op::sqrt: return s_div(differentiate(n->lhs), s_mul(number(2), n));
        case Op::sin: return s_mul(s_fn(Op::cos, n->lhs), differentiate(n->lhs));
        case Op::cos: return s_neg(s_mul(s_fn(Op::sin, n->lhs), differentiate(n->lhs)));
    }
    return number(0);
}

std::string format_number(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) return "nan";
    return std::string(buf.data(), end);
}

void serialize(const Expression::Node& n, std::string& out) {
    auto binary = [&](const char* sym) {
        out += '(';
        serialize(*n.lhs, out);
        out += sym;
        serialize(*n.rhs, out);
        out += ')';
    };
    switch (n.op) {
        case Op::number:
            if (std::signbit(n.value)) {
                out += "(-" + format_number(-n.value) + ")";
            } else {
                out += format_number(n.value);
            }
            return;
        case Op::var: out += 't'; return;
        case Op::neg:
            out += "(-";
            serialize(*n.lhs, out);
            out += ')';
            return;
        case Op::add: binary(" + "); return;
        case Op::sub: binary(" - "); return;
        case Op::mul: binary(" * "); return;
        case Op::div: binary(" / "); return;
        case Op::pow: binary("^"); return;
        default:
            out += function_name(n.op);
            out += '(';
            serialize(*n.lhs, out);
            out += ')';
            return;
    }
}

// Returns the offset of the deepest non-finite subexpression, if any.
std::optional<std::size_t> find_nonfinite(const Expression::Node& n, double t) {
    if (n.lhs) {
        if (auto o = find_nonfinite(*n.lhs, t)) return o;
    }
    if (n.rhs) {
        if (auto o = find_nonfinite(*n.rhs, t)) return o;
    }
    if (!std::isfinite(eval(n, t))) return n.offset;
    return std::nullopt;
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr parse() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("empty expression", pos_);
        auto n = parse_sum();
        skip_ws();
        if (pos_ < text_.size()) {
            throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
        }
        return n;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= text_.size()) {
                throw ParseError(std::string("expected '") + c + "' but reached end of input", pos_);
            }
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
    }

    NodePtr parse_sum() {
        auto lhs = parse_product();
        for (;;) {
            skip_ws();
            const auto at = pos_;
            if (accept('+')) {
                lhs = make(Op::add, lhs, parse_product(), at);
            } else if (accept('-')) {
                lhs = make(Op::sub, lhs, parse_product(), at);
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_product() {
        auto lhs = parse_unary();
        for (;;) {
            skip_ws();
            const auto at = pos_;
            if (accept('*')) {
                lhs = make(Op::mul, lhs, parse_unary(), at);
            } else if (accept('/')) {
                lhs = make(Op::div, lhs, parse_unary(), at);
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_unary() {
        skip_ws();
        const auto at = pos_;
        if (accept('-')) return make(Op::neg, parse_unary(), nullptr, at);
        return parse_power();
    }

    NodePtr parse_power() {
        auto base = parse_primary();
        skip_ws();
        const auto at = pos_;
        if (accept('^')) return make(Op::pow, base, parse_unary(), at);
        return base;
    }

    NodePtr parse_primary() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
        const auto at = pos_;
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            auto inner = parse_sum();
            expect(')');
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                ++pos_;
            }
            const auto ident = text_.substr(at, pos_ - at);
            if (ident == "t") return variable(at);
            for (const auto& [name, op] : kFunctions) {
                if (ident == name) {
                    skip_ws();
                    if (pos_ >= text_.size() || text_[pos_] != '(') {
                        throw ParseError("function '" + std::string(ident) + "' requires parentheses", pos_);
                    }
                    ++pos_;
                    auto arg = parse_sum();
                    expect(')');
                    return make(op, arg, nullptr, at);
                }
            }
            throw ParseError("unknown identifier '" + std::string(ident) + "'", at);
        }
        throw ParseError(std::string("unexpected '") + c + "'", at);
    }

    NodePtr parse_number() {
        const auto at = pos_;
        double v = 0.0;
        const char* first = text_.data() + pos_;
        const char* last = text_.data() + text_.size();
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc{} || ptr == first) throw ParseError("malformed number", at);
        pos_ += static_cast<std::size_t>(ptr - first);
        return number(v, at);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(std::string_view text) { return Expression(Parser(text).parse()); }

Expression Expression::constant(double value) { return Expression(number(value)); }

Expression Expression::variable() { return Expression(dichotomy::variable()); }

double Expression::operator()(double t) const { return eval(*root_, t); }

Expression Expression::derivative() const { return Expression(differentiate(root_)); }

std::string Expression::to_string() const {
    std::string out;
    serialize(*root_, out);
    return out;
}

bool Expression::is_constant() const { return root_->op == Op::number; }

std::optional<std::size_t> Expression::first_nonfinite(double t) const {
    return find_nonfinite(*root_, t);
}

void Expression::require_finite_on(std::span<const double> ts) const {
    for (double t : ts) {
        if (auto offset = first_nonfinite(t)) {
            throw ParseError("expression '" + to_string() + "' is not finite at t=" + format_number(t),
                             *offset);
        }
    }
}

}  // namespace dichotomy
