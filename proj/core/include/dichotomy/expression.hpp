#pragma once

// Arithmetic expressions in one variable `t`, used for custom growth rates
// and for coefficient matrices A(t).
//
// Grammar (precedence high to low):
//   primary  := number | 't' | func '(' sum ')' | '(' sum ')'
//   power    := primary ['^' unary]            right-associative
//   unary    := '-' unary | power
//   product  := unary (('*' | '/') unary)*
//   sum      := product (('+' | '-') product)*
//   func     := exp | log | sqrt | sin | cos
//
// So `-2^2` is -4 and `2^3^2` is 512.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dichotomy {

class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, std::size_t offset);
    /// Byte offset into the source text.
    [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class Expression {
public:
    struct Node;

    /// Throws ParseError on syntax errors or unknown identifiers.
    static Expression parse(std::string_view text);
    static Expression constant(double value);
    static Expression variable();

    [[nodiscard]] double operator()(double t) const;

    /// Symbolic derivative with respect to t, lightly simplified.
    [[nodiscard]] Expression derivative() const;

    /// Canonical, fully parenthesised form. parse(to_string()) reproduces
    /// the same canonical string.
    [[nodiscard]] std::string to_string() const;

    [[nodiscard]] bool is_constant() const;

    /// Offset (in the original source) of the innermost subexpression that
    /// evaluates to a non-finite value at t, if any.
    [[nodiscard]] std::optional<std::size_t> first_nonfinite(double t) const;

    /// Throws ParseError (annotated with the offending offset) if the
    /// expression is non-finite at any of the given points.
    void require_finite_on(std::span<const double> ts) const;

private:
    explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
    std::shared_ptr<const Node> root_;
};

}  // namespace dichotomy
