#pragma once

#include <memory>
#include <string>

namespace freefront {

/**
 * Arithmetic expression in the variables t and x.
 *
 * Grammar: numeric literals, t, x, binary + - * / ^ (^ binds tightest and is
 * right-associative, then unary minus, then * /, then + -), parentheses, and
 * the functions exp, sin, cos, sqrt, abs (unary) and min, max (binary).
 *
 * Evaluation is strict about domain faults: division by zero, sqrt of a
 * negative number, 0^negative, negative^non-integer and any non-finite
 * intermediate raise ExpressionEvalError naming the offending subexpression.
 */
class Expression {
public:
    struct Node;

    /// Parses source text. Throws ExpressionSyntaxError / UnknownIdentifierError.
    static Expression parse(const std::string& source);

    /// Evaluates at (t, x).
    double evaluate(double t, double x) const;

    /// Fully parenthesized rendering; parse(to_string()) reproduces the tree.
    std::string to_string() const;

    bool structurally_equal(const Expression& other) const;

private:
    explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
    std::shared_ptr<const Node> root_;
};

}  // namespace freefront
