#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace harnack {

class ExpressionError : public std::runtime_error {
public:
    ExpressionError(const std::string& message, std::size_t column)
        : std::runtime_error(message + " (column " + std::to_string(column + 1) + ")"), column_(column) {}
    std::size_t column() const { return column_; }

private:
    std::size_t column_;
};

/// Scalar expression over (x, y, t): numeric literals, the constant pi,
/// + - * / ^ (right associative), unary minus, parentheses, and sin, cos, exp, log.
class Expression {
public:
    Expression();  // the constant 0
    static Expression parse(std::string_view source);
    static Expression constant(double value);

    double evaluate(double x, double y, double t) const;

    bool depends_on_space() const { return uses_x_ || uses_y_; }
    bool depends_on_time() const { return uses_t_; }

    /// Canonical fully-parenthesized rendering; whitespace-insensitive.
    std::string normalized() const;
    const std::string& source() const { return source_; }

    /// Constant value when the expression has no free variables.
    double constant_value() const;

private:
    enum class Op { number, var_x, var_y, var_t, add, sub, mul, div, pow, neg, sin, cos, exp, log };
    struct Node {
        Op op;
        double value = 0.0;
        int lhs = -1;
        int rhs = -1;
    };
    friend class ExpressionParser;

    double eval_node(int id, double x, double y, double t) const;
    std::string render(int id) const;

    std::vector<Node> nodes_;
    int root_ = -1;
    std::string source_;
    bool uses_x_ = false;
    bool uses_y_ = false;
    bool uses_t_ = false;
};

}  // namespace harnack
