#include "harnack/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace harnack {

class ExpressionParser {
public:
    ExpressionParser(std::string_view src, Expression& out) : src_(src), out_(out) {}

    int parse() {
        const int root = parse_sum();
        skip_space();
        if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
        return root;
    }

private:
    using Op = Expression::Op;

    [[noreturn]] void fail(const std::string& what) const { throw ExpressionError(what, pos_); }

    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    int add(Op op, int lhs = -1, int rhs = -1, double value = 0.0) {
        out_.nodes_.push_back({op, value, lhs, rhs});
        return static_cast<int>(out_.nodes_.size()) - 1;
    }

    int parse_sum() {
        int lhs = parse_product();
        for (;;) {
            if (accept('+')) {
                lhs = add(Op::add, lhs, parse_product());
            } else if (accept('-')) {
                lhs = add(Op::sub, lhs, parse_product());
            } else {
                return lhs;
            }
        }
    }

    int parse_product() {
        int lhs = parse_unary();
        for (;;) {
            if (accept('*')) {
                lhs = add(Op::mul, lhs, parse_unary());
            } else if (accept('/')) {
                lhs = add(Op::div, lhs, parse_unary());
            } else {
                return lhs;
            }
        }
    }

    int parse_unary() {
        if (accept('-')) return add(Op::neg, parse_unary());
        if (accept('+')) return parse_unary();
        return parse_power();
    }

    int parse_power() {
        const int base = parse_primary();
        if (accept('^')) return add(Op::pow, base, parse_unary());
        return base;
    }

    int parse_primary() {
        skip_space();
        if (pos_ >= src_.size()) fail("unexpected end of expression");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            const int inner = parse_sum();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
        fail("unexpected '" + std::string(1, c) + "'");
    }

    int parse_number() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) {
            ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
            if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
                pos_ = p;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            }
        }
        double value = 0.0;
        const auto text = src_.substr(start, pos_ - start);
        const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
        if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
            pos_ = start;
            fail("malformed number '" + std::string(text) + "'");
        }
        return add(Op::number, -1, -1, value);
    }

    int parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
            ++pos_;
        }
        const std::string name(src_.substr(start, pos_ - start));
        if (name == "x") {
            out_.uses_x_ = true;
            return add(Op::var_x);
        }
        if (name == "y") {
            out_.uses_y_ = true;
            return add(Op::var_y);
        }
        if (name == "t") {
            out_.uses_t_ = true;
            return add(Op::var_t);
        }
        if (name == "pi") return add(Op::number, -1, -1, std::numbers::pi);

        Op fn;
        if (name == "sin") {
            fn = Op::sin;
        } else if (name == "cos") {
            fn = Op::cos;
        } else if (name == "exp") {
            fn = Op::exp;
        } else if (name == "log") {
            fn = Op::log;
        } else {
            pos_ = start;
            fail("unknown identifier '" + name + "'");
        }
        if (!accept('(')) fail("expected '(' after " + name);
        const int arg = parse_sum();
        if (!accept(')')) fail("expected ')'");
        return add(fn, arg);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    Expression& out_;
};

Expression::Expression() : nodes_{{Op::number, 0.0, -1, -1}}, root_(0), source_("0") {}

Expression Expression::constant(double value) {
    Expression e;
    e.nodes_.front().value = value;
    std::ostringstream os;
    os.precision(17);
    os << value;
    e.source_ = os.str();
    return e;
}

Expression Expression::parse(std::string_view source) {
    Expression e;
    e.nodes_.clear();
    e.source_ = std::string(source);
    ExpressionParser parser(source, e);
    e.root_ = parser.parse();
    return e;
}

double Expression::evaluate(double x, double y, double t) const { return eval_node(root_, x, y, t); }

double Expression::constant_value() const {
    if (depends_on_space() || depends_on_time()) {
        throw std::logic_error("expression '" + source_ + "' is not constant");
    }
    return evaluate(0.0, 0.0, 0.0);
}

double Expression::eval_node(int id, double x, double y, double t) const {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    switch (n.op) {
        case Op::number: return n.value;
        case Op::var_x: return x;
        case Op::var_y: return y;
        case Op::var_t: return t;
        case Op::add: return eval_node(n.lhs, x, y, t) + eval_node(n.rhs, x, y, t);
        case Op::sub: return eval_node(n.lhs, x, y, t) - eval_node(n.rhs, x, y, t);
        case Op::mul: return eval_node(n.lhs, x, y, t) * eval_node(n.rhs, x, y, t);
        case Op::div: return eval_node(n.lhs, x, y, t) / eval_node(n.rhs, x, y, t);
        case Op::pow: return std::pow(eval_node(n.lhs, x, y, t), eval_node(n.rhs, x, y, t));
        case Op::neg: return -eval_node(n.lhs, x, y, t);
        case Op::sin: return std::sin(eval_node(n.lhs, x, y, t));
        case Op::cos: return std::cos(eval_node(n.lhs, x, y, t));
        case Op::exp: return std::exp(eval_node(n.lhs, x, y, t));
        case Op::log: return std::log(eval_node(n.lhs, x, y, t));
    }
    return 0.0;
}

std::string Expression::normalized() const { return render(root_); }

std::string Expression::render(int id) const {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    const auto bin = [&](const char* op) { return "(" + render(n.lhs) + op + render(n.rhs) + ")"; };
    const auto fn = [&](const char* name) { return std::string(name) + "(" + render(n.lhs) + ")"; };
    switch (n.op) {
        case Op::number: {
            std::ostringstream os;
            os.precision(17);
            os << n.value;
            return os.str();
        }
        case Op::var_x: return "x";
        case Op::var_y: return "y";
        case Op::var_t: return "t";
        case Op::add: return bin("+");
        case Op::sub: return bin("-");
        case Op::mul: return bin("*");
        case Op::div: return bin("/");
        case Op::pow: return bin("^");
        case Op::neg: return "(-" + render(n.lhs) + ")";
        case Op::sin: return fn("sin");
        case Op::cos: return fn("cos");
        case Op::exp: return fn("exp");
        case Op::log: return fn("log");
    }
    return "";
}

}  // namespace harnack
