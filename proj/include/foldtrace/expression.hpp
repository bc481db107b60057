#pragma once

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "foldtrace/field.hpp"
#include "foldtrace/types.hpp"

// Arithmetic expressions in x and y:
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := ('+' | '-') unary | power
//   power  := atom ('^' unary)?          so 2^-1 parses and -x^2 is -(x^2)
//   atom   := number | 'x' | 'y' | name '(' expr ')' | '(' expr ')'

namespace foldtrace {

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what + " at position " + std::to_string(position)), position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

class Expression {
public:
    double operator()(double x, double y) const { return eval(root_, x, y); }

    static Expression parse(std::string_view text);

private:
    enum class Op { Number, X, Y, Add, Sub, Mul, Div, Pow, Neg, Call };
    enum class Fn { Sin, Cos, Abs, Cbrt, Sqrt, Exp, Log };

    struct Node {
        Op op = Op::Number;
        double value = 0.0;
        Fn fn = Fn::Sin;
        int lhs = -1;
        int rhs = -1;
    };

    class Parser;

    double eval(int i, double x, double y) const {
        const Node& n = nodes_[static_cast<std::size_t>(i)];
        switch (n.op) {
            case Op::Number: return n.value;
            case Op::X: return x;
            case Op::Y: return y;
            case Op::Add: return eval(n.lhs, x, y) + eval(n.rhs, x, y);
            case Op::Sub: return eval(n.lhs, x, y) - eval(n.rhs, x, y);
            case Op::Mul: return eval(n.lhs, x, y) * eval(n.rhs, x, y);
            case Op::Div: return eval(n.lhs, x, y) / eval(n.rhs, x, y);
            case Op::Pow: return std::pow(eval(n.lhs, x, y), eval(n.rhs, x, y));
            case Op::Neg: return -eval(n.lhs, x, y);
            case Op::Call: return call(n.fn, eval(n.lhs, x, y));
        }
        return 0.0;
    }

    static double call(Fn fn, double v) {
        switch (fn) {
            case Fn::Sin: return std::sin(v);
            case Fn::Cos: return std::cos(v);
            case Fn::Abs: return std::abs(v);
            case Fn::Cbrt: return std::cbrt(v);
            case Fn::Sqrt: return std::sqrt(v);
            case Fn::Exp: return std::exp(v);
            case Fn::Log: return std::log(v);
        }
        return 0.0;
    }

    std::vector<Node> nodes_;
    int root_ = -1;
};

class Expression::Parser {
public:
    Parser(std::string_view text, std::vector<Node>& nodes) : text_(text), nodes_(nodes) {}

    int parse() {
        const int root = expr();
        skip_space();
        if (pos_ != text_.size()) {
            throw ParseError("unexpected '" + std::string(1, text_[pos_]) + "'", pos_);
        }
        return root;
    }

private:
    int add(Node n) {
        nodes_.push_back(n);
        return static_cast<int>(nodes_.size()) - 1;
    }

    int binary(Op op, int lhs, int rhs) { return add(Node{op, 0.0, Fn::Sin, lhs, rhs}); }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
    }

    int expr() {
        int lhs = term();
        while (true) {
            if (accept('+')) {
                lhs = binary(Op::Add, lhs, term());
            } else if (accept('-')) {
                lhs = binary(Op::Sub, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    int term() {
        int lhs = unary();
        while (true) {
            if (accept('*')) {
                lhs = binary(Op::Mul, lhs, unary());
            } else if (accept('/')) {
                lhs = binary(Op::Div, lhs, unary());
            } else {
                return lhs;
            }
        }
    }

    int unary() {
        if (accept('-')) {
            return binary(Op::Neg, unary(), -1);
        }
        if (accept('+')) {
            return unary();
        }
        return power();
    }

    int power() {
        const int base = atom();
        if (accept('^')) {
            return binary(Op::Pow, base, unary());
        }
        return base;
    }

    int atom() {
        skip_space();
        if (pos_ >= text_.size()) {
            throw ParseError("unexpected end of expression", pos_);
        }
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return number();
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
            }
            const std::string_view name = text_.substr(start, pos_ - start);
            if (name == "x") {
                return add(Node{Op::X});
            }
            if (name == "y") {
                return add(Node{Op::Y});
            }
            Node call{Op::Call};
            call.fn = function(name, start);
            expect('(');
            call.lhs = expr();
            expect(')');
            return add(call);
        }
        if (accept('(')) {
            const int inner = expr();
            expect(')');
            return inner;
        }
        throw ParseError("unexpected '" + std::string(1, c) + "'", pos_);
    }

    int number() {
        const std::string rest(text_.substr(pos_));
        char* end = nullptr;
        const double v = std::strtod(rest.c_str(), &end);
        if (end == rest.c_str()) {
            throw ParseError("malformed number", pos_);
        }
        pos_ += static_cast<std::size_t>(end - rest.c_str());
        return add(Node{Op::Number, v});
    }

    static Fn function(std::string_view name, std::size_t where) {
        if (name == "sin") return Fn::Sin;
        if (name == "cos") return Fn::Cos;
        if (name == "abs") return Fn::Abs;
        if (name == "cbrt") return Fn::Cbrt;
        if (name == "sqrt") return Fn::Sqrt;
        if (name == "exp") return Fn::Exp;
        if (name == "log") return Fn::Log;
        throw ParseError("unknown name '" + std::string(name) + "'", where);
    }

    std::string_view text_;
    std::vector<Node>& nodes_;
    std::size_t pos_ = 0;
};

inline Expression Expression::parse(std::string_view text) {
    Expression e;
    e.root_ = Parser(text, e.nodes_).parse();
    return e;
}

/// Field given by a parsed expression. Non-finite values raise FieldEvaluationError.
class ExpressionField final : public ResidualField {
public:
    explicit ExpressionField(std::string_view text) : expr_(Expression::parse(text)), text_(text) {}

    double evaluate(Point2 p) override {
        const double v = expr_(p.x, p.y);
        if (!std::isfinite(v)) {
            throw FieldEvaluationError("expression '" + text_ + "' is not finite at (" + std::to_string(p.x) + ", " +
                                       std::to_string(p.y) + ")");
        }
        return v;
    }

private:
    Expression expr_;
    std::string text_;
};

}  // namespace foldtrace
