#include "momentdiv/expression.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "momentdiv/error.hpp"

namespace momentdiv {

struct Expression::Node {
    enum class Op { number, var, neg, add, sub, mul, div, pow, exp, log, sqrt, min2, max2 };

    Op op = Op::number;
    double value = 0.0;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

namespace {

using Node = Expression::Node;
using Op = Node::Op;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make_leaf(Op op, double value = 0.0) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->value = value;
    return n;
}

NodePtr make_node(Op op, NodePtr lhs, NodePtr rhs = nullptr) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

double checked(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw EvalError(std::string("non-finite result in ") + what);
    }
    return v;
}

double eval(const Node& n, double x) {
    switch (n.op) {
        case Op::number: return n.value;
        case Op::var: return x;
        case Op::neg: return -eval(*n.lhs, x);
        case Op::add: return checked(eval(*n.lhs, x) + eval(*n.rhs, x), "addition");
        case Op::sub: return checked(eval(*n.lhs, x) - eval(*n.rhs, x), "subtraction");
        case Op::mul: return checked(eval(*n.lhs, x) * eval(*n.rhs, x), "multiplication");
        case Op::div: {
            const double den = eval(*n.rhs, x);
            if (den == 0.0) throw EvalError("division by zero");
            return checked(eval(*n.lhs, x) / den, "division");
        }
        case Op::pow: return checked(std::pow(eval(*n.lhs, x), eval(*n.rhs, x)), "power");
        case Op::exp: return checked(std::exp(eval(*n.lhs, x)), "exp");
        case Op::log: {
            const double a = eval(*n.lhs, x);
            if (!(a > 0.0)) throw EvalError("log of non-positive argument");
            return std::log(a);
        }
        case Op::sqrt: {
            const double a = eval(*n.lhs, x);
            if (a < 0.0) throw EvalError("sqrt of negative argument");
            return std::sqrt(a);
        }
        case Op::min2: return std::fmin(eval(*n.lhs, x), eval(*n.rhs, x));
        case Op::max2: return std::fmax(eval(*n.lhs, x), eval(*n.rhs, x));
    }
    throw EvalError("corrupt expression node");
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string print(const Node& n) {
    auto bin = [&](const char* sym) { return "(" + print(*n.lhs) + sym + print(*n.rhs) + ")"; };
    switch (n.op) {
        case Op::number: {
            // Negative literals only arise from folding; keep them re-parseable.
            const std::string s = format_number(n.value);
            return n.value < 0 ? "(" + s + ")" : s;
        }
        case Op::var: return "x";
        case Op::neg: return "(-" + print(*n.lhs) + ")";
        case Op::add: return bin("+");
        case Op::sub: return bin("-");
        case Op::mul: return bin("*");
        case Op::div: return bin("/");
        case Op::pow: return bin("^");
        case Op::exp: return "exp(" + print(*n.lhs) + ")";
        case Op::log: return "log(" + print(*n.lhs) + ")";
        case Op::sqrt: return "sqrt(" + print(*n.lhs) + ")";
        case Op::min2: return "min2(" + print(*n.lhs) + "," + print(*n.rhs) + ")";
        case Op::max2: return "max2(" + print(*n.lhs) + "," + print(*n.rhs) + ")";
    }
    return "?";
}

// Polynomial degree in x when the tree is built only from constants, x, +, -,
// unary minus, multiplication and division by constants; 2 means "other".
int degree(const Node& n) {
    switch (n.op) {
        case Op::number: return 0;
        case Op::var: return 1;
        case Op::neg: return degree(*n.lhs);
        case Op::add:
        case Op::sub: return std::max(degree(*n.lhs), degree(*n.rhs));
        case Op::mul: {
            const int d = degree(*n.lhs) + degree(*n.rhs);
            return d > 1 ? 2 : d;
        }
        case Op::div: return degree(*n.rhs) == 0 ? degree(*n.lhs) : 2;
        default: {
            const bool const_args = degree(*n.lhs) == 0 && (!n.rhs || degree(*n.rhs) == 0);
            return const_args ? 0 : 2;
        }
    }
}

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    NodePtr parse() {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != src_.size()) throw ParseError("unexpected character '" + std::string(1, src_[pos_]) + "'", pos_);
        return e;
    }

private:
    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            skip_ws();
            if (accept('+')) lhs = make_node(Op::add, lhs, term());
            else if (accept('-')) lhs = make_node(Op::sub, lhs, term());
            else return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = factor();
        for (;;) {
            skip_ws();
            if (accept('*')) lhs = make_node(Op::mul, lhs, factor());
            else if (accept('/')) lhs = make_node(Op::div, lhs, factor());
            else return lhs;
        }
    }

    NodePtr factor() {
        NodePtr base = atom();
        skip_ws();
        if (accept('^')) return make_node(Op::pow, base, factor());
        return base;
    }

    NodePtr atom() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("unexpected end of expression", pos_);
        const char c = src_[pos_];
        if (c == '-') {
            ++pos_;
            return make_node(Op::neg, atom());
        }
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
    }

    NodePtr number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_, ++n;
            return n;
        };
        std::size_t n = digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            n += digits();
        }
        if (n == 0) throw ParseError("malformed number", start);
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            const std::size_t save = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (digits() == 0) pos_ = save;  // not an exponent; let the caller reject the 'e'
        }
        const std::string text(src_.substr(start, pos_ - start));
        return make_leaf(Op::number, std::strtod(text.c_str(), nullptr));
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        const std::string_view name = src_.substr(start, pos_ - start);
        if (name == "x") return make_leaf(Op::var);

        struct Func { std::string_view name; Op op; int arity; };
        static constexpr Func funcs[] = {
            {"exp", Op::exp, 1}, {"log", Op::log, 1}, {"sqrt", Op::sqrt, 1},
            {"min2", Op::min2, 2}, {"max2", Op::max2, 2},
        };
        for (const Func& f : funcs) {
            if (f.name != name) continue;
            skip_ws();
            expect('(');
            std::vector<NodePtr> args{expr()};
            skip_ws();
            while (accept(',')) {
                args.push_back(expr());
                skip_ws();
            }
            const std::size_t close = pos_;
            expect(')');
            if (static_cast<int>(args.size()) != f.arity) {
                throw ParseError("arity mismatch: " + std::string(name) + " takes " + std::to_string(f.arity) +
                                     " argument(s), got " + std::to_string(args.size()),
                                 close);
            }
            return make_node(f.op, args[0], f.arity == 2 ? args[1] : nullptr);
        }
        throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        skip_ws();
        if (!accept(c)) {
            if (pos_ >= src_.size()) throw ParseError(std::string("expected '") + c + "' before end of expression", pos_);
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression(std::shared_ptr<const Node> root, std::string source)
    : root_(std::move(root)), source_(std::move(source)) {
    switch (degree(*root_)) {
        case 0:
            try {
                constant_ = eval(*root_, 0.0);
                kind_ = Kind::constant;
            } catch (const EvalError&) {
                kind_ = Kind::tree;  // surfaces again, with a location, during validation
            }
            break;
        case 1: kind_ = Kind::affine; break;
        default: kind_ = Kind::tree; break;
    }
}

Expression Expression::parse(std::string_view source) {
    return Expression(Parser(source).parse(), std::string(source));
}

Expression Expression::constant(double value) {
    return Expression(make_leaf(Op::number, value), format_number(value));
}

double Expression::operator()(double x) const { return eval(*root_, x); }

std::string Expression::to_string() const { return print(*root_); }

}  // namespace momentdiv
