#include "parlab/expr.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

namespace parlab {

namespace {
enum class Op { Const, VarX1, VarX2, VarT, VarR, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Abs, Sqrt, Exp };
}

struct Expr::Node {
    Op op;
    double value = 0.0;
    std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr leaf(Op op, double v = 0.0) {
    auto n = std::make_shared<Expr::Node>();
    n->op = op;
    n->value = v;
    return n;
}

NodePtr unary(Op op, NodePtr a) {
    auto n = std::make_shared<Expr::Node>();
    n->op = op;
    n->a = std::move(a);
    return n;
}

NodePtr binary(Op op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Expr::Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

struct Parser {
    const std::string& s;
    std::size_t pos = 0;

    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        skip();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) {
        throw ConfigError("expression parse error at offset " + std::to_string(pos) + ": " +
                          what + " in '" + s + "'");
    }

    NodePtr expr() {
        NodePtr n = term();
        for (;;) {
            if (eat('+'))
                n = binary(Op::Add, n, term());
            else if (eat('-'))
                n = binary(Op::Sub, n, term());
            else
                return n;
        }
    }
    NodePtr term() {
        NodePtr n = factor();
        for (;;) {
            if (eat('*'))
                n = binary(Op::Mul, n, factor());
            else if (eat('/'))
                n = binary(Op::Div, n, factor());
            else
                return n;
        }
    }
    NodePtr factor() {
        if (eat('-')) return unary(Op::Neg, factor());
        return power();
    }
    NodePtr power() {
        NodePtr n = atom();
        if (eat('^')) return binary(Op::Pow, n, factor());
        return n;
    }
    NodePtr atom() {
        skip();
        if (pos >= s.size()) fail("unexpected end");
        char c = s[pos];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t len = 0;
            double v = std::stod(s.substr(pos), &len);
            pos += len;
            return leaf(Op::Const, v);
        }
        if (c == '(') {
            ++pos;
            NodePtr n = expr();
            if (!eat(')')) fail("missing ')'");
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos;
            while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) ||
                                      s[pos] == '_'))
                ++pos;
            std::string name = s.substr(start, pos - start);
            if (name == "pi") return leaf(Op::Const, std::numbers::pi);
            if (name == "x1") return leaf(Op::VarX1);
            if (name == "x2") return leaf(Op::VarX2);
            if (name == "t") return leaf(Op::VarT);
            if (name == "r") return leaf(Op::VarR);
            Op fn;
            if (name == "sin")
                fn = Op::Sin;
            else if (name == "cos")
                fn = Op::Cos;
            else if (name == "abs")
                fn = Op::Abs;
            else if (name == "sqrt")
                fn = Op::Sqrt;
            else if (name == "exp")
                fn = Op::Exp;
            else
                fail("unknown identifier '" + name + "'");
            if (!eat('(')) fail("expected '(' after " + name);
            NodePtr arg = expr();
            if (!eat(')')) fail("missing ')'");
            return unary(fn, arg);
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

double eval_node(const Expr::Node& n, const Vec2& x, double t) {
    switch (n.op) {
        case Op::Const: return n.value;
        case Op::VarX1: return x[0];
        case Op::VarX2: return x[1];
        case Op::VarT: return t;
        case Op::VarR: return norm(x);
        case Op::Add: return eval_node(*n.a, x, t) + eval_node(*n.b, x, t);
        case Op::Sub: return eval_node(*n.a, x, t) - eval_node(*n.b, x, t);
        case Op::Mul: return eval_node(*n.a, x, t) * eval_node(*n.b, x, t);
        case Op::Div: return eval_node(*n.a, x, t) / eval_node(*n.b, x, t);
        case Op::Pow: return std::pow(eval_node(*n.a, x, t), eval_node(*n.b, x, t));
        case Op::Neg: return -eval_node(*n.a, x, t);
        case Op::Sin: return std::sin(eval_node(*n.a, x, t));
        case Op::Cos: return std::cos(eval_node(*n.a, x, t));
        case Op::Abs: return std::abs(eval_node(*n.a, x, t));
        case Op::Sqrt: return std::sqrt(eval_node(*n.a, x, t));
        case Op::Exp: return std::exp(eval_node(*n.a, x, t));
    }
    return 0.0;
}

bool uses_t(const Expr::Node& n) {
    if (n.op == Op::VarT) return true;
    if (n.a && uses_t(*n.a)) return true;
    if (n.b && uses_t(*n.b)) return true;
    return false;
}

} // namespace

Expr Expr::parse(const std::string& text) {
    Parser p{text};
    Expr e;
    e.root_ = p.expr();
    p.skip();
    if (p.pos != text.size()) p.fail("trailing input");
    e.text_ = text;
    return e;
}

double Expr::eval(const Vec2& x, double t) const { return eval_node(*root_, x, t); }

bool Expr::depends_on_t() const { return uses_t(*root_); }

} // namespace parlab
