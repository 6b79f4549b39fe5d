#include "freefront/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <utility>
#include <vector>

#include "freefront/errors.hpp"

namespace freefront {

enum class NodeKind { number, var_t, var_x, neg, add, sub, mul, div, pow, call };
enum class Func { exp, sin, cos, sqrt, abs, min, max };

struct Expression::Node {
    NodeKind kind;
    double value = 0.0;                      // number
    Func func = Func::exp;                   // call
    std::shared_ptr<const Node> a, b;        // operands
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

NodePtr make_node(Node n) { return std::make_shared<const Node>(std::move(n)); }

// ---------------------------------------------------------------- tokenizer

enum class Tok { number, ident, plus, minus, star, slash, caret, lparen, rparen, comma, end };

struct Token {
    Tok kind;
    double value = 0.0;
    std::string text;
    std::size_t offset = 0;
};

std::vector<Token> tokenize(const std::string& src) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            double v = 0.0;
            const char* first = src.data() + i;
            const char* last = src.data() + src.size();
            auto res = std::from_chars(first, last, v);
            if (res.ec != std::errc() || res.ptr == first)
                throw ExpressionSyntaxError("malformed number at offset " + std::to_string(i), i);
            out.push_back({Tok::number, v, src.substr(i, res.ptr - first), i});
            i += static_cast<std::size_t>(res.ptr - first);
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                ++j;
            out.push_back({Tok::ident, 0.0, src.substr(i, j - i), i});
            i = j;
            continue;
        }
        Tok k;
        switch (c) {
            case '+': k = Tok::plus; break;
            case '-': k = Tok::minus; break;
            case '*': k = Tok::star; break;
            case '/': k = Tok::slash; break;
            case '^': k = Tok::caret; break;
            case '(': k = Tok::lparen; break;
            case ')': k = Tok::rparen; break;
            case ',': k = Tok::comma; break;
            default:
                throw ExpressionSyntaxError(
                    std::string("unexpected character '") + c + "' at offset " + std::to_string(i), i);
        }
        out.push_back({k, 0.0, src.substr(i, 1), i});
        ++i;
    }
    out.push_back({Tok::end, 0.0, "", src.size()});
    return out;
}

// ------------------------------------------------------------------- parser
//
// Pratt parser. Binding powers: + - (10), * / (20), unary - (35), ^ (40).
// ^ is right-associative: its right operand is parsed with a threshold one
// below its own binding power.

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    NodePtr parse() {
        NodePtr e = parse_expr(0);
        expect(Tok::end, "end of input");
        return e;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;

    const Token& peek() const { return toks_[pos_]; }
    Token next() { return toks_[pos_++]; }

    void expect(Tok k, const char* what) {
        if (peek().kind != k)
            throw ExpressionSyntaxError("expected " + std::string(what) + " at offset " +
                                            std::to_string(peek().offset),
                                        peek().offset);
        ++pos_;
    }

    static int led_power(Tok k) {
        switch (k) {
            case Tok::plus:
            case Tok::minus: return 10;
            case Tok::star:
            case Tok::slash: return 20;
            case Tok::caret: return 40;
            default: return 0;
        }
    }

    NodePtr parse_expr(int min_bp) {
        NodePtr lhs = parse_prefix();
        for (;;) {
            Tok k = peek().kind;
            int lbp = led_power(k);
            if (lbp == 0 || lbp <= min_bp) break;
            next();
            // right-associativity for ^ via a lowered right threshold
            int rbp = (k == Tok::caret) ? lbp - 1 : lbp;
            NodePtr rhs = parse_expr(rbp);
            NodeKind nk;
            switch (k) {
                case Tok::plus: nk = NodeKind::add; break;
                case Tok::minus: nk = NodeKind::sub; break;
                case Tok::star: nk = NodeKind::mul; break;
                case Tok::slash: nk = NodeKind::div; break;
                default: nk = NodeKind::pow; break;
            }
            lhs = make_node({nk, 0.0, Func::exp, lhs, rhs});
        }
        return lhs;
    }

    NodePtr parse_prefix() {
        Token tok = next();
        switch (tok.kind) {
            case Tok::number:
                return make_node({NodeKind::number, tok.value, Func::exp, nullptr, nullptr});
            case Tok::minus: {
                NodePtr operand = parse_expr(35 - 1);  // binds tighter than * /, looser than ^
                return make_node({NodeKind::neg, 0.0, Func::exp, operand, nullptr});
            }
            case Tok::lparen: {
                NodePtr e = parse_expr(0);
                expect(Tok::rparen, "')'");
                return e;
            }
            case Tok::ident: return parse_ident(tok);
            default:
                throw ExpressionSyntaxError("expected a value at offset " + std::to_string(tok.offset),
                                            tok.offset);
        }
    }

    NodePtr parse_ident(const Token& tok) {
        if (tok.text == "t") return make_node({NodeKind::var_t, 0.0, Func::exp, nullptr, nullptr});
        if (tok.text == "x") return make_node({NodeKind::var_x, 0.0, Func::exp, nullptr, nullptr});

        Func f;
        int arity;
        if (tok.text == "exp") { f = Func::exp; arity = 1; }
        else if (tok.text == "sin") { f = Func::sin; arity = 1; }
        else if (tok.text == "cos") { f = Func::cos; arity = 1; }
        else if (tok.text == "sqrt") { f = Func::sqrt; arity = 1; }
        else if (tok.text == "abs") { f = Func::abs; arity = 1; }
        else if (tok.text == "min") { f = Func::min; arity = 2; }
        else if (tok.text == "max") { f = Func::max; arity = 2; }
        else
            throw UnknownIdentifierError("unknown identifier '" + tok.text + "' at offset " +
                                             std::to_string(tok.offset),
                                         tok.offset);

        expect(Tok::lparen, "'(' after function name");
        NodePtr a = parse_expr(0);
        NodePtr b;
        if (arity == 2) {
            expect(Tok::comma, "',' between arguments");
            b = parse_expr(0);
        }
        expect(Tok::rparen, "')'");
        return make_node({NodeKind::call, 0.0, f, a, b});
    }
};

// --------------------------------------------------------------- evaluation

void render(const Node& n, std::string& out);

std::string render_str(const Node& n) {
    std::string s;
    render(n, s);
    return s;
}

[[noreturn]] void eval_fault(const char* what, const Node& n) {
    throw ExpressionEvalError(std::string(what) + " in '" + render_str(n) + "'", render_str(n));
}

double check_finite(double v, const Node& n) {
    if (!std::isfinite(v)) eval_fault("non-finite result", n);
    return v;
}

double eval_pow(double base, double e, const Node& n) {
    double rounded = std::nearbyint(e);
    if (e == rounded && std::fabs(e) <= 8.0) {
        int k = static_cast<int>(rounded);
        if (k == 0) return 1.0;
        if (k < 0 && base == 0.0) eval_fault("zero raised to a negative power", n);
        double acc = 1.0;
        for (int i = 0; i < std::abs(k); ++i) acc *= base;
        return k > 0 ? acc : 1.0 / acc;
    }
    if (base < 0.0) eval_fault("negative base with non-integer exponent", n);
    if (base == 0.0 && e < 0.0) eval_fault("zero raised to a negative power", n);
    return std::pow(base, e);
}

double eval_node(const Node& n, double t, double x) {
    switch (n.kind) {
        case NodeKind::number: return n.value;
        case NodeKind::var_t: return t;
        case NodeKind::var_x: return x;
        case NodeKind::neg: return check_finite(-eval_node(*n.a, t, x), n);
        case NodeKind::add:
            return check_finite(eval_node(*n.a, t, x) + eval_node(*n.b, t, x), n);
        case NodeKind::sub:
            return check_finite(eval_node(*n.a, t, x) - eval_node(*n.b, t, x), n);
        case NodeKind::mul:
            return check_finite(eval_node(*n.a, t, x) * eval_node(*n.b, t, x), n);
        case NodeKind::div: {
            double d = eval_node(*n.b, t, x);
            if (d == 0.0) eval_fault("division by zero", n);
            return check_finite(eval_node(*n.a, t, x) / d, n);
        }
        case NodeKind::pow:
            return check_finite(eval_pow(eval_node(*n.a, t, x), eval_node(*n.b, t, x), n), n);
        case NodeKind::call: {
            double a = eval_node(*n.a, t, x);
            double v;
            switch (n.func) {
                case Func::exp: v = std::exp(a); break;
                case Func::sin: v = std::sin(a); break;
                case Func::cos: v = std::cos(a); break;
                case Func::sqrt:
                    if (a < 0.0) eval_fault("sqrt of a negative number", n);
                    v = std::sqrt(a);
                    break;
                case Func::abs: v = std::fabs(a); break;
                case Func::min: v = std::fmin(a, eval_node(*n.b, t, x)); break;
                case Func::max: v = std::fmax(a, eval_node(*n.b, t, x)); break;
                default: v = 0.0; break;
            }
            return check_finite(v, n);
        }
    }
    return 0.0;  // unreachable
}

// ---------------------------------------------------------------- rendering

const char* func_name(Func f) {
    switch (f) {
        case Func::exp: return "exp";
        case Func::sin: return "sin";
        case Func::cos: return "cos";
        case Func::sqrt: return "sqrt";
        case Func::abs: return "abs";
        case Func::min: return "min";
        case Func::max: return "max";
    }
    return "?";
}

void render(const Node& n, std::string& out) {
    char buf[40];
    switch (n.kind) {
        case NodeKind::number:
            std::snprintf(buf, sizeof buf, "%.17g", n.value);
            out += buf;
            return;
        case NodeKind::var_t: out += 't'; return;
        case NodeKind::var_x: out += 'x'; return;
        case NodeKind::neg:
            out += "(-";
            render(*n.a, out);
            out += ')';
            return;
        case NodeKind::add:
        case NodeKind::sub:
        case NodeKind::mul:
        case NodeKind::div:
        case NodeKind::pow: {
            char op = n.kind == NodeKind::add   ? '+'
                      : n.kind == NodeKind::sub ? '-'
                      : n.kind == NodeKind::mul ? '*'
                      : n.kind == NodeKind::div ? '/'
                                                : '^';
            out += '(';
            render(*n.a, out);
            out += op;
            render(*n.b, out);
            out += ')';
            return;
        }
        case NodeKind::call:
            out += func_name(n.func);
            out += '(';
            render(*n.a, out);
            if (n.b) {
                out += ',';
                render(*n.b, out);
            }
            out += ')';
            return;
    }
}

bool nodes_equal(const Node* a, const Node* b) {
    if (a == nullptr || b == nullptr) return a == b;
    if (a->kind != b->kind) return false;
    if (a->kind == NodeKind::number) return a->value == b->value;
    if (a->kind == NodeKind::call && a->func != b->func) return false;
    return nodes_equal(a->a.get(), b->a.get()) && nodes_equal(a->b.get(), b->b.get());
}

}  // namespace

Expression Expression::parse(const std::string& source) {
    Parser p(tokenize(source));
    return Expression(p.parse());
}

double Expression::evaluate(double t, double x) const { return eval_node(*root_, t, x); }

std::string Expression::to_string() const { return render_str(*root_); }

bool Expression::structurally_equal(const Expression& other) const {
    return nodes_equal(root_.get(), other.root_.get());
}

}  // namespace freefront
