#pragma once

// Expression front-end for functions of one variable x.
//
// Grammar (whitespace insignificant, no implicit multiplication):
//
//   expression := term { ('+'|'-') term }
//   term       := power { ('*'|'/') power }
//   power      := unary [ '^' power ]          right associative
//   unary      := '-' unary | primary
//   primary    := number | 'x' | 'pi' | 'e'
//              | func '(' expression ')' | '(' expression ')'
//   func       := 'sin' | 'cos' | 'exp' | 'log' | 'sqrt'
//   number     := digits [ '.' digits ] [ ('e'|'E') ['+'|'-'] digits ]
//
// Precedence, loosest to tightest: +,- then *,/ then ^ then unary minus.
// Unary minus binds tighter than the left operand of ^, so "-x^2" is
// (-x)^2; the right operand may carry its own sign, "2^-3" is 2^(-3).
//
// The same AST evaluates in plain double arithmetic (eval) and in truncated
// Taylor arithmetic of order 4 (eval_jet4). Both paths run the identical
// code template, so eval(e, x) is bit-identical to eval_jet4(e, x).v0.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "simpcert/errors.hpp"
#include "simpcert/jet.hpp"
#include "simpcert/polynomial.hpp"

namespace simpcert {

enum class BinOp { Add, Sub, Mul, Div, Pow };
enum class FuncName { Sin, Cos, Exp, Log, Sqrt };
enum class ConstName { Pi, E };

struct Node {
    enum class Kind { Number, Variable, Constant, Unary, Binary, Call };

    Kind kind;
    double number = 0.0;              // Kind::Number
    ConstName cname = ConstName::Pi;  // Kind::Constant
    BinOp op = BinOp::Add;            // Kind::Binary
    FuncName func = FuncName::Sin;    // Kind::Call
    std::unique_ptr<Node> lhs;        // Binary: left; Unary/Call: operand
    std::unique_ptr<Node> rhs;        // Binary: right
    std::size_t begin = 0;            // source span [begin, end)
    std::size_t end = 0;
    bool has_var = false;             // some descendant is the variable x
};

// Immutable parsed expression. Copies share the tree.
class Expr {
public:
    Expr(std::shared_ptr<const Node> root, std::shared_ptr<const std::string> source)
        : root_(std::move(root)), source_(std::move(source)) {}

    const Node& root() const noexcept { return *root_; }
    const std::string& source() const noexcept { return *source_; }

    std::string fragment(const Node& n) const {
        return source_->substr(n.begin, n.end - n.begin);
    }

private:
    std::shared_ptr<const Node> root_;
    std::shared_ptr<const std::string> source_;
};

namespace detail {

inline std::string format_shortest(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------- lexer --

struct Token {
    enum class Kind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };
    Kind kind;
    std::size_t begin;
    std::size_t end;
    double value = 0.0;     // Number
    std::string text;       // Ident
};

inline std::vector<Token> lex(const std::string& src) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    const std::size_t n = src.size();
    auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
    auto is_alpha = [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
    };
    while (i < n) {
        const char c = src[i];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            ++i;
            continue;
        }
        const std::size_t start = i;
        if (is_digit(c)) {
            while (i < n && is_digit(src[i])) ++i;
            if (i < n && src[i] == '.') {
                ++i;
                if (i >= n || !is_digit(src[i]))
                    throw ParseError("expected digits after decimal point", i);
                while (i < n && is_digit(src[i])) ++i;
            }
            if (i < n && (src[i] == 'e' || src[i] == 'E')) {
                // exponent only if followed by [sign] digits, else it is the
                // identifier/constant 'e' of the next token
                std::size_t j = i + 1;
                if (j < n && (src[j] == '+' || src[j] == '-')) ++j;
                if (j < n && is_digit(src[j])) {
                    i = j;
                    while (i < n && is_digit(src[i])) ++i;
                }
            }
            double value = 0.0;
            auto res = std::from_chars(src.data() + start, src.data() + i, value);
            if (res.ec != std::errc())
                throw ParseError("invalid numeric literal '" + src.substr(start, i - start) +
                                     "'",
                                 start);
            tokens.push_back({Token::Kind::Number, start, i, value, {}});
            continue;
        }
        if (is_alpha(c)) {
            while (i < n && (is_alpha(src[i]) || is_digit(src[i]))) ++i;
            tokens.push_back({Token::Kind::Ident, start, i, 0.0, src.substr(start, i - start)});
            continue;
        }
        Token::Kind kind;
        switch (c) {
            case '+': kind = Token::Kind::Plus; break;
            case '-': kind = Token::Kind::Minus; break;
            case '*': kind = Token::Kind::Star; break;
            case '/': kind = Token::Kind::Slash; break;
            case '^': kind = Token::Kind::Caret; break;
            case '(': kind = Token::Kind::LParen; break;
            case ')': kind = Token::Kind::RParen; break;
            default:
                throw ParseError(std::string("unexpected character '") + c + "'", i);
        }
        tokens.push_back({kind, start, start + 1, 0.0, {}});
        ++i;
    }
    tokens.push_back({Token::Kind::End, n, n, 0.0, {}});
    return tokens;
}

// --------------------------------------------------------------- parser --

class Parser {
public:
    explicit Parser(const std::string& src) : src_(src), tokens_(lex(src)) {}

    std::unique_ptr<Node> parse() {
        auto node = expression();
        const Token& t = peek();
        if (t.kind != Token::Kind::End)
            throw ParseError("unexpected '" + token_text(t) + "'; expected an operator or end of input",
                             t.begin);
        return node;
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    const Token& advance() { return tokens_[pos_++]; }

    std::string token_text(const Token& t) const {
        if (t.kind == Token::Kind::End) return "end of input";
        return src_.substr(t.begin, t.end - t.begin);
    }

    static std::unique_ptr<Node> make(Node::Kind kind, std::size_t begin, std::size_t end) {
        auto n = std::make_unique<Node>();
        n->kind = kind;
        n->begin = begin;
        n->end = end;
        return n;
    }

    std::unique_ptr<Node> expression() {
        auto lhs = term();
        while (peek().kind == Token::Kind::Plus || peek().kind == Token::Kind::Minus) {
            const BinOp op = advance().kind == Token::Kind::Plus ? BinOp::Add : BinOp::Sub;
            auto rhs = term();
            lhs = binary(op, std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    std::unique_ptr<Node> term() {
        auto lhs = power();
        while (peek().kind == Token::Kind::Star || peek().kind == Token::Kind::Slash) {
            const BinOp op = advance().kind == Token::Kind::Star ? BinOp::Mul : BinOp::Div;
            auto rhs = power();
            lhs = binary(op, std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    std::unique_ptr<Node> power() {
        auto base = unary();
        if (peek().kind == Token::Kind::Caret) {
            advance();
            auto exponent = power();  // right associative
            return binary(BinOp::Pow, std::move(base), std::move(exponent));
        }
        return base;
    }

    std::unique_ptr<Node> unary() {
        if (peek().kind == Token::Kind::Minus) {
            const Token& minus = advance();
            auto operand = unary();
            auto n = make(Node::Kind::Unary, minus.begin, operand->end);
            n->has_var = operand->has_var;
            n->lhs = std::move(operand);
            return n;
        }
        return primary();
    }

    std::unique_ptr<Node> primary() {
        const Token& t = peek();
        switch (t.kind) {
            case Token::Kind::Number: {
                advance();
                auto n = make(Node::Kind::Number, t.begin, t.end);
                n->number = t.value;
                return n;
            }
            case Token::Kind::Ident:
                return identifier();
            case Token::Kind::LParen: {
                advance();
                auto inner = expression();
                const Token& close = peek();
                if (close.kind != Token::Kind::RParen)
                    throw ParseError("expected ')' to close '(' at position " +
                                         std::to_string(t.begin),
                                     close.begin);
                advance();
                // keep the grouped span so diagnostics show the parentheses
                inner->begin = t.begin;
                inner->end = close.end;
                return inner;
            }
            default:
                throw ParseError("unexpected '" + token_text(t) +
                                     "'; expected a number, 'x', a function name, '(' or '-'",
                                 t.begin);
        }
    }

    std::unique_ptr<Node> identifier() {
        const Token& t = advance();
        const std::string& name = t.text;
        if (name == "x") {
            auto n = make(Node::Kind::Variable, t.begin, t.end);
            n->has_var = true;
            return n;
        }
        if (name == "pi" || name == "e") {
            auto n = make(Node::Kind::Constant, t.begin, t.end);
            n->cname = name == "pi" ? ConstName::Pi : ConstName::E;
            return n;
        }
        FuncName func;
        if (name == "sin") func = FuncName::Sin;
        else if (name == "cos") func = FuncName::Cos;
        else if (name == "exp") func = FuncName::Exp;
        else if (name == "log") func = FuncName::Log;
        else if (name == "sqrt") func = FuncName::Sqrt;
        else throw ParseError("unknown identifier '" + name + "'", t.begin);

        const Token& open = peek();
        if (open.kind != Token::Kind::LParen)
            throw ParseError("expected '(' after function name '" + name + "'", open.begin);
        advance();
        auto arg = expression();
        const Token& close = peek();
        if (close.kind != Token::Kind::RParen)
            throw ParseError("expected ')' to close call to '" + name + "'", close.begin);
        advance();
        auto n = make(Node::Kind::Call, t.begin, close.end);
        n->func = func;
        n->has_var = arg->has_var;
        n->lhs = std::move(arg);
        return n;
    }

    std::unique_ptr<Node> binary(BinOp op, std::unique_ptr<Node> lhs,
                                 std::unique_ptr<Node> rhs) {
        auto n = make(Node::Kind::Binary, lhs->begin, rhs->end);
        n->op = op;
        n->has_var = lhs->has_var || rhs->has_var;
        n->lhs = std::move(lhs);
        n->rhs = std::move(rhs);
        return n;
    }

    const std::string& src_;
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

// ------------------------------------------------------------ evaluator --

inline double value_of(double v) { return v; }
inline double value_of(const Jet4& j) { return j.v0; }

template <class T>
inline constexpr bool is_jet_v = false;
template <>
inline constexpr bool is_jet_v<Jet4> = true;

// Integer power by square-and-multiply, n >= 1. Both scalar types run the
// identical multiplication tree, keeping the jet value entry bit-identical
// to the plain double result.
template <class T>
T ipow(const T& base, unsigned long long n) {
    int top = 63;
    while (top > 0 && !((n >> top) & 1ULL)) --top;
    T r = base;
    for (int i = top - 1; i >= 0; --i) {
        r = r * r;
        if ((n >> i) & 1ULL) r = r * base;
    }
    return r;
}

template <class T>
class Evaluator {
public:
    Evaluator(const std::string& src, double x_point) : src_(src), x_point_(x_point) {}

    T eval(const Node& n, const T& x) const {
        using std::cos;
        using std::exp;
        using std::log;
        using std::sin;
        using std::sqrt;
        switch (n.kind) {
            case Node::Kind::Number: return T(n.number);
            case Node::Kind::Constant:
                return T(n.cname == ConstName::Pi ? std::numbers::pi : std::numbers::e);
            case Node::Kind::Variable: return x;
            case Node::Kind::Unary: return -eval(*n.lhs, x);
            case Node::Kind::Binary: {
                if (n.op == BinOp::Pow) return eval_pow(n, x);
                T lhs = eval(*n.lhs, x);
                T rhs = eval(*n.rhs, x);
                switch (n.op) {
                    case BinOp::Add: return lhs + rhs;
                    case BinOp::Sub: return lhs - rhs;
                    case BinOp::Mul: return lhs * rhs;
                    default:
                        if (value_of(rhs) == 0.0) throw domain("division by zero", *n.rhs);
                        return lhs / rhs;
                }
            }
            case Node::Kind::Call:
            default: {
                T arg = eval(*n.lhs, x);
                const double v = value_of(arg);
                switch (n.func) {
                    case FuncName::Sin: return sin(arg);
                    case FuncName::Cos: return cos(arg);
                    case FuncName::Exp: return exp(arg);
                    case FuncName::Log:
                        if (v <= 0.0) throw domain("log of non-positive argument", n);
                        return log(arg);
                    case FuncName::Sqrt:
                    default:
                        if (v < 0.0) throw domain("sqrt of negative argument", n);
                        if (v == 0.0 && is_jet_v<T>)
                            throw domain("sqrt at zero has unbounded derivatives", n);
                        return sqrt(arg);
                }
            }
        }
    }

private:
    T eval_pow(const Node& n, const T& x) const {
        using std::exp;
        using std::log;
        T base = eval(*n.lhs, x);
        T expo = eval(*n.rhs, x);
        const double ev = value_of(expo);
        // Structurally constant integer exponents take the repeated-squaring
        // path, which is defined for any base (so x^4 works on negative x).
        if (!n.rhs->has_var && std::isfinite(ev) && std::floor(ev) == ev &&
            std::abs(ev) <= 1e9) {
            const long long k = static_cast<long long>(ev);
            if (k == 0) return T(1.0);  // 0^0 == 1 by convention
            if (k > 0) return ipow(base, static_cast<unsigned long long>(k));
            if (value_of(base) == 0.0) throw domain("zero base with negative exponent", n);
            return T(1.0) / ipow(base, static_cast<unsigned long long>(-k));
        }
        const double bv = value_of(base);
        if (bv < 0.0) throw domain("negative base with non-integer exponent", n);
        if (bv == 0.0) throw domain("zero base with non-integer exponent", n);
        T lg = log(base);
        return exp(expo * lg);
    }

    DomainError domain(const std::string& what, const Node& n) const {
        return DomainError(what + " (x = " + format_shortest(x_point_) + ")",
                           src_.substr(n.begin, n.end - n.begin));
    }

    const std::string& src_;
    double x_point_;
};

} // namespace detail

inline Expr parse(const std::string& text) {
    bool blank = true;
    for (char c : text)
        if (c != ' ' && c != '\t' && c != '\n' && c != '\r') blank = false;
    if (blank) throw ParseError("empty expression", 0);
    detail::Parser parser(text);
    std::shared_ptr<const Node> root(parser.parse().release());
    return Expr(std::move(root), std::make_shared<const std::string>(text));
}

// Plain evaluation at x.
inline double eval(const Expr& e, double x) {
    return detail::Evaluator<double>(e.source(), x).eval(e.root(), x);
}

// Value and derivatives 1..4 at x. The value entry is bit-identical to
// eval(e, x); x must be interior to the domain (sqrt/log arguments strictly
// positive where reached).
inline Jet4 eval_jet4(const Expr& e, double x) {
    return detail::Evaluator<Jet4>(e.source(), x).eval(e.root(), Jet4::variable(x));
}

// ------------------------------------------------------- pretty printer --

namespace detail {

enum class PrintSlot { Top, TermRight, FactorLeft, FactorRight, PowLeft, PowRight, UnaryChild };

inline bool needs_parens(const Node& child, PrintSlot slot) {
    switch (child.kind) {
        case Node::Kind::Number:
        case Node::Kind::Variable:
        case Node::Kind::Constant:
        case Node::Kind::Call:
        case Node::Kind::Unary:
            return false;
        case Node::Kind::Binary:
        default:
            if (child.op == BinOp::Pow)
                return slot == PrintSlot::PowLeft || slot == PrintSlot::UnaryChild;
            if (child.op == BinOp::Mul || child.op == BinOp::Div)
                return slot == PrintSlot::FactorRight || slot == PrintSlot::PowLeft ||
                       slot == PrintSlot::PowRight || slot == PrintSlot::UnaryChild;
            // Add / Sub
            return slot != PrintSlot::Top;
    }
}

inline void print_node(const Node& n, std::string& out, PrintSlot slot) {
    const bool parens = needs_parens(n, slot);
    if (parens) out += '(';
    switch (n.kind) {
        case Node::Kind::Number: out += format_shortest(n.number); break;
        case Node::Kind::Variable: out += 'x'; break;
        case Node::Kind::Constant: out += n.cname == ConstName::Pi ? "pi" : "e"; break;
        case Node::Kind::Unary:
            out += '-';
            print_node(*n.lhs, out, PrintSlot::UnaryChild);
            break;
        case Node::Kind::Call: {
            switch (n.func) {
                case FuncName::Sin: out += "sin"; break;
                case FuncName::Cos: out += "cos"; break;
                case FuncName::Exp: out += "exp"; break;
                case FuncName::Log: out += "log"; break;
                case FuncName::Sqrt: out += "sqrt"; break;
            }
            out += '(';
            print_node(*n.lhs, out, PrintSlot::Top);
            out += ')';
            break;
        }
        case Node::Kind::Binary:
        default: {
            switch (n.op) {
                case BinOp::Add:
                    print_node(*n.lhs, out, PrintSlot::Top);
                    out += '+';
                    print_node(*n.rhs, out, PrintSlot::TermRight);
                    break;
                case BinOp::Sub:
                    print_node(*n.lhs, out, PrintSlot::Top);
                    out += '-';
                    print_node(*n.rhs, out, PrintSlot::TermRight);
                    break;
                case BinOp::Mul:
                    print_node(*n.lhs, out, PrintSlot::FactorLeft);
                    out += '*';
                    print_node(*n.rhs, out, PrintSlot::FactorRight);
                    break;
                case BinOp::Div:
                    print_node(*n.lhs, out, PrintSlot::FactorLeft);
                    out += '/';
                    print_node(*n.rhs, out, PrintSlot::FactorRight);
                    break;
                case BinOp::Pow:
                    print_node(*n.lhs, out, PrintSlot::PowLeft);
                    out += '^';
                    print_node(*n.rhs, out, PrintSlot::PowRight);
                    break;
            }
            break;
        }
    }
    if (parens) out += ')';
}

} // namespace detail

inline std::string to_string(const Expr& e) {
    std::string out;
    detail::print_node(e.root(), out, detail::PrintSlot::Top);
    return out;
}

inline bool structurally_equal(const Node& a, const Node& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Node::Kind::Number: return a.number == b.number;
        case Node::Kind::Variable: return true;
        case Node::Kind::Constant: return a.cname == b.cname;
        case Node::Kind::Unary: return structurally_equal(*a.lhs, *b.lhs);
        case Node::Kind::Call:
            return a.func == b.func && structurally_equal(*a.lhs, *b.lhs);
        case Node::Kind::Binary:
        default:
            return a.op == b.op && structurally_equal(*a.lhs, *b.lhs) &&
                   structurally_equal(*a.rhs, *b.rhs);
    }
}

inline bool structurally_equal(const Expr& a, const Expr& b) {
    return structurally_equal(a.root(), b.root());
}

// --------------------------------------------- polynomial recognition --

namespace detail {

constexpr int kMaxRecognizedDegree = 60;

inline std::optional<Polynomial<double>> node_to_polynomial(const std::string& src,
                                                            const Node& n) {
    using P = Polynomial<double>;
    switch (n.kind) {
        case Node::Kind::Number: return P::constant(n.number);
        case Node::Kind::Constant:
            return P::constant(n.cname == ConstName::Pi ? std::numbers::pi : std::numbers::e);
        case Node::Kind::Variable: return P::variable();
        case Node::Kind::Unary: {
            auto sub = node_to_polynomial(src, *n.lhs);
            if (!sub) return std::nullopt;
            return -*sub;
        }
        case Node::Kind::Call: return std::nullopt;
        case Node::Kind::Binary:
        default: {
            if (n.op == BinOp::Pow) {
                auto base = node_to_polynomial(src, *n.lhs);
                if (!base || n.rhs->has_var) return std::nullopt;
                double ev;
                try {
                    ev = Evaluator<double>(src, 0.0).eval(*n.rhs, 0.0);
                } catch (const DomainError&) {
                    return std::nullopt;
                }
                if (std::floor(ev) != ev || ev < 0 || ev > kMaxRecognizedDegree)
                    return std::nullopt;
                const int k = static_cast<int>(ev);
                if (base->degree() * k > kMaxRecognizedDegree) return std::nullopt;
                P acc = P::constant(1.0);
                for (int i = 0; i < k; ++i) acc = acc * *base;
                return acc;
            }
            auto lhs = node_to_polynomial(src, *n.lhs);
            if (!lhs) return std::nullopt;
            if (n.op == BinOp::Div) {
                // divisor must be a nonzero constant
                if (n.rhs->has_var) return std::nullopt;
                auto rhs = node_to_polynomial(src, *n.rhs);
                if (!rhs || rhs->degree() != 0 || rhs->coefficient(0) == 0.0)
                    return std::nullopt;
                return *lhs * (1.0 / rhs->coefficient(0));
            }
            auto rhs = node_to_polynomial(src, *n.rhs);
            if (!rhs) return std::nullopt;
            switch (n.op) {
                case BinOp::Add: return *lhs + *rhs;
                case BinOp::Sub: return *lhs - *rhs;
                case BinOp::Mul:
                default:
                    if (lhs->degree() + rhs->degree() > kMaxRecognizedDegree)
                        return std::nullopt;
                    return *lhs * *rhs;
            }
        }
    }
}

} // namespace detail

// Recognize an expression that is (syntactically) a polynomial in x:
// literals, pi, e, x, +, -, *, ^ with constant non-negative integer
// exponents, and division by a nonzero constant. Returns its coefficients,
// or nullopt when the expression is not of that shape.
inline std::optional<Polynomial<double>> to_polynomial(const Expr& e) {
    return detail::node_to_polynomial(e.source(), e.root());
}

} // namespace simpcert
