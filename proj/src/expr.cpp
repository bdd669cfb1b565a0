#include "sislab/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "sislab/errors.hpp"

namespace sislab {

namespace {

struct Token {
    enum class Kind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };
    Kind kind;
    double number = 0.0;
    std::string ident;
    std::size_t pos = 0;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    Token next() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        Token t;
        t.pos = pos_;
        if (pos_ >= text_.size()) {
            t.kind = Token::Kind::End;
            return t;
        }
        char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = text_.c_str() + pos_;
            char* end = nullptr;
            t.number = std::strtod(begin, &end);
            if (end == begin)
                fail("malformed number", pos_);
            pos_ += static_cast<std::size_t>(end - begin);
            t.kind = Token::Kind::Number;
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            t.kind = Token::Kind::Ident;
            t.ident = text_.substr(start, pos_ - start);
            return t;
        }
        ++pos_;
        switch (c) {
        case '+': t.kind = Token::Kind::Plus; return t;
        case '-': t.kind = Token::Kind::Minus; return t;
        case '*': t.kind = Token::Kind::Star; return t;
        case '/': t.kind = Token::Kind::Slash; return t;
        case '^': t.kind = Token::Kind::Caret; return t;
        case '(': t.kind = Token::Kind::LParen; return t;
        case ')': t.kind = Token::Kind::RParen; return t;
        case ',': t.kind = Token::Kind::Comma; return t;
        default:
            fail(std::string("unexpected character '") + c + "'", pos_ - 1);
        }
        return t; // unreachable
    }

    [[noreturn]] void fail(const std::string& what, std::size_t pos) const {
        throw ValidationError("expression error at position " + std::to_string(pos) + ": " + what +
                              " in \"" + text_ + "\"");
    }

private:
    const std::string& text_;
    std::size_t pos_ = 0;
};

} // namespace

class ExprParser {
public:
    ExprParser(Expression& out, const std::string& text) : out_(out), lexer_(text), text_(text) {
        advance();
    }

    void run() {
        out_.root_ = parse_sum();
        if (cur_.kind != Token::Kind::End)
            lexer_.fail("trailing input", cur_.pos);
    }

private:
    void advance() { cur_ = lexer_.next(); }

    bool accept(Token::Kind k) {
        if (cur_.kind != k)
            return false;
        advance();
        return true;
    }

    void expect(Token::Kind k, const char* what) {
        if (!accept(k))
            lexer_.fail(std::string("expected ") + what, cur_.pos);
    }

    int make(Expression::Op op, double value = 0.0, int a = -1, int b = -1) {
        out_.nodes_.push_back({op, value, a, b});
        return static_cast<int>(out_.nodes_.size()) - 1;
    }

    int parse_sum() {
        int lhs = parse_product();
        for (;;) {
            if (accept(Token::Kind::Plus))
                lhs = make(Expression::Op::Add, 0.0, lhs, parse_product());
            else if (accept(Token::Kind::Minus))
                lhs = make(Expression::Op::Sub, 0.0, lhs, parse_product());
            else
                return lhs;
        }
    }

    int parse_product() {
        int lhs = parse_unary();
        for (;;) {
            if (accept(Token::Kind::Star))
                lhs = make(Expression::Op::Mul, 0.0, lhs, parse_unary());
            else if (accept(Token::Kind::Slash))
                lhs = make(Expression::Op::Div, 0.0, lhs, parse_unary());
            else
                return lhs;
        }
    }

    int parse_unary() {
        if (accept(Token::Kind::Minus))
            return make(Expression::Op::Neg, 0.0, parse_unary());
        if (accept(Token::Kind::Plus))
            return parse_unary();
        return parse_power();
    }

    // Right-associative, binds tighter than unary minus on the left
    // (so -x^2 is -(x^2)) but the exponent may itself be signed.
    int parse_power() {
        int base = parse_primary();
        if (accept(Token::Kind::Caret))
            return make(Expression::Op::Pow, 0.0, base, parse_unary());
        return base;
    }

    int parse_primary() {
        if (cur_.kind == Token::Kind::Number) {
            double v = cur_.number;
            advance();
            return make(Expression::Op::Const, v);
        }
        if (cur_.kind == Token::Kind::Ident) {
            std::string name = cur_.ident;
            std::size_t pos = cur_.pos;
            advance();
            if (name == "x")
                return make(Expression::Op::Var);
            if (name == "pi")
                return make(Expression::Op::Const, 3.14159265358979323846);
            if (name == "e")
                return make(Expression::Op::Const, 2.71828182845904523536);
            // function call
            expect(Token::Kind::LParen, "'(' after function name");
            int a = parse_sum();
            if (name == "min" || name == "max" || name == "pow") {
                expect(Token::Kind::Comma, "',' between arguments");
                int b = parse_sum();
                expect(Token::Kind::RParen, "')'");
                if (name == "min") return make(Expression::Op::Min, 0.0, a, b);
                if (name == "max") return make(Expression::Op::Max, 0.0, a, b);
                return make(Expression::Op::Pow, 0.0, a, b);
            }
            expect(Token::Kind::RParen, "')'");
            if (name == "sin") return make(Expression::Op::Sin, 0.0, a);
            if (name == "cos") return make(Expression::Op::Cos, 0.0, a);
            if (name == "tan") return make(Expression::Op::Tan, 0.0, a);
            if (name == "exp") return make(Expression::Op::Exp, 0.0, a);
            if (name == "log") return make(Expression::Op::Log, 0.0, a);
            if (name == "sqrt") return make(Expression::Op::Sqrt, 0.0, a);
            if (name == "abs") return make(Expression::Op::Abs, 0.0, a);
            lexer_.fail("unknown function '" + name + "'", pos);
        }
        if (accept(Token::Kind::LParen)) {
            int inner = parse_sum();
            expect(Token::Kind::RParen, "')'");
            return inner;
        }
        lexer_.fail("expected a value", cur_.pos);
        return -1; // unreachable
    }

    Expression& out_;
    Lexer lexer_;
    const std::string& text_;
    Token cur_;
};

Expression Expression::parse(const std::string& text) {
    Expression e;
    e.text_ = text;
    ExprParser parser(e, e.text_);
    parser.run();
    return e;
}

double Expression::eval_node(int idx, double x) const {
    const Node& n = nodes_[static_cast<std::size_t>(idx)];
    switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var:   return x;
    case Op::Add:   return eval_node(n.a, x) + eval_node(n.b, x);
    case Op::Sub:   return eval_node(n.a, x) - eval_node(n.b, x);
    case Op::Mul:   return eval_node(n.a, x) * eval_node(n.b, x);
    case Op::Div:   return eval_node(n.a, x) / eval_node(n.b, x);
    case Op::Pow:   return std::pow(eval_node(n.a, x), eval_node(n.b, x));
    case Op::Neg:   return -eval_node(n.a, x);
    case Op::Sin:   return std::sin(eval_node(n.a, x));
    case Op::Cos:   return std::cos(eval_node(n.a, x));
    case Op::Tan:   return std::tan(eval_node(n.a, x));
    case Op::Exp:   return std::exp(eval_node(n.a, x));
    case Op::Log:   return std::log(eval_node(n.a, x));
    case Op::Sqrt:  return std::sqrt(eval_node(n.a, x));
    case Op::Abs:   return std::abs(eval_node(n.a, x));
    case Op::Min:   return std::min(eval_node(n.a, x), eval_node(n.b, x));
    case Op::Max:   return std::max(eval_node(n.a, x), eval_node(n.b, x));
    }
    throw SolverError("corrupt expression tree");
}

double Expression::eval(double x) const {
    if (root_ < 0)
        throw ValidationError("empty expression");
    return eval_node(root_, x);
}

} // namespace sislab
