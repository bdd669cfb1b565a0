#pragma once

#include <string>
#include <vector>

namespace sislab {

/// Closed-form expression in the spatial variable x, used to define
/// coefficient fields from configuration text.  Supports + - * / ^ with the
/// usual precedence, parentheses, the constants pi and e, the variable x,
/// unary minus, functions sin cos tan exp log sqrt abs, and the two-argument
/// forms min(a,b) max(a,b) pow(a,b).  Parsing failures throw ValidationError
/// with the offending position.
class Expression {
public:
    static Expression parse(const std::string& text);

    double eval(double x) const;
    const std::string& text() const { return text_; }

private:
    enum class Op {
        Const, Var, Add, Sub, Mul, Div, Pow, Neg,
        Sin, Cos, Tan, Exp, Log, Sqrt, Abs, Min, Max
    };
    struct Node {
        Op op;
        double value = 0.0; // Const payload
        int a = -1, b = -1; // child indices
    };

    double eval_node(int idx, double x) const;

    std::string text_;
    std::vector<Node> nodes_;
    int root_ = -1;

    friend class ExprParser;
};

} // namespace sislab
