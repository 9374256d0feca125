#pragma once

// Small arithmetic language for user-defined eigenvalue formulas lambda(d, j).
//
// Grammar:
//   expr    := term (('+'|'-') term)*
//   term    := factor (('*'|'/') factor)*
//   factor  := unary ('^' factor)?
//   unary   := '-' unary | primary
//   primary := NUMBER | 'd' | 'j' | IDENT '(' expr (',' expr)* ')' | '(' expr ')'
//
// Functions: exp, ln, sqrt (one argument); pow, max, min (two arguments).

#include "tract/result.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace tract::expr {

enum class Variable { D, J };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class Function { Exp, Ln, Sqrt, Pow, Max, Min };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    enum class Kind { Number, Var, Neg, Binary, Call };

    Kind kind;
    double number = 0.0;
    Variable var = Variable::D;
    BinaryOp op = BinaryOp::Add;
    Function fn = Function::Exp;
    std::vector<NodePtr> children;
};

// Immutable parsed tree; cheap to copy and safe to share across threads.
class Expr {
public:
    Expr() = default;
    explicit Expr(NodePtr root) : root_(std::move(root)) {}

    const Node* root() const { return root_.get(); }
    bool empty() const { return root_ == nullptr; }

    bool uses(Variable v) const;

    friend bool operator==(const Expr& a, const Expr& b);

private:
    NodePtr root_;
};

Result<Expr> parse(std::string_view source);

// Fully parenthesized rendering; parse(print(e)) is structurally equal to e.
std::string print(const Expr& e);

// Never yields NaN: domain violations come back as EvalDomain.
Result<double> eval(const Expr& e, double d, double j);

int arity(Function fn);
const char* name(Function fn);

}  // namespace tract::expr
