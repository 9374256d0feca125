#include "tract/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace tract::expr {

int arity(Function fn) {
    switch (fn) {
        case Function::Exp:
        case Function::Ln:
        case Function::Sqrt: return 1;
        case Function::Pow:
        case Function::Max:
        case Function::Min: return 2;
    }
    return 0;
}

const char* name(Function fn) {
    switch (fn) {
        case Function::Exp: return "exp";
        case Function::Ln: return "ln";
        case Function::Sqrt: return "sqrt";
        case Function::Pow: return "pow";
        case Function::Max: return "max";
        case Function::Min: return "min";
    }
    return "?";
}

namespace {

bool lookup_function(std::string_view ident, Function& out) {
    static constexpr Function all[] = {Function::Exp, Function::Ln,  Function::Sqrt,
                                       Function::Pow, Function::Max, Function::Min};
    for (Function f : all) {
        if (ident == name(f)) {
            out = f;
            return true;
        }
    }
    return false;
}

bool node_equal(const Node* a, const Node* b) {
    if (a == b) return true;
    if (!a || !b || a->kind != b->kind) return false;
    switch (a->kind) {
        case Node::Kind::Number:
            // Bitwise-identical literals; print() uses 17 digits so values survive.
            return a->number == b->number && std::signbit(a->number) == std::signbit(b->number);
        case Node::Kind::Var: return a->var == b->var;
        case Node::Kind::Neg: break;
        case Node::Kind::Binary:
            if (a->op != b->op) return false;
            break;
        case Node::Kind::Call:
            if (a->fn != b->fn) return false;
            break;
    }
    if (a->children.size() != b->children.size()) return false;
    for (std::size_t i = 0; i < a->children.size(); ++i)
        if (!node_equal(a->children[i].get(), b->children[i].get())) return false;
    return true;
}

bool node_uses(const Node* n, Variable v) {
    if (!n) return false;
    if (n->kind == Node::Kind::Var) return n->var == v;
    for (const auto& c : n->children)
        if (node_uses(c.get(), v)) return true;
    return false;
}

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End, Bad };

struct Token {
    Tok kind;
    std::size_t offset;
    std::string_view text;
    double number = 0.0;
};

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) { advance(); }

    Result<Expr> run() {
        auto e = parse_expr();
        if (!e) return e.error();
        if (tok_.kind != Tok::End)
            return syntax("unexpected trailing input", "'+', '-', '*', '/', '^', end of input");
        return Expr(std::move(*e));
    }

private:
    using R = Result<NodePtr>;

    std::string_view src_;
    std::size_t pos_ = 0;
    Token tok_{Tok::End, 0, {}};

    void advance() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        std::size_t start = pos_;
        if (pos_ >= src_.size()) {
            tok_ = {Tok::End, start, {}};
            return;
        }
        char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t p = pos_;
            while (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) ++p;
            if (p < src_.size() && src_[p] == '.') {
                ++p;
                while (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) ++p;
            }
            if (p < src_.size() && (src_[p] == 'e' || src_[p] == 'E')) {
                std::size_t q = p + 1;
                if (q < src_.size() && (src_[q] == '+' || src_[q] == '-')) ++q;
                if (q < src_.size() && std::isdigit(static_cast<unsigned char>(src_[q]))) {
                    while (q < src_.size() && std::isdigit(static_cast<unsigned char>(src_[q]))) ++q;
                    p = q;
                }
            }
            std::string lit(src_.substr(start, p - start));
            tok_ = {Tok::Number, start, src_.substr(start, p - start), std::strtod(lit.c_str(), nullptr)};
            pos_ = p;
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t p = pos_;
            while (p < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[p])) || src_[p] == '_'))
                ++p;
            tok_ = {Tok::Ident, start, src_.substr(start, p - start)};
            pos_ = p;
            return;
        }
        Tok k = Tok::Bad;
        switch (c) {
            case '+': k = Tok::Plus; break;
            case '-': k = Tok::Minus; break;
            case '*': k = Tok::Star; break;
            case '/': k = Tok::Slash; break;
            case '^': k = Tok::Caret; break;
            case '(': k = Tok::LParen; break;
            case ')': k = Tok::RParen; break;
            case ',': k = Tok::Comma; break;
            default: break;
        }
        tok_ = {k, start, src_.substr(start, 1)};
        ++pos_;
    }

    Error syntax(const std::string& what, const std::string& expected) const {
        Error e = make_error(ErrorKind::SyntaxError, what + "; expected one of: " + expected);
        e.offset = tok_.offset;
        return e;
    }

    static NodePtr make_binary(BinaryOp op, NodePtr l, NodePtr r) {
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::Binary;
        n->op = op;
        n->children = {std::move(l), std::move(r)};
        return n;
    }

    R parse_expr() {
        auto lhs = parse_term();
        if (!lhs) return lhs;
        NodePtr acc = *lhs;
        while (tok_.kind == Tok::Plus || tok_.kind == Tok::Minus) {
            BinaryOp op = tok_.kind == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub;
            advance();
            auto rhs = parse_term();
            if (!rhs) return rhs;
            acc = make_binary(op, acc, *rhs);
        }
        return acc;
    }

    R parse_term() {
        auto lhs = parse_factor();
        if (!lhs) return lhs;
        NodePtr acc = *lhs;
        while (tok_.kind == Tok::Star || tok_.kind == Tok::Slash) {
            BinaryOp op = tok_.kind == Tok::Star ? BinaryOp::Mul : BinaryOp::Div;
            advance();
            auto rhs = parse_factor();
            if (!rhs) return rhs;
            acc = make_binary(op, acc, *rhs);
        }
        return acc;
    }

    R parse_factor() {
        auto base = parse_unary();
        if (!base) return base;
        if (tok_.kind != Tok::Caret) return base;
        advance();
        auto exponent = parse_factor();
        if (!exponent) return exponent;
        return make_binary(BinaryOp::Pow, *base, *exponent);
    }

    R parse_unary() {
        if (tok_.kind == Tok::Minus) {
            advance();
            auto inner = parse_unary();
            if (!inner) return inner;
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Neg;
            n->children = {*inner};
            return NodePtr(n);
        }
        return parse_primary();
    }

    R parse_primary() {
        static const std::string operand_set = "number, 'd', 'j', function name, '(', '-'";
        switch (tok_.kind) {
            case Tok::Number: {
                if (!std::isfinite(tok_.number))
                    return syntax("numeric literal out of range", "finite number");
                auto n = std::make_shared<Node>();
                n->kind = Node::Kind::Number;
                n->number = tok_.number;
                advance();
                return NodePtr(n);
            }
            case Tok::LParen: {
                advance();
                auto inner = parse_expr();
                if (!inner) return inner;
                if (tok_.kind != Tok::RParen) return syntax("unbalanced parenthesis", "')'");
                advance();
                return inner;
            }
            case Tok::Ident: return parse_ident();
            case Tok::End: return syntax("unexpected end of input", operand_set);
            default: return syntax("unexpected token", operand_set);
        }
    }

    R parse_ident() {
        std::string_view ident = tok_.text;
        std::size_t at = tok_.offset;
        if (ident == "d" || ident == "j") {
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Var;
            n->var = ident == "d" ? Variable::D : Variable::J;
            advance();
            return NodePtr(n);
        }
        Function fn;
        if (!lookup_function(ident, fn)) {
            Error e = make_error(ErrorKind::UnknownIdentifier,
                                 "unknown identifier '" + std::string(ident) + "'");
            e.offset = at;
            return e;
        }
        advance();
        if (tok_.kind != Tok::LParen) return syntax("function call requires '('", "'('");
        advance();
        std::vector<NodePtr> args;
        for (;;) {
            auto arg = parse_expr();
            if (!arg) return arg;
            args.push_back(*arg);
            if (tok_.kind == Tok::Comma) {
                advance();
                continue;
            }
            if (tok_.kind == Tok::RParen) break;
            return syntax("unterminated argument list", "',', ')'");
        }
        advance();
        if (static_cast<int>(args.size()) != arity(fn)) {
            Error e = make_error(ErrorKind::ArityError,
                                 std::string(name(fn)) + " expects " + std::to_string(arity(fn)) +
                                     " argument(s), got " + std::to_string(args.size()));
            e.offset = at;
            return e;
        }
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::Call;
        n->fn = fn;
        n->children = std::move(args);
        return NodePtr(n);
    }
};

void print_node(const Node* n, std::string& out) {
    switch (n->kind) {
        case Node::Kind::Number: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", n->number);
            out += buf;
            return;
        }
        case Node::Kind::Var: out += n->var == Variable::D ? "d" : "j"; return;
        case Node::Kind::Neg:
            out += "(-";
            print_node(n->children[0].get(), out);
            out += ")";
            return;
        case Node::Kind::Binary: {
            static constexpr char ops[] = {'+', '-', '*', '/', '^'};
            out += "(";
            print_node(n->children[0].get(), out);
            out += ops[static_cast<int>(n->op)];
            print_node(n->children[1].get(), out);
            out += ")";
            return;
        }
        case Node::Kind::Call:
            out += name(n->fn);
            out += "(";
            for (std::size_t i = 0; i < n->children.size(); ++i) {
                if (i) out += ",";
                print_node(n->children[i].get(), out);
            }
            out += ")";
            return;
    }
}

Error domain(const char* what) { return make_error(ErrorKind::EvalDomain, what); }

Result<double> power(double base, double exponent) {
    if (base == 0.0 && exponent < 0.0) return domain("0 raised to a negative power");
    double v = std::pow(base, exponent);
    if (std::isnan(v)) return domain("negative base raised to a non-integer power");
    return v;
}

Result<double> eval_node(const Node* n, double d, double j) {
    switch (n->kind) {
        case Node::Kind::Number: return n->number;
        case Node::Kind::Var: return n->var == Variable::D ? d : j;
        case Node::Kind::Neg: {
            auto v = eval_node(n->children[0].get(), d, j);
            if (!v) return v;
            return -*v;
        }
        case Node::Kind::Binary: {
            auto a = eval_node(n->children[0].get(), d, j);
            if (!a) return a;
            auto b = eval_node(n->children[1].get(), d, j);
            if (!b) return b;
            double r = 0.0;
            switch (n->op) {
                case BinaryOp::Add: r = *a + *b; break;
                case BinaryOp::Sub: r = *a - *b; break;
                case BinaryOp::Mul: r = *a * *b; break;
                case BinaryOp::Div:
                    if (*b == 0.0) return domain("division by zero");
                    r = *a / *b;
                    break;
                case BinaryOp::Pow: return power(*a, *b);
            }
            if (std::isnan(r)) return domain("undefined arithmetic (inf - inf or 0 * inf)");
            return r;
        }
        case Node::Kind::Call: {
            double args[2] = {0.0, 0.0};
            for (std::size_t i = 0; i < n->children.size(); ++i) {
                auto v = eval_node(n->children[i].get(), d, j);
                if (!v) return v;
                args[i] = *v;
            }
            switch (n->fn) {
                case Function::Exp: return std::exp(args[0]);
                case Function::Ln:
                    if (args[0] <= 0.0) return domain("ln of a non-positive argument");
                    return std::log(args[0]);
                case Function::Sqrt:
                    if (args[0] < 0.0) return domain("sqrt of a negative argument");
                    return std::sqrt(args[0]);
                case Function::Pow: return power(args[0], args[1]);
                case Function::Max: return std::max(args[0], args[1]);
                case Function::Min: return std::min(args[0], args[1]);
            }
        }
    }
    return domain("malformed expression tree");
}

}  // namespace

bool operator==(const Expr& a, const Expr& b) { return node_equal(a.root(), b.root()); }

bool Expr::uses(Variable v) const { return node_uses(root_.get(), v); }

Result<Expr> parse(std::string_view source) { return Parser(source).run(); }

std::string print(const Expr& e) {
    std::string out;
    if (e.root()) print_node(e.root(), out);
    return out;
}

Result<double> eval(const Expr& e, double d, double j) {
    if (e.empty()) return domain("empty expression");
    return eval_node(e.root(), d, j);
}

}  // namespace tract::expr
