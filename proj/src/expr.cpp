#include "fracsens/expr.hpp"

#include "fracsens/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>

namespace fracsens::expr {

namespace {

struct FuncInfo {
    std::string_view name;
    Func func;
    int arity;
};

constexpr FuncInfo kFunctions[] = {
    {"sin", Func::Sin, 1},   {"cos", Func::Cos, 1},   {"exp", Func::Exp, 1},
    {"log", Func::Log, 1},   {"pow", Func::Pow, 2},   {"sqrt", Func::Sqrt, 1},
    {"abs", Func::Abs, 1},   {"sign", Func::Sign, 1},
};

std::string_view func_name(Func f) {
    for (const auto& info : kFunctions)
        if (info.func == f) return info.name;
    return "?";
}

NodePtr make_const(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Constant;
    n->value = v;
    return n;
}

NodePtr make_var(int index) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Variable;
    n->var = index;
    return n;
}

bool is_const(const NodePtr& n, double v) { return n->kind == Kind::Constant && n->value == v; }
bool is_const(const NodePtr& n) { return n->kind == Kind::Constant; }

std::optional<double> apply_func(Func f, double a, double b) {
    switch (f) {
        case Func::Sin: return std::sin(a);
        case Func::Cos: return std::cos(a);
        case Func::Exp: return std::exp(a);
        case Func::Log:
            if (!(a > 0.0)) return std::nullopt;
            return std::log(a);
        case Func::Pow: return std::pow(a, b);
        case Func::Sqrt:
            if (!(a >= 0.0)) return std::nullopt;
            return std::sqrt(a);
        case Func::Abs: return std::abs(a);
        case Func::Sign: return a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0);
    }
    return std::nullopt;
}

std::optional<double> fold_value(Kind k, double a, double b) {
    double r = 0.0;
    switch (k) {
        case Kind::Negate: r = -a; break;
        case Kind::Add: r = a + b; break;
        case Kind::Sub: r = a - b; break;
        case Kind::Mul: r = a * b; break;
        case Kind::Div:
            if (b == 0.0) return std::nullopt;
            r = a / b;
            break;
        case Kind::Pow: r = std::pow(a, b); break;
        default: return std::nullopt;
    }
    if (!std::isfinite(r)) return std::nullopt;
    return r;
}

NodePtr make_unary_minus(NodePtr a) {
    if (is_const(a)) return make_const(-a->value);
    if (a->kind == Kind::Negate) return a->args[0];
    auto n = std::make_shared<Node>();
    n->kind = Kind::Negate;
    n->args = {std::move(a)};
    return n;
}

// Builds a binary node with constant folding and the 0/1 identities.
NodePtr make_binary(Kind k, NodePtr a, NodePtr b) {
    if (is_const(a) && is_const(b))
        if (auto v = fold_value(k, a->value, b->value)) return make_const(*v);
    switch (k) {
        case Kind::Add:
            if (is_const(a, 0.0)) return b;
            if (is_const(b, 0.0)) return a;
            break;
        case Kind::Sub:
            if (is_const(b, 0.0)) return a;
            if (is_const(a, 0.0)) return make_unary_minus(b);
            break;
        case Kind::Mul:
            if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
            if (is_const(a, 1.0)) return b;
            if (is_const(b, 1.0)) return a;
            if (is_const(a, -1.0)) return make_unary_minus(b);
            if (is_const(b, -1.0)) return make_unary_minus(a);
            break;
        case Kind::Div:
            if (is_const(b, 1.0)) return a;
            if (is_const(a, 0.0) && is_const(b) && b->value != 0.0) return make_const(0.0);
            break;
        case Kind::Pow:
            if (is_const(b, 1.0)) return a;
            if (is_const(b, 0.0)) return make_const(1.0);
            break;
        default: break;
    }
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->args = {std::move(a), std::move(b)};
    return n;
}

NodePtr make_call(Func f, std::vector<NodePtr> args) {
    bool all_const = true;
    for (const auto& a : args) all_const = all_const && is_const(a);
    if (all_const) {
        const double a0 = args[0]->value;
        const double a1 = args.size() > 1 ? args[1]->value : 0.0;
        if (auto v = apply_func(f, a0, a1); v && std::isfinite(*v)) return make_const(*v);
    }
    auto n = std::make_shared<Node>();
    n->kind = Kind::Call;
    n->func = f;
    n->args = std::move(args);
    return n;
}

class Parser {
public:
    Parser(std::string_view src, const std::vector<std::string>& vars) : src_(src), vars_(vars) {}

    NodePtr run() {
        skip_ws();
        if (pos_ >= src_.size()) throw SyntaxError("empty expression", pos_);
        NodePtr n = parse_sum();
        skip_ws();
        if (pos_ < src_.size())
            throw SyntaxError(std::string("unexpected character '") + src_[pos_] + "'", pos_);
        return n;
    }

private:
    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) throw SyntaxError(std::string("expected '") + c + "'", pos_);
    }

    NodePtr parse_sum() {
        NodePtr lhs = parse_product();
        for (;;) {
            if (accept('+'))
                lhs = make_binary(Kind::Add, lhs, parse_product());
            else if (accept('-'))
                lhs = make_binary(Kind::Sub, lhs, parse_product());
            else
                return lhs;
        }
    }

    NodePtr parse_product() {
        NodePtr lhs = parse_power();
        for (;;) {
            if (accept('*'))
                lhs = make_binary(Kind::Mul, lhs, parse_power());
            else if (accept('/'))
                lhs = make_binary(Kind::Div, lhs, parse_power());
            else
                return lhs;
        }
    }

    // right associative; the base is a unary so that -x^2 == (-x)^2
    NodePtr parse_power() {
        NodePtr base = parse_unary();
        if (accept('^')) return make_binary(Kind::Pow, base, parse_power());
        return base;
    }

    NodePtr parse_unary() {
        if (accept('-')) return make_unary_minus(parse_unary());
        if (accept('+')) return parse_unary();
        return parse_primary();
    }

    NodePtr parse_primary() {
        skip_ws();
        if (pos_ >= src_.size()) throw SyntaxError("unexpected end of input", pos_);
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr inner = parse_sum();
            expect(')');
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        throw SyntaxError(std::string("unexpected character '") + c + "'", pos_);
    }

    NodePtr parse_number() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
            ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
            if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
                pos_ = p;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            }
        }
        const std::string text(src_.substr(start, pos_ - start));
        char* end = nullptr;
        const double v = std::strtod(text.c_str(), &end);
        if (end != text.c_str() + text.size() || text == ".")
            throw SyntaxError("malformed number '" + text + "'", start);
        return make_const(v);
    }

    NodePtr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string_view name = src_.substr(start, pos_ - start);
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (vars_[i] == name) return make_var(static_cast<int>(i));
        for (const auto& info : kFunctions) {
            if (info.name != name) continue;
            expect('(');
            std::vector<NodePtr> args{parse_sum()};
            while (accept(',')) args.push_back(parse_sum());
            const std::size_t close = pos_;
            expect(')');
            if (static_cast<int>(args.size()) != info.arity)
                throw SyntaxError(std::string(name) + " expects " + std::to_string(info.arity) +
                                      " argument(s)",
                                  close);
            return make_call(info.func, std::move(args));
        }
        throw UnknownIdentifier("unknown identifier '" + std::string(name) + "'", start);
    }

    std::string_view src_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;
};

NodePtr derive(const NodePtr& n, int var) {
    const auto& a = n->args;
    switch (n->kind) {
        case Kind::Constant: return make_const(0.0);
        case Kind::Variable: return make_const(n->var == var ? 1.0 : 0.0);
        case Kind::Negate: return make_unary_minus(derive(a[0], var));
        case Kind::Add: return make_binary(Kind::Add, derive(a[0], var), derive(a[1], var));
        case Kind::Sub: return make_binary(Kind::Sub, derive(a[0], var), derive(a[1], var));
        case Kind::Mul:
            return make_binary(Kind::Add, make_binary(Kind::Mul, derive(a[0], var), a[1]),
                               make_binary(Kind::Mul, a[0], derive(a[1], var)));
        case Kind::Div: {
            auto num = make_binary(Kind::Sub, make_binary(Kind::Mul, derive(a[0], var), a[1]),
                                   make_binary(Kind::Mul, a[0], derive(a[1], var)));
            return make_binary(Kind::Div, num, make_binary(Kind::Pow, a[1], make_const(2.0)));
        }
        case Kind::Pow: break;
        case Kind::Call: {
            const auto du = derive(a[0], var);
            switch (n->func) {
                case Func::Sin: return make_binary(Kind::Mul, make_call(Func::Cos, {a[0]}), du);
                case Func::Cos:
                    return make_unary_minus(make_binary(Kind::Mul, make_call(Func::Sin, {a[0]}), du));
                case Func::Exp: return make_binary(Kind::Mul, n, du);
                case Func::Log: return make_binary(Kind::Div, du, a[0]);
                case Func::Sqrt:
                    return make_binary(Kind::Div, du, make_binary(Kind::Mul, make_const(2.0), n));
                case Func::Abs: return make_binary(Kind::Mul, make_call(Func::Sign, {a[0]}), du);
                case Func::Sign: return make_const(0.0);
                case Func::Pow: break;
            }
            break;
        }
    }
    // u^v, either as operator or pow(u, v)
    const NodePtr& u = a[0];
    const NodePtr& v = a[1];
    const auto du = derive(u, var);
    const auto dv = derive(v, var);
    if (is_const(dv, 0.0)) {
        // v u^(v-1) u'
        auto reduced = make_binary(Kind::Pow, u, make_binary(Kind::Sub, v, make_const(1.0)));
        return make_binary(Kind::Mul, make_binary(Kind::Mul, v, reduced), du);
    }
    if (is_const(du, 0.0))
        return make_binary(Kind::Mul, make_binary(Kind::Mul, n, make_call(Func::Log, {u})), dv);
    auto inner = make_binary(Kind::Add, make_binary(Kind::Mul, dv, make_call(Func::Log, {u})),
                             make_binary(Kind::Div, make_binary(Kind::Mul, v, du), u));
    return make_binary(Kind::Mul, n, inner);
}

double eval_node(const Node& n, std::span<const double> b, EvalDiagnostics* diag) {
    switch (n.kind) {
        case Kind::Constant: return n.value;
        case Kind::Variable: return b[static_cast<std::size_t>(n.var)];
        case Kind::Negate: return -eval_node(*n.args[0], b, diag);
        case Kind::Add: return eval_node(*n.args[0], b, diag) + eval_node(*n.args[1], b, diag);
        case Kind::Sub: return eval_node(*n.args[0], b, diag) - eval_node(*n.args[1], b, diag);
        case Kind::Mul: return eval_node(*n.args[0], b, diag) * eval_node(*n.args[1], b, diag);
        case Kind::Div: {
            const double den = eval_node(*n.args[1], b, diag);
            if (den == 0.0) throw DomainError("division by zero");
            return eval_node(*n.args[0], b, diag) / den;
        }
        case Kind::Pow: {
            const double base = eval_node(*n.args[0], b, diag);
            const double ex = eval_node(*n.args[1], b, diag);
            if (base < 0.0 && ex != std::floor(ex))
                throw DomainError("negative base raised to a non-integer power");
            if (base == 0.0 && ex < 0.0) throw DomainError("zero raised to a negative power");
            return std::pow(base, ex);
        }
        case Kind::Call: {
            const double a0 = eval_node(*n.args[0], b, diag);
            double a1 = 0.0;
            if (n.func == Func::Pow) {
                a1 = eval_node(*n.args[1], b, diag);
                if (a0 < 0.0 && a1 != std::floor(a1))
                    throw DomainError("pow: negative base with non-integer exponent");
                if (a0 == 0.0 && a1 < 0.0) throw DomainError("pow: zero raised to a negative power");
            }
            if (n.func == Func::Sign && a0 == 0.0 && diag) ++diag->abs_subgradient_hits;
            auto r = apply_func(n.func, a0, a1);
            if (!r) throw DomainError(std::string(func_name(n.func)) + ": argument out of domain");
            return *r;
        }
    }
    return 0.0;
}

void print_node(const Node& n, const std::vector<std::string>& vars, std::string& out) {
    switch (n.kind) {
        case Kind::Constant: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", n.value);
            if (n.value < 0.0) {
                out += '(';
                out += buf;
                out += ')';
            } else {
                out += buf;
            }
            return;
        }
        case Kind::Variable: out += vars[static_cast<std::size_t>(n.var)]; return;
        case Kind::Negate:
            out += "(-";
            print_node(*n.args[0], vars, out);
            out += ')';
            return;
        case Kind::Call:
            out += func_name(n.func);
            out += '(';
            for (std::size_t i = 0; i < n.args.size(); ++i) {
                if (i) out += ", ";
                print_node(*n.args[i], vars, out);
            }
            out += ')';
            return;
        default: break;
    }
    const char* op = n.kind == Kind::Add   ? " + "
                     : n.kind == Kind::Sub ? " - "
                     : n.kind == Kind::Mul ? "*"
                     : n.kind == Kind::Div ? "/"
                                           : "^";
    out += '(';
    print_node(*n.args[0], vars, out);
    out += op;
    print_node(*n.args[1], vars, out);
    out += ')';
}

}  // namespace

Ast parse(std::string_view src, const std::vector<std::string>& vars) {
    for (const auto& v : vars)
        for (const auto& info : kFunctions)
            if (v == info.name) throw ValidationError("variable name '" + v + "' shadows a function");
    Parser p(src, vars);
    NodePtr root = p.run();
    return Ast(std::move(root), std::make_shared<const std::vector<std::string>>(vars));
}

Ast differentiate(const Ast& ast, std::string_view var) {
    const auto& vars = ast.variables();
    int index = -1;
    for (std::size_t i = 0; i < vars.size(); ++i)
        if (vars[i] == var) index = static_cast<int>(i);
    if (index < 0) throw UnknownIdentifier("unknown variable '" + std::string(var) + "'", 0);
    return Ast(derive(ast.root_ptr(), index),
               std::make_shared<const std::vector<std::string>>(vars));
}

double evaluate(const Ast& ast, std::span<const double> bindings, EvalDiagnostics* diag) {
    if (bindings.size() < ast.variables().size())
        throw ValidationError("evaluate: missing variable bindings");
    const double r = eval_node(ast.root(), bindings, diag);
    if (!std::isfinite(r)) throw DomainError("expression evaluated to a non-finite value");
    return r;
}

double evaluate(const Ast& ast, const std::map<std::string, double>& bindings, EvalDiagnostics* diag) {
    std::vector<double> values;
    values.reserve(ast.variables().size());
    for (const auto& v : ast.variables()) {
        auto it = bindings.find(v);
        if (it == bindings.end()) throw ValidationError("unbound variable '" + v + "'");
        values.push_back(it->second);
    }
    return evaluate(ast, values, diag);
}

std::string to_string(const Ast& ast) {
    std::string out;
    print_node(ast.root(), ast.variables(), out);
    return out;
}

}  // namespace fracsens::expr
