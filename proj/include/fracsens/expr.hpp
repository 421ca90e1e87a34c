#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fracsens::expr {

enum class Kind { Constant, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };

// `sign` is not user-facing in spirit but must parse so that printed
// derivatives of abs(...) round-trip.
enum class Func { Sin, Cos, Exp, Log, Pow, Sqrt, Abs, Sign };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    Kind kind;
    double value = 0.0;  // Constant
    int var = -1;        // Variable index into the declared list
    Func func = Func::Sin;
    std::vector<NodePtr> args;
};

// Warnings raised during evaluation (currently only abs differentiated at 0).
struct EvalDiagnostics {
    std::size_t abs_subgradient_hits = 0;
};

// Immutable parsed expression with its declared variable list.
class Ast {
public:
    Ast() = default;
    Ast(NodePtr root, std::shared_ptr<const std::vector<std::string>> vars)
        : root_(std::move(root)), vars_(std::move(vars)) {}

    const Node& root() const { return *root_; }
    const NodePtr& root_ptr() const { return root_; }
    const std::vector<std::string>& variables() const { return *vars_; }
    bool empty() const { return !root_; }

    bool is_constant() const { return root_ && root_->kind == Kind::Constant; }

private:
    NodePtr root_;
    std::shared_ptr<const std::vector<std::string>> vars_;
};

Ast parse(std::string_view src, const std::vector<std::string>& vars);

Ast differentiate(const Ast& ast, std::string_view var);

// Positional bindings follow the declared variable order.
double evaluate(const Ast& ast, std::span<const double> bindings, EvalDiagnostics* diag = nullptr);
double evaluate(const Ast& ast, const std::map<std::string, double>& bindings,
                EvalDiagnostics* diag = nullptr);

// Fully parenthesized, 17 significant digits; parse(to_string(a)) reproduces a.
std::string to_string(const Ast& ast);

}  // namespace fracsens::expr
