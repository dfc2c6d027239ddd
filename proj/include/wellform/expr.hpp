// Guard and effect expression language: integer/boolean values, comparisons,
// and/or/not, and +/-/* arithmetic for effect assignments.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace wellform {

using Value = std::variant<std::int64_t, bool>;

struct Env {
    std::map<std::string, Value> bindings;

    bool operator==(const Env&) const = default;
};

std::string to_string(const Value& v);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Op {
        IntLit,
        BoolLit,
        Var,
        Not,
        Neg,
        And,
        Or,
        Lt,
        Le,
        Gt,
        Ge,
        Eq,
        Ne,
        Add,
        Sub,
        Mul,
    };

    Op op = Op::IntLit;
    std::int64_t int_value = 0;
    bool bool_value = false;
    std::string name;
    ExprPtr lhs;
    ExprPtr rhs;
};

struct Assignment {
    std::string variable;
    ExprPtr value;
};

// Error text for the offending construct, or empty on success.
struct ExprError {
    std::string message;
    std::size_t offset = 0;  // byte offset into the expression text
};

template <typename T>
struct ExprResult {
    std::optional<T> value;
    ExprError error;

    bool ok() const { return value.has_value(); }
};

ExprResult<ExprPtr> parse_expression(const std::string& text);

// Parses "x = e" lists separated by ';' (a trailing ';' is allowed).
ExprResult<std::vector<Assignment>> parse_assignments(const std::string& text);

// Evaluation failures (unbound identifier, type mismatch) come back as
// error text; the simulator maps them to GuardError terminations.
ExprResult<Value> eval(const Expr& expr, const Env& env);

void apply_assignments(const std::vector<Assignment>& assignments, Env& env,
                       std::string& error);

}  // namespace wellform
