#include "wellform/expr.hpp"

#include <cctype>

namespace wellform {

std::string to_string(const Value& v) {
    if (std::holds_alternative<bool>(v)) {
        return std::get<bool>(v) ? "true" : "false";
    }
    return std::to_string(std::get<std::int64_t>(v));
}

namespace {

struct ExprLexer {
    const std::string& text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
            pos++;
        }
    }

    bool at_end() {
        skip_ws();
        return pos >= text.size();
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    bool consume(const char* token) {
        skip_ws();
        std::size_t len = std::char_traits<char>::length(token);
        if (text.compare(pos, len, token) == 0) {
            pos += len;
            return true;
        }
        return false;
    }

    std::string word() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
            pos++;
        }
        return text.substr(start, pos - start);
    }
};

ExprPtr make(Expr::Op op, ExprPtr lhs = nullptr, ExprPtr rhs = nullptr) {
    Expr e;
    e.op = op;
    e.lhs = std::move(lhs);
    e.rhs = std::move(rhs);
    return std::make_shared<const Expr>(std::move(e));
}

struct Parser {
    ExprLexer lex;
    ExprError error;

    explicit Parser(const std::string& text) : lex{text} {}

    ExprPtr fail(const std::string& message) {
        if (error.message.empty()) {
            error = {message, lex.pos};
        }
        return nullptr;
    }

    ExprPtr parse_or() {
        ExprPtr left = parse_and();
        if (!left) return nullptr;
        for (;;) {
            std::size_t mark = lex.pos;
            lex.skip_ws();
            if (lex.word() == "or") {
                ExprPtr right = parse_and();
                if (!right) return nullptr;
                left = make(Expr::Op::Or, left, right);
            } else {
                lex.pos = mark;
                return left;
            }
        }
    }

    ExprPtr parse_and() {
        ExprPtr left = parse_not();
        if (!left) return nullptr;
        for (;;) {
            std::size_t mark = lex.pos;
            lex.skip_ws();
            if (lex.word() == "and") {
                ExprPtr right = parse_not();
                if (!right) return nullptr;
                left = make(Expr::Op::And, left, right);
            } else {
                lex.pos = mark;
                return left;
            }
        }
    }

    ExprPtr parse_not() {
        std::size_t mark = lex.pos;
        lex.skip_ws();
        if (lex.word() == "not") {
            ExprPtr inner = parse_not();
            if (!inner) return nullptr;
            return make(Expr::Op::Not, inner);
        }
        lex.pos = mark;
        return parse_comparison();
    }

    ExprPtr parse_comparison() {
        ExprPtr left = parse_additive();
        if (!left) return nullptr;
        Expr::Op op;
        if (lex.consume("<=")) {
            op = Expr::Op::Le;
        } else if (lex.consume(">=")) {
            op = Expr::Op::Ge;
        } else if (lex.consume("==")) {
            op = Expr::Op::Eq;
        } else if (lex.consume("!=")) {
            op = Expr::Op::Ne;
        } else if (lex.consume("<")) {
            op = Expr::Op::Lt;
        } else if (lex.consume(">")) {
            op = Expr::Op::Gt;
        } else {
            return left;
        }
        ExprPtr right = parse_additive();
        if (!right) return nullptr;
        return make(op, left, right);
    }

    ExprPtr parse_additive() {
        ExprPtr left = parse_multiplicative();
        if (!left) return nullptr;
        for (;;) {
            if (lex.consume("+")) {
                ExprPtr right = parse_multiplicative();
                if (!right) return nullptr;
                left = make(Expr::Op::Add, left, right);
            } else if (lex.peek() == '-') {
                lex.consume("-");
                ExprPtr right = parse_multiplicative();
                if (!right) return nullptr;
                left = make(Expr::Op::Sub, left, right);
            } else {
                return left;
            }
        }
    }

    ExprPtr parse_multiplicative() {
        ExprPtr left = parse_unary();
        if (!left) return nullptr;
        while (lex.consume("*")) {
            ExprPtr right = parse_unary();
            if (!right) return nullptr;
            left = make(Expr::Op::Mul, left, right);
        }
        return left;
    }

    ExprPtr parse_unary() {
        if (lex.consume("-")) {
            ExprPtr inner = parse_unary();
            if (!inner) return nullptr;
            return make(Expr::Op::Neg, inner);
        }
        return parse_primary();
    }

    ExprPtr parse_primary() {
        if (lex.consume("(")) {
            ExprPtr inner = parse_or();
            if (!inner) return nullptr;
            if (!lex.consume(")")) return fail("expected ')'");
            return inner;
        }
        char c = lex.peek();
        if (std::isdigit(static_cast<unsigned char>(c))) {
            Expr e;
            e.op = Expr::Op::IntLit;
            while (lex.pos < lex.text.size() &&
                   std::isdigit(static_cast<unsigned char>(lex.text[lex.pos]))) {
                e.int_value = e.int_value * 10 + (lex.text[lex.pos] - '0');
                lex.pos++;
            }
            return std::make_shared<const Expr>(std::move(e));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string name = lex.word();
            Expr e;
            if (name == "true" || name == "false") {
                e.op = Expr::Op::BoolLit;
                e.bool_value = (name == "true");
            } else {
                e.op = Expr::Op::Var;
                e.name = name;
            }
            return std::make_shared<const Expr>(std::move(e));
        }
        return fail(c == '\0' ? "unexpected end of expression"
                              : std::string("unexpected character '") + c + "'");
    }
};

}  // namespace

ExprResult<ExprPtr> parse_expression(const std::string& text) {
    Parser parser(text);
    ExprPtr root = parser.parse_or();
    if (!root) return {std::nullopt, parser.error};
    if (!parser.lex.at_end()) {
        return {std::nullopt, {"trailing input after expression", parser.lex.pos}};
    }
    return {root, {}};
}

ExprResult<std::vector<Assignment>> parse_assignments(const std::string& text) {
    std::vector<Assignment> out;
    Parser parser(text);
    for (;;) {
        if (parser.lex.at_end()) break;
        std::string name = parser.lex.word();
        if (name.empty()) {
            return {std::nullopt, {"expected variable name", parser.lex.pos}};
        }
        if (!parser.lex.consume("=")) {
            return {std::nullopt, {"expected '=' after '" + name + "'", parser.lex.pos}};
        }
        ExprPtr value = parser.parse_or();
        if (!value) return {std::nullopt, parser.error};
        out.push_back({name, value});
        if (!parser.lex.consume(";")) break;
    }
    if (!parser.lex.at_end()) {
        return {std::nullopt, {"trailing input after assignment", parser.lex.pos}};
    }
    return {out, {}};
}

namespace {

ExprResult<Value> eval_error(const std::string& message) {
    return {std::nullopt, {message, 0}};
}

ExprResult<std::int64_t> as_int(ExprResult<Value> r) {
    if (!r.ok()) return {std::nullopt, r.error};
    if (!std::holds_alternative<std::int64_t>(*r.value)) {
        return {std::nullopt, {"type mismatch: expected integer, got boolean", 0}};
    }
    return {std::get<std::int64_t>(*r.value), {}};
}

ExprResult<bool> as_bool(ExprResult<Value> r) {
    if (!r.ok()) return {std::nullopt, r.error};
    if (!std::holds_alternative<bool>(*r.value)) {
        return {std::nullopt, {"type mismatch: expected boolean, got integer", 0}};
    }
    return {std::get<bool>(*r.value), {}};
}

}  // namespace

ExprResult<Value> eval(const Expr& expr, const Env& env) {
    switch (expr.op) {
        case Expr::Op::IntLit:
            return {Value{expr.int_value}, {}};
        case Expr::Op::BoolLit:
            return {Value{expr.bool_value}, {}};
        case Expr::Op::Var: {
            auto it = env.bindings.find(expr.name);
            if (it == env.bindings.end()) {
                return eval_error("unbound identifier '" + expr.name + "'");
            }
            return {it->second, {}};
        }
        case Expr::Op::Not: {
            auto v = as_bool(eval(*expr.lhs, env));
            if (!v.ok()) return {std::nullopt, v.error};
            return {Value{!*v.value}, {}};
        }
        case Expr::Op::Neg: {
            auto v = as_int(eval(*expr.lhs, env));
            if (!v.ok()) return {std::nullopt, v.error};
            return {Value{-*v.value}, {}};
        }
        case Expr::Op::And:
        case Expr::Op::Or: {
            auto l = as_bool(eval(*expr.lhs, env));
            if (!l.ok()) return {std::nullopt, l.error};
            // No short-circuiting: both sides must be well-typed and bound.
            auto r = as_bool(eval(*expr.rhs, env));
            if (!r.ok()) return {std::nullopt, r.error};
            bool result = expr.op == Expr::Op::And ? (*l.value && *r.value)
                                                   : (*l.value || *r.value);
            return {Value{result}, {}};
        }
        case Expr::Op::Eq:
        case Expr::Op::Ne: {
            auto l = eval(*expr.lhs, env);
            if (!l.ok()) return l;
            auto r = eval(*expr.rhs, env);
            if (!r.ok()) return r;
            if (l.value->index() != r.value->index()) {
                return eval_error("type mismatch: '==' and '!=' need operands of one type");
            }
            bool same = *l.value == *r.value;
            return {Value{expr.op == Expr::Op::Eq ? same : !same}, {}};
        }
        case Expr::Op::Lt:
        case Expr::Op::Le:
        case Expr::Op::Gt:
        case Expr::Op::Ge: {
            auto l = as_int(eval(*expr.lhs, env));
            if (!l.ok()) return {std::nullopt, l.error};
            auto r = as_int(eval(*expr.rhs, env));
            if (!r.ok()) return {std::nullopt, r.error};
            bool result = false;
            switch (expr.op) {
                case Expr::Op::Lt: result = *l.value < *r.value; break;
                case Expr::Op::Le: result = *l.value <= *r.value; break;
                case Expr::Op::Gt: result = *l.value > *r.value; break;
                case Expr::Op::Ge: result = *l.value >= *r.value; break;
                default: break;
            }
            return {Value{result}, {}};
        }
        case Expr::Op::Add:
        case Expr::Op::Sub:
        case Expr::Op::Mul: {
            auto l = as_int(eval(*expr.lhs, env));
            if (!l.ok()) return {std::nullopt, l.error};
            auto r = as_int(eval(*expr.rhs, env));
            if (!r.ok()) return {std::nullopt, r.error};
            std::int64_t result = 0;
            switch (expr.op) {
                case Expr::Op::Add: result = *l.value + *r.value; break;
                case Expr::Op::Sub: result = *l.value - *r.value; break;
                case Expr::Op::Mul: result = *l.value * *r.value; break;
                default: break;
            }
            return {Value{result}, {}};
        }
    }
    return eval_error("unreachable expression kind");
}

void apply_assignments(const std::vector<Assignment>& assignments, Env& env,
                       std::string& error) {
    for (const Assignment& a : assignments) {
        auto v = eval(*a.value, env);
        if (!v.ok()) {
            error = v.error.message;
            return;
        }
        env.bindings[a.variable] = *v.value;
    }
}

}  // namespace wellform
