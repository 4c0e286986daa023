#include <algorithm>

#include "mbt/expr.hpp"

namespace mbt {

namespace {

Value builtin_contains(std::vector<Value>& args) {
    const auto& list = std::get<StringList>(args[0]);
    return std::find(list.begin(), list.end(), std::get<std::string>(args[1])) != list.end();
}

Value builtin_len(std::vector<Value>& args) {
    return static_cast<std::int64_t>(std::get<StringList>(args[0]).size());
}

Value builtin_last(std::vector<Value>& args) {
    const auto& list = std::get<StringList>(args[0]);
    if (list.empty()) throw EvalError("last() of an empty list");
    return list.back();
}

Value builtin_push(std::vector<Value>& args) {
    std::get<StringList>(args[0]).push_back(std::get<std::string>(args[1]));
    return false;
}

}  // namespace

const BuiltinRegistry& BuiltinRegistry::standard() {
    static const BuiltinRegistry reg = [] {
        BuiltinRegistry r;
        r.add({"contains", {Type::List, Type::String}, Type::Bool, true, builtin_contains});
        r.add({"len", {Type::List}, Type::Int, true, builtin_len});
        r.add({"last", {Type::List}, Type::String, true, builtin_last});
        r.add({"push", {Type::List, Type::String}, Type::Void, false, builtin_push});
        return r;
    }();
    return reg;
}

const BuiltinSig* BuiltinRegistry::find(std::string_view name) const {
    for (const auto& s : sigs_)
        if (s.name == name) return &s;
    return nullptr;
}

void BuiltinRegistry::add(BuiltinSig sig) {
    sigs_.push_back(std::move(sig));
}

namespace {

const VarDecl* find_decl(const VarDecls& decls, std::string_view name) {
    for (const auto& d : decls)
        if (d.name == name) return &d;
    return nullptr;
}

[[noreturn]] void type_fail(const Expr& e, const std::string& why) {
    std::string sub = pretty_print(e);
    throw TypeError(sub, "type error in '" + sub + "': " + why);
}

class Checker {
public:
    explicit Checker(const VarDecls& decls) : decls_(decls) {}

    Type check(const Expr& e, bool statement_position = false) {
        return std::visit(
            [&](const auto& n) -> Type {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Literal>) {
                    return type_of(n.value);
                } else if constexpr (std::is_same_v<T, VarRef>) {
                    const VarDecl* d = find_decl(decls_, n.name);
                    if (!d) type_fail(e, "undeclared variable '" + n.name + "'");
                    return d->type;
                } else if constexpr (std::is_same_v<T, Unary>) {
                    Type t = check(*n.operand);
                    if (n.op == UnaryOp::Not) {
                        if (t != Type::Bool) type_fail(e, "'!' needs bool, got " + std::string(to_string(t)));
                        return Type::Bool;
                    }
                    if (t != Type::Int) type_fail(e, "unary '-' needs int, got " + std::string(to_string(t)));
                    return Type::Int;
                } else if constexpr (std::is_same_v<T, Binary>) {
                    return check_binary(e, n);
                } else {
                    return check_call(e, n, statement_position);
                }
            },
            e.node);
    }

private:
    Type check_binary(const Expr& e, const Binary& n) {
        Type l = check(*n.lhs);
        Type r = check(*n.rhs);
        auto mismatch = [&](const char* what) {
            type_fail(e, std::string(what) + " on " + std::string(to_string(l)) + " and " +
                             std::string(to_string(r)));
        };
        switch (n.op) {
            case BinaryOp::Or:
            case BinaryOp::And:
                if (l != Type::Bool || r != Type::Bool) mismatch("logical operator");
                return Type::Bool;
            case BinaryOp::Eq:
            case BinaryOp::Ne:
                if (l != r || l == Type::List || l == Type::Void) mismatch("equality");
                return Type::Bool;
            case BinaryOp::Lt:
            case BinaryOp::Le:
            case BinaryOp::Gt:
            case BinaryOp::Ge:
                if (l != r || (l != Type::Int && l != Type::String)) mismatch("comparison");
                return Type::Bool;
            case BinaryOp::Add:
                if (l != r || (l != Type::Int && l != Type::String)) mismatch("'+'");
                return l;
            case BinaryOp::Sub:
                if (l != Type::Int || r != Type::Int) mismatch("'-'");
                return Type::Int;
        }
        return Type::Void;
    }

    Type check_call(const Expr& e, const Call& n, bool statement_position) {
        const BuiltinSig* sig = BuiltinRegistry::standard().find(n.name);
        if (!sig) type_fail(e, "unknown function '" + n.name + "'");
        if (!sig->pure && !statement_position) type_fail(e, "'" + n.name + "' may only be used as an action");
        if (n.args.size() != sig->params.size())
            type_fail(e, "'" + n.name + "' takes " + std::to_string(sig->params.size()) + " argument(s)");
        for (std::size_t i = 0; i < n.args.size(); ++i) {
            Type t = check(*n.args[i]);
            if (t != sig->params[i])
                type_fail(e, "argument " + std::to_string(i + 1) + " of '" + n.name + "' must be " +
                                 std::string(to_string(sig->params[i])) + ", got " + std::string(to_string(t)));
        }
        if (!sig->pure && !std::holds_alternative<VarRef>(n.args[0]->node))
            type_fail(e, "first argument of '" + n.name + "' must be a variable");
        return sig->result;
    }

    const VarDecls& decls_;
};

}  // namespace

Type type_check(const Expr& e, const VarDecls& decls) {
    return Checker(decls).check(e);
}

void type_check(const ActionStmt& s, const VarDecls& decls) {
    Checker checker(decls);
    if (const auto* a = std::get_if<Assign>(&s.stmt)) {
        const VarDecl* d = find_decl(decls, a->target);
        if (!d) throw TypeError(a->target, "assignment to undeclared variable '" + a->target + "'");
        Type t = checker.check(*a->value);
        if (t != d->type)
            throw TypeError(pretty_print(s), "cannot assign " + std::string(to_string(t)) + " to '" +
                                                 a->target + "' of type " + std::string(to_string(d->type)));
        return;
    }
    checker.check(*std::get<CallStmt>(s.stmt).call, /*statement_position=*/true);
}

namespace {

template <typename T>
const T& as(const Value& v, const Expr& e) {
    if (const auto* p = std::get_if<T>(&v)) return *p;
    throw EvalError("ill-typed operand in '" + pretty_print(e) + "'");
}

std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}

std::int64_t wrap_sub(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}

Value eval_binary(const Expr& e, const Binary& n, const Context& ctx) {
    if (n.op == BinaryOp::And) {
        if (!as<bool>(eval_expr(*n.lhs, ctx), e)) return false;
        return as<bool>(eval_expr(*n.rhs, ctx), e);
    }
    if (n.op == BinaryOp::Or) {
        if (as<bool>(eval_expr(*n.lhs, ctx), e)) return true;
        return as<bool>(eval_expr(*n.rhs, ctx), e);
    }
    Value l = eval_expr(*n.lhs, ctx);
    Value r = eval_expr(*n.rhs, ctx);
    if (l.index() != r.index()) throw EvalError("operand types differ in '" + pretty_print(e) + "'");
    switch (n.op) {
        case BinaryOp::Eq: return l == r;
        case BinaryOp::Ne: return l != r;
        case BinaryOp::Lt: return l < r;
        case BinaryOp::Le: return l <= r;
        case BinaryOp::Gt: return l > r;
        case BinaryOp::Ge: return l >= r;
        case BinaryOp::Add:
            if (std::holds_alternative<std::string>(l))
                return std::get<std::string>(l) + std::get<std::string>(r);
            return wrap_add(as<std::int64_t>(l, e), as<std::int64_t>(r, e));
        case BinaryOp::Sub: return wrap_sub(as<std::int64_t>(l, e), as<std::int64_t>(r, e));
        default: break;
    }
    throw EvalError("bad operator");
}

std::vector<Value> eval_args(const Call& c, const Context& ctx) {
    std::vector<Value> args;
    args.reserve(c.args.size());
    for (const auto& a : c.args) args.push_back(eval_expr(*a, ctx));
    return args;
}

const BuiltinSig& lookup_checked(const Expr& e, const Call& c, const std::vector<Value>& args) {
    const BuiltinSig* sig = BuiltinRegistry::standard().find(c.name);
    if (!sig) throw EvalError("unknown function '" + c.name + "'");
    if (args.size() != sig->params.size()) throw EvalError("arity mismatch in '" + pretty_print(e) + "'");
    for (std::size_t i = 0; i < args.size(); ++i)
        if (type_of(args[i]) != sig->params[i]) throw EvalError("ill-typed argument in '" + pretty_print(e) + "'");
    return *sig;
}

}  // namespace

Value eval_expr(const Expr& e, const Context& ctx) {
    return std::visit(
        [&](const auto& n) -> Value {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Literal>) {
                return n.value;
            } else if constexpr (std::is_same_v<T, VarRef>) {
                return ctx.get(n.name);
            } else if constexpr (std::is_same_v<T, Unary>) {
                Value v = eval_expr(*n.operand, ctx);
                if (n.op == UnaryOp::Not) return !as<bool>(v, e);
                return wrap_sub(0, as<std::int64_t>(v, e));
            } else if constexpr (std::is_same_v<T, Binary>) {
                return eval_binary(e, n, ctx);
            } else {
                std::vector<Value> args = eval_args(n, ctx);
                const BuiltinSig& sig = lookup_checked(e, n, args);
                if (!sig.pure) throw EvalError("'" + n.name + "' may only be used as an action");
                return sig.impl(args);
            }
        },
        e.node);
}

Context exec_actions(std::span<const ActionStmt> stmts, Context ctx) {
    for (std::size_t i = 0; i < stmts.size(); ++i) {
        try {
            if (const auto* a = std::get_if<Assign>(&stmts[i].stmt)) {
                ctx.set(a->target, eval_expr(*a->value, ctx));
                continue;
            }
            const Expr& e = *std::get<CallStmt>(stmts[i].stmt).call;
            const auto& c = std::get<Call>(e.node);
            std::vector<Value> args = eval_args(c, ctx);
            const BuiltinSig& sig = lookup_checked(e, c, args);
            sig.impl(args);
            if (!sig.pure) {
                const auto* target = std::get_if<VarRef>(&c.args[0]->node);
                if (!target) throw EvalError("first argument of '" + c.name + "' must be a variable");
                ctx.set(target->name, std::move(args[0]));
            }
        } catch (const EvalError& err) {
            throw ActionError(i, "action " + std::to_string(i) + " ('" + pretty_print(stmts[i]) + "') failed: " + err.what());
        }
    }
    return ctx;
}

}  // namespace mbt
