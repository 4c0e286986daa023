#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mbt/value.hpp"

namespace mbt {

// Guard and action language.
//
//   expr   := or
//   or     := and ("||" and)*
//   and    := cmp ("&&" cmp)*
//   cmp    := add (("=="|"!="|"<"|"<="|">"|">=") add)?
//   add    := unary (("+"|"-") unary)*
//   unary  := "!" unary | "-" unary | atom
//   atom   := int | "true" | "false" | "'" chars "'" | ident
//           | ident "(" args ")" | "(" expr ")"
//   action := ident "=" expr ";" | ident "(" args ")" ";"

enum class UnaryOp { Not, Neg };
enum class BinaryOp { Or, And, Eq, Ne, Lt, Le, Gt, Ge, Add, Sub };

std::string_view to_string(BinaryOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Literal {
    Value value;
};
struct VarRef {
    std::string name;
};
struct Unary {
    UnaryOp op;
    ExprPtr operand;
};
struct Binary {
    BinaryOp op;
    ExprPtr lhs;
    ExprPtr rhs;
};
struct Call {
    std::string name;
    std::vector<ExprPtr> args;
};

struct Expr {
    std::variant<Literal, VarRef, Unary, Binary, Call> node;
    std::size_t offset = 0;  // byte offset in the source; not part of equality
};

/// Structural equality; source offsets are ignored.
bool operator==(const Expr& a, const Expr& b);
bool same_tree(const ExprPtr& a, const ExprPtr& b);

ExprPtr make_literal(Value v);
ExprPtr make_var(std::string name);
ExprPtr make_unary(UnaryOp op, ExprPtr operand);
ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs);
ExprPtr make_call(std::string name, std::vector<ExprPtr> args);

struct Assign {
    std::string target;
    ExprPtr value;
};
struct CallStmt {
    ExprPtr call;  // always holds a Call node
};

struct ActionStmt {
    std::variant<Assign, CallStmt> stmt;
};

bool operator==(const ActionStmt& a, const ActionStmt& b);

using Actions = std::vector<ActionStmt>;

ExprPtr parse_expr(std::string_view src);

/// Parses a sequence of `;`-terminated statements. The final `;` may be
/// omitted. Blank input yields no statements.
Actions parse_actions(std::string_view src);

/// Fully parenthesised rendering; parse_expr(pretty_print(e)) == e.
std::string pretty_print(const Expr& e);
std::string pretty_print(const ActionStmt& s);
std::string pretty_print(std::span<const ActionStmt> stmts);

// --- builtins --------------------------------------------------------------

struct BuiltinSig {
    std::string name;
    std::vector<Type> params;
    Type result;
    /// Impure builtins are action-only and mutate their first argument,
    /// which must be a variable reference.
    bool pure;
    Value (*impl)(std::vector<Value>& args);
};

class BuiltinRegistry {
public:
    /// contains, len, last (pure) and push (action-only).
    static const BuiltinRegistry& standard();

    const BuiltinSig* find(std::string_view name) const;
    const std::vector<BuiltinSig>& all() const noexcept { return sigs_; }

    void add(BuiltinSig sig);

private:
    std::vector<BuiltinSig> sigs_;
};

// --- checking and evaluation -----------------------------------------------

/// Static type of a guard-position expression. Action-only builtins are
/// rejected here. Throws TypeError.
Type type_check(const Expr& e, const VarDecls& decls);

/// Checks one action statement against the declarations. Throws TypeError.
void type_check(const ActionStmt& s, const VarDecls& decls);

/// Strict evaluation with short-circuit && and ||. Never mutates ctx.
/// Throws EvalError (partial builtins, or ill-typed input that skipped
/// type_check).
Value eval_expr(const Expr& e, const Context& ctx);

/// Runs statements in order on a copy of ctx. Throws ActionError carrying
/// the failing statement index.
Context exec_actions(std::span<const ActionStmt> stmts, Context ctx);

}  // namespace mbt
