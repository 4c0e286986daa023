#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mbt/errors.hpp"

namespace mbt {

enum class Type { Bool, Int, String, List, Void };

std::string_view to_string(Type t);

using StringList = std::vector<std::string>;

/// A runtime value. The alternative index order matches Type.
using Value = std::variant<bool, std::int64_t, std::string, StringList>;

Type type_of(const Value& v);

/// Placeholder rendering: bools as true/false, lists comma-joined.
std::string render(const Value& v);

/// A declared state variable.
struct VarDecl {
    std::string name;
    Type type = Type::Int;
    Value initial = std::int64_t{0};

    friend bool operator==(const VarDecl&, const VarDecl&) = default;
};

using VarDecls = std::vector<VarDecl>;

/// Variable store carried along a traversal. Holds exactly the declared
/// names; a binding's type is fixed once the context is created.
class Context {
public:
    Context() = default;
    explicit Context(const VarDecls& decls);

    bool has(std::string_view name) const;
    const Value& get(std::string_view name) const;

    /// Rebinds an existing variable. Throws EvalError on unknown name or
    /// type change.
    void set(std::string_view name, Value v);

    const std::map<std::string, Value, std::less<>>& bindings() const noexcept { return bindings_; }

    friend bool operator==(const Context&, const Context&) = default;

private:
    std::map<std::string, Value, std::less<>> bindings_;
};

}  // namespace mbt
