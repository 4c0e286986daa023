#include "mbt/value.hpp"

namespace mbt {

std::string_view to_string(Type t) {
    switch (t) {
        case Type::Bool: return "bool";
        case Type::Int: return "int";
        case Type::String: return "string";
        case Type::List: return "list";
        case Type::Void: return "void";
    }
    return "?";
}

Type type_of(const Value& v) {
    return static_cast<Type>(v.index());
}

std::string render(const Value& v) {
    struct Visitor {
        std::string operator()(bool b) const { return b ? "true" : "false"; }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(const std::string& s) const { return s; }
        std::string operator()(const StringList& l) const {
            std::string out;
            for (std::size_t i = 0; i < l.size(); ++i) {
                if (i) out += ',';
                out += l[i];
            }
            return out;
        }
    };
    return std::visit(Visitor{}, v);
}

Context::Context(const VarDecls& decls) {
    for (const auto& d : decls) {
        if (type_of(d.initial) != d.type)
            throw ModelError("initial value of '" + d.name + "' is not of type " +
                             std::string(to_string(d.type)));
        bindings_.insert_or_assign(d.name, d.initial);
    }
}

bool Context::has(std::string_view name) const {
    return bindings_.find(name) != bindings_.end();
}

const Value& Context::get(std::string_view name) const {
    auto it = bindings_.find(name);
    if (it == bindings_.end()) throw EvalError("unbound variable '" + std::string(name) + "'");
    return it->second;
}

void Context::set(std::string_view name, Value v) {
    auto it = bindings_.find(name);
    if (it == bindings_.end()) throw EvalError("unbound variable '" + std::string(name) + "'");
    if (it->second.index() != v.index())
        throw EvalError("type change on '" + std::string(name) + "'");
    it->second = std::move(v);
}

}  // namespace mbt
