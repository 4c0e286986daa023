#include "mbt/serialize.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <memory>

namespace mbt {

json to_json(const Value& v) {
    return std::visit([](const auto& x) -> json { return json(x); }, v);
}

Value value_from_json(const json& j) {
    if (j.is_boolean()) return j.get<bool>();
    if (j.is_number_integer()) return j.get<std::int64_t>();
    if (j.is_string()) return j.get<std::string>();
    if (j.is_array()) {
        StringList l;
        for (const auto& e : j) {
            if (!e.is_string()) throw Error("list values must hold strings");
            l.push_back(e.get<std::string>());
        }
        return l;
    }
    throw Error("unsupported JSON value: " + j.dump());
}

json to_json(const Context& ctx) {
    json j = json::object();
    for (const auto& [k, v] : ctx.bindings()) j[k] = to_json(v);
    return j;
}

Context context_from_json(const json& j, const VarDecls& decls) {
    if (!j.is_object()) throw Error("context must be a JSON object");
    VarDecls filled = decls;
    for (auto& d : filled) {
        auto it = j.find(d.name);
        if (it == j.end()) throw Error("context lacks variable '" + d.name + "'");
        Value v = value_from_json(*it);
        // An empty JSON array carries no element type; lists are the only arrays.
        if (type_of(v) != d.type) throw Error("context value for '" + d.name + "' has the wrong type");
        d.initial = std::move(v);
    }
    if (j.size() != filled.size()) throw Error("context has undeclared variables");
    return Context(filled);
}

Context context_from_json(const json& j) {
    if (!j.is_object()) throw Error("context must be a JSON object");
    VarDecls decls;
    for (const auto& [k, v] : j.items()) {
        Value val = value_from_json(v);
        decls.push_back(VarDecl{k, type_of(val), val});
    }
    return Context(decls);
}

json canonical_json(const EfsmModel& model) {
    json states = json::array();
    std::vector<const State*> ss;
    for (const auto& s : model.states()) ss.push_back(&s);
    std::sort(ss.begin(), ss.end(), [](auto* a, auto* b) { return a->label < b->label; });
    for (const auto* s : ss) {
        json js = {{"label", s->label}, {"start", s->isStart}, {"exit", s->isExit}};
        js["submodel"] = s->submodel ? json(*s->submodel) : json(nullptr);
        states.push_back(std::move(js));
    }
    std::vector<json> trans;
    for (const auto& t : model.transitions()) {
        trans.push_back({{"label", t.label},
                         {"source", t.source},
                         {"target", t.target},
                         {"guard", t.guard ? pretty_print(*t.guard) : ""},
                         {"actions", pretty_print(t.actions)}});
    }
    std::sort(trans.begin(), trans.end(), [](const json& a, const json& b) { return a.dump() < b.dump(); });
    std::vector<json> vars;
    for (const auto& d : model.variables())
        vars.push_back({{"name", d.name}, {"type", std::string(to_string(d.type))}, {"initial", to_json(d.initial)}});
    std::sort(vars.begin(), vars.end(), [](const json& a, const json& b) { return a.dump() < b.dump(); });
    return {{"name", model.name()}, {"states", states}, {"transitions", trans}, {"variables", vars}};
}

std::string sha256_hex(std::string_view data) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1)
        throw Error("sha256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

std::string content_hash(const EfsmModel& model) {
    return sha256_hex(dump_canonical(canonical_json(model)));
}

}  // namespace mbt
