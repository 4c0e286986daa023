#include <sstream>

#include "mbt/mapping.hpp"

namespace mbt {

std::string_view to_string(Flavor f) {
    return f == Flavor::Exec ? "exec" : "raw";
}

Flavor flavor_from_string(std::string_view s) {
    if (s == "exec") return Flavor::Exec;
    if (s == "raw") return Flavor::Raw;
    throw TableError("unknown table flavor '" + std::string(s) + "'");
}

std::set<std::string> MappingTable::labels() const {
    std::set<std::string> out;
    for (const auto& [name, g] : groups_)
        for (const auto& [label, f] : g.entries) out.insert(label);
    return out;
}

void MappingTable::check() const {
    for (const auto& [name, g] : groups_) {
        std::set<std::string> seen{name};
        const Group* cur = &g;
        while (cur->extends) {
            auto it = groups_.find(*cur->extends);
            if (it == groups_.end())
                throw TableError("group '" + name + "' extends unknown group '" + *cur->extends + "'");
            if (!seen.insert(it->first).second) throw TableError("extends cycle through group '" + name + "'");
            cur = &it->second;
        }
        for (const auto& [label, f] : g.entries) {
            if (flavor_ == Flavor::Exec && !f.text.empty())
                throw TableError("raw fragment for '" + label + "' in an exec table");
            if (flavor_ == Flavor::Raw && !f.commands.empty())
                throw TableError("exec fragment for '" + label + "' in a raw table");
        }
    }
}

// --- JSON ------------------------------------------------------------------

namespace {

json fragment_to_json(const Fragment& f, Flavor flavor) {
    json j = json::object();
    if (flavor == Flavor::Exec) {
        json cmds = json::array();
        for (const auto& c : f.commands) {
            json cj = {{"name", c.name}, {"args", c.args}};
            if (c.expect) cj["expect"] = *c.expect;
            cmds.push_back(std::move(cj));
        }
        j["commands"] = std::move(cmds);
    } else {
        j["text"] = f.text;
    }
    if (f.todo) j["todo"] = true;
    return j;
}

Fragment fragment_from_json(const json& j, Flavor flavor, const std::string& label) {
    if (!j.is_object()) throw TableError("entry '" + label + "' is not an object");
    Fragment f;
    f.todo = j.value("todo", false);
    if (flavor == Flavor::Exec) {
        if (!j.contains("commands")) throw TableError("exec entry '" + label + "' has no commands");
        for (const auto& cj : j.at("commands")) {
            DriverCommand c;
            c.name = cj.at("name").get<std::string>();
            if (cj.contains("args")) c.args = cj.at("args").get<StringMap>();
            if (cj.contains("expect")) c.expect = cj.at("expect").get<StringMap>();
            f.commands.push_back(std::move(c));
        }
    } else {
        if (!j.contains("text")) throw TableError("raw entry '" + label + "' has no text");
        f.text = j.at("text").get<std::string>();
    }
    return f;
}

}  // namespace

json to_json(const MappingTable& table) {
    json groups = json::object();
    for (const auto& [name, g] : table.groups()) {
        json gj = json::object();
        if (g.extends) gj["extends"] = *g.extends;
        json entries = json::object();
        for (const auto& [label, f] : g.entries) entries[label] = fragment_to_json(f, table.flavor());
        gj["entries"] = std::move(entries);
        groups[name] = std::move(gj);
    }
    return {{"modelHash", table.model_hash()}, {"flavor", to_string(table.flavor())}, {"groups", std::move(groups)}};
}

MappingTable table_from_json(const json& j) {
    try {
        MappingTable t(flavor_from_string(j.value("flavor", "exec")));
        t.set_model_hash(j.value("modelHash", ""));
        if (j.contains("groups")) {
            for (const auto& [name, gj] : j.at("groups").items()) {
                Group g;
                if (gj.contains("extends")) g.extends = gj.at("extends").get<std::string>();
                if (gj.contains("entries"))
                    for (const auto& [label, fj] : gj.at("entries").items())
                        g.entries.emplace(label, fragment_from_json(fj, t.flavor(), label));
                t.groups().emplace(name, std::move(g));
            }
        }
        t.check();
        return t;
    } catch (const json::exception& e) {
        throw TableError(std::string("malformed mapping table: ") + e.what());
    }
}

std::string dump_table(const MappingTable& table) {
    return to_json(table).dump(2) + "\n";
}

MappingTable parse_table(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw TableError(std::string("mapping table is not JSON: ") + e.what());
    }
    return table_from_json(j);
}

// --- maintenance -----------------------------------------------------------

namespace {

Fragment todo_template(const std::string& label, Flavor flavor) {
    Fragment f;
    f.todo = true;
    if (flavor == Flavor::Raw) {
        f.text = "TODO " + label;
    } else if (label_kind(label) == LabelKind::State) {
        f.commands.push_back(DriverCommand{"read", {}, StringMap{{"header", "TODO"}}});
    } else {
        f.commands.push_back(DriverCommand{"TODO", {}, std::nullopt});
    }
    return f;
}

}  // namespace

std::pair<MappingTable, ChangeReport> update_table(MappingTable table, const LabelInventory& inventory) {
    ChangeReport report;
    std::set<std::string> mapped = table.labels();
    std::set<std::string> wanted;
    for (const auto& l : inventory.all()) {
        wanted.insert(l);
        if (mapped.count(l)) continue;
        table.groups()[MappingTable::kBaseGroup].entries.emplace(l, todo_template(l, table.flavor()));
        report.added.push_back(l);
    }
    for (const auto& l : mapped)
        if (!wanted.count(l)) report.stale.push_back(l);
    table.set_model_hash(inventory.contentHash);
    return {std::move(table), std::move(report)};
}

const Fragment& resolve(const MappingTable& table, const std::string& label, const std::string& group) {
    auto it = table.groups().find(group);
    if (it == table.groups().end()) throw TableError("unknown group '" + group + "'");
    std::set<std::string> seen;
    while (true) {
        if (!seen.insert(it->first).second) throw TableError("extends cycle through group '" + it->first + "'");
        const Group& g = it->second;
        if (auto e = g.entries.find(label); e != g.entries.end()) return e->second;
        if (!g.extends) break;
        it = table.groups().find(*g.extends);
        if (it == table.groups().end()) throw TableError("group extends unknown group '" + *g.extends + "'");
    }
    throw MissingLabel(label, group);
}

GroupFor default_group_for(const MappingTable& table) {
    std::set<std::string> names;
    for (const auto& [n, g] : table.groups()) names.insert(n);
    return [names](const std::string& state) {
        std::string local(local_label(state));
        if (local.size() < state.size()) {
            std::string prefix = state.substr(0, state.size() - local.size() - 1);
            std::string inner = prefix.substr(prefix.rfind('.') == std::string::npos ? 0 : prefix.rfind('.') + 1);
            // "Chat#2" shares the "Chat" group.
            inner = inner.substr(0, inner.find('#'));
            if (names.count(inner)) return inner;
        }
        return std::string(MappingTable::kBaseGroup);
    };
}

// --- instantiation ---------------------------------------------------------

std::string substitute(std::string_view text, const Context& ctx, const std::string& label) {
    std::string out;
    std::size_t pos = 0;
    while (true) {
        std::size_t open = text.find("{{", pos);
        if (open == std::string_view::npos) break;
        std::size_t close = text.find("}}", open + 2);
        if (close == std::string_view::npos) break;
        out.append(text.substr(pos, open - pos));
        std::string name(text.substr(open + 2, close - open - 2));
        auto b = name.find_first_not_of(' '), e = name.find_last_not_of(' ');
        name = b == std::string::npos ? "" : name.substr(b, e - b + 1);
        if (!ctx.has(name)) throw UnresolvedPlaceholder(name, label);
        out += render(ctx.get(name));
        pos = close + 2;
    }
    out.append(text.substr(pos));
    return out;
}

ConcreteTestCase instantiate(const AbstractTestCase& abstract, const MappingTable& table, const GroupFor& groupFor,
                             std::string_view suiteModelHash) {
    if (table.model_hash() != suiteModelHash)
        throw HashMismatch("mapping table was built for model " + table.model_hash() + " but the suite comes from " +
                           std::string(suiteModelHash) + "; run labels --update");
    ConcreteTestCase out;
    out.id = abstract.id;
    out.sourceAbstractId = abstract.id;
    std::string state;
    for (const Step& s : abstract.steps) {
        if (s.kind == LabelKind::State) state = s.label;
        ResolvedStep r;
        r.kind = s.kind;
        r.label = s.label;
        r.group = groupFor(state);
        const Fragment& f = resolve(table, s.label, r.group);
        if (f.todo) throw TodoFragment(s.label);
        r.fragment.text = substitute(f.text, s.ctx, s.label);
        for (const auto& c : f.commands) {
            DriverCommand rc{c.name, {}, std::nullopt};
            for (const auto& [k, v] : c.args) rc.args[k] = substitute(v, s.ctx, s.label);
            if (c.expect) {
                rc.expect.emplace();
                for (const auto& [k, v] : *c.expect) (*rc.expect)[k] = substitute(v, s.ctx, s.label);
            }
            r.fragment.commands.push_back(std::move(rc));
        }
        out.steps.push_back(std::move(r));
    }
    return out;
}

std::string emit_text(const ConcreteTestCase& concrete) {
    std::string out;
    for (std::size_t i = 0; i < concrete.steps.size(); ++i) {
        if (i) out += '\n';
        out += concrete.steps[i].fragment.text;
    }
    return out;
}

std::string concrete_to_jsonl(const std::vector<ConcreteTestCase>& suite) {
    std::string out;
    for (const auto& tc : suite) {
        json steps = json::array();
        for (const auto& s : tc.steps) {
            json sj = fragment_to_json(s.fragment, s.fragment.commands.empty() && !s.fragment.text.empty() ? Flavor::Raw
                                                                                                           : Flavor::Exec);
            sj["kind"] = s.kind == LabelKind::State ? "state" : "transition";
            sj["label"] = s.label;
            sj["group"] = s.group;
            steps.push_back(std::move(sj));
        }
        json line = {{"id", tc.id}, {"source", tc.sourceAbstractId}, {"steps", std::move(steps)}};
        out += line.dump();
        out += '\n';
    }
    return out;
}

std::vector<ConcreteTestCase> concrete_from_jsonl(std::string_view text) {
    std::vector<ConcreteTestCase> out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            json j = json::parse(line);
            ConcreteTestCase tc;
            tc.id = j.at("id").get<std::size_t>();
            tc.sourceAbstractId = j.at("source").get<std::size_t>();
            for (const auto& sj : j.at("steps")) {
                ResolvedStep r;
                r.kind = sj.at("kind").get<std::string>() == "state" ? LabelKind::State : LabelKind::Transition;
                r.label = sj.at("label").get<std::string>();
                r.group = sj.value("group", "");
                r.fragment = fragment_from_json(sj, sj.contains("commands") ? Flavor::Exec : Flavor::Raw, r.label);
                tc.steps.push_back(std::move(r));
            }
            out.push_back(std::move(tc));
        } catch (const json::exception& e) {
            throw Error("concrete suite line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace mbt
