#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>

#include "mbt/model_io.hpp"
#include "mbt/serialize.hpp"

namespace mbt {

namespace fs = std::filesystem;

std::string find_root_model(const std::map<std::string, EfsmModel>& models) {
    std::set<std::string> referenced;
    for (const auto& [name, m] : models)
        for (const auto& s : m.states())
            if (s.submodel) referenced.insert(*s.submodel);
    std::vector<std::string> roots;
    for (const auto& [name, m] : models)
        if (!referenced.count(name)) roots.push_back(name);
    if (roots.size() != 1) {
        std::string msg = "cannot determine the main model: ";
        if (roots.empty()) {
            msg += "every model is referenced as a submodel";
        } else {
            msg += "several unreferenced models (";
            for (std::size_t i = 0; i < roots.size(); ++i) msg += (i ? ", " : "") + roots[i];
            msg += ")";
        }
        throw ModelError(msg);
    }
    return roots.front();
}

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot read '" + p.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void merge_into(ModelBundle& into, std::map<std::string, EfsmModel> models, const fs::path& from) {
    for (auto& [name, m] : models)
        if (!into.models.emplace(name, std::move(m)).second)
            throw ModelError("model '" + name + "' defined twice (again in '" + from.string() + "')");
}

std::map<std::string, EfsmModel> read_models(const fs::path& p) {
    auto ext = p.extension().string();
    if (ext == ".graphml") {
        EfsmModel m = parse_graphml(read_file(p));
        std::map<std::string, EfsmModel> out;
        out.emplace(m.name(), std::move(m));
        return out;
    }
    if (ext == ".efsm") return parse_dsl(read_file(p)).models;
    throw Error("unsupported model file '" + p.string() + "' (expected .efsm or .graphml)");
}

}  // namespace

ModelBundle load_bundle(const fs::path& path) {
    ModelBundle b;
    if (fs::is_directory(path)) {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(path)) {
            auto ext = e.path().extension().string();
            if (e.is_regular_file() && (ext == ".efsm" || ext == ".graphml")) files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) throw Error("no .efsm or .graphml files in '" + path.string() + "'");
        for (const auto& f : files) merge_into(b, read_models(f), f);
    } else {
        merge_into(b, read_models(path), path);
    }
    b.mainModel = find_root_model(b.models);
    return b;
}

EfsmModel load_model(const fs::path& path) {
    return flatten(load_bundle(path));
}

namespace {

VarDecls merge_vars(VarDecls into, const VarDecls& more, const std::string& where) {
    for (const auto& d : more) {
        auto it = std::find_if(into.begin(), into.end(), [&](const VarDecl& x) { return x.name == d.name; });
        if (it == into.end()) {
            into.push_back(d);
        } else if (!(*it == d)) {
            throw ModelError("variable '" + d.name + "' declared differently in '" + where + "'");
        }
    }
    return into;
}

class Flattener {
public:
    explicit Flattener(const ModelBundle& b) : bundle_(b) {}

    EfsmModel run() {
        if (!bundle_.models.count(bundle_.mainModel))
            throw ModelError("main model '" + bundle_.mainModel + "' is not in the bundle");
        return flat(bundle_.mainModel);
    }

private:
    const EfsmModel& model(const std::string& name) const {
        auto it = bundle_.models.find(name);
        if (it == bundle_.models.end()) throw ModelError("submodel '" + name + "' is not in the bundle");
        return it->second;
    }

    EfsmModel flat(const std::string& name) {
        if (auto it = done_.find(name); it != done_.end()) return it->second;
        if (std::find(stack_.begin(), stack_.end(), name) != stack_.end()) {
            std::string cycle;
            for (const auto& s : stack_) cycle += s + " -> ";
            throw CycleError("recursive submodels: " + cycle + name);
        }
        stack_.push_back(name);
        EfsmModel result = expand(model(name));
        stack_.pop_back();
        done_.emplace(name, result);
        return result;
    }

    struct Splice {
        std::string start;
        std::vector<std::string> exits;
    };

    EfsmModel expand(const EfsmModel& m) {
        std::vector<State> states;
        std::vector<Transition> inner;
        VarDecls vars = m.variables();
        std::map<std::string, Splice> splices;  // referencing state -> splice
        std::map<std::string, int> uses;

        for (const auto& s : m.states()) {
            if (!s.submodel) {
                states.push_back(s);
                continue;
            }
            if (s.isExit) throw ModelError("state '" + s.label + "' in '" + m.name() + "' is both EXIT and a submodel reference");
            EfsmModel sub = flat(*s.submodel);
            const State* sub_start = sub.start_state();
            if (!sub_start) throw ModelError("submodel '" + sub.name() + "' has no start state");
            int n = ++uses[*s.submodel];
            std::string prefix = *s.submodel + (n > 1 ? "#" + std::to_string(n) : "") + ".";

            Splice sp;
            sp.start = prefix + sub_start->label;
            for (const auto& ss : sub.states()) {
                State c = ss;
                c.label = prefix + ss.label;
                if (c.assertion) c.assertion = prefix + *c.assertion;
                c.isStart = ss.isStart && s.isStart;
                c.isExit = false;
                if (ss.isExit) sp.exits.push_back(c.label);
                states.push_back(std::move(c));
            }
            if (sp.exits.empty() && !m.outgoing(s.label).empty())
                throw NoExitError("submodel '" + sub.name() + "' referenced by '" + s.label + "' in '" + m.name() +
                                  "' has no EXIT state but the reference has outgoing edges");
            for (const auto& t : sub.transitions()) {
                Transition c = t;
                c.source = prefix + t.source;
                c.target = prefix + t.target;
                inner.push_back(std::move(c));
            }
            vars = merge_vars(std::move(vars), sub.variables(), m.name());
            splices.emplace(s.label, std::move(sp));
        }

        std::vector<Transition> trans;
        for (const auto& t : m.transitions()) {
            std::vector<std::string> sources{t.source};
            if (auto it = splices.find(t.source); it != splices.end()) sources = it->second.exits;
            std::string target = t.target;
            if (auto it = splices.find(t.target); it != splices.end()) target = it->second.start;
            for (const auto& src : sources) {
                Transition c = t;
                c.source = src;
                c.target = target;
                trans.push_back(std::move(c));
            }
        }
        trans.insert(trans.end(), inner.begin(), inner.end());
        return EfsmModel(m.name(), std::move(states), std::move(trans), std::move(vars));
    }

    const ModelBundle& bundle_;
    std::map<std::string, EfsmModel> done_;
    std::vector<std::string> stack_;
};

}  // namespace

EfsmModel flatten(const ModelBundle& bundle) {
    return Flattener(bundle).run();
}

Reachability reachable(const EfsmModel& model) {
    Reachability r;
    const State* start = model.start_state();
    if (!start) return r;
    std::deque<std::string> queue{start->label};
    r.states.insert(start->label);
    while (!queue.empty()) {
        std::string cur = std::move(queue.front());
        queue.pop_front();
        for (std::size_t i : model.outgoing(cur)) {
            r.transitions.insert(i);
            const auto& tgt = model.transitions()[i].target;
            if (r.states.insert(tgt).second) queue.push_back(tgt);
        }
    }
    return r;
}

std::vector<std::string> ValidationReport::subjects(std::string_view kind) const {
    std::vector<std::string> out;
    for (const auto& f : findings)
        if (f.kind == kind) out.push_back(f.subject);
    return out;
}

ValidationReport validate(const EfsmModel& model) {
    ValidationReport rep;
    auto add = [&](std::string kind, std::string subject, std::string msg) {
        rep.findings.push_back(Finding{std::move(kind), std::move(subject), std::move(msg)});
    };

    int starts = 0;
    std::set<std::string> seen;
    for (const auto& s : model.states()) {
        if (s.isStart) ++starts;
        if (!seen.insert(s.label).second) add("duplicate-state", s.label, "state label appears more than once");
        if (label_kind(s.label) != LabelKind::State) add("label", s.label, "state label must start with v_");
        if (s.submodel) add("submodel", s.label, "unresolved submodel reference to '" + *s.submodel + "'");
    }
    if (starts == 0) add("missing-start", model.name(), "model has no start state");
    if (starts > 1) add("multiple-start", model.name(), "model has " + std::to_string(starts) + " start states");

    std::set<std::string> edges;
    for (const auto& t : model.transitions()) {
        std::string key = edge_key(t);
        if (!edges.insert(key).second) add("duplicate-transition", key, "(source, label, target) appears more than once");
        if (label_kind(t.label) != LabelKind::Transition) add("label", t.label, "transition label must start with e_");
        if (t.guard) {
            try {
                Type gt = type_check(*t.guard, model.variables());
                if (gt != Type::Bool)
                    add("type-error", t.label, "guard of '" + key + "' has type " + std::string(to_string(gt)) + ", not bool");
            } catch (const TypeError& e) {
                add("type-error", t.label, "guard of '" + key + "': " + e.what());
            }
        }
        for (std::size_t i = 0; i < t.actions.size(); ++i) {
            try {
                type_check(t.actions[i], model.variables());
            } catch (const TypeError& e) {
                add("type-error", t.label, "action " + std::to_string(i) + " of '" + key + "': " + e.what());
            }
        }
    }

    try {
        Context c(model.variables());
    } catch (const ModelError& e) {
        add("type-error", model.name(), e.what());
    }

    if (starts > 0) {
        Reachability r = reachable(model);
        for (const auto& s : model.states())
            if (!r.states.count(s.label)) add("unreachable-state", s.label, "not reachable from the start state");
        for (std::size_t i = 0; i < model.transitions().size(); ++i)
            if (!r.transitions.count(i))
                add("unreachable-transition", edge_key(model.transitions()[i]), "source state is unreachable");
    }
    return rep;
}

std::vector<std::string> LabelInventory::all() const {
    std::vector<std::string> out = stateLabels;
    out.insert(out.end(), transitionLabels.begin(), transitionLabels.end());
    return out;
}

LabelInventory extract_labels(const EfsmModel& model) {
    std::set<std::string> ss, ts;
    for (const auto& s : model.states()) ss.insert(s.label);
    for (const auto& t : model.transitions()) ts.insert(t.label);
    return LabelInventory{{ss.begin(), ss.end()}, {ts.begin(), ts.end()}, model.name(), content_hash(model)};
}

}  // namespace mbt
