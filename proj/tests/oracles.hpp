#pragma once

// Reference implementations used as test oracles. They share only the
// expression evaluator with the library and walk models their own way.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "mbt/generator.hpp"
#include "mbt/model_io.hpp"

namespace oracle {

using Walk = std::vector<std::string>;  // state, transition, state, ...

inline bool guard_true(const mbt::Transition& t, const mbt::Context& ctx) {
    return !t.guard || std::get<bool>(mbt::eval_expr(*t.guard, ctx));
}

/// Replays an abstract test step by step. Returns one message per violation.
inline std::vector<std::string> replay(const mbt::EfsmModel& model, const mbt::AbstractTestCase& tc,
                                       const mbt::Context& initial) {
    std::vector<std::string> bad;
    auto say = [&](std::size_t i, const std::string& m) {
        bad.push_back("test " + std::to_string(tc.id) + " step " + std::to_string(i) + ": " + m);
    };
    const auto& st = tc.steps;
    if (st.empty() || st.size() % 2 == 0) {
        say(0, "step count must be odd");
        return bad;
    }
    if (st[0].kind != mbt::LabelKind::State || !model.find_state(st[0].label) || !model.find_state(st[0].label)->isStart)
        say(0, "does not begin at the start state");
    if (!(st[0].ctx == initial)) say(0, "initial snapshot differs");
    mbt::Context ctx = initial;
    for (std::size_t i = 1; i < st.size(); i += 2) {
        if (st[i].kind != mbt::LabelKind::Transition || st[i + 1].kind != mbt::LabelKind::State) {
            say(i, "kinds do not alternate");
            return bad;
        }
        const mbt::Transition* t = nullptr;
        for (const auto& cand : model.transitions())
            if (cand.source == st[i - 1].label && cand.label == st[i].label && cand.target == st[i + 1].label) t = &cand;
        if (!t) {
            say(i, "no such edge " + st[i - 1].label + " --" + st[i].label + "--> " + st[i + 1].label);
            return bad;
        }
        if (!guard_true(*t, ctx)) say(i, "guard false");
        ctx = mbt::exec_actions(t->actions, ctx);
        if (!(st[i].ctx == ctx)) say(i, "transition snapshot differs");
        if (!(st[i + 1].ctx == ctx)) say(i + 1, "state snapshot differs");
    }
    return bad;
}

inline Walk labels_of(const mbt::AbstractTestCase& tc) {
    Walk w;
    for (const auto& s : tc.steps) w.push_back(s.label);
    return w;
}

/// All guarded walks of the flat model with at most maxLen transitions.
inline std::set<Walk> flat_walks(const mbt::EfsmModel& m, std::size_t maxLen) {
    std::set<Walk> out;
    struct Item {
        Walk walk;
        std::string state;
        mbt::Context ctx;
    };
    std::vector<Item> frontier{{{m.start_state()->label}, m.start_state()->label, m.initial_context()}};
    for (std::size_t len = 0;; ++len) {
        std::vector<Item> next;
        for (auto& it : frontier) {
            out.insert(it.walk);
            if (len == maxLen) continue;
            for (const auto& t : m.transitions()) {
                if (t.source != it.state || !guard_true(t, it.ctx)) continue;
                Item n{it.walk, t.target, mbt::exec_actions(t.actions, it.ctx)};
                n.walk.push_back(t.label);
                n.walk.push_back(t.target);
                next.push_back(std::move(n));
            }
        }
        if (next.empty() || len == maxLen) break;
        frontier = std::move(next);
    }
    return out;
}

/// Walks under hierarchical semantics: a stack of (model, state, prefix)
/// frames, entering a referencing state descends into the submodel's start,
/// and an EXIT state of a nested model may take the referencing state's
/// outgoing edges in the parent. Labels are prefix + local label, where the
/// prefix of the k-th reference to M inside one parent is "M." (k = 1) or
/// "M#k." (k > 1).
class Layered {
public:
    explicit Layered(const mbt::ModelBundle& b) : b_(b) {
        for (const auto& [name, m] : b.models)
            for (const auto& d : m.variables())
                if (!decls_.count(d.name)) decls_[d.name] = d;
    }

    std::set<Walk> walks(std::size_t maxLen) const {
        mbt::VarDecls decls;
        for (const auto& [n, d] : decls_) decls.push_back(d);
        Item start{{}, {}, mbt::Context(decls)};
        const auto& main = b_.models.at(b_.mainModel);
        for (const auto& s : main.states())
            if (s.isStart) enter(start.stack, b_.mainModel, s.label, "");
        start.walk.push_back(label(start.stack));

        std::set<Walk> out;
        std::vector<Item> frontier{start};
        for (std::size_t len = 0;; ++len) {
            std::vector<Item> next;
            for (const auto& it : frontier) {
                out.insert(it.walk);
                if (len == maxLen) continue;
                moves(it, next);
            }
            if (next.empty() || len == maxLen) break;
            frontier = std::move(next);
        }
        return out;
    }

private:
    struct Frame {
        std::string model;
        std::string state;
        std::string prefix;
    };
    using Stack = std::vector<Frame>;
    struct Item {
        Walk walk;
        Stack stack;
        mbt::Context ctx;
    };

    const mbt::State& state(const std::string& model, const std::string& label) const {
        for (const auto& s : b_.models.at(model).states())
            if (s.label == label) return s;
        throw std::runtime_error("oracle: no state " + label);
    }

    std::string prefix_for(const std::string& model, const std::string& refState, const std::string& outer) const {
        const auto& st = state(model, refState);
        int k = 0;
        for (const auto& s : b_.models.at(model).states()) {
            if (s.submodel == st.submodel) ++k;
            if (s.label == refState) break;
        }
        return outer + *st.submodel + (k > 1 ? "#" + std::to_string(k) : "") + ".";
    }

    // Puts (model, label) on top of the stack, descending through references.
    void enter(Stack& stack, const std::string& model, const std::string& label, const std::string& prefix) const {
        stack.push_back(Frame{model, label, prefix});
        const auto& s = state(model, label);
        if (!s.submodel) return;
        const auto& sub = b_.models.at(*s.submodel);
        for (const auto& ss : sub.states())
            if (ss.isStart) return enter(stack, *s.submodel, ss.label, prefix_for(model, label, prefix));
    }

    static std::string label(const Stack& s) {
        return s.back().prefix + s.back().state;
    }

    void take(const Item& it, Stack base, const mbt::Transition& t, const Frame& at, std::vector<Item>& out) const {
        if (!guard_true(t, it.ctx)) return;
        Item n{it.walk, {}, mbt::exec_actions(t.actions, it.ctx)};
        enter(base, at.model, t.target, at.prefix);
        n.stack = std::move(base);
        n.walk.push_back(t.label);
        n.walk.push_back(label(n.stack));
        out.push_back(std::move(n));
    }

    void moves(const Item& it, std::vector<Item>& out) const {
        const Frame& top = it.stack.back();
        Stack below(it.stack.begin(), it.stack.end() - 1);
        for (const auto& t : b_.models.at(top.model).transitions())
            if (t.source == top.state) take(it, below, t, top, out);
        if (it.stack.size() < 2 || !state(top.model, top.state).isExit) return;
        const Frame& parent = it.stack[it.stack.size() - 2];
        Stack above(it.stack.begin(), it.stack.end() - 2);
        for (const auto& t : b_.models.at(parent.model).transitions())
            if (t.source == parent.state) take(it, above, t, parent, out);
    }

    const mbt::ModelBundle& b_;
    std::map<std::string, mbt::VarDecl> decls_;
};

}  // namespace oracle
