#include "mbt/efsm.hpp"

namespace mbt {

std::string_view local_label(std::string_view label) {
    auto dot = label.rfind('.');
    return dot == std::string_view::npos ? label : label.substr(dot + 1);
}

std::optional<LabelKind> label_kind(std::string_view label) {
    auto local = local_label(label);
    if (local.size() > 2 && local.substr(0, 2) == "v_") return LabelKind::State;
    if (local.size() > 2 && local.substr(0, 2) == "e_") return LabelKind::Transition;
    return std::nullopt;
}

bool operator==(const Transition& a, const Transition& b) {
    return a.label == b.label && a.source == b.source && a.target == b.target &&
           same_tree(a.guard, b.guard) && a.actions == b.actions;
}

std::string edge_key(std::string_view source, std::string_view label, std::string_view target) {
    std::string k;
    k.reserve(source.size() + label.size() + target.size() + 8);
    k.append(source).append(" --").append(label).append("--> ").append(target);
    return k;
}

std::string edge_key(const Transition& t) {
    return edge_key(t.source, t.label, t.target);
}

EfsmModel::EfsmModel(std::string name, std::vector<State> states, std::vector<Transition> transitions,
                     VarDecls variables)
    : name_(std::move(name)), states_(std::move(states)), transitions_(std::move(transitions)),
      variables_(std::move(variables)) {
    for (std::size_t i = 0; i < states_.size(); ++i) {
        state_index_.try_emplace(states_[i].label, i);
        outgoing_.try_emplace(states_[i].label);
    }
    for (std::size_t i = 0; i < transitions_.size(); ++i) {
        const auto& t = transitions_[i];
        if (!state_index_.contains(t.source))
            throw ModelError("model '" + name_ + "': transition '" + t.label + "' leaves unknown state '" + t.source + "'");
        if (!state_index_.contains(t.target))
            throw ModelError("model '" + name_ + "': transition '" + t.label + "' enters unknown state '" + t.target + "'");
        outgoing_[t.source].push_back(i);
        edge_index_.try_emplace(edge_key(t), i);
    }
}

const State* EfsmModel::find_state(std::string_view label) const {
    auto it = state_index_.find(std::string(label));
    return it == state_index_.end() ? nullptr : &states_[it->second];
}

const State* EfsmModel::start_state() const {
    for (const auto& s : states_)
        if (s.isStart) return &s;
    return nullptr;
}

const std::vector<std::size_t>& EfsmModel::outgoing(std::string_view state) const {
    auto it = outgoing_.find(std::string(state));
    if (it == outgoing_.end()) throw UnknownState(std::string(state));
    return it->second;
}

const Transition* EfsmModel::find_transition(std::string_view source, std::string_view label,
                                             std::string_view target) const {
    auto it = edge_index_.find(edge_key(source, label, target));
    return it == edge_index_.end() ? nullptr : &transitions_[it->second];
}

bool EfsmModel::contains(const Transition& t) const {
    if (!transitions_.empty() && &t >= transitions_.data() && &t < transitions_.data() + transitions_.size())
        return true;
    const Transition* found = find_transition(t.source, t.label, t.target);
    return found && *found == t;
}

bool operator==(const EfsmModel& a, const EfsmModel& b) {
    return a.name_ == b.name_ && a.states_ == b.states_ && a.transitions_ == b.transitions_ &&
           a.variables_ == b.variables_;
}

bool guard_holds(const Transition& t, const Context& ctx) {
    if (!t.guard) return true;
    Value v;
    try {
        v = eval_expr(*t.guard, ctx);
    } catch (const EvalError& e) {
        throw GuardTypeError("guard of '" + edge_key(t) + "' failed to evaluate: " + e.what());
    }
    const bool* b = std::get_if<bool>(&v);
    if (!b)
        throw GuardTypeError("guard of '" + edge_key(t) + "' evaluated to " +
                             std::string(to_string(type_of(v))) + ", not bool");
    return *b;
}

std::vector<const Transition*> enabled_transitions(const EfsmModel& model, std::string_view current,
                                                   const Context& ctx) {
    std::vector<const Transition*> out;
    for (std::size_t i : model.outgoing(current)) {
        const Transition& t = model.transitions()[i];
        if (guard_holds(t, ctx)) out.push_back(&t);
    }
    return out;
}

Applied apply_transition(const EfsmModel& model, const Transition& t, const Context& ctx) {
    if (!model.contains(t)) throw ModelError("transition '" + edge_key(t) + "' is not part of model '" + model.name() + "'");
    if (!guard_holds(t, ctx)) throw GuardViolation("guard of '" + edge_key(t) + "' is false");
    return Applied{t.target, exec_actions(t.actions, ctx)};
}

}  // namespace mbt
