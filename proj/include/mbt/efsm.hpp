#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mbt/expr.hpp"
#include "mbt/value.hpp"

namespace mbt {

enum class LabelKind { State, Transition };

/// Kind recovered from label text: the last dot-separated segment starts
/// with "v_" (state) or "e_" (transition).
std::optional<LabelKind> label_kind(std::string_view label);

/// Drops flattening prefixes: "InGame.Home.v_Home" -> "v_Home".
std::string_view local_label(std::string_view label);

struct State {
    std::string label;
    /// Handle resolved against the mapping table; parsers set it to the label.
    std::optional<std::string> assertion;
    bool isStart = false;
    bool isExit = false;
    std::optional<std::string> submodel;

    friend bool operator==(const State&, const State&) = default;
};

struct Transition {
    std::string label;
    std::string source;
    std::string target;
    ExprPtr guard;  // null when unguarded
    Actions actions;

    friend bool operator==(const Transition& a, const Transition& b);
};

/// "src --label--> dst", the unique identity of an edge.
std::string edge_key(const Transition& t);
std::string edge_key(std::string_view source, std::string_view label, std::string_view target);

/// Immutable after construction. Dangling transition endpoints are
/// rejected with ModelError; other defects (duplicate labels, missing
/// start) are left for validate().
class EfsmModel {
public:
    EfsmModel() = default;
    EfsmModel(std::string name, std::vector<State> states, std::vector<Transition> transitions,
              VarDecls variables);

    const std::string& name() const noexcept { return name_; }
    const std::vector<State>& states() const noexcept { return states_; }
    const std::vector<Transition>& transitions() const noexcept { return transitions_; }
    const VarDecls& variables() const noexcept { return variables_; }

    const State* find_state(std::string_view label) const;
    const State* start_state() const;

    /// Indices into transitions(), in declaration order.
    const std::vector<std::size_t>& outgoing(std::string_view state) const;

    const Transition* find_transition(std::string_view source, std::string_view label,
                                      std::string_view target) const;

    bool contains(const Transition& t) const;

    Context initial_context() const { return Context(variables_); }

    friend bool operator==(const EfsmModel& a, const EfsmModel& b);

private:
    std::string name_;
    std::vector<State> states_;
    std::vector<Transition> transitions_;
    VarDecls variables_;
    std::unordered_map<std::string, std::size_t> state_index_;
    std::unordered_map<std::string, std::vector<std::size_t>> outgoing_;
    std::unordered_map<std::string, std::size_t> edge_index_;
};

/// Outgoing transitions of `current` whose guard is absent or true under
/// ctx, in declaration order.
std::vector<const Transition*> enabled_transitions(const EfsmModel& model, std::string_view current,
                                                   const Context& ctx);

/// Evaluates t's guard; GuardTypeError when it is not boolean.
bool guard_holds(const Transition& t, const Context& ctx);

struct Applied {
    std::string target;
    Context context;
};

/// Re-checks the guard, then runs the actions on a copy of ctx.
Applied apply_transition(const EfsmModel& model, const Transition& t, const Context& ctx);

}  // namespace mbt
