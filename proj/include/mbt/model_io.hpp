#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mbt/efsm.hpp"

namespace mbt {

/// A set of models whose states may reference each other as submodels.
struct ModelBundle {
    std::map<std::string, EfsmModel> models;
    std::string mainModel;
};

// GraphML subset: the top-level <graph>'s <node>/<edge> elements and the
// first text label of each. Node label: "v_Name" then optional marker
// lines START, EXIT, SUBMODEL <name>. Edge label:
// "e_Name [guard] / action; action;". Graph-level <data> whose key is named
// "variables" holds `var` declarations in DSL syntax; one named "name"
// overrides the graph id as the model name.
EfsmModel parse_graphml(std::string_view bytes);

// Textual front end:
//   model Name {
//     var x: int = 0;
//     state v_A start;  state v_B exit;  state v_C submodel Sub;
//     trans e_Go: v_A -> v_B guard "x > 0" do "x = x - 1;";
//   }
ModelBundle parse_dsl(std::string_view text);

/// Parses `var name: type = literal;` lines (the body of a GraphML
/// variables block).
VarDecls parse_var_decls(std::string_view text);

/// The model that no other model references. Throws ModelError when
/// there is not exactly one.
std::string find_root_model(const std::map<std::string, EfsmModel>& models);

/// Reads a .efsm or .graphml file, or every such file in a directory.
ModelBundle load_bundle(const std::filesystem::path& path);

/// load_bundle followed by flatten.
EfsmModel load_model(const std::filesystem::path& path);

/// Replaces each submodel-referencing state S by a copy of the (flattened)
/// submodel M whose state labels are prefixed "M.". Edges into S go to M's
/// start; every EXIT state of M inherits S's outgoing edges.
EfsmModel flatten(const ModelBundle& bundle);

struct Reachability {
    std::set<std::string> states;
    std::set<std::size_t> transitions;  // indices into model.transitions()
};

/// Graph reachability from the start state, ignoring guards.
Reachability reachable(const EfsmModel& model);

struct Finding {
    std::string kind;     // unreachable-state, unreachable-transition, type-error, ...
    std::string subject;  // label or edge key
    std::string message;

    friend bool operator==(const Finding&, const Finding&) = default;
};

struct ValidationReport {
    std::vector<Finding> findings;

    bool clean() const noexcept { return findings.empty(); }
    std::vector<std::string> subjects(std::string_view kind) const;
};

ValidationReport validate(const EfsmModel& model);

struct LabelInventory {
    std::vector<std::string> stateLabels;
    std::vector<std::string> transitionLabels;
    std::string sourceModel;
    std::string contentHash;

    std::vector<std::string> all() const;

    friend bool operator==(const LabelInventory&, const LabelInventory&) = default;
};

LabelInventory extract_labels(const EfsmModel& model);

}  // namespace mbt
