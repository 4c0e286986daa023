#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mbt/generator.hpp"
#include "mbt/model_io.hpp"
#include "mbt/serialize.hpp"

namespace mbt {

using StringMap = std::map<std::string, std::string>;

struct DriverCommand {
    std::string name;
    StringMap args;
    /// Response field -> expected value. The key "status" compares against
    /// "ok" / "error" instead of a response field.
    std::optional<StringMap> expect;

    friend bool operator==(const DriverCommand&, const DriverCommand&) = default;
};

enum class Flavor { Exec, Raw };

std::string_view to_string(Flavor f);
Flavor flavor_from_string(std::string_view s);

struct Fragment {
    std::vector<DriverCommand> commands;  // exec flavor
    std::string text;                     // raw flavor
    bool todo = false;

    friend bool operator==(const Fragment&, const Fragment&) = default;
};

struct Group {
    std::optional<std::string> extends;
    std::map<std::string, Fragment> entries;

    friend bool operator==(const Group&, const Group&) = default;
};

class MappingTable {
public:
    static constexpr const char* kBaseGroup = "base";

    explicit MappingTable(Flavor flavor = Flavor::Exec) : flavor_(flavor) {}

    Flavor flavor() const noexcept { return flavor_; }
    const std::string& model_hash() const noexcept { return modelHash_; }
    void set_model_hash(std::string h) { modelHash_ = std::move(h); }

    const std::map<std::string, Group>& groups() const noexcept { return groups_; }
    std::map<std::string, Group>& groups() noexcept { return groups_; }
    bool has_group(std::string_view name) const { return groups_.find(std::string(name)) != groups_.end(); }

    /// Every label with an entry in some group.
    std::set<std::string> labels() const;

    /// Throws TableError on unknown parents, cycles, or mixed flavors.
    void check() const;

    friend bool operator==(const MappingTable&, const MappingTable&) = default;

private:
    Flavor flavor_;
    std::string modelHash_;
    std::map<std::string, Group> groups_;
};

json to_json(const MappingTable& table);
MappingTable table_from_json(const json& j);
/// Pretty, sorted-key JSON with a trailing newline.
std::string dump_table(const MappingTable& table);
MappingTable parse_table(std::string_view text);

struct ChangeReport {
    std::vector<std::string> added;
    std::vector<std::string> stale;
};

/// Adds TODO templates to the base group for unmapped labels and flags
/// entries whose label is gone from the inventory. Existing entries are kept.
std::pair<MappingTable, ChangeReport> update_table(MappingTable table, const LabelInventory& inventory);

/// Group lookup along the extends chain, child first.
const Fragment& resolve(const MappingTable& table, const std::string& label, const std::string& group);

/// Maps a state label to the group its step (and the transitions leaving
/// it) resolve in.
using GroupFor = std::function<std::string(const std::string& stateLabel)>;

/// Innermost submodel prefix of the state ("InGame.Home.v_Home" -> "Home")
/// when the table has such a group, else "base".
GroupFor default_group_for(const MappingTable& table);

struct ResolvedStep {
    LabelKind kind = LabelKind::State;
    std::string label;
    std::string group;
    Fragment fragment;

    friend bool operator==(const ResolvedStep&, const ResolvedStep&) = default;
};

struct ConcreteTestCase {
    std::size_t id = 0;
    std::size_t sourceAbstractId = 0;
    std::vector<ResolvedStep> steps;

    friend bool operator==(const ConcreteTestCase&, const ConcreteTestCase&) = default;
};

/// Replaces {{name}} with the rendered value of name in ctx.
std::string substitute(std::string_view text, const Context& ctx, const std::string& label);

/// Throws HashMismatch when the table was built for a different model than
/// the suite, then MissingLabel / TodoFragment / UnresolvedPlaceholder.
ConcreteTestCase instantiate(const AbstractTestCase& abstract, const MappingTable& table, const GroupFor& groupFor,
                             std::string_view suiteModelHash);

std::string emit_text(const ConcreteTestCase& concrete);

std::string concrete_to_jsonl(const std::vector<ConcreteTestCase>& suite);
std::vector<ConcreteTestCase> concrete_from_jsonl(std::string_view text);

}  // namespace mbt
