#pragma once

#include <string>
#include <string_view>

#include "json.hpp"
#include "mbt/efsm.hpp"
#include "mbt/value.hpp"

namespace mbt {

using json = nlohmann::json;

json to_json(const Value& v);
/// Infers the alternative from the JSON kind (array -> list of strings).
Value value_from_json(const json& j);

json to_json(const Context& ctx);
/// Rebuilds a context against declarations; names and types must match.
Context context_from_json(const json& j, const VarDecls& decls);
/// Rebuilds a context without declarations (types inferred).
Context context_from_json(const json& j);

/// Canonical, declaration-order-insensitive form: states, transitions and
/// variables are sorted. Used for content hashing.
json canonical_json(const EfsmModel& model);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

/// sha256 over the canonical serialization.
std::string content_hash(const EfsmModel& model);

/// Compact serialization; nlohmann objects are key-sorted already.
inline std::string dump_canonical(const json& j) { return j.dump(); }

}  // namespace mbt
