#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "balance/core.hpp"
#include "balance/dag.hpp"
#include "balance/set_system.hpp"

namespace balance {

/// On-disk instance: a vector sequence plus the structure the discrepancy
/// is measured against. Indices are 0-based on the wire.
struct Instance {
    enum class Kind { path, tree, dag, sets };

    VectorSequence vectors;
    Kind kind = Kind::path;
    std::optional<RootedTree> tree;
    std::optional<Dag> dag;
    std::optional<SetSystem> sets;
};

nlohmann::json instance_to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& j);

Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);

}  // namespace balance
