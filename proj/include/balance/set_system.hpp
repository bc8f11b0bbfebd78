#pragma once

#include <vector>

#include "balance/common.hpp"

namespace balance {

/// A family of subsets of [T]. Duplicate sets are removed on construction;
/// each set is stored sorted.
struct SetSystem {
    int ground_size = 0;
    std::vector<std::vector<int>> sets;

    SetSystem() = default;
    SetSystem(int t, std::vector<std::vector<int>> s);

    int size() const { return static_cast<int>(sets.size()); }
};

}  // namespace balance
