#pragma once

#include "balance/common.hpp"
#include "balance/core.hpp"
#include "balance/dag.hpp"
#include "balance/oracle.hpp"

namespace balance {

/// Prefix-discrepancy coloring for a rooted tree (or forest): root-to-leaf
/// greedy choosing each sign to minimize the running prefix norm (tie -> +1).
/// When the tree fits the exact budget, branch-and-bound is used instead and
/// the report is marked exact.
DiscrepancyReport tree_prefix_solve(const RootedTree& t, const VectorSequence& vs,
                                    const OracleBudget& budget = {});

/// d=1 greedy keeping every running prefix sum in [-1,1]; value <= 1 is a
/// hard guarantee for scalars in [-1,1].
DiscrepancyReport tree_scalar_solve(const RootedTree& t, const Vec& scalars);

}  // namespace balance
