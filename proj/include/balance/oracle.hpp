#pragma once

#include "balance/common.hpp"
#include "balance/core.hpp"
#include "balance/dag.hpp"
#include "balance/set_system.hpp"

namespace balance {

struct OracleBudget {
    int max_ground_size = 20;
    long long max_nodes = 50'000'000;
};

/// Globally optimal prefix discrepancy with a witness coloring.
/// Branch-and-bound; ties broken toward the lexicographically smallest
/// coloring (-1 before +1).
DiscrepancyReport exact_prefix_disc(const VectorSequence& vs,
                                    const OracleBudget& budget = {});

DiscrepancyReport exact_dag_disc(const Dag& g, const VectorSequence& vs,
                                 const OracleBudget& budget = {});

DiscrepancyReport exact_comb_disc(const SetSystem& ss, const VectorSequence& vs,
                                  const OracleBudget& budget = {});

/// Combinatorial discrepancy with all-ones scalars (integer valued).
int set_disc(const SetSystem& ss, const OracleBudget& budget = {});

/// Exact hereditary discrepancy: max over restrictions J of Disc(F|_J).
/// Subsets are enumerated in decreasing cardinality with the Disc <= |J|
/// bound as an early exit.
int herdisc(const SetSystem& ss, const OracleBudget& budget = {});

}  // namespace balance
