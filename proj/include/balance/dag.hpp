#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "balance/common.hpp"
#include "balance/core.hpp"
#include "balance/set_system.hpp"

namespace balance {

/// Directed acyclic graph on vertices 0..T-1 with a distinguished root.
/// Acyclicity is verified on construction; the root must be a source and is
/// placed first in the stored topological order. Vertices unreachable from
/// the root are permitted but flagged.
struct Dag {
    int num_vertices = 0;
    std::vector<std::pair<int, int>> edges;
    int root = 0;

    // derived on construction
    std::vector<std::vector<int>> out;
    std::vector<std::vector<int>> in;
    std::vector<int> topo;           // deterministic Kahn order, root first
    std::vector<bool> reachable;     // from root

    Dag() = default;
    Dag(int t, std::vector<std::pair<int, int>> e, int r);

    bool has_edge(int u, int v) const;
};

/// Rooted tree (or forest) as a parent map; parent[v] == -1 marks a root.
/// `root` is the primary root. When built as a subgraph of a Dag, every
/// (parent[v], v) must be an edge of that Dag.
struct RootedTree {
    int num_vertices = 0;
    std::vector<int> parent;
    int root = 0;
    std::vector<std::vector<int>> children;  // sorted by vertex id

    RootedTree() = default;
    RootedTree(std::vector<int> par, int r);

    std::vector<int> roots() const;
    /// Vertices of the path from this vertex's tree root down to v.
    std::vector<int> path_from_root(int v) const;
    Dag as_dag() const;  // single-rooted trees only
};

/// A spanning tree in the undirected sense: a subset of the DAG's edges
/// that is acyclic as an undirected graph. A vertex may carry two tree
/// in-edges (a diamond forces this), so a parent map cannot represent it.
struct TreeSubgraph {
    int num_vertices = 0;
    int root = 0;
    std::vector<std::pair<int, int>> edges;  // each one an edge of the DAG

    bool contains(int u, int v) const;
    /// Orientation away from the root by undirected BFS; used to drive the
    /// path-coloring solver. Parent edges may be reversed DAG edges.
    RootedTree orient_from_root() const;
    /// True when every vertex has at most one tree in-edge, i.e. the tree
    /// is already oriented consistently with the DAG.
    bool is_arborescence() const;
};

/// m_v = max number of non-tree edges on any path starting at v.
struct NonTreeProfile {
    std::vector<int> m;
};

/// A chain witness: anchors joined consecutively by two internally
/// vertex-disjoint paths, one of which has an internal vertex.
struct ChainReport {
    int length = 0;
    std::vector<int> anchors;
    // per consecutive anchor pair: the two disjoint paths (vertex lists,
    // endpoints included)
    std::vector<std::pair<std::vector<int>, std::vector<int>>> path_pairs;
};

/// Deterministic Kahn order with smallest-identifier tie-break.
std::vector<int> topological_order(const Dag& g);

/// The family of vertex sets of root-starting paths (all lengths >= 1).
/// Throws BudgetExceeded when the number of paths exceeds `limit`.
SetSystem prefix_family(const Dag& g, long long limit);

/// True iff there are two internally-vertex-disjoint a->b paths, at least
/// one with an internal vertex. Decided by vertex-split max-flow >= 2.
bool chain_step(const Dag& g, int a, int b);

/// Longest path from `from` in the meta-DAG whose edges are chain_step
/// pairs, with an anchor witness.
ChainReport chain_length(const Dag& g, int from);

/// ell_v for every vertex: the longest chain anywhere in the sub-DAG
/// reachable from v.
std::vector<int> chain_ell_values(const Dag& g);

NonTreeProfile nontree_profile(const Dag& g, const TreeSubgraph& t);

/// Removes e=(a,b) from t; requires e in t and m_a(t) > m_b(t). The full
/// m-profile is re-verified to be unchanged; a mismatch throws.
TreeSubgraph remove_free_edge(const Dag& g, const TreeSubgraph& t,
                              std::pair<int, int> e);

struct ReduceTrace {
    std::vector<std::string> events;
};

/// Builds a tree T subset of g with m_v(T) <= ell_v + 1 for every v,
/// visiting vertices in reverse topological order and resolving undirected
/// cycles by either stopping (apex m equal) or removing a free edge. The +1
/// is unavoidable: in the complete bipartite gadget {a,b} -> {c,d} every
/// tree omits one of the four edges, giving its tail m = 1 while no chain
/// exists below it (the two a->? paths never reconverge).
std::pair<TreeSubgraph, ReduceTrace> reduce_to_tree(const Dag& g);

/// ell_C / 4.
double herdisc_lower_from_chain(const ChainReport& report);

struct DagSolveResult {
    DiscrepancyReport report;
    int max_nontree_edges = 0;      // m_root of the reduced tree
    double tree_prefix_value = 0.0; // achieved max tree-prefix norm
    double decomposition_bound = 0.0;
};

struct OracleBudget;

/// reduce_to_tree -> tree coloring -> dag_disc_value. The decomposition
/// bound is (m_root + 1) * c * (achieved tree prefix bound) where c = 2
/// when the tree is an arborescence (every tree sub-path is a difference
/// of two root prefixes) and c = 4 otherwise (a sub-path may bend at an
/// ancestor and needs four prefixes).
DagSolveResult dag_disc_solve(const Dag& g, const VectorSequence& vs);

struct CharacterizationRecord {
    int herdisc = 0;
    int ell_root = 0;
    int m_root_reduced = 0;
    int min_sampled_nontree = 0;
};

CharacterizationRecord characterization_gap(const Dag& g,
                                            const OracleBudget& budget,
                                            int tree_samples = 32,
                                            uint64_t seed = 0);

}  // namespace balance
