#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "balance/core.hpp"
#include "balance/dag.hpp"
#include "balance/rng.hpp"

namespace balance {

/// Perturbation model: every sample lies in the unit 2-ball; the sphere and
/// truncated-Gaussian kinds have covariance close to epsilon^2 I.
struct NoiseModel {
    enum class Kind { uniform_sphere_scaled, coordinate_flip, gaussian_truncated };

    Kind kind = Kind::uniform_sphere_scaled;
    double epsilon = 0.1;
    uint64_t seed = 0;
};

/// One noise draw of dimension d.
Vec sample_noise(const NoiseModel& noise, int d, CounterRng& rng);

/// The +-1 pattern along the root-to-target path of a binary tree:
/// -1 where the path turns to the left child, +1 to the right.
struct CanonicalColoring {
    int target = 0;
    std::map<int, int8_t> assignment;  // over path vertices except target
};

struct TreeInstance {
    RootedTree tree;
    VectorSequence vectors;
};

/// Complete binary tree of h levels (T = 2^h - 1), d = 2. The root gets
/// e1; each child's vector is the unit vector orthogonal to the branch's
/// running canonical discrepancy, so the squared l2 prefix norm grows by
/// exactly one per step along every root-leaf path.
TreeInstance gen_adversarial_binary_tree(int h);

/// Complete l-ary tree of h levels with i.i.d. uniform unit-circle vectors.
TreeInstance gen_stochastic_lary_tree(int l, int h, uint64_t seed);

/// A binary subtree embedded in a host tree; node i of `tree` sits at host
/// vertex host[i].
struct Embedding {
    RootedTree tree;
    std::vector<int> host;
};

/// Top-down backtracking search for a full binary subtree of the same
/// height as the host whose child vectors are nearly orthogonal (inner
/// product <= 1/4) to the running canonical discrepancy: left children
/// among the first half of each vertex's children, right among the second
/// half.  Finds an embedding whenever one exists under those rules.
std::optional<Embedding> find_embedded_binary_tree(const RootedTree& t,
                                                   const VectorSequence& vs);

CanonicalColoring canonical_coloring(const RootedTree& t, int target);

/// The unique leaf whose canonical coloring agrees with x along its path
/// (binary trees only; -1 walks left).
int follow_coloring_to_leaf(const RootedTree& t, const Coloring& x);

/// v_t = base_t + noise draw, clamped into the unit 2-ball class.
VectorSequence gen_smoothed(const VectorSequence& base, const NoiseModel& noise);

/// Chain of length l: anchors joined by one direct edge and one 2-edge
/// path through a fresh vertex.
Dag gen_chain(int l);

struct PlantedInstance {
    VectorSequence vectors;
    int planted_block = 0;    // which block holds the near-copy
    bool rejection_sampled = false;  // false: direct perturbation was used
};

/// num_blocks blocks of uniform-sphere vectors with one block replaced by
/// an entrywise <=1/n perturbation of `hard`.
PlantedInstance gen_planted_hard_block(const VectorSequence& hard,
                                       int num_blocks, uint64_t seed);

/// Monte-Carlo estimate of P[|u . X| >= epsilon ||u||_2 / 2].
double noise_anticoncentration_check(const NoiseModel& noise, const Vec& u,
                                     int trials);

}  // namespace balance
