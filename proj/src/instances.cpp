#include "balance/instances.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace balance {

namespace {

Vec rotate90(const Vec& v) { return {-v[1], v[0]}; }

Vec unit_or_e1(Vec v) {
    double n = two_norm(v);
    if (n < 1e-12) return {1.0, 0.0};
    for (double& x : v) x /= n;
    return v;
}

int left_child(const RootedTree& t, int v) { return t.children[v][0]; }
int right_child(const RootedTree& t, int v) { return t.children[v][1]; }

}  // namespace

Vec sample_noise(const NoiseModel& noise, int d, CounterRng& rng) {
    double eps = noise.epsilon;
    if (eps <= 0 || eps > 1)
        throw std::invalid_argument("noise: epsilon must be in (0,1]");
    switch (noise.kind) {
        case NoiseModel::Kind::uniform_sphere_scaled: {
            // radius eps*sqrt(d) makes the covariance exactly eps^2 I
            double r = eps * std::sqrt(static_cast<double>(d));
            if (r > 1.0 + kTol)
                throw std::invalid_argument(
                    "noise: eps*sqrt(d) > 1 leaves the unit ball");
            Vec v = rng.unit_vector(d);
            for (double& x : v) x *= r;
            return v;
        }
        case NoiseModel::Kind::coordinate_flip: {
            Vec v(d, 0.0);
            if (rng.next_double() < eps) {
                int i = rng.next_int(0, d - 1);
                v[i] = (rng.next_double() < 0.5) ? eps : -eps;
            }
            return v;
        }
        case NoiseModel::Kind::gaussian_truncated: {
            for (;;) {
                Vec v(d);
                for (double& x : v) x = eps * rng.next_gaussian();
                if (two_norm(v) <= 1.0) return v;
            }
        }
    }
    throw std::logic_error("noise: unknown kind");
}

TreeInstance gen_adversarial_binary_tree(int h) {
    if (h < 1) throw std::invalid_argument("tree height must be positive");
    if (h > 20) throw std::invalid_argument("tree height above size guard");
    int t = (1 << h) - 1;
    std::vector<int> parent(t);
    for (int v = 0; v < t; ++v) parent[v] = (v == 0) ? -1 : (v - 1) / 2;
    RootedTree tree(std::move(parent), 0);

    std::vector<Vec> vecs(t);
    std::vector<Vec> canon(t, Vec{0.0, 0.0});  // running canonical prefix,
                                               // path excluding the vertex
    vecs[0] = {1.0, 0.0};
    for (int v = 0; v < t; ++v) {
        if (tree.children[v].empty()) continue;
        Vec minus = canon[v], plus = canon[v];
        axpy(-1.0, vecs[v], minus);  // d_v^- : the branch turning left
        axpy(+1.0, vecs[v], plus);   // d_v^+
        int l = left_child(tree, v), r = right_child(tree, v);
        vecs[l] = rotate90(unit_or_e1(minus));
        vecs[r] = rotate90(unit_or_e1(plus));
        canon[l] = minus;
        canon[r] = plus;
    }
    return {std::move(tree), VectorSequence(2, std::move(vecs),
                                            NormClass::two_ball)};
}

TreeInstance gen_stochastic_lary_tree(int l, int h, uint64_t seed) {
    if (l < 1 || h < 1) throw std::invalid_argument("tree shape out of range");
    long long t = 0, level = 1;
    for (int k = 0; k < h; ++k) {
        t += level;
        level *= l;
        if (t > 5'000'000) throw std::invalid_argument("tree above size guard");
    }
    int n = static_cast<int>(t);
    std::vector<int> parent(n);
    for (int v = 0; v < n; ++v) parent[v] = (v == 0) ? -1 : (v - 1) / l;
    RootedTree tree(std::move(parent), 0);

    CounterRng rng(seed);
    std::vector<Vec> vecs(n);
    for (int v = 0; v < n; ++v) vecs[v] = rng.unit_vector(2);
    return {std::move(tree), VectorSequence(2, std::move(vecs),
                                            NormClass::two_ball)};
}

std::optional<Embedding> find_embedded_binary_tree(const RootedTree& t,
                                                   const VectorSequence& vs) {
    if (vs.count() != t.num_vertices)
        throw std::invalid_argument("vector/vertex count mismatch");
    if (vs.dim != 2) throw std::invalid_argument("embedding expects d = 2");

    // Top-down search.  A node's canonical prefix (and hence the prefixes of
    // everything below it) depends only on the turns taken above it, not on
    // which sibling was picked on the other side, so the left and right
    // subproblems separate and candidates can be retried independently.
    struct Node {
        int host;
        int left = -1, right = -1;  // indices into pool, -1 at host leaves
    };
    std::vector<Node> pool;

    // returns a pool index for an embedded subtree rooted at host, or -1
    auto solve = [&](auto&& self, int host, const Vec& canon) -> int {
        const std::vector<int>& kids = t.children[host];
        if (kids.empty()) {
            pool.push_back({host});
            return static_cast<int>(pool.size()) - 1;
        }
        size_t half = kids.size() / 2;
        Vec minus = canon, plus = canon;
        axpy(-1.0, vs.vectors[host], minus);
        axpy(+1.0, vs.vectors[host], plus);
        int l = -1, r = -1;
        for (size_t i = 0; i < half && l == -1; ++i)
            if (std::abs(dot(vs.vectors[kids[i]], minus)) <= 0.25)
                l = self(self, kids[i], minus);
        if (l == -1) return -1;
        for (size_t i = half; i < kids.size() && r == -1; ++i)
            if (std::abs(dot(vs.vectors[kids[i]], plus)) <= 0.25)
                r = self(self, kids[i], plus);
        if (r == -1) return -1;
        pool.push_back({host, l, r});
        return static_cast<int>(pool.size()) - 1;
    };
    int root = solve(solve, t.root, Vec{0.0, 0.0});
    if (root == -1) return std::nullopt;

    // flatten breadth-first with (left, right) child order
    Embedding e;
    std::vector<int> parent;
    std::vector<int> queue{root};
    parent.push_back(-1);
    for (size_t head = 0; head < queue.size(); ++head) {
        const Node& cur = pool[queue[head]];
        e.host.push_back(cur.host);
        if (cur.left != -1) {
            queue.push_back(cur.left);
            parent.push_back(static_cast<int>(head));
            queue.push_back(cur.right);
            parent.push_back(static_cast<int>(head));
        }
    }
    e.tree = RootedTree(std::move(parent), 0);
    return e;
}

CanonicalColoring canonical_coloring(const RootedTree& t, int target) {
    if (target < 0 || target >= t.num_vertices)
        throw std::invalid_argument("target out of range");
    CanonicalColoring c;
    c.target = target;
    for (int v = target; t.parent[v] != -1; v = t.parent[v]) {
        int p = t.parent[v];
        if (t.children[p].size() != 2)
            throw std::invalid_argument("canonical coloring needs a binary tree");
        c.assignment[p] = (v == left_child(t, p)) ? int8_t{-1} : int8_t{1};
    }
    return c;
}

int follow_coloring_to_leaf(const RootedTree& t, const Coloring& x) {
    if (static_cast<int>(x.signs.size()) != t.num_vertices)
        throw std::invalid_argument("coloring size mismatch");
    int v = t.root;
    while (!t.children[v].empty()) {
        if (t.children[v].size() != 2)
            throw std::invalid_argument("follow expects a binary tree");
        v = (x.signs[v] < 0) ? left_child(t, v) : right_child(t, v);
    }
    return v;
}

VectorSequence gen_smoothed(const VectorSequence& base,
                            const NoiseModel& noise) {
    CounterRng rng(noise.seed);
    std::vector<Vec> out;
    out.reserve(base.count());
    for (const Vec& v : base.vectors) {
        Vec w = v;
        Vec nz = sample_noise(noise, base.dim, rng);
        axpy(1.0, nz, w);
        double n = two_norm(w);
        if (n > 1.0)
            for (double& x : w) x /= n;
        out.push_back(std::move(w));
    }
    return VectorSequence(base.dim, std::move(out), NormClass::two_ball);
}

Dag gen_chain(int l) {
    if (l < 0) throw std::invalid_argument("chain length must be nonnegative");
    if (l == 0) return Dag(1, {}, 0);
    int t = 2 * l + 1;  // anchors at even ids, bypass vertices at odd ids
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < l; ++i) {
        int a = 2 * i, b = 2 * i + 1, next = 2 * i + 2;
        edges.emplace_back(a, next);
        edges.emplace_back(a, b);
        edges.emplace_back(b, next);
    }
    return Dag(t, std::move(edges), 0);
}

PlantedInstance gen_planted_hard_block(const VectorSequence& hard,
                                       int num_blocks, uint64_t seed) {
    if (num_blocks < 1) throw std::invalid_argument("need at least one block");
    int n = hard.count(), d = hard.dim;
    CounterRng rng(seed);
    PlantedInstance out;
    out.planted_block = rng.next_int(0, num_blocks - 1);
    out.rejection_sampled = false;  // direct perturbation at desk scale

    std::vector<Vec> vecs;
    vecs.reserve(static_cast<size_t>(num_blocks) * n);
    for (int b = 0; b < num_blocks; ++b)
        for (int j = 0; j < n; ++j) {
            if (b == out.planted_block) {
                Vec v = hard.vectors[j];
                Vec w(d);
                for (double& x : w) x = rng.uniform(-1.0, 1.0) / n;
                // halve the perturbation until the vector stays in the ball
                for (int tries = 0; tries < 60; ++tries) {
                    Vec cand = v;
                    axpy(1.0, w, cand);
                    if (two_norm(cand) <= 1.0 + 1e-12) {
                        v = cand;
                        break;
                    }
                    for (double& x : w) x /= 2;
                }
                vecs.push_back(std::move(v));
            } else {
                vecs.push_back(rng.unit_vector(d));
            }
        }
    out.vectors = VectorSequence(d, std::move(vecs), NormClass::two_ball);
    return out;
}

double noise_anticoncentration_check(const NoiseModel& noise, const Vec& u,
                                     int trials) {
    double un = two_norm(u);
    if (un <= 0) throw std::invalid_argument("direction must be nonzero");
    if (trials < 1) throw std::invalid_argument("need at least one trial");
    CounterRng rng(noise.seed);
    int d = static_cast<int>(u.size());
    double thresh = 0.5 * noise.epsilon * un;
    int hits = 0;
    for (int t = 0; t < trials; ++t) {
        Vec x = sample_noise(noise, d, rng);
        if (std::abs(dot(u, x)) >= thresh) ++hits;
    }
    return static_cast<double>(hits) / trials;
}

}  // namespace balance
