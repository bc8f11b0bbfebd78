#include "balance/dag.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

#include "balance/oracle.hpp"
#include "balance/rng.hpp"
#include "balance/treesolve.hpp"

namespace balance {

namespace {

std::string edge_str(int u, int v) {
    std::ostringstream os;
    os << u << "->" << v;
    return os.str();
}

}  // namespace

Dag::Dag(int t, std::vector<std::pair<int, int>> e, int r)
    : num_vertices(t), root(r) {
    if (t <= 0) throw std::invalid_argument("dag: need at least one vertex");
    if (r < 0 || r >= t) throw std::invalid_argument("dag: root missing");
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    out.assign(t, {});
    in.assign(t, {});
    for (auto [u, v] : e) {
        if (u < 0 || u >= t || v < 0 || v >= t)
            throw std::invalid_argument("dag: edge endpoint out of range");
        if (u == v) throw std::invalid_argument("dag: not acyclic");
        out[u].push_back(v);
        in[v].push_back(u);
    }
    edges = std::move(e);
    if (!in[root].empty())
        throw std::invalid_argument("dag: root must be a source");

    // Kahn with a smallest-identifier heap; the root goes first.
    std::vector<int> deg(t);
    for (int v = 0; v < t; ++v) deg[v] = static_cast<int>(in[v].size());
    std::priority_queue<int, std::vector<int>, std::greater<int>> heap;
    for (int v = 0; v < t; ++v)
        if (deg[v] == 0 && v != root) heap.push(v);
    topo.reserve(t);
    topo.push_back(root);
    for (int w : out[root])
        if (--deg[w] == 0) heap.push(w);
    while (!heap.empty()) {
        int v = heap.top();
        heap.pop();
        topo.push_back(v);
        for (int w : out[v])
            if (--deg[w] == 0) heap.push(w);
    }
    if (static_cast<int>(topo.size()) != t)
        throw std::invalid_argument("dag: not acyclic");

    reachable.assign(t, false);
    std::deque<int> bfs{root};
    reachable[root] = true;
    while (!bfs.empty()) {
        int v = bfs.front();
        bfs.pop_front();
        for (int w : out[v])
            if (!reachable[w]) {
                reachable[w] = true;
                bfs.push_back(w);
            }
    }
}

bool Dag::has_edge(int u, int v) const {
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(u, v));
}

RootedTree::RootedTree(std::vector<int> par, int r)
    : num_vertices(static_cast<int>(par.size())), parent(std::move(par)), root(r) {
    int t = num_vertices;
    if (t <= 0) throw std::invalid_argument("tree: need at least one vertex");
    if (r < 0 || r >= t || parent[r] != -1)
        throw std::invalid_argument("tree: bad root");
    children.assign(t, {});
    for (int v = 0; v < t; ++v) {
        if (parent[v] == v || parent[v] < -1 || parent[v] >= t)
            throw std::invalid_argument("tree: bad parent entry");
        if (parent[v] >= 0) children[parent[v]].push_back(v);
    }
    // a parent map is a forest iff every parent chain terminates
    std::vector<int> state(t, 0);
    for (int v = 0; v < t; ++v) {
        int x = v;
        std::vector<int> seen;
        while (x != -1 && state[x] == 0) {
            state[x] = 1;
            seen.push_back(x);
            x = parent[x];
        }
        if (x != -1 && state[x] == 1)
            throw std::invalid_argument("tree: parent cycle");
        for (int s : seen) state[s] = 2;
    }
}

std::vector<int> RootedTree::roots() const {
    std::vector<int> rs;
    for (int v = 0; v < num_vertices; ++v)
        if (parent[v] == -1) rs.push_back(v);
    return rs;
}

std::vector<int> RootedTree::path_from_root(int v) const {
    std::vector<int> path;
    for (int x = v; x != -1; x = parent[x]) path.push_back(x);
    std::reverse(path.begin(), path.end());
    return path;
}

Dag RootedTree::as_dag() const {
    if (roots().size() != 1)
        throw std::invalid_argument("tree: forest has no single root");
    std::vector<std::pair<int, int>> e;
    for (int v = 0; v < num_vertices; ++v)
        if (parent[v] >= 0) e.emplace_back(parent[v], v);
    return Dag(num_vertices, std::move(e), root);
}

bool TreeSubgraph::contains(int u, int v) const {
    return std::find(edges.begin(), edges.end(), std::make_pair(u, v)) !=
           edges.end();
}

RootedTree TreeSubgraph::orient_from_root() const {
    std::vector<std::vector<int>> adj(num_vertices);
    for (auto [u, v] : edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    std::vector<int> parent(num_vertices, -1);
    std::vector<bool> seen(num_vertices, false);
    // orient the root's component first, then remaining components from
    // their smallest vertex
    std::vector<int> starts{root};
    for (int v = 0; v < num_vertices; ++v) starts.push_back(v);
    for (int s : starts) {
        if (seen[s]) continue;
        seen[s] = true;
        std::deque<int> bfs{s};
        while (!bfs.empty()) {
            int x = bfs.front();
            bfs.pop_front();
            for (int y : adj[x])
                if (!seen[y]) {
                    seen[y] = true;
                    parent[y] = x;
                    bfs.push_back(y);
                }
        }
    }
    return RootedTree(std::move(parent), root);
}

bool TreeSubgraph::is_arborescence() const {
    std::vector<int> indeg(num_vertices, 0);
    for (auto [u, v] : edges)
        if (++indeg[v] > 1) return false;
    return true;
}

std::vector<int> topological_order(const Dag& g) { return g.topo; }

SetSystem prefix_family(const Dag& g, long long limit) {
    std::vector<std::vector<int>> sets;
    long long count = 0;
    std::vector<int> path;
    // enumerate every root-starting path by DFS
    struct Frame {
        int v;
        size_t next = 0;
    };
    std::vector<Frame> stack{{g.root}};
    path.push_back(g.root);
    auto record = [&] {
        if (++count > limit)
            throw BudgetExceeded("prefix family exceeds path budget");
        std::vector<int> s = path;
        std::sort(s.begin(), s.end());
        sets.push_back(std::move(s));
    };
    record();
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.next < g.out[f.v].size()) {
            int w = g.out[f.v][f.next++];
            stack.push_back({w});
            path.push_back(w);
            record();
        } else {
            stack.pop_back();
            path.pop_back();
        }
    }
    return SetSystem(g.num_vertices, std::move(sets));
}

namespace {

// Max-flow on the vertex-split graph; kept dense because the graphs here
// are small. Returns the flow value (capped at `want`) and, through
// `paths`, a decomposition into `want` internally vertex-disjoint a->b
// paths when the flow reaches it.
int split_flow(const Dag& g, int a, int b, int want,
               std::vector<std::vector<int>>* paths) {
    int n = 2 * g.num_vertices;
    auto vin = [](int v) { return 2 * v; };
    auto vout = [](int v) { return 2 * v + 1; };
    std::vector<std::vector<int>> cap(n, std::vector<int>(n, 0));
    for (int v = 0; v < g.num_vertices; ++v)
        cap[vin(v)][vout(v)] = (v == a || v == b) ? want : 1;
    for (auto [u, v] : g.edges) cap[vout(u)][vin(v)] = 1;
    int s = vout(a), t = vin(b);

    int flow = 0;
    while (flow < want) {
        std::vector<int> prev(n, -1);
        std::deque<int> bfs{s};
        prev[s] = s;
        while (!bfs.empty() && prev[t] == -1) {
            int x = bfs.front();
            bfs.pop_front();
            for (int y = 0; y < n; ++y)
                if (cap[x][y] > 0 && prev[y] == -1) {
                    prev[y] = x;
                    bfs.push_back(y);
                }
        }
        if (prev[t] == -1) break;
        for (int y = t; y != s; y = prev[y]) {
            cap[prev[y]][y] -= 1;
            cap[y][prev[y]] += 1;
        }
        ++flow;
    }
    if (paths != nullptr && flow >= want) {
        // recover the used edges from residual capacities
        std::vector<std::vector<int>> used(n);
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) {
                bool forward =
                    (x / 2 == y / 2)
                        ? (x % 2 == 0 && y % 2 == 1)
                        : (x % 2 == 1 && y % 2 == 0 && g.has_edge(x / 2, y / 2));
                if (!forward) continue;
                int orig = (x / 2 == y / 2 && x / 2 != a && x / 2 != b) ? 1
                           : (x / 2 == y / 2)                           ? want
                                                                        : 1;
                for (int k = 0; k < orig - cap[x][y]; ++k) used[x].push_back(y);
            }
        paths->clear();
        for (int p = 0; p < want; ++p) {
            std::vector<int> verts{a};
            int x = s;
            while (x != t) {
                int y = used[x].back();
                used[x].pop_back();
                if (y / 2 != verts.back()) verts.push_back(y / 2);
                x = y;
            }
            paths->push_back(std::move(verts));
        }
    }
    return flow;
}

}  // namespace

bool chain_step(const Dag& g, int a, int b) {
    if (a == b) return false;
    return split_flow(g, a, b, 2, nullptr) >= 2;
}

namespace {

// longest path lengths in the meta-graph whose edges are chain steps,
// together with the best successor for witness recovery
struct MetaLongest {
    std::vector<int> len;
    std::vector<int> succ;
};

MetaLongest meta_longest(const Dag& g) {
    int t = g.num_vertices;
    std::vector<std::vector<bool>> meta(t, std::vector<bool>(t, false));
    for (int i = 0; i < t; ++i)
        for (int j = 0; j < t; ++j)
            if (i != j) meta[i][j] = chain_step(g, i, j);
    MetaLongest r{std::vector<int>(t, 0), std::vector<int>(t, -1)};
    // meta edges respect the topological order, so one reverse sweep suffices
    for (auto it = g.topo.rbegin(); it != g.topo.rend(); ++it) {
        int v = *it;
        for (int w : g.topo) {
            if (!meta[v][w]) continue;
            if (r.len[w] + 1 > r.len[v] ||
                (r.len[w] + 1 == r.len[v] && w < r.succ[v])) {
                r.len[v] = r.len[w] + 1;
                r.succ[v] = w;
            }
        }
    }
    return r;
}

}  // namespace

ChainReport chain_length(const Dag& g, int from) {
    MetaLongest ml = meta_longest(g);
    ChainReport rep;
    rep.length = ml.len[from];
    for (int v = from; v != -1; v = ml.succ[v]) rep.anchors.push_back(v);
    for (size_t i = 0; i + 1 < rep.anchors.size(); ++i) {
        std::vector<std::vector<int>> paths;
        split_flow(g, rep.anchors[i], rep.anchors[i + 1], 2, &paths);
        if (paths.size() != 2)
            throw std::logic_error("chain witness lost its disjoint paths");
        rep.path_pairs.emplace_back(paths[0], paths[1]);
    }
    return rep;
}

std::vector<int> chain_ell_values(const Dag& g) {
    MetaLongest ml = meta_longest(g);
    int t = g.num_vertices;
    // ell_v looks at chains anywhere in the part reachable from v, not just
    // chains that start at v
    std::vector<int> ell(t, 0);
    for (auto it = g.topo.rbegin(); it != g.topo.rend(); ++it) {
        int v = *it;
        ell[v] = ml.len[v];
        for (int w : g.out[v]) ell[v] = std::max(ell[v], ell[w]);
    }
    return ell;
}

NonTreeProfile nontree_profile(const Dag& g, const TreeSubgraph& t) {
    std::set<std::pair<int, int>> te(t.edges.begin(), t.edges.end());
    NonTreeProfile p{std::vector<int>(g.num_vertices, 0)};
    for (auto it = g.topo.rbegin(); it != g.topo.rend(); ++it) {
        int v = *it;
        for (int w : g.out[v]) {
            int cost = te.count({v, w}) ? 0 : 1;
            p.m[v] = std::max(p.m[v], p.m[w] + cost);
        }
    }
    return p;
}

TreeSubgraph remove_free_edge(const Dag& g, const TreeSubgraph& t,
                              std::pair<int, int> e) {
    if (!t.contains(e.first, e.second))
        throw std::invalid_argument("remove_free_edge: edge not in tree");
    NonTreeProfile before = nontree_profile(g, t);
    if (before.m[e.first] <= before.m[e.second])
        throw std::invalid_argument("remove_free_edge: edge is not free");
    TreeSubgraph smaller = t;
    smaller.edges.erase(
        std::find(smaller.edges.begin(), smaller.edges.end(), e));
    NonTreeProfile after = nontree_profile(g, smaller);
    if (after.m != before.m)
        throw std::logic_error("remove_free_edge: profile changed");
    return smaller;
}

namespace {

struct TreeBuilder {
    const Dag& g;
    std::vector<bool> visited;
    std::set<std::pair<int, int>> tree;        // directed as in g
    std::vector<std::vector<int>> adj;         // undirected view of `tree`
    ReduceTrace trace;

    explicit TreeBuilder(const Dag& dag)
        : g(dag), visited(dag.num_vertices, false), adj(dag.num_vertices) {}

    std::vector<int> profile() const {
        std::vector<int> m(g.num_vertices, 0);
        for (auto it = g.topo.rbegin(); it != g.topo.rend(); ++it) {
            int v = *it;
            if (!visited[v]) continue;
            for (int w : g.out[v])
                m[v] = std::max(m[v], m[w] + (tree.count({v, w}) ? 0 : 1));
        }
        return m;
    }

    // undirected tree path u..v, empty when disconnected
    std::vector<int> tree_path(int u, int v) const {
        std::vector<int> prev(g.num_vertices, -2);
        std::deque<int> bfs{u};
        prev[u] = -1;
        while (!bfs.empty() && prev[v] == -2) {
            int x = bfs.front();
            bfs.pop_front();
            for (int y : adj[x])
                if (prev[y] == -2) {
                    prev[y] = x;
                    bfs.push_back(y);
                }
        }
        if (prev[v] == -2) return {};
        std::vector<int> path;
        for (int x = v; x != -1; x = prev[x]) path.push_back(x);
        std::reverse(path.begin(), path.end());
        return path;  // starts at u, ends at v
    }

    void add(int u, int v) {
        tree.insert({u, v});
        adj[u].push_back(v);
        adj[v].push_back(u);
    }

    void remove(int u, int v) {
        tree.erase({u, v});
        adj[u].erase(std::find(adj[u].begin(), adj[u].end(), v));
        adj[v].erase(std::find(adj[v].begin(), adj[v].end(), u));
    }

    // Removes a tree edge whose profile contribution is slack, verifying
    // that the profile is untouched.
    void remove_verified(int b1, int b2) {
        std::vector<int> before = profile();
        remove(b1, b2);
        if (profile() != before) {
            add(b1, b2);
            throw std::logic_error("tree build: free-edge removal changed profile");
        }
        trace.events.push_back("remove " + edge_str(b1, b2));
    }

    // The cycle created by the candidate edge (u,v) is the tree path u..v
    // closed by (u,v). The apex is the member with the largest topological
    // position; a cycle may have several local sinks, so out-degree alone
    // does not single it out.
    struct Cycle {
        std::vector<int> ring;  // path u..v; (u,v) closes the loop
        std::vector<std::pair<int, int>> dir_edges;  // tree edges, directed
        int apex = -1;
        int apex_pos = -1;
    };

    Cycle make_cycle(const std::vector<int>& path, const std::vector<int>& topo_pos) const {
        Cycle c;
        c.ring = path;
        for (size_t i = 0; i + 1 < path.size(); ++i) {
            int x = path[i], y = path[i + 1];
            if (tree.count({x, y}))
                c.dir_edges.emplace_back(x, y);
            else
                c.dir_edges.emplace_back(y, x);
        }
        for (size_t i = 0; i < path.size(); ++i)
            if (c.apex == -1 || topo_pos[path[i]] > topo_pos[c.apex]) {
                c.apex = path[i];
                c.apex_pos = static_cast<int>(i);
            }
        return c;
    }

    // shortest distance around the ring from `v` to the apex
    int dist_to_apex(const Cycle& c, int v) const {
        int len = static_cast<int>(c.ring.size());
        for (int i = 0; i < len; ++i)
            if (c.ring[i] == v) {
                int d = std::abs(i - c.apex_pos);
                return std::min(d, len - d);
            }
        throw std::logic_error("tree build: vertex not on its cycle");
    }

    void run() {
        std::vector<int> topo_pos(g.num_vertices);
        for (int i = 0; i < g.num_vertices; ++i) topo_pos[g.topo[i]] = i;
        for (auto it = g.topo.rbegin(); it != g.topo.rend(); ++it) {
            int u = *it;
            visited[u] = true;
            if (g.out[u].empty()) continue;
            std::vector<int> m = profile();
            std::vector<int> kids = g.out[u];
            std::stable_sort(kids.begin(), kids.end(), [&](int a, int b) {
                return m[a] != m[b] ? m[a] > m[b] : a < b;
            });
            bool stopped = false;
            for (int v : kids) {
                for (int attempt = 0; attempt < 2; ++attempt) {
                    // additions for earlier children shift the profile, so
                    // the cycle cases must look at a fresh one
                    m = profile();
                    std::vector<int> path = tree_path(u, v);
                    if (path.empty()) {
                        // connecting two components can never close a cycle,
                        // so this stays legal (and keeps the tree spanning)
                        // even after a Case-1 stop
                        add(u, v);
                        trace.events.push_back("add " + edge_str(u, v));
                        break;
                    }
                    if (stopped) break;
                    Cycle c = make_cycle(path, topo_pos);
                    if (m[c.apex] == m[v]) {
                        trace.events.push_back("cycle at " + edge_str(u, v) +
                                               ": apex matches, stop");
                        stopped = true;
                        break;
                    }
                    // tree edges only ever step m downward, so m_apex < m_v
                    // forces a strict drop somewhere on the cycle
                    std::pair<int, int> best{-1, -1};
                    int best_d = -1;
                    for (auto [x, y] : c.dir_edges) {
                        if (m[x] <= m[y]) continue;
                        int d = dist_to_apex(c, y);
                        if (best_d == -1 || d < best_d ||
                            (d == best_d && std::make_pair(x, y) < best)) {
                            best = {x, y};
                            best_d = d;
                        }
                    }
                    if (best.first == -1)
                        throw std::logic_error("tree build: no free edge in cycle");
                    remove_verified(best.first, best.second);
                    // the removed edge lay on the unique u..v tree path, so
                    // the retry is guaranteed to connect without a cycle
                }
            }
        }
    }
};

}  // namespace

std::pair<TreeSubgraph, ReduceTrace> reduce_to_tree(const Dag& g) {
    TreeBuilder b(g);
    b.run();
    TreeSubgraph t;
    t.num_vertices = g.num_vertices;
    t.root = g.root;
    t.edges.assign(b.tree.begin(), b.tree.end());
    return {std::move(t), std::move(b.trace)};
}

double herdisc_lower_from_chain(const ChainReport& report) {
    return report.length / 4.0;
}

DagSolveResult dag_disc_solve(const Dag& g, const VectorSequence& vs) {
    if (vs.count() != g.num_vertices)
        throw std::invalid_argument("dag solve: vertex/vector count mismatch");
    auto [tree, trace] = reduce_to_tree(g);
    (void)trace;
    NonTreeProfile profile = nontree_profile(g, tree);
    int m_root = profile.m[g.root];

    RootedTree oriented = tree.orient_from_root();
    DiscrepancyReport tree_rep = tree_prefix_solve(oriented, vs);

    DagSolveResult res;
    res.max_nontree_edges = m_root;
    res.tree_prefix_value = tree_rep.value;
    // a path sub-walk inside an arborescence is a difference of two root
    // prefixes; with reversed tree edges it can bend once and needs four
    double factor = tree.is_arborescence() ? 2.0 : 4.0;
    res.decomposition_bound = (m_root + 1) * factor * tree_rep.value;

    std::vector<int> path;
    double measured = dag_disc_value(g, vs, tree_rep.coloring, &path);
    res.report = DiscrepancyReport(measured, WitnessKind::path, path,
                                   tree_rep.coloring, false);
    return res;
}

CharacterizationRecord characterization_gap(const Dag& g,
                                            const OracleBudget& budget,
                                            int tree_samples, uint64_t seed) {
    CharacterizationRecord rec;
    SetSystem prefixes = prefix_family(g, budget.max_nodes);
    rec.herdisc = herdisc(prefixes, budget);
    rec.ell_root = chain_ell_values(g)[g.root];

    auto [tree, trace] = reduce_to_tree(g);
    (void)trace;
    rec.m_root_reduced = nontree_profile(g, tree).m[g.root];

    // random spanning arborescences over the reachable part
    rec.min_sampled_nontree = rec.m_root_reduced;
    CounterRng rng(CounterRng::derive(seed, 0x7ee5));
    for (int s = 0; s < tree_samples; ++s) {
        TreeSubgraph t;
        t.num_vertices = g.num_vertices;
        t.root = g.root;
        for (int v = 0; v < g.num_vertices; ++v) {
            if (v == g.root || !g.reachable[v]) continue;
            std::vector<int> cand;
            for (int u : g.in[v])
                if (g.reachable[u]) cand.push_back(u);
            if (cand.empty()) continue;
            int u = cand[rng.next_int(0, static_cast<int>(cand.size()) - 1)];
            t.edges.emplace_back(u, v);
        }
        std::sort(t.edges.begin(), t.edges.end());
        rec.min_sampled_nontree = std::min(rec.min_sampled_nontree,
                                           nontree_profile(g, t).m[g.root]);
    }
    return rec;
}

}  // namespace balance
