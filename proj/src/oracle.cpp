#include "balance/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace balance {

namespace {

bool lex_smaller(const std::vector<int8_t>& a, const std::vector<int8_t>& b) {
    // -1 sorts before +1
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

void check_ground(int t, const OracleBudget& budget, const char* who) {
    if (t > budget.max_ground_size)
        throw BudgetExceeded(std::string(who) + ": ground size " + std::to_string(t) +
                             " exceeds budget " + std::to_string(budget.max_ground_size));
}

struct NodeCounter {
    long long used = 0;
    long long cap;
    explicit NodeCounter(long long c) : cap(c) {}
    void tick(const char* who) {
        if (++used > cap) throw BudgetExceeded(std::string(who) + ": node budget exceeded");
    }
};

// ---- prefix ----

Coloring greedy_prefix_coloring(const VectorSequence& vs) {
    Vec run(vs.dim, 0.0);
    std::vector<int8_t> signs(vs.count());
    for (int t = 0; t < vs.count(); ++t) {
        Vec plus = run, minus = run;
        axpy(1.0, vs.vectors[t], plus);
        axpy(-1.0, vs.vectors[t], minus);
        signs[t] = static_cast<int8_t>(inf_norm(plus) <= inf_norm(minus) ? 1 : -1);
        run = signs[t] > 0 ? plus : minus;
    }
    return Coloring(std::move(signs));
}

struct PrefixSearch {
    const VectorSequence& vs;
    NodeCounter& nodes;
    double best_value;
    std::vector<int8_t> best_signs;
    std::vector<int8_t> cur;
    Vec run;

    void dfs(int t, double run_max) {
        nodes.tick("exact_prefix_disc");
        if (run_max > best_value) return;  // strict: keep lex-min among optima
        if (t == vs.count()) {
            if (run_max < best_value ||
                (run_max == best_value && lex_smaller(cur, best_signs))) {
                best_value = run_max;
                best_signs = cur;
            }
            return;
        }
        for (int8_t s : {int8_t{-1}, int8_t{1}}) {
            cur[t] = s;
            axpy(static_cast<double>(s), vs.vectors[t], run);
            dfs(t + 1, std::max(run_max, inf_norm(run)));
            axpy(-static_cast<double>(s), vs.vectors[t], run);
        }
    }
};

// ---- dag ----

struct DagSearch {
    const Dag& g;
    const VectorSequence& vs;
    NodeCounter& nodes;
    double best_value;
    std::vector<int8_t> best_signs;  // indexed by vertex
    std::vector<int8_t> cur;
    // sums[v]: the signed sums of all root paths ending at v, valid once v is
    // assigned (topo order guarantees predecessors are assigned first)
    std::vector<std::vector<Vec>> sums;

    void dfs(int k, double run_max) {
        nodes.tick("exact_dag_disc");
        if (run_max > best_value) return;
        if (k == g.num_vertices) {
            if (run_max < best_value ||
                (run_max == best_value && lex_smaller(cur, best_signs))) {
                best_value = run_max;
                best_signs = cur;
            }
            return;
        }
        int v = g.topo[k];
        for (int8_t s : {int8_t{-1}, int8_t{1}}) {
            cur[v] = s;
            auto& sv = sums[v];
            sv.clear();
            double local = 0.0;
            if (v == g.root) {
                Vec w(vs.dim, 0.0);
                axpy(static_cast<double>(s), vs.vectors[v], w);
                local = inf_norm(w);
                sv.push_back(std::move(w));
            } else if (g.reachable[v]) {
                for (int u : g.in[v]) {
                    if (!g.reachable[u]) continue;
                    for (const Vec& base : sums[u]) {
                        Vec w = base;
                        axpy(static_cast<double>(s), vs.vectors[v], w);
                        local = std::max(local, inf_norm(w));
                        sv.push_back(std::move(w));
                    }
                }
            }
            dfs(k + 1, std::max(run_max, local));
        }
    }
};

Coloring greedy_dag_coloring(const Dag& g, const VectorSequence& vs) {
    // assign in topo order, sign minimizing the max new path-sum norm
    std::vector<std::vector<Vec>> sums(g.num_vertices);
    std::vector<int8_t> signs(g.num_vertices, 1);
    for (int v : g.topo) {
        double best = 0.0;
        int8_t best_s = 1;
        std::vector<Vec> best_sums;
        for (int8_t s : {int8_t{1}, int8_t{-1}}) {
            std::vector<Vec> cand;
            double local = 0.0;
            if (v == g.root) {
                Vec w(vs.dim, 0.0);
                axpy(static_cast<double>(s), vs.vectors[v], w);
                local = inf_norm(w);
                cand.push_back(std::move(w));
            } else if (g.reachable[v]) {
                for (int u : g.in[v]) {
                    if (!g.reachable[u]) continue;
                    for (const Vec& base : sums[u]) {
                        Vec w = base;
                        axpy(static_cast<double>(s), vs.vectors[v], w);
                        local = std::max(local, inf_norm(w));
                        cand.push_back(std::move(w));
                    }
                }
            }
            if (best_sums.empty() || local < best) {
                best = local;
                best_s = s;
                best_sums = std::move(cand);
            }
        }
        signs[v] = best_s;
        sums[v] = std::move(best_sums);
    }
    return Coloring(std::move(signs));
}

}  // namespace

DiscrepancyReport exact_prefix_disc(const VectorSequence& vs,
                                    const OracleBudget& budget) {
    check_ground(vs.count(), budget, "exact_prefix_disc");
    NodeCounter nodes(budget.max_nodes);
    Coloring greedy = greedy_prefix_coloring(vs);
    PrefixSearch search{vs, nodes, prefix_disc_value(vs, greedy),
                        greedy.signs, std::vector<int8_t>(vs.count(), 1),
                        Vec(vs.dim, 0.0)};
    search.dfs(0, 0.0);

    DiscrepancyReport rep;
    rep.coloring = Coloring(search.best_signs);
    int tau = -1;
    rep.value = prefix_disc_value(vs, rep.coloring, &tau);
    rep.witness_kind = WitnessKind::prefix;
    rep.witness = {tau};
    rep.exact = true;
    return rep;
}

DiscrepancyReport exact_dag_disc(const Dag& g, const VectorSequence& vs,
                                 const OracleBudget& budget) {
    if (g.num_vertices != vs.count())
        throw std::invalid_argument("exact_dag_disc: size mismatch");
    check_ground(vs.count(), budget, "exact_dag_disc");
    NodeCounter nodes(budget.max_nodes);
    Coloring greedy = greedy_dag_coloring(g, vs);
    DagSearch search{g, vs, nodes, dag_disc_value(g, vs, greedy),
                     greedy.signs,
                     std::vector<int8_t>(g.num_vertices, 1),
                     std::vector<std::vector<Vec>>(g.num_vertices)};
    search.dfs(0, 0.0);

    DiscrepancyReport rep;
    rep.coloring = Coloring(search.best_signs);
    std::vector<int> path;
    rep.value = dag_disc_value(g, vs, rep.coloring, &path);
    rep.witness_kind = WitnessKind::path;
    rep.witness = path;
    rep.exact = true;
    return rep;
}

DiscrepancyReport exact_comb_disc(const SetSystem& ss, const VectorSequence& vs,
                                  const OracleBudget& budget) {
    if (ss.ground_size != vs.count())
        throw std::invalid_argument("exact_comb_disc: size mismatch");
    check_ground(vs.count(), budget, "exact_comb_disc");
    NodeCounter nodes(budget.max_nodes);

    const int t = vs.count();
    double best_value = -1.0;
    std::vector<int8_t> best_signs;
    std::vector<int8_t> cur(t, 1);
    // exhaustive scan; desk scale makes pruning unnecessary here
    for (long long mask = 0; mask < (1LL << t); ++mask) {
        nodes.tick("exact_comb_disc");
        for (int i = 0; i < t; ++i)
            cur[i] = static_cast<int8_t>((mask >> i) & 1 ? 1 : -1);
        Coloring x(cur);
        double v = comb_disc_value(ss, vs, x);
        if (best_value < 0 || v < best_value ||
            (v == best_value && lex_smaller(cur, best_signs))) {
            best_value = v;
            best_signs = cur;
        }
    }
    DiscrepancyReport rep;
    rep.coloring = Coloring(best_signs);
    int arg_set = -1;
    rep.value = comb_disc_value(ss, vs, rep.coloring, &arg_set);
    rep.witness_kind = WitnessKind::set;
    rep.witness = arg_set >= 0 ? ss.sets[arg_set] : std::vector<int>{};
    rep.exact = true;
    return rep;
}

namespace {

// Disc of the restriction of bitmask sets to J, all-ones scalars.
int restricted_set_disc(const std::vector<uint64_t>& sets, uint64_t j_mask,
                        int t, NodeCounter& nodes) {
    std::vector<uint64_t> restricted;
    restricted.reserve(sets.size());
    for (uint64_t f : sets) {
        uint64_t r = f & j_mask;
        restricted.push_back(r);
    }
    std::sort(restricted.begin(), restricted.end());
    restricted.erase(std::unique(restricted.begin(), restricted.end()),
                     restricted.end());
    if (restricted.empty()) return 0;

    int best = 1 << 30;
    for (uint64_t pos = 0; pos < (1ULL << t); ++pos) {
        if ((pos & j_mask) != pos) continue;  // only sign elements of J
        nodes.tick("set_disc");
        int worst = 0;
        for (uint64_t f : restricted) {
            int total = __builtin_popcountll(f);
            int plus = __builtin_popcountll(f & pos);
            worst = std::max(worst, std::abs(2 * plus - total));
            if (worst >= best) break;
        }
        best = std::min(best, worst);
        if (best == 0) break;
    }
    return best;
}

std::vector<uint64_t> to_bitmasks(const SetSystem& ss) {
    std::vector<uint64_t> masks;
    masks.reserve(ss.sets.size());
    for (const auto& f : ss.sets) {
        uint64_t m = 0;
        for (int i : f) m |= (1ULL << i);
        masks.push_back(m);
    }
    return masks;
}

}  // namespace

int set_disc(const SetSystem& ss, const OracleBudget& budget) {
    check_ground(ss.ground_size, budget, "set_disc");
    NodeCounter nodes(budget.max_nodes);
    uint64_t full = ss.ground_size == 64 ? ~0ULL : (1ULL << ss.ground_size) - 1;
    return restricted_set_disc(to_bitmasks(ss), full, ss.ground_size, nodes);
}

int herdisc(const SetSystem& ss, const OracleBudget& budget) {
    check_ground(ss.ground_size, budget, "herdisc");
    NodeCounter nodes(budget.max_nodes);
    const int t = ss.ground_size;
    auto masks = to_bitmasks(ss);

    // group subsets J by cardinality, largest first; Disc(F|_J) <= |J| lets us
    // stop once the incumbent can no longer be beaten
    std::vector<std::vector<uint64_t>> by_card(t + 1);
    for (uint64_t j = 0; j < (1ULL << t); ++j)
        by_card[__builtin_popcountll(j)].push_back(j);

    int best = 0;
    for (int k = t; k >= 1; --k) {
        if (best >= k) break;
        for (uint64_t j : by_card[k])
            best = std::max(best, restricted_set_disc(masks, j, t, nodes));
    }
    return best;
}

}  // namespace balance
