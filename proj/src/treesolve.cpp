#include "balance/treesolve.hpp"

#include <algorithm>
#include <cmath>

namespace balance {

namespace {

void greedy_dfs(const RootedTree& t, const VectorSequence& vs,
                std::vector<int8_t>& signs, int v, Vec run, double& best,
                std::vector<int>& path, std::vector<int>& best_path) {
    Vec plus = run, minus = run;
    axpy(1.0, vs.vectors[v], plus);
    axpy(-1.0, vs.vectors[v], minus);
    // tie -> +1
    if (inf_norm(plus) <= inf_norm(minus)) {
        signs[v] = 1;
        run = std::move(plus);
    } else {
        signs[v] = -1;
        run = std::move(minus);
    }
    path.push_back(v);
    if (inf_norm(run) > best) {
        best = inf_norm(run);
        best_path = path;
    }
    for (int c : t.children[v])
        greedy_dfs(t, vs, signs, c, run, best, path, best_path);
    path.pop_back();
}

}  // namespace

DiscrepancyReport tree_prefix_solve(const RootedTree& t, const VectorSequence& vs,
                                    const OracleBudget& budget) {
    if (t.num_vertices != vs.count())
        throw std::invalid_argument("tree_prefix_solve: size mismatch");

    auto roots = t.roots();
    if (roots.size() == 1 && t.num_vertices <= budget.max_ground_size) {
        try {
            return exact_dag_disc(t.as_dag(), vs, budget);
        } catch (const BudgetExceeded&) {
            // fall through to the greedy
        }
    }

    std::vector<int8_t> signs(t.num_vertices, 1);
    double best = 0.0;
    std::vector<int> path, best_path;
    for (int r : roots)
        greedy_dfs(t, vs, signs, r, Vec(vs.dim, 0.0), best, path, best_path);

    DiscrepancyReport rep;
    rep.coloring = Coloring(signs);
    rep.value = best;
    rep.witness_kind = WitnessKind::path;
    rep.witness = best_path;
    rep.exact = false;
    return rep;
}

DiscrepancyReport tree_scalar_solve(const RootedTree& t, const Vec& scalars) {
    if (t.num_vertices != static_cast<int>(scalars.size()))
        throw std::invalid_argument("tree_scalar_solve: size mismatch");
    for (double s : scalars)
        if (!std::isfinite(s) || std::fabs(s) > 1.0 + kTol)
            throw std::invalid_argument("tree_scalar_solve: scalar outside [-1,1]");

    std::vector<int8_t> signs(t.num_vertices, 1);
    double best = 0.0;
    std::vector<int> best_path;

    // iterative DFS carrying the running sum; flipping the scalar whenever it
    // agrees in sign with the sum keeps every prefix in [-1,1]
    struct Frame { int v; double sum; std::vector<int> path; };
    std::vector<Frame> stack;
    for (int r : t.roots()) stack.push_back({r, 0.0, {}});
    while (!stack.empty()) {
        Frame f = std::move(stack.back());
        stack.pop_back();
        int8_t s = f.sum * scalars[f.v] > 0 ? int8_t{-1} : int8_t{1};
        double sum = f.sum + s * scalars[f.v];
        signs[f.v] = s;
        f.path.push_back(f.v);
        if (std::fabs(sum) > best) {
            best = std::fabs(sum);
            best_path = f.path;
        }
        for (int c : t.children[f.v]) stack.push_back({c, sum, f.path});
    }

    DiscrepancyReport rep;
    rep.coloring = Coloring(signs);
    rep.value = best;
    rep.witness_kind = WitnessKind::path;
    rep.witness = best_path;
    rep.exact = false;
    return rep;
}

}  // namespace balance
