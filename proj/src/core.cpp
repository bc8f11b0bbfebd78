#include "balance/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "balance/dag.hpp"
#include "balance/set_system.hpp"

namespace balance {

VectorSequence::VectorSequence(int d, std::vector<Vec> vs, NormClass nc)
    : dim(d), vectors(std::move(vs)), norm_class(nc) {
    if (d <= 0) throw std::invalid_argument("VectorSequence: dim must be positive");
    const double bound = (nc == NormClass::unit_ball ? 1.0 : 2.0) + kTol;
    for (const Vec& v : vectors) {
        if (static_cast<int>(v.size()) != d)
            throw std::invalid_argument("VectorSequence: vector length != dim");
        for (double x : v)
            if (!std::isfinite(x))
                throw std::invalid_argument("VectorSequence: non-finite entry");
        if (two_norm(v) > bound)
            throw std::invalid_argument("VectorSequence: norm_class bound violated");
    }
}

Coloring::Coloring(std::vector<int8_t> s) : signs(std::move(s)) {
    for (int8_t v : signs)
        if (v != 1 && v != -1)
            throw std::invalid_argument("Coloring: entries must be +/-1");
}

FractionalColoring::FractionalColoring(Vec v) : values(std::move(v)) {
    for (double& x : values) {
        if (!std::isfinite(x) || x < -1.0 - kTol || x > 1.0 + kTol)
            throw std::invalid_argument("FractionalColoring: entry outside [-1,1]");
        x = std::clamp(x, -1.0, 1.0);
    }
}

std::vector<Vec> prefix_sums(const VectorSequence& vs, const Coloring& x) {
    if (x.size() != vs.count())
        throw std::invalid_argument("prefix_sums: length mismatch");
    std::vector<Vec> out(vs.count(), Vec(vs.dim, 0.0));
    Vec run(vs.dim, 0.0);
    for (int t = 0; t < vs.count(); ++t) {
        axpy(static_cast<double>(x[t]), vs.vectors[t], run);
        out[t] = run;
    }
    return out;
}

double prefix_disc_value(const VectorSequence& vs, const Coloring& x,
                         int* arg_tau) {
    if (x.size() != vs.count())
        throw std::invalid_argument("prefix_disc_value: length mismatch");
    Vec run(vs.dim, 0.0);
    double best = 0.0;
    int best_tau = -1;
    for (int t = 0; t < vs.count(); ++t) {
        axpy(static_cast<double>(x[t]), vs.vectors[t], run);
        double nrm = inf_norm(run);
        if (nrm > best) {
            best = nrm;
            best_tau = t;
        }
    }
    if (arg_tau) *arg_tau = best_tau;
    return best;
}

namespace {

void dag_disc_dfs(const Dag& g, const VectorSequence& vs, const Coloring& x,
                  int v, Vec& run, std::vector<int>& path, double& best,
                  std::vector<int>* arg_path) {
    axpy(static_cast<double>(x[v]), vs.vectors[v], run);
    path.push_back(v);
    double nrm = inf_norm(run);
    if (nrm > best) {
        best = nrm;
        if (arg_path) *arg_path = path;
    }
    for (int u : g.out[v]) dag_disc_dfs(g, vs, x, u, run, path, best, arg_path);
    path.pop_back();
    axpy(-static_cast<double>(x[v]), vs.vectors[v], run);
}

}  // namespace

double dag_disc_value(const Dag& g, const VectorSequence& vs, const Coloring& x,
                      std::vector<int>* arg_path) {
    if (g.num_vertices != vs.count() || x.size() != vs.count())
        throw std::invalid_argument("dag_disc_value: size mismatch");
    Vec run(vs.dim, 0.0);
    std::vector<int> path;
    double best = 0.0;
    if (arg_path) arg_path->clear();
    dag_disc_dfs(g, vs, x, g.root, run, path, best, arg_path);
    return best;
}

double comb_disc_value(const SetSystem& ss, const VectorSequence& vs,
                       const Coloring& x, int* arg_set) {
    if (ss.ground_size != vs.count() || x.size() != vs.count())
        throw std::invalid_argument("comb_disc_value: size mismatch");
    double best = 0.0;
    int best_set = -1;
    Vec sum(vs.dim);
    for (int s = 0; s < ss.size(); ++s) {
        std::fill(sum.begin(), sum.end(), 0.0);
        for (int i : ss.sets[s])
            axpy(static_cast<double>(x[i]), vs.vectors[i], sum);
        double nrm = inf_norm(sum);
        if (nrm > best) {
            best = nrm;
            best_set = s;
        }
    }
    if (arg_set) *arg_set = best_set;
    return best;
}

SetSystem::SetSystem(int t, std::vector<std::vector<int>> s)
    : ground_size(t) {
    if (t <= 0) throw std::invalid_argument("SetSystem: ground size must be positive");
    std::set<std::vector<int>> dedup;
    for (auto& f : s) {
        std::sort(f.begin(), f.end());
        f.erase(std::unique(f.begin(), f.end()), f.end());
        for (int i : f)
            if (i < 0 || i >= t)
                throw std::invalid_argument("SetSystem: element out of range");
        dedup.insert(std::move(f));
    }
    sets.assign(dedup.begin(), dedup.end());
}

}  // namespace balance
