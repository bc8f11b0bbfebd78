// balance: generate, solve, and batch-measure vector-balancing instances.
#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>

#include "balance/core.hpp"
#include "balance/dag.hpp"
#include "balance/gamma2.hpp"
#include "balance/instances.hpp"
#include "balance/io.hpp"
#include "balance/oracle.hpp"
#include "balance/rng.hpp"
#include "balance/smoothed.hpp"
#include "balance/treesolve.hpp"

using nlohmann::json;

namespace {

using namespace balance;

std::vector<Vec> random_unit_columns(int d, int count, CounterRng& rng) {
    std::vector<Vec> cols;
    cols.reserve(count);
    for (int i = 0; i < count; ++i) cols.push_back(rng.unit_vector(d));
    return cols;
}

Instance make_gen_instance(const std::string& family, int height, int arity,
                           int length, int blocks, int count, int dim,
                           double epsilon, uint64_t seed) {
    if (family == "adv-tree") {
        TreeInstance ti = gen_adversarial_binary_tree(height);
        Instance inst{std::move(ti.vectors)};
        inst.kind = Instance::Kind::tree;
        inst.tree = std::move(ti.tree);
        return inst;
    }
    if (family == "stoch-tree") {
        TreeInstance ti = gen_stochastic_lary_tree(arity, height, seed);
        Instance inst{std::move(ti.vectors)};
        inst.kind = Instance::Kind::tree;
        inst.tree = std::move(ti.tree);
        return inst;
    }
    if (family == "smoothed") {
        CounterRng rng(CounterRng::derive(seed, 1));
        VectorSequence base(dim, random_unit_columns(dim, count, rng),
                            NormClass::two_ball);
        for (Vec& v : base.vectors)
            for (double& x : v) x *= 1.0 - epsilon;  // room for the noise
        NoiseModel noise{NoiseModel::Kind::uniform_sphere_scaled, epsilon, seed};
        Instance inst{gen_smoothed(base, noise)};
        inst.kind = Instance::Kind::path;
        return inst;
    }
    if (family == "chain") {
        Dag g = gen_chain(length);
        CounterRng rng(CounterRng::derive(seed, 2));
        Instance inst{VectorSequence(
            dim, random_unit_columns(dim, g.num_vertices, rng),
            NormClass::two_ball)};
        inst.kind = Instance::Kind::dag;
        inst.dag = std::move(g);
        return inst;
    }
    if (family == "planted") {
        CounterRng rng(CounterRng::derive(seed, 3));
        VectorSequence hard(dim, random_unit_columns(dim, count, rng),
                            NormClass::two_ball);
        PlantedInstance pl = gen_planted_hard_block(hard, blocks, seed);
        Instance inst{std::move(pl.vectors)};
        inst.kind = Instance::Kind::path;
        return inst;
    }
    throw CLI::ValidationError("unknown family: " + family);
}

json report_to_json(const DiscrepancyReport& rep) {
    json j;
    j["value"] = rep.value;
    switch (rep.witness_kind) {
        case WitnessKind::prefix: j["witness_kind"] = "prefix"; break;
        case WitnessKind::path: j["witness_kind"] = "path"; break;
        case WitnessKind::set: j["witness_kind"] = "set"; break;
    }
    j["witness"] = rep.witness;
    json signs = json::array();
    for (int8_t s : rep.coloring.signs) signs.push_back(static_cast<int>(s));
    j["signs"] = std::move(signs);
    j["exact"] = rep.exact;
    return j;
}

RootedTree path_tree(int t) {
    std::vector<int> parent(t);
    for (int v = 0; v < t; ++v) parent[v] = v - 1;
    return RootedTree(std::move(parent), 0);
}

int run_solve(const std::string& file, const std::string& solver,
              long long budget_nodes, std::optional<double> delta, int block_n,
              int block_b, int bits) {
    Instance inst = load_instance(file);
    OracleBudget budget;
    budget.max_nodes = budget_nodes;
    json out;

    if (solver == "exact") {
        DiscrepancyReport rep = [&] {
            switch (inst.kind) {
                case Instance::Kind::path:
                    return exact_prefix_disc(inst.vectors, budget);
                case Instance::Kind::tree:
                    return exact_dag_disc(inst.tree->as_dag(), inst.vectors,
                                          budget);
                case Instance::Kind::dag:
                    return exact_dag_disc(*inst.dag, inst.vectors, budget);
                case Instance::Kind::sets:
                    return exact_comb_disc(*inst.sets, inst.vectors, budget);
            }
            throw std::logic_error("unknown structure");
        }();
        out = report_to_json(rep);
    } else if (solver == "tree") {
        RootedTree t = inst.kind == Instance::Kind::tree
                           ? *inst.tree
                           : path_tree(inst.vectors.count());
        if (inst.kind != Instance::Kind::tree &&
            inst.kind != Instance::Kind::path)
            throw CLI::ValidationError("tree solver needs a tree or path");
        out = report_to_json(tree_prefix_solve(t, inst.vectors, budget));
    } else if (solver == "smoothed") {
        if (inst.kind != Instance::Kind::path)
            throw CLI::ValidationError("smoothed solver needs a path instance");
        int n = std::min(block_n, inst.vectors.count());
        int b = std::min(block_b, n);
        SmoothedResult res = smoothed_prefix_solve(
            inst.vectors, n, b, delta, default_inner_solver(), bits);
        int tau = 0;
        double val = prefix_disc_value(inst.vectors, res.coloring, &tau);
        out = report_to_json(DiscrepancyReport(
            val, WitnessKind::prefix, {tau}, res.coloring, false));
        out["final_delta"] = res.trace.final_delta;
        out["max_prefix"] = res.trace.max_prefix;
        out["degraded"] = res.trace.any_degraded;
    } else if (solver == "dag") {
        if (inst.kind != Instance::Kind::dag)
            throw CLI::ValidationError("dag solver needs a dag instance");
        DagSolveResult res = dag_disc_solve(*inst.dag, inst.vectors);
        out = report_to_json(res.report);
        out["max_nontree_edges"] = res.max_nontree_edges;
        out["tree_prefix_value"] = res.tree_prefix_value;
        out["decomposition_bound"] = res.decomposition_bound;
    } else {
        throw CLI::ValidationError("unknown solver: " + solver);
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

void emit(std::ostream& os, const std::vector<std::string>& row) {
    for (size_t i = 0; i < row.size(); ++i)
        os << (i ? "," : "") << row[i];
    os << "\n";
}

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

int run_experiment(const std::string& spec_file, const std::string& out_path) {
    std::ifstream in(spec_file);
    if (!in) throw CLI::ValidationError("cannot open " + spec_file);
    json spec;
    in >> spec;
    std::string kind = spec.at("kind").get<std::string>();

    std::ofstream file_out;
    std::ostream* os = &std::cout;
    if (!out_path.empty()) {
        file_out.open(out_path);
        if (!file_out) throw std::runtime_error("cannot write " + out_path);
        os = &file_out;
    }

    if (kind == "block-feasibility") {
        int d = spec.value("d", 3), n = spec.value("n", 64);
        int b = spec.value("b", 8), trials = spec.value("trials", 0);
        double eps = spec.value("epsilon", 0.2);
        uint64_t seed = spec.value("seed", 0);
        std::optional<double> delta;
        if (spec.contains("delta")) delta = spec["delta"].get<double>();
        emit(*os, {"trial", "d", "n", "b", "epsilon", "feasible", "delta"});
        double dlt = delta ? *delta
                           : calibrate_delta(d, n, default_inner_solver());
        IntervalFamily fam = block_decomposition(n, b);
        for (int t = 0; t < trials; ++t) {
            CounterRng rng(CounterRng::derive(seed, t));
            VectorSequence base(d, random_unit_columns(d, n, rng),
                                NormClass::two_ball);
            for (Vec& v : base.vectors)
                for (double& x : v) x *= 1.0 - eps;
            NoiseModel noise{NoiseModel::Kind::uniform_sphere_scaled, eps,
                             CounterRng::derive(seed, 100000 + t)};
            VectorSequence cols = gen_smoothed(base, noise);
            Vec w(d);
            for (double& x : w) x = rng.uniform(-dlt, dlt);
            BlockState st{cols.vectors, w, dlt, 2};
            bool feasible = fractional_signing(st, fam).has_value();
            emit(*os, {std::to_string(t), std::to_string(d), std::to_string(n),
                       std::to_string(b), fmt(eps),
                       feasible ? "1" : "0", fmt(dlt)});
        }
        return 0;
    }
    if (kind == "chain-herdisc") {
        emit(*os, {"length", "vertices", "herdisc", "ell_root", "lower_bound"});
        OracleBudget budget;
        for (int l : spec.value("lengths", std::vector<int>{})) {
            Dag g = gen_chain(l);
            CharacterizationRecord rec = characterization_gap(g, budget);
            emit(*os, {std::to_string(l), std::to_string(g.num_vertices),
                       std::to_string(rec.herdisc),
                       std::to_string(rec.ell_root),
                       std::to_string((l + 3) / 4)});
        }
        return 0;
    }
    if (kind == "tree-embedding") {
        int arity = spec.value("arity", 40), height = spec.value("height", 4);
        int trials = spec.value("trials", 0);
        uint64_t seed = spec.value("seed", 0);
        emit(*os, {"trial", "found"});
        for (int t = 0; t < trials; ++t) {
            TreeInstance ti = gen_stochastic_lary_tree(
                arity, height, CounterRng::derive(seed, t));
            bool found =
                find_embedded_binary_tree(ti.tree, ti.vectors).has_value();
            emit(*os, {std::to_string(t), found ? "1" : "0"});
        }
        return 0;
    }
    throw CLI::ValidationError("unknown experiment kind: " + kind);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vector-balancing toolkit"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate an instance file");
    std::string family, out_file = "instance.json";
    int height = 4, arity = 2, length = 2, blocks = 4, count = 32, dim = 2;
    double epsilon = 0.2;
    uint64_t seed = 0;
    gen->add_option("--family", family, "instance family")
        ->required()
        ->check(CLI::IsMember(
            {"adv-tree", "stoch-tree", "smoothed", "chain", "planted"}));
    gen->add_option("--height", height, "tree height (levels)");
    gen->add_option("--arity", arity, "tree arity");
    gen->add_option("--length", length, "chain length");
    gen->add_option("--blocks", blocks, "number of blocks");
    gen->add_option("--count", count, "number of vectors");
    gen->add_option("--dim", dim, "vector dimension");
    gen->add_option("--epsilon", epsilon, "noise magnitude");
    gen->add_option("--seed", seed, "random seed");
    gen->add_option("--out", out_file, "output file");

    // solve
    auto* solve = app.add_subcommand("solve", "solve an instance file");
    std::string instance_file, solver = "exact";
    long long budget_nodes = 50'000'000;
    double delta_flag = 0.0;
    bool delta_set = false;
    int block_n = 64, block_b = 8, bits = 32;
    solve->add_option("instance", instance_file, "instance JSON file")
        ->required();
    solve->add_option("--solver", solver, "solver")
        ->check(CLI::IsMember({"exact", "tree", "smoothed", "dag"}));
    solve->add_option("--budget-nodes", budget_nodes, "search node budget");
    solve->add_option("--delta", delta_flag, "working delta for smoothed")
        ->each([&](const std::string&) { delta_set = true; });
    solve->add_option("--block-n", block_n, "smoothed block length");
    solve->add_option("--block-b", block_b, "decomposition block size");
    solve->add_option("--bits", bits, "rounding bit depth");

    // experiment
    auto* exp = app.add_subcommand("experiment", "run a batch experiment");
    std::string spec_file, csv_out;
    exp->add_option("spec", spec_file, "experiment spec JSON")->required();
    exp->add_option("--out", csv_out, "CSV output path (default stdout)");

    try {
        app.parse(argc, argv);
        if (gen->parsed()) {
            save_instance(make_gen_instance(family, height, arity, length,
                                            blocks, count, dim, epsilon, seed),
                          out_file);
            return 0;
        }
        if (solve->parsed()) {
            std::optional<double> delta;
            if (delta_set) delta = delta_flag;
            return run_solve(instance_file, solver, budget_nodes, delta,
                             block_n, block_b, bits);
        }
        return run_experiment(spec_file, csv_out);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const balance::BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
