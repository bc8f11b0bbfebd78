#include "balance/io.hpp"

#include <fstream>
#include <stdexcept>

namespace balance {

namespace {

using nlohmann::json;

std::string kind_name(Instance::Kind k) {
    switch (k) {
        case Instance::Kind::path: return "path";
        case Instance::Kind::tree: return "tree";
        case Instance::Kind::dag: return "dag";
        case Instance::Kind::sets: return "sets";
    }
    throw std::logic_error("unknown structure kind");
}

}  // namespace

json instance_to_json(const Instance& inst) {
    json j;
    j["d"] = inst.vectors.dim;
    j["norm_class"] = inst.vectors.norm_class == NormClass::unit_ball
                          ? "unit_ball"
                          : "two_ball";
    j["vectors"] = inst.vectors.vectors;
    json st;
    st["kind"] = kind_name(inst.kind);
    switch (inst.kind) {
        case Instance::Kind::path:
            break;
        case Instance::Kind::tree: {
            json par = json::array();
            for (int p : inst.tree->parent)
                par.push_back(p < 0 ? json(nullptr) : json(p));
            st["parent"] = std::move(par);
            break;
        }
        case Instance::Kind::dag: {
            st["root"] = inst.dag->root;
            json edges = json::array();
            for (auto [u, v] : inst.dag->edges)
                edges.push_back(json::array({u, v}));
            st["edges"] = std::move(edges);
            break;
        }
        case Instance::Kind::sets:
            st["sets"] = inst.sets->sets;
            break;
    }
    j["structure"] = std::move(st);
    return j;
}

Instance instance_from_json(const json& j) {
    int d = j.at("d").get<int>();
    std::string nc = j.at("norm_class").get<std::string>();
    if (nc != "unit_ball" && nc != "two_ball")
        throw std::invalid_argument("unknown norm class: " + nc);
    std::vector<Vec> vecs = j.at("vectors").get<std::vector<Vec>>();
    Instance inst{VectorSequence(d, std::move(vecs),
                                 nc == "unit_ball" ? NormClass::unit_ball
                                                   : NormClass::two_ball)};
    const json& st = j.at("structure");
    std::string kind = st.at("kind").get<std::string>();
    int t = inst.vectors.count();
    if (kind == "path") {
        inst.kind = Instance::Kind::path;
    } else if (kind == "tree") {
        inst.kind = Instance::Kind::tree;
        std::vector<int> parent;
        for (const json& p : st.at("parent"))
            parent.push_back(p.is_null() ? -1 : p.get<int>());
        if (static_cast<int>(parent.size()) != t)
            throw std::invalid_argument("parent array size mismatch");
        int root = -1;
        for (int v = 0; v < t; ++v)
            if (parent[v] == -1 && root == -1) root = v;
        if (root == -1) throw std::invalid_argument("tree has no root");
        inst.tree = RootedTree(std::move(parent), root);
    } else if (kind == "dag") {
        inst.kind = Instance::Kind::dag;
        std::vector<std::pair<int, int>> edges;
        for (const json& e : st.at("edges"))
            edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        inst.dag = Dag(t, std::move(edges), st.at("root").get<int>());
    } else if (kind == "sets") {
        inst.kind = Instance::Kind::sets;
        inst.sets = SetSystem(t, st.at("sets").get<std::vector<std::vector<int>>>());
    } else {
        throw std::invalid_argument("unknown structure kind: " + kind);
    }
    return inst;
}

Instance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
    return instance_from_json(j);
}

void save_instance(const Instance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << instance_to_json(inst).dump(2) << "\n";
}

}  // namespace balance
