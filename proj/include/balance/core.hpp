#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "balance/common.hpp"

namespace balance {

enum class NormClass { unit_ball, two_ball };

/// Input vectors v_1..v_T in d dimensions. Immutable after construction.
struct VectorSequence {
    int dim = 0;
    std::vector<Vec> vectors;
    NormClass norm_class = NormClass::unit_ball;

    VectorSequence() = default;
    VectorSequence(int d, std::vector<Vec> vs, NormClass nc = NormClass::unit_ball);

    int count() const { return static_cast<int>(vectors.size()); }
};

/// A full +/-1 signing of [T].
struct Coloring {
    std::vector<int8_t> signs;

    Coloring() = default;
    explicit Coloring(std::vector<int8_t> s);

    int size() const { return static_cast<int>(signs.size()); }
    int8_t operator[](int i) const { return signs[i]; }
};

/// Entries in [-1,1], clamped on construction (tolerance 1e-9, larger
/// violations rejected).
struct FractionalColoring {
    Vec values;

    FractionalColoring() = default;
    explicit FractionalColoring(Vec v);

    int size() const { return static_cast<int>(values.size()); }
};

enum class WitnessKind { prefix, path, set };

struct DiscrepancyReport {
    double value = 0.0;
    WitnessKind witness_kind = WitnessKind::prefix;
    // prefix: {tau} (0-based index of the last element of the prefix);
    // path / set: the member vertices / elements.
    std::vector<int> witness;
    Coloring coloring;
    bool exact = false;
};

struct SetSystem;  // oracle module; comb_disc_value evaluates against it
struct Dag;        // dagkit module

/// output[tau] = sum_{t<=tau} x_t v_t.
std::vector<Vec> prefix_sums(const VectorSequence& vs, const Coloring& x);

/// max_tau || sum_{t<=tau} x_t v_t ||_inf. Sets *arg_tau to the argmax prefix.
double prefix_disc_value(const VectorSequence& vs, const Coloring& x,
                         int* arg_tau = nullptr);

/// Max over root-starting paths of || sum_{t in S} x_t v_t ||_inf, by
/// depth-first traversal carrying the running sum.
double dag_disc_value(const Dag& g, const VectorSequence& vs, const Coloring& x,
                      std::vector<int>* arg_path = nullptr);

/// max_{S in ss} || sum_{i in S} x_i v_i ||_inf; empty family gives 0.
double comb_disc_value(const SetSystem& ss, const VectorSequence& vs,
                       const Coloring& x, int* arg_set = nullptr);

}  // namespace balance
