#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "balance/common.hpp"
#include "balance/core.hpp"
#include "balance/lp.hpp"

namespace balance {

/// Closed interval of column indices, 0-based inclusive.
struct Interval {
    int first = 0;
    int last = 0;

    int size() const { return last - first + 1; }
    bool operator==(const Interval&) const = default;
    auto operator<=>(const Interval&) const = default;
};

/// The interval family used by the block LP. Closure property: every
/// prefix [0..k] is a disjoint union of at most two members.
struct IntervalFamily {
    int n = 0;
    std::vector<Interval> intervals;
    int long_threshold = 0;  // |I| >= long_threshold counts as long

    bool is_long(const Interval& i) const { return i.size() >= long_threshold; }
};

/// Family {block-end prefixes} plus {within-block prefixes}, deduplicated.
/// b need not divide n; a trailing short block is clipped.
IntervalFamily block_decomposition(int n, int b);

/// Verifies the closure property exhaustively; returns the offending
/// prefix length or -1 when every prefix splits into <= 2 members.
int cover_violation(const IntervalFamily& fam);

/// One round of the block pipeline: the current block's columns, the
/// carried prefix sum w, and the working bound delta.
struct BlockState {
    std::vector<Vec> columns;  // n columns of dimension d
    Vec w;
    double delta = 0.0;
    int block_index = 1;

    int d() const { return static_cast<int>(w.size()); }
    int n() const { return static_cast<int>(columns.size()); }
};

/// (y, {alpha_I}) with ||y||_1 = d and sum ||alpha_I||_1 <= d/2; alphas
/// align with the family's interval order.
struct DualCertificate {
    Vec y;
    std::vector<Vec> alphas;
};

LinearProgram build_block_lp(const BlockState& s, const IntervalFamily& fam);

/// Solves the block LP; empty when it is infeasible (or the solver broke
/// down, which we treat the same way and let the caller degrade).
std::optional<FractionalColoring> fractional_signing(const BlockState& s,
                                                     const IntervalFamily& fam);

/// lhs = sum_j |z_j . v_j| with z_j = y - sum_{I contains j} alpha_I;
/// holds = (lhs >= delta * d). Throws when c violates its invariants.
std::pair<double, bool> check_dual_certificate(const BlockState& s,
                                               const IntervalFamily& fam,
                                               const DualCertificate& c);

/// Signs a subsequence of columns, attempting to keep every running prefix
/// sum small in the infinity norm.
using InnerSolver = std::function<Coloring(const std::vector<Vec>&)>;

/// Exact search up to 22 columns, greedy beyond.
InnerSolver default_inner_solver();

/// Bit-by-bit rounding of a fractional signing. Returns the integral
/// signing and a bound B with ||M_I (x* - x)||_inf <= B for every prefix
/// interval I.
std::pair<Coloring, double> round_block(const BlockState& s,
                                        const FractionalColoring& x,
                                        const InnerSolver& inner,
                                        int bits = 32);

struct BlockTraceEntry {
    int block_index = 1;
    bool lp_feasible = false;
    bool degraded = false;
    double end_w_norm = 0.0;
    double max_prefix = 0.0;   // max prefix norm seen so far
    double delta = 0.0;        // working delta after the block
};

struct SmoothedTrace {
    std::vector<BlockTraceEntry> blocks;
    double final_delta = 0.0;
    double max_prefix = 0.0;
    bool any_degraded = false;
};

struct SmoothedResult {
    Coloring coloring;
    SmoothedTrace trace;
};

/// The block pipeline: block 1 by the inner solver, later blocks by
/// LP + rounding with graceful degradation on infeasible rounds.
SmoothedResult smoothed_prefix_solve(const VectorSequence& vs, int n, int b,
                                     std::optional<double> delta,
                                     const InnerSolver& inner,
                                     int bits = 32);

/// Twice the worst prefix discrepancy the inner solver achieves over a few
/// random unit-column calibration runs.
double calibrate_delta(int d, int n, const InnerSolver& inner, int trials = 8,
                       uint64_t seed = 12345);

}  // namespace balance
