#pragma once

#include <vector>

#include "balance/common.hpp"

namespace balance {

/// Feasibility system: equality rows, two-sided inequality rows, and a box
/// on the variables. Bounds of magnitude >= 1e29 are treated as infinite.
struct LinearProgram {
    struct EqRow {
        Vec a;
        double b = 0.0;
    };
    struct RangeRow {
        Vec a;
        double lo = 0.0;
        double hi = 0.0;
    };

    int num_vars = 0;
    std::vector<EqRow> equalities;
    std::vector<RangeRow> inequalities;
    Vec lower, upper;  // per-variable box

    explicit LinearProgram(int n);
    void add_equality(Vec a, double b);
    void add_range(Vec a, double lo, double hi);
    void validate() const;
};

enum class LpStatus { feasible, infeasible, budget_exceeded };

/// Infeasibility witness: multipliers (free on equalities, nonnegative on
/// the inequality sides and variable bounds) whose weighted combination of
/// rows vanishes while the combined right-hand side is strictly negative.
struct FarkasCertificate {
    Vec eq;        // per equality row, free sign
    Vec range_hi;  // per range row, side a.x <= hi
    Vec range_lo;  // per range row, side a.x >= lo
    Vec box_hi;    // per variable, side x <= u
    Vec box_lo;    // per variable, side x >= l
};

struct FeasibilityResult {
    LpStatus status = LpStatus::budget_exceeded;
    Vec point;                     // when feasible
    FarkasCertificate certificate; // when infeasible
};

/// Phase-1 bounded-variable dense simplex. Deterministic: Dantzig pricing
/// with a switch to Bland's rule after a degenerate stall. Numerical
/// breakdown is reported as budget_exceeded, never as infeasible.
FeasibilityResult lp_feasible(const LinearProgram& p);

/// Max constraint violation of x over all rows and the box.
double max_violation(const LinearProgram& p, const Vec& x);

bool check_feasible_point(const LinearProgram& p, const Vec& x,
                          double tol = kLpTol);
bool check_farkas_certificate(const LinearProgram& p,
                              const FarkasCertificate& c,
                              double tol = kLpTol);

}  // namespace balance
