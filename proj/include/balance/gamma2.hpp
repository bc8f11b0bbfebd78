#pragma once

#include <Eigen/Dense>

#include "balance/core.hpp"
#include "balance/oracle.hpp"
#include "balance/set_system.hpp"

namespace balance {

/// A factorization A ~= B C giving the upper bound r(B) * c(C), where r is
/// the max row 2-norm of B and c the max column 2-norm of C, plus the
/// trivial entrywise lower bound.
struct Gamma2Estimate {
    double upper = 0.0;
    double lower = 0.0;
    Eigen::MatrixXd B, C;
    double residual = 0.0;  // ||A - BC||_max
};

/// |S| x T 0/1 membership matrix, rows in family order.
Eigen::MatrixXd incidence_matrix(const SetSystem& ss);

/// Vertical stack of A_S * diag(v_1(j), ..., v_T(j)) over coordinates j.
Eigen::MatrixXd stacked_matrix(const SetSystem& ss, const VectorSequence& vs);

/// Alternating least squares over factorizations with inner dimension
/// min(m, n); keeps the best factorization whose residual is <= 1e-7.
Gamma2Estimate gamma2_upper(const Eigen::MatrixXd& A, int restarts = 8,
                            int iters = 200);

/// max |A_ij|, valid because every entry is a row-column inner product.
double gamma2_lower(const Eigen::MatrixXd& A);

/// Lifts a factorization of the incidence matrix to the stacked matrix via
/// block-diagonal repetition; never increases the upper bound when every
/// ||v_t||_2 <= 1.
Gamma2Estimate transfer_factorization(const SetSystem& ss,
                                      const VectorSequence& vs,
                                      const Gamma2Estimate& est);

struct CombBoundRecord {
    double exact = 0.0;     // oracle CombDisc optimum
    double upper = 0.0;     // gamma2 upper bound of the incidence matrix
    double bound = 0.0;     // upper * sqrt(ln d + ln |S|), guarded below by upper
    bool holds = false;            // exact <= bound
    bool holds_with_slack = false; // exact <= 2 * bound
};

CombBoundRecord comb_bound_check(const SetSystem& ss, const VectorSequence& vs,
                                 const OracleBudget& budget);

struct SandwichRecord {
    int herdisc = 0;
    double lower = 0.0;  // gamma2 lower bound
    double upper = 0.0;  // gamma2 upper bound
    int rank = 0;
    int m = 0;
    bool upper_ok = false;  // herdisc <= 2 sqrt(max(log2 m, 1)) * upper
    bool lower_ok = false;  // lower / (2 max(log2 rank, 1)) <= herdisc
};

SandwichRecord herdisc_sandwich_check(const SetSystem& ss,
                                      const OracleBudget& budget);

}  // namespace balance
