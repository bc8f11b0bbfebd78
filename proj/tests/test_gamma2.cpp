#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>

#include "balance/gamma2.hpp"
#include "balance/rng.hpp"

using namespace balance;

namespace {

double row_max(const Eigen::MatrixXd& B) {
    return B.rowwise().norm().maxCoeff();
}
double col_max(const Eigen::MatrixXd& C) {
    return C.colwise().norm().maxCoeff();
}

// independent numeric minimization of r(A C^-1) c(C) over invertible C,
// random restarts plus coordinate-wise annealing
double gamma2_numeric_2x2(const Eigen::MatrixXd& A, uint64_t seed) {
    CounterRng rng(seed);
    auto objective = [&](const Eigen::Matrix2d& C) {
        Eigen::FullPivLU<Eigen::Matrix2d> lu(C);
        if (!lu.isInvertible()) return 1e18;
        Eigen::MatrixXd B = A * lu.inverse();
        return row_max(B) * col_max(C);
    };
    double best = 1e18;
    for (int rs = 0; rs < 12; ++rs) {
        Eigen::Matrix2d c;
        for (int i = 0; i < 4; ++i) c(i / 2, i % 2) = rng.uniform(-2.0, 2.0);
        double cur = objective(c);
        double step = 0.5;
        while (step > 1e-6) {
            bool improved = false;
            for (int i = 0; i < 4; ++i)
                for (double dir : {step, -step}) {
                    Eigen::Matrix2d c2 = c;
                    c2(i / 2, i % 2) += dir;
                    double val = objective(c2);
                    if (val < cur) {
                        cur = val;
                        c = c2;
                        improved = true;
                    }
                }
            if (!improved) step *= 0.5;
        }
        best = std::min(best, cur);
    }
    return best;
}

}  // namespace

TEST_CASE("gamma2 of the identity is 1") {
    for (int n : {1, 2, 4, 6}) {
        Gamma2Estimate est = gamma2_upper(Eigen::MatrixXd::Identity(n, n));
        CHECK(est.upper == doctest::Approx(1.0));
        CHECK(est.residual < 1e-9);
        CHECK(gamma2_lower(Eigen::MatrixXd::Identity(n, n)) ==
              doctest::Approx(1.0));
    }
}

TEST_CASE("estimate invariants: valid factorization, lower <= upper") {
    for (uint64_t seed = 0; seed < 10; ++seed) {
        CounterRng rng(CounterRng::derive(1500, seed));
        int m = 2 + static_cast<int>(seed % 3);
        int n = 2 + static_cast<int>(seed % 4);
        Eigen::MatrixXd A(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = rng.uniform(-1.0, 1.0);
        Gamma2Estimate est = gamma2_upper(A);
        CHECK(est.residual <= 1e-7);
        CHECK((A - est.B * est.C).cwiseAbs().maxCoeff() ==
              doctest::Approx(est.residual));
        CHECK(est.upper == doctest::Approx(row_max(est.B) * col_max(est.C)));
        CHECK(gamma2_lower(A) <= est.upper + 1e-9);
    }
}

TEST_CASE("upper bound is near the true optimum on 2x2 matrices") {
    std::vector<Eigen::Matrix2d> cases;
    Eigen::Matrix2d tri;
    tri << 1, 0, 1, 1;
    cases.push_back(tri);
    Eigen::Matrix2d ones = Eigen::Matrix2d::Ones();
    cases.push_back(ones);
    CounterRng rng(9);
    for (int k = 0; k < 3; ++k) {
        Eigen::Matrix2d r;
        for (int i = 0; i < 4; ++i) r(i / 2, i % 2) = rng.uniform(-1.0, 1.0);
        cases.push_back(r);
    }
    for (size_t i = 0; i < cases.size(); ++i) {
        double als = gamma2_upper(cases[i]).upper;
        double ref = gamma2_numeric_2x2(cases[i], 2000 + i);
        CHECK(als <= ref + 1e-3);
        CHECK(als >= ref - 1e-3);
    }
}

TEST_CASE("incidence and stacked matrices") {
    SetSystem ss(3, {{0, 1}, {2}});
    Eigen::MatrixXd inc = incidence_matrix(ss);
    REQUIRE(inc.rows() == 2);
    REQUIRE(inc.cols() == 3);
    CHECK(inc(0, 0) == 1.0);
    CHECK(inc(0, 2) == 0.0);
    CHECK(inc(1, 2) == 1.0);

    VectorSequence vs(2, {{1, 0}, {0, 1}, {0.5, 0.5}}, NormClass::two_ball);
    Eigen::MatrixXd st = stacked_matrix(ss, vs);
    REQUIRE(st.rows() == 4);  // d * |S|
    REQUIRE(st.cols() == 3);
    CHECK(st(0, 0) == 1.0);          // coord 1 of v_1 on set {0,1}
    CHECK(st(0, 2) == 0.0);          // element 2 not in the set
    CHECK(st(3, 2) == doctest::Approx(0.5));  // coord 2 of v_3 on set {2}
}

TEST_CASE("transfer never increases the upper bound for unit 2-ball vectors") {
    for (uint64_t seed = 0; seed < 10; ++seed) {
        CounterRng rng(CounterRng::derive(1600, seed));
        int t = 4 + static_cast<int>(seed % 4);
        std::vector<std::vector<int>> sets;
        for (int i = 0; i < 4; ++i) {
            std::vector<int> s;
            for (int j = 0; j < t; ++j)
                if (rng.next_double() < 0.5) s.push_back(j);
            if (s.empty()) s.push_back(0);
            sets.push_back(std::move(s));
        }
        SetSystem ss(t, std::move(sets));
        std::vector<Vec> vecs;
        for (int i = 0; i < t; ++i) vecs.push_back(rng.unit_vector(2));
        VectorSequence vs(2, std::move(vecs), NormClass::two_ball);

        Gamma2Estimate base = gamma2_upper(incidence_matrix(ss));
        Gamma2Estimate lifted = transfer_factorization(ss, vs, base);
        CHECK(lifted.upper <= base.upper + 1e-9);
        Eigen::MatrixXd st = stacked_matrix(ss, vs);
        CHECK((st - lifted.B * lifted.C).cwiseAbs().maxCoeff() < 1e-7);
    }
}

TEST_CASE("combinatorial bound sandwich on random systems") {
    OracleBudget budget;
    for (uint64_t seed = 0; seed < 12; ++seed) {
        CounterRng rng(CounterRng::derive(1700, seed));
        int t = 4 + static_cast<int>(seed % 5);
        int m = 2 + static_cast<int>(seed % 4);
        std::vector<std::vector<int>> sets;
        for (int i = 0; i < m; ++i) {
            std::vector<int> s;
            for (int j = 0; j < t; ++j)
                if (rng.next_double() < 0.5) s.push_back(j);
            if (s.empty()) s.push_back(rng.next_int(0, t - 1));
            sets.push_back(std::move(s));
        }
        SetSystem ss(t, std::move(sets));
        std::vector<Vec> vecs;
        for (int i = 0; i < t; ++i) vecs.push_back(rng.unit_vector(2));
        VectorSequence vs(2, std::move(vecs), NormClass::two_ball);

        CombBoundRecord rec = comb_bound_check(ss, vs, budget);
        CHECK(rec.bound >= rec.upper - 1e-12);
        CHECK(rec.holds_with_slack);

        SandwichRecord sw = herdisc_sandwich_check(ss, budget);
        CHECK(sw.upper_ok);
        CHECK(sw.lower_ok);
        CHECK(sw.lower <= sw.upper + 1e-9);
    }
}
