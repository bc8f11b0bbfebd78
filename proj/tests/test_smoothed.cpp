#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "balance/rng.hpp"
#include "balance/smoothed.hpp"

using namespace balance;

namespace {

std::vector<Vec> random_columns(int d, int n, uint64_t seed) {
    CounterRng rng(seed);
    std::vector<Vec> cols;
    for (int i = 0; i < n; ++i) cols.push_back(rng.unit_vector(d));
    return cols;
}

double max_col_inf(const std::vector<Vec>& cols) {
    double m = 0.0;
    for (const Vec& c : cols) m = std::max(m, inf_norm(c));
    return m;
}

}  // namespace

TEST_CASE("block decomposition members and the cover property") {
    IntervalFamily fam = block_decomposition(4, 2);
    std::set<Interval> got(fam.intervals.begin(), fam.intervals.end());
    std::set<Interval> want = {{0, 1}, {0, 3}, {0, 0}, {2, 2}, {2, 3}};
    CHECK(got == want);
    CHECK(cover_violation(fam) == -1);

    // n == b degenerates to plain prefixes
    IntervalFamily whole = block_decomposition(3, 3);
    CHECK(whole.intervals.size() == 3);
    CHECK(cover_violation(whole) == -1);

    // clipped trailing block
    CHECK(cover_violation(block_decomposition(10, 4)) == -1);
    CHECK(cover_violation(block_decomposition(9, 3)) == -1);
    CHECK(cover_violation(block_decomposition(17, 5)) == -1);
}

TEST_CASE("block LP shape on a one-column state") {
    BlockState s;
    s.columns = {{1.0}};
    s.w = {0.0};
    s.delta = 1.0;
    IntervalFamily fam = block_decomposition(1, 1);
    LinearProgram lp = build_block_lp(s, fam);
    CHECK(lp.num_vars == 1);
    CHECK(lp.equalities.size() == 1);
    CHECK(lp.lower == Vec{-1.0});
    CHECK(lp.upper == Vec{1.0});
}

TEST_CASE("fractional signing exists when w vanishes and solves Mx = -w") {
    BlockState s;
    s.columns = random_columns(3, 8, 77);
    s.w = Vec(3, 0.0);
    s.delta = 2.0;
    IntervalFamily fam = block_decomposition(8, 4);
    auto x = fractional_signing(s, fam);
    REQUIRE(x.has_value());
    Vec sum(3, 0.0);
    for (int j = 0; j < 8; ++j) axpy(x->values[j], s.columns[j], sum);
    CHECK(inf_norm(sum) < 1e-6);

    BlockState t;
    t.columns = {{1.0}, {1.0}};
    t.w = {-1.0};
    t.delta = 1.0;
    IntervalFamily fam2 = block_decomposition(2, 2);
    auto y = fractional_signing(t, fam2);
    REQUIRE(y.has_value());
    CHECK(y->values[0] + y->values[1] == doctest::Approx(1.0));

    // hopeless state: w too large for the columns to cancel
    BlockState bad;
    bad.columns = {{0.0}};
    bad.w = {5.0};
    bad.delta = 0.5;
    CHECK_FALSE(fractional_signing(bad, block_decomposition(1, 1)).has_value());
}

TEST_CASE("dual certificate evaluation") {
    BlockState s;
    s.columns = {{0.5, 0.1}, {-0.3, 0.8}};
    s.w = {0.0, 0.0};
    s.delta = 0.1;
    IntervalFamily fam = block_decomposition(2, 2);

    DualCertificate c;
    c.y = {2.0, 0.0};  // ||y||_1 = d = 2
    c.alphas.assign(fam.intervals.size(), Vec(2, 0.0));
    auto [lhs, holds] = check_dual_certificate(s, fam, c);
    CHECK(lhs == doctest::Approx(2.0 * (0.5 + 0.3)));
    CHECK(holds == (lhs >= s.delta * 2));

    DualCertificate badnorm;
    badnorm.y = {1.0, 0.0};
    badnorm.alphas.assign(fam.intervals.size(), Vec(2, 0.0));
    CHECK_THROWS_AS(check_dual_certificate(s, fam, badnorm),
                    std::invalid_argument);

    DualCertificate heavy;
    heavy.y = {2.0, 0.0};
    heavy.alphas.assign(fam.intervals.size(), Vec(2, 0.0));
    heavy.alphas[0] = {2.0, 2.0};  // sum ||alpha||_1 = 4 > d/2
    CHECK_THROWS_AS(check_dual_certificate(s, fam, heavy),
                    std::invalid_argument);
}

TEST_CASE("rounding an integral signing is a no-op") {
    BlockState s;
    s.columns = {{1.0, 0.0}, {0.0, 1.0}, {0.5, 0.5}};
    s.w = Vec(2, 0.0);
    s.delta = 1.0;
    FractionalColoring x(Vec{1.0, -1.0, 1.0});
    auto [signs, bound] = round_block(s, x, default_inner_solver(), 20);
    CHECK(signs.signs == std::vector<int8_t>{1, -1, 1});
    CHECK(bound < 1e-4);
}

TEST_CASE("rounding the all-zero signing on two parallel columns") {
    BlockState s;
    s.columns = {{1.0}, {1.0}};
    s.w = Vec(1, 0.0);
    s.delta = 1.0;
    FractionalColoring x(Vec{0.0, 0.0});
    auto [signs, bound] = round_block(s, x, default_inner_solver(), 20);
    // one +1 and one -1; the deviation on the length-1 prefix is exactly 1
    CHECK(signs.signs[0] + signs.signs[1] == 0);
    CHECK(bound >= 1.0 - 1e-9);
    CHECK(bound <= 1.0 + 1e-3);
}

TEST_CASE("rounding guarantee holds on random fractional signings") {
    for (uint64_t seed = 0; seed < 25; ++seed) {
        CounterRng rng(CounterRng::derive(1300, seed));
        BlockState s;
        s.columns = random_columns(2, 10, CounterRng::derive(1301, seed));
        s.w = Vec(2, 0.0);
        s.delta = 1.0;
        Vec xf(10);
        for (double& v : xf) v = rng.uniform(-1.0, 1.0);
        FractionalColoring x(xf);
        auto [signs, bound] = round_block(s, x, default_inner_solver(), 20);
        // verify the promise on every prefix
        Vec dev(2, 0.0);
        for (int j = 0; j < 10; ++j) {
            axpy(signs.signs[j] - x.values[j], s.columns[j], dev);
            CHECK(inf_norm(dev) <= bound + 1e-9);
        }
    }
}

TEST_CASE("pipeline on a single block defers to the inner solver") {
    std::vector<Vec> cols = random_columns(2, 6, 91);
    VectorSequence vs(2, cols, NormClass::two_ball);
    InnerSolver inner = default_inner_solver();
    SmoothedResult res = smoothed_prefix_solve(vs, 6, 3, std::nullopt, inner);
    Coloring direct = inner(cols);
    CHECK(res.coloring.signs == direct.signs);
    CHECK(res.trace.blocks.size() == 1);
}

TEST_CASE("pipeline invariants over multiple blocks") {
    for (uint64_t seed = 0; seed < 6; ++seed) {
        std::vector<Vec> cols =
            random_columns(2, 64, CounterRng::derive(1400, seed));
        VectorSequence vs(2, cols, NormClass::two_ball);
        SmoothedResult res =
            smoothed_prefix_solve(vs, 16, 4, std::nullopt, default_inner_solver(), 20);
        const SmoothedTrace& tr = res.trace;
        REQUIRE(tr.blocks.size() == 4);
        Coloring x = res.coloring;
        REQUIRE(x.size() == 64);
        CHECK(prefix_disc_value(vs, x) == doctest::Approx(tr.max_prefix));
        if (!tr.any_degraded) {
            for (const BlockTraceEntry& b : tr.blocks)
                CHECK(b.end_w_norm <= b.delta + 1e-9);
            CHECK(tr.max_prefix <= 6 * tr.final_delta + 1e-6);
        }
    }
}

TEST_CASE("calibrate_delta is deterministic and positive") {
    double a = calibrate_delta(2, 8, default_inner_solver());
    double b = calibrate_delta(2, 8, default_inner_solver());
    CHECK(a == b);
    CHECK(a > 0.0);
}
