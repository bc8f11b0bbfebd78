#include "balance/smoothed.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>

#include "balance/rng.hpp"

namespace balance {

IntervalFamily block_decomposition(int n, int b) {
    if (b < 1 || b > n) throw std::invalid_argument("block size out of range");
    std::set<Interval> fam;
    int blocks = (n + b - 1) / b;
    for (int i = 1; i <= blocks; ++i) {
        int start = (i - 1) * b;
        int end = std::min(i * b, n) - 1;
        fam.insert({0, end});                       // block-end prefix
        for (int r = start; r <= end; ++r)          // within-block prefixes
            fam.insert({start, r});
    }
    IntervalFamily out;
    out.n = n;
    out.long_threshold = b;
    out.intervals.assign(fam.begin(), fam.end());
    return out;
}

int cover_violation(const IntervalFamily& fam) {
    std::set<Interval> members(fam.intervals.begin(), fam.intervals.end());
    for (int k = 0; k < fam.n; ++k) {
        // prefix [0..k] must be one member or two abutting members
        if (members.count({0, k})) continue;
        bool ok = false;
        for (int mid = 0; mid < k && !ok; ++mid)
            ok = members.count({0, mid}) && members.count({mid + 1, k});
        if (!ok) return k;
    }
    return -1;
}

namespace {

Vec masked_row_sums(const BlockState& s, const Interval& i, const Vec& x) {
    Vec out(s.d(), 0.0);
    for (int j = i.first; j <= i.last; ++j) axpy(x[j], s.columns[j], out);
    return out;
}

void validate_state(const BlockState& s, const IntervalFamily& fam) {
    if (fam.n != s.n()) throw std::invalid_argument("family/block size mismatch");
    for (const Vec& c : s.columns)
        if (static_cast<int>(c.size()) != s.d())
            throw std::invalid_argument("column dimension mismatch");
    for (const Interval& i : fam.intervals)
        if (i.first < 0 || i.last >= fam.n || i.first > i.last)
            throw std::invalid_argument("interval out of range");
}

}  // namespace

LinearProgram build_block_lp(const BlockState& s, const IntervalFamily& fam) {
    validate_state(s, fam);
    int n = s.n(), d = s.d();
    LinearProgram lp(n);
    for (int j = 0; j < n; ++j) {
        lp.lower[j] = -1.0;
        lp.upper[j] = 1.0;
    }
    for (int i = 0; i < d; ++i) {
        Vec row(n);
        for (int j = 0; j < n; ++j) row[j] = s.columns[j][i];
        lp.add_equality(std::move(row), -s.w[i]);
    }
    for (const Interval& iv : fam.intervals)
        for (int i = 0; i < d; ++i) {
            Vec row(n, 0.0);
            for (int j = iv.first; j <= iv.last; ++j) row[j] = s.columns[j][i];
            lp.add_range(std::move(row), -2 * s.delta, 2 * s.delta);
        }
    return lp;
}

std::optional<FractionalColoring> fractional_signing(const BlockState& s,
                                                     const IntervalFamily& fam) {
    FeasibilityResult r = lp_feasible(build_block_lp(s, fam));
    if (r.status != LpStatus::feasible) return std::nullopt;
    return FractionalColoring(r.point);
}

std::pair<double, bool> check_dual_certificate(const BlockState& s,
                                               const IntervalFamily& fam,
                                               const DualCertificate& c) {
    validate_state(s, fam);
    int d = s.d(), n = s.n();
    if (static_cast<int>(c.y.size()) != d ||
        c.alphas.size() != fam.intervals.size())
        throw std::invalid_argument("certificate shape mismatch");
    if (std::abs(one_norm(c.y) - d) > 1e-9)
        throw std::invalid_argument("certificate: ||y||_1 != d");
    double alpha_mass = 0.0;
    for (const Vec& a : c.alphas) {
        if (static_cast<int>(a.size()) != d)
            throw std::invalid_argument("certificate shape mismatch");
        alpha_mass += one_norm(a);
    }
    if (alpha_mass > d / 2.0 + 1e-9)
        throw std::invalid_argument("certificate: alpha mass exceeds d/2");

    double lhs = 0.0;
    for (int j = 0; j < n; ++j) {
        Vec z = c.y;
        for (size_t k = 0; k < fam.intervals.size(); ++k) {
            const Interval& iv = fam.intervals[k];
            if (iv.first <= j && j <= iv.last) axpy(-1.0, c.alphas[k], z);
        }
        lhs += std::abs(dot(z, s.columns[j]));
    }
    return {lhs, lhs >= s.delta * d};
}

namespace {

double subseq_prefix_disc(const std::vector<Vec>& cols, const Coloring& x) {
    if (cols.empty()) return 0.0;
    Vec run(cols[0].size(), 0.0);
    double worst = 0.0;
    for (size_t j = 0; j < cols.size(); ++j) {
        axpy(static_cast<double>(x.signs[j]), cols[j], run);
        worst = std::max(worst, inf_norm(run));
    }
    return worst;
}

Coloring greedy_columns(const std::vector<Vec>& cols) {
    Coloring x;
    x.signs.assign(cols.size(), 1);
    if (cols.empty()) return x;
    Vec run(cols[0].size(), 0.0);
    for (size_t j = 0; j < cols.size(); ++j) {
        Vec plus = run, minus = run;
        axpy(1.0, cols[j], plus);
        axpy(-1.0, cols[j], minus);
        x.signs[j] = (inf_norm(plus) <= inf_norm(minus)) ? 1 : -1;
        run = (x.signs[j] > 0) ? plus : minus;
    }
    return x;
}

struct ColumnSearch {
    const std::vector<Vec>& cols;
    std::vector<int8_t> cur, best;
    double best_val;
    Vec run;
    long long nodes = 0;
    static constexpr long long kNodeCap = 1'500'000;

    explicit ColumnSearch(const std::vector<Vec>& c) : cols(c) {
        Coloring g = greedy_columns(c);
        best = g.signs;
        best_val = subseq_prefix_disc(c, g);
        cur.assign(c.size(), 1);
        run.assign(c.empty() ? 0 : c[0].size(), 0.0);
        if (!c.empty()) descend(0, 0.0);
    }

    void descend(size_t j, double run_max) {
        if (run_max >= best_val) return;  // cannot strictly improve
        if (j == cols.size()) {
            best = cur;
            best_val = run_max;
            return;
        }
        if (++nodes > kNodeCap) return;  // keep the best found so far
        // greedy-first branch order tightens the bound early
        Vec plus = run;
        axpy(1.0, cols[j], plus);
        double plus_n = inf_norm(plus);
        Vec minus = run;
        axpy(-1.0, cols[j], minus);
        double minus_n = inf_norm(minus);
        int first = (plus_n <= minus_n) ? +1 : -1;
        for (int sgn : {first, -first}) {
            cur[j] = static_cast<int8_t>(sgn);
            Vec& next = (sgn > 0) ? plus : minus;
            double next_n = (sgn > 0) ? plus_n : minus_n;
            std::swap(run, next);
            descend(j + 1, std::max(run_max, next_n));
            std::swap(run, next);
        }
    }
};

}  // namespace

InnerSolver default_inner_solver() {
    return [](const std::vector<Vec>& cols) {
        if (cols.size() <= 22) {
            ColumnSearch s(cols);
            Coloring x;
            x.signs = s.best;
            return x;
        }
        return greedy_columns(cols);
    };
}

std::pair<Coloring, double> round_block(const BlockState& s,
                                        const FractionalColoring& x,
                                        const InnerSolver& inner, int bits) {
    int n = s.n();
    if (static_cast<int>(x.values.size()) != n)
        throw std::invalid_argument("fractional coloring size mismatch");
    if (bits < 1 || bits > 52) throw std::invalid_argument("bits out of range");

    double scale = std::ldexp(1.0, bits);  // 2^bits
    std::vector<int64_t> y(n);
    for (int j = 0; j < n; ++j) {
        double yj = (x.values[j] + 1.0) / 2.0;
        y[j] = static_cast<int64_t>(std::floor(yj * scale));
        y[j] = std::clamp<int64_t>(y[j], 0, static_cast<int64_t>(scale));
    }

    double level_bound = 0.0;
    for (int k = bits; k >= 1; --k) {
        int64_t bit = int64_t{1} << (bits - k);
        std::vector<int> idx;
        for (int j = 0; j < n; ++j)
            if (y[j] & bit) idx.push_back(j);
        if (idx.empty()) continue;
        std::vector<Vec> sub;
        for (int j : idx) sub.push_back(s.columns[j]);
        Coloring chi = inner(sub);
        double delta_k = subseq_prefix_disc(sub, chi);
        for (size_t t = 0; t < idx.size(); ++t)
            y[idx[t]] += chi.signs[t] * bit;
        level_bound += std::ldexp(delta_k, -k);
    }

    double max_col = 0.0;
    for (const Vec& c : s.columns) max_col = std::max(max_col, inf_norm(c));
    // x* = 2 y* - 1, so every y-space bound doubles in x space
    double bound = 2.0 * (level_bound + std::ldexp(1.0, -bits) * n * max_col);

    Coloring out;
    out.signs.resize(n);
    for (int j = 0; j < n; ++j) {
        if (y[j] != 0 && y[j] != static_cast<int64_t>(scale))
            throw std::logic_error("rounding left a fractional value");
        out.signs[j] = (y[j] == 0) ? -1 : 1;
    }
    return {out, bound};
}

SmoothedResult smoothed_prefix_solve(const VectorSequence& vs, int n, int b,
                                     std::optional<double> delta,
                                     const InnerSolver& inner, int bits) {
    int total = vs.count(), d = vs.dim;
    if (n < 1 || n > total) throw std::invalid_argument("block length out of range");
    if (b < 1 || b > n) throw std::invalid_argument("block size out of range");

    SmoothedResult res;
    res.coloring.signs.assign(total, 1);
    double dlt = delta ? *delta : calibrate_delta(d, n, inner);
    if (dlt <= 0) throw std::invalid_argument("delta must be positive");

    Vec w(d, 0.0);
    double max_prefix = 0.0;
    auto apply_block = [&](int start, int len, const Coloring& block_signs) {
        for (int j = 0; j < len; ++j) {
            res.coloring.signs[start + j] = block_signs.signs[j];
            axpy(static_cast<double>(block_signs.signs[j]),
                 vs.vectors[start + j], w);
            max_prefix = std::max(max_prefix, inf_norm(w));
        }
    };
    auto record = [&](int block, bool feas, bool degraded) {
        if (inf_norm(w) > dlt + kTol) {
            dlt = inf_norm(w);  // reset the working bound, flag the round
            degraded = true;
        }
        res.trace.blocks.push_back(
            {block, feas, degraded, inf_norm(w), max_prefix, dlt});
        res.trace.any_degraded = res.trace.any_degraded || degraded;
    };

    int full_blocks = total / n;
    IntervalFamily fam = block_decomposition(n, b);
    for (int r = 1; r <= full_blocks; ++r) {
        int start = (r - 1) * n;
        std::vector<Vec> cols(vs.vectors.begin() + start,
                              vs.vectors.begin() + start + n);
        if (r == 1) {
            apply_block(start, n, inner(cols));
            record(r, true, false);
            continue;
        }
        BlockState st{cols, w, dlt, r};
        std::optional<FractionalColoring> frac = fractional_signing(st, fam);
        if (!frac) {
            apply_block(start, n, inner(cols));
            record(r, false, true);
            continue;
        }
        auto [signs, rb] = round_block(st, *frac, inner, bits);
        (void)rb;
        apply_block(start, n, signs);
        record(r, true, false);
    }
    int tail = total - full_blocks * n;
    if (tail > 0) {
        int start = full_blocks * n;
        std::vector<Vec> cols(vs.vectors.begin() + start, vs.vectors.end());
        apply_block(start, tail, inner(cols));
        record(full_blocks + 1, true, false);
    }
    res.trace.final_delta = dlt;
    res.trace.max_prefix = max_prefix;
    return res;
}

double calibrate_delta(int d, int n, const InnerSolver& inner, int trials,
                       uint64_t seed) {
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        CounterRng rng(CounterRng::derive(seed, t));
        std::vector<Vec> cols;
        for (int j = 0; j < n; ++j) cols.push_back(rng.unit_vector(d));
        worst = std::max(worst, subseq_prefix_disc(cols, inner(cols)));
    }
    return 2.0 * worst;
}

}  // namespace balance
