#include "balance/lp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace balance {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kInfBound = 1e29;

bool finite_bound(double b) { return std::abs(b) < kInfBound; }

}  // namespace

LinearProgram::LinearProgram(int n) : num_vars(n) {
    if (n <= 0) throw std::invalid_argument("lp: need at least one variable");
    lower.assign(n, -1e30);
    upper.assign(n, 1e30);
}

void LinearProgram::add_equality(Vec a, double b) {
    if (static_cast<int>(a.size()) != num_vars)
        throw std::invalid_argument("lp: row length mismatch");
    equalities.push_back({std::move(a), b});
}

void LinearProgram::add_range(Vec a, double lo, double hi) {
    if (static_cast<int>(a.size()) != num_vars)
        throw std::invalid_argument("lp: row length mismatch");
    if (lo > hi) throw std::invalid_argument("lp: empty range");
    inequalities.push_back({std::move(a), lo, hi});
}

void LinearProgram::validate() const {
    for (const auto& r : equalities)
        if (static_cast<int>(r.a.size()) != num_vars)
            throw std::invalid_argument("lp: row length mismatch");
    for (const auto& r : inequalities) {
        if (static_cast<int>(r.a.size()) != num_vars)
            throw std::invalid_argument("lp: row length mismatch");
        if (r.lo > r.hi) throw std::invalid_argument("lp: empty range");
    }
    for (int j = 0; j < num_vars; ++j)
        if (lower[j] > upper[j]) throw std::invalid_argument("lp: empty box");
}

double max_violation(const LinearProgram& p, const Vec& x) {
    double worst = 0.0;
    for (const auto& r : p.equalities)
        worst = std::max(worst, std::abs(dot(r.a, x) - r.b));
    for (const auto& r : p.inequalities) {
        double ax = dot(r.a, x);
        worst = std::max({worst, r.lo - ax, ax - r.hi});
    }
    for (int j = 0; j < p.num_vars; ++j)
        worst = std::max({worst, p.lower[j] - x[j], x[j] - p.upper[j]});
    return worst;
}

bool check_feasible_point(const LinearProgram& p, const Vec& x, double tol) {
    return static_cast<int>(x.size()) == p.num_vars && max_violation(p, x) <= tol;
}

bool check_farkas_certificate(const LinearProgram& p,
                              const FarkasCertificate& c, double tol) {
    int n = p.num_vars;
    size_t me = p.equalities.size(), mi = p.inequalities.size();
    if (c.eq.size() != me || c.range_hi.size() != mi ||
        c.range_lo.size() != mi ||
        static_cast<int>(c.box_hi.size()) != n ||
        static_cast<int>(c.box_lo.size()) != n)
        return false;

    for (size_t k = 0; k < mi; ++k)
        if (c.range_hi[k] < -tol || c.range_lo[k] < -tol) return false;
    for (int j = 0; j < n; ++j)
        if (c.box_hi[j] < -tol || c.box_lo[j] < -tol) return false;

    Vec row(n, 0.0);
    double rhs = 0.0;
    for (size_t i = 0; i < me; ++i) {
        axpy(c.eq[i], p.equalities[i].a, row);
        rhs += c.eq[i] * p.equalities[i].b;
    }
    for (size_t k = 0; k < mi; ++k) {
        const auto& r = p.inequalities[k];
        axpy(c.range_hi[k] - c.range_lo[k], r.a, row);
        if (c.range_hi[k] > tol) {
            if (!finite_bound(r.hi)) return false;
            rhs += c.range_hi[k] * r.hi;
        }
        if (c.range_lo[k] > tol) {
            if (!finite_bound(r.lo)) return false;
            rhs -= c.range_lo[k] * r.lo;
        }
    }
    for (int j = 0; j < n; ++j) {
        row[j] += c.box_hi[j] - c.box_lo[j];
        if (c.box_hi[j] > tol) {
            if (!finite_bound(p.upper[j])) return false;
            rhs += c.box_hi[j] * p.upper[j];
        }
        if (c.box_lo[j] > tol) {
            if (!finite_bound(p.lower[j])) return false;
            rhs -= c.box_lo[j] * p.lower[j];
        }
    }
    return inf_norm(row) <= tol && rhs < -tol;
}

namespace {

enum class ColState { nb_lower, nb_upper, nb_free, basic, fixed };

/// Phase-1 bounded-variable simplex over the rows [equalities; ranges],
/// each range row written as a.x - s = 0 with the slack boxed to [lo, hi].
/// One artificial per row absorbs the initial residual.
class Simplex {
  public:
    explicit Simplex(const LinearProgram& p) : p_(p) {
        me_ = static_cast<int>(p.equalities.size());
        mi_ = static_cast<int>(p.inequalities.size());
        m_ = me_ + mi_;
        n_ = p.num_vars;
        ncols_ = n_ + mi_ + m_;

        // scale every row to unit max-abs coefficient
        scale_.assign(m_, 1.0);
        A_ = Eigen::MatrixXd::Zero(std::max(m_, 1), ncols_);
        b_ = Eigen::VectorXd::Zero(std::max(m_, 1));
        lb_.assign(ncols_, 0.0);
        ub_.assign(ncols_, 0.0);
        cost_.assign(ncols_, 0.0);

        for (int i = 0; i < m_; ++i) {
            const Vec& a = (i < me_) ? p.equalities[i].a
                                     : p.inequalities[i - me_].a;
            double s = inf_norm(a);
            scale_[i] = (s > 0) ? 1.0 / s : 1.0;
            for (int j = 0; j < n_; ++j) A_(i, j) = a[j] * scale_[i];
            if (i < me_) {
                b_(i) = p.equalities[i].b * scale_[i];
            } else {
                int k = i - me_;
                A_(i, n_ + k) = -1.0;
                b_(i) = 0.0;
            }
        }
        for (int j = 0; j < n_; ++j) {
            lb_[j] = p.lower[j];
            ub_[j] = p.upper[j];
        }
        for (int k = 0; k < mi_; ++k) {
            lb_[n_ + k] = p.inequalities[k].lo * scale_[me_ + k];
            ub_[n_ + k] = p.inequalities[k].hi * scale_[me_ + k];
        }
        for (int i = 0; i < m_; ++i) {
            lb_[n_ + mi_ + i] = 0.0;
            ub_[n_ + mi_ + i] = 1e30;
            cost_[n_ + mi_ + i] = 1.0;
        }

        // nonbasic start at the finite bound nearest zero
        state_.assign(ncols_, ColState::nb_free);
        val_.assign(ncols_, 0.0);
        for (int j = 0; j < n_ + mi_; ++j) {
            bool lf = finite_bound(lb_[j]), uf = finite_bound(ub_[j]);
            if (lf && (!uf || std::abs(lb_[j]) <= std::abs(ub_[j]))) {
                state_[j] = ColState::nb_lower;
                val_[j] = lb_[j];
            } else if (uf) {
                state_[j] = ColState::nb_upper;
                val_[j] = ub_[j];
            }
        }
        basis_.resize(m_);
        for (int i = 0; i < m_; ++i) {
            double res = b_(i);
            for (int j = 0; j < n_ + mi_; ++j)
                if (val_[j] != 0.0) res -= A_(i, j) * val_[j];
            int art = n_ + mi_ + i;
            A_(i, art) = (res >= 0) ? 1.0 : -1.0;
            basis_[i] = art;
            state_[art] = ColState::basic;
        }
    }

    LpStatus solve() {
        if (m_ == 0) return LpStatus::feasible;
        binv_ = Eigen::MatrixXd::Identity(m_, m_);
        for (int i = 0; i < m_; ++i) binv_(i, i) = A_(i, basis_[i]);  // +-1
        int since_refactor = 0, stall = 0;
        bool bland = false;
        long iter_cap = 20000 + 200L * (m_ + ncols_);

        for (long iter = 0; iter < iter_cap; ++iter) {
            if (since_refactor >= 64) {
                if (!refactor()) return LpStatus::budget_exceeded;
                since_refactor = 0;
            }
            compute_values();
            Eigen::VectorXd y = dual();
            int enter = -1, dir = 0;
            double best = 0.0;
            for (int j = 0; j < ncols_; ++j) {
                ColState st = state_[j];
                if (st == ColState::basic || st == ColState::fixed) continue;
                double dj = cost_[j] - y.dot(A_.col(j));
                int cand_dir = 0;
                if ((st == ColState::nb_lower || st == ColState::nb_free) &&
                    dj < -kLpTol)
                    cand_dir = +1;
                else if ((st == ColState::nb_upper || st == ColState::nb_free) &&
                         dj > kLpTol)
                    cand_dir = -1;
                if (cand_dir == 0) continue;
                if (bland) {
                    enter = j;
                    dir = cand_dir;
                    break;
                }
                if (std::abs(dj) > best) {
                    best = std::abs(dj);
                    enter = j;
                    dir = cand_dir;
                }
            }
            if (enter == -1) {
                return objective() <= kLpTol ? LpStatus::feasible
                                             : LpStatus::infeasible;
            }

            Eigen::VectorXd w = binv_ * A_.col(enter);
            double t = std::numeric_limits<double>::infinity();
            int leave = -1, leave_side = 0;
            double leave_mag = 0.0;
            auto consider = [&](double ti, int i, int side) {
                ti = std::max(ti, 0.0);
                bool take;
                if (ti < t - 1e-12)
                    take = true;
                else if (ti <= t + 1e-12 && leave >= 0)
                    // ties: Bland wants the smallest variable index,
                    // otherwise prefer the larger pivot for stability
                    take = bland ? basis_[i] < basis_[leave]
                                 : std::abs(w(i)) > leave_mag;
                else
                    take = false;
                if (take) {
                    t = std::min(t, ti);
                    leave = i;
                    leave_side = side;
                    leave_mag = std::abs(w(i));
                }
            };
            for (int i = 0; i < m_; ++i) {
                double delta = dir * w(i);
                int bj = basis_[i];
                double xb = val_[bj];
                if (delta > kPivotTol && finite_bound(lb_[bj]))
                    consider((xb - lb_[bj]) / delta, i, -1);
                else if (delta < -kPivotTol && finite_bound(ub_[bj]))
                    consider((ub_[bj] - xb) / (-delta), i, +1);
            }
            double flip = (finite_bound(lb_[enter]) && finite_bound(ub_[enter]))
                              ? ub_[enter] - lb_[enter]
                              : std::numeric_limits<double>::infinity();
            if (!std::isfinite(t) && !std::isfinite(flip))
                return LpStatus::budget_exceeded;  // phase 1 cannot be unbounded

            if (flip <= t) {
                state_[enter] = (dir > 0) ? ColState::nb_upper
                                          : ColState::nb_lower;
                val_[enter] = (dir > 0) ? ub_[enter] : lb_[enter];
                stall = 0;
                continue;
            }

            // pivot
            int out = basis_[leave];
            if (out >= n_ + mi_) {
                state_[out] = ColState::fixed;  // artificial never re-enters
                val_[out] = 0.0;
            } else {
                state_[out] = (leave_side < 0) ? ColState::nb_lower
                                               : ColState::nb_upper;
                val_[out] = (leave_side < 0) ? lb_[out] : ub_[out];
            }
            val_[enter] += dir * t;
            state_[enter] = ColState::basic;
            basis_[leave] = enter;

            double piv = w(leave);
            if (std::abs(piv) < kPivotTol) return LpStatus::budget_exceeded;
            Eigen::RowVectorXd prow = binv_.row(leave) / piv;
            for (int i = 0; i < m_; ++i)
                if (i != leave) binv_.row(i) -= w(i) * prow;
            binv_.row(leave) = prow;
            ++since_refactor;

            stall = (t <= 1e-10) ? stall + 1 : 0;
            if (stall > 50) bland = true;
        }
        return LpStatus::budget_exceeded;
    }

    Vec point() const {
        Vec x(val_.begin(), val_.begin() + n_);
        for (int j = 0; j < n_; ++j)
            x[j] = std::clamp(x[j], p_.lower[j], p_.upper[j]);
        return x;
    }

    FarkasCertificate certificate() {
        compute_values();
        Eigen::VectorXd y = dual();
        FarkasCertificate c;
        c.eq.resize(me_);
        c.range_hi.resize(mi_);
        c.range_lo.resize(mi_);
        c.box_hi.assign(n_, 0.0);
        c.box_lo.assign(n_, 0.0);
        for (int i = 0; i < me_; ++i) c.eq[i] = -y(i) * scale_[i];
        for (int k = 0; k < mi_; ++k) {
            double yr = y(me_ + k);
            c.range_hi[k] = std::max(-yr, 0.0) * scale_[me_ + k];
            c.range_lo[k] = std::max(yr, 0.0) * scale_[me_ + k];
        }
        for (int j = 0; j < n_; ++j) {
            double dj = cost_[j] - y.dot(A_.col(j));
            c.box_hi[j] = std::max(-dj, 0.0);
            c.box_lo[j] = std::max(dj, 0.0);
        }
        return c;
    }

  private:
    bool refactor() {
        Eigen::MatrixXd B(m_, m_);
        for (int i = 0; i < m_; ++i) B.col(i) = A_.col(basis_[i]);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
        if (!lu.isInvertible()) return false;
        binv_ = lu.inverse();
        return true;
    }

    void compute_values() {
        Eigen::VectorXd r = b_;
        for (int j = 0; j < ncols_; ++j)
            if (state_[j] != ColState::basic && val_[j] != 0.0)
                r -= A_.col(j) * val_[j];
        Eigen::VectorXd xb = binv_ * r;
        for (int i = 0; i < m_; ++i) val_[basis_[i]] = xb(i);
    }

    Eigen::VectorXd dual() const {
        Eigen::VectorXd cb(m_);
        for (int i = 0; i < m_; ++i) cb(i) = cost_[basis_[i]];
        return binv_.transpose() * cb;
    }

    double objective() const {
        double obj = 0.0;
        for (int i = 0; i < m_; ++i)
            if (basis_[i] >= n_ + mi_) obj += std::abs(val_[basis_[i]]);
        return obj;
    }

    const LinearProgram& p_;
    int me_ = 0, mi_ = 0, m_ = 0, n_ = 0, ncols_ = 0;
    Eigen::MatrixXd A_, binv_;
    Eigen::VectorXd b_;
    Vec lb_, ub_, cost_, val_, scale_;
    std::vector<ColState> state_;
    std::vector<int> basis_;
};

}  // namespace

FeasibilityResult lp_feasible(const LinearProgram& p) {
    p.validate();
    FeasibilityResult res;
    Simplex s(p);
    LpStatus st = s.solve();
    if (st == LpStatus::feasible) {
        res.point = s.point();
        if (!check_feasible_point(p, res.point)) {
            res.status = LpStatus::budget_exceeded;
            return res;
        }
        res.status = LpStatus::feasible;
    } else if (st == LpStatus::infeasible) {
        res.certificate = s.certificate();
        if (!check_farkas_certificate(p, res.certificate)) {
            res.status = LpStatus::budget_exceeded;
            return res;
        }
        res.status = LpStatus::infeasible;
    } else {
        res.status = LpStatus::budget_exceeded;
    }
    return res;
}

}  // namespace balance
