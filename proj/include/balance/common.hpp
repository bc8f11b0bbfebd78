#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace balance {

using Vec = std::vector<double>;

// Absolute tolerance for all core-level floating point comparisons.
inline constexpr double kTol = 1e-9;
// Feasibility tolerance for LP residuals and certificates.
inline constexpr double kLpTol = 1e-7;

struct BudgetExceeded : std::runtime_error {
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

inline double inf_norm(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

inline double two_norm(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double one_norm(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += std::fabs(x);
    return s;
}

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline void axpy(double c, const Vec& x, Vec& y) {
    for (size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

}  // namespace balance
