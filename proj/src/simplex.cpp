#include "fairsample/simplex.hpp"

#include <cmath>
#include <limits>

#include "fairsample/error.hpp"

namespace fairsample {

namespace {
constexpr double kPivotEps = 1e-12;
constexpr double kCostEps = 1e-12;
constexpr std::size_t kMaxPivots = 200000;
}  // namespace

Feasibility solve_feasibility(const std::vector<std::vector<double>>& a, const std::vector<double>& b) {
    const std::size_t m = a.size();
    if (b.size() != m) throw Error(ErrorCode::DimensionMismatch, "rhs length differs from row count");
    const std::size_t n = m ? a.front().size() : 0;
    const std::size_t cols = n + m;

    std::vector<double> sign(m, 1.0);
    std::vector<std::vector<double>> t(m, std::vector<double>(cols + 1, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        if (a[i].size() != n) throw Error(ErrorCode::DimensionMismatch, "ragged constraint matrix");
        if (b[i] < 0) sign[i] = -1.0;
        for (std::size_t j = 0; j < n; ++j) t[i][j] = sign[i] * a[i][j];
        t[i][n + i] = 1.0;
        t[i][cols] = sign[i] * b[i];
    }
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

    // Reduced costs for cost vector (0 on x, 1 on artificials).
    std::vector<double> d(cols + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) d[j] -= t[i][j];
    for (std::size_t i = 0; i < m; ++i) d[cols] -= t[i][cols];

    Feasibility out;
    for (;;) {
        std::size_t enter = cols;
        for (std::size_t j = 0; j < cols; ++j)
            if (d[j] < -kCostEps) {
                enter = j;
                break;
            }
        if (enter == cols) break;

        std::size_t leave = m;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) {
            if (t[i][enter] <= kPivotEps) continue;
            const double ratio = t[i][cols] / t[i][enter];
            if (ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && basis[i] < basis[leave])) {
                best = ratio;
                leave = i;
            }
        }
        if (leave == m) break;  // cannot happen for a phase-one problem bounded below by 0

        auto& row = t[leave];
        const double piv = row[enter];
        for (auto& v : row) v /= piv;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == leave) continue;
            const double f = t[i][enter];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= cols; ++j) t[i][j] -= f * row[j];
        }
        const double f = d[enter];
        for (std::size_t j = 0; j <= cols; ++j) d[j] -= f * row[j];
        basis[leave] = enter;
        if (++out.pivots > kMaxPivots) throw Error(ErrorCode::InvalidModel, "simplex pivot limit reached");
    }

    out.x.assign(n, 0.0);
    double infeasibility = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] < n)
            out.x[basis[i]] = t[i][cols];
        else
            infeasibility += t[i][cols];
    }
    out.infeasibility = std::max(0.0, infeasibility);
    out.y.resize(m);
    for (std::size_t i = 0; i < m; ++i) out.y[i] = sign[i] * (1.0 - d[n + i]);
    return out;
}

}  // namespace fairsample
