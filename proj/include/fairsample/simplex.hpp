#ifndef FAIRSAMPLE_SIMPLEX_HPP
#define FAIRSAMPLE_SIMPLEX_HPP

#include <cstddef>
#include <vector>

namespace fairsample {

/// Result of the phase-one problem  min 1ᵀs  s.t.  A x + s = b,  x, s >= 0
/// (rows with negative right-hand side are negated first).
struct Feasibility {
    double infeasibility = 0;  // optimal 1ᵀs; zero iff A x = b has a solution x >= 0
    std::vector<double> x;
    /// Dual solution y with yᵀA <= 0 componentwise, yᵢ <= 1 on the negated
    /// rows' orientation, and yᵀb == infeasibility. A positive value
    /// certifies infeasibility.
    std::vector<double> y;
    std::size_t pivots = 0;
};

/// Dense tableau simplex with Bland's rule. `a` is row-major, one vector per
/// constraint row; all rows must share the same length.
Feasibility solve_feasibility(const std::vector<std::vector<double>>& a, const std::vector<double>& b);

}  // namespace fairsample

#endif  // FAIRSAMPLE_SIMPLEX_HPP
