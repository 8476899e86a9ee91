#ifndef FAIRSAMPLE_FUNCTIONAL_HPP
#define FAIRSAMPLE_FUNCTIONAL_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fairsample/behavior.hpp"

namespace fairsample {

/// Linear functional Σ c(a⃗,x⃗) p(a⃗|x⃗). Coefficients share the behavior
/// layout. local_bound is always recomputed from the local vertices.
struct BellFunctional {
    Dims dims;
    std::vector<double> coefficients;
    double local_bound = 0;
    std::string label;
};

BellFunctional make_functional(Dims dims, std::vector<double> coefficients, std::string label);

/// Errors: DimensionMismatch.
double evaluate_functional(const BehaviorTable& b, const BellFunctional& f);
double recompute_local_bound(const BellFunctional& f, const Dims& dims);
double recompute_local_bound(const BellFunctional& f);

/// Correlator functional on binary outcomes: Σ_x sign(x) E(x) with
/// E(x) = Σ_a (-1)^{Σa} p(a|x).
BellFunctional correlator_functional(std::size_t parties, const std::function<double(std::span<const int>)>& sign,
                                     std::string label);

/// E00 + E01 + E10 - E11; local bound 2.
BellFunctional chsh();
/// E(001) + E(010) + E(100) - E(111); local bound 2, algebraic maximum 4.
BellFunctional mermin3();
/// Σ_x s(x) E(x) with s = +1 when x has at most one 1, else -1.
BellFunctional svetlichny3();

BellFunctional functional_by_name(const std::string& name);

/// p(ab|xy) = 1/2 if a ⊕ b = x·y.
BehaviorTable pr_box();

/// Binary outcomes with uniform marginals: p(a|x) = (1 + (-1)^{Σa} E(x)) / 2^n.
BehaviorTable correlation_behavior(std::size_t parties, const std::function<double(std::span<const int>)>& correlator);

/// Singlet measured along angles in one plane: E(x,y) = -cos(α_x - β_y).
BehaviorTable singlet_behavior(const std::vector<double>& alpha, const std::vector<double>& beta);

/// GHZ state measured in the equatorial plane: E(x) = cos(Σ_p φ_p(x_p)).
BehaviorTable ghz_behavior(const std::vector<std::vector<double>>& phases);

}  // namespace fairsample

#endif  // FAIRSAMPLE_FUNCTIONAL_HPP
