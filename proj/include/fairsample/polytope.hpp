#ifndef FAIRSAMPLE_POLYTOPE_HPP
#define FAIRSAMPLE_POLYTOPE_HPP

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "fairsample/behavior.hpp"

namespace fairsample {

inline constexpr std::size_t kMaxStrategies = 1'000'000;

/// Number of deterministic local strategies Π_p outcomes_p^settings_p.
/// Errors: StrategyBlowup above kMaxStrategies.
std::size_t local_vertex_count(const Dims& dims);

/// One deterministic behavior per tuple of per-party functions
/// setting -> outcome. Party 0's strategy index is the most significant digit.
std::vector<BehaviorTable> enumerate_local_vertices(const Dims& dims);

/// Vertices of the bipartite no-signalling polytope, found by enumerating
/// bases of tight positivity constraints (dims must have two parties).
std::vector<BehaviorTable> enumerate_ns_vertices(const Dims& dims);

/// Linear functional that separates a behavior from the local polytope:
/// value = Σ c·p on the behavior, local_bound = max over local vertices.
struct SeparatingFunctional {
    std::vector<double> coefficients;
    double value = 0;
    double local_bound = 0;
};

struct LocalityResult {
    bool local = false;
    double residual = 0;  // L1 distance of the best convex combination
    std::vector<std::pair<std::size_t, double>> weights;  // vertex index, weight > 0
    std::optional<SeparatingFunctional> certificate;
};

/// Feasibility of b = Σ wᵢ Vᵢ, w >= 0, Σw = 1 over the local vertices.
/// Local when the phase-one residual is <= tol.
LocalityResult is_local(const BehaviorTable& b, double tol = 1e-9);

}  // namespace fairsample

#endif  // FAIRSAMPLE_POLYTOPE_HPP
