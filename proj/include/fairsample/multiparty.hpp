#ifndef FAIRSAMPLE_MULTIPARTY_HPP
#define FAIRSAMPLE_MULTIPARTY_HPP

#include <cstddef>
#include <set>
#include <utility>
#include <vector>

#include "fairsample/behavior.hpp"
#include "fairsample/dsep.hpp"
#include "fairsample/fsa.hpp"
#include "fairsample/functional.hpp"

namespace fairsample {

/// One hidden-variable value of a hybrid model: parties `pair` share an
/// arbitrary no-signalling behavior, every other party answers locally.
struct HybridBranch {
    std::pair<std::size_t, std::size_t> pair{0, 1};
    BehaviorTable pair_behavior;  // parties ordered (pair.first, pair.second)
    std::vector<std::vector<std::vector<double>>> locals;  // remaining parties in order: [x][a]
};

struct HybridModel {
    Dims dims;
    std::vector<double> weights;
    std::vector<HybridBranch> branches;

    /// Throws InvalidModel; pair behaviors must be no-signalling within `tol`.
    void validate(double tol = 1e-12) const;
};

BehaviorTable behavior_from_hybrid(const HybridModel& h);

/// Hybrid model with a postselection; raw outcomes split as in JointModel.
struct HybridJoint {
    HybridModel model;
    std::vector<int> aux;
    KRule accept;
};

BehaviorTable postselect_hybrid(const HybridJoint& j);

/// Max of f over (pair choice) x (no-signalling vertex of the pair) x
/// (deterministic responses of the others). Errors: StrategyBlowup,
/// DimensionMismatch (fewer than three parties).
double hybrid_bound(const BellFunctional& f);
std::size_t hybrid_vertex_count(const Dims& dims);

/// Path classification on hybrid diagrams.
PathVerdict ns_classify(const CausalDiagram& d, const Path& path, const std::set<NodeId>& z);

/// Measurement independence with no-signalling path rules, and for each pair
/// sharing nonlocal edges the factorization of every other party.
FsaVerdict verify_fsa_hybrid(const ScenarioSpec& spec);

/// Dispatches to verify_fsa or verify_fsa_hybrid.
FsaVerdict verify_any(const ScenarioSpec& spec);

}  // namespace fairsample

#endif  // FAIRSAMPLE_MULTIPARTY_HPP
