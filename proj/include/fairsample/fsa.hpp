#ifndef FAIRSAMPLE_FSA_HPP
#define FAIRSAMPLE_FSA_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "fairsample/dsep.hpp"
#include "fairsample/graph.hpp"

namespace fairsample {

struct SelectionNode {
    NodeId node;
    friend bool operator==(const SelectionNode&, const SelectionNode&) = default;
};

/// Postselection expressed as fixed values of outcome variables (no K node).
struct DirectConditioning {
    std::map<NodeId, int> values;
    friend bool operator==(const DirectConditioning&, const DirectConditioning&) = default;
};

using Selection = std::variant<SelectionNode, DirectConditioning>;

/// A causal diagram of a Bell experiment together with the roles its
/// variables play. Build with make_scenario, which validates the roles.
struct ScenarioSpec {
    CausalDiagram diagram;
    std::map<PartyId, std::vector<NodeId>> bell;  // per party, sorted
    Selection selection;
    bool lambda_influences_all = false;

    std::vector<PartyId> parties() const;
    std::set<NodeId> outcomes(const PartyId& p) const;
    /// Explicitly tagged settings of `p`, plus untagged settings whose first
    /// outcome child (by name) belongs to `p`.
    std::set<NodeId> settings(const PartyId& p) const;
    std::set<NodeId> all_settings() const;
    /// K for a selection node, otherwise the conditioned outcomes.
    std::set<NodeId> conditioning_set() const;
    bool hybrid() const { return !diagram.nonlocal().empty(); }

    friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

/// Errors: InvalidScenario (missing bell outcomes or settings for a party,
/// unknown selection node), RoleConflict (bell name not an outcome of its
/// party, conditioning on a non-outcome).
ScenarioSpec make_scenario(CausalDiagram diagram, std::map<PartyId, std::vector<NodeId>> bell, Selection selection,
                           bool lambda_influences_all);

struct OutcomePartition {
    std::set<NodeId> feeds_selection;  // ancestors of K
    std::set<NodeId> rest;
    friend bool operator==(const OutcomePartition&, const OutcomePartition&) = default;
};

/// Errors: NoSelectionNode for direct-conditioning scenarios.
std::map<PartyId, OutcomePartition> partition_outcomes(const ScenarioSpec& spec);

/// Bell outcomes that also decide the postselection. Empty means none.
std::set<NodeId> detect_franson_obstruction(const ScenarioSpec& spec);

struct CheckResult {
    bool ok = true;
    std::optional<PathVerdict> witness;
};

/// Measurement independence of the latents from all settings given the
/// postselection, over every admissible resolution of bidirected edges.
CheckResult check_ci(const ScenarioSpec& spec);
/// Pairwise separation of each party's (bell outcomes + settings) given the
/// postselection and all latents, over every resolution.
CheckResult check_cii(const ScenarioSpec& spec);

enum class Classification { Fig2c, Fig4, SettingsOnlyK, Unsafe };

const char* to_string(Classification c);

struct FsaVerdict {
    bool safe = false;
    Classification classification = Classification::Unsafe;
    bool hybrid = false;
    bool ci_ok = true;
    bool cii_ok = true;
    std::optional<PathVerdict> ci_witness;
    std::optional<PathVerdict> cii_witness;
    std::set<NodeId> obstruction;
    std::size_t resolutions_checked = 0;
    std::set<NodeId> pruned;
    std::vector<NamePair> added_edges;
    std::vector<std::string> notes;
};

/// Bidirected edges beyond this count raise ResolutionBlowup.
inline constexpr std::size_t kMaxBidirected = 12;

/// Errors: NonlocalPresent for hybrid scenarios (see verify_fsa_hybrid),
/// ResolutionBlowup.
FsaVerdict verify_fsa(const ScenarioSpec& spec);

namespace detail {
// Shared driver; `no_signalling` selects the hybrid path rules and the
// per-bipartition factorization check.
FsaVerdict run_verifier(const ScenarioSpec& spec, bool no_signalling);
CheckResult run_ci(const ScenarioSpec& spec, bool no_signalling);
CheckResult run_cii(const ScenarioSpec& spec, bool no_signalling);
}  // namespace detail

/// Exit-code style summary: 0 safe, 2 unsafe, 3 obstruction (CI holds but a
/// bell outcome also decides the postselection).
int verdict_code(const FsaVerdict& v);

}  // namespace fairsample

#endif  // FAIRSAMPLE_FSA_HPP
