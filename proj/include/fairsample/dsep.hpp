#ifndef FAIRSAMPLE_DSEP_HPP
#define FAIRSAMPLE_DSEP_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fairsample/graph.hpp"

namespace fairsample {

/// Direction of one step along a path, read in traversal order:
/// Forward is `a -> b`, Backward is `a <- b`, Nonlocal is `a ~~ b`.
enum class Step { Forward, Backward, Nonlocal };

struct Path {
    std::vector<NodeId> nodes;
    std::vector<Step> steps;  // steps.size() == nodes.size() - 1

    Path reversed() const;
    friend bool operator==(const Path&, const Path&) = default;
    friend auto operator<=>(const Path&, const Path&) = default;
};

std::string render_path(const Path& p);

enum class PathStatus { Open, Blocked };

enum class PathRule {
    ColliderUnconditioned,         // rule (i)
    NonColliderConditioned,        // rule (ii)
    ColliderOpenedByConditioning,  // rule (iii)
    NoSignallingBlocked,
};

const char* to_string(PathRule r);

struct OpenedCollider {
    NodeId collider;
    NodeId opened_by;  // the collider itself, or its first conditioned descendant
    friend bool operator==(const OpenedCollider&, const OpenedCollider&) = default;
};

struct PathVerdict {
    Path path;
    PathStatus status = PathStatus::Blocked;
    std::optional<PathRule> reason;
    std::optional<NodeId> blocking_node;
    std::vector<OpenedCollider> colliders;  // filled for Open verdicts
};

/// All simple paths between u and v over the skeleton (directed and nonlocal
/// edges), in lexicographic order of node sequence.
/// Errors: BidirectedPresent, UnknownNode.
std::vector<Path> enumerate_paths(const CausalDiagram& d, const NodeId& u, const NodeId& v);

/// Ordinary d-separation classification. Errors: NonlocalPresent when the
/// path uses a nonlocal edge.
PathVerdict classify_path(const CausalDiagram& d, const Path& path, const std::set<NodeId>& z);

/// Classification where nonlocal edges act as latent common causes and a
/// setting-originated directed chain that crosses a nonlocal edge is blocked.
PathVerdict ns_classify_path(const CausalDiagram& d, const Path& path, const std::set<NodeId>& z);

struct Separation {
    bool separated = true;
    std::optional<PathVerdict> witness;  // lexicographically first open path
};

/// Set-level query. Paths are read from U towards V. Nonlocal edges are
/// rejected (NonlocalPresent); use ns_d_separated for hybrid diagrams.
Separation d_separated(const CausalDiagram& d, const std::set<NodeId>& u, const std::set<NodeId>& v,
                       const std::set<NodeId>& z);

Separation ns_d_separated(const CausalDiagram& d, const std::set<NodeId>& u, const std::set<NodeId>& v,
                          const std::set<NodeId>& z);

struct ProbeOptions {
    int n_params = 100;
    std::uint64_t seed = 1;
    std::map<NodeId, int> cardinalities;  // default 2
};

/// Maximum total-variation distance between p(U,V|z) and p(U|z)p(V|z) over
/// random parameterizations of the DAG, using the exact joint.
/// Errors: BidirectedPresent, NonlocalPresent, CardinalityOverflow (> 2^24 cells).
double ci_probe(const CausalDiagram& d, const std::set<NodeId>& u, const std::set<NodeId>& v,
                const std::set<NodeId>& z, const ProbeOptions& opts = {});

}  // namespace fairsample

#endif  // FAIRSAMPLE_DSEP_HPP
