#ifndef FAIRSAMPLE_GRAPH_HPP
#define FAIRSAMPLE_GRAPH_HPP

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace fairsample {

using NodeId = std::string;
using PartyId = std::string;

enum class NodeRole { Setting, Outcome, Latent, Selection };

const char* to_string(NodeRole role);

/// Kind of a diagram variable. Outcomes always name their party; settings may
/// name one explicitly, otherwise the party is inferred from the outcomes they
/// point into (see ScenarioSpec).
struct NodeKind {
    NodeRole role = NodeRole::Latent;
    PartyId party;

    static NodeKind setting(PartyId party = {}) { return {NodeRole::Setting, std::move(party)}; }
    static NodeKind outcome(PartyId party) { return {NodeRole::Outcome, std::move(party)}; }
    static NodeKind latent() { return {NodeRole::Latent, {}}; }
    static NodeKind selection() { return {NodeRole::Selection, {}}; }

    bool is(NodeRole r) const { return role == r; }
    friend bool operator==(const NodeKind&, const NodeKind&) = default;
};

struct Node {
    NodeId name;
    NodeKind kind;
    friend bool operator==(const Node&, const Node&) = default;
};

using NamePair = std::pair<NodeId, NodeId>;
using IndexPair = std::pair<std::size_t, std::size_t>;

/// Immutable causal diagram. Nodes are kept in lexicographic order of their
/// names; every edge list is sorted. Bidirected and nonlocal pairs are stored
/// with the smaller index first.
class CausalDiagram {
public:
    CausalDiagram() = default;

    std::size_t size() const { return nodes_.size(); }
    const std::vector<Node>& nodes() const { return nodes_; }
    const Node& node(std::size_t i) const { return nodes_[i]; }
    const NodeId& name(std::size_t i) const { return nodes_[i].name; }
    const NodeKind& kind(std::size_t i) const { return nodes_[i].kind; }

    std::optional<std::size_t> find(const NodeId& name) const;
    /// Throws UnknownNode.
    std::size_t index(const NodeId& name) const;
    bool contains(const NodeId& name) const { return find(name).has_value(); }

    const std::vector<IndexPair>& directed() const { return directed_; }
    const std::vector<IndexPair>& bidirected() const { return bidirected_; }
    const std::vector<IndexPair>& nonlocal() const { return nonlocal_; }

    const std::vector<std::size_t>& children(std::size_t i) const { return children_[i]; }
    const std::vector<std::size_t>& parents(std::size_t i) const { return parents_[i]; }
    const std::vector<std::size_t>& nonlocal_partners(std::size_t i) const { return nonlocal_adj_[i]; }

    bool has_edge(std::size_t from, std::size_t to) const;

    std::vector<NamePair> directed_names() const;
    std::vector<NamePair> bidirected_names() const;
    std::vector<NamePair> nonlocal_names() const;

    std::vector<std::size_t> nodes_with_role(NodeRole role) const;
    std::optional<std::size_t> selection_node() const;

    /// Reflexive-free transitive closures over directed edges, as index masks.
    std::vector<char> descendant_mask(std::size_t i) const;
    std::vector<char> ancestor_mask(std::size_t i) const;

    friend bool operator==(const CausalDiagram& a, const CausalDiagram& b) {
        return a.nodes_ == b.nodes_ && a.directed_ == b.directed_ && a.bidirected_ == b.bidirected_ &&
               a.nonlocal_ == b.nonlocal_;
    }

private:
    friend CausalDiagram build_diagram(std::vector<Node>, const std::vector<NamePair>&,
                                       const std::vector<NamePair>&, const std::vector<NamePair>&);

    std::vector<Node> nodes_;
    std::vector<IndexPair> directed_;
    std::vector<IndexPair> bidirected_;
    std::vector<IndexPair> nonlocal_;
    std::vector<std::vector<std::size_t>> children_;
    std::vector<std::vector<std::size_t>> parents_;
    std::vector<std::vector<std::size_t>> nonlocal_adj_;
};

/// Validates and builds a diagram. Errors: DuplicateNode, UnknownNode,
/// CycleDetected (message names the cycle), EdgeIntoSetting,
/// EdgeOutOfSelection, InvalidBidirected, InvalidNonlocal, MultipleSelection.
CausalDiagram build_diagram(std::vector<Node> nodes, const std::vector<NamePair>& directed,
                            const std::vector<NamePair>& bidirected = {},
                            const std::vector<NamePair>& nonlocal = {});

/// Name of the latent that stands in for the bidirected pair {u, v}.
std::string fresh_latent_name(const NodeId& u, const NodeId& v);

/// Replaces every bidirected edge {U,V} by a fresh latent with edges into U and V.
CausalDiagram expand_bidirected(const CausalDiagram& d);

std::set<NodeId> ancestors(const CausalDiagram& d, const NodeId& n);
std::set<NodeId> descendants(const CausalDiagram& d, const NodeId& n);

// Derived diagrams. Each rebuilds and revalidates.
CausalDiagram with_directed_edges(const CausalDiagram& d, const std::vector<NamePair>& extra);
CausalDiagram without_nodes(const CausalDiagram& d, const std::set<NodeId>& drop);
CausalDiagram without_bidirected(const CausalDiagram& d);
CausalDiagram with_nonlocal_only(const CausalDiagram& d, const std::vector<NamePair>& keep);

}  // namespace fairsample

#endif  // FAIRSAMPLE_GRAPH_HPP
