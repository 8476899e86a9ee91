#include "fairsample/graph.hpp"

#include <algorithm>
#include <map>

#include "fairsample/error.hpp"

namespace fairsample {

const char* to_string(NodeRole role) {
    switch (role) {
        case NodeRole::Setting: return "setting";
        case NodeRole::Outcome: return "outcome";
        case NodeRole::Latent: return "latent";
        case NodeRole::Selection: return "selection";
    }
    return "?";
}

std::optional<std::size_t> CausalDiagram::find(const NodeId& name) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), name,
                               [](const Node& n, const NodeId& key) { return n.name < key; });
    if (it == nodes_.end() || it->name != name) return std::nullopt;
    return static_cast<std::size_t>(it - nodes_.begin());
}

std::size_t CausalDiagram::index(const NodeId& name) const {
    auto i = find(name);
    if (!i) throw Error(ErrorCode::UnknownNode, "no node named '" + name + "'");
    return *i;
}

bool CausalDiagram::has_edge(std::size_t from, std::size_t to) const {
    return std::binary_search(directed_.begin(), directed_.end(), IndexPair{from, to});
}

namespace {

std::vector<NamePair> to_names(const CausalDiagram& d, const std::vector<IndexPair>& edges) {
    std::vector<NamePair> out;
    out.reserve(edges.size());
    for (auto [a, b] : edges) out.emplace_back(d.name(a), d.name(b));
    return out;
}

std::vector<char> closure(std::size_t start, const std::vector<std::vector<std::size_t>>& adj) {
    std::vector<char> seen(adj.size(), 0);
    std::vector<std::size_t> stack(adj[start].begin(), adj[start].end());
    while (!stack.empty()) {
        auto n = stack.back();
        stack.pop_back();
        if (seen[n]) continue;
        seen[n] = 1;
        for (auto c : adj[n]) stack.push_back(c);
    }
    return seen;
}

// Returns a directed cycle as a list of node indices (first == last), or empty.
std::vector<std::size_t> find_cycle(const std::vector<std::vector<std::size_t>>& children) {
    const std::size_t n = children.size();
    std::vector<int> color(n, 0);  // 0 white, 1 on stack, 2 done
    std::vector<std::size_t> parent(n, n);
    for (std::size_t root = 0; root < n; ++root) {
        if (color[root]) continue;
        std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
        color[root] = 1;
        while (!stack.empty()) {
            auto& [v, next] = stack.back();
            if (next < children[v].size()) {
                auto c = children[v][next++];
                if (color[c] == 1) {
                    std::vector<std::size_t> cycle{c};
                    for (auto u = v; u != c; u = parent[u]) cycle.push_back(u);
                    cycle.push_back(c);
                    std::reverse(cycle.begin(), cycle.end());
                    return cycle;
                }
                if (color[c] == 0) {
                    color[c] = 1;
                    parent[c] = v;
                    stack.emplace_back(c, 0);
                }
            } else {
                color[v] = 2;
                stack.pop_back();
            }
        }
    }
    return {};
}

IndexPair ordered(std::size_t a, std::size_t b) { return a < b ? IndexPair{a, b} : IndexPair{b, a}; }

}  // namespace

std::vector<NamePair> CausalDiagram::directed_names() const { return to_names(*this, directed_); }
std::vector<NamePair> CausalDiagram::bidirected_names() const { return to_names(*this, bidirected_); }
std::vector<NamePair> CausalDiagram::nonlocal_names() const { return to_names(*this, nonlocal_); }

std::vector<std::size_t> CausalDiagram::nodes_with_role(NodeRole role) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].kind.role == role) out.push_back(i);
    return out;
}

std::optional<std::size_t> CausalDiagram::selection_node() const {
    auto sel = nodes_with_role(NodeRole::Selection);
    if (sel.empty()) return std::nullopt;
    return sel.front();
}

std::vector<char> CausalDiagram::descendant_mask(std::size_t i) const { return closure(i, children_); }
std::vector<char> CausalDiagram::ancestor_mask(std::size_t i) const { return closure(i, parents_); }

CausalDiagram build_diagram(std::vector<Node> nodes, const std::vector<NamePair>& directed,
                            const std::vector<NamePair>& bidirected, const std::vector<NamePair>& nonlocal) {
    std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.name < b.name; });
    std::size_t selections = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].name.empty()) throw Error(ErrorCode::DuplicateNode, "node names must be nonempty");
        if (i > 0 && nodes[i].name == nodes[i - 1].name)
            throw Error(ErrorCode::DuplicateNode, "node '" + nodes[i].name + "' declared twice");
        if (nodes[i].kind.is(NodeRole::Outcome) && nodes[i].kind.party.empty())
            throw Error(ErrorCode::InvalidScenario, "outcome '" + nodes[i].name + "' has no party");
        if (nodes[i].kind.is(NodeRole::Selection)) ++selections;
    }
    if (selections > 1) throw Error(ErrorCode::MultipleSelection, "at most one selection node is allowed");

    CausalDiagram d;
    d.nodes_ = std::move(nodes);
    const std::size_t n = d.nodes_.size();

    for (const auto& [from, to] : directed) {
        auto a = d.index(from);
        auto b = d.index(to);
        if (a == b) throw Error(ErrorCode::CycleDetected, from + " -> " + to);
        if (d.kind(b).is(NodeRole::Setting))
            throw Error(ErrorCode::EdgeIntoSetting, "edge " + from + " -> " + to + " points into a setting");
        if (d.kind(a).is(NodeRole::Selection))
            throw Error(ErrorCode::EdgeOutOfSelection, "edge " + from + " -> " + to + " leaves the selection node");
        d.directed_.emplace_back(a, b);
    }
    for (const auto& [u, v] : bidirected) {
        auto a = d.index(u);
        auto b = d.index(v);
        if (a == b) throw Error(ErrorCode::InvalidBidirected, "self loop on " + u);
        if (d.kind(a).is(NodeRole::Latent) || d.kind(b).is(NodeRole::Latent))
            throw Error(ErrorCode::InvalidBidirected, u + " -- " + v + " touches a latent node");
        d.bidirected_.push_back(ordered(a, b));
    }
    for (const auto& [u, v] : nonlocal) {
        auto a = d.index(u);
        auto b = d.index(v);
        const auto& ka = d.kind(a);
        const auto& kb = d.kind(b);
        if (!ka.is(NodeRole::Outcome) || !kb.is(NodeRole::Outcome))
            throw Error(ErrorCode::InvalidNonlocal, u + " ~~ " + v + " must join two outcomes");
        if (ka.party == kb.party)
            throw Error(ErrorCode::InvalidNonlocal, u + " ~~ " + v + " joins outcomes of the same party");
        d.nonlocal_.push_back(ordered(a, b));
    }
    for (auto* edges : {&d.directed_, &d.bidirected_, &d.nonlocal_}) {
        std::sort(edges->begin(), edges->end());
        edges->erase(std::unique(edges->begin(), edges->end()), edges->end());
    }

    d.children_.assign(n, {});
    d.parents_.assign(n, {});
    d.nonlocal_adj_.assign(n, {});
    for (auto [a, b] : d.directed_) {
        d.children_[a].push_back(b);
        d.parents_[b].push_back(a);
    }
    for (auto [a, b] : d.nonlocal_) {
        d.nonlocal_adj_[a].push_back(b);
        d.nonlocal_adj_[b].push_back(a);
    }
    for (auto& v : d.parents_) std::sort(v.begin(), v.end());
    for (auto& v : d.nonlocal_adj_) std::sort(v.begin(), v.end());

    if (auto cycle = find_cycle(d.children_); !cycle.empty()) {
        std::string msg;
        for (std::size_t i = 0; i < cycle.size(); ++i) msg += (i ? " -> " : "") + d.name(cycle[i]);
        throw Error(ErrorCode::CycleDetected, msg);
    }
    return d;
}

std::string fresh_latent_name(const NodeId& u, const NodeId& v) {
    const auto& lo = std::min(u, v);
    const auto& hi = std::max(u, v);
    return "\xCE\xB3_" + lo + "_" + hi;  // γ_<lo>_<hi>
}

CausalDiagram expand_bidirected(const CausalDiagram& d) {
    if (d.bidirected().empty()) return d;
    auto nodes = d.nodes();
    auto directed = d.directed_names();
    for (auto [a, b] : d.bidirected()) {
        auto name = fresh_latent_name(d.name(a), d.name(b));
        while (d.contains(name)) name += "'";
        nodes.push_back({name, NodeKind::latent()});
        directed.emplace_back(name, d.name(a));
        directed.emplace_back(name, d.name(b));
    }
    return build_diagram(std::move(nodes), directed, {}, d.nonlocal_names());
}

namespace {

std::set<NodeId> mask_to_names(const CausalDiagram& d, const std::vector<char>& mask) {
    std::set<NodeId> out;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) out.insert(d.name(i));
    return out;
}

}  // namespace

std::set<NodeId> ancestors(const CausalDiagram& d, const NodeId& n) {
    return mask_to_names(d, d.ancestor_mask(d.index(n)));
}

std::set<NodeId> descendants(const CausalDiagram& d, const NodeId& n) {
    return mask_to_names(d, d.descendant_mask(d.index(n)));
}

CausalDiagram with_directed_edges(const CausalDiagram& d, const std::vector<NamePair>& extra) {
    auto directed = d.directed_names();
    directed.insert(directed.end(), extra.begin(), extra.end());
    return build_diagram(d.nodes(), directed, d.bidirected_names(), d.nonlocal_names());
}

CausalDiagram without_nodes(const CausalDiagram& d, const std::set<NodeId>& drop) {
    std::vector<Node> nodes;
    for (const auto& n : d.nodes())
        if (!drop.count(n.name)) nodes.push_back(n);
    auto keep = [&](const std::vector<NamePair>& edges) {
        std::vector<NamePair> out;
        for (const auto& e : edges)
            if (!drop.count(e.first) && !drop.count(e.second)) out.push_back(e);
        return out;
    };
    return build_diagram(std::move(nodes), keep(d.directed_names()), keep(d.bidirected_names()),
                         keep(d.nonlocal_names()));
}

CausalDiagram without_bidirected(const CausalDiagram& d) {
    return build_diagram(d.nodes(), d.directed_names(), {}, d.nonlocal_names());
}

CausalDiagram with_nonlocal_only(const CausalDiagram& d, const std::vector<NamePair>& keep) {
    return build_diagram(d.nodes(), d.directed_names(), d.bidirected_names(), keep);
}

}  // namespace fairsample
