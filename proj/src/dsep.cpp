#include "fairsample/dsep.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "fairsample/error.hpp"

namespace fairsample {

Path Path::reversed() const {
    Path r;
    r.nodes.assign(nodes.rbegin(), nodes.rend());
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
        switch (*it) {
            case Step::Forward: r.steps.push_back(Step::Backward); break;
            case Step::Backward: r.steps.push_back(Step::Forward); break;
            case Step::Nonlocal: r.steps.push_back(Step::Nonlocal); break;
        }
    }
    return r;
}

std::string render_path(const Path& p) {
    std::string out;
    for (std::size_t i = 0; i < p.nodes.size(); ++i) {
        if (i > 0) {
            switch (p.steps[i - 1]) {
                case Step::Forward: out += " -> "; break;
                case Step::Backward: out += " <- "; break;
                case Step::Nonlocal: out += " ~~ "; break;
            }
        }
        out += p.nodes[i];
    }
    return out;
}

const char* to_string(PathRule r) {
    switch (r) {
        case PathRule::ColliderUnconditioned: return "ColliderUnconditioned";
        case PathRule::NonColliderConditioned: return "NonColliderConditioned";
        case PathRule::ColliderOpenedByConditioning: return "ColliderOpenedByConditioning";
        case PathRule::NoSignallingBlocked: return "NoSignallingBlocked";
    }
    return "?";
}

namespace {

struct Adjacent {
    std::size_t node;
    Step step;
};

std::vector<std::vector<Adjacent>> skeleton(const CausalDiagram& d) {
    std::vector<std::vector<Adjacent>> adj(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (auto c : d.children(i)) adj[i].push_back({c, Step::Forward});
        for (auto p : d.parents(i)) adj[i].push_back({p, Step::Backward});
        for (auto q : d.nonlocal_partners(i)) adj[i].push_back({q, Step::Nonlocal});
        std::sort(adj[i].begin(), adj[i].end(), [](const Adjacent& a, const Adjacent& b) {
            return a.node != b.node ? a.node < b.node : a.step < b.step;
        });
    }
    return adj;
}

bool head_at_end(Step s) { return s == Step::Forward || s == Step::Nonlocal; }
bool head_at_start(Step s) { return s == Step::Backward || s == Step::Nonlocal; }

std::vector<char> to_mask(const CausalDiagram& d, const std::set<NodeId>& names) {
    std::vector<char> mask(d.size(), 0);
    for (const auto& n : names) mask[d.index(n)] = 1;
    return mask;
}

// Shared state for classifying paths under a fixed conditioning set.
class Conditioning {
public:
    Conditioning(const CausalDiagram& d, const std::set<NodeId>& z) : d_(d), in_z_(to_mask(d, z)), opens_(in_z_) {
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (!in_z_[i]) continue;
            auto anc = d.ancestor_mask(i);
            for (std::size_t j = 0; j < d.size(); ++j)
                if (anc[j]) opens_[j] = 1;
        }
    }

    bool conditioned(std::size_t n) const { return in_z_[n]; }
    bool opens(std::size_t n) const { return opens_[n]; }

    std::size_t opener(std::size_t collider) const {
        if (in_z_[collider]) return collider;
        auto desc = d_.descendant_mask(collider);
        for (std::size_t j = 0; j < d_.size(); ++j)
            if (in_z_[j] && desc[j]) return j;
        return collider;
    }

private:
    const CausalDiagram& d_;
    std::vector<char> in_z_;
    std::vector<char> opens_;
};

// Setting-originated directed chain entering the nonlocal step at `i`
// (between idx[i] and idx[i+1]). Returns the node on the far side, if any.
std::optional<std::size_t> signalling_crossing(const CausalDiagram& d, const std::vector<std::size_t>& idx,
                                               const std::vector<Step>& steps, std::size_t i) {
    std::size_t k = i;
    while (k > 0 && steps[k - 1] == Step::Forward) --k;
    if (k < i && d.kind(idx[k]).is(NodeRole::Setting)) return idx[i + 1];
    k = i + 1;
    while (k < steps.size() && steps[k] == Step::Backward) ++k;
    if (k > i + 1 && d.kind(idx[k]).is(NodeRole::Setting)) return idx[i];
    return std::nullopt;
}

PathVerdict classify_impl(const CausalDiagram& d, const Path& path, const Conditioning& cond, bool ns) {
    if (path.nodes.size() < 2 || path.steps.size() + 1 != path.nodes.size())
        throw Error(ErrorCode::InvalidScenario, "malformed path");
    std::vector<std::size_t> idx;
    for (const auto& n : path.nodes) idx.push_back(d.index(n));
    for (std::size_t i = 0; i < path.steps.size(); ++i) {
        auto a = idx[i], b = idx[i + 1];
        bool ok = false;
        switch (path.steps[i]) {
            case Step::Forward: ok = d.has_edge(a, b); break;
            case Step::Backward: ok = d.has_edge(b, a); break;
            case Step::Nonlocal:
                if (!ns) throw Error(ErrorCode::NonlocalPresent, "path " + render_path(path) + " uses a nonlocal edge");
                ok = std::binary_search(d.nonlocal().begin(), d.nonlocal().end(),
                                        IndexPair{std::min(a, b), std::max(a, b)});
                break;
        }
        if (!ok) throw Error(ErrorCode::InvalidScenario, "path " + render_path(path) + " is not in the diagram");
    }

    PathVerdict v;
    v.path = path;

    if (ns) {
        for (std::size_t i = 0; i < path.steps.size(); ++i) {
            if (path.steps[i] != Step::Nonlocal) continue;
            if (auto far = signalling_crossing(d, idx, path.steps, i)) {
                v.status = PathStatus::Blocked;
                v.reason = PathRule::NoSignallingBlocked;
                v.blocking_node = d.name(*far);
                return v;
            }
        }
    }

    for (std::size_t i = 1; i + 1 < idx.size(); ++i) {
        const auto n = idx[i];
        const bool collider = head_at_end(path.steps[i - 1]) && head_at_start(path.steps[i]);
        if (collider) {
            if (!cond.opens(n)) {
                v.status = PathStatus::Blocked;
                v.reason = PathRule::ColliderUnconditioned;
                v.blocking_node = d.name(n);
                v.colliders.clear();
                return v;
            }
            v.colliders.push_back({d.name(n), d.name(cond.opener(n))});
        } else if (cond.conditioned(n)) {
            v.status = PathStatus::Blocked;
            v.reason = PathRule::NonColliderConditioned;
            v.blocking_node = d.name(n);
            v.colliders.clear();
            return v;
        }
    }
    v.status = PathStatus::Open;
    if (!v.colliders.empty()) v.reason = PathRule::ColliderOpenedByConditioning;
    return v;
}

// Depth-first search in lexicographic order, pruning prefixes that are
// already blocked. The first complete path reached is the lexicographically
// first open path from `start` to any target.
std::optional<Path> first_open_path(const CausalDiagram& d, const std::vector<std::vector<Adjacent>>& adj,
                                    std::size_t start, const std::vector<char>& target,
                                    const Conditioning& cond, bool ns) {
    std::vector<std::size_t> idx{start};
    std::vector<Step> steps;
    std::vector<char> on_path(d.size(), 0);
    on_path[start] = 1;
    std::vector<std::size_t> cursor{0};

    while (!cursor.empty()) {
        const std::size_t here = idx.back();
        auto& next = cursor.back();
        if (next >= adj[here].size()) {
            on_path[here] = 0;
            idx.pop_back();
            cursor.pop_back();
            if (!steps.empty()) steps.pop_back();
            continue;
        }
        const Adjacent a = adj[here][next++];
        if (on_path[a.node]) continue;

        if (!steps.empty()) {
            const bool collider = head_at_end(steps.back()) && head_at_start(a.step);
            if (collider ? !cond.opens(here) : cond.conditioned(here)) continue;
        }
        if (ns) {
            if (a.step == Step::Nonlocal) {
                std::size_t k = steps.size();
                while (k > 0 && steps[k - 1] == Step::Forward) --k;
                if (k < steps.size() && d.kind(idx[k]).is(NodeRole::Setting)) continue;
            }
            if (a.step == Step::Backward && d.kind(a.node).is(NodeRole::Setting)) {
                std::size_t k = steps.size();
                while (k > 0 && steps[k - 1] == Step::Backward) --k;
                if (k > 0 && steps[k - 1] == Step::Nonlocal) continue;
            }
        }

        idx.push_back(a.node);
        steps.push_back(a.step);
        if (target[a.node]) {
            Path p;
            for (auto i : idx) p.nodes.push_back(d.name(i));
            p.steps = steps;
            return p;
        }
        on_path[a.node] = 1;
        cursor.push_back(0);
    }
    return std::nullopt;
}

Separation separation_impl(const CausalDiagram& d, const std::set<NodeId>& u, const std::set<NodeId>& v,
                           const std::set<NodeId>& z, bool ns) {
    if (!d.bidirected().empty()) throw Error(ErrorCode::BidirectedPresent, "expand bidirected edges first");
    if (!ns && !d.nonlocal().empty())
        throw Error(ErrorCode::NonlocalPresent, "diagram has nonlocal edges; use the no-signalling variant");
    for (const auto& n : u)
        if (v.count(n) || z.count(n)) throw Error(ErrorCode::InvalidScenario, "query sets overlap at " + n);
    for (const auto& n : v)
        if (z.count(n)) throw Error(ErrorCode::InvalidScenario, "query sets overlap at " + n);

    const Conditioning cond(d, z);
    const auto adj = skeleton(d);
    const auto target = to_mask(d, v);
    for (const auto& start : u) {  // std::set iterates in name order
        if (auto p = first_open_path(d, adj, d.index(start), target, cond, ns)) {
            Separation s;
            s.separated = false;
            s.witness = classify_impl(d, *p, cond, ns);
            return s;
        }
    }
    return {};
}

}  // namespace

std::vector<Path> enumerate_paths(const CausalDiagram& d, const NodeId& u, const NodeId& v) {
    if (!d.bidirected().empty()) throw Error(ErrorCode::BidirectedPresent, "expand bidirected edges first");
    const auto s = d.index(u);
    const auto t = d.index(v);
    if (s == t) throw Error(ErrorCode::InvalidScenario, "path endpoints must differ");
    const auto adj = skeleton(d);

    std::vector<Path> out;
    std::vector<std::size_t> idx{s};
    std::vector<Step> steps;
    std::vector<char> on_path(d.size(), 0);
    on_path[s] = 1;
    std::function<void(std::size_t)> walk = [&](std::size_t here) {
        for (const auto& a : adj[here]) {
            if (on_path[a.node]) continue;
            idx.push_back(a.node);
            steps.push_back(a.step);
            if (a.node == t) {
                Path p;
                for (auto i : idx) p.nodes.push_back(d.name(i));
                p.steps = steps;
                out.push_back(std::move(p));
            } else {
                on_path[a.node] = 1;
                walk(a.node);
                on_path[a.node] = 0;
            }
            idx.pop_back();
            steps.pop_back();
        }
    };
    walk(s);
    return out;
}

PathVerdict classify_path(const CausalDiagram& d, const Path& path, const std::set<NodeId>& z) {
    return classify_impl(d, path, Conditioning(d, z), false);
}

PathVerdict ns_classify_path(const CausalDiagram& d, const Path& path, const std::set<NodeId>& z) {
    return classify_impl(d, path, Conditioning(d, z), true);
}

Separation d_separated(const CausalDiagram& d, const std::set<NodeId>& u, const std::set<NodeId>& v,
                       const std::set<NodeId>& z) {
    return separation_impl(d, u, v, z, false);
}

Separation ns_d_separated(const CausalDiagram& d, const std::set<NodeId>& u, const std::set<NodeId>& v,
                          const std::set<NodeId>& z) {
    return separation_impl(d, u, v, z, true);
}

double ci_probe(const CausalDiagram& d, const std::set<NodeId>& u, const std::set<NodeId>& v,
                const std::set<NodeId>& z, const ProbeOptions& opts) {
    if (!d.bidirected().empty()) throw Error(ErrorCode::BidirectedPresent, "expand bidirected edges first");
    if (!d.nonlocal().empty()) throw Error(ErrorCode::NonlocalPresent, "ci_probe needs a classical DAG");

    const std::size_t n = d.size();
    std::vector<std::size_t> card(n, 2);
    for (const auto& [name, c] : opts.cardinalities) {
        if (c < 1) throw Error(ErrorCode::InvalidModel, "cardinality of " + name + " must be positive");
        card[d.index(name)] = static_cast<std::size_t>(c);
    }
    constexpr std::size_t kMaxCells = std::size_t{1} << 24;
    std::size_t cells = 1;
    for (auto c : card) {
        if (cells > kMaxCells / c) throw Error(ErrorCode::CardinalityOverflow, "joint exceeds 2^24 entries");
        cells *= c;
    }
    // Mixed radix, node 0 least significant.
    std::vector<std::size_t> stride(n, 1);
    for (std::size_t i = 1; i < n; ++i) stride[i] = stride[i - 1] * card[i - 1];

    auto sub_index = [&](std::size_t cell, const std::set<NodeId>& names) {
        std::size_t out = 0, mult = 1;
        for (const auto& nm : names) {
            auto i = d.index(nm);
            out += ((cell / stride[i]) % card[i]) * mult;
            mult *= card[i];
        }
        return out;
    };
    auto sub_size = [&](const std::set<NodeId>& names) {
        std::size_t s = 1;
        for (const auto& nm : names) s *= card[d.index(nm)];
        return s;
    };
    const auto nu = sub_size(u), nv = sub_size(v), nz = sub_size(z);
    std::vector<std::size_t> cell_u(cells), cell_v(cells), cell_z(cells);
    for (std::size_t c = 0; c < cells; ++c) {
        cell_u[c] = sub_index(c, u);
        cell_v[c] = sub_index(c, v);
        cell_z[c] = sub_index(c, z);
    }

    std::mt19937_64 rng(opts.seed);
    std::exponential_distribution<double> expo(1.0);
    double worst = 0.0;
    std::vector<double> joint(cells);
    std::vector<double> uvz(nu * nv * nz);

    for (int param = 0; param < opts.n_params; ++param) {
        // cpt[i][parent_config * card[i] + value]
        std::vector<std::vector<double>> cpt(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t configs = 1;
            for (auto p : d.parents(i)) configs *= card[p];
            cpt[i].resize(configs * card[i]);
            for (std::size_t c = 0; c < configs; ++c) {
                double sum = 0;
                for (std::size_t k = 0; k < card[i]; ++k) sum += (cpt[i][c * card[i] + k] = expo(rng));
                for (std::size_t k = 0; k < card[i]; ++k) cpt[i][c * card[i] + k] /= sum;
            }
        }
        for (std::size_t c = 0; c < cells; ++c) {
            double p = 1.0;
            for (std::size_t i = 0; i < n; ++i) {
                std::size_t config = 0, mult = 1;
                for (auto par : d.parents(i)) {
                    config += ((c / stride[par]) % card[par]) * mult;
                    mult *= card[par];
                }
                p *= cpt[i][config * card[i] + (c / stride[i]) % card[i]];
            }
            joint[c] = p;
        }
        std::fill(uvz.begin(), uvz.end(), 0.0);
        for (std::size_t c = 0; c < cells; ++c) uvz[(cell_z[c] * nu + cell_u[c]) * nv + cell_v[c]] += joint[c];

        for (std::size_t zz = 0; zz < nz; ++zz) {
            const double* block = &uvz[zz * nu * nv];
            double pz = 0;
            for (std::size_t k = 0; k < nu * nv; ++k) pz += block[k];
            if (pz <= 1e-9) continue;
            std::vector<double> pu(nu, 0.0), pv(nv, 0.0);
            for (std::size_t a = 0; a < nu; ++a)
                for (std::size_t b = 0; b < nv; ++b) {
                    pu[a] += block[a * nv + b] / pz;
                    pv[b] += block[a * nv + b] / pz;
                }
            double tv = 0;
            for (std::size_t a = 0; a < nu; ++a)
                for (std::size_t b = 0; b < nv; ++b) tv += std::abs(block[a * nv + b] / pz - pu[a] * pv[b]);
            worst = std::max(worst, 0.5 * tv);
        }
    }
    return worst;
}

}  // namespace fairsample
