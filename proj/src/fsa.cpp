#include "fairsample/fsa.hpp"

#include <algorithm>

#include "fairsample/error.hpp"

namespace fairsample {

std::vector<PartyId> ScenarioSpec::parties() const {
    std::set<PartyId> out;
    for (const auto& n : diagram.nodes())
        if (n.kind.is(NodeRole::Outcome)) out.insert(n.kind.party);
    return {out.begin(), out.end()};
}

std::set<NodeId> ScenarioSpec::outcomes(const PartyId& p) const {
    std::set<NodeId> out;
    for (const auto& n : diagram.nodes())
        if (n.kind.is(NodeRole::Outcome) && n.kind.party == p) out.insert(n.name);
    return out;
}

namespace {

std::optional<PartyId> setting_party(const CausalDiagram& d, std::size_t i) {
    const auto& k = d.kind(i);
    if (!k.party.empty()) return k.party;
    for (auto c : d.children(i))
        if (d.kind(c).is(NodeRole::Outcome)) return d.kind(c).party;
    return std::nullopt;
}

}  // namespace

std::set<NodeId> ScenarioSpec::settings(const PartyId& p) const {
    std::set<NodeId> out;
    for (auto i : diagram.nodes_with_role(NodeRole::Setting))
        if (setting_party(diagram, i) == p) out.insert(diagram.name(i));
    return out;
}

std::set<NodeId> ScenarioSpec::all_settings() const {
    std::set<NodeId> out;
    for (auto i : diagram.nodes_with_role(NodeRole::Setting)) out.insert(diagram.name(i));
    return out;
}

std::set<NodeId> ScenarioSpec::conditioning_set() const {
    if (auto* s = std::get_if<SelectionNode>(&selection)) return {s->node};
    std::set<NodeId> out;
    for (const auto& [n, v] : std::get<DirectConditioning>(selection).values) out.insert(n);
    return out;
}

ScenarioSpec make_scenario(CausalDiagram diagram, std::map<PartyId, std::vector<NodeId>> bell, Selection selection,
                           bool lambda_influences_all) {
    ScenarioSpec s{std::move(diagram), std::move(bell), std::move(selection), lambda_influences_all};
    const auto& d = s.diagram;
    const auto parties = s.parties();
    if (parties.empty()) throw Error(ErrorCode::InvalidScenario, "scenario has no outcome nodes");

    for (auto& [party, names] : s.bell) {
        if (!std::binary_search(parties.begin(), parties.end(), party))
            throw Error(ErrorCode::RoleConflict, "bell outcomes declared for unknown party '" + party + "'");
        std::sort(names.begin(), names.end());
        names.erase(std::unique(names.begin(), names.end()), names.end());
        for (const auto& n : names) {
            const auto& k = d.kind(d.index(n));
            if (!k.is(NodeRole::Outcome) || k.party != party)
                throw Error(ErrorCode::RoleConflict, "'" + n + "' is not an outcome of party '" + party + "'");
        }
    }
    for (const auto& p : parties) {
        auto it = s.bell.find(p);
        if (it == s.bell.end() || it->second.empty())
            throw Error(ErrorCode::InvalidScenario, "party '" + p + "' has no bell outcomes");
        if (s.settings(p).empty()) throw Error(ErrorCode::InvalidScenario, "party '" + p + "' has no setting");
    }

    const auto sel_nodes = d.nodes_with_role(NodeRole::Selection);
    if (auto* sn = std::get_if<SelectionNode>(&s.selection)) {
        auto i = d.find(sn->node);
        if (!i || !d.kind(*i).is(NodeRole::Selection))
            throw Error(ErrorCode::InvalidScenario, "'" + sn->node + "' is not a selection node");
    } else {
        const auto& dc = std::get<DirectConditioning>(s.selection);
        if (!sel_nodes.empty())
            throw Error(ErrorCode::RoleConflict, "direct conditioning cannot be combined with a selection node");
        if (dc.values.empty()) throw Error(ErrorCode::InvalidScenario, "no postselection declared");
        for (const auto& [n, v] : dc.values) {
            auto i = d.find(n);
            if (!i) throw Error(ErrorCode::UnknownNode, "no node named '" + n + "'");
            if (!d.kind(*i).is(NodeRole::Outcome))
                throw Error(ErrorCode::RoleConflict, "conditioning on '" + n + "', which is not an outcome");
            if (v < 0) throw Error(ErrorCode::InvalidScenario, "conditioned value of '" + n + "' is negative");
        }
    }
    return s;
}

const char* to_string(Classification c) {
    switch (c) {
        case Classification::Fig2c: return "Fig2c";
        case Classification::Fig4: return "Fig4";
        case Classification::SettingsOnlyK: return "SettingsOnlyK";
        case Classification::Unsafe: return "Unsafe";
    }
    return "?";
}

namespace {

// Nodes that decide the postselection: ancestors of K, or the conditioned
// outcomes and their ancestors.
std::vector<char> feeds_selection(const CausalDiagram& d, const std::set<NodeId>& cond, bool include_self) {
    std::vector<char> mask(d.size(), 0);
    for (const auto& n : cond) {
        auto i = d.index(n);
        if (include_self) mask[i] = 1;
        auto anc = d.ancestor_mask(i);
        for (std::size_t j = 0; j < d.size(); ++j)
            if (anc[j]) mask[j] = 1;
    }
    return mask;
}

}  // namespace

std::map<PartyId, OutcomePartition> partition_outcomes(const ScenarioSpec& spec) {
    const auto* sn = std::get_if<SelectionNode>(&spec.selection);
    if (!sn) throw Error(ErrorCode::NoSelectionNode, "partition needs a selection node");
    const auto& d = spec.diagram;
    const auto anc = d.ancestor_mask(d.index(sn->node));
    std::map<PartyId, OutcomePartition> out;
    for (const auto& p : spec.parties()) {
        auto& part = out[p];
        for (const auto& o : spec.outcomes(p)) (anc[d.index(o)] ? part.feeds_selection : part.rest).insert(o);
    }
    return out;
}

std::set<NodeId> detect_franson_obstruction(const ScenarioSpec& spec) {
    const auto& d = spec.diagram;
    const auto feeds = feeds_selection(d, spec.conditioning_set(), true);
    std::set<NodeId> out;
    for (const auto& [p, names] : spec.bell)
        for (const auto& n : names)
            if (feeds[d.index(n)]) out.insert(n);
    return out;
}

namespace {

struct Prepared {
    CausalDiagram base;
    std::set<NodeId> pruned;
    std::vector<NamePair> added;
    std::vector<PartyId> parties;
    std::map<PartyId, std::set<NodeId>> side;  // bell outcomes + settings per party
    std::map<PartyId, std::set<NodeId>> bell;
    std::set<NodeId> settings;
    std::set<NodeId> selection;
    bool settings_only_k = false;
};

Prepared prepare(const ScenarioSpec& spec) {
    Prepared pr;
    const auto& d0 = spec.diagram;
    if (d0.bidirected().size() > kMaxBidirected)
        throw Error(ErrorCode::ResolutionBlowup,
                    std::to_string(d0.bidirected().size()) + " bidirected edges exceed the limit of " +
                        std::to_string(kMaxBidirected));

    CausalDiagram d = d0;
    if (spec.lambda_influences_all) {
        for (auto l : d0.nodes_with_role(NodeRole::Latent))
            for (auto o : d0.nodes_with_role(NodeRole::Outcome))
                if (!d0.has_edge(l, o)) pr.added.emplace_back(d0.name(l), d0.name(o));
        if (!pr.added.empty()) d = with_directed_edges(d0, pr.added);
    }

    pr.selection = spec.conditioning_set();
    const auto feeds = feeds_selection(d, pr.selection, true);
    std::vector<char> influenced(d.size(), 0);
    for (auto s : d.nodes_with_role(NodeRole::Setting)) {
        auto desc = d.descendant_mask(s);
        for (std::size_t j = 0; j < d.size(); ++j)
            if (desc[j]) influenced[j] = 1;
    }
    for (auto o : d.nodes_with_role(NodeRole::Outcome))
        if (!feeds[o] && !influenced[o]) pr.pruned.insert(d.name(o));
    pr.base = pr.pruned.empty() ? d : without_nodes(d, pr.pruned);

    pr.parties = spec.parties();
    pr.settings = spec.all_settings();
    for (const auto& p : pr.parties) {
        auto& side = pr.side[p];
        for (const auto& n : spec.bell.at(p))
            if (!pr.pruned.count(n) && !pr.selection.count(n)) {
                side.insert(n);
                pr.bell[p].insert(n);
            }
        for (const auto& s : spec.settings(p)) side.insert(s);
    }

    if (auto* sn = std::get_if<SelectionNode>(&spec.selection)) {
        const auto k = pr.base.index(sn->node);
        pr.settings_only_k = std::all_of(pr.base.parents(k).begin(), pr.base.parents(k).end(),
                                         [&](std::size_t p) { return pr.base.kind(p).is(NodeRole::Setting); });
    }
    return pr;
}

// Calls fn(index, diagram) for every admissible resolution of the bidirected
// edges; stops early when fn returns false. Returns the number visited.
template <typename Fn>
std::size_t for_each_resolution(const CausalDiagram& base, Fn&& fn) {
    const auto& bi = base.bidirected();
    const auto plain = without_bidirected(base);
    if (bi.empty()) {
        fn(std::size_t{0}, plain);
        return 1;
    }
    // Per edge {a,b}: a->b, b->a, common cause, a->b + common cause, b->a + common cause.
    constexpr std::size_t kChoices = 5;
    std::size_t total = 1;
    for (std::size_t i = 0; i < bi.size(); ++i) total *= kChoices;

    std::size_t visited = 0;
    for (std::size_t r = 0; r < total; ++r) {
        auto nodes = base.nodes();
        auto directed = base.directed_names();
        std::size_t code = r;
        for (auto [a, b] : bi) {
            const auto choice = code % kChoices;
            code /= kChoices;
            const auto& u = base.name(a);
            const auto& v = base.name(b);
            if (choice == 0 || choice == 3) directed.emplace_back(u, v);
            if (choice == 1 || choice == 4) directed.emplace_back(v, u);
            if (choice >= 2) {
                auto g = fresh_latent_name(u, v);
                while (base.contains(g)) g += "'";
                nodes.push_back({g, NodeKind::latent()});
                directed.emplace_back(g, u);
                directed.emplace_back(g, v);
            }
        }
        CausalDiagram resolved;
        try {
            resolved = build_diagram(std::move(nodes), directed, {}, base.nonlocal_names());
        } catch (const Error&) {
            continue;  // cyclic or points into a setting
        }
        ++visited;
        if (!fn(r, resolved)) break;
    }
    return visited;
}

std::set<NodeId> latents_of(const CausalDiagram& d) {
    std::set<NodeId> out;
    for (auto i : d.nodes_with_role(NodeRole::Latent)) out.insert(d.name(i));
    return out;
}

std::set<NodeId> minus(std::set<NodeId> a, const std::set<NodeId>& b) {
    for (const auto& n : b) a.erase(n);
    return a;
}

Separation separate(const CausalDiagram& d, const std::set<NodeId>& u, const std::set<NodeId>& v,
                    const std::set<NodeId>& z, bool ns) {
    auto uu = minus(u, z);
    auto vv = minus(v, z);
    if (uu.empty() || vv.empty()) return {};
    return ns ? ns_d_separated(d, uu, vv, z) : d_separated(d, uu, vv, z);
}

CheckResult ci_on(const Prepared& pr, const CausalDiagram& d, bool ns) {
    auto sep = separate(d, pr.settings, latents_of(d), pr.selection, ns);
    return {sep.separated, sep.witness};
}

CheckResult cii_on(const Prepared& pr, const CausalDiagram& d, bool ns) {
    auto z = pr.selection;
    for (const auto& l : latents_of(d)) z.insert(l);

    if (!ns) {
        for (std::size_t i = 0; i < pr.parties.size(); ++i)
            for (std::size_t j = i + 1; j < pr.parties.size(); ++j) {
                const auto& p = pr.parties[i];
                const auto& q = pr.parties[j];
                Separation sep;
                if (pr.settings_only_k) {
                    // Settings steer K directly; factorization is read with settings held fixed.
                    auto zz = z;
                    for (const auto& s : pr.settings) zz.insert(s);
                    auto bp = pr.bell.count(p) ? pr.bell.at(p) : std::set<NodeId>{};
                    auto bq = pr.bell.count(q) ? pr.bell.at(q) : std::set<NodeId>{};
                    sep = separate(d, bp, bq, zz, false);
                } else {
                    sep = separate(d, pr.side.at(p), pr.side.at(q), z, false);
                }
                if (!sep.separated) return {false, sep.witness};
            }
        return {};
    }

    // Hybrid: for each pair sharing nonlocal correlations, every other party
    // must factorize from the rest given the latents and the postselection.
    for (std::size_t i = 0; i < pr.parties.size(); ++i)
        for (std::size_t j = i + 1; j < pr.parties.size(); ++j) {
            const auto& p = pr.parties[i];
            const auto& q = pr.parties[j];
            std::vector<NamePair> keep;
            for (const auto& [a, b] : d.nonlocal_names()) {
                const auto& pa = d.kind(d.index(a)).party;
                const auto& pb = d.kind(d.index(b)).party;
                if ((pa == p && pb == q) || (pa == q && pb == p)) keep.emplace_back(a, b);
            }
            const auto restricted = with_nonlocal_only(d, keep);
            for (const auto& k : pr.parties) {
                if (k == p || k == q) continue;
                std::set<NodeId> others;
                for (const auto& o : pr.parties)
                    if (o != k) others.insert(pr.side.at(o).begin(), pr.side.at(o).end());
                auto sep = separate(restricted, pr.side.at(k), others, z, true);
                if (!sep.separated) return {false, sep.witness};
            }
        }
    return {};
}

}  // namespace

namespace detail {

CheckResult run_ci(const ScenarioSpec& spec, bool ns) {
    const auto pr = prepare(spec);
    CheckResult out;
    for_each_resolution(pr.base, [&](std::size_t, const CausalDiagram& d) {
        out = ci_on(pr, d, ns);
        return out.ok;
    });
    return out;
}

CheckResult run_cii(const ScenarioSpec& spec, bool ns) {
    const auto pr = prepare(spec);
    CheckResult out;
    for_each_resolution(pr.base, [&](std::size_t, const CausalDiagram& d) {
        out = cii_on(pr, d, ns);
        return out.ok;
    });
    return out;
}

FsaVerdict run_verifier(const ScenarioSpec& spec, bool ns) {
    const auto pr = prepare(spec);
    FsaVerdict v;
    v.hybrid = ns;
    v.pruned = pr.pruned;
    v.added_edges = pr.added;
    if (!spec.lambda_influences_all)
        v.notes.push_back("latent influence on every outcome not assumed; verdict covers the diagram as drawn");
    if (!pr.pruned.empty())
        v.notes.push_back("outcomes without setting influence that do not decide the postselection were pruned");

    v.obstruction = detect_franson_obstruction(spec);
    v.resolutions_checked = for_each_resolution(pr.base, [&](std::size_t, const CausalDiagram& d) {
        if (v.ci_ok) {
            auto r = ci_on(pr, d, ns);
            if (!r.ok) {
                v.ci_ok = false;
                v.ci_witness = r.witness;
            }
        }
        if (v.cii_ok) {
            auto r = cii_on(pr, d, ns);
            if (!r.ok) {
                v.cii_ok = false;
                v.cii_witness = r.witness;
            }
        }
        return v.ci_ok || v.cii_ok;
    });

    v.safe = v.ci_ok && v.cii_ok && v.obstruction.empty();
    if (!v.safe)
        v.classification = Classification::Unsafe;
    else if (pr.settings_only_k)
        v.classification = Classification::SettingsOnlyK;
    else if (std::holds_alternative<DirectConditioning>(spec.selection))
        v.classification = Classification::Fig4;
    else
        v.classification = Classification::Fig2c;
    return v;
}

}  // namespace detail

CheckResult check_ci(const ScenarioSpec& spec) {
    if (spec.hybrid()) throw Error(ErrorCode::NonlocalPresent, "use the hybrid verifier");
    return detail::run_ci(spec, false);
}

CheckResult check_cii(const ScenarioSpec& spec) {
    if (spec.hybrid()) throw Error(ErrorCode::NonlocalPresent, "use the hybrid verifier");
    return detail::run_cii(spec, false);
}

FsaVerdict verify_fsa(const ScenarioSpec& spec) {
    if (spec.hybrid()) throw Error(ErrorCode::NonlocalPresent, "use the hybrid verifier");
    return detail::run_verifier(spec, false);
}

int verdict_code(const FsaVerdict& v) {
    if (v.safe) return 0;
    if (!v.ci_ok) return 2;
    if (!v.obstruction.empty()) return 3;
    return 2;
}

}  // namespace fairsample
