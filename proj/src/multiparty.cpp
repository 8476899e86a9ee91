#include "fairsample/multiparty.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fairsample/error.hpp"
#include "fairsample/polytope.hpp"

namespace fairsample {

namespace {

std::vector<std::size_t> others_of(std::size_t n, std::pair<std::size_t, std::size_t> pr) {
    std::vector<std::size_t> out;
    for (std::size_t p = 0; p < n; ++p)
        if (p != pr.first && p != pr.second) out.push_back(p);
    return out;
}

double branch_prob(const HybridBranch& b, const Dims& pair_dims, const std::vector<std::size_t>& others,
                   const std::vector<int>& x, const std::vector<int>& a) {
    const int px[2] = {x[b.pair.first], x[b.pair.second]};
    const int pa[2] = {a[b.pair.first], a[b.pair.second]};
    double v = b.pair_behavior.at(pair_dims.encode_settings(px), pair_dims.encode_outcomes(pa));
    for (std::size_t k = 0; k < others.size() && v != 0.0; ++k) v *= b.locals[k][x[others[k]]][a[others[k]]];
    return v;
}

}  // namespace

void HybridModel::validate(double tol) const {
    const auto bad = [](const std::string& m) { return Error(ErrorCode::InvalidModel, m); };
    if (dims.parties() < 2) throw bad("hybrid model needs at least two parties");
    if (weights.size() != branches.size()) throw bad("one branch per hidden-variable value");
    double sum = 0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw bad("negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > tol) throw bad("weights do not sum to one");
    for (std::size_t l = 0; l < branches.size(); ++l) {
        const auto& b = branches[l];
        const auto where = " (branch " + std::to_string(l) + ")";
        if (b.pair.first >= b.pair.second || b.pair.second >= dims.parties()) throw bad("invalid pair" + where);
        if (!(b.pair_behavior.dims == Dims({dims[b.pair.first], dims[b.pair.second]})))
            throw bad("pair behavior has wrong shape" + where);
        if (normalization_error(b.pair_behavior) > tol) throw bad("pair behavior not normalized" + where);
        if (no_signalling_violation(b.pair_behavior) > tol) throw bad("pair behavior signals" + where);
        const auto others = others_of(dims.parties(), b.pair);
        if (b.locals.size() != others.size()) throw bad("wrong number of local responses" + where);
        for (std::size_t k = 0; k < others.size(); ++k) {
            const auto& pd = dims[others[k]];
            if (b.locals[k].size() != static_cast<std::size_t>(pd.settings)) throw bad("local response shape" + where);
            for (const auto& row : b.locals[k]) {
                if (row.size() != static_cast<std::size_t>(pd.outcomes)) throw bad("local response shape" + where);
                double s = 0;
                for (double v : row) {
                    if (!(v >= 0.0 && v <= 1.0)) throw bad("local probability outside [0,1]" + where);
                    s += v;
                }
                if (std::abs(s - 1.0) > tol) throw bad("local response not normalized" + where);
            }
        }
    }
}

BehaviorTable behavior_from_hybrid(const HybridModel& h) {
    h.validate();
    BehaviorTable out(h.dims);
    for (std::size_t l = 0; l < h.branches.size(); ++l) {
        const auto& b = h.branches[l];
        const Dims pd({h.dims[b.pair.first], h.dims[b.pair.second]});
        const auto others = others_of(h.dims.parties(), b.pair);
        for (std::size_t s = 0; s < h.dims.setting_count(); ++s) {
            const auto x = h.dims.settings_of(s);
            for (std::size_t o = 0; o < h.dims.outcome_count(); ++o)
                out.at(s, o) += h.weights[l] * branch_prob(b, pd, others, x, h.dims.outcomes_of(o));
        }
    }
    return out;
}

BehaviorTable postselect_hybrid(const HybridJoint& j) {
    const auto& h = j.model;
    h.validate();
    if (j.aux.size() != h.dims.parties()) throw Error(ErrorCode::DimensionMismatch, "aux cardinalities per party");
    std::vector<PartyDims> bell_parties;
    for (std::size_t p = 0; p < h.dims.parties(); ++p) {
        if (j.aux[p] < 1 || h.dims[p].outcomes % j.aux[p] != 0)
            throw Error(ErrorCode::DimensionMismatch, "raw outcomes do not split by the auxiliary cardinality");
        bell_parties.push_back({h.dims[p].settings, h.dims[p].outcomes / j.aux[p]});
    }
    BehaviorTable out{Dims(bell_parties)};
    std::vector<double> rates(out.dims.setting_count(), 0.0);
    std::vector<int> bell_a(h.dims.parties());
    for (std::size_t l = 0; l < h.branches.size(); ++l) {
        const auto& b = h.branches[l];
        const Dims pd({h.dims[b.pair.first], h.dims[b.pair.second]});
        const auto others = others_of(h.dims.parties(), b.pair);
        for (std::size_t s = 0; s < h.dims.setting_count(); ++s) {
            const auto x = h.dims.settings_of(s);
            for (std::size_t o = 0; o < h.dims.outcome_count(); ++o) {
                const auto a = h.dims.outcomes_of(o);
                const double prob = h.weights[l] * branch_prob(b, pd, others, x, a);
                if (prob == 0.0) continue;
                const double k = j.accept ? j.accept(l, a, x) : 1.0;
                if (!(k >= 0.0 && k <= 1.0)) throw Error(ErrorCode::InvalidModel, "acceptance outside [0,1]");
                for (std::size_t p = 0; p < a.size(); ++p) bell_a[p] = a[p] / j.aux[p];
                out.at(s, out.dims.encode_outcomes(bell_a)) += prob * k;
                rates[s] += prob * k;
            }
        }
    }
    for (std::size_t s = 0; s < rates.size(); ++s) {
        if (rates[s] <= kMinAcceptance)
            throw Error(ErrorCode::EmptyPostselection, "setting vector " + std::to_string(s) + " is never accepted");
        for (std::size_t o = 0; o < out.dims.outcome_count(); ++o) out.at(s, o) /= rates[s];
    }
    return out;
}

std::size_t hybrid_vertex_count(const Dims& dims) {
    if (dims.parties() < 3) throw Error(ErrorCode::DimensionMismatch, "hybrid bounds need at least three parties");
    std::size_t total = 0;
    for (std::size_t i = 0; i < dims.parties(); ++i)
        for (std::size_t j = i + 1; j < dims.parties(); ++j) {
            std::vector<PartyDims> rest;
            for (auto k : others_of(dims.parties(), {i, j})) rest.push_back(dims[k]);
            total += enumerate_ns_vertices(Dims({dims[i], dims[j]})).size() * local_vertex_count(Dims(rest));
            if (total > kMaxStrategies) throw Error(ErrorCode::StrategyBlowup, "too many hybrid vertices");
        }
    return total;
}

double hybrid_bound(const BellFunctional& f) {
    const auto& dims = f.dims;
    hybrid_vertex_count(dims);  // size guard
    double best = -INFINITY;
    for (std::size_t i = 0; i < dims.parties(); ++i)
        for (std::size_t j = i + 1; j < dims.parties(); ++j) {
            const auto others = others_of(dims.parties(), {i, j});
            std::vector<PartyDims> rest;
            for (auto k : others) rest.push_back(dims[k]);
            const Dims pd({dims[i], dims[j]});
            const auto ns = enumerate_ns_vertices(pd);
            const auto locals = enumerate_local_vertices(Dims(rest));
            for (const auto& v : ns)
                for (const auto& loc : locals) {
                    double value = 0;
                    for (std::size_t s = 0; s < dims.setting_count(); ++s) {
                        const auto x = dims.settings_of(s);
                        std::vector<int> rx, ra;
                        for (auto k : others) rx.push_back(x[k]);
                        const int px[2] = {x[i], x[j]};
                        const auto ps = pd.encode_settings(px);
                        const auto ls = loc.dims.encode_settings(rx);
                        for (std::size_t o = 0; o < dims.outcome_count(); ++o) {
                            const double c = f.coefficients[s * dims.outcome_count() + o];
                            if (c == 0.0) continue;
                            const auto a = dims.outcomes_of(o);
                            ra.clear();
                            for (auto k : others) ra.push_back(a[k]);
                            const int pa[2] = {a[i], a[j]};
                            value += c * v.at(ps, pd.encode_outcomes(pa)) * loc.at(ls, loc.dims.encode_outcomes(ra));
                        }
                    }
                    best = std::max(best, value);
                }
        }
    return best;
}

PathVerdict ns_classify(const CausalDiagram& d, const Path& path, const std::set<NodeId>& z) {
    return ns_classify_path(d, path, z);
}

FsaVerdict verify_fsa_hybrid(const ScenarioSpec& spec) { return detail::run_verifier(spec, true); }

FsaVerdict verify_any(const ScenarioSpec& spec) {
    return spec.hybrid() ? verify_fsa_hybrid(spec) : verify_fsa(spec);
}

}  // namespace fairsample
