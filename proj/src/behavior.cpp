#include "fairsample/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fairsample/error.hpp"

namespace fairsample {

Dims::Dims(std::vector<PartyDims> parties) : parties_(std::move(parties)) {
    for (const auto& p : parties_) {
        if (p.settings < 1 || p.outcomes < 1) throw Error(ErrorCode::DimensionMismatch, "cardinalities must be positive");
        setting_count_ *= static_cast<std::size_t>(p.settings);
        outcome_count_ *= static_cast<std::size_t>(p.outcomes);
    }
}

Dims Dims::uniform(std::size_t parties, int settings, int outcomes) {
    return Dims(std::vector<PartyDims>(parties, PartyDims{settings, outcomes}));
}

std::vector<int> Dims::settings_of(std::size_t s) const {
    std::vector<int> x(parties_.size());
    for (std::size_t p = parties_.size(); p-- > 0;) {
        x[p] = static_cast<int>(s % parties_[p].settings);
        s /= parties_[p].settings;
    }
    return x;
}

std::vector<int> Dims::outcomes_of(std::size_t o) const {
    std::vector<int> a(parties_.size());
    for (std::size_t p = parties_.size(); p-- > 0;) {
        a[p] = static_cast<int>(o % parties_[p].outcomes);
        o /= parties_[p].outcomes;
    }
    return a;
}

std::size_t Dims::encode_settings(std::span<const int> x) const {
    std::size_t s = 0;
    for (std::size_t p = 0; p < parties_.size(); ++p) s = s * parties_[p].settings + x[p];
    return s;
}

std::size_t Dims::encode_outcomes(std::span<const int> a) const {
    std::size_t o = 0;
    for (std::size_t p = 0; p < parties_.size(); ++p) o = o * parties_[p].outcomes + a[p];
    return o;
}

double normalization_error(const BehaviorTable& b) {
    double worst = 0;
    for (std::size_t s = 0; s < b.dims.setting_count(); ++s) {
        double sum = 0;
        for (std::size_t o = 0; o < b.dims.outcome_count(); ++o) {
            sum += b.at(s, o);
            worst = std::max(worst, -b.at(s, o));
        }
        worst = std::max(worst, std::abs(sum - 1.0));
    }
    return worst;
}

namespace {

// Marginal of `keep` at full setting vector s, indexed by the kept outcomes.
std::vector<double> marginal_at(const BehaviorTable& b, const std::vector<std::size_t>& keep, std::size_t s) {
    const auto& dims = b.dims;
    std::size_t size = 1;
    for (auto p : keep) size *= dims[p].outcomes;
    std::vector<double> out(size, 0.0);
    for (std::size_t o = 0; o < dims.outcome_count(); ++o) {
        auto a = dims.outcomes_of(o);
        std::size_t k = 0;
        for (auto p : keep) k = k * dims[p].outcomes + a[p];
        out[k] += b.at(s, o);
    }
    return out;
}

}  // namespace

double no_signalling_violation(const BehaviorTable& b) {
    const auto& dims = b.dims;
    const std::size_t n = dims.parties();
    double worst = 0;
    for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << n); ++mask) {
        std::vector<std::size_t> keep;
        for (std::size_t p = 0; p < n; ++p)
            if (mask & (std::size_t{1} << p)) keep.push_back(p);
        for (std::size_t s = 0; s < dims.setting_count(); ++s) {
            auto x = dims.settings_of(s);
            auto ref_x = x;
            for (std::size_t p = 0; p < n; ++p)
                if (!(mask & (std::size_t{1} << p))) ref_x[p] = 0;
            const auto ref_s = dims.encode_settings(ref_x);
            if (ref_s == s) continue;
            auto m1 = marginal_at(b, keep, s);
            auto m2 = marginal_at(b, keep, ref_s);
            for (std::size_t k = 0; k < m1.size(); ++k) worst = std::max(worst, std::abs(m1[k] - m2[k]));
        }
    }
    return worst;
}

bool is_no_signalling(const BehaviorTable& b, double tol) { return no_signalling_violation(b) <= tol; }

BehaviorTable marginal(const BehaviorTable& b, const std::vector<std::size_t>& keep) {
    std::vector<PartyDims> pd;
    for (auto p : keep) pd.push_back(b.dims[p]);
    BehaviorTable out{Dims(pd)};
    for (std::size_t s = 0; s < out.dims.setting_count(); ++s) {
        auto xs = out.dims.settings_of(s);
        std::vector<int> x(b.dims.parties(), 0);
        for (std::size_t i = 0; i < keep.size(); ++i) x[keep[i]] = xs[i];
        auto m = marginal_at(b, keep, b.dims.encode_settings(x));
        for (std::size_t o = 0; o < m.size(); ++o) out.at(s, o) = m[o];
    }
    return out;
}

double max_abs_difference(const BehaviorTable& a, const BehaviorTable& b) {
    if (!(a.dims == b.dims)) throw Error(ErrorCode::DimensionMismatch, "behaviors have different shapes");
    double worst = 0;
    for (std::size_t i = 0; i < a.p.size(); ++i) worst = std::max(worst, std::abs(a.p[i] - b.p[i]));
    return worst;
}

Dims LhvModel::dims() const {
    std::vector<PartyDims> pd;
    for (const auto& r : responses) pd.push_back({r.settings(), r.outcomes()});
    return Dims(pd);
}

void LhvModel::validate(double tol) const {
    if (weights.empty()) throw Error(ErrorCode::InvalidModel, "empty hidden-variable support");
    if (responses.empty()) throw Error(ErrorCode::InvalidModel, "model has no parties");
    double sum = 0;
    for (double w : weights) {
        if (!(w >= 0.0 && w <= 1.0)) throw Error(ErrorCode::InvalidModel, "p_lambda outside [0,1]");
        sum += w;
    }
    if (std::abs(sum - 1.0) > tol) throw Error(ErrorCode::InvalidModel, "p_lambda sums to " + std::to_string(sum));
    for (std::size_t p = 0; p < responses.size(); ++p) {
        const auto& r = responses[p];
        if (r.lambdas() != weights.size())
            throw Error(ErrorCode::DimensionMismatch, "response table of party " + std::to_string(p) +
                                                          " has the wrong hidden-variable count");
        for (std::size_t l = 0; l < r.lambdas(); ++l)
            for (int x = 0; x < r.settings(); ++x) {
                double s = 0;
                for (int a = 0; a < r.outcomes(); ++a) {
                    const double v = r(l, x, a);
                    if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::InvalidModel, "response outside [0,1]");
                    s += v;
                }
                if (std::abs(s - 1.0) > tol)
                    throw Error(ErrorCode::InvalidModel, "response of party " + std::to_string(p) + " not normalized");
            }
    }
}

std::vector<int> deterministic_strategy(int settings, int outcomes, std::size_t index) {
    std::vector<int> f(settings);
    for (int x = settings; x-- > 0;) {
        f[x] = static_cast<int>(index % outcomes);
        index /= outcomes;
    }
    return f;
}

namespace {

// Visits every raw outcome vector with its probability under λ and settings x.
template <typename Fn>
void for_each_outcome(const LhvModel& m, const Dims& dims, std::size_t l, const std::vector<int>& x, Fn&& fn) {
    std::vector<int> a(dims.parties(), 0);
    for (std::size_t o = 0; o < dims.outcome_count(); ++o) {
        double prob = m.weights[l];
        for (std::size_t p = 0; p < dims.parties() && prob != 0.0; ++p) prob *= m.responses[p](l, x[p], a[p]);
        fn(o, a, prob);
        for (std::size_t p = dims.parties(); p-- > 0;) {
            if (++a[p] < dims[p].outcomes) break;
            a[p] = 0;
        }
    }
}

}  // namespace

BehaviorTable behavior_from_lhv(const LhvModel& m) {
    m.validate();
    const auto dims = m.dims();
    BehaviorTable b{dims};
    for (std::size_t s = 0; s < dims.setting_count(); ++s) {
        const auto x = dims.settings_of(s);
        for (std::size_t l = 0; l < m.weights.size(); ++l)
            for_each_outcome(m, dims, l, x, [&](std::size_t o, const std::vector<int>&, double prob) {
                b.at(s, o) += prob;
            });
    }
    return b;
}

Dims JointModel::bell_dims() const {
    const auto raw = model.dims();
    if (aux.size() != raw.parties()) throw Error(ErrorCode::DimensionMismatch, "aux cardinalities per party");
    std::vector<PartyDims> pd;
    for (std::size_t p = 0; p < raw.parties(); ++p) {
        if (aux[p] < 1 || raw[p].outcomes % aux[p] != 0)
            throw Error(ErrorCode::DimensionMismatch, "raw outcomes of party " + std::to_string(p) +
                                                          " do not split by the auxiliary cardinality");
        pd.push_back({raw[p].settings, raw[p].outcomes / aux[p]});
    }
    return Dims(pd);
}

JointModel attach_selection(LhvModel m, KRule rule) {
    std::vector<int> aux(m.responses.size(), 1);
    return JointModel{std::move(m), std::move(aux), std::move(rule)};
}

namespace {

struct Postselected {
    BehaviorTable accepted;
    BehaviorTable all;
    std::vector<double> rates;
};

Postselected run_postselection(const JointModel& j) {
    j.model.validate();
    const auto raw = j.model.dims();
    const auto bell = j.bell_dims();
    Postselected out{BehaviorTable{bell}, BehaviorTable{bell}, std::vector<double>(bell.setting_count(), 0.0)};
    std::vector<int> bell_a(raw.parties());
    for (std::size_t s = 0; s < raw.setting_count(); ++s) {
        const auto x = raw.settings_of(s);
        for (std::size_t l = 0; l < j.model.weights.size(); ++l)
            for_each_outcome(j.model, raw, l, x, [&](std::size_t, const std::vector<int>& a, double prob) {
                if (prob == 0.0) return;
                for (std::size_t p = 0; p < a.size(); ++p) bell_a[p] = a[p] / j.aux[p];
                const auto o = bell.encode_outcomes(bell_a);
                out.all.at(s, o) += prob;
                if (j.accept) {
                    const double k = j.accept(l, a, x);
                    if (!(k >= 0.0 && k <= 1.0)) throw Error(ErrorCode::InvalidModel, "acceptance outside [0,1]");
                    out.accepted.at(s, o) += prob * k;
                    out.rates[s] += prob * k;
                } else {
                    out.accepted.at(s, o) += prob;
                    out.rates[s] += prob;
                }
            });
    }
    return out;
}

}  // namespace

std::vector<double> acceptance_rates(const JointModel& j) { return run_postselection(j).rates; }

BehaviorTable postselect(const JointModel& j) {
    auto r = run_postselection(j);
    const auto& dims = r.accepted.dims;
    for (std::size_t s = 0; s < dims.setting_count(); ++s) {
        if (r.rates[s] <= kMinAcceptance)
            throw Error(ErrorCode::EmptyPostselection,
                        "setting vector " + std::to_string(s) + " is accepted with probability " +
                            std::to_string(r.rates[s]));
        for (std::size_t o = 0; o < dims.outcome_count(); ++o) r.accepted.at(s, o) /= r.rates[s];
    }
    return r.accepted;
}

BehaviorTable unpostselected(const JointModel& j) { return run_postselection(j).all; }

std::optional<std::vector<int>> as_direct_conditioning(const std::vector<int>& cards,
                                                       const std::function<double(std::span<const int>)>& accept) {
    std::size_t total = 1;
    for (int c : cards) total *= static_cast<std::size_t>(c);
    std::optional<std::vector<int>> hit;
    std::vector<int> v(cards.size(), 0);
    for (std::size_t i = 0; i < total; ++i) {
        const double k = accept(v);
        if (k != 0.0 && k != 1.0) return std::nullopt;  // stochastic rules are not fixed values
        if (k == 1.0) {
            if (hit) return std::nullopt;
            hit = v;
        }
        for (std::size_t p = cards.size(); p-- > 0;) {
            if (++v[p] < cards[p]) break;
            v[p] = 0;
        }
    }
    return hit;
}

}  // namespace fairsample
