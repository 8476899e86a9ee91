#include "fairsample/detection.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <random>
#include <thread>

#include "fairsample/error.hpp"
#include "fairsample/functional.hpp"
#include "fairsample/polytope.hpp"
#include "fairsample/sampling.hpp"

namespace fairsample {

void DetectionModel::validate() const {
    for (const auto& t : parties)
        for (int x = 0; x < t.settings(); ++x)
            for (std::size_t l = 0; l < t.lambdas(); ++l)
                if (!(t(x, l) >= 0.0 && t(x, l) <= 1.0))
                    throw Error(ErrorCode::InvalidModel, "detection probability outside [0,1]");
}

const char* to_string(FsaVariant v) {
    switch (v) {
        case FsaVariant::ConstantEta: return "constant";
        case FsaVariant::LambdaOnlyEta: return "lambda";
        case FsaVariant::FactorizedEta: return "factorized";
        case FsaVariant::Unrestricted: return "unrestricted";
    }
    return "?";
}

FsaVariant variant_from_string(const std::string& s) {
    if (s == "constant") return FsaVariant::ConstantEta;
    if (s == "lambda") return FsaVariant::LambdaOnlyEta;
    if (s == "factorized") return FsaVariant::FactorizedEta;
    if (s == "unrestricted") return FsaVariant::Unrestricted;
    throw Error(ErrorCode::FormatError, "unknown variant '" + s + "'");
}

JointModel extend_with_detection(const LhvModel& m, const DetectionModel& dm) {
    if (dm.parties.size() != m.responses.size())
        throw Error(ErrorCode::DimensionMismatch, "detection model has wrong number of parties");
    dm.validate();
    JointModel j;
    j.model.weights = m.weights;
    for (std::size_t p = 0; p < m.responses.size(); ++p) {
        const auto& r = m.responses[p];
        const auto& eta = dm.parties[p];
        if (eta.settings() != r.settings() || eta.lambdas() != r.lambdas())
            throw Error(ErrorCode::DimensionMismatch, "detection table shape differs from response table");
        ResponseTable raw(r.lambdas(), r.settings(), r.outcomes() * 2);
        const double coin = 1.0 / r.outcomes();
        for (std::size_t l = 0; l < r.lambdas(); ++l)
            for (int x = 0; x < r.settings(); ++x)
                for (int a = 0; a < r.outcomes(); ++a) {
                    // undetected events carry a fair coin in place of the outcome
                    raw(l, x, a * 2 + 1) = eta(x, l) * r(l, x, a);
                    raw(l, x, a * 2) = (1.0 - eta(x, l)) * coin;
                }
        j.model.responses.push_back(std::move(raw));
        j.aux.push_back(2);
    }
    j.accept = [](std::size_t, std::span<const int> raw, std::span<const int>) {
        for (int r : raw)
            if (r % 2 != 1) return 0.0;
        return 1.0;
    };
    return j;
}

namespace {

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b)); }

bool factorizes(const DetectionTable& t, double tol) {
    std::vector<int> rows;
    std::vector<std::size_t> cols;
    for (int x = 0; x < t.settings(); ++x) {
        bool any = false;
        for (std::size_t l = 0; l < t.lambdas(); ++l) any = any || t(x, l) != 0.0;
        if (any) rows.push_back(x);
    }
    for (std::size_t l = 0; l < t.lambdas(); ++l) {
        bool any = false;
        for (int x = 0; x < t.settings(); ++x) any = any || t(x, l) != 0.0;
        if (any) cols.push_back(l);
    }
    if (rows.empty()) return true;
    for (int x : rows)
        for (auto l : cols)
            if (t(x, l) == 0.0) return false;
    const int x0 = rows.front();
    for (int x : rows) {
        const double ratio = t(x, cols.front()) / t(x0, cols.front());
        for (auto l : cols)
            if (!close(t(x, l) / t(x0, l), ratio, tol)) return false;
    }
    return true;
}

}  // namespace

FsaVariant classify_detection(const DetectionTable& t, double rel_tol) {
    if (t.settings() == 0 || t.lambdas() == 0) return FsaVariant::ConstantEta;
    bool constant = true, lambda_only = true;
    for (int x = 0; x < t.settings(); ++x)
        for (std::size_t l = 0; l < t.lambdas(); ++l) {
            constant = constant && close(t(x, l), t(0, 0), rel_tol);
            lambda_only = lambda_only && close(t(x, l), t(0, l), rel_tol);
        }
    if (constant) return FsaVariant::ConstantEta;
    if (lambda_only) return FsaVariant::LambdaOnlyEta;
    if (factorizes(t, rel_tol)) return FsaVariant::FactorizedEta;
    return FsaVariant::Unrestricted;
}

FsaVariant classify_detection(const DetectionModel& dm, double rel_tol) {
    FsaVariant v = FsaVariant::ConstantEta;
    for (const auto& t : dm.parties) v = std::max(v, classify_detection(t, rel_tol));
    return v;
}

double detection_marginal_gap(const LhvModel& m, const DetectionModel& dm) {
    double gap = 0;
    for (const auto& t : dm.parties) {
        std::vector<double> pd(t.settings(), 0.0);
        for (int x = 0; x < t.settings(); ++x)
            for (std::size_t l = 0; l < t.lambdas(); ++l) pd[x] += m.weights[l] * t(x, l);
        double mean = 0;
        for (double v : pd) mean += v;
        mean /= static_cast<double>(pd.size());
        for (double v : pd) gap = std::max(gap, std::abs(v - mean));
    }
    return gap;
}

namespace {

std::string party_letter(std::size_t p) { return std::string(1, static_cast<char>('A' + p)); }

std::string setting_letter(std::size_t p) {
    static const char* names[] = {"X", "Y", "Z", "W", "V", "U"};
    return p < 6 ? names[p] : "S" + std::to_string(p);
}

}  // namespace

ScenarioSpec induced_detection_spec(const DetectionModel& dm) {
    std::vector<Node> nodes{{"Lambda", NodeKind::latent()}, {"K", NodeKind::selection()}};
    std::vector<NamePair> edges;
    std::map<PartyId, std::vector<NodeId>> bell;
    for (std::size_t p = 0; p < dm.parties.size(); ++p) {
        const auto party = party_letter(p);
        const auto x = setting_letter(p), a1 = party + "1", a2 = party + "2";
        nodes.push_back({x, NodeKind::setting(party)});
        nodes.push_back({a1, NodeKind::outcome(party)});
        nodes.push_back({a2, NodeKind::outcome(party)});
        edges.push_back({x, a1});
        edges.push_back({"Lambda", a1});
        edges.push_back({a2, "K"});
        const auto& t = dm.parties[p];
        bool by_x = false, by_l = false;
        for (int s = 0; s < t.settings(); ++s)
            for (std::size_t l = 0; l < t.lambdas(); ++l) {
                by_x = by_x || !close(t(s, l), t(0, l), 1e-9);
                by_l = by_l || !close(t(s, l), t(s, 0), 1e-9);
            }
        if (by_x) edges.push_back({x, a2});
        if (by_l) edges.push_back({"Lambda", a2});
        bell[party] = {a1};
    }
    return make_scenario(build_diagram(std::move(nodes), edges), std::move(bell), SelectionNode{"K"}, false);
}

namespace {

struct SweepItem {
    double chsh = 0, residual = 0, acceptance = 1;
    bool local = false, within = false;
};

SweepItem sweep_one(FsaVariant variant, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> lam(1, 8);
    const std::size_t lambdas = lam(rng);
    const auto model = random_lhv_model(rng, Dims::uniform(2, 2, 2), lambdas);
    const auto det = random_detection(rng, variant, 2, 2, lambdas);
    const auto joint = extend_with_detection(model, det);
    SweepItem it;
    const auto rates = acceptance_rates(joint);
    it.acceptance = *std::min_element(rates.begin(), rates.end());
    const auto post = postselect(joint);
    const auto loc = is_local(post, 1e-9);
    it.local = loc.local;
    it.residual = loc.residual;
    it.chsh = evaluate_functional(post, chsh());
    it.within = classify_detection(det) <= variant;
    return it;
}

}  // namespace

SweepReport safety_sweep(FsaVariant variant, int n_models, std::uint64_t seed) {
    if (variant == FsaVariant::Unrestricted)
        throw Error(ErrorCode::InvalidScenario, "safety sweep needs a restricted detection variant");
    std::vector<SweepItem> items(static_cast<std::size_t>(std::max(n_models, 0)));
    const unsigned workers = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    std::vector<std::future<void>> jobs;
    for (unsigned w = 0; w < workers; ++w)
        jobs.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < items.size(); i += workers) items[i] = sweep_one(variant, derive_seed(seed, i));
        }));
    for (auto& j : jobs) j.get();  // rethrows EmptyPostselection

    SweepReport r;
    r.variant = variant;
    r.seed = seed;
    r.n_models = static_cast<int>(items.size());
    r.max_chsh = items.empty() ? 0 : -4;
    for (const auto& it : items) {
        r.n_local += it.local;
        r.n_classified_within += it.within;
        r.max_chsh = std::max(r.max_chsh, it.chsh);
        r.max_residual = std::max(r.max_residual, it.residual);
        r.min_acceptance = std::min(r.min_acceptance, it.acceptance);
    }
    return r;
}

JointModel pr_filter_model(bool chsh_optimal_only) {
    std::vector<std::array<int, 4>> kept;  // fA(0), fA(1), fB(0), fB(1)
    for (int sa = 0; sa < 4; ++sa)
        for (int sb = 0; sb < 4; ++sb) {
            const auto fa = deterministic_strategy(2, 2, sa), fb = deterministic_strategy(2, 2, sb);
            int wins = 0;
            for (int x = 0; x < 2; ++x)
                for (int y = 0; y < 2; ++y) wins += ((fa[x] ^ fb[y]) == (x & y));
            if (!chsh_optimal_only || wins == 3) kept.push_back({fa[0], fa[1], fb[0], fb[1]});
        }
    LhvModel m;
    m.weights.assign(kept.size(), 1.0 / static_cast<double>(kept.size()));
    ResponseTable ra(kept.size(), 2, 2), rb(kept.size(), 2, 2);
    for (std::size_t l = 0; l < kept.size(); ++l)
        for (int x = 0; x < 2; ++x) {
            ra(l, x, kept[l][x]) = 1.0;
            rb(l, x, kept[l][2 + x]) = 1.0;
        }
    m.responses = {ra, rb};
    return attach_selection(std::move(m), [](std::size_t, std::span<const int> a, std::span<const int> x) {
        return (a[0] ^ a[1]) == (x[0] & x[1]) ? 1.0 : 0.0;
    });
}

ScenarioSpec induced_filter_spec() {
    auto d = build_diagram({{"A", NodeKind::outcome("A")},
                            {"B", NodeKind::outcome("B")},
                            {"K", NodeKind::selection()},
                            {"Lambda", NodeKind::latent()},
                            {"X", NodeKind::setting("A")},
                            {"Y", NodeKind::setting("B")}},
                           {{"X", "A"}, {"Y", "B"}, {"Lambda", "A"}, {"Lambda", "B"},
                            {"A", "K"}, {"B", "K"}, {"X", "K"}, {"Y", "K"}});
    return make_scenario(std::move(d), {{"A", {"A"}}, {"B", {"B"}}}, SelectionNode{"K"}, false);
}

namespace {

constexpr std::size_t kSearchLambdas = 8;
constexpr int kMaxRestarts = 2000;

// Binary detection pattern and deterministic outcomes for two parties.
struct Candidate {
    std::array<std::array<int, kSearchLambdas>, 2> out_a{}, out_b{}, det_a{}, det_b{};
};

LhvModel candidate_model(const Candidate& c) {
    LhvModel m;
    m.weights.assign(kSearchLambdas, 1.0 / kSearchLambdas);
    ResponseTable ra(kSearchLambdas, 2, 2), rb(kSearchLambdas, 2, 2);
    for (std::size_t l = 0; l < kSearchLambdas; ++l)
        for (int x = 0; x < 2; ++x) {
            ra(l, x, c.out_a[x][l]) = 1.0;
            rb(l, x, c.out_b[x][l]) = 1.0;
        }
    m.responses = {ra, rb};
    return m;
}

DetectionModel candidate_detection(const Candidate& c) {
    DetectionModel dm;
    for (const auto* det : {&c.det_a, &c.det_b}) {
        DetectionTable t(2, kSearchLambdas);
        for (int x = 0; x < 2; ++x)
            for (std::size_t l = 0; l < kSearchLambdas; ++l) t(x, l) = (*det)[x][l];
        dm.parties.push_back(t);
    }
    return dm;
}

// CHSH of the postselected behavior, computed directly on the binary tables.
double candidate_score(const Candidate& c) {
    double s = 0;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            int n = 0, corr = 0;
            for (std::size_t l = 0; l < kSearchLambdas; ++l)
                if (c.det_a[x][l] && c.det_b[y][l]) {
                    ++n;
                    corr += (c.out_a[x][l] ^ c.out_b[y][l]) ? -1 : 1;
                }
            if (n == 0) return -1e9;
            s += (x & y ? -1.0 : 1.0) * corr / n;
        }
    return s;
}

Candidate random_candidate(Rng& rng) {
    Candidate c;
    std::bernoulli_distribution coin(0.5);
    std::uniform_int_distribution<std::size_t> count(1, kSearchLambdas);
    for (int x = 0; x < 2; ++x)
        for (std::size_t l = 0; l < kSearchLambdas; ++l) {
            c.out_a[x][l] = coin(rng);
            c.out_b[x][l] = coin(rng);
        }
    // equal detection counts per setting keep p(d|x) independent of x
    for (auto* det : {&c.det_a, &c.det_b}) {
        const auto k = count(rng);
        for (int x = 0; x < 2; ++x) {
            std::array<int, kSearchLambdas> row{};
            std::fill(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k), 1);
            std::shuffle(row.begin(), row.end(), rng);
            (*det)[x] = row;
        }
    }
    return c;
}

// Coordinate ascent: outcome bit flips and detection swaps within a row.
double climb(Candidate& c, Rng& rng) {
    double best = candidate_score(c);
    bool improved = true;
    while (improved) {
        improved = false;
        std::vector<std::function<void()>> moves;
        for (auto* out : {&c.out_a, &c.out_b})
            for (int x = 0; x < 2; ++x)
                for (std::size_t l = 0; l < kSearchLambdas; ++l) moves.push_back([out, x, l] { (*out)[x][l] ^= 1; });
        for (auto* det : {&c.det_a, &c.det_b})
            for (int x = 0; x < 2; ++x)
                for (std::size_t i = 0; i < kSearchLambdas; ++i)
                    for (std::size_t j = i + 1; j < kSearchLambdas; ++j)
                        if ((*det)[x][i] != (*det)[x][j])
                            moves.push_back([det, x, i, j] { std::swap((*det)[x][i], (*det)[x][j]); });
        std::shuffle(moves.begin(), moves.end(), rng);
        for (auto& mv : moves) {
            const Candidate saved = c;
            mv();
            const double s = candidate_score(c);
            if (s > best + 1e-12) {
                best = s;
                improved = true;
                break;  // move list is stale once the state changes
            }
            c = saved;
        }
    }
    return best;
}

}  // namespace

FakeViolation fake_violation_demo(DemoKind kind, std::uint64_t seed) {
    FakeViolation fv;
    fv.kind = kind;
    if (kind == DemoKind::PrFilter) {
        fv.model = pr_filter_model(true);
        fv.induced = induced_filter_spec();
    } else {
        Rng rng(seed);
        std::optional<Candidate> found;
        for (int r = 0; r < kMaxRestarts && !found; ++r) {
            auto c = random_candidate(rng);
            if (climb(c, rng) >= 2.05) found = c;
            fv.restarts = r + 1;
        }
        if (!found) throw Error(ErrorCode::SearchFailed, "no marginal-fair violation found");
        fv.base = candidate_model(*found);
        fv.detection = candidate_detection(*found);
        fv.model = extend_with_detection(*fv.base, *fv.detection);
        fv.marginal_gap = detection_marginal_gap(*fv.base, *fv.detection);
        fv.induced = induced_detection_spec(*fv.detection);
    }
    fv.postselected = postselect(fv.model);
    fv.chsh = evaluate_functional(fv.postselected, chsh());
    fv.acceptance = acceptance_rates(fv.model);
    return fv;
}

}  // namespace fairsample
