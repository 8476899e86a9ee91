#include "fairsample/sampling.hpp"

#include <algorithm>
#include <array>
#include <memory>

#include "fairsample/polytope.hpp"

namespace fairsample {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 finalizer over (seed, index)
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<double> random_simplex_point(Rng& rng, std::size_t n) {
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> w(n);
    double sum = 0;
    for (auto& v : w) sum += (v = expo(rng));
    for (auto& v : w) v /= sum;
    return w;
}

namespace {

void fill_slice(Rng& rng, ResponseTable& r, std::size_t l, int x, double deterministic) {
    std::bernoulli_distribution det(deterministic);
    if (det(rng)) {
        std::uniform_int_distribution<int> pick(0, r.outcomes() - 1);
        r(l, x, pick(rng)) = 1.0;
        return;
    }
    const auto w = random_simplex_point(rng, static_cast<std::size_t>(r.outcomes()));
    for (int a = 0; a < r.outcomes(); ++a) r(l, x, a) = w[a];
}

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

}  // namespace

LhvModel random_lhv_model(Rng& rng, const Dims& dims, std::size_t lambdas, double deterministic) {
    LhvModel m;
    m.weights = random_simplex_point(rng, lambdas);
    for (std::size_t p = 0; p < dims.parties(); ++p) {
        ResponseTable r(lambdas, dims[p].settings, dims[p].outcomes);
        for (std::size_t l = 0; l < lambdas; ++l)
            for (int x = 0; x < dims[p].settings; ++x) fill_slice(rng, r, l, x, deterministic);
        m.responses.push_back(std::move(r));
    }
    return m;
}

DetectionModel random_detection(Rng& rng, FsaVariant variant, std::size_t parties, int settings, std::size_t lambdas) {
    DetectionModel dm;
    for (std::size_t p = 0; p < parties; ++p) {
        DetectionTable t(settings, lambdas);
        std::vector<double> u(settings), v(lambdas);
        for (auto& e : u) e = uniform(rng, 0.25, 1.0);
        for (auto& e : v) e = uniform(rng, 0.2, 1.0);
        const double c = uniform(rng, 0.05, 1.0);
        for (int x = 0; x < settings; ++x)
            for (std::size_t l = 0; l < lambdas; ++l) {
                switch (variant) {
                    case FsaVariant::ConstantEta: t(x, l) = c; break;
                    case FsaVariant::LambdaOnlyEta: t(x, l) = v[l]; break;
                    case FsaVariant::FactorizedEta: t(x, l) = u[x] * v[l]; break;
                    case FsaVariant::Unrestricted: t(x, l) = uniform(rng, 0.05, 1.0); break;
                }
            }
        dm.parties.push_back(std::move(t));
    }
    return dm;
}

namespace {

// Random table over auxiliary outcomes, bounded away from zero.
KRule aux_table_rule(Rng& rng, std::size_t parties) {
    auto table = std::make_shared<std::vector<double>>(std::size_t{1} << parties);
    for (auto& v : *table) v = uniform(rng, 0.05, 1.0);
    return [table](std::size_t, std::span<const int> raw, std::span<const int>) {
        std::size_t idx = 0;
        for (int r : raw) idx = idx * 2 + static_cast<std::size_t>(r % 2);
        return (*table)[idx];
    };
}

}  // namespace

JointModel random_fig2c_joint(Rng& rng, std::size_t parties) {
    std::uniform_int_distribution<std::size_t> lam(1, 6);
    const auto lambdas = lam(rng);
    JointModel j;
    j.model.weights = random_simplex_point(rng, lambdas);
    for (std::size_t p = 0; p < parties; ++p) {
        ResponseTable bell(lambdas, 2, 2), aux(lambdas, 1, 2), raw(lambdas, 2, 4);
        for (std::size_t l = 0; l < lambdas; ++l) {
            fill_slice(rng, bell, l, 0, 0.5);
            fill_slice(rng, bell, l, 1, 0.5);
            fill_slice(rng, aux, l, 0, 0.0);
            for (int x = 0; x < 2; ++x)
                for (int a = 0; a < 2; ++a)
                    for (int e = 0; e < 2; ++e) raw(l, x, a * 2 + e) = bell(l, x, a) * aux(l, 0, e);
        }
        j.model.responses.push_back(std::move(raw));
        j.aux.push_back(2);
    }
    j.accept = aux_table_rule(rng, parties);
    return j;
}

JointModel random_fig4_joint(Rng& rng, std::size_t parties) {
    std::uniform_int_distribution<std::size_t> lam(1, 6);
    const auto lambdas = lam(rng);
    JointModel j;
    j.model.weights = random_simplex_point(rng, lambdas);
    for (std::size_t p = 0; p < parties; ++p) {
        ResponseTable aux(lambdas, 1, 2), raw(lambdas, 2, 4);
        for (std::size_t l = 0; l < lambdas; ++l) {
            fill_slice(rng, aux, l, 0, 0.0);
            for (int e = 0; e < 2; ++e) {
                ResponseTable given(1, 2, 2);  // p(a1 | x, λ, a2 = e)
                fill_slice(rng, given, 0, 0, 0.5);
                fill_slice(rng, given, 0, 1, 0.5);
                for (int x = 0; x < 2; ++x)
                    for (int a = 0; a < 2; ++a) raw(l, x, a * 2 + e) = aux(l, 0, e) * given(0, x, a);
            }
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

JointModel random_settings_only_joint(Rng& rng, const Dims& dims) {
    std::uniform_int_distribution<std::size_t> lam(1, 6);
    auto m = random_lhv_model(rng, dims, lam(rng));
    auto table = std::make_shared<std::vector<double>>(dims.setting_count());
    for (auto& v : *table) v = uniform(rng, 0.05, 1.0);
    Dims d = dims;
    return attach_selection(std::move(m), [table, d](std::size_t, std::span<const int>, std::span<const int> x) {
        return (*table)[d.encode_settings(x)];
    });
}

HybridModel random_hybrid_model(Rng& rng, std::size_t lambdas) {
    HybridModel h;
    h.dims = Dims::uniform(3, 2, 2);
    h.weights = random_simplex_point(rng, lambdas);
    static const std::vector<BehaviorTable> ns = enumerate_ns_vertices(Dims::uniform(2, 2, 2));
    std::uniform_int_distribution<std::size_t> pick_pair(0, 2), pick_vertex(0, ns.size() - 1);
    const std::pair<std::size_t, std::size_t> pairs[] = {{0, 1}, {0, 2}, {1, 2}};
    for (std::size_t l = 0; l < lambdas; ++l) {
        HybridBranch b;
        b.pair = pairs[pick_pair(rng)];
        // mixture of up to three no-signalling vertices
        b.pair_behavior = BehaviorTable(Dims::uniform(2, 2, 2));
        const auto w = random_simplex_point(rng, 3);
        for (double wi : w) {
            const auto& v = ns[pick_vertex(rng)];
            for (std::size_t i = 0; i < v.p.size(); ++i) b.pair_behavior.p[i] += wi * v.p[i];
        }
        ResponseTable single(1, 2, 2);
        fill_slice(rng, single, 0, 0, 0.5);
        fill_slice(rng, single, 0, 1, 0.5);
        b.locals = {{{single(0, 0, 0), single(0, 0, 1)}, {single(0, 1, 0), single(0, 1, 1)}}};
        h.branches.push_back(std::move(b));
    }
    return h;
}

HybridJoint random_fig3_joint(Rng& rng) {
    std::uniform_int_distribution<std::size_t> lam(1, 6);
    const auto base = random_hybrid_model(rng, lam(rng));
    HybridJoint j;
    j.model.dims = Dims::uniform(3, 2, 4);
    j.model.weights = base.weights;
    for (const auto& b : base.branches) {
        // auxiliary outcome of each party drawn from λ alone
        std::vector<std::array<double, 2>> aux(3);
        for (auto& a : aux) {
            const auto w = random_simplex_point(rng, 2);
            a = {w[0], w[1]};
        }
        HybridBranch raw;
        raw.pair = b.pair;
        raw.pair_behavior = BehaviorTable(Dims::uniform(2, 2, 4));
        const auto& pa = aux[b.pair.first];
        const auto& pb = aux[b.pair.second];
        for (std::size_t s = 0; s < 4; ++s)
            for (int a = 0; a < 2; ++a)
                for (int c = 0; c < 2; ++c)
                    for (int e = 0; e < 2; ++e)
                        for (int f = 0; f < 2; ++f)
                            raw.pair_behavior.at(s, static_cast<std::size_t>((a * 2 + e) * 4 + (c * 2 + f))) =
                                b.pair_behavior.at(s, static_cast<std::size_t>(a * 2 + c)) * pa[e] * pb[f];
        std::size_t other = 3 - b.pair.first - b.pair.second;
        std::vector<std::vector<double>> local(2, std::vector<double>(4));
        for (int x = 0; x < 2; ++x)
            for (int a = 0; a < 2; ++a)
                for (int e = 0; e < 2; ++e) local[x][a * 2 + e] = b.locals[0][x][a] * aux[other][e];
        raw.locals = {local};
        j.model.branches.push_back(std::move(raw));
    }
    j.aux = {2, 2, 2};
    j.accept = aux_table_rule(rng, 3);
    return j;
}

}  // namespace fairsample
