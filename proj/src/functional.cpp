#include "fairsample/functional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fairsample/error.hpp"
#include "fairsample/polytope.hpp"

namespace fairsample {

BellFunctional make_functional(Dims dims, std::vector<double> coefficients, std::string label) {
    if (coefficients.size() != dims.size())
        throw Error(ErrorCode::DimensionMismatch, "functional has " + std::to_string(coefficients.size()) +
                                                      " coefficients for " + std::to_string(dims.size()) + " cells");
    BellFunctional f{std::move(dims), std::move(coefficients), 0.0, std::move(label)};
    f.local_bound = recompute_local_bound(f);
    return f;
}

double evaluate_functional(const BehaviorTable& b, const BellFunctional& f) {
    if (!(b.dims == f.dims) || b.p.size() != f.coefficients.size())
        throw Error(ErrorCode::DimensionMismatch, "functional '" + f.label + "' does not match the behavior shape");
    double s = 0;
    for (std::size_t i = 0; i < b.p.size(); ++i) s += f.coefficients[i] * b.p[i];
    return s;
}

double recompute_local_bound(const BellFunctional& f, const Dims& dims) {
    if (!(dims == f.dims)) throw Error(ErrorCode::DimensionMismatch, "dims differ from the functional's");
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& v : enumerate_local_vertices(dims)) best = std::max(best, evaluate_functional(v, f));
    return best;
}

double recompute_local_bound(const BellFunctional& f) { return recompute_local_bound(f, f.dims); }

BellFunctional correlator_functional(std::size_t parties, const std::function<double(std::span<const int>)>& sign,
                                     std::string label) {
    const auto dims = Dims::uniform(parties, 2, 2);
    std::vector<double> c(dims.size(), 0.0);
    for (std::size_t s = 0; s < dims.setting_count(); ++s) {
        const auto x = dims.settings_of(s);
        const double w = sign(x);
        for (std::size_t o = 0; o < dims.outcome_count(); ++o) {
            const auto a = dims.outcomes_of(o);
            int parity = 0;
            for (int v : a) parity ^= v;
            c[s * dims.outcome_count() + o] = parity ? -w : w;
        }
    }
    return make_functional(dims, std::move(c), std::move(label));
}

BellFunctional chsh() {
    return correlator_functional(2, [](std::span<const int> x) { return (x[0] & x[1]) ? -1.0 : 1.0; }, "chsh");
}

BellFunctional mermin3() {
    return correlator_functional(
        3,
        [](std::span<const int> x) {
            const int ones = x[0] + x[1] + x[2];
            if (ones == 1) return 1.0;
            if (ones == 3) return -1.0;
            return 0.0;
        },
        "mermin3");
}

BellFunctional svetlichny3() {
    return correlator_functional(
        3, [](std::span<const int> x) { return x[0] + x[1] + x[2] <= 1 ? 1.0 : -1.0; }, "svetlichny3");
}

BellFunctional functional_by_name(const std::string& name) {
    if (name == "chsh") return chsh();
    if (name == "mermin3") return mermin3();
    if (name == "svetlichny3") return svetlichny3();
    throw Error(ErrorCode::FormatError, "unknown functional '" + name + "'");
}

BehaviorTable pr_box() {
    BehaviorTable b{Dims::uniform(2, 2, 2)};
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int a = 0; a < 2; ++a)
                for (int c = 0; c < 2; ++c) b.at(x * 2 + y, a * 2 + c) = ((a ^ c) == (x & y)) ? 0.5 : 0.0;
    return b;
}

BehaviorTable correlation_behavior(std::size_t parties,
                                   const std::function<double(std::span<const int>)>& correlator) {
    BehaviorTable b{Dims::uniform(parties, 2, 2)};
    const double norm = 1.0 / static_cast<double>(b.dims.outcome_count());
    for (std::size_t s = 0; s < b.dims.setting_count(); ++s) {
        const double e = correlator(b.dims.settings_of(s));
        for (std::size_t o = 0; o < b.dims.outcome_count(); ++o) {
            int parity = 0;
            for (int a : b.dims.outcomes_of(o)) parity ^= a;
            b.at(s, o) = norm * (1.0 + (parity ? -e : e));
        }
    }
    return b;
}

BehaviorTable singlet_behavior(const std::vector<double>& alpha, const std::vector<double>& beta) {
    if (alpha.size() != 2 || beta.size() != 2) throw Error(ErrorCode::DimensionMismatch, "two angles per party");
    return correlation_behavior(2, [&](std::span<const int> x) { return -std::cos(alpha[x[0]] - beta[x[1]]); });
}

BehaviorTable ghz_behavior(const std::vector<std::vector<double>>& phases) {
    for (const auto& p : phases)
        if (p.size() != 2) throw Error(ErrorCode::DimensionMismatch, "two phases per party");
    return correlation_behavior(phases.size(), [&](std::span<const int> x) {
        double sum = 0;
        for (std::size_t p = 0; p < phases.size(); ++p) sum += phases[p][x[p]];
        return std::cos(sum);
    });
}

}  // namespace fairsample
