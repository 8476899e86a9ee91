#include "doctest.h"

#include <cmath>
#include <numbers>

#include "fairsample/behavior.hpp"
#include "fairsample/error.hpp"
#include "fairsample/functional.hpp"
#include "fairsample/polytope.hpp"
#include "fairsample/sampling.hpp"
#include "fairsample/simplex.hpp"
#include "fairsample/detection.hpp"
#include "oracles.hpp"

using namespace fairsample;

namespace {

LhvModel deterministic_model(const std::vector<std::vector<int>>& per_party_f, int outcomes = 2) {
    LhvModel m;
    m.weights = {1.0};
    for (const auto& f : per_party_f) {
        ResponseTable r(1, static_cast<int>(f.size()), outcomes);
        for (int x = 0; x < static_cast<int>(f.size()); ++x) r(0, x, f[x]) = 1.0;
        m.responses.push_back(r);
    }
    return m;
}

// p[x][y][a][b] from a two-party binary table.
void to_array(const BehaviorTable& b, double out[2][2][2][2]) {
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int a = 0; a < 2; ++a)
                for (int c = 0; c < 2; ++c) out[x][y][a][c] = b.at(x * 2 + y, a * 2 + c);
}

}  // namespace

TEST_SUITE("lhv_lab") {
    TEST_CASE("dims encoding is mixed radix with party 0 most significant") {
        const Dims d({{2, 3}, {3, 2}});
        CHECK(d.setting_count() == 6);
        CHECK(d.outcome_count() == 6);
        const std::vector<int> x{1, 2};
        CHECK(d.encode_settings(x) == 5);
        CHECK(d.settings_of(5) == x);
        CHECK(d.outcomes_of(d.encode_outcomes(std::vector<int>{2, 1})) == std::vector<int>{2, 1});
    }

    TEST_CASE("point mass for deterministic a = x, b = y") {
        const auto b = behavior_from_lhv(deterministic_model({{0, 1}, {0, 1}}));
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y)
                for (int a = 0; a < 2; ++a)
                    for (int c = 0; c < 2; ++c)
                        CHECK(b.at(x * 2 + y, a * 2 + c) == ((a == x && c == y) ? 1.0 : 0.0));
    }

    TEST_CASE("uniform mixture of two strategies averages the tensors") {
        const auto m1 = deterministic_model({{0, 1}, {1, 1}});
        const auto m2 = deterministic_model({{1, 0}, {0, 1}});
        LhvModel mix;
        mix.weights = {0.5, 0.5};
        for (std::size_t p = 0; p < 2; ++p) {
            ResponseTable r(2, 2, 2);
            for (int x = 0; x < 2; ++x)
                for (int a = 0; a < 2; ++a) {
                    r(0, x, a) = m1.responses[p](0, x, a);
                    r(1, x, a) = m2.responses[p](0, x, a);
                }
            mix.responses.push_back(r);
        }
        const auto b = behavior_from_lhv(mix), b1 = behavior_from_lhv(m1), b2 = behavior_from_lhv(m2);
        for (std::size_t i = 0; i < b.p.size(); ++i) CHECK(b.p[i] == doctest::Approx(0.5 * (b1.p[i] + b2.p[i])));
    }

    TEST_CASE("outcome-distributed hidden variable reproduces a setting-free behavior") {
        // target p(a, b | y) with no influence of x on a
        const double pa[2] = {0.3, 0.7};
        const double pb_given_a_y[2][2][2] = {{{0.9, 0.1}, {0.4, 0.6}}, {{0.2, 0.8}, {0.5, 0.5}}};  // [a][y][b]
        LhvModel m;
        m.weights = {pa[0], pa[1]};
        ResponseTable ra(2, 2, 2), rb(2, 2, 2);
        for (int l = 0; l < 2; ++l)
            for (int s = 0; s < 2; ++s) {
                ra(l, s, l) = 1.0;
                for (int c = 0; c < 2; ++c) rb(l, s, c) = pb_given_a_y[l][s][c];
            }
        m.responses = {ra, rb};
        const auto b = behavior_from_lhv(m);
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y)
                for (int a = 0; a < 2; ++a)
                    for (int c = 0; c < 2; ++c)
                        CHECK(b.at(x * 2 + y, a * 2 + c) == doctest::Approx(pa[a] * pb_given_a_y[a][y][c]).epsilon(1e-14));
    }

    TEST_CASE("random models: local and no-signalling, two and three parties") {
        Rng rng(17);
        for (int i = 0; i < 500; ++i) {
            const auto dims = i % 2 ? Dims::uniform(3, 2, 2) : Dims({{2, 2}, {3, 2}});
            const auto m = random_lhv_model(rng, dims, 1 + i % 7);
            const auto b = behavior_from_lhv(m);
            CHECK(normalization_error(b) <= 1e-12);
            CHECK(is_no_signalling(b, 1e-12));
            CHECK(is_local(b, 1e-9).local);
        }
    }

    TEST_CASE("linearity in the weights for shared responses") {
        Rng rng(4);
        const auto m = random_lhv_model(rng, Dims::uniform(2, 2, 2), 4);
        auto m1 = m, m2 = m;
        m1.weights = {0.7, 0.1, 0.1, 0.1};
        m2.weights = {0.1, 0.2, 0.3, 0.4};
        auto mix = m;
        for (std::size_t l = 0; l < 4; ++l) mix.weights[l] = 0.25 * m1.weights[l] + 0.75 * m2.weights[l];
        const auto b = behavior_from_lhv(mix), b1 = behavior_from_lhv(m1), b2 = behavior_from_lhv(m2);
        for (std::size_t i = 0; i < b.p.size(); ++i) CHECK(std::abs(b.p[i] - (0.25 * b1.p[i] + 0.75 * b2.p[i])) <= 1e-15);
    }

    TEST_CASE("invalid models are rejected") {
        LhvModel m = deterministic_model({{0, 1}, {0, 1}});
        m.weights = {0.9};
        CHECK_THROWS_AS(behavior_from_lhv(m), Error);
        m.weights = {1.0};
        m.responses[0](0, 0, 1) = 0.5;
        CHECK_THROWS_AS(m.validate(), Error);
    }

    TEST_CASE("postselection identities") {
        Rng rng(8);
        const auto m = random_lhv_model(rng, Dims::uniform(2, 2, 2), 3);
        const auto sure = attach_selection(m, [](std::size_t, std::span<const int>, std::span<const int>) { return 1.0; });
        CHECK(max_abs_difference(postselect(sure), behavior_from_lhv(m)) <= 1e-15);
        const auto settings_only = attach_selection(m, [](std::size_t, std::span<const int>, std::span<const int> x) {
            return x[0] == 1 && x[1] == 1 ? 0.2 : 0.9;
        });
        CHECK(max_abs_difference(postselect(settings_only), behavior_from_lhv(m)) <= 1e-12);
        const auto never = attach_selection(m, [](std::size_t, std::span<const int>, std::span<const int> x) {
            return x[0] == 0 ? 1.0 : 0.0;
        });
        try {
            postselect(never);
            FAIL("expected EmptyPostselection");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::EmptyPostselection);
        }
    }

    TEST_CASE("PR filter over all 16 strategy pairs yields the PR box") {
        const auto j = pr_filter_model(false);
        CHECK(j.model.weights.size() == 16);
        const auto b = postselect(j);
        CHECK(max_abs_difference(b, pr_box()) <= 1e-15);
        double arr[2][2][2][2];
        to_array(b, arr);
        CHECK(oracle::chsh_direct(arr) == 4.0);
        for (double r : acceptance_rates(j)) CHECK(r == 0.5);
    }

    TEST_CASE("local vertex counts") {
        CHECK(enumerate_local_vertices(Dims::uniform(2, 2, 2)).size() == 16);
        CHECK(enumerate_local_vertices(Dims::uniform(3, 2, 2)).size() == 64);
        CHECK(enumerate_local_vertices(Dims::uniform(1, 1, 2)).size() == 2);
        CHECK_THROWS_AS(local_vertex_count(Dims::uniform(4, 4, 4)), Error);
        // vertices are distinct deterministic behaviors
        const auto vs = enumerate_local_vertices(Dims::uniform(2, 2, 2));
        for (std::size_t i = 0; i < vs.size(); ++i) {
            for (double p : vs[i].p) CHECK((p == 0.0 || p == 1.0));
            for (std::size_t j = i + 1; j < vs.size(); ++j) CHECK(max_abs_difference(vs[i], vs[j]) == 1.0);
        }
    }

    TEST_CASE("is_local examples") {
        const auto vs = enumerate_local_vertices(Dims::uniform(2, 2, 2));
        const auto v = is_local(vs[5]);
        CHECK(v.local);
        REQUIRE(v.weights.size() == 1);
        CHECK(v.weights[0].first == 5);
        CHECK(v.weights[0].second == doctest::Approx(1.0));

        const auto pr = is_local(pr_box());
        CHECK_FALSE(pr.local);
        REQUIRE(pr.certificate.has_value());
        CHECK(pr.certificate->value > pr.certificate->local_bound + 1e-6);
        // the certificate separates PR from every local vertex
        for (const auto& w : vs) {
            double s = 0;
            for (std::size_t i = 0; i < w.p.size(); ++i) s += pr.certificate->coefficients[i] * w.p[i];
            CHECK(s <= pr.certificate->local_bound + 1e-9);
        }
        // rescaled so that the local bound is 2, a CHSH-type gap 4 vs 2 appears
        const double c = (pr.certificate->value - pr.certificate->local_bound);
        CHECK(c > 0);

        BehaviorTable uniform(Dims::uniform(2, 2, 2));
        for (const auto& w : vs)
            for (std::size_t i = 0; i < w.p.size(); ++i) uniform.p[i] += w.p[i] / 16.0;
        CHECK(is_local(uniform).local);
    }

    TEST_CASE("CHSH bounds and values") {
        const auto f = chsh();
        CHECK(f.local_bound == 2.0);
        CHECK(recompute_local_bound(f, Dims::uniform(2, 2, 2)) == 2.0);
        CHECK(evaluate_functional(pr_box(), f) == 4.0);
        // oracle: correlator table E(x,y) = (-1)^{xy} / sqrt 2 with uniform marginals
        double arr[2][2][2][2];
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) {
                const double e = ((x & y) ? -1.0 : 1.0) / std::sqrt(2.0);
                for (int a = 0; a < 2; ++a)
                    for (int c = 0; c < 2; ++c) arr[x][y][a][c] = (1 + ((a ^ c) ? -e : e)) / 4;
            }
        BehaviorTable s(Dims::uniform(2, 2, 2));
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y)
                for (int a = 0; a < 2; ++a)
                    for (int c = 0; c < 2; ++c) s.at(x * 2 + y, a * 2 + c) = arr[x][y][a][c];
        CHECK(std::abs(evaluate_functional(s, f) - 2 * std::sqrt(2.0)) <= 1e-12);
        CHECK(std::abs(oracle::chsh_direct(arr) - 2 * std::sqrt(2.0)) <= 1e-12);
        // singlet measured at the textbook angles
        using std::numbers::pi;
        const auto q = singlet_behavior({0, pi / 2}, {5 * pi / 4, 3 * pi / 4});
        CHECK(std::abs(evaluate_functional(q, f) - 2 * std::sqrt(2.0)) <= 1e-12);
        CHECK(max_abs_difference(q, s) <= 1e-15);
        CHECK_FALSE(is_local(q).local);
        CHECK_THROWS_AS(evaluate_functional(pr_box(), mermin3()), Error);
    }

    TEST_CASE("CHSH local bound by direct enumeration") {
        double best = -10;
        for (int fa = 0; fa < 4; ++fa)
            for (int fb = 0; fb < 4; ++fb) {
                double arr[2][2][2][2] = {};
                for (int x = 0; x < 2; ++x)
                    for (int y = 0; y < 2; ++y) arr[x][y][(fa >> x) & 1][(fb >> y) & 1] = 1;
                best = std::max(best, oracle::chsh_direct(arr));
            }
        CHECK(best == chsh().local_bound);
    }

    TEST_CASE("simplex feasibility and dual certificate") {
        // x1 + x2 = 1, x1 - x2 = 0.5 -> x = (0.75, 0.25)
        const auto f = solve_feasibility({{1, 1}, {1, -1}}, {1, 0.5});
        CHECK(f.infeasibility <= 1e-12);
        CHECK(f.x[0] == doctest::Approx(0.75));
        CHECK(f.x[1] == doctest::Approx(0.25));
        // x1 + x2 = 1, x1 + x2 = 2 is infeasible
        const auto g = solve_feasibility({{1, 1}, {1, 1}}, {1, 2});
        CHECK(g.infeasibility == doctest::Approx(1.0));
        // x >= 0 with x1 = -1 is infeasible
        CHECK(solve_feasibility({{1, 0}}, {-1}).infeasibility == doctest::Approx(1.0));
    }

    TEST_CASE("no-signalling checks and marginals") {
        CHECK(is_no_signalling(pr_box()));
        BehaviorTable sig(Dims::uniform(2, 2, 2));
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) sig.at(x * 2 + y, y * 2) = 1.0;  // a = y
        CHECK_FALSE(is_no_signalling(sig));
        CHECK(no_signalling_violation(sig) == 1.0);
        const auto ma = marginal(pr_box(), {0});
        for (double p : ma.p) CHECK(p == 0.5);
    }
}
