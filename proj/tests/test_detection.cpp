#include "doctest.h"

#include <cmath>

#include "fairsample/detection.hpp"
#include "fairsample/error.hpp"
#include "fairsample/functional.hpp"
#include "fairsample/polytope.hpp"
#include "fairsample/sampling.hpp"

using namespace fairsample;

namespace {

DetectionModel table_model(std::size_t parties, std::size_t lambdas, const std::function<double(int, std::size_t)>& eta) {
    DetectionModel dm;
    for (std::size_t p = 0; p < parties; ++p) {
        DetectionTable t(2, lambdas);
        for (int x = 0; x < 2; ++x)
            for (std::size_t l = 0; l < lambdas; ++l) t(x, l) = eta(x, l);
        dm.parties.push_back(t);
    }
    return dm;
}

}  // namespace

TEST_SUITE("detection") {
    TEST_CASE("sure detection leaves the behavior unchanged") {
        Rng rng(1);
        const auto m = random_lhv_model(rng, Dims::uniform(2, 2, 2), 4);
        const auto j = extend_with_detection(m, table_model(2, 4, [](int, std::size_t) { return 1.0; }));
        CHECK(max_abs_difference(postselect(j), behavior_from_lhv(m)) <= 1e-15);
    }

    TEST_CASE("constant efficiency thins independently") {
        Rng rng(2);
        const auto m = random_lhv_model(rng, Dims::uniform(2, 2, 2), 5);
        const auto j = extend_with_detection(m, table_model(2, 5, [](int, std::size_t) { return 0.5; }));
        CHECK(max_abs_difference(postselect(j), behavior_from_lhv(m)) <= 1e-12);
        for (double r : acceptance_rates(j)) CHECK(r == doctest::Approx(0.25));
    }

    TEST_CASE("lambda-only efficiency reweights the hidden variable") {
        Rng rng(3);
        const auto m = random_lhv_model(rng, Dims::uniform(2, 2, 2), 4);
        const double eta[4] = {0.2, 0.9, 0.5, 0.7};
        const auto j = extend_with_detection(m, table_model(2, 4, [&](int, std::size_t l) { return eta[l]; }));
        // oracle: p(λ | K=1) ∝ p_λ η(λ)^2
        auto re = m;
        double z = 0;
        for (std::size_t l = 0; l < 4; ++l) z += (re.weights[l] *= eta[l] * eta[l]);
        for (auto& w : re.weights) w /= z;
        const auto post = postselect(j);
        CHECK(max_abs_difference(post, behavior_from_lhv(re)) <= 1e-12);
        CHECK(is_local(post).local);
    }

    TEST_CASE("undetected events carry a uniform coin") {
        LhvModel m;
        m.weights = {1.0};
        ResponseTable r(1, 2, 2);
        r(0, 0, 0) = r(0, 1, 0) = 1.0;
        m.responses = {r, r};
        const auto j = extend_with_detection(m, table_model(2, 1, [](int, std::size_t) { return 0.25; }));
        const auto& raw = j.model.responses[0];
        CHECK(raw(0, 0, 1) == 0.25);   // a = 0, detected
        CHECK(raw(0, 0, 3) == 0.0);    // a = 1, detected
        CHECK(raw(0, 0, 0) == 0.375);  // a = 0, undetected
        CHECK(raw(0, 0, 2) == 0.375);  // a = 1, undetected
        const auto un = unpostselected(j);
        CHECK(un.at(0, 0) == doctest::Approx((0.25 + 0.375) * (0.25 + 0.375)));
    }

    TEST_CASE("shape mismatches are rejected") {
        Rng rng(4);
        const auto m = random_lhv_model(rng, Dims::uniform(2, 2, 2), 3);
        try {
            extend_with_detection(m, table_model(2, 4, [](int, std::size_t) { return 1.0; }));
            FAIL("expected DimensionMismatch");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::DimensionMismatch);
        }
        CHECK_THROWS_AS(extend_with_detection(m, table_model(3, 3, [](int, std::size_t) { return 1.0; })), Error);
    }

    TEST_CASE("classification ladder") {
        CHECK(classify_detection(table_model(1, 3, [](int, std::size_t) { return 0.4; })) == FsaVariant::ConstantEta);
        CHECK(classify_detection(table_model(1, 3, [](int, std::size_t l) { return 0.2 + 0.1 * l; })) ==
              FsaVariant::LambdaOnlyEta);
        const double u[2] = {0.5, 0.9}, v[3] = {0.3, 0.6, 1.0};
        CHECK(classify_detection(table_model(1, 3, [&](int x, std::size_t l) { return u[x] * v[l]; })) ==
              FsaVariant::FactorizedEta);
        CHECK(classify_detection(table_model(1, 2, [](int x, std::size_t l) { return x == static_cast<int>(l) ? 0.9 : 0.3; })) ==
              FsaVariant::Unrestricted);
        // setting-only dependence factorizes with a constant λ factor
        CHECK(classify_detection(table_model(1, 3, [&](int x, std::size_t) { return u[x]; })) == FsaVariant::FactorizedEta);
        // zero rows and columns are allowed, isolated zeros are not
        CHECK(classify_detection(table_model(1, 3, [&](int x, std::size_t l) { return l == 1 ? 0.0 : u[x] * v[l]; })) ==
              FsaVariant::FactorizedEta);
        CHECK(classify_detection(table_model(1, 3, [&](int x, std::size_t l) {
                  return (x == 0 && l == 1) ? 0.0 : u[x] * v[l];
              })) == FsaVariant::Unrestricted);
        // relative tolerance
        CHECK(classify_detection(table_model(1, 3, [](int x, std::size_t) { return 0.4 * (1 + x * 1e-12); })) ==
              FsaVariant::ConstantEta);
        CHECK(classify_detection(table_model(1, 3, [](int x, std::size_t) { return 0.4 * (1 + x * 1e-6); })) !=
              FsaVariant::ConstantEta);
        // the strictest variant over all parties
        auto mixed = table_model(1, 3, [](int, std::size_t) { return 0.4; });
        mixed.parties.push_back(table_model(1, 3, [](int, std::size_t l) { return 0.1 * (l + 1); }).parties[0]);
        CHECK(classify_detection(mixed) == FsaVariant::LambdaOnlyEta);
    }

    TEST_CASE("constant tables never misclassify") {
        Rng rng(12);
        for (int i = 0; i < 300; ++i) {
            const auto dm = random_detection(rng, FsaVariant::ConstantEta, 2, 2, 1 + i % 8);
            CHECK(classify_detection(dm) == FsaVariant::ConstantEta);
        }
    }

    TEST_CASE("random tables satisfy their variant") {
        Rng rng(13);
        for (auto v : {FsaVariant::LambdaOnlyEta, FsaVariant::FactorizedEta}) {
            for (int i = 0; i < 200; ++i) CHECK(classify_detection(random_detection(rng, v, 2, 3, 1 + i % 8)) <= v);
        }
    }

    TEST_CASE("small sweeps are local and reproducible") {
        for (auto v : {FsaVariant::ConstantEta, FsaVariant::LambdaOnlyEta, FsaVariant::FactorizedEta}) {
            const auto r = safety_sweep(v, 60, 21);
            CHECK(r.all_local());
            CHECK(r.max_chsh <= 2 + 1e-9);
            CHECK(r.n_classified_within == r.n_models);
            const auto again = safety_sweep(v, 60, 21);
            CHECK(again.max_chsh == r.max_chsh);
            CHECK(again.max_residual == r.max_residual);
        }
        CHECK_THROWS_AS(safety_sweep(FsaVariant::Unrestricted, 1, 0), Error);
    }

    TEST_CASE("PR filter demo") {
        const auto fv = fake_violation_demo(DemoKind::PrFilter);
        CHECK(fv.chsh == 4.0);
        REQUIRE(fv.acceptance.size() == 4);
        for (double r : fv.acceptance) CHECK(r == 0.75);
        CHECK(max_abs_difference(fv.postselected, pr_box()) <= 1e-15);
        CHECK_FALSE(verify_fsa(fv.induced).safe);
    }

    TEST_CASE("marginal-fair demo") {
        const auto fv = fake_violation_demo(DemoKind::MarginalFair, 7);
        CHECK(fv.chsh >= 2.05);
        CHECK(fv.marginal_gap <= 1e-12);
        REQUIRE(fv.base.has_value());
        REQUIRE(fv.detection.has_value());
        CHECK(detection_marginal_gap(*fv.base, *fv.detection) <= 1e-12);
        CHECK(classify_detection(*fv.detection) == FsaVariant::Unrestricted);
        // the reported value is recomputed from the model
        CHECK(evaluate_functional(postselect(fv.model), chsh()) == fv.chsh);
        CHECK_FALSE(is_local(fv.postselected).local);
        const auto v = verify_fsa(fv.induced);
        CHECK_FALSE(v.safe);
    }

    TEST_CASE("induced diagrams follow the table's dependence") {
        const auto c = induced_detection_spec(table_model(2, 3, [](int, std::size_t) { return 0.5; }));
        CHECK(verify_fsa(c).safe);
        const auto l = induced_detection_spec(table_model(2, 3, [](int, std::size_t q) { return 0.2 + 0.2 * q; }));
        CHECK(l.diagram.has_edge(l.diagram.index("Lambda"), l.diagram.index("A2")));
        CHECK_FALSE(l.diagram.has_edge(l.diagram.index("X"), l.diagram.index("A2")));
        CHECK(verify_fsa(l).safe);
        const auto x = induced_detection_spec(table_model(2, 3, [](int s, std::size_t) { return 0.3 + 0.5 * s; }));
        CHECK(x.diagram.has_edge(x.diagram.index("X"), x.diagram.index("A2")));
        CHECK_FALSE(verify_fsa(x).safe);
    }

    TEST_CASE("variant names") {
        for (auto v : {FsaVariant::ConstantEta, FsaVariant::LambdaOnlyEta, FsaVariant::FactorizedEta, FsaVariant::Unrestricted})
            CHECK(variant_from_string(to_string(v)) == v);
        CHECK_THROWS_AS(variant_from_string("bogus"), Error);
    }
}
