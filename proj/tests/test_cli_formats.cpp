#include "doctest.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "fairsample/detection.hpp"
#include "fairsample/dsl.hpp"
#include "fairsample/error.hpp"
#include "fairsample/fixtures.hpp"
#include "fairsample/functional.hpp"
#include "fairsample/io.hpp"
#include "fairsample/report.hpp"
#include "fairsample/sampling.hpp"

using namespace fairsample;

namespace {

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const ParseError expect_parse_error(std::string_view src) {
    try {
        parse_diagram(src);
    } catch (const ParseError& e) {
        return e;
    }
    FAIL("expected a parse error");
    throw std::logic_error("unreachable");
}

constexpr std::string_view kHeader =
    "node X setting(A)\n"
    "node A outcome(A)\n"
    "node K selection\n";

}  // namespace

TEST_SUITE("cli_formats") {
    TEST_CASE("parses the fig2c fixture") {
        const auto spec = parse_diagram(builtin_fixture("fig2c").source);
        CHECK(spec.diagram.size() == 8);
        CHECK(spec.diagram.directed().size() == 8);
        CHECK(spec.parties() == std::vector<PartyId>{"A", "B"});
        CHECK(spec.outcomes("A") == std::set<NodeId>{"A1", "A2"});
        CHECK(spec.settings("B") == std::set<NodeId>{"Y"});
        CHECK(std::get<SelectionNode>(spec.selection).node == "K");
        CHECK_FALSE(spec.lambda_influences_all);
    }

    TEST_CASE("edge out of the selection node is a positioned error") {
        const auto src = std::string(kHeader) + "edge X -> A\nedge K -> A\nbell A: A\n";
        const auto e = expect_parse_error(src);
        CHECK(e.code() == ErrorCode::EdgeOutOfSelection);
        CHECK(e.line() == 5);
        CHECK(e.column() >= 1);
    }

    TEST_CASE("positioned errors") {
        struct Case {
            std::string tail;
            ErrorCode code;
            int line;
        };
        const std::vector<Case> cases = {
            {"node A latent\n", ErrorCode::DuplicateNode, 4},
            {"node Q quark\n", ErrorCode::SyntaxError, 4},
            {"edge X -> Q\n", ErrorCode::UnknownNode, 4},
            {"edge A -> X\n", ErrorCode::EdgeIntoSetting, 4},
            {"node K2 selection\n", ErrorCode::MultipleSelection, 4},
            {"edge X => A\n", ErrorCode::SyntaxError, 4},
            {"frobnicate\n", ErrorCode::SyntaxError, 4},
            {"node L latent\nedge A -> L\nedge L -> A\n", ErrorCode::CycleDetected, 6},
            {"edge X -> A\nbell A: X\n", ErrorCode::RoleConflict, 5},
            {"node L latent\nbiedge L -- A\n", ErrorCode::InvalidBidirected, 5},
            {"node B outcome(B)\nnsedge A ~~ X\n", ErrorCode::InvalidNonlocal, 5},
            {"condition A=x\n", ErrorCode::SyntaxError, 4},
            {"assume something-else\n", ErrorCode::SyntaxError, 4},
            {"node 9a latent\n", ErrorCode::SyntaxError, 4},
        };
        for (const auto& c : cases) {
            CAPTURE(c.tail);
            const auto e = expect_parse_error(std::string(kHeader) + c.tail);
            CHECK(e.code() == c.code);
            CHECK(e.line() == c.line);
        }
    }

    TEST_CASE("comments, blank lines and spacing") {
        const auto spec = parse_diagram(
            "# header\n\n  node X setting   # trailing\nnode A outcome(A)\nnode K selection\n"
            "edge X->A\nedge A -> K\nbell A : A\n");
        CHECK(spec.settings("A") == std::set<NodeId>{"X"});
        CHECK(spec.diagram.directed().size() == 2);
    }

    TEST_CASE("direct conditioning and assumptions") {
        const auto spec = parse_diagram(
            "node X setting(A)\nnode Y setting(B)\nnode A1 outcome(A)\nnode A2 outcome(A)\n"
            "node B1 outcome(B)\nnode B2 outcome(B)\nnode L latent\n"
            "edge X -> A1\nedge Y -> B1\nedge L -> A1\nedge L -> A2\nedge L -> B1\nedge L -> B2\n"
            "bell A: A1\nbell B: B1\ncondition A2=1 B2=1\nassume lambda-influences-all\n");
        const auto& dc = std::get<DirectConditioning>(spec.selection);
        CHECK(dc.values == std::map<NodeId, int>{{"A2", 1}, {"B2", 1}});
        CHECK(spec.lambda_influences_all);
        CHECK(parse_diagram(serialize_diagram(spec)) == spec);
    }

    TEST_CASE("Franson fixture parses and is an obstruction") {
        const auto spec = parse_diagram(builtin_fixture("franson").source);
        const auto v = verify_fsa(spec);
        CHECK_FALSE(v.obstruction.empty());
        CHECK(verdict_code(v) == 3);
    }

    TEST_CASE("round trip on every fixture") {
        for (const auto& f : builtin_fixtures()) {
            CAPTURE(f.name);
            const auto spec = parse_diagram(f.source);
            const auto text = serialize_diagram(spec);
            const auto again = parse_diagram(text);
            CHECK(again == spec);
            CHECK(serialize_diagram(again) == text);
        }
    }

    TEST_CASE("fixture files ship the built-in text") {
        for (const auto& f : builtin_fixtures()) {
            CAPTURE(f.name);
            CHECK(read_text(std::string(FAIRSAMPLE_FIXTURES_DIR) + "/" + f.name + ".diagram") == f.source);
            CHECK(load_diagram(std::string(FAIRSAMPLE_FIXTURES_DIR) + "/" + f.name + ".diagram") == fixture_spec(f.name));
        }
        CHECK_THROWS_AS(builtin_fixture("nope"), Error);
    }

    TEST_CASE("stable dump") {
        Json j;
        j["b"] = 1;
        j["a"] = Json::array({0.5, 1.0, 2});
        j["c"] = {{"z", 0.1}, {"y", "s"}};
        const auto s = stable_dump(j);
        CHECK(s.find("\"a\"") < s.find("\"b\""));
        CHECK(s.find("\"b\"") < s.find("\"c\""));
        CHECK(s.find("\"y\"") < s.find("\"z\""));
        CHECK(s.find("0.10000000000000001") != std::string::npos);
        CHECK(s.find("1.0") != std::string::npos);
        CHECK(stable_dump(Json::parse(s)) == s);
    }

    TEST_CASE("probabilities as strings") {
        CHECK(parse_probability(Json("0.25")) == 0.25);
        CHECK(parse_probability(Json(0.25)) == 0.25);
        CHECK_THROWS_AS(parse_probability(Json("abc")), Error);
        CHECK_THROWS_AS(parse_probability(Json(true)), Error);
        for (double p : {0.0, 1.0, 0.1, 1.0 / 3, 0.75, 1e-17})
            CHECK(parse_probability(Json(format_probability(p))) == p);
    }

    TEST_CASE("behavior round trip") {
        const auto b = singlet_behavior({0, 1.2}, {0.3, -0.7});
        const auto j = behavior_to_json(b);
        CHECK(j["format_version"] == kFormatVersion);
        CHECK(j["kind"] == "behavior");
        CHECK(j["p"][0].is_string());
        const auto back = behavior_from_json(Json::parse(stable_dump(j)));
        CHECK(back.dims == b.dims);
        CHECK(max_abs_difference(back, b) <= 1e-16);
    }

    TEST_CASE("behavior loading validates and renormalizes") {
        auto j = behavior_to_json(pr_box());
        j["p"][0] = "0.5000000001";  // within tolerance
        const auto b = behavior_from_json(j);
        CHECK(normalization_error(b) <= 1e-15);
        j["p"][0] = "0.6";
        CHECK_THROWS_AS(behavior_from_json(j), Error);
        auto k = behavior_to_json(pr_box());
        k["format_version"] = 2;
        CHECK_THROWS_AS(behavior_from_json(k), Error);
        auto m = behavior_to_json(pr_box());
        m["p"].erase(0);
        CHECK_THROWS_AS(behavior_from_json(m), Error);
    }

    TEST_CASE("lhv model round trip keeps the postselection") {
        const auto j = pr_filter_model();
        const auto text = stable_dump(model_to_json(j));
        const auto back = std::get<JointModel>(model_from_json(Json::parse(text)));
        CHECK(back.aux == j.aux);
        CHECK(max_abs_difference(postselect(back), postselect(j)) <= 1e-15);
        CHECK(acceptance_rates(back) == acceptance_rates(j));
        CHECK(stable_dump(model_to_json(back)) == text);

        Rng rng(3);
        const auto f = random_fig2c_joint(rng);
        const auto fb = std::get<JointModel>(model_from_json(model_to_json(f)));
        CHECK(max_abs_difference(postselect(fb), postselect(f)) <= 1e-15);
    }

    TEST_CASE("hybrid model round trip") {
        Rng rng(4);
        const auto h = random_fig3_joint(rng);
        const auto back = std::get<HybridJoint>(model_from_json(Json::parse(stable_dump(model_to_json(h)))));
        CHECK(max_abs_difference(postselect_hybrid(back), postselect_hybrid(h)) <= 1e-15);
    }

    TEST_CASE("verdict report fields") {
        const auto v = verify_fsa(fixture_spec("fig1b"));
        const auto j = verdict_to_json(v);
        CHECK(j["safe"] == false);
        CHECK(j["exit_code"] == 2);
        CHECK(j["ci"]["witness"]["path"] == "X -> A -> K <- B <- Lambda");
        const auto safe = verdict_to_json(verify_fsa(fixture_spec("fig2c")));
        CHECK(safe["classification"] == "Fig2c");
        CHECK(safe["exit_code"] == 0);
        const auto h = report_header("check", 5);
        CHECK(h["tool"] == "fairsample");
        CHECK(h["version"] == kToolVersion);
        CHECK(h["seed"] == 5);
        CHECK_FALSE(report_header("check").contains("seed"));
        CHECK(render_verdict(v).find("X -> A -> K <- B <- Lambda") != std::string::npos);
    }
}
