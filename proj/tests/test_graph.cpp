#include "doctest.h"

#include "fairsample/error.hpp"
#include "fairsample/fixtures.hpp"
#include "fairsample/graph.hpp"

using namespace fairsample;

namespace {

CausalDiagram lhv_diagram() {
    return build_diagram({{"X", NodeKind::setting()},
                          {"Y", NodeKind::setting()},
                          {"A", NodeKind::outcome("A")},
                          {"B", NodeKind::outcome("B")},
                          {"Lambda", NodeKind::latent()}},
                         {{"Lambda", "A"}, {"Lambda", "B"}, {"X", "A"}, {"Y", "B"}});
}

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::FormatError;
}

}  // namespace

TEST_SUITE("graph_core") {
    TEST_CASE("lhv diagram validates") {
        const auto d = lhv_diagram();
        CHECK(d.size() == 5);
        CHECK(d.directed().size() == 4);
        CHECK(d.name(0) == "A");  // nodes sorted by name
        CHECK(d.has_edge(d.index("X"), d.index("A")));
        CHECK_FALSE(d.has_edge(d.index("A"), d.index("X")));
    }

    TEST_CASE("two-cycle is rejected and named") {
        try {
            build_diagram({{"A", NodeKind::outcome("p")}, {"B", NodeKind::outcome("q")}}, {{"A", "B"}, {"B", "A"}});
            FAIL("no error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::CycleDetected);
            CHECK(std::string(e.what()).find("A -> B -> A") != std::string::npos);
        }
    }

    TEST_CASE("structural errors") {
        CHECK(code_of([] {
                  build_diagram({{"A", NodeKind::outcome("p")}, {"X", NodeKind::setting()}}, {{"A", "X"}});
              }) == ErrorCode::EdgeIntoSetting);
        CHECK(code_of([] {
                  build_diagram({{"A", NodeKind::outcome("p")}, {"K", NodeKind::selection()}}, {{"K", "A"}});
              }) == ErrorCode::EdgeOutOfSelection);
        CHECK(code_of([] { build_diagram({{"A", NodeKind::outcome("p")}}, {{"A", "Q"}}); }) == ErrorCode::UnknownNode);
        CHECK(code_of([] {
                  build_diagram({{"A", NodeKind::outcome("p")}, {"A", NodeKind::latent()}}, {});
              }) == ErrorCode::DuplicateNode);
        CHECK(code_of([] {
                  build_diagram({{"A", NodeKind::outcome("p")}, {"L", NodeKind::latent()}}, {}, {{"A", "L"}});
              }) == ErrorCode::InvalidBidirected);
        CHECK(code_of([] {
                  build_diagram({{"A", NodeKind::outcome("p")}, {"B", NodeKind::outcome("p")}}, {}, {}, {{"A", "B"}});
              }) == ErrorCode::InvalidNonlocal);
        CHECK(code_of([] {
                  build_diagram({{"K", NodeKind::selection()}, {"J", NodeKind::selection()}}, {});
              }) == ErrorCode::MultipleSelection);
    }

    TEST_CASE("expand_bidirected adds one fresh latent per edge") {
        const auto d = build_diagram({{"A1", NodeKind::outcome("A")}, {"A2", NodeKind::outcome("A")}}, {},
                                     {{"A2", "A1"}});
        const auto e = expand_bidirected(d);
        CHECK(e.bidirected().empty());
        REQUIRE(e.contains("γ_A1_A2"));
        CHECK(e.kind(e.index("γ_A1_A2")).is(NodeRole::Latent));
        CHECK(e.has_edge(e.index("γ_A1_A2"), e.index("A1")));
        CHECK(e.has_edge(e.index("γ_A1_A2"), e.index("A2")));
        CHECK(expand_bidirected(e) == e);  // idempotent on its output

        const auto plain = lhv_diagram();
        CHECK(expand_bidirected(plain) == plain);

        const auto two = build_diagram(
            {{"A", NodeKind::outcome("p")}, {"B", NodeKind::outcome("p")}, {"C", NodeKind::outcome("p")}}, {},
            {{"A", "B"}, {"B", "C"}});
        const auto t = expand_bidirected(two);
        CHECK(t.contains("γ_A_B"));
        CHECK(t.contains("γ_B_C"));
        CHECK(t.size() == 5);
    }

    TEST_CASE("ancestry examples") {
        const auto fig1b = fixture_spec("fig1b").diagram;
        CHECK(descendants(fig1b, "A") == std::set<NodeId>{"K"});
        const auto iso = build_diagram({{"Q", NodeKind::latent()}, {"R", NodeKind::latent()}}, {});
        CHECK(descendants(iso, "Q").empty());
        CHECK(ancestors(iso, "Q").empty());
        const auto chain = build_diagram(
            {{"X", NodeKind::setting()}, {"A", NodeKind::outcome("p")}, {"K", NodeKind::selection()}},
            {{"X", "A"}, {"A", "K"}});
        CHECK(ancestors(chain, "K") == std::set<NodeId>{"A", "X"});
        CHECK_THROWS_AS(ancestors(chain, "nope"), Error);
    }

    TEST_CASE("ancestors and descendants are dual on every fixture") {
        for (const auto& f : builtin_fixtures()) {
            const auto d = expand_bidirected(fixture_spec(f.name).diagram);
            for (const auto& u : d.nodes())
                for (const auto& v : d.nodes()) {
                    const bool a = ancestors(d, v.name).count(u.name) > 0;
                    const bool b = descendants(d, u.name).count(v.name) > 0;
                    CHECK_MESSAGE(a == b, f.name << ": " << u.name << " / " << v.name);
                }
        }
    }

    TEST_CASE("derived diagrams") {
        const auto d = lhv_diagram();
        const auto k = with_directed_edges(d, {{"A", "B"}});
        CHECK(k.has_edge(k.index("A"), k.index("B")));
        CHECK_THROWS_AS(with_directed_edges(k, {{"B", "A"}}), Error);
        const auto w = without_nodes(d, {"Lambda"});
        CHECK(w.size() == 4);
        CHECK(w.directed().size() == 2);
    }
}
