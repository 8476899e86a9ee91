#include "fairsample/fixtures.hpp"

#include "fairsample/dsl.hpp"
#include "fairsample/error.hpp"

namespace fairsample {

namespace {

constexpr std::string_view k_fig1b = R"diagram(# Bell experiment with a postselection decided by both outcomes
node X setting(A)
node Y setting(B)
node A outcome(A)
node B outcome(B)
node Lambda latent
node K selection
edge X -> A
edge Y -> B
edge Lambda -> A
edge Lambda -> B
edge A -> K
edge B -> K
bell A: A
bell B: B
)diagram";

constexpr std::string_view k_fig2a = R"diagram(# general structure: arbitrary influence between each party's outcome groups
node X setting(A)
node Y setting(B)
node A1 outcome(A)
node A2 outcome(A)
node B1 outcome(B)
node B2 outcome(B)
node Lambda latent
node K selection
edge X -> A1
edge Y -> B1
edge A2 -> K
edge B2 -> K
biedge A1 -- A2
biedge B1 -- B2
bell A: A1
bell B: B1
assume lambda-influences-all
)diagram";

constexpr std::string_view k_fig2b = R"diagram(# postselection outcomes shielded from the settings, still feeding the Bell outcomes
node X setting(A)
node Y setting(B)
node A1 outcome(A)
node A2 outcome(A)
node B1 outcome(B)
node B2 outcome(B)
node Lambda latent
node K selection
edge X -> A1
edge Y -> B1
edge Lambda -> A1
edge Lambda -> A2
edge Lambda -> B1
edge Lambda -> B2
edge A2 -> A1
edge B2 -> B1
edge A2 -> K
edge B2 -> K
bell A: A1
bell B: B1
)diagram";

constexpr std::string_view k_fig2c = R"diagram(node X setting(A)
node Y setting(B)
node A1 outcome(A)
node A2 outcome(A)
node B1 outcome(B)
node B2 outcome(B)
node Lambda latent
node K selection
edge X -> A1
edge Y -> B1
edge Lambda -> A1
edge Lambda -> A2
edge Lambda -> B1
edge Lambda -> B2
edge A2 -> K
edge B2 -> K
bell A: A1
bell B: B1
)diagram";

constexpr std::string_view k_fig3 = R"diagram(# three parties, nonlocal correlations between outcomes of different parties
node X setting(A)
node Y setting(B)
node Z setting(C)
node A1 outcome(A)
node A2 outcome(A)
node B1 outcome(B)
node B2 outcome(B)
node C1 outcome(C)
node C2 outcome(C)
node Lambda latent
node K selection
edge X -> A1
edge Y -> B1
edge Z -> C1
edge Lambda -> A1
edge Lambda -> A2
edge Lambda -> B1
edge Lambda -> B2
edge Lambda -> C1
edge Lambda -> C2
edge A2 -> K
edge B2 -> K
edge C2 -> K
nsedge A1 ~~ B1
nsedge A1 ~~ C1
nsedge B1 ~~ C1
nsedge A1 ~~ B2
bell A: A1
bell B: B1
bell C: C1
)diagram";

constexpr std::string_view k_fig3_z_c2 = R"diagram(# as fig3, with the setting Z reaching the postselection outcome C2
node X setting(A)
node Y setting(B)
node Z setting(C)
node A1 outcome(A)
node A2 outcome(A)
node B1 outcome(B)
node B2 outcome(B)
node C1 outcome(C)
node C2 outcome(C)
node Lambda latent
node K selection
edge X -> A1
edge Y -> B1
edge Z -> C1
edge Z -> C2
edge Lambda -> A1
edge Lambda -> A2
edge Lambda -> B1
edge Lambda -> B2
edge Lambda -> C1
edge Lambda -> C2
edge A2 -> K
edge B2 -> K
edge C2 -> K
nsedge A1 ~~ B1
nsedge A1 ~~ C1
nsedge B1 ~~ C1
nsedge A1 ~~ B2
bell A: A1
bell B: B1
bell C: C1
)diagram";

constexpr std::string_view k_fig4 = R"diagram(# conditioning on fixed detection counts instead of a selection node
node X setting(A)
node Y setting(B)
node A1 outcome(A)
node A2 outcome(A)
node B1 outcome(B)
node B2 outcome(B)
node Lambda latent
edge X -> A1
edge Y -> B1
edge Lambda -> A1
edge Lambda -> A2
edge Lambda -> B1
edge Lambda -> B2
edge A2 -> A1
edge B2 -> B1
bell A: A1
bell B: B1
condition A2=1 B2=1
)diagram";

constexpr std::string_view k_fig4_hybrid = R"diagram(# three parties conditioned on fixed detection counts, nonlocal correlations allowed
node X setting(A)
node Y setting(B)
node Z setting(C)
node A1 outcome(A)
node A2 outcome(A)
node B1 outcome(B)
node B2 outcome(B)
node C1 outcome(C)
node C2 outcome(C)
node Lambda latent
edge X -> A1
edge Y -> B1
edge Z -> C1
edge Lambda -> A1
edge Lambda -> A2
edge Lambda -> B1
edge Lambda -> B2
edge Lambda -> C1
edge Lambda -> C2
edge A2 -> A1
edge B2 -> B1
edge C2 -> C1
nsedge A1 ~~ B1
nsedge A1 ~~ C1
nsedge B1 ~~ C1
bell A: A1
bell B: B1
bell C: C1
condition A2=1 B2=1 C2=1
)diagram";

constexpr std::string_view k_franson = R"diagram(# energy-time setup: the arrival time is both postselected on and used in the inequality
node X setting(A)
node Y setting(B)
node A1 outcome(A)
node A2 outcome(A)
node B1 outcome(B)
node B2 outcome(B)
node Lambda latent
node K selection
edge X -> A1
edge Y -> B1
edge Lambda -> A1
edge Lambda -> A2
edge Lambda -> B1
edge Lambda -> B2
edge A2 -> K
edge B2 -> K
bell A: A1 A2
bell B: B1 B2
)diagram";

constexpr std::string_view k_parity = R"diagram(# K = [A2 == B2]; same structure as fig2c, no fixed values implied
node X setting(A)
node Y setting(B)
node A1 outcome(A)
node A2 outcome(A)
node B1 outcome(B)
node B2 outcome(B)
node Lambda latent
node K selection
edge X -> A1
edge Y -> B1
edge Lambda -> A1
edge Lambda -> A2
edge Lambda -> B1
edge Lambda -> B2
edge A2 -> K
edge B2 -> K
bell A: A1
bell B: B1
)diagram";

constexpr std::string_view k_settings_only_k = R"diagram(# postselection decided by the settings alone
node X setting(A)
node Y setting(B)
node A outcome(A)
node B outcome(B)
node Lambda latent
node K selection
edge X -> A
edge Y -> B
edge Lambda -> A
edge Lambda -> B
edge X -> K
edge Y -> K
bell A: A
bell B: B
)diagram";

}  // namespace

const std::vector<Fixture>& builtin_fixtures() {
    static const std::vector<Fixture> all{
        {"fig1b", k_fig1b},
        {"fig2a", k_fig2a},
        {"fig2b", k_fig2b},
        {"fig2c", k_fig2c},
        {"fig3", k_fig3},
        {"fig3_z_c2", k_fig3_z_c2},
        {"fig4", k_fig4},
        {"fig4_hybrid", k_fig4_hybrid},
        {"franson", k_franson},
        {"parity", k_parity},
        {"settings_only_k", k_settings_only_k},
    };
    return all;
}

const Fixture& builtin_fixture(const std::string& name) {
    for (const auto& f : builtin_fixtures())
        if (f.name == name) return f;
    throw Error(ErrorCode::FormatError, "no built-in fixture named '" + name + "'");
}

ScenarioSpec fixture_spec(const std::string& name) { return parse_diagram(builtin_fixture(name).source); }

}  // namespace fairsample
