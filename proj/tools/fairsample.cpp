// Command-line front end. Exit codes: 0 success / safe / local, 1 error,
// 2 unsafe / nonlocal, 3 obstruction (CI holds but a Bell outcome decides K).
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "fairsample/detection.hpp"
#include "fairsample/dsl.hpp"
#include "fairsample/error.hpp"
#include "fairsample/fixtures.hpp"
#include "fairsample/functional.hpp"
#include "fairsample/multiparty.hpp"
#include "fairsample/polytope.hpp"
#include "fairsample/report.hpp"
#include "fairsample/sampling.hpp"

using namespace fairsample;

namespace {

constexpr std::uint64_t kDefaultSeed = 1;
constexpr std::size_t kMaxCliNodes = 32;  // keeps path enumeration tractable

std::uint64_t effective_seed(std::uint64_t flag) {
    const char* env = std::getenv("FAIRSAMPLE_SEED");
    if (!env || !*env) return flag;
    std::uint64_t v = 0;
    const std::string s = env;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw Error(ErrorCode::FormatError, "FAIRSAMPLE_SEED must be an unsigned integer");
    return v;
}

void emit(const Json& j) { std::cout << stable_dump(j); }

// Values of every named functional whose shape matches the behavior.
Json functional_values(const BehaviorTable& b) {
    Json out = Json::object();
    for (const char* name : {"chsh", "mermin3", "svetlichny3"}) {
        const auto f = functional_by_name(name);
        if (f.dims == b.dims) out[name] = evaluate_functional(b, f);
    }
    return out;
}

void print_values(const Json& values) {
    for (auto it = values.begin(); it != values.end(); ++it)
        std::cout << it.key() << " = " << format_number(it.value().get<double>()) << '\n';
}

int cmd_check(const std::string& file, bool json) {
    const auto spec = load_diagram(file);
    if (spec.diagram.size() > kMaxCliNodes)
        throw Error(ErrorCode::InvalidScenario, "diagram has more than " + std::to_string(kMaxCliNodes) + " nodes");
    const auto v = verify_any(spec);
    if (json) {
        auto j = report_header("check");
        j["source"] = std::filesystem::path(file).filename().string();
        j["verdict"] = verdict_to_json(v);
        emit(j);
    } else {
        std::cout << render_verdict(v);
    }
    return verdict_code(v);
}

int cmd_simulate(const std::string& file, bool post, std::uint64_t seed, bool json) {
    const auto loaded = load_model(file);
    BehaviorTable b;
    std::optional<std::vector<double>> rates;
    if (const auto* jm = std::get_if<JointModel>(&loaded)) {
        b = post ? postselect(*jm) : unpostselected(*jm);
        if (post) rates = acceptance_rates(*jm);
    } else {
        auto h = std::get<HybridJoint>(loaded);
        if (!post) h.accept = nullptr;
        b = postselect_hybrid(h);
    }
    const auto values = functional_values(b);
    if (json) {
        auto j = report_header("simulate", seed);
        j["source"] = std::filesystem::path(file).filename().string();
        j["postselected"] = post;
        j["behavior"] = behavior_to_json(b);
        j["functionals"] = values;
        if (rates) j["acceptance"] = *rates;
        emit(j);
    } else {
        std::cout << render_behavior(b);
        print_values(values);
        if (rates) {
            std::cout << "acceptance per setting vector:";
            for (double r : *rates) std::cout << ' ' << format_number(r);
            std::cout << '\n';
        }
    }
    return 0;
}

int cmd_is_local(const std::string& file, double tol, bool json) {
    const auto b = load_behavior(file);
    const auto r = is_local(b, tol);
    if (json) {
        auto j = report_header("is-local");
        j["source"] = std::filesystem::path(file).filename().string();
        j["tolerance"] = tol;
        j["result"] = locality_to_json(r);
        emit(j);
    } else if (r.local) {
        std::cout << "local (residual " << format_number(r.residual) << ")\n";
        for (const auto& [i, w] : r.weights) std::cout << "  vertex " << i << "  weight " << format_number(w) << '\n';
    } else {
        std::cout << "nonlocal (residual " << format_number(r.residual) << ")\n";
        if (r.certificate)
            std::cout << "separating functional: value " << format_number(r.certificate->value) << " > local bound "
                      << format_number(r.certificate->local_bound) << '\n';
    }
    return r.local ? 0 : 2;
}

int cmd_bell(const std::string& file, const std::string& name, bool json) {
    const auto b = load_behavior(file);
    const auto f = functional_by_name(name);
    const double value = evaluate_functional(b, f);
    const double bound = recompute_local_bound(f);
    std::optional<double> hybrid;
    if (f.dims.parties() >= 3) hybrid = hybrid_bound(f);
    if (json) {
        auto j = report_header("bell");
        j["source"] = std::filesystem::path(file).filename().string();
        j["functional"] = name;
        j["value"] = value;
        j["local_bound"] = bound;
        if (hybrid) j["hybrid_bound"] = *hybrid;
        emit(j);
    } else {
        std::cout << name << " = " << format_number(value) << "  (local bound " << format_number(bound);
        if (hybrid) std::cout << ", hybrid bound " << format_number(*hybrid);
        std::cout << ")\n";
    }
    return 0;
}

int demo_fake(DemoKind kind, std::uint64_t seed, bool json) {
    const auto fv = fake_violation_demo(kind, seed);
    const auto v = verify_fsa(fv.induced);
    if (json) {
        auto j = report_header("demo", seed);
        j["demo"] = kind == DemoKind::PrFilter ? "pearle" : "marginal-fair";
        j["chsh"] = fv.chsh;
        j["acceptance"] = fv.acceptance;
        j["marginal_gap"] = fv.marginal_gap;
        j["behavior"] = behavior_to_json(fv.postselected);
        j["induced_verdict"] = verdict_to_json(v);
        emit(j);
    } else {
        std::cout << "postselected behavior:\n" << render_behavior(fv.postselected);
        std::cout << "postselected CHSH = " << format_number(fv.chsh) << '\n';
        std::cout << "acceptance per setting pair:";
        for (double r : fv.acceptance) std::cout << ' ' << format_number(r);
        std::cout << '\n';
        if (kind == DemoKind::MarginalFair)
            std::cout << "max_x |p(d|x) - p(d)| = " << format_number(fv.marginal_gap) << " after " << fv.restarts
                      << " restarts\n";
        std::cout << "induced diagram:\n" << render_verdict(v);
    }
    return 0;
}

// Verifies a built-in fixture, then postselects random models with that structure.
int demo_structure(const std::string& name, std::uint64_t seed, bool json) {
    const auto v = verify_any(fixture_spec(name));
    const int n = 20;
    double max_chsh = -4, max_residual = 0;
    int local = 0;
    for (int i = 0; i < n; ++i) {
        Rng item(derive_seed(seed, static_cast<std::uint64_t>(i)));
        const auto jm = name == "fig4" ? random_fig4_joint(item) : random_fig2c_joint(item);
        const auto post = postselect(jm);
        const auto r = is_local(post);
        local += r.local;
        max_residual = std::max(max_residual, r.residual);
        max_chsh = std::max(max_chsh, evaluate_functional(post, chsh()));
    }
    if (json) {
        auto j = report_header("demo", seed);
        j["demo"] = name;
        j["verdict"] = verdict_to_json(v);
        j["models"] = n;
        j["local"] = local;
        j["max_chsh"] = max_chsh;
        j["max_residual"] = max_residual;
        emit(j);
    } else {
        std::cout << render_verdict(v);
        std::cout << local << "/" << n << " random models with this structure stay local after postselection, max CHSH "
                  << format_number(max_chsh) << '\n';
    }
    return 0;
}

int demo_franson(bool json) {
    const auto v = verify_fsa(fixture_spec("franson"));
    if (json) {
        auto j = report_header("demo");
        j["demo"] = "franson";
        j["verdict"] = verdict_to_json(v);
        emit(j);
    } else {
        std::cout << render_verdict(v);
    }
    return 0;
}

int demo_ghz_hybrid(std::uint64_t seed, bool json) {
    using std::numbers::pi;
    const auto v = verify_fsa_hybrid(fixture_spec("fig3"));
    const auto ghz = ghz_behavior({{pi, -pi / 2}, {0, pi / 2}, {3 * pi / 4, -3 * pi / 4}});
    const auto svet = svetlichny3();
    const double value = evaluate_functional(ghz, svet);
    const double bound = hybrid_bound(svet);
    double max_hybrid = -8;
    const int n = 20;
    for (int i = 0; i < n; ++i) {
        Rng item(derive_seed(seed, static_cast<std::uint64_t>(i)));
        max_hybrid = std::max(max_hybrid, evaluate_functional(postselect_hybrid(random_fig3_joint(item)), svet));
    }
    if (json) {
        auto j = report_header("demo", seed);
        j["demo"] = "ghz-hybrid";
        j["verdict"] = verdict_to_json(v);
        j["ghz_svetlichny"] = value;
        j["hybrid_bound"] = bound;
        j["max_postselected_hybrid"] = max_hybrid;
        emit(j);
    } else {
        std::cout << render_verdict(v);
        std::cout << "GHZ Svetlichny value " << format_number(value) << " vs hybrid bound " << format_number(bound)
                  << '\n';
        std::cout << "max over " << n << " postselected hybrid models: " << format_number(max_hybrid) << '\n';
    }
    return 0;
}

int cmd_demo(const std::string& name, std::uint64_t seed, bool json) {
    if (name == "pearle") return demo_fake(DemoKind::PrFilter, seed, json);
    if (name == "marginal-fair") return demo_fake(DemoKind::MarginalFair, seed, json);
    if (name == "franson") return demo_franson(json);
    if (name == "fig2c" || name == "fig4") return demo_structure(name, seed, json);
    if (name == "ghz-hybrid") return demo_ghz_hybrid(seed, json);
    throw Error(ErrorCode::FormatError, "unknown demo '" + name + "'");
}

int cmd_sweep(const std::string& variant, int n, std::uint64_t seed, bool json) {
    const auto r = safety_sweep(variant_from_string(variant), n, seed);
    if (json) {
        auto j = report_header("sweep", seed);
        j["report"] = sweep_to_json(r);
        emit(j);
    } else {
        std::cout << render_sweep(r);
    }
    return r.all_local() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Causal checks of fair-sampling postselection in Bell tests"};
    app.require_subcommand(1);
    bool json = false;
    std::string file, name, variant;
    std::uint64_t seed = kDefaultSeed;
    bool post = false;
    double tol = 1e-9;
    int n = 500;

    auto* check = app.add_subcommand("check", "verify a diagram (exit 0 safe, 2 unsafe, 3 obstruction)");
    check->add_option("diagram", file, "diagram file")->required();
    check->add_flag("--json", json, "structured output");

    auto* simulate = app.add_subcommand("simulate", "print the behavior of a model file");
    simulate->add_option("model", file, "model file")->required();
    simulate->add_flag("--postselect", post, "condition on K = 1");
    simulate->add_option("--seed", seed, "seed recorded in the report");
    simulate->add_flag("--json", json, "structured output");

    auto* local = app.add_subcommand("is-local", "LP membership in the local polytope (exit 0 local, 2 nonlocal)");
    local->add_option("behavior", file, "behavior file")->required();
    local->add_option("--tol", tol, "residual tolerance")->check(CLI::PositiveNumber);
    local->add_flag("--json", json, "structured output");

    auto* bell = app.add_subcommand("bell", "evaluate a Bell functional");
    bell->add_option("behavior", file, "behavior file")->required();
    bell->add_option("--functional", name, "chsh | mermin3 | svetlichny3")
        ->required()
        ->check(CLI::IsMember({"chsh", "mermin3", "svetlichny3"}));
    bell->add_flag("--json", json, "structured output");

    auto* demo = app.add_subcommand("demo", "run a built-in example end to end");
    demo->add_option("name", name, "pearle | marginal-fair | franson | fig2c | fig4 | ghz-hybrid")
        ->required()
        ->check(CLI::IsMember({"pearle", "marginal-fair", "franson", "fig2c", "fig4", "ghz-hybrid"}));
    demo->add_option("--seed", seed, "random seed");
    demo->add_flag("--json", json, "structured output");

    auto* sweep = app.add_subcommand("sweep", "detection-efficiency safety sweep (exit 0 all local)");
    sweep->add_option("--variant", variant, "constant | lambda | factorized")
        ->required()
        ->check(CLI::IsMember({"constant", "lambda", "factorized"}));
    sweep->add_option("--n", n, "number of random models")->check(CLI::PositiveNumber);
    sweep->add_option("--seed", seed, "random seed");
    sweep->add_flag("--json", json, "structured output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const auto s = effective_seed(seed);
        if (check->parsed()) return cmd_check(file, json);
        if (simulate->parsed()) return cmd_simulate(file, post, s, json);
        if (local->parsed()) return cmd_is_local(file, tol, json);
        if (bell->parsed()) return cmd_bell(file, name, json);
        if (demo->parsed()) return cmd_demo(name, s, json);
        if (sweep->parsed()) return cmd_sweep(variant, n, s, json);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
