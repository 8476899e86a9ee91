#include "fairsample/report.hpp"

#include <cstdio>
#include <sstream>

namespace fairsample {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

Json report_header(const std::string& command, std::optional<std::uint64_t> seed) {
    Json j{{"tool", "fairsample"}, {"version", kToolVersion}, {"format_version", kFormatVersion}, {"command", command}};
    if (seed) j["seed"] = *seed;
    return j;
}

Json path_verdict_to_json(const PathVerdict& v) {
    Json colliders = Json::array();
    for (const auto& c : v.colliders) colliders.push_back({{"collider", c.collider}, {"opened_by", c.opened_by}});
    return Json{{"path", render_path(v.path)},
                {"nodes", v.path.nodes},
                {"status", v.status == PathStatus::Open ? "open" : "blocked"},
                {"reason", v.reason ? Json(to_string(*v.reason)) : Json()},
                {"blocking_node", v.blocking_node ? Json(*v.blocking_node) : Json()},
                {"colliders", colliders}};
}

namespace {

Json check_json(bool ok, const std::optional<PathVerdict>& w) {
    return Json{{"ok", ok}, {"witness", w ? path_verdict_to_json(*w) : Json()}};
}

}  // namespace

Json verdict_to_json(const FsaVerdict& v) {
    Json added = Json::array();
    for (const auto& [a, b] : v.added_edges) added.push_back({a, b});
    return Json{{"safe", v.safe},
                {"classification", to_string(v.classification)},
                {"hybrid", v.hybrid},
                {"exit_code", verdict_code(v)},
                {"ci", check_json(v.ci_ok, v.ci_witness)},
                {"cii", check_json(v.cii_ok, v.cii_witness)},
                {"obstruction", v.obstruction},
                {"pruned", v.pruned},
                {"added_edges", added},
                {"resolutions_checked", v.resolutions_checked},
                {"notes", v.notes}};
}

Json sweep_to_json(const SweepReport& r) {
    return Json{{"variant", to_string(r.variant)},
                {"n_models", r.n_models},
                {"n_local", r.n_local},
                {"n_classified_within", r.n_classified_within},
                {"all_local", r.all_local()},
                {"max_chsh", r.max_chsh},
                {"max_residual", r.max_residual},
                {"min_acceptance", r.min_acceptance}};
}

Json locality_to_json(const LocalityResult& r) {
    Json j{{"local", r.local}, {"residual", r.residual}};
    Json w = Json::array();
    for (const auto& [i, x] : r.weights) w.push_back({{"vertex", i}, {"weight", x}});
    j["weights"] = w;
    if (r.certificate) {
        j["certificate"] = {{"coefficients", r.certificate->coefficients},
                            {"value", r.certificate->value},
                            {"local_bound", r.certificate->local_bound}};
    }
    return j;
}

std::string render_verdict(const FsaVerdict& v) {
    std::ostringstream out;
    out << "verdict: " << (v.safe ? "safe" : "unsafe") << " (" << to_string(v.classification) << ")"
        << (v.hybrid ? ", hybrid diagram" : "") << '\n';
    out << "CI  latents independent of the settings given the postselection: " << (v.ci_ok ? "holds" : "fails") << '\n';
    if (v.ci_witness) out << "    open path: " << render_path(v.ci_witness->path) << '\n';
    out << "CII parties factorize given the latents and the postselection: " << (v.cii_ok ? "holds" : "fails") << '\n';
    if (v.cii_witness) out << "    open path: " << render_path(v.cii_witness->path) << '\n';
    if (!v.obstruction.empty()) {
        out << "obstruction: bell outcomes that also decide the postselection:";
        for (const auto& n : v.obstruction) out << ' ' << n;
        out << '\n';
    }
    out << "resolutions checked: " << v.resolutions_checked << '\n';
    for (const auto& n : v.notes) out << "note: " << n << '\n';
    return out.str();
}

std::string render_behavior(const BehaviorTable& b) {
    const auto& d = b.dims;
    std::ostringstream out;
    const auto digits = [](const std::vector<int>& v) {
        std::string s;
        for (int x : v) s += std::to_string(x);
        return s;
    };
    out << "x\\a";
    for (std::size_t o = 0; o < d.outcome_count(); ++o) out << '\t' << digits(d.outcomes_of(o));
    out << '\n';
    for (std::size_t s = 0; s < d.setting_count(); ++s) {
        out << digits(d.settings_of(s));
        for (std::size_t o = 0; o < d.outcome_count(); ++o) out << '\t' << format_number(b.at(s, o));
        out << '\n';
    }
    return out.str();
}

std::string render_sweep(const SweepReport& r) {
    std::ostringstream out;
    out << "variant " << to_string(r.variant) << ", " << r.n_models << " models, seed " << r.seed << '\n'
        << "local: " << r.n_local << "/" << r.n_models << '\n'
        << "max CHSH: " << format_number(r.max_chsh) << '\n'
        << "max LP residual: " << format_number(r.max_residual) << '\n'
        << "min acceptance: " << format_number(r.min_acceptance) << '\n';
    return out.str();
}

}  // namespace fairsample
