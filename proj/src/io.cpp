#include "fairsample/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "fairsample/error.hpp"

namespace fairsample {

namespace {

[[noreturn]] void format_error(const std::string& m) { throw Error(ErrorCode::FormatError, m); }

std::string format_double(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s = buf;
    if (s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
}

bool scalar(const Json& j) { return !j.is_array() && !j.is_object(); }

void dump(const Json& j, std::string& out, int depth) {
    const std::string pad(static_cast<std::size_t>(depth + 1) * 2, ' ');
    const std::string close_pad(static_cast<std::size_t>(depth) * 2, ' ');
    if (j.is_object()) {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {  // std::map keeps keys sorted
            if (!first) out += ",\n";
            first = false;
            out += pad + Json(it.key()).dump() + ": ";
            dump(it.value(), out, depth + 1);
        }
        out += "\n" + close_pad + "}";
    } else if (j.is_array()) {
        if (j.empty()) {
            out += "[]";
            return;
        }
        const bool flat = std::all_of(j.begin(), j.end(), scalar);
        out += flat ? "[" : "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) out += flat ? ", " : ",\n";
            if (!flat) out += pad;
            dump(j[i], out, depth + 1);
        }
        out += flat ? "]" : "\n" + close_pad + "]";
    } else if (j.is_number_float()) {
        out += format_double(j.get<double>());
    } else {
        out += j.dump();
    }
}

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) format_error(std::string("missing field '") + key + "'");
    return j.at(key);
}

void check_version(const Json& j) {
    const auto& v = field(j, "format_version");
    if (!v.is_number_integer() || v.get<int>() != kFormatVersion)
        format_error("unsupported format_version " + v.dump());
}

int positive_int(const Json& j, const char* key) {
    const auto& v = field(j, key);
    if (!v.is_number_integer() || v.get<long long>() < 1 || v.get<long long>() > 1'000'000)
        format_error(std::string("field '") + key + "' must be a positive integer");
    return v.get<int>();
}

struct PartyShape {
    PartyDims dims;
    int aux = 1;
};

std::vector<PartyShape> parse_parties(const Json& j, bool with_aux) {
    const auto& ps = field(j, "parties");
    if (!ps.is_array() || ps.empty()) format_error("'parties' must be a non-empty array");
    std::vector<PartyShape> out;
    for (const auto& p : ps) {
        PartyShape s;
        s.dims = {positive_int(p, "settings"), positive_int(p, "outcomes")};
        if (with_aux && p.contains("aux")) s.aux = positive_int(p, "aux");
        if (s.dims.outcomes % s.aux != 0) format_error("outcomes must be a multiple of aux");
        out.push_back(s);
    }
    return out;
}

Dims dims_of(const std::vector<PartyShape>& ps) {
    std::vector<PartyDims> d;
    for (const auto& p : ps) d.push_back(p.dims);
    return Dims(d);
}

std::vector<double> probability_array(const Json& j, std::size_t expected, const std::string& what) {
    if (!j.is_array() || j.size() != expected)
        format_error("'" + what + "' must be an array of " + std::to_string(expected) + " probabilities");
    std::vector<double> out;
    out.reserve(expected);
    for (const auto& v : j) {
        const double p = parse_probability(v);
        if (p < -kLoadTolerance || p > 1 + kLoadTolerance) throw Error(ErrorCode::InvalidModel, what + ": probability outside [0,1]");
        out.push_back(std::clamp(p, 0.0, 1.0));
    }
    return out;
}

// Re-validates a distribution against the load tolerance, then rescales it.
void renormalize(double* p, std::size_t n, const std::string& what) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += p[i];
    if (std::abs(s - 1.0) > kLoadTolerance)
        throw Error(ErrorCode::InvalidModel, what + " sums to " + format_double(s));
    for (std::size_t i = 0; i < n; ++i) p[i] /= s;
}

Json probability_json(const std::vector<double>& v) {
    Json a = Json::array();
    for (double p : v) a.push_back(format_probability(p));
    return a;
}

Json parties_json(const Dims& d, const std::vector<int>* aux) {
    Json a = Json::array();
    for (std::size_t p = 0; p < d.parties(); ++p) {
        Json e{{"settings", d[p].settings}, {"outcomes", d[p].outcomes}};
        if (aux) e["aux"] = (*aux)[p];
        a.push_back(e);
    }
    return a;
}

std::vector<double> parse_weights(const Json& j) {
    const auto& w = field(j, "weights");
    if (!w.is_array() || w.empty()) format_error("'weights' must be a non-empty array");
    auto out = probability_array(w, w.size(), "weights");
    renormalize(out.data(), out.size(), "weights");
    return out;
}

// Acceptance tables over the raw behavior layout, shared or one per λ.
KRule parse_accept(const Json& j, const Dims& raw, std::size_t lambdas) {
    if (!j.contains("accept")) return {};
    const auto& a = j.at("accept");
    if (!a.is_array() || (a.size() != 1 && a.size() != lambdas))
        format_error("'accept' must hold one table or one per hidden-variable value");
    auto tables = std::make_shared<std::vector<std::vector<double>>>();
    for (const auto& t : a) tables->push_back(probability_array(t, raw.size(), "accept"));
    return [tables, raw](std::size_t l, std::span<const int> o, std::span<const int> x) {
        const auto& t = tables->size() == 1 ? tables->front() : (*tables)[l];
        return t[raw.encode_settings(x) * raw.outcome_count() + raw.encode_outcomes(o)];
    };
}

Json accept_json(const KRule& rule, const Dims& raw, std::size_t lambdas) {
    std::vector<std::vector<double>> tables;
    for (std::size_t l = 0; l < lambdas; ++l) {
        std::vector<double> t(raw.size());
        for (std::size_t s = 0; s < raw.setting_count(); ++s) {
            const auto x = raw.settings_of(s);
            for (std::size_t o = 0; o < raw.outcome_count(); ++o)
                t[s * raw.outcome_count() + o] = rule(l, raw.outcomes_of(o), x);
        }
        tables.push_back(std::move(t));
    }
    const bool shared = std::all_of(tables.begin(), tables.end(), [&](const auto& t) { return t == tables.front(); });
    Json out = Json::array();
    if (shared && !tables.empty()) {
        out.push_back(probability_json(tables.front()));
    } else {
        for (const auto& t : tables) out.push_back(probability_json(t));
    }
    return out;
}

}  // namespace

std::string stable_dump(const Json& j) {
    std::string out;
    dump(j, out, 0);
    out += '\n';
    return out;
}

double parse_probability(const Json& v) {
    if (v.is_number()) return v.get<double>();
    if (!v.is_string()) format_error("probability must be a decimal string, got " + v.dump());
    const auto& s = v.get_ref<const std::string&>();
    double d = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(d))
        format_error("cannot parse probability '" + s + "'");
    return d;
}

std::string format_probability(double p) { return format_double(p); }

BehaviorTable behavior_from_json(const Json& j) {
    check_version(j);
    if (j.contains("kind") && j.at("kind") != "behavior") format_error("expected kind 'behavior'");
    BehaviorTable b(dims_of(parse_parties(j, false)));
    b.p = probability_array(field(j, "p"), b.dims.size(), "p");
    const auto oc = b.dims.outcome_count();
    for (std::size_t s = 0; s < b.dims.setting_count(); ++s)
        renormalize(&b.p[s * oc], oc, "behavior block " + std::to_string(s));
    return b;
}

Json behavior_to_json(const BehaviorTable& b) {
    return Json{{"format_version", kFormatVersion},
                {"kind", "behavior"},
                {"parties", parties_json(b.dims, nullptr)},
                {"p", probability_json(b.p)}};
}

namespace {

JointModel lhv_from_json(const Json& j) {
    const auto parties = parse_parties(j, true);
    const Dims raw = dims_of(parties);
    JointModel m;
    m.model.weights = parse_weights(j);
    const auto L = m.model.weights.size();
    const auto& rs = field(j, "responses");
    if (!rs.is_array() || rs.size() != parties.size()) format_error("'responses' needs one entry per party");
    for (std::size_t p = 0; p < parties.size(); ++p) {
        const auto& pd = parties[p].dims;
        ResponseTable t(L, pd.settings, pd.outcomes);
        if (!rs[p].is_array() || rs[p].size() != L) format_error("responses: one table per hidden-variable value");
        for (std::size_t l = 0; l < L; ++l) {
            const auto& byx = rs[p][l];
            if (!byx.is_array() || byx.size() != static_cast<std::size_t>(pd.settings))
                format_error("responses: one distribution per setting");
            for (int x = 0; x < pd.settings; ++x) {
                auto row = probability_array(byx[x], static_cast<std::size_t>(pd.outcomes), "responses");
                renormalize(row.data(), row.size(), "response distribution");
                for (int a = 0; a < pd.outcomes; ++a) t(l, x, a) = row[a];
            }
        }
        m.model.responses.push_back(std::move(t));
        m.aux.push_back(parties[p].aux);
    }
    m.accept = parse_accept(j, raw, L);
    m.model.validate();
    return m;
}

HybridJoint hybrid_from_json(const Json& j) {
    const auto parties = parse_parties(j, true);
    HybridJoint h;
    h.model.dims = dims_of(parties);
    h.model.weights = parse_weights(j);
    for (const auto& p : parties) h.aux.push_back(p.aux);
    const auto& bs = field(j, "branches");
    if (!bs.is_array() || bs.size() != h.model.weights.size()) format_error("'branches' needs one entry per weight");
    const auto n = h.model.dims.parties();
    for (const auto& bj : bs) {
        HybridBranch b;
        const auto& pr = field(bj, "pair");
        if (!pr.is_array() || pr.size() != 2 || !pr[0].is_number_unsigned() || !pr[1].is_number_unsigned())
            format_error("'pair' must hold two party indices");
        b.pair = {pr[0].get<std::size_t>(), pr[1].get<std::size_t>()};
        if (b.pair.first >= b.pair.second || b.pair.second >= n) format_error("'pair' must be increasing party indices");
        b.pair_behavior = BehaviorTable(Dims({h.model.dims[b.pair.first], h.model.dims[b.pair.second]}));
        b.pair_behavior.p = probability_array(field(bj, "pair_behavior"), b.pair_behavior.dims.size(), "pair_behavior");
        const auto oc = b.pair_behavior.dims.outcome_count();
        for (std::size_t s = 0; s < b.pair_behavior.dims.setting_count(); ++s)
            renormalize(&b.pair_behavior.p[s * oc], oc, "pair behavior block");
        const auto& ls = field(bj, "locals");
        if (!ls.is_array() || ls.size() != n - 2) format_error("'locals' needs one entry per remaining party");
        std::size_t k = 0;
        for (std::size_t p = 0; p < n; ++p) {
            if (p == b.pair.first || p == b.pair.second) continue;
            const auto& pd = h.model.dims[p];
            if (!ls[k].is_array() || ls[k].size() != static_cast<std::size_t>(pd.settings))
                format_error("locals: one distribution per setting");
            std::vector<std::vector<double>> table;
            for (int x = 0; x < pd.settings; ++x) {
                auto row = probability_array(ls[k][x], static_cast<std::size_t>(pd.outcomes), "locals");
                renormalize(row.data(), row.size(), "local distribution");
                table.push_back(std::move(row));
            }
            b.locals.push_back(std::move(table));
            ++k;
        }
        h.model.branches.push_back(std::move(b));
    }
    h.accept = parse_accept(j, h.model.dims, h.model.weights.size());
    // renormalized pair behaviors may still signal beyond round-off
    h.model.validate(kLoadTolerance);
    return h;
}

}  // namespace

LoadedModel model_from_json(const Json& j) {
    check_version(j);
    const auto& kind = field(j, "kind");
    if (kind == "lhv") return lhv_from_json(j);
    if (kind == "hybrid") return hybrid_from_json(j);
    format_error("unknown model kind " + kind.dump());
}

Json model_to_json(const JointModel& m) {
    const Dims raw = m.model.dims();
    const auto L = m.model.weights.size();
    Json responses = Json::array();
    for (const auto& r : m.model.responses) {
        Json per_l = Json::array();
        for (std::size_t l = 0; l < L; ++l) {
            Json per_x = Json::array();
            for (int x = 0; x < r.settings(); ++x) {
                std::vector<double> row;
                for (int a = 0; a < r.outcomes(); ++a) row.push_back(r(l, x, a));
                per_x.push_back(probability_json(row));
            }
            per_l.push_back(per_x);
        }
        responses.push_back(per_l);
    }
    Json j{{"format_version", kFormatVersion},
           {"kind", "lhv"},
           {"parties", parties_json(raw, &m.aux)},
           {"weights", probability_json(m.model.weights)},
           {"responses", responses}};
    if (m.accept) j["accept"] = accept_json(m.accept, raw, L);
    return j;
}

Json model_to_json(const HybridJoint& m) {
    const auto& h = m.model;
    Json branches = Json::array();
    for (const auto& b : h.branches) {
        Json locals = Json::array();
        for (const auto& t : b.locals) {
            Json per_x = Json::array();
            for (const auto& row : t) per_x.push_back(probability_json(row));
            locals.push_back(per_x);
        }
        branches.push_back(Json{{"pair", {b.pair.first, b.pair.second}},
                                {"pair_behavior", probability_json(b.pair_behavior.p)},
                                {"locals", locals}});
    }
    Json j{{"format_version", kFormatVersion},
           {"kind", "hybrid"},
           {"parties", parties_json(h.dims, &m.aux)},
           {"weights", probability_json(h.weights)},
           {"branches", branches}};
    if (m.accept) j["accept"] = accept_json(m.accept, h.dims, h.weights.size());
    return j;
}

Json read_json_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) format_error("cannot read '" + file.string() + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        format_error(file.string() + ": " + e.what());
    }
}

BehaviorTable load_behavior(const std::filesystem::path& file) { return behavior_from_json(read_json_file(file)); }

LoadedModel load_model(const std::filesystem::path& file) { return model_from_json(read_json_file(file)); }

}  // namespace fairsample
