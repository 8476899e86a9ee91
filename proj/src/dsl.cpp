#include "fairsample/dsl.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "fairsample/error.hpp"

namespace fairsample {

namespace {

struct Token {
    std::string text;
    int column = 1;
};

struct Pos {
    int line = 1, column = 1;
};

bool is_arrow(std::string_view line, std::size_t i) {
    if (i + 1 >= line.size()) return false;
    const auto two = line.substr(i, 2);
    return two == "->" || two == "--" || two == "~~";
}

std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        if (line[i] == ' ' || line[i] == '\t' || line[i] == '\r') {
            ++i;
            continue;
        }
        if (line[i] == '#') break;
        const std::size_t start = i;
        // arrows are tokens of their own, so `A->B` reads like `A -> B`
        if (is_arrow(line, i)) {
            i += 2;
        } else {
            while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' && line[i] != '#' &&
                   !is_arrow(line, i))
                ++i;
        }
        out.push_back({std::string(line.substr(start, i - start)), static_cast<int>(start) + 1});
    }
    return out;
}

bool valid_name(std::string_view s) {
    if (s.empty()) return false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto c = static_cast<unsigned char>(s[i]);
        const bool ok = c >= 0x80 || c == '_' || (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                        (i > 0 && ((c >= '0' && c <= '9') || c == '\''));
        if (!ok) return false;
    }
    return true;
}

struct EdgeDecl {
    NamePair names;
    Pos pos;
};

class Parser {
public:
    ScenarioSpec run(std::string_view src) {
        int line_no = 0;
        std::size_t start = 0;
        while (start <= src.size()) {
            const auto end = src.find('\n', start);
            const auto line = src.substr(start, end == std::string_view::npos ? src.size() - start : end - start);
            ++line_no;
            statement(line_no, tokenize(line));
            if (end == std::string_view::npos) break;
            start = end + 1;
        }
        last_line_ = line_no;
        return finish();
    }

private:
    [[noreturn]] void fail(ErrorCode c, Pos p, const std::string& msg) const { throw ParseError(c, p.line, p.column, msg); }

    std::string name_at(int line, const Token& t) const {
        if (!valid_name(t.text)) fail(ErrorCode::SyntaxError, {line, t.column}, "invalid name '" + t.text + "'");
        return t.text;
    }

    const Node& declared(int line, const Token& t) const {
        const auto name = name_at(line, t);
        auto it = nodes_.find(name);
        if (it == nodes_.end()) fail(ErrorCode::UnknownNode, {line, t.column}, "node '" + name + "' is not declared");
        return it->second.first;
    }

    static std::optional<std::string> party_arg(std::string_view kind, std::string_view head) {
        if (kind.size() < head.size() + 2 || kind.substr(0, head.size()) != head || kind[head.size()] != '(' ||
            kind.back() != ')')
            return std::nullopt;
        return std::string(kind.substr(head.size() + 1, kind.size() - head.size() - 2));
    }

    void statement(int line, const std::vector<Token>& tk) {
        if (tk.empty()) return;
        const auto& kw = tk[0].text;
        const auto expect_count = [&](std::size_t n, const char* form) {
            if (tk.size() != n)
                fail(ErrorCode::SyntaxError, {line, tk[std::min(tk.size(), n) - 1].column},
                     std::string("expected '") + form + "'");
        };
        if (kw == "node") {
            expect_count(3, "node <name> <kind>");
            node_decl(line, tk[1], tk[2]);
        } else if (kw == "edge" || kw == "biedge" || kw == "nsedge") {
            const char* arrow = kw == "edge" ? "->" : kw == "biedge" ? "--" : "~~";
            expect_count(4, (kw + " <a> " + arrow + " <b>").c_str());
            if (tk[2].text != arrow)
                fail(ErrorCode::SyntaxError, {line, tk[2].column}, std::string("expected '") + arrow + "'");
            edge_decl(line, kw, tk[1], tk[3]);
        } else if (kw == "bell") {
            bell_decl(line, tk);
        } else if (kw == "condition") {
            if (tk.size() < 2) fail(ErrorCode::SyntaxError, {line, tk[0].column}, "expected '<name>=<value>'");
            for (std::size_t i = 1; i < tk.size(); ++i) condition_decl(line, tk[i]);
        } else if (kw == "assume") {
            expect_count(2, "assume lambda-influences-all");
            if (tk[1].text != "lambda-influences-all")
                fail(ErrorCode::SyntaxError, {line, tk[1].column}, "unknown assumption '" + tk[1].text + "'");
            lambda_all_ = true;
        } else {
            fail(ErrorCode::SyntaxError, {line, tk[0].column}, "unknown statement '" + kw + "'");
        }
    }

    void node_decl(int line, const Token& name_tok, const Token& kind_tok) {
        const auto name = name_at(line, name_tok);
        if (nodes_.count(name))
            fail(ErrorCode::DuplicateNode, {line, name_tok.column}, "node '" + name + "' declared twice");
        const auto& k = kind_tok.text;
        NodeKind kind;
        if (k == "setting") {
            kind = NodeKind::setting();
        } else if (auto p = party_arg(k, "setting")) {
            if (!valid_name(*p)) fail(ErrorCode::SyntaxError, {line, kind_tok.column}, "invalid party name");
            kind = NodeKind::setting(*p);
        } else if (auto q = party_arg(k, "outcome")) {
            if (!valid_name(*q)) fail(ErrorCode::SyntaxError, {line, kind_tok.column}, "invalid party name");
            kind = NodeKind::outcome(*q);
        } else if (k == "outcome") {
            fail(ErrorCode::SyntaxError, {line, kind_tok.column}, "outcome nodes need a party: outcome(<party>)");
        } else if (k == "latent") {
            kind = NodeKind::latent();
        } else if (k == "selection") {
            if (selection_)
                fail(ErrorCode::MultipleSelection, {line, name_tok.column}, "second selection node '" + name + "'");
            kind = NodeKind::selection();
            selection_ = name;
        } else {
            fail(ErrorCode::SyntaxError, {line, kind_tok.column}, "unknown node kind '" + k + "'");
        }
        nodes_.emplace(name, std::make_pair(Node{name, kind}, Pos{line, name_tok.column}));
    }

    void edge_decl(int line, const std::string& kw, const Token& a_tok, const Token& b_tok) {
        const auto& a = declared(line, a_tok);
        const auto& b = declared(line, b_tok);
        const Pos pa{line, a_tok.column}, pb{line, b_tok.column};
        if (a.name == b.name) fail(ErrorCode::SyntaxError, pa, "self loop on '" + a.name + "'");
        if (kw == "edge") {
            if (a.kind.is(NodeRole::Selection))
                fail(ErrorCode::EdgeOutOfSelection, pa, "edge out of selection node '" + a.name + "'");
            if (b.kind.is(NodeRole::Setting))
                fail(ErrorCode::EdgeIntoSetting, pb, "edge into setting '" + b.name + "'");
            directed_.push_back({{a.name, b.name}, pa});
        } else if (kw == "biedge") {
            for (const auto* n : {&a, &b})
                if (n->kind.is(NodeRole::Latent))
                    fail(ErrorCode::InvalidBidirected, n == &a ? pa : pb, "bidirected edge on latent '" + n->name + "'");
            bidirected_.push_back({{a.name, b.name}, pa});
        } else {
            if (!a.kind.is(NodeRole::Outcome) || !b.kind.is(NodeRole::Outcome) || a.kind.party == b.kind.party)
                fail(ErrorCode::InvalidNonlocal, pa, "nonlocal edges join outcomes of different parties");
            nonlocal_.push_back({{a.name, b.name}, pa});
        }
    }

    void bell_decl(int line, const std::vector<Token>& tk) {
        // accepts "bell A: x y" and "bell A : x y"
        if (tk.size() < 2) fail(ErrorCode::SyntaxError, {line, tk[0].column}, "expected 'bell <party>: <names>'");
        std::string party = tk[1].text;
        std::size_t first = 2;
        if (!party.empty() && party.back() == ':') {
            party.pop_back();
        } else if (tk.size() > 2 && tk[2].text == ":") {
            first = 3;
        } else {
            fail(ErrorCode::SyntaxError, {line, tk[1].column + static_cast<int>(tk[1].text.size())}, "expected ':'");
        }
        if (!valid_name(party)) fail(ErrorCode::SyntaxError, {line, tk[1].column}, "invalid party name");
        if (bell_.count(party)) fail(ErrorCode::SyntaxError, {line, tk[1].column}, "bell outcomes of '" + party + "' declared twice");
        if (first >= tk.size()) fail(ErrorCode::SyntaxError, {line, tk.back().column}, "bell line lists no outcomes");
        auto& names = bell_[party];
        for (std::size_t i = first; i < tk.size(); ++i) {
            const auto& n = declared(line, tk[i]);
            if (!n.kind.is(NodeRole::Outcome) || n.kind.party != party)
                fail(ErrorCode::RoleConflict, {line, tk[i].column}, "'" + n.name + "' is not an outcome of party '" + party + "'");
            names.push_back(n.name);
        }
    }

    void condition_decl(int line, const Token& t) {
        const auto eq = t.text.find('=');
        if (eq == std::string::npos) fail(ErrorCode::SyntaxError, {line, t.column}, "expected '<name>=<value>'");
        const Token name_tok{t.text.substr(0, eq), t.column};
        const auto& n = declared(line, name_tok);
        if (!n.kind.is(NodeRole::Outcome))
            fail(ErrorCode::RoleConflict, {line, t.column}, "conditioning on '" + n.name + "', which is not an outcome");
        const auto value = t.text.substr(eq + 1);
        int v = 0;
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc() || ptr != value.data() + value.size() || v < 0)
            fail(ErrorCode::SyntaxError, {line, t.column + static_cast<int>(eq) + 1}, "expected a non-negative integer");
        if (conditions_.count(n.name))
            fail(ErrorCode::SyntaxError, {line, t.column}, "'" + n.name + "' conditioned twice");
        conditions_[n.name] = v;
        condition_pos_ = Pos{line, t.column};
    }

    static std::vector<NamePair> names_of(const std::vector<EdgeDecl>& e, std::size_t count) {
        std::vector<NamePair> out;
        for (std::size_t i = 0; i < count; ++i) out.push_back(e[i].names);
        return out;
    }

    ScenarioSpec finish() {
        const Pos eof{last_line_, 1};
        if (nodes_.empty()) fail(ErrorCode::SyntaxError, eof, "no nodes declared");
        std::vector<Node> nodes;
        for (const auto& [name, entry] : nodes_) nodes.push_back(entry.first);
        CausalDiagram d;
        try {
            d = build_diagram(nodes, names_of(directed_, directed_.size()), names_of(bidirected_, bidirected_.size()),
                              names_of(nonlocal_, nonlocal_.size()));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::CycleDetected) throw;
            // locate the first edge that closes a cycle
            for (std::size_t n = 1; n <= directed_.size(); ++n) {
                try {
                    build_diagram(nodes, names_of(directed_, n));
                } catch (const Error& inner) {
                    if (inner.code() == ErrorCode::CycleDetected) fail(ErrorCode::CycleDetected, directed_[n - 1].pos, inner.what());
                }
            }
            throw;
        }
        if (selection_ && !conditions_.empty())
            fail(ErrorCode::RoleConflict, condition_pos_, "direct conditioning cannot be combined with a selection node");
        Selection sel = selection_ ? Selection{SelectionNode{*selection_}} : Selection{DirectConditioning{conditions_}};
        try {
            return make_scenario(std::move(d), bell_, std::move(sel), lambda_all_);
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            fail(e.code(), eof, e.what());
        }
    }

    std::map<std::string, std::pair<Node, Pos>> nodes_;
    std::vector<EdgeDecl> directed_, bidirected_, nonlocal_;
    std::map<PartyId, std::vector<NodeId>> bell_;
    std::map<NodeId, int> conditions_;
    Pos condition_pos_;
    std::optional<NodeId> selection_;
    bool lambda_all_ = false;
    int last_line_ = 1;
};

}  // namespace

ScenarioSpec parse_diagram(std::string_view src) { return Parser().run(src); }

ScenarioSpec load_diagram(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error(ErrorCode::FormatError, "cannot read '" + file.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_diagram(ss.str());
}

std::string serialize_diagram(const ScenarioSpec& spec) {
    const auto& d = spec.diagram;
    std::ostringstream out;
    for (const auto& n : d.nodes()) {
        out << "node " << n.name << ' ';
        switch (n.kind.role) {
            case NodeRole::Setting: out << (n.kind.party.empty() ? "setting" : "setting(" + n.kind.party + ")"); break;
            case NodeRole::Outcome: out << "outcome(" << n.kind.party << ")"; break;
            case NodeRole::Latent: out << "latent"; break;
            case NodeRole::Selection: out << "selection"; break;
        }
        out << '\n';
    }
    for (const auto& [a, b] : d.directed_names()) out << "edge " << a << " -> " << b << '\n';
    for (const auto& [a, b] : d.bidirected_names()) out << "biedge " << a << " -- " << b << '\n';
    for (const auto& [a, b] : d.nonlocal_names()) out << "nsedge " << a << " ~~ " << b << '\n';
    for (const auto& [party, names] : spec.bell) {
        out << "bell " << party << ':';
        for (const auto& n : names) out << ' ' << n;
        out << '\n';
    }
    if (const auto* dc = std::get_if<DirectConditioning>(&spec.selection)) {
        out << "condition";
        for (const auto& [n, v] : dc->values) out << ' ' << n << '=' << v;
        out << '\n';
    }
    if (spec.lambda_influences_all) out << "assume lambda-influences-all\n";
    return out.str();
}

}  // namespace fairsample
