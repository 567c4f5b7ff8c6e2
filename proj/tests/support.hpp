#pragma once

// Shared by the unit tests and the acceptance suite: random generators and
// independent oracles.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "netinfer/datalog/ast.hpp"
#include "netinfer/datalog/fact_store.hpp"
#include "netinfer/datalog/parser.hpp"
#include "netinfer/inference/pipeline.hpp"

namespace testsupport {

using namespace netinfer;

// The published rule texts, without the additions the bundled files make.
inline const char* kEquivalenceRules = R"(
same_sys(?sys_id1, ?sys_id2) :-
    same_sys_disc(?sys_id1, ?sys_id2).
same_sys(?sys_id1, ?sys_id2) :-
    same_sys(?sys_id1, ?sys_id3),
    same_sys(?sys_id3, ?sys_id2).

same_host(?host_id1, ?host_id2) :-
    runs_on_disc(?sys_id1, ?host_id1),
    runs_on_disc(?sys_id2, ?host_id2),
    same_sys(?sys_id1, ?sys_id2).
)";

inline const char* kOutgoingFlowRule = R"(
msg_flow(?sys_id_snd, ?sys_id_recv) :-
    outgoing_disc(?sys_id_snd, ?RCONF),
    recv_disc(?RCONF, ?sys_id_recv).
)";

inline const char* kHostFlowRule = R"(
msg_flow_host(?host_id_send, ?host_id_recv) :-
    runs_on_disc(?sys_id_snd, ?host_id_send),
    outgoing_disc(?sys_id_snd, ?RCONF),
    recv_host_disc(?RCONF, ?host_id_recv).
)";

inline const char* kIFlowRule = R"(
iflow(?sys_id_snd, ?sys_id_recv, ?sys_id_mw, ?URI) :-
    msg_flow_disc(?sys_id_snd, ?sys_id_mw, ?URI),
    msg_flow_disc(?sys_id_mw, ?sys_id_recv, ?URI).
)";

inline std::vector<dl::Literal> facts(const std::string& text) { return dl::parse_fact_file(text); }

inline dl::FactStore store_of(const std::string& text) {
    dl::FactStore s;
    for (const auto& f : facts(text)) s.insert(f, dl::Origin::Discovered);
    return s;
}

inline std::set<std::string> formatted(const std::vector<dl::Literal>& lits) {
    std::set<std::string> out;
    for (const auto& l : lits) out.insert(dl::format_literal(l));
    return out;
}

// ---------------------------------------------------------------------------
// Random programs: at most 6 predicates and 200 facts. Negated literals are
// placed freely; callers skip the unstratifiable draws.

struct RandomProgram {
    dl::Program program;
    std::vector<dl::Literal> facts;
};

class ProgramGenerator {
public:
    explicit ProgramGenerator(std::uint64_t seed) : rng_(seed) {}

    RandomProgram next(bool allow_negation) {
        std::size_t n_preds = 2 + pick(5);  // 2..6
        std::size_t n_base = 1 + pick(std::min<std::size_t>(n_preds - 1, 2));
        names_.clear();
        arities_.clear();
        for (std::size_t i = 0; i < n_preds; ++i) {
            names_.push_back((i < n_base ? "e" : "p") + std::to_string(i));
            arities_.push_back(1 + pick(3));
        }
        std::size_t n_constants = 3 + pick(6);
        RandomProgram out;
        for (std::size_t i = n_base; i < n_preds; ++i) {
            std::size_t n_rules = 1 + pick(3);
            for (std::size_t r = 0; r < n_rules; ++r) out.program.rules.push_back(rule(i, n_preds, n_constants, allow_negation));
        }
        std::size_t n_facts = pick(201);
        for (std::size_t k = 0; k < n_facts; ++k) {
            // mostly base facts, some seeded into derived predicates
            std::size_t p = pick(10) < 8 ? pick(n_base) : pick(n_preds);
            dl::Literal f{names_[p], {}, false};
            for (std::size_t a = 0; a < arities_[p]; ++a) f.args.push_back(constant(n_constants));
            out.facts.push_back(std::move(f));
        }
        return out;
    }

private:
    std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

    dl::Term constant(std::size_t n) {
        std::size_t c = pick(n);
        if (c % 3 == 0) return dl::Term::integer(static_cast<std::int64_t>(c) - 2);
        return dl::Term::str("c" + std::to_string(c));
    }

    dl::Rule rule(std::size_t head, std::size_t n_preds, std::size_t n_constants, bool allow_negation) {
        static const std::vector<std::string> vars{"X", "Y", "Z", "W"};
        dl::Rule r;
        std::size_t n_body = 1 + pick(3);
        std::vector<std::string> bound;
        for (std::size_t b = 0; b < n_body; ++b) {
            std::size_t p = pick(n_preds);
            dl::Literal lit{names_[p], {}, false};
            for (std::size_t a = 0; a < arities_[p]; ++a) {
                if (pick(8) == 0) {
                    lit.args.push_back(constant(n_constants));
                } else {
                    const std::string& v = vars[pick(vars.size())];
                    lit.args.push_back(dl::Term::var(v));
                    bound.push_back(v);
                }
            }
            r.body.push_back(std::move(lit));
        }
        if (allow_negation && pick(3) == 0) {
            std::size_t p = pick(n_preds);
            dl::Literal lit{names_[p], {}, true};
            for (std::size_t a = 0; a < arities_[p]; ++a) {
                if (bound.empty() || pick(6) == 0) lit.args.push_back(constant(n_constants));
                else lit.args.push_back(dl::Term::var(bound[pick(bound.size())]));
            }
            r.body.push_back(std::move(lit));
        }
        r.head = {names_[head], {}, false};
        for (std::size_t a = 0; a < arities_[head]; ++a) {
            if (bound.empty() || pick(8) == 0) r.head.args.push_back(constant(n_constants));
            else r.head.args.push_back(dl::Term::var(bound[pick(bound.size())]));
        }
        return r;
    }

    std::mt19937_64 rng_;
    std::vector<std::string> names_;
    std::vector<std::size_t> arities_;
};

// ---------------------------------------------------------------------------
// Equivalence oracle: plain boolean matrices, no union-find.

using Matrix = std::vector<std::vector<bool>>;

/// Symmetric-transitive closure of the given pairs over ids 0..n-1. A pair
/// (i, i) holds only if i takes part in some edge.
inline Matrix closure(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    Matrix m(n, std::vector<bool>(n, false));
    for (auto [a, b] : edges) {
        m[a][b] = true;
        m[b][a] = true;
    }
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!m[i][k]) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (m[k][j]) m[i][j] = true;
            }
        }
    }
    return m;
}

/// One random equivalence case: same_sys_disc, same_host_disc and runs_on_disc
/// facts over at most `max_ids` ids, checked against the matrix closure.
/// Returns an empty string when both partitions agree with the oracle.
inline std::string check_equivalence_case(std::uint64_t seed, std::size_t max_ids = 50) {
    std::mt19937_64 rng(seed);
    auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
    std::size_t n_sys = 1 + pick(max_ids);
    std::size_t n_host = 1 + pick(max_ids);
    auto sys = [](std::size_t i) { return "s" + std::to_string(i); };
    auto host = [](std::size_t i) { return "h" + std::to_string(i); };

    std::vector<std::pair<std::size_t, std::size_t>> sys_edges, host_edges, runs_on;
    for (std::size_t k = pick(n_sys * 2); k > 0; --k) sys_edges.emplace_back(pick(n_sys), pick(n_sys));
    for (std::size_t k = pick(n_host); k > 0; --k) host_edges.emplace_back(pick(n_host), pick(n_host));
    for (std::size_t k = pick(n_sys * 2); k > 0; --k) runs_on.emplace_back(pick(n_sys), pick(n_host));

    std::vector<dl::Literal> in;
    for (auto [a, b] : sys_edges) in.push_back(dl::make_fact("same_sys_disc", {sys(a), sys(b)}));
    for (auto [a, b] : host_edges) in.push_back(dl::make_fact("same_host_disc", {host(a), host(b)}));
    for (auto [s, h] : runs_on) in.push_back(dl::make_fact("runs_on_disc", {sys(s), host(h)}));
    for (std::size_t i = 0; i < n_sys; ++i) in.push_back(dl::make_fact("system_disc", {sys(i), "uri:" + sys(i)}));

    Matrix sys_m = closure(n_sys, sys_edges);
    // hosts of two systems related by same_sys are the same host
    auto derived = host_edges;
    for (auto [s1, h1] : runs_on) {
        for (auto [s2, h2] : runs_on) {
            if (sys_m[s1][s2]) derived.emplace_back(h1, h2);
        }
    }
    Matrix host_m = closure(n_host, derived);

    auto store = infer::make_store(in);
    auto parts = infer::step1_equivalences(infer::evaluate_equivalences(store));
    auto compare = [&](const infer::Partition& p, const Matrix& m, auto name, std::size_t n) -> std::string {
        for (std::size_t i = 0; i < n; ++i) {
            if (!p.contains(name(i))) continue;
            if (p.canonical(p.canonical(name(i))) != p.canonical(name(i))) return "canonical not idempotent";
            for (std::size_t j = 0; j < n; ++j) {
                if (!p.contains(name(j))) continue;
                bool expect = i == j || m[i][j];
                if (p.equivalent(name(i), name(j)) != expect) {
                    return "seed " + std::to_string(seed) + ": " + name(i) + " ~ " + name(j) + " expected " +
                           (expect ? "true" : "false");
                }
            }
        }
        return {};
    };
    if (auto e = compare(parts.systems, sys_m, sys, n_sys); !e.empty()) return e;
    return compare(parts.hosts, host_m, host, n_host);
}

// ---------------------------------------------------------------------------
// DOT grammar checker for the subset of the language the exporter may emit:
//   graph     := ("graph" | "digraph") ID? "{" stmt* "}"
//   stmt      := (attr_stmt | edge_stmt | node_stmt | ID "=" ID) ";"?
//   attr_stmt := ("graph" | "node" | "edge") attr_list
//   node_stmt := ID attr_list?
//   edge_stmt := ID ("->" | "--") ID (("->" | "--") ID)* attr_list?
//   attr_list := "[" (ID "=" ID ("," | ";")?)* "]"

class DotChecker {
public:
    /// Empty string when `text` is valid, otherwise a description of the first error.
    static std::string check(const std::string& text) {
        try {
            DotChecker c(text);
            c.graph();
        } catch (const std::string& e) {
            return e;
        }
        return {};
    }

private:
    enum class Tok { Id, Keyword, Punct, Edge, End };
    struct Token {
        Tok kind;
        std::string text;
    };

    explicit DotChecker(const std::string& text) { tokenize(text); }

    void tokenize(const std::string& s) {
        static const std::set<std::string> keywords{"graph", "digraph", "node", "edge", "strict", "subgraph"};
        std::size_t i = 0;
        while (i < s.size()) {
            char c = s[i];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++i;
            } else if (c == '"') {
                std::string v;
                ++i;
                for (;;) {
                    if (i >= s.size()) throw_at("unterminated string");
                    if (s[i] == '\\' && i + 1 < s.size()) {
                        v += s.substr(i, 2);
                        i += 2;
                        continue;
                    }
                    if (s[i] == '"') break;
                    v.push_back(s[i++]);
                }
                ++i;
                toks_.push_back({Tok::Id, v});
            } else if (c == '-' && i + 1 < s.size() && (s[i + 1] == '>' || s[i + 1] == '-')) {
                toks_.push_back({Tok::Edge, s.substr(i, 2)});
                i += 2;
            } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-') {
                std::size_t j = i;
                while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == '.' ||
                                        s[j] == '-')) {
                    ++j;
                }
                std::string w = s.substr(i, j - i);
                toks_.push_back({keywords.contains(w) ? Tok::Keyword : Tok::Id, w});
                i = j;
            } else if (std::string("{}[]=;,").find(c) != std::string::npos) {
                toks_.push_back({Tok::Punct, std::string(1, c)});
                ++i;
            } else {
                throw_at(std::string("unexpected character '") + c + "'");
            }
        }
        toks_.push_back({Tok::End, ""});
    }

    [[noreturn]] static void throw_at(const std::string& msg) { throw msg; }

    const Token& peek() const { return toks_[pos_]; }
    bool is(Tok k, const std::string& t = {}) const { return peek().kind == k && (t.empty() || peek().text == t); }
    void expect(Tok k, const std::string& t = {}) {
        if (!is(k, t)) throw_at("expected '" + t + "' near '" + peek().text + "'");
        ++pos_;
    }

    void graph() {
        if (is(Tok::Keyword, "graph")) directed_ = false;
        else if (is(Tok::Keyword, "digraph")) directed_ = true;
        else throw_at("expected graph or digraph");
        ++pos_;
        if (is(Tok::Id)) ++pos_;
        expect(Tok::Punct, "{");
        while (!is(Tok::Punct, "}")) {
            if (is(Tok::End)) throw_at("missing '}'");
            statement();
        }
        ++pos_;
        if (!is(Tok::End)) throw_at("content after closing brace");
    }

    void statement() {
        if (is(Tok::Keyword, "graph") || is(Tok::Keyword, "node") || is(Tok::Keyword, "edge")) {
            ++pos_;
            attr_list();
        } else {
            expect(Tok::Id);
            if (is(Tok::Punct, "=")) {
                ++pos_;
                expect(Tok::Id);
            } else {
                bool edge = false;
                while (is(Tok::Edge)) {
                    if ((peek().text == "->") != directed_) throw_at("edge operator does not match graph kind");
                    ++pos_;
                    expect(Tok::Id);
                    edge = true;
                }
                (void)edge;
                if (is(Tok::Punct, "[")) attr_list();
            }
        }
        if (is(Tok::Punct, ";")) ++pos_;
    }

    void attr_list() {
        expect(Tok::Punct, "[");
        while (!is(Tok::Punct, "]")) {
            expect(Tok::Id);
            expect(Tok::Punct, "=");
            expect(Tok::Id);
            if (is(Tok::Punct, ",") || is(Tok::Punct, ";")) ++pos_;
        }
        ++pos_;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    bool directed_ = true;
};

}  // namespace testsupport
