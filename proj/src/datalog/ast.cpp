#include "netinfer/datalog/ast.hpp"

#include <algorithm>
#include <unordered_set>

namespace netinfer::dl {

namespace {

std::string quote(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    out.push_back('"');
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out.push_back(c);
        }
    }
    out.push_back('"');
    return out;
}

}  // namespace

std::string to_string(const Constant& c) {
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    return std::get<std::string>(c);
}

bool Literal::is_ground() const {
    return std::none_of(args.begin(), args.end(), [](const Term& t) { return t.is_variable(); });
}

std::vector<std::string> Literal::variables() const {
    std::vector<std::string> vars;
    for (const auto& t : args) {
        if (t.is_variable() && std::find(vars.begin(), vars.end(), t.variable().name) == vars.end()) {
            vars.push_back(t.variable().name);
        }
    }
    return vars;
}

Literal make_fact(std::string predicate, std::vector<std::string> args) {
    Literal lit;
    lit.predicate = std::move(predicate);
    lit.args.reserve(args.size());
    for (auto& a : args) lit.args.push_back(Term::str(std::move(a)));
    return lit;
}

void Program::merge(const Program& other) {
    std::set<Rule> seen(rules.begin(), rules.end());
    for (const auto& r : other.rules) {
        if (seen.insert(r).second) rules.push_back(r);
    }
    facts.insert(facts.end(), other.facts.begin(), other.facts.end());
}

std::vector<SafetyViolation> check_safety(const Program& program) {
    std::vector<SafetyViolation> out;
    for (std::size_t i = 0; i < program.rules.size(); ++i) {
        const Rule& rule = program.rules[i];
        std::unordered_set<std::string> bound;
        for (const auto& lit : rule.body) {
            if (lit.negated) continue;
            for (auto& v : lit.variables()) bound.insert(v);
        }
        std::set<std::string> reported;
        for (const auto& v : rule.head.variables()) {
            if (!bound.contains(v) && reported.insert(v).second) out.push_back({i, v, false});
        }
        for (const auto& lit : rule.body) {
            if (!lit.negated) continue;
            for (const auto& v : lit.variables()) {
                if (!bound.contains(v) && reported.insert(v).second) out.push_back({i, v, true});
            }
        }
    }
    return out;
}

std::string format_term(const Term& t) {
    if (t.is_variable()) return "?" + t.variable().name;
    const auto& c = t.constant();
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    return quote(std::get<std::string>(c));
}

std::string format_literal(const Literal& lit) {
    std::string out = lit.negated ? "not " : "";
    out += lit.predicate;
    if (lit.args.empty()) return out;
    out.push_back('(');
    for (std::size_t i = 0; i < lit.args.size(); ++i) {
        if (i) out += ", ";
        out += format_term(lit.args[i]);
    }
    out.push_back(')');
    return out;
}

std::string format_rule(const Rule& rule) {
    std::string out = format_literal(rule.head) + " :- ";
    for (std::size_t i = 0; i < rule.body.size(); ++i) {
        if (i) out += ", ";
        out += format_literal(rule.body[i]);
    }
    out.push_back('.');
    return out;
}

std::string format_program(const Program& program) {
    std::string out;
    for (const auto& f : program.facts) {
        out += format_literal(f);
        out += ".\n";
    }
    for (const auto& r : program.rules) {
        out += format_rule(r);
        out.push_back('\n');
    }
    return out;
}

}  // namespace netinfer::dl
