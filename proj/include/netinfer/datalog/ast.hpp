#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace netinfer::dl {

/// A ground value. Integers order before strings; within a kind the natural
/// ordering applies, which gives every fact collection a total order.
using Constant = std::variant<std::int64_t, std::string>;

std::string to_string(const Constant& c);

struct Variable {
    std::string name;  // without the leading '?'

    auto operator<=>(const Variable&) const = default;
    bool operator==(const Variable&) const = default;
};

class Term {
public:
    Term() = default;

    static Term var(std::string name) { return Term(Variable{std::move(name)}); }
    static Term str(std::string value) { return Term(Constant{std::move(value)}); }
    static Term integer(std::int64_t value) { return Term(Constant{value}); }
    static Term constant(Constant c) { return Term(std::move(c)); }

    bool is_variable() const { return std::holds_alternative<Variable>(value_); }
    bool is_constant() const { return !is_variable(); }

    const Variable& variable() const { return std::get<Variable>(value_); }
    const Constant& constant() const { return std::get<Constant>(value_); }

    auto operator<=>(const Term&) const = default;
    bool operator==(const Term&) const = default;

private:
    explicit Term(Variable v) : value_(std::move(v)) {}
    explicit Term(Constant c) : value_(std::move(c)) {}

    std::variant<Variable, Constant> value_;
};

struct Literal {
    std::string predicate;
    std::vector<Term> args;
    bool negated = false;

    std::size_t arity() const { return args.size(); }
    bool is_ground() const;
    /// Variables in order of first occurrence.
    std::vector<std::string> variables() const;

    auto operator<=>(const Literal&) const = default;
    bool operator==(const Literal&) const = default;
};

/// Convenience constructor for ground facts with string arguments.
Literal make_fact(std::string predicate, std::vector<std::string> args);

struct Rule {
    Literal head;
    std::vector<Literal> body;

    auto operator<=>(const Rule&) const = default;
    bool operator==(const Rule&) const = default;
};

struct Program {
    std::vector<Rule> rules;
    std::vector<Literal> facts;

    bool empty() const { return rules.empty() && facts.empty(); }
    /// Appends another program, keeping rules structurally unique.
    void merge(const Program& other);

    bool operator==(const Program&) const = default;
};

struct SafetyViolation {
    std::size_t rule_index;
    std::string variable;
    bool in_negative_literal;  // false: head variable, true: negated body literal

    bool operator==(const SafetyViolation&) const = default;
};

/// Every head variable and every variable of a negated literal must also occur
/// in a positive body literal. Returns one entry per (rule, variable) offence.
std::vector<SafetyViolation> check_safety(const Program& program);

std::string format_term(const Term& t);
std::string format_literal(const Literal& lit);
std::string format_rule(const Rule& rule);
/// Facts first, then rules; one clause per line. Re-parses to an equal Program.
std::string format_program(const Program& program);

}  // namespace netinfer::dl
