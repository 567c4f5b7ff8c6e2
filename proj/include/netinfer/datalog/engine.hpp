#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "netinfer/datalog/ast.hpp"
#include "netinfer/datalog/fact_store.hpp"

namespace netinfer::dl {

struct DependencyEdge {
    std::string from;  // body predicate
    std::string to;    // head predicate
    bool negative;

    auto operator<=>(const DependencyEdge&) const = default;
};

/// Predicate dependency graph. An edge q->p is negative iff q occurs negated in
/// some rule with head p; a pair used both ways yields two edges.
struct DependencyGraph {
    std::set<std::string> nodes;
    std::set<DependencyEdge> edges;
};

DependencyGraph build_dependency_graph(const Program& program);

/// Rules grouped so every negated predicate is complete before it is read.
/// Stratum 0 may be empty (only base predicates).
struct StratifiedProgram {
    std::vector<std::vector<Rule>> strata;
    std::map<std::string, std::size_t> predicate_stratum;

    std::size_t size() const { return strata.size(); }
};

class UnstratifiableError : public std::runtime_error {
public:
    explicit UnstratifiableError(std::vector<std::string> cycle);
    /// Predicates on the offending cycle; the first edge (cycle[0] -> cycle[1]) is negative.
    const std::vector<std::string>& cycle() const { return cycle_; }

private:
    std::vector<std::string> cycle_;
};

class UnsafeRuleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Assigns each predicate the smallest stratum consistent with its
/// dependencies. Throws UnsafeRuleError if the program fails check_safety and
/// UnstratifiableError on recursion through negation.
StratifiedProgram stratify(const Program& program);

struct EvalOptions {
    /// Worker threads for rule firings within one iteration. 1 = sequential.
    unsigned threads = 1;
};

/// Least model by naive iteration: every rule over every fact until nothing
/// new appears. Serves as the reference evaluator. Prior derived facts in
/// `store` are discarded; outdated base facts do not take part.
FactStore evaluate_naive(const StratifiedProgram& program, const FactStore& store);

/// Same least model as evaluate_naive; each recursive join reads at least one
/// fact produced in the previous iteration.
FactStore evaluate_seminaive(const StratifiedProgram& program, const FactStore& store,
                             const EvalOptions& options = {});

/// Convenience: stratify, load program facts as discovered base facts on top of
/// `store`, and run the semi-naive evaluator.
FactStore evaluate(const Program& program, FactStore store = {}, const EvalOptions& options = {});

}  // namespace netinfer::dl
