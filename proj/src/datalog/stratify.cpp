#include <algorithm>
#include <deque>
#include <functional>

#include "netinfer/datalog/engine.hpp"

namespace netinfer::dl {

namespace {

std::string join_cycle(const std::vector<std::string>& cycle) {
    std::string out;
    for (std::size_t i = 0; i < cycle.size(); ++i) {
        if (i) out += i == 1 ? " -(not)-> " : " -> ";
        out += cycle[i];
    }
    return out;
}

}  // namespace

UnstratifiableError::UnstratifiableError(std::vector<std::string> cycle)
    : std::runtime_error("program is not stratifiable: recursion through negation: " + join_cycle(cycle)),
      cycle_(std::move(cycle)) {}

DependencyGraph build_dependency_graph(const Program& program) {
    DependencyGraph g;
    for (const auto& rule : program.rules) {
        g.nodes.insert(rule.head.predicate);
        for (const auto& lit : rule.body) {
            g.nodes.insert(lit.predicate);
            g.edges.insert({lit.predicate, rule.head.predicate, lit.negated});
        }
    }
    return g;
}

StratifiedProgram stratify(const Program& program) {
    auto violations = check_safety(program);
    if (!violations.empty()) {
        const auto& v = violations.front();
        throw UnsafeRuleError("unsafe rule " + format_rule(program.rules[v.rule_index]) + ": variable ?" +
                              v.variable + (v.in_negative_literal ? " occurs only in a negated literal"
                                                                  : " does not occur in a positive body literal"));
    }

    DependencyGraph g = build_dependency_graph(program);
    std::vector<std::string> names(g.nodes.begin(), g.nodes.end());
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < names.size(); ++i) index[names[i]] = i;

    std::vector<std::vector<std::pair<std::size_t, bool>>> out_edges(names.size());
    for (const auto& e : g.edges) out_edges[index[e.from]].push_back({index[e.to], e.negative});

    // Tarjan; components come out downstream-first.
    std::vector<int> order(names.size(), -1), low(names.size(), 0), comp(names.size(), -1);
    std::vector<bool> on_stack(names.size(), false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> components;
    int counter = 0;
    std::function<void(std::size_t)> visit = [&](std::size_t v) {
        order[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        for (auto [w, neg] : out_edges[v]) {
            if (order[w] < 0) {
                visit(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], order[w]);
            }
        }
        if (low[v] == order[v]) {
            std::vector<std::size_t> members;
            std::size_t w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                comp[w] = static_cast<int>(components.size());
                members.push_back(w);
            } while (w != v);
            components.push_back(std::move(members));
        }
    };
    for (std::size_t v = 0; v < names.size(); ++v) {
        if (order[v] < 0) visit(v);
    }

    // Negative edge inside a component: report the cycle through it.
    for (const auto& e : g.edges) {
        if (!e.negative) continue;
        std::size_t from = index[e.from], to = index[e.to];
        if (comp[from] != comp[to]) continue;
        std::vector<std::size_t> parent(names.size(), names.size());
        std::deque<std::size_t> queue{to};
        parent[to] = to;
        while (!queue.empty() && parent[from] == names.size()) {
            std::size_t v = queue.front();
            queue.pop_front();
            for (auto [w, neg] : out_edges[v]) {
                if (comp[w] == comp[from] && parent[w] == names.size()) {
                    parent[w] = v;
                    queue.push_back(w);
                }
            }
        }
        std::vector<std::string> path;
        for (std::size_t v = from; v != to; v = parent[v]) path.push_back(names[v]);
        path.push_back(names[to]);
        std::reverse(path.begin(), path.end());
        std::vector<std::string> cycle{names[from]};
        cycle.insert(cycle.end(), path.begin(), path.end());
        throw UnstratifiableError(std::move(cycle));
    }

    std::vector<std::size_t> comp_stratum(components.size(), 0);
    for (std::size_t c = components.size(); c-- > 0;) {
        for (std::size_t v : components[c]) {
            for (auto [w, neg] : out_edges[v]) {
                if (comp[w] == static_cast<int>(c)) continue;
                auto& s = comp_stratum[comp[w]];
                s = std::max(s, comp_stratum[c] + (neg ? 1 : 0));
            }
        }
    }

    StratifiedProgram sp;
    std::size_t max_stratum = 0;
    for (std::size_t v = 0; v < names.size(); ++v) {
        sp.predicate_stratum[names[v]] = comp_stratum[comp[v]];
        max_stratum = std::max(max_stratum, comp_stratum[comp[v]]);
    }
    if (names.empty()) return sp;
    sp.strata.resize(max_stratum + 1);
    for (const auto& rule : program.rules) {
        sp.strata[sp.predicate_stratum[rule.head.predicate]].push_back(rule);
    }
    return sp;
}

}  // namespace netinfer::dl
