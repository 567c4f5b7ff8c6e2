#include <algorithm>
#include <atomic>
#include <thread>

#include "netinfer/datalog/engine.hpp"

namespace netinfer::dl {

namespace {

/// Working copy holding only live base facts, plus the id mapping back.
struct Workspace {
    FactStore result;
    FactStore work;
    std::vector<FactId> to_result;  // work id -> result id, for the base prefix

    explicit Workspace(const FactStore& store) : result(store.base_only()) {
        work = result.filtered([&](FactId id) { return !result.is_outdated(id); });
        for (FactId id = 0; id < result.size(); ++id) {
            if (!result.is_outdated(id)) to_result.push_back(id);
        }
    }

    /// Copies every fact derived in `work` into `result`.
    FactStore finish() {
        result.symbols() = work.symbols();
        std::vector<std::size_t> rel_map(work.relation_count());
        for (std::size_t r = 0; r < work.relation_count(); ++r) {
            const Relation& rel = work.relation(r);
            rel_map[r] = result.ensure_relation(rel.name(), rel.arity());
        }
        std::vector<FactId> map = to_result;
        map.resize(work.size());
        std::vector<std::size_t> row_of(work.size());
        std::vector<std::size_t> rel_of(work.size());
        for (std::size_t r = 0; r < work.relation_count(); ++r) {
            const Relation& rel = work.relation(r);
            for (std::size_t row = 0; row < rel.rows(); ++row) {
                rel_of[rel.fact_id(row)] = r;
                row_of[rel.fact_id(row)] = row;
            }
        }
        std::vector<FactId> sup;
        for (FactId id = static_cast<FactId>(to_result.size()); id < work.size(); ++id) {
            sup.clear();
            for (FactId s : work.supports(id)) sup.push_back(map[s]);
            const Relation& rel = work.relation(rel_of[id]);
            auto placed = result.insert_derived(rel_map[rel_of[id]], rel.row(row_of[id]), sup);
            // Every work-derived tuple is absent or outdated in result, so it is placed.
            map[id] = *placed;
        }
        return std::move(result);
    }
};

// ---------------------------------------------------------------------------
// Naive evaluation: backtracking over full scans with named bindings.

using Bindings = std::map<std::string, Symbol>;

struct NaiveRule {
    const Rule* rule;
    std::size_t head_rel;
    std::vector<std::size_t> body_rel;
};

bool scan_contains(const Relation& rel, const std::vector<Symbol>& tuple) {
    for (std::size_t r = 0; r < rel.rows(); ++r) {
        auto row = rel.row(r);
        if (std::equal(row.begin(), row.end(), tuple.begin(), tuple.end())) return true;
    }
    return false;
}

void naive_match(const NaiveRule& nr, FactStore& store, std::size_t i, Bindings& b, std::vector<FactId>& sup,
                 std::vector<std::pair<std::vector<Symbol>, std::vector<FactId>>>& out) {
    const Rule& rule = *nr.rule;
    auto resolve = [&](const Term& t) -> Symbol {
        if (t.is_constant()) return store.symbols().intern(t.constant());
        return b.at(t.variable().name);
    };
    if (i == rule.body.size()) {
        // negated literals are checked last, when every variable is bound
        for (std::size_t k = 0; k < rule.body.size(); ++k) {
            const Literal& lit = rule.body[k];
            if (!lit.negated) continue;
            std::vector<Symbol> tuple;
            for (const auto& t : lit.args) tuple.push_back(resolve(t));
            if (scan_contains(store.relation(nr.body_rel[k]), tuple)) return;
        }
        std::vector<Symbol> head;
        for (const auto& t : rule.head.args) head.push_back(resolve(t));
        out.emplace_back(std::move(head), sup);
        return;
    }
    const Literal& lit = rule.body[i];
    if (lit.negated) {
        naive_match(nr, store, i + 1, b, sup, out);
        return;
    }
    const Relation& rel = store.relation(nr.body_rel[i]);
    const std::size_t rows = rel.rows();
    for (std::size_t r = 0; r < rows; ++r) {
        auto tuple = rel.row(r);
        Bindings saved = b;
        bool ok = true;
        for (std::size_t a = 0; a < lit.args.size() && ok; ++a) {
            const Term& t = lit.args[a];
            if (t.is_constant()) {
                ok = store.symbols().intern(t.constant()) == tuple[a];
            } else {
                auto [it, inserted] = b.emplace(t.variable().name, tuple[a]);
                ok = inserted || it->second == tuple[a];
            }
        }
        if (ok) {
            sup.push_back(rel.fact_id(r));
            naive_match(nr, store, i + 1, b, sup, out);
            sup.pop_back();
        }
        b = std::move(saved);
    }
}

// ---------------------------------------------------------------------------
// Semi-naive evaluation over compiled join plans.

// Check compares with a slot bound by an earlier literal, Repeat with one bound
// earlier in the same literal (so it cannot drive an index lookup).
enum class ArgKind : std::uint8_t { Const, Check, Repeat, Bind };

struct ArgPlan {
    ArgKind kind;
    std::uint32_t value;  // symbol for Const, slot otherwise
};

struct StepPlan {
    std::size_t rel;
    bool negated;
    std::size_t body_index;  // position in the source rule
    std::vector<ArgPlan> args;
    std::size_t support_pos = 0;  // slot in the support tuple, positive steps only
};

struct RulePlan {
    std::size_t head_rel;
    std::vector<ArgPlan> head;  // Const or Check
    std::vector<StepPlan> steps;
    std::size_t slots = 0;
    std::size_t positives = 0;
};

RulePlan compile(const Rule& rule, FactStore& store) {
    RulePlan plan;
    std::map<std::string, std::uint32_t> slot;
    std::set<std::string> bound_here;  // variables first bound by the literal being compiled
    auto arg_plan = [&](const Term& t, std::set<std::string>& bound_now) -> ArgPlan {
        if (t.is_constant()) return {ArgKind::Const, store.symbols().intern(t.constant())};
        const auto& name = t.variable().name;
        auto [it, inserted] = slot.emplace(name, static_cast<std::uint32_t>(slot.size()));
        if (bound_now.insert(name).second) {
            bound_here.insert(name);
            return {ArgKind::Bind, it->second};
        }
        return {bound_here.contains(name) ? ArgKind::Repeat : ArgKind::Check, it->second};
    };

    std::set<std::string> bound;
    std::vector<bool> placed(rule.body.size(), false);
    auto place_ready_negations = [&]() {
        for (std::size_t k = 0; k < rule.body.size(); ++k) {
            const Literal& lit = rule.body[k];
            if (!lit.negated || placed[k]) continue;
            auto vars = lit.variables();
            if (!std::all_of(vars.begin(), vars.end(), [&](const std::string& v) { return bound.contains(v); })) {
                continue;
            }
            StepPlan step{store.ensure_relation(lit.predicate, lit.arity()), true, k, {}};
            for (const auto& t : lit.args) step.args.push_back(arg_plan(t, bound));
            plan.steps.push_back(std::move(step));
            placed[k] = true;
        }
    };
    place_ready_negations();
    for (std::size_t k = 0; k < rule.body.size(); ++k) {
        const Literal& lit = rule.body[k];
        if (lit.negated) continue;
        StepPlan step{store.ensure_relation(lit.predicate, lit.arity()), false, k, {}};
        bound_here.clear();
        for (const auto& t : lit.args) step.args.push_back(arg_plan(t, bound));
        bound_here.clear();
        step.support_pos = plan.positives++;
        plan.steps.push_back(std::move(step));
        placed[k] = true;
        place_ready_negations();
    }
    plan.head_rel = store.ensure_relation(rule.head.predicate, rule.head.arity());
    for (const auto& t : rule.head.args) plan.head.push_back(arg_plan(t, bound));
    plan.slots = slot.size();
    return plan;
}

struct RowRange {
    std::size_t begin;
    std::size_t end;
};

/// Output of one rule firing: flattened head tuples and their supports.
/// Holds each tuple once, keeping its first derivation.
struct Derivations {
    std::size_t rel = 0;
    std::size_t arity = 0;
    std::size_t support_width = 0;
    std::size_t count = 0;
    std::vector<Symbol> tuples;
    std::vector<FactId> supports;

    /// Appends the tuple unless it was already emitted.
    bool add(std::span<const Symbol> tuple, std::span<const FactId> sup) {
        if ((count + 1) * 2 > slots_.size()) rehash(std::max<std::size_t>(16, slots_.size() * 2));
        std::size_t mask = slots_.size() - 1;
        std::size_t i = hash(tuple) & mask;
        for (; slots_[i] != kEmpty; i = (i + 1) & mask) {
            if (std::equal(tuple.begin(), tuple.end(), tuples.begin() + slots_[i] * arity)) return false;
        }
        slots_[i] = static_cast<std::uint32_t>(count);
        tuples.insert(tuples.end(), tuple.begin(), tuple.end());
        supports.insert(supports.end(), sup.begin(), sup.end());
        ++count;
        return true;
    }

private:
    static constexpr std::uint32_t kEmpty = 0xffffffffu;

    static std::size_t hash(std::span<const Symbol> tuple) {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (Symbol s : tuple) h = (h ^ s) * 0x100000001b3ull;
        return static_cast<std::size_t>(h ^ (h >> 29));
    }

    void rehash(std::size_t capacity) {
        slots_.assign(capacity, kEmpty);
        std::size_t mask = capacity - 1;
        for (std::uint32_t k = 0; k < count; ++k) {
            std::size_t i = hash({tuples.data() + k * arity, arity}) & mask;
            while (slots_[i] != kEmpty) i = (i + 1) & mask;
            slots_[i] = k;
        }
    }

    std::vector<std::uint32_t> slots_;
};

class Join {
public:

    Join(const RulePlan& plan, const FactStore& store, std::vector<RowRange> ranges, Derivations& out)
        : plan_(plan),
          store_(store),
          head_rel_(store.relation(plan.head_rel)),
          ranges_(std::move(ranges)),
          out_(out),
          binding_(plan.slots),
          support_(plan.positives),
          head_(plan.head.size()),
          steps_(plan.steps.size()) {
        for (const auto& a : plan_.head) head_source_.push_back(a.kind == ArgKind::Const ? &a.value : &binding_[a.value]);
        out_.rel = plan.head_rel;
        out_.arity = plan.head.size();
        out_.support_width = plan.positives;
    }

    void run() { step(0); }

private:
    void step(std::size_t i) {
        if (i == steps_) {
            emit();
            return;
        }
        const StepPlan& s = plan_.steps[i];
        const Relation& rel = store_.relation(s.rel);
        if (s.negated) {
            probe_.clear();
            for (const auto& a : s.args) probe_.push_back(a.kind == ArgKind::Const ? a.value : binding_[a.value]);
            if (!rel.find(probe_)) step(i + 1);
            return;
        }
        RowRange range = ranges_[i];
        range.end = std::min(range.end, rel.rows());
        if (range.begin >= range.end) return;

        Bucket bucket;
        bool indexed = false;
        for (std::size_t c = 0; c < s.args.size(); ++c) {
            const auto& a = s.args[c];
            if (a.kind == ArgKind::Bind || a.kind == ArgKind::Repeat) continue;
            auto candidate = rel.lookup(c, a.kind == ArgKind::Const ? a.value : binding_[a.value]);
            if (!indexed || candidate.size() < bucket.size()) {
                bucket = candidate;
                indexed = true;
            }
        }
        if (indexed) {
            for (std::size_t k = bucket.lower_bound(static_cast<std::uint32_t>(range.begin));
                 k < bucket.size() && bucket.row(k) < range.end; ++k) {
                try_row(i, rel, bucket.row(k), bucket.tuple(k));
            }
        } else {
            for (std::size_t r = range.begin; r < range.end; ++r) try_row(i, rel, r, rel.row(r));
        }
    }

    // Known tuples would be rejected by merge anyway.
    void emit() {
        Symbol* head = head_.data();
        const Symbol* const* source = head_source_.data();
        for (std::size_t k = 0, n = head_.size(); k < n; ++k) head[k] = *source[k];
        if (!head_rel_.find(head_, head_cache_)) out_.add(head_, support_);
    }

    void try_row(std::size_t i, const Relation& rel, std::size_t r, std::span<const Symbol> tuple) {
        const StepPlan& s = plan_.steps[i];
        // Bind in order; a Repeat refers to a slot bound earlier in this literal.
        const ArgPlan* args = s.args.data();
        const Symbol* row = tuple.data();
        Symbol* binding = binding_.data();
        for (std::size_t c = 0, n = s.args.size(); c < n; ++c) {
            switch (args[c].kind) {
                case ArgKind::Const:
                    if (row[c] != args[c].value) return;
                    break;
                case ArgKind::Check:
                case ArgKind::Repeat:
                    if (row[c] != binding[args[c].value]) return;
                    break;
                case ArgKind::Bind:
                    binding[args[c].value] = row[c];
                    break;
            }
        }
        support_[s.support_pos] = rel.fact_id(r);
        if (i + 1 == steps_) {
            emit();
        } else {
            step(i + 1);
        }
    }

    const RulePlan& plan_;
    const FactStore& store_;
    const Relation& head_rel_;
    std::vector<RowRange> ranges_;
    Derivations& out_;
    std::vector<Symbol> binding_;
    std::vector<FactId> support_;
    std::vector<Symbol> probe_;
    std::vector<Symbol> head_;
    std::vector<const Symbol*> head_source_;
    Relation::LookupCache head_cache_;
    std::size_t steps_;
};

struct Task {
    const RulePlan* plan;
    std::vector<RowRange> ranges;
};

std::vector<Derivations> run_tasks(const std::vector<Task>& tasks, const FactStore& store, unsigned threads) {
    std::vector<Derivations> results(tasks.size());
    auto work = [&](std::size_t t) { Join(*tasks[t].plan, store, tasks[t].ranges, results[t]).run(); };
    if (threads <= 1 || tasks.size() <= 1) {
        for (std::size_t t = 0; t < tasks.size(); ++t) work(t);
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    unsigned n = std::min<unsigned>(threads, static_cast<unsigned>(tasks.size()));
    for (unsigned w = 0; w < n; ++w) {
        pool.emplace_back([&] {
            for (std::size_t t = next++; t < tasks.size(); t = next++) work(t);
        });
    }
    for (auto& th : pool) th.join();
    return results;
}

/// Inserts results in task order. Returns true if anything new was stored.
bool merge(FactStore& store, const std::vector<Derivations>& results) {
    bool changed = false;
    for (const auto& d : results) {
        for (std::size_t k = 0; k < d.count; ++k) {
            std::span<const Symbol> tuple(d.tuples.data() + k * d.arity, d.arity);
            std::span<const FactId> sup(d.supports.data() + k * d.support_width, d.support_width);
            if (store.insert_derived(d.rel, tuple, sup)) changed = true;
        }
    }
    return changed;
}

}  // namespace

FactStore evaluate_naive(const StratifiedProgram& program, const FactStore& store) {
    Workspace ws(store);
    FactStore& work = ws.work;
    for (const auto& stratum : program.strata) {
        std::vector<NaiveRule> rules;
        for (const auto& rule : stratum) {
            NaiveRule nr{&rule, work.ensure_relation(rule.head.predicate, rule.head.arity()), {}};
            for (const auto& lit : rule.body) nr.body_rel.push_back(work.ensure_relation(lit.predicate, lit.arity()));
            rules.push_back(std::move(nr));
        }
        bool changed = true;
        while (changed) {
            changed = false;
            std::vector<std::vector<std::pair<std::vector<Symbol>, std::vector<FactId>>>> found(rules.size());
            for (std::size_t i = 0; i < rules.size(); ++i) {
                Bindings b;
                std::vector<FactId> sup;
                naive_match(rules[i], work, 0, b, sup, found[i]);
            }
            for (std::size_t i = 0; i < rules.size(); ++i) {
                for (const auto& [tuple, sup] : found[i]) {
                    if (work.insert_derived(rules[i].head_rel, tuple, sup)) changed = true;
                }
            }
        }
    }
    return ws.finish();
}

FactStore evaluate_seminaive(const StratifiedProgram& program, const FactStore& store, const EvalOptions& options) {
    Workspace ws(store);
    FactStore& work = ws.work;
    for (const auto& stratum : program.strata) {
        if (stratum.empty()) continue;
        std::vector<RulePlan> plans;
        plans.reserve(stratum.size());
        for (const auto& rule : stratum) plans.push_back(compile(rule, work));

        std::set<std::size_t> recursive;
        for (const auto& p : plans) recursive.insert(p.head_rel);

        auto full = [&](const RulePlan& p) {
            std::vector<RowRange> ranges;
            for (const auto& s : p.steps) ranges.push_back({0, work.relation(s.rel).rows()});
            return ranges;
        };

        std::vector<std::size_t> before(work.relation_count());
        auto snapshot = [&] {
            before.resize(work.relation_count());
            for (std::size_t r = 0; r < work.relation_count(); ++r) before[r] = work.relation(r).rows();
        };

        std::vector<Task> tasks;
        for (const auto& p : plans) tasks.push_back({&p, full(p)});
        snapshot();
        std::vector<std::size_t> delta_begin = before;
        bool changed = merge(work, run_tasks(tasks, work, options.threads));

        while (changed) {
            std::vector<std::size_t> delta_end(work.relation_count());
            for (std::size_t r = 0; r < work.relation_count(); ++r) delta_end[r] = work.relation(r).rows();

            tasks.clear();
            for (const auto& p : plans) {
                for (std::size_t i = 0; i < p.steps.size(); ++i) {
                    const StepPlan& s = p.steps[i];
                    if (s.negated || !recursive.contains(s.rel)) continue;
                    if (delta_begin[s.rel] == delta_end[s.rel]) continue;
                    std::vector<RowRange> ranges;
                    for (std::size_t j = 0; j < p.steps.size(); ++j) {
                        std::size_t rel = p.steps[j].rel;
                        if (j == i) {
                            ranges.push_back({delta_begin[rel], delta_end[rel]});
                        } else if (j < i && recursive.contains(rel) && !p.steps[j].negated) {
                            ranges.push_back({0, delta_begin[rel]});
                        } else {
                            ranges.push_back({0, delta_end[rel]});
                        }
                    }
                    tasks.push_back({&p, std::move(ranges)});
                }
            }
            delta_begin = delta_end;
            changed = merge(work, run_tasks(tasks, work, options.threads));
        }
    }
    return ws.finish();
}

FactStore evaluate(const Program& program, FactStore store, const EvalOptions& options) {
    StratifiedProgram sp = stratify(program);
    for (const auto& f : program.facts) store.insert(f, Origin::Discovered);
    return evaluate_seminaive(sp, store, options);
}

}  // namespace netinfer::dl
