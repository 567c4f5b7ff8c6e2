#include <gtest/gtest.h>

#include <random>

#include "netinfer/datalog/engine.hpp"
#include "netinfer/datalog/fact_store.hpp"
#include "netinfer/datalog/parser.hpp"
#include "support.hpp"

using namespace netinfer::dl;
using testsupport::facts;
using testsupport::formatted;
using testsupport::store_of;

namespace {

std::set<std::string> derived(const FactStore& s) { return formatted(s.derived_facts()); }

std::set<std::string> derived(const Program& p, const std::string& fact_text) {
    return derived(evaluate_seminaive(stratify(p), store_of(fact_text)));
}

}  // namespace

// ---------------------------------------------------------------------------
// Dependency graph and stratification

TEST(DependencyGraph, EquivalenceRules) {
    auto g = build_dependency_graph(parse_program(testsupport::kEquivalenceRules));
    std::set<DependencyEdge> edges(g.edges.begin(), g.edges.end());
    std::set<DependencyEdge> expected{{"same_sys_disc", "same_sys", false},
                                      {"same_sys", "same_sys", false},
                                      {"runs_on_disc", "same_host", false},
                                      {"same_sys", "same_host", false}};
    EXPECT_EQ(edges, expected);
}

TEST(DependencyGraph, Empty) {
    auto g = build_dependency_graph(Program{});
    EXPECT_TRUE(g.nodes.empty());
    EXPECT_TRUE(g.edges.empty());
}

TEST(DependencyGraph, NegativeEdge) {
    auto g = build_dependency_graph(parse_program("p(?x) :- q(?x), not r(?x)."));
    std::set<DependencyEdge> edges(g.edges.begin(), g.edges.end());
    EXPECT_EQ(edges, (std::set<DependencyEdge>{{"q", "p", false}, {"r", "p", true}}));
}

TEST(Stratify, AllPublishedRulesNeedOneStratum) {
    Program p = parse_program(testsupport::kEquivalenceRules);
    p.merge(parse_program(testsupport::kOutgoingFlowRule));
    p.merge(parse_program(testsupport::kHostFlowRule));
    p.merge(parse_program(testsupport::kIFlowRule));
    auto sp = stratify(p);
    std::size_t nonempty = 0;
    for (const auto& s : sp.strata) nonempty += !s.empty();
    EXPECT_EQ(nonempty, 1u);
}

TEST(Stratify, NegativeSelfLoopIsRejected) {
    try {
        stratify(parse_program("p(?x) :- q(?x), not p(?x)."));
        FAIL();
    } catch (const UnstratifiableError& e) {
        EXPECT_EQ(e.cycle(), (std::vector<std::string>{"p", "p"}));
    }
}

TEST(Stratify, LongerNegativeCycleNamed) {
    try {
        stratify(parse_program("a(?x) :- b(?x).\nb(?x) :- c(?x).\nc(?x) :- d(?x), not a(?x)."));
        FAIL();
    } catch (const UnstratifiableError& e) {
        const auto& c = e.cycle();
        ASSERT_GE(c.size(), 2u);
        EXPECT_EQ(c.front(), c.back());
        EXPECT_EQ(c[0], "a");
        EXPECT_EQ(c[1], "c");
    }
}

TEST(Stratify, NegationOverBasePredicateGivesTwoStrata) {
    auto sp = stratify(parse_program("alive(?s) :- system_disc(?s, ?u), not retired_user(?s)."));
    EXPECT_EQ(sp.size(), 2u);
    EXPECT_EQ(sp.predicate_stratum.at("alive"), 1u);
    EXPECT_EQ(sp.predicate_stratum.at("retired_user"), 0u);
}

TEST(Stratify, UnsafeRuleRejected) {
    EXPECT_THROW(stratify(parse_program("p(?x) :- q(?y).")), UnsafeRuleError);
}

TEST(Stratify, InvariantsOnRandomPrograms) {
    testsupport::ProgramGenerator gen(3);
    int checked = 0;
    for (int i = 0; i < 500; ++i) {
        auto rp = gen.next(true);
        StratifiedProgram sp;
        try {
            sp = stratify(rp.program);
        } catch (const UnstratifiableError&) {
            continue;
        }
        ++checked;
        for (std::size_t s = 0; s < sp.strata.size(); ++s) {
            for (const auto& r : sp.strata[s]) {
                EXPECT_EQ(sp.predicate_stratum.at(r.head.predicate), s);
                for (const auto& l : r.body) {
                    std::size_t ls = sp.predicate_stratum.at(l.predicate);
                    if (l.negated) EXPECT_LT(ls, s);
                    else EXPECT_LE(ls, s);
                }
            }
        }
    }
    EXPECT_GT(checked, 200);
}

// ---------------------------------------------------------------------------
// Evaluation

TEST(Evaluate, EquivalenceRulesOnShortChain) {
    auto got = derived(parse_program(testsupport::kEquivalenceRules),
                       "same_sys_disc(\"a\", \"b\"). same_sys_disc(\"b\", \"c\").");
    EXPECT_EQ(got, (std::set<std::string>{R"(same_sys("a", "b"))", R"(same_sys("a", "c"))", R"(same_sys("b", "c"))"}));
}

TEST(Evaluate, EmptyStore) {
    auto p = parse_program(testsupport::kEquivalenceRules);
    EXPECT_TRUE(evaluate_seminaive(stratify(p), FactStore{}).derived_facts().empty());
    EXPECT_TRUE(evaluate_naive(stratify(p), FactStore{}).derived_facts().empty());
}

TEST(Evaluate, ChainClosureMatchesOracle) {
    const std::size_t n = 11;
    std::string text;
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n));
    for (std::size_t i = 0; i + 1 < n; ++i) {
        text += "same_sys_disc(\"x" + std::to_string(i) + "\", \"x" + std::to_string(i + 1) + "\").\n";
        reach[i][i + 1] = true;
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (reach[i][k] && reach[k][j]) reach[i][j] = true;
    std::size_t expected = 0;
    for (const auto& row : reach) expected += std::count(row.begin(), row.end(), true);
    ASSERT_EQ(expected, 55u);

    auto sp = stratify(parse_program(testsupport::kEquivalenceRules));
    auto semi = evaluate_seminaive(sp, store_of(text));
    auto naive = evaluate_naive(sp, store_of(text));
    EXPECT_EQ(semi.live_facts("same_sys").size(), expected);
    EXPECT_EQ(derived(semi), derived(naive));
}

TEST(Evaluate, StratifiedNegation) {
    auto p = parse_program(
        "alive(?s) :- system_disc(?s, ?u), not retired_user(?s).\n"
        "orphan(?s) :- alive(?s), not runs_on_disc(?s, \"h\").");
    auto got = derived(p,
                       "system_disc(\"a\", \"u\"). system_disc(\"b\", \"u\"). system_disc(\"c\", \"u\").\n"
                       "retired_user(\"b\"). runs_on_disc(\"a\", \"h\").");
    EXPECT_EQ(got, (std::set<std::string>{R"(alive("a"))", R"(alive("c"))", R"(orphan("c"))"}));
}

TEST(Evaluate, ConstantsInRulesAndIntegers) {
    auto p = parse_program("big(?x) :- n(?x, 1).\nzero :- n(0, ?y).\nlabel(?x, \"one\") :- big(?x).");
    auto got = derived(p, "n(5, 1). n(0, 2). n(7, 3).");
    EXPECT_EQ(got, (std::set<std::string>{"big(5)", "label(5, \"one\")", "zero"}));
}

TEST(Evaluate, RepeatedVariableInLiteral) {
    auto got = derived(parse_program("loop(?x) :- e(?x, ?x)."), "e(1, 1). e(1, 2). e(2, 2).");
    EXPECT_EQ(got, (std::set<std::string>{"loop(1)", "loop(2)"}));
}

TEST(Evaluate, SupportsPointToWitnesses) {
    auto sp = stratify(parse_program(testsupport::kOutgoingFlowRule));
    auto s = evaluate_seminaive(sp, store_of("outgoing_disc(\"s1\", \"rc\"). recv_disc(\"rc\", \"s2\")."));
    auto id = s.find(make_fact("msg_flow", {"s1", "s2"}));
    ASSERT_TRUE(id);
    auto sup = s.supports(*id);
    std::set<std::string> witnesses;
    for (FactId w : sup) witnesses.insert(format_literal(s.literal(w)));
    EXPECT_EQ(witnesses, (std::set<std::string>{R"(outgoing_disc("s1", "rc"))", R"(recv_disc("rc", "s2"))"}));
    for (FactId f = 0; f < s.size(); ++f) {
        if (!s.is_derived(f)) EXPECT_TRUE(s.supports(f).empty());
    }
}

TEST(Evaluate, Idempotent) {
    testsupport::ProgramGenerator gen(21);
    for (int i = 0; i < 100; ++i) {
        auto rp = gen.next(true);
        StratifiedProgram sp;
        try {
            sp = stratify(rp.program);
        } catch (const UnstratifiableError&) {
            continue;
        }
        FactStore base;
        for (const auto& f : rp.facts) base.insert(f, Origin::Discovered);
        auto once = evaluate_seminaive(sp, base);
        auto twice = evaluate_seminaive(sp, once);
        EXPECT_EQ(formatted(once.live_facts()), formatted(twice.live_facts()));
    }
}

TEST(Evaluate, MonotoneWithoutNegation) {
    testsupport::ProgramGenerator gen(8);
    std::mt19937 rng(8);
    for (int i = 0; i < 100; ++i) {
        auto rp = gen.next(false);
        auto sp = stratify(rp.program);
        FactStore fewer, more;
        for (const auto& f : rp.facts) {
            more.insert(f, Origin::Discovered);
            if (rng() % 4) fewer.insert(f, Origin::Discovered);
        }
        auto small = formatted(evaluate_seminaive(sp, fewer).live_facts());
        auto large = formatted(evaluate_seminaive(sp, more).live_facts());
        EXPECT_TRUE(std::includes(large.begin(), large.end(), small.begin(), small.end()));
    }
}

TEST(Evaluate, NoConstantsInvented) {
    testsupport::ProgramGenerator gen(9);
    for (int i = 0; i < 100; ++i) {
        auto rp = gen.next(true);
        StratifiedProgram sp;
        try {
            sp = stratify(rp.program);
        } catch (const UnstratifiableError&) {
            continue;
        }
        std::set<Constant> known;
        for (const auto& f : rp.facts)
            for (const auto& t : f.args) known.insert(t.constant());
        for (const auto& r : rp.program.rules)
            for (const auto& t : r.head.args)
                if (t.is_constant()) known.insert(t.constant());
        FactStore base;
        for (const auto& f : rp.facts) base.insert(f, Origin::Discovered);
        for (const auto& f : evaluate_seminaive(sp, base).derived_facts())
            for (const auto& t : f.args) EXPECT_TRUE(known.contains(t.constant()));
    }
}

TEST(Evaluate, LowerStrataUnchangedByLaterOnes) {
    auto p = parse_program(
        "r(?x, ?y) :- e(?x, ?y).\nr(?x, ?z) :- r(?x, ?y), e(?y, ?z).\n"
        "nr(?x, ?y) :- v(?x), v(?y), not r(?x, ?y).");
    auto sp = stratify(p);
    auto base = store_of("e(1,2). e(2,3). e(3,1). e(4,5). v(1). v(2). v(3). v(4). v(5).");
    StratifiedProgram lower;
    lower.strata.push_back({});
    for (const auto& stratum : sp.strata) {
        for (const auto& r : stratum)
            if (r.head.predicate == "r") lower.strata.back().push_back(r);
    }
    lower.predicate_stratum = sp.predicate_stratum;
    auto full = evaluate_seminaive(sp, base);
    auto only_r = evaluate_seminaive(lower, base);
    EXPECT_EQ(formatted(full.live_facts("r")), formatted(only_r.live_facts("r")));
    EXPECT_EQ(full.live_facts("nr").size(), 25u - full.live_facts("r").size());
}

TEST(Evaluate, SeminaiveMatchesNaiveOnRandomPrograms) {
    testsupport::ProgramGenerator gen(1234);
    int cases = 0;
    while (cases < 200) {
        auto rp = gen.next(true);
        StratifiedProgram sp;
        try {
            sp = stratify(rp.program);
        } catch (const UnstratifiableError&) {
            continue;
        }
        FactStore base;
        for (const auto& f : rp.facts) base.insert(f, Origin::Discovered);
        ASSERT_EQ(derived(evaluate_seminaive(sp, base)), derived(evaluate_naive(sp, base)))
            << format_program(rp.program);
        ++cases;
    }
}

TEST(Evaluate, ThreadsDoNotChangeTheResult) {
    testsupport::ProgramGenerator gen(77);
    int cases = 0;
    while (cases < 100) {
        auto rp = gen.next(true);
        StratifiedProgram sp;
        try {
            sp = stratify(rp.program);
        } catch (const UnstratifiableError&) {
            continue;
        }
        FactStore base;
        for (const auto& f : rp.facts) base.insert(f, Origin::Discovered);
        auto one = evaluate_seminaive(sp, base, {1});
        auto four = evaluate_seminaive(sp, base, {4});
        ASSERT_EQ(one.facts().size(), four.facts().size());
        auto a = one.facts(), b = four.facts();
        for (std::size_t i = 0; i < a.size(); ++i) {
            EXPECT_EQ(a[i].literal, b[i].literal);
            EXPECT_EQ(a[i].origins, b[i].origins);
        }
        ++cases;
    }
}

TEST(Evaluate, ConvenienceLoadsProgramFacts) {
    auto s = evaluate(parse_program("e(1, 2). e(2, 3).\nt(?x, ?y) :- e(?x, ?y).\nt(?x, ?z) :- t(?x, ?y), e(?y, ?z)."));
    EXPECT_EQ(s.live_facts("t").size(), 3u);
}

TEST(Evaluate, ArityMismatchRejected) {
    EXPECT_THROW(evaluate(parse_program("p(1). p(1, 2).")), ArityError);
}

// ---------------------------------------------------------------------------
// Fact store

TEST(FactStore, SetSemantics) {
    FactStore s;
    auto a = s.insert(make_fact("p", {"a"}), Origin::Discovered);
    auto b = s.insert(make_fact("p", {"a"}), Origin::User);
    EXPECT_EQ(a, b);
    EXPECT_EQ(s.size(), 1u);
    EXPECT_TRUE(s.fact(a).has_origin(Origin::Discovered));
    EXPECT_TRUE(s.fact(a).has_origin(Origin::User));
    EXPECT_EQ(s.fact(a).origin, Origin::User);
}

TEST(FactStore, RejectsNonGround) {
    FactStore s;
    EXPECT_THROW(s.insert(parse_literal("p(?x)"), Origin::Discovered), std::invalid_argument);
}

TEST(Query, SendersToOneReceiver) {
    auto sp = stratify(parse_program(testsupport::kOutgoingFlowRule));
    auto s = evaluate_seminaive(sp, store_of(
                                        "outgoing_disc(\"HXP_105\", \"c1\"). recv_disc(\"c1\", \"HXP_106\").\n"
                                        "outgoing_disc(\"HXP_107\", \"c2\"). recv_disc(\"c2\", \"HXP_106\").\n"
                                        "outgoing_disc(\"HXP_106\", \"c3\"). recv_disc(\"c3\", \"HXP_105\")."));
    auto subs = query(s, parse_literal("msg_flow(?s, \"HXP_106\")"));
    // oracle: filter the full extension by its second argument
    std::vector<std::string> expected;
    for (const auto& f : s.live_facts("msg_flow"))
        if (f.args[1] == Term::str("HXP_106")) expected.push_back(to_string(f.args[0].constant()));
    std::vector<std::string> got;
    for (const auto& sub : subs) got.push_back(to_string(sub.at("s")));
    EXPECT_EQ(got, expected);
    EXPECT_EQ(got, (std::vector<std::string>{"HXP_105", "HXP_107"}));
}

TEST(Query, EmptyStoreAndGroundPattern) {
    EXPECT_TRUE(query(FactStore{}, parse_literal("p(?x)")).empty());
    auto s = store_of("p(\"a\").");
    auto r = query(s, parse_literal("p(\"a\")"));
    ASSERT_EQ(r.size(), 1u);
    EXPECT_TRUE(r[0].empty());
    EXPECT_TRUE(query(s, parse_literal("p(\"b\")")).empty());
}

TEST(Query, RepeatedVariable) {
    auto s = store_of("e(1, 1). e(1, 2). e(3, 3).");
    auto r = query(s, parse_literal("e(?x, ?x)"));
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r[0].at("x"), Constant{std::int64_t{1}});
    EXPECT_EQ(r[1].at("x"), Constant{std::int64_t{3}});
}

TEST(Query, IndexMatchesScanOnRandomStores) {
    std::mt19937 rng(99);
    for (int round = 0; round < 200; ++round) {
        FactStore s;
        int n = rng() % 150;
        for (int i = 0; i < n; ++i) {
            s.insert(Literal{"r", {Term::integer(rng() % 5), Term::str("v" + std::to_string(rng() % 4)),
                                   Term::integer(rng() % 3)}, false},
                     Origin::Discovered);
        }
        if (round % 3 == 0) s.ingest(std::vector<Literal>{Literal{"r", {Term::integer(0), Term::str("v0"), Term::integer(0)}, false}},
                                     Origin::Discovered);
        std::vector<Term> choices{Term::var("a"), Term::var("b"), Term::integer(rng() % 5), Term::str("v1"),
                                  Term::integer(1)};
        Literal pattern{"r", {}, false};
        for (int k = 0; k < 3; ++k) pattern.args.push_back(choices[rng() % choices.size()]);
        EXPECT_EQ(query(s, pattern, QueryMode::Indexed), query(s, pattern, QueryMode::Scan))
            << format_literal(pattern);
    }
}

// ---------------------------------------------------------------------------
// Snapshots and outdating

TEST(Ingest, AbsentFactBecomesOutdated) {
    FactStore s;
    s.ingest(facts("p(\"a\")."), Origin::Discovered);
    s.ingest(facts("p(\"b\")."), Origin::Discovered);
    EXPECT_EQ(s.current_epoch(), 2u);
    auto a = s.find(make_fact("p", {"a"}));
    auto b = s.find(make_fact("p", {"b"}));
    ASSERT_TRUE(a && b);
    EXPECT_TRUE(s.is_outdated(*a));
    EXPECT_FALSE(s.is_outdated(*b));
    EXPECT_EQ(s.fact(*b).epoch, 2u);
    EXPECT_EQ(testsupport::formatted(s.live_facts()), (std::set<std::string>{R"(p("b"))"}));
}

TEST(Ingest, IdenticalSnapshotRefreshes) {
    FactStore s;
    s.ingest(facts("p(\"a\"). q(1)."), Origin::Discovered);
    s.ingest(facts("p(\"a\"). q(1)."), Origin::Discovered);
    for (const auto& f : s.facts()) {
        EXPECT_FALSE(f.outdated);
        EXPECT_EQ(f.epoch, 2u);
    }
}

TEST(Ingest, OtherPredicatesUntouched) {
    FactStore s;
    s.ingest(facts("p(\"a\")."), Origin::Discovered);
    s.ingest(facts("q(\"x\")."), Origin::Discovered);
    EXPECT_FALSE(s.is_outdated(*s.find(make_fact("p", {"a"}))));
    EXPECT_TRUE(s.contains(make_fact("q", {"x"})));
}

TEST(Ingest, OriginsAreScopedSeparately) {
    FactStore s;
    s.ingest(facts("p(\"a\")."), Origin::User);
    s.ingest(facts("p(\"b\")."), Origin::Discovered);
    EXPECT_FALSE(s.is_outdated(*s.find(make_fact("p", {"a"}))));
    // asserted by both origins: outdated only once neither lists it
    s.ingest(facts("p(\"a\")."), Origin::Discovered);
    s.ingest(facts("p(\"c\")."), Origin::User);
    EXPECT_FALSE(s.is_outdated(*s.find(make_fact("p", {"a"}))));
    s.ingest(facts("p(\"c\")."), Origin::Discovered);
    EXPECT_TRUE(s.is_outdated(*s.find(make_fact("p", {"a"}))));
}

TEST(Ingest, FreeFunctionMatchesMember) {
    FactStore s;
    s.ingest(facts("p(\"a\")."), Origin::Discovered);
    auto t = ingest_snapshot(s, facts("p(\"b\")."), Origin::Discovered);
    EXPECT_EQ(t.current_epoch(), 2u);
    EXPECT_TRUE(t.is_outdated(*t.find(make_fact("p", {"a"}))));
    EXPECT_FALSE(s.is_outdated(*s.find(make_fact("p", {"a"}))));
}

TEST(Collect, UnreferencedOutdatedFactRemoved) {
    FactStore s;
    s.ingest(facts("p(\"a\")."), Origin::Discovered);
    s.ingest(facts("p(\"b\")."), Origin::Discovered);
    auto c = collect_unreferenced(s);
    EXPECT_FALSE(c.find(make_fact("p", {"a"})));
    EXPECT_TRUE(c.contains(make_fact("p", {"b"})));
}

TEST(Collect, ReferencedOutdatedFactRetained) {
    auto sp = stratify(parse_program(testsupport::kEquivalenceRules));
    FactStore s;
    s.ingest(facts("runs_on_disc(\"s1\", \"h1\"). runs_on_disc(\"s2\", \"h2\"). same_sys_disc(\"s1\", \"s2\")."),
             Origin::Discovered);
    s = evaluate_seminaive(sp, s);
    ASSERT_TRUE(s.contains(make_fact("same_host", {"h1", "h2"})));
    s.ingest(facts("runs_on_disc(\"s2\", \"h2\")."), Origin::Discovered);
    auto old = make_fact("runs_on_disc", {"s1", "h1"});
    EXPECT_TRUE(s.is_outdated(*s.find(old)));
    // contains() reports live facts only; find() sees outdated ones too
    auto kept = collect_unreferenced(s);
    ASSERT_TRUE(kept.find(old));
    EXPECT_TRUE(kept.is_outdated(*kept.find(old)));
    // once re-evaluated, nothing derives from it any more
    auto fresh = collect_unreferenced(evaluate_seminaive(sp, s));
    EXPECT_FALSE(fresh.find(old));
    EXPECT_FALSE(fresh.find(make_fact("same_host", {"h1", "h2"})));
}

TEST(Collect, NoOutdatedFactsIsNoOp) {
    auto s = evaluate(parse_program(std::string("same_sys_disc(\"a\", \"b\").\n") + testsupport::kEquivalenceRules));
    auto c = collect_unreferenced(s);
    EXPECT_EQ(formatted(c.live_facts()), formatted(s.live_facts()));
    EXPECT_EQ(c.size(), s.size());
}

TEST(Collect, RevivedFactStaysLive) {
    // an outdated base fact that is derived again is live
    auto sp = stratify(parse_program("p(?x) :- q(?x)."));
    FactStore s;
    s.ingest(facts("p(\"a\"). q(\"a\")."), Origin::Discovered);
    s.ingest(facts("p(\"z\"). q(\"a\")."), Origin::Discovered);
    ASSERT_TRUE(s.is_outdated(*s.find(make_fact("p", {"a"}))));
    auto e = evaluate_seminaive(sp, s);
    auto id = e.find(make_fact("p", {"a"}));
    ASSERT_TRUE(id);
    EXPECT_TRUE(e.is_live(*id));
    EXPECT_TRUE(e.is_derived(*id));
}
