import json
import os
from pathlib import Path

import pytest

import netinfer

FIXTURES = Path(os.environ.get("NETINFER_FIXTURE_DIR", Path(__file__).resolve().parents[2] / "fixtures"))

EQUIVALENCE = """
same_sys(?a, ?b) :- same_sys_disc(?a, ?b).
same_sys(?a, ?b) :- same_sys(?a, ?c), same_sys(?c, ?b).
same_sys_disc("a", "b").
same_sys_disc("b", "c").
"""


def test_evaluate_closure():
    derived = netinfer.evaluate(EQUIVALENCE)
    assert derived == sorted(derived)
    assert set(derived) == {
        'same_sys("a", "b").',
        'same_sys("a", "c").',
        'same_sys("b", "c").',
    }
    assert netinfer.evaluate(EQUIVALENCE, naive=True) == derived
    assert netinfer.evaluate(EQUIVALENCE, threads=2) == derived


def test_language_errors():
    with pytest.raises(netinfer.ParseError):
        netinfer.evaluate("p(?x) :- q(?x)")
    with pytest.raises(netinfer.UnstratifiableError):
        netinfer.evaluate('p(?x) :- e(?x), not q(?x).\nq(?x) :- e(?x), not p(?x).\ne("a").')
    with pytest.raises(netinfer.UnsafeRuleError):
        netinfer.evaluate("p(?x) :- q(?y).")
    assert issubclass(netinfer.ParseError, ValueError)


def test_infer_fixture():
    facts = (FIXTURES / "hxp.facts").read_text()
    network = netinfer.infer(facts)
    assert network["schema_version"] == netinfer.SCHEMA_VERSION == "1"
    assert len(network["systems"]) == 12
    assert len(network["groups"]) == 13
    assert sum(len(g["flows"]) for g in network["groups"]) == 31


def test_infer_is_deterministic_and_feeds_dot_and_report():
    facts = (FIXTURES / "h73.facts").read_text()
    first = netinfer.infer_json(facts)
    assert netinfer.infer_json(facts) == first
    dot = netinfer.to_dot(first)
    assert dot.startswith("digraph")
    assert "systems: 6" in netinfer.report(first)


def test_schema_violations():
    bad = 'system_disc("a", "u"). runs_on_disc("a").'
    violations = netinfer.validate(bad)
    assert [(i, kind) for i, kind, _ in violations] == [(1, "wrong-arity")]
    with pytest.raises(netinfer.SchemaError):
        netinfer.infer(bad)
    assert len(netinfer.infer(bad, lenient=True)["systems"]) == 1


def test_simulate_and_score():
    facts, truth = netinfer.simulate(systems=12, hosts=4, middlewares=2, flows=30, duplication=0.5, seed=5)
    assert netinfer.simulate(systems=12, hosts=4, middlewares=2, flows=30, duplication=0.5, seed=5) == (facts, truth)
    assert json.loads(truth)["schema_version"] == "1"
    rows = {r["label"]: r for r in netinfer.score(netinfer.infer_json(facts), truth)}
    for label in ("Found expected Systems", "Found Expected Top-Level Connection Groups", "Found Expected MessageFlows"):
        assert rows[label]["percentage"] == 100.0
        assert rows[label]["unexpected"] == 0
    with pytest.raises(netinfer.InfeasibleConfig):
        netinfer.simulate(systems=2, flows=5)


def test_fixtures_match_shipped_files():
    fx = netinfer.fixtures()
    assert set(fx) == {"hxp", "h73"}
    assert fx["hxp"][0] == (FIXTURES / "hxp.facts").read_text()


def test_schema_text():
    text = netinfer.schema()
    assert "recv_host_disc/2" in text
    assert netinfer.schema(markdown=True).startswith("| predicate | arity | arguments | origin |")


def test_bad_network_json():
    with pytest.raises(netinfer.FormatError):
        netinfer.to_dot('{"schema_version": "2"}')
