"""Datalog evaluation and integration network inference.

The heavy lifting happens in the compiled ``_core`` module. Networks and
ground truth cross the boundary as JSON documents (schema_version "1");
the helpers here decode them.
"""

import json

from ._core import (
    SCHEMA_VERSION,
    ArityError,
    FormatError,
    InfeasibleConfig,
    IoError,
    ParseError,
    SchemaError,
    UnsafeRuleError,
    UnstratifiableError,
    evaluate,
    fixtures,
    report,
    schema,
    score,
    simulate,
    to_dot,
    validate,
)
from ._core import infer as infer_json

__all__ = [
    "SCHEMA_VERSION",
    "ArityError",
    "FormatError",
    "InfeasibleConfig",
    "IoError",
    "ParseError",
    "SchemaError",
    "UnsafeRuleError",
    "UnstratifiableError",
    "evaluate",
    "fixtures",
    "infer",
    "infer_json",
    "report",
    "schema",
    "score",
    "simulate",
    "to_dot",
    "validate",
]


def infer(facts, rules_dir=None, lenient=False):
    """Run the pipeline over fact text and return the network as a dict."""
    return json.loads(infer_json(facts, rules_dir=rules_dir, lenient=lenient))
