from __future__ import annotations

import json

import pytest

from epsreason.bench import (
    BenchReport,
    REFERENCE_TABLE,
    run_benchmarks,
    run_query,
)
from epsreason.errors import InconsistentDelta, MEDivergence
from epsreason.logic import KnowledgeBase, Vocabulary, parse_formula as F
from epsreason.maxent import PluralSampler


@pytest.fixture(scope="module")
def report():
    return run_benchmarks(sampler=PluralSampler(samples=16))


def test_query_examples(kb_of):
    assert run_query(kb_of("EI"), "me", F("phi")).verdict == "Entailed"
    assert run_query(kb_of("EI"), "rc", F("phi")).verdict == "NotEntailed"
    empty = KnowledgeBase(Vocabulary(("a",)))
    for s in ("pc", "rc", "lc", "me", "me-plural"):
        assert run_query(empty, s, "true").verdict == "Entailed"


def test_query_traces(kb_of):
    ei = kb_of("EI")
    me = run_query(ei, "me", "phi")
    assert me.weights == (2, 2, 1, 1)
    assert set(me.ranking) == {ei.vocabulary.world_bits(w) for w in range(16)}
    assert "z_partition" in run_query(ei, "rc", "phi").trace
    assert "signatures" in run_query(ei, "lc", "phi").trace
    assert "augmented_partition" in run_query(ei, "pc", "phi").trace
    plural = run_query(ei, "me-plural", "phi", PluralSampler(samples=3, seed=9))
    assert plural.seed == 9 and plural.trace["samples"] == 1 + 4 + 3


def test_query_errors():
    bad = KnowledgeBase.build([], [("true", "a"), ("true", "!a")])
    with pytest.raises(InconsistentDelta):
        run_query(bad, "rc", "a")
    loop = KnowledgeBase.build([], [("b", "a & b"), ("b", "a")])
    with pytest.raises(MEDivergence):
        run_query(loop, "me", "a")
    with pytest.raises(ValueError):
        run_query(loop, "ce", "a")


def test_json_never_uses_floats(kb_of):
    data = run_query(kb_of("EI"), "me", "phi").to_dict()
    text = json.dumps(data)
    assert all(isinstance(z, str) for z in data["weights"])
    assert "." not in "".join(data["ranking"].values())
    assert json.loads(text) == data


def test_rows_match_reference(report):
    assert report.mismatches() == []
    assert report.matrix["me-plural"] == report.matrix["me"]


def test_flagged_cell(report):
    (cell,) = report.flagged
    assert (cell["strategy"], cell["instance"]) == ("pc", "ES")
    assert cell["reference"] == REFERENCE_TABLE["pc"]["ES"]
    assert cell["oracle_cell"] in (0, 1)


def test_report_round_trip(report):
    text = report.to_json()
    assert BenchReport.from_json(text) == report
    data = json.loads(text)
    assert data["seed"] == 0 and "flaggedCells" in data


def test_ge_has_two_checks(report):
    assert [row[1] for row in report.checks["me"]["GE"]] == ["must-not-infer", "must-not-infer"]


def test_format_table(report):
    text = report.format_table()
    assert text.splitlines()[0].split()[1:] == ["ES", "EI", "GE", "AP", "RE", "NE"]
    assert "non-inferences" in text
