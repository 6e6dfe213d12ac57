from __future__ import annotations

import random

from epsreason.klm import KLM_RULES, check_meta_properties, random_formula, random_kb
from epsreason.logic import And, Implies, Not, Or, Var, parse_kb
from epsreason.rankings import tolerance_partition


def depth(f):
    if isinstance(f, Var):
        return 0
    if isinstance(f, Not):
        return 1 + depth(f.arg)
    return 1 + max(depth(f.left), depth(f.right))


def test_random_formula_depth():
    rng = random.Random(0)
    for _ in range(200):
        f = random_formula(rng, ("a", "b"))
        assert depth(f) <= 2
        assert isinstance(f, (Var, Not, And, Or, Implies))


def test_random_kb_is_consistent():
    rng = random.Random(4)
    for _ in range(50):
        kb = random_kb(rng)
        assert 2 <= len(kb.vocabulary) <= 4
        assert 1 <= len(kb.defaults) <= 4
        assert tolerance_partition(kb.defaults, kb.vocabulary).consistent


def test_deterministic_given_seed():
    a = check_meta_properties("rc", 20, seed=3)
    b = check_meta_properties("rc", 20, seed=3)
    assert a == b


def test_rc_small_run():
    report = check_meta_properties("rc", 40, seed=1)
    assert report.klm_failures == 0
    assert report.failures("RM") == 0
    assert all(report.rules[r].applicable > 0 for r in KLM_RULES)


def test_counterexamples_are_verbatim():
    report = check_meta_properties("pc", 80, seed=2)
    assert report.klm_failures == 0
    for c in report.examples("RM"):
        kb = parse_kb(c.kb)
        assert kb.defaults
        assert c.phi and c.psi and c.chi
    assert "RM" in report.format()
