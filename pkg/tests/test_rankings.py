from __future__ import annotations

from fractions import Fraction

import pytest

from epsreason.distribution import NPDistribution
from epsreason.errors import ConditioningOnImpossible, DegenerateDistribution, InconsistentDelta
from epsreason.field import EPS, INF, ONE
from epsreason.logic import BOTTOM, TOP, Default, KnowledgeBase, Vocabulary, parse_formula as F
from epsreason.rankings import (
    LexicographicClosure,
    PreferentialClosure,
    RankingFn,
    cond_kappa,
    kappa,
    lex_entails,
    p_entails,
    ranking_from_distribution,
    ranking_satisfies,
    rc_entails,
    spohn_ranking,
    tolerance_partition,
    z_ranking,
    z_values,
)


def D(premise, conclusion):
    return Default(F(premise), F(conclusion))


def test_ranking_validation():
    vocab = Vocabulary(("a",))
    with pytest.raises(ValueError):
        RankingFn(vocab, (1, 2))
    with pytest.raises(DegenerateDistribution):
        RankingFn(vocab, (INF, INF))
    assert RankingFn.normalised(vocab, (3, INF)).ranks == (0, INF)


def test_kappa_examples():
    R = spohn_ranking()
    assert kappa(R, BOTTOM) == INF
    assert kappa(R, TOP) == 0
    assert kappa(R, F("!phi")) == 2


def test_cond_kappa_examples():
    R = spohn_ranking()
    assert cond_kappa(R, F("!phi"), F("psi")) == 1
    assert cond_kappa(R, F("psi"), F("psi")) == 0
    assert cond_kappa(R, F("psi"), TOP) == 1
    impossible = RankingFn(R.vocabulary, (INF, 0, INF, 1))
    with pytest.raises(ConditioningOnImpossible):
        cond_kappa(impossible, F("phi"), F("!phi"))


def test_ranking_satisfies_examples():
    R = spohn_ranking()
    assert ranking_satisfies(R, D("true", "phi"), 2)
    assert not ranking_satisfies(R, D("psi", "phi"), 2)
    assert ranking_satisfies(R, D("psi", "phi"), 1)
    assert ranking_satisfies(R, D("phi & !phi", "psi"), 5)


def test_ranking_from_distribution():
    vocab = Vocabulary(("a",))
    P = NPDistribution.from_weights(vocab, [EPS * EPS, ONE])
    assert ranking_from_distribution(P).ranks == (2, 0)


def test_tolerance_examples():
    vocab = Vocabulary(("a",))
    assert not tolerance_partition([D("true", "a"), D("true", "!a")], vocab).consistent
    assert tolerance_partition([D("true", "a")], vocab).groups == ((0,),)
    es = [D("phi", "alpha"), D("alpha", "beta"), D("beta", "psi"), D("alpha", "!psi")]
    vocab = Vocabulary.collect([g for d in es for g in (d.premise, d.conclusion)])
    assert tolerance_partition(es, vocab).groups == ((2,), (0, 1, 3))
    with pytest.raises(InconsistentDelta):
        z_values([D("true", "a"), D("true", "!a")], Vocabulary(("a",)))


def test_z_ranking_examples(kb_of):
    assert z_ranking([], Vocabulary(("a", "b"))).ranks == (0, 0, 0, 0)
    ei = kb_of("EI")
    assert z_values(ei.defaults, ei.vocabulary) == (1, 1, 0, 0)
    re = kb_of("RE")
    R = z_ranking(re.defaults, re.vocabulary)
    assert kappa(R, F("!phi & psi")) == 1
    assert kappa(R, F("!phi & !psi")) == 1


def test_rc_examples(kb_of):
    assert rc_entails(kb_of("AP"), F("!alpha"))
    assert not rc_entails(kb_of("EI"), F("phi"))
    assert rc_entails(KnowledgeBase.build(["a"], []), F("a"))


def test_p_entails_examples(kb_of):
    assert p_entails(KnowledgeBase.build(["a"], [("a", "b")]), F("b"))
    assert not p_entails(kb_of("EI"), F("phi"))
    ge = kb_of("GE")
    assert not p_entails(ge, F("psi"))
    assert not p_entails(ge, F("!psi"))


def test_lex_examples(kb_of):
    assert lex_entails(kb_of("EI"), F("phi"))
    assert lex_entails(kb_of("RE"), F("psi"))
    assert lex_entails(KnowledgeBase.build(["a"], []), F("a"))


def test_lex_refines_rc(kb_of):
    # every rc conclusion is an lc conclusion
    for name in ("ES", "EI", "GE", "AP", "RE", "NE"):
        kb = kb_of(name)
        for q in kb.vocabulary.atoms:
            for f in (F(q), F(f"!{q}")):
                if rc_entails(kb, f):
                    assert lex_entails(kb, f)


def test_lex_signature(kb_of):
    kb = kb_of("RE")
    lc = LexicographicClosure(kb.defaults, kb.vocabulary)
    w = kb.vocabulary.world({"phi": False, "psi": False})
    assert lc.signature(w) == (2,)


def test_pc_trace_lists_extra_default():
    kb = KnowledgeBase.build(["a"], [("a", "b")])
    pc = PreferentialClosure(kb.defaults, kb.vocabulary)
    v = kb.vocabulary
    assert not pc.tolerance_trace(v.mask(F("a")), v.mask(F("b"))).consistent
    assert pc.tolerance_trace(v.mask(F("a")), v.mask(F("!b"))).groups == ((0, 1),)


def test_fractional_margin():
    R = RankingFn(Vocabulary(("a",)), (Fraction(3, 2), 0))
    assert ranking_satisfies(R, D("true", "a"), Fraction(3, 2))
    assert not ranking_satisfies(R, D("true", "a"), 2)
