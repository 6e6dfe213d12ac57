from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epsreason.errors import (
    DuplicateAtomDeclaration,
    ParseError,
    StrengthNotPositive,
    UnknownAtom,
    VocabularyTooLarge,
)
from epsreason.logic import (
    BOTTOM,
    TOP,
    And,
    Iff,
    Implies,
    KnowledgeBase,
    Not,
    Or,
    Var,
    Vocabulary,
    evaluate,
    fact_formula,
    kb_to_text,
    models,
    parse_formula,
    parse_kb,
    to_text,
)

a, b, c = Var("a"), Var("b"), Var("c")


def test_precedence():
    assert parse_formula("a & !b") == And(a, Not(b))
    assert parse_formula("a -> b | c") == Implies(a, Or(b, c))
    assert parse_formula("a -> b -> c") == Implies(a, Implies(b, c))
    assert parse_formula("a <-> b & c") == Iff(a, And(b, c))
    assert parse_formula("!(a | b)") == Not(Or(a, b))
    assert parse_formula("true | false") == Or(TOP, BOTTOM)


@pytest.mark.parametrize("text", ["a &&", "", "(a", "a b", "a ~> b", "& a", "a )"])
def test_malformed(text):
    with pytest.raises(ParseError):
        parse_formula(text)


def test_error_position():
    with pytest.raises(ParseError) as info:
        parse_formula("a & ?", line=3)
    assert info.value.line == 3
    assert info.value.column == 5


def test_unknown_atom_with_fixed_vocabulary():
    with pytest.raises(UnknownAtom) as info:
        parse_formula("a & z", Vocabulary(("a", "b")))
    assert info.value.name == "z"


def test_evaluate_examples():
    vocab = Vocabulary(("a", "b"))
    w = vocab.world({"a": True, "b": False})
    assert evaluate(TOP, w, vocab)
    assert evaluate(parse_formula("a & !b"), w, vocab)
    assert not evaluate(parse_formula("a <-> b"), w, vocab)
    assert evaluate(parse_formula("a & !b"), {"a": True, "b": False})


def test_models_examples():
    ab = Vocabulary(("a", "b"))
    assert [ab.world_bits(w) for w in models(parse_formula("a & b"), ab)] == ["11"]
    av = Vocabulary(("a",))
    assert models(parse_formula("a | !a"), av) == [0, 1]
    assert models(parse_formula("a & !a"), av) == []


def test_models_size_limit():
    vocab = Vocabulary(tuple(f"x{i}" for i in range(6)))
    with pytest.raises(VocabularyTooLarge):
        models(TOP, vocab, limit=5)


def test_fact_formula():
    assert fact_formula(KnowledgeBase(Vocabulary(()))) == TOP
    kb = KnowledgeBase.build(["!p"], [])
    assert fact_formula(kb) == Not(Var("p"))
    kb = KnowledgeBase.build(["a", "b | c"], [])
    assert to_text(fact_formula(kb)) == "a & (b | c)"


def test_parse_kb_examples():
    kb = parse_kb("fact !p\ndefault true ~> p")
    assert kb.facts == (Not(Var("p")),)
    assert kb.defaults[0].premise == TOP
    assert kb.vocabulary.atoms == ("p",)
    kb = parse_kb("default b ~> f [3/2]")
    assert kb.defaults[0].strength == Fraction(3, 2)
    with pytest.raises(StrengthNotPositive):
        parse_kb("default b ~> f [0]")


def test_parse_kb_format_details():
    text = "# birds\natoms b f p\n\nfact b\ndefault b ~> f\ndefault p ~> !f [2]\nquery f\n"
    kb = parse_kb(text)
    assert kb.vocabulary.atoms == ("b", "f", "p")
    assert len(kb.defaults) == 2 and kb.defaults[1].strength == 2
    assert kb.queries == (Var("f"),)
    assert parse_kb(kb_to_text(kb)) == kb


def test_parse_kb_errors():
    with pytest.raises(DuplicateAtomDeclaration):
        parse_kb("atoms a b a")
    with pytest.raises(UnknownAtom):
        parse_kb("atoms a\nfact b")
    with pytest.raises(ParseError) as info:
        parse_kb("fact a\ndefault a ~> b ~> c")
    assert info.value.line == 2
    with pytest.raises(ParseError):
        parse_kb("rule a")
    with pytest.raises(VocabularyTooLarge):
        parse_kb("fact a & b & c", max_atoms=2)


ATOMS = ("a", "b", "c")


def formulas(depth=3):
    leaves = st.sampled_from([Var(x) for x in ATOMS] + [TOP, BOTTOM])
    return st.recursive(
        leaves,
        lambda sub: st.one_of(
            sub.map(Not),
            st.tuples(sub, sub).map(lambda p: And(*p)),
            st.tuples(sub, sub).map(lambda p: Or(*p)),
            st.tuples(sub, sub).map(lambda p: Implies(*p)),
            st.tuples(sub, sub).map(lambda p: Iff(*p)),
        ),
        max_leaves=8,
    )


VOCAB = Vocabulary(ATOMS)


@given(formulas())
@settings(max_examples=200)
def test_print_parse_round_trip(f):
    g = parse_formula(to_text(f))
    assert g == f
    for w in range(VOCAB.n_worlds):
        assert evaluate(g, w, VOCAB) == evaluate(f, w, VOCAB)


@given(formulas(), formulas())
@settings(max_examples=200)
def test_model_set_algebra(f, g):
    mf, mg = set(models(f, VOCAB)), set(models(g, VOCAB))
    assert len(mf) + len(models(Not(f), VOCAB)) == VOCAB.n_worlds
    assert set(models(And(f, g), VOCAB)) == mf & mg
    assert set(models(Or(f, g), VOCAB)) == mf | mg


@given(formulas())
@settings(max_examples=100)
def test_mask_matches_evaluate(f):
    m = VOCAB.mask(f)
    for w in range(VOCAB.n_worlds):
        assert bool(m >> w & 1) == evaluate(f, w, VOCAB)
    assert VOCAB.mask(VOCAB.formula_of(m)) == m
