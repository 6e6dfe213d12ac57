from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest

from epsreason.distribution import NPDistribution
from epsreason.entropy import (
    entropy_compare,
    entropy_numeric,
    entropy_series,
    ln_bounds,
    log2_bounds,
)
from epsreason.field import EPS, ONE, ZERO, EpsPoly, EpsRatio, eps
from epsreason.logic import Vocabulary

A = Vocabulary(("a",))
AB = Vocabulary(("a", "b"))


def dist(vocab, weights):
    return NPDistribution.from_weights(vocab, weights)


def test_ln_bounds_enclose():
    for b in (Fraction(1, 3), Fraction(2), Fraction(10), Fraction(7, 5), Fraction(10**9, 3)):
        lo, hi = ln_bounds(b, 64)
        assert lo <= hi
        assert hi - lo < Fraction(1, 2**60)
        assert float(lo) <= math.log(b) <= float(hi) or math.isclose(float(lo), math.log(b))


def test_log2_exact_for_powers_of_two():
    assert log2_bounds(Fraction(1, 8)) == (-3, -3)
    lo, hi = log2_bounds(Fraction(3))
    assert Fraction(15849, 10000) < lo <= hi < Fraction(15850, 10000)


def test_compare_examples():
    P = NPDistribution(A, [ONE - EPS, EPS])
    Q = NPDistribution(A, [ONE - eps(2), eps(2)])
    assert str(entropy_compare(P, Q)) == "Greater"
    assert str(entropy_compare(Q, P)) == "Less"
    assert str(entropy_compare(P, P)) == "EqualUpToLevel(8)"
    assert str(entropy_compare(P, P, max_level=3)) == "EqualUpToLevel(3)"
    assert entropy_compare(NPDistribution.uniform(AB), NPDistribution.point_mass(AB, 2)).kind == "Greater"


def test_deciding_level():
    P = NPDistribution(A, [ONE - EPS, EPS])
    Q = NPDistribution(A, [ONE - eps(2), eps(2)])
    assert entropy_compare(P, Q).level == 1


def test_constant_level_decided_by_logs():
    # same exponents, different constants: decided by an exact log-sum comparison
    P = dist(AB, [ONE, ONE, EPS, EPS])
    Q = dist(AB, [ONE, EpsRatio(2), EPS, EPS])
    assert entropy_compare(P, Q).kind == "Greater"


def test_numeric_examples():
    assert entropy_numeric(NPDistribution.uniform(AB), Fraction(1, 2)) == 2
    assert entropy_numeric(NPDistribution.point_mass(AB, 1), Fraction(1, 2)) == 0
    half = EpsRatio(Fraction(1, 2))
    assert entropy_numeric(NPDistribution(AB, [half, half, ZERO, ZERO]), Fraction(1, 3)) == 1


def test_numeric_error_bound():
    P = NPDistribution(A, [EpsRatio(Fraction(1, 3)), EpsRatio(Fraction(2, 3))])
    exact = -(1 / 3) * math.log2(1 / 3) - (2 / 3) * math.log2(2 / 3)
    assert abs(float(entropy_numeric(P, Fraction(1, 2))) - exact) < 1e-9


def test_series_leading_terms():
    P = NPDistribution(A, [ONE - EPS, EPS])
    levels = entropy_series(P, max_level=2)
    level1 = next(x for x in levels if x[0] == 1)
    assert level1[1] == 1  # coefficient of eps * ln(1/eps)
    assert level1[2] == 1  # eps contributed by -(1 - eps) ln(1 - eps)


def _random_dist(rng, vocab):
    weights = []
    for _ in range(vocab.n_worlds):
        terms = {rng.randint(0, 2): rng.randint(1, 3)}
        if rng.random() < 0.4:
            terms[rng.randint(1, 3)] = rng.randint(1, 2)
        weights.append(EpsRatio(EpsPoly(terms)))
    return dist(vocab, weights)


def test_antisymmetry_and_numeric_agreement():
    rng = random.Random(3)
    for _ in range(30):
        P, Q = _random_dist(rng, AB), _random_dist(rng, AB)
        v, w = entropy_compare(P, Q), entropy_compare(Q, P)
        flip = {"Greater": "Less", "Less": "Greater"}
        if v.kind in flip:
            assert w.kind == flip[v.kind]
            # the deciding level must be visible numerically at small u
            for k in (20, 40):
                u = Fraction(1, 2**k)
                hp = entropy_numeric(P, u, P.root_denominator(), bits=64)
                hq = entropy_numeric(Q, u, Q.root_denominator(), bits=64)
                assert (hp > hq) == (v.kind == "Greater")
        else:
            assert w.kind == v.kind


def test_unnormalised_weights_rejected():
    with pytest.raises(ValueError):
        NPDistribution(A, [ONE, EPS])
