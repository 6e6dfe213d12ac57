"""Nonarchimedean probability distributions over the worlds of a vocabulary."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import VocabularyMismatch, ZeroConditioning
from .field import ONE, ZERO, EpsRatio, eps, much_smaller, _as_ratio
from .logic import Default, Formula, Vocabulary, iter_worlds


class NPDistribution:
    """World-indexed distribution with values in the ``e``-ratio field.

    Entries must be nonnegative and sum to exactly 1.
    """

    __slots__ = ("vocabulary", "p")

    def __init__(self, vocabulary: Vocabulary, probs: Sequence):
        probs = tuple(_as_ratio(x) for x in probs)
        if len(probs) != vocabulary.n_worlds:
            raise ValueError(f"expected {vocabulary.n_worlds} entries, got {len(probs)}")
        if any(x.sign() < 0 for x in probs):
            raise ValueError("negative probability")
        total = _sum(probs)
        if total != ONE:
            raise ValueError(f"probabilities sum to {total}, not 1")
        self.vocabulary = vocabulary
        self.p = probs

    @classmethod
    def from_weights(cls, vocabulary: Vocabulary, weights: Sequence) -> "NPDistribution":
        """Normalise nonnegative weights (at least one nonzero) to a distribution."""
        ws = [_as_ratio(w) for w in weights]
        total = _sum(ws)
        if total.is_zero():
            raise ValueError("all weights are zero")
        if all(w.den == ws[0].den for w in ws):
            # common denominator cancels; avoids one gcd per entry in the usual case
            total_num = _sum([EpsRatio(w.num) for w in ws])
            return cls(vocabulary, [EpsRatio(w.num) / total_num for w in ws])
        return cls(vocabulary, [w / total for w in ws])

    @classmethod
    def uniform(cls, vocabulary: Vocabulary) -> "NPDistribution":
        n = vocabulary.n_worlds
        return cls(vocabulary, [Fraction(1, n)] * n)

    @classmethod
    def point_mass(cls, vocabulary: Vocabulary, world: int) -> "NPDistribution":
        return cls(vocabulary, [1 if w == world else 0 for w in range(vocabulary.n_worlds)])

    def __len__(self) -> int:
        return len(self.p)

    def __getitem__(self, w: int) -> EpsRatio:
        return self.p[w]

    def __eq__(self, other) -> bool:
        if not isinstance(other, NPDistribution):
            return NotImplemented
        return self.vocabulary == other.vocabulary and self.p == other.p

    def __hash__(self) -> int:
        return hash((self.vocabulary.atoms, self.p))

    def __repr__(self) -> str:
        return f"NPDistribution({[str(x) for x in self.p]})"

    def permuted(self, perm: Sequence[int]) -> "NPDistribution":
        """Distribution with entry ``w`` moved to position ``perm[w]``."""
        out = [ZERO] * len(self.p)
        for w, x in enumerate(self.p):
            out[perm[w]] = x
        return NPDistribution._unchecked(self.vocabulary, out)

    @classmethod
    def _unchecked(cls, vocabulary: Vocabulary, probs: Sequence[EpsRatio]) -> "NPDistribution":
        d = object.__new__(cls)
        d.vocabulary = vocabulary
        d.p = tuple(probs)
        return d

    def root_denominator(self) -> int:
        from math import lcm

        d = 1
        for x in self.p:
            d = lcm(d, x.root_denominator())
        return d


def _sum(xs: Iterable[EpsRatio]) -> EpsRatio:
    xs = list(xs)
    if xs and all(x.den == xs[0].den for x in xs):
        num = xs[0].num
        for x in xs[1:]:
            num = num + x.num
        return EpsRatio(num, xs[0].den)
    total = ZERO
    for x in xs:
        total = total + x
    return total


def _mask_of(P: NPDistribution, f: Formula | int) -> int:
    return f if isinstance(f, int) else P.vocabulary.mask(f)


def prob(P: NPDistribution, f: Formula | int) -> EpsRatio:
    """Probability of a formula (or of a world mask)."""
    return _sum(P.p[w] for w in iter_worlds(_mask_of(P, f)))


def cond_prob(P: NPDistribution, target: Formula | int, given: Formula | int) -> EpsRatio:
    g = _mask_of(P, given)
    denom = prob(P, g)
    if denom.is_zero():
        raise ZeroConditioning("conditioning event has probability zero")
    return prob(P, _mask_of(P, target) & g) / denom


def is_coherent(P: NPDistribution) -> bool:
    """Only the impossible event has probability zero."""
    return all(not x.is_zero() for x in P.p)


@dataclass(frozen=True)
class ConstraintMode:
    """How ``P(not conclusion | premise)`` is bounded for a default.

    ``kind`` is one of ``classical`` (``<< 1``), ``much_less`` (``<< e^t``),
    ``strict`` (``< e^t``) or ``weak`` (``<= e^t``).
    """

    kind: str
    t: Fraction | None = None

    def __post_init__(self):
        if self.kind not in ("classical", "much_less", "strict", "weak"):
            raise ValueError(f"unknown constraint mode {self.kind!r}")
        if self.kind == "classical":
            if self.t is not None:
                raise ValueError("classical mode takes no exponent")
        else:
            t = Fraction(self.t)
            if t <= 0:
                raise ValueError("bound exponent must be positive")
            object.__setattr__(self, "t", t)

    @classmethod
    def much_less_bound(cls, t) -> "ConstraintMode":
        return cls("much_less", t)

    @classmethod
    def strict_bound(cls, t) -> "ConstraintMode":
        return cls("strict", t)

    @classmethod
    def weak_bound(cls, t) -> "ConstraintMode":
        return cls("weak", t)

    def holds(self, value: EpsRatio) -> bool:
        if self.kind == "classical":
            return much_smaller(value, ONE)
        bound = eps(self.t)
        if self.kind == "much_less":
            return much_smaller(value, bound)
        if self.kind == "strict":
            return value < bound
        return value <= bound


CLASSICAL = ConstraintMode("classical")


def satisfies_default(P: NPDistribution, d: Default, mode: ConstraintMode = CLASSICAL) -> bool:
    """Check ``P(not conclusion | premise)`` against ``mode``.

    Raises :class:`ZeroConditioning` when the premise has probability zero;
    see :func:`satisfies_all` for the vacuous reading.
    """
    vocab = P.vocabulary
    failure = cond_prob(P, d.violate_mask(vocab), vocab.mask(d.premise))
    return mode.holds(failure)


def satisfies_all(
    P: NPDistribution,
    defaults: Iterable[Default],
    modes: ConstraintMode | Sequence[ConstraintMode] = CLASSICAL,
) -> bool:
    """All defaults hold; a default whose premise has probability zero holds vacuously."""
    defaults = list(defaults)
    if isinstance(modes, ConstraintMode):
        modes = [modes] * len(defaults)
    for d, mode in zip(defaults, modes):
        try:
            if not satisfies_default(P, d, mode):
                return False
        except ZeroConditioning:
            continue
    return True


def check_same_vocabulary(P: NPDistribution, Q: NPDistribution) -> None:
    if P.vocabulary != Q.vocabulary:
        raise VocabularyMismatch("distributions are over different vocabularies")
