"""Kappa rankings, tolerance partitions and the ranking-based entailment relations.

Rankings use the surprise polarity: 0 is unsurprising, larger values are more
exceptional and ``inf`` marks impossible worlds.  The rank of a formula is the
minimum over its models.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .distribution import NPDistribution
from .errors import ConditioningOnImpossible, DegenerateDistribution, InconsistentDelta
from .field import INF, magnitude
from .logic import (
    Default,
    Formula,
    KnowledgeBase,
    Vocabulary,
    fact_formula,
    iter_worlds,
)

Rank = "Fraction | float"


def _mask(vocab: Vocabulary, f: Formula | int) -> int:
    return f if isinstance(f, int) else vocab.mask(f)


@dataclass(frozen=True)
class RankingFn:
    """Map from world index to a rank in ``Q>=0 u {inf}``, normalised to minimum 0."""

    vocabulary: Vocabulary
    ranks: tuple

    def __post_init__(self):
        ranks = tuple(r if r == INF else Fraction(r) for r in self.ranks)
        if len(ranks) != self.vocabulary.n_worlds:
            raise ValueError(f"expected {self.vocabulary.n_worlds} ranks, got {len(ranks)}")
        if any(r < 0 for r in ranks):
            raise ValueError("ranks must be nonnegative")
        if all(r == INF for r in ranks):
            raise DegenerateDistribution("every world is impossible")
        if min(ranks) != 0:
            raise ValueError("ranking is not normalised (minimum rank must be 0)")
        object.__setattr__(self, "ranks", ranks)

    @classmethod
    def normalised(cls, vocabulary: Vocabulary, ranks: Sequence) -> "RankingFn":
        finite = [r for r in ranks if r != INF]
        if not finite:
            raise DegenerateDistribution("every world is impossible")
        low = min(finite)
        return cls(vocabulary, tuple(r if r == INF else r - low for r in ranks))

    def __getitem__(self, w: int):
        return self.ranks[w]

    def table(self) -> dict[str, object]:
        """World bit strings mapped to ranks."""
        return {self.vocabulary.world_bits(w): r for w, r in enumerate(self.ranks)}


def spohn_ranking(phi: str = "phi", psi: str = "psi") -> RankingFn:
    """Ranking over ``{phi, psi}`` where ``true ~> phi`` holds with margin 2 but ``psi ~> phi`` fails.

    Ranks: ``phi & !psi`` 0, ``phi & psi`` 1, ``!phi & psi`` 2, ``!phi & !psi`` 2.
    """
    vocab = Vocabulary((phi, psi))
    table = {(1, 0): 0, (1, 1): 1, (0, 1): 2, (0, 0): 2}
    ranks = [table[(w & 1, (w >> 1) & 1)] for w in range(4)]
    return RankingFn(vocab, tuple(ranks))


def kappa_mask(R: RankingFn, mask: int):
    ranks = R.ranks
    return min((ranks[w] for w in iter_worlds(mask)), default=INF)


def kappa(R: RankingFn, f: Formula | int):
    """Rank of a formula: the minimum rank over its models (``inf`` if none)."""
    return kappa_mask(R, _mask(R.vocabulary, f))


def cond_kappa(R: RankingFn, target: Formula | int, given: Formula | int):
    vocab = R.vocabulary
    g = _mask(vocab, given)
    kg = kappa_mask(R, g)
    if kg == INF:
        raise ConditioningOnImpossible("conditioning formula has infinite rank")
    return kappa_mask(R, _mask(vocab, target) & g) - kg


def ranking_satisfies(R: RankingFn, d: Default, margin=1) -> bool:
    """The default's exceptions are at least ``margin`` above its verifiers, or impossible."""
    vocab = R.vocabulary
    bad = kappa_mask(R, d.violate_mask(vocab))
    if bad == INF:
        return True
    return bad >= kappa_mask(R, d.verify_mask(vocab)) + Fraction(margin)


def ranking_from_distribution(P: NPDistribution) -> RankingFn:
    """Order-of-magnitude projection of a distribution."""
    return RankingFn.normalised(P.vocabulary, [magnitude(x) for x in P.p])


# --------------------------------------------------------------------------
# tolerance and System Z


@dataclass(frozen=True)
class TolerancePartition:
    """Z-partition of a default set: ``groups[k]`` holds the indices of rank ``k``.

    ``groups`` is ``None`` when the default set is inconsistent.
    """

    groups: tuple[tuple[int, ...], ...] | None

    @property
    def consistent(self) -> bool:
        return self.groups is not None

    def z_values(self) -> tuple[int, ...]:
        if self.groups is None:
            raise InconsistentDelta("default set admits no tolerance partition")
        z = {}
        for k, group in enumerate(self.groups):
            for i in group:
                z[i] = k
        return tuple(z[i] for i in sorted(z))


INCONSISTENT = TolerancePartition(None)


def default_masks(defaults: Sequence[Default], vocab: Vocabulary) -> list[tuple[int, int]]:
    """``(verify, violate)`` world masks for each default."""
    return [(d.verify_mask(vocab), d.violate_mask(vocab)) for d in defaults]


def _partition_masks(masks: Sequence[tuple[int, int]], full: int) -> TolerancePartition:
    residue = list(range(len(masks)))
    groups = []
    while residue:
        allowed = full
        for i in residue:
            allowed &= ~masks[i][1]
        tolerated = [i for i in residue if masks[i][0] & allowed]
        if not tolerated:
            return INCONSISTENT
        groups.append(tuple(tolerated))
        chosen = set(tolerated)
        residue = [i for i in residue if i not in chosen]
    return TolerancePartition(tuple(groups))


def tolerance_partition(defaults: Sequence[Default], vocab: Vocabulary) -> TolerancePartition:
    """Greedy toleration rounds: each round takes every default tolerated by the residue."""
    return _partition_masks(default_masks(defaults, vocab), vocab.full_mask)


def _violations(masks: Sequence[tuple[int, int]], n_worlds: int) -> list[list[int]]:
    out: list[list[int]] = [[] for _ in range(n_worlds)]
    for i, (_, viol) in enumerate(masks):
        for w in iter_worlds(viol):
            out[w].append(i)
    return out


def z_ranking(defaults: Sequence[Default], vocab: Vocabulary) -> RankingFn:
    """System Z ranking: 0 for worlds violating nothing, else 1 + max violated z."""
    masks = default_masks(defaults, vocab)
    part = _partition_masks(masks, vocab.full_mask)
    if not part.consistent:
        raise InconsistentDelta("default set admits no tolerance partition")
    z = part.z_values()
    ranks = [
        1 + max(z[i] for i in viol) if viol else 0
        for viol in _violations(masks, vocab.n_worlds)
    ]
    return RankingFn(vocab, tuple(ranks))


# --------------------------------------------------------------------------
# entailment relations
#
# A reasoner fixes the default set and answers queries as world masks, so
# property checks over many premise/conclusion pairs do not redo the
# default-level work.


class Reasoner:
    name = "abstract"

    def __init__(self, defaults: Sequence[Default], vocab: Vocabulary):
        self.defaults = tuple(defaults)
        self.vocab = vocab

    def entails_mask(self, fact: int, query: int) -> bool:
        raise NotImplementedError

    def entails(self, fact: Formula, query: Formula) -> bool:
        return self.entails_mask(self.vocab.mask(fact), self.vocab.mask(query))


class PreferenceReasoner(Reasoner):
    """Entailment in a total preorder of worlds given by comparable keys.

    ``fact`` entails ``query`` iff every most-preferred model of ``fact`` is a
    model of ``query`` (vacuously true when ``fact`` has no models).
    """

    keys: list

    def entails_mask(self, fact: int, query: int) -> bool:
        if not fact:
            return True
        keys = self.keys
        inside = min((keys[w] for w in iter_worlds(fact & query)), default=None)
        outside = min((keys[w] for w in iter_worlds(fact & ~query)), default=None)
        if outside is None:
            return True
        if inside is None:
            return False
        return inside < outside

    def preferred(self, fact: int) -> list[int]:
        worlds = list(iter_worlds(fact))
        if not worlds:
            return []
        best = min(self.keys[w] for w in worlds)
        return [w for w in worlds if self.keys[w] == best]


class RankingReasoner(PreferenceReasoner):
    name = "ranking"

    def __init__(self, ranking: RankingFn, defaults: Sequence[Default] = ()):
        super().__init__(defaults, ranking.vocabulary)
        self.ranking = ranking
        self.keys = list(ranking.ranks)


class RationalClosure(RankingReasoner):
    name = "rc"

    def __init__(self, defaults: Sequence[Default], vocab: Vocabulary):
        super().__init__(z_ranking(defaults, vocab), defaults)


class LexicographicClosure(PreferenceReasoner):
    """Worlds compared by per-Z-group violation counts, highest group first."""

    name = "lc"

    def __init__(self, defaults: Sequence[Default], vocab: Vocabulary):
        super().__init__(defaults, vocab)
        masks = default_masks(self.defaults, vocab)
        part = _partition_masks(masks, vocab.full_mask)
        if not part.consistent:
            raise InconsistentDelta("default set admits no tolerance partition")
        self.partition = part
        z = part.z_values()
        n_groups = len(part.groups)
        self.keys = []
        for viol in _violations(masks, vocab.n_worlds):
            counts = [0] * n_groups
            for i in viol:
                counts[z[i]] += 1
            self.keys.append(tuple(reversed(counts)))

    def signature(self, w: int) -> tuple[int, ...]:
        """Violation counts per group, lowest group first."""
        return tuple(reversed(self.keys[w]))


class PreferentialClosure(Reasoner):
    """Adams-style p-entailment through p-inconsistency of the negated query."""

    name = "pc"

    def __init__(self, defaults: Sequence[Default], vocab: Vocabulary):
        super().__init__(defaults, vocab)
        self.masks = default_masks(self.defaults, vocab)

    def entails_mask(self, fact: int, query: int) -> bool:
        # the default fact ~> !query: verified on fact & !query, violated on fact & query
        extra = (fact & ~query & self.vocab.full_mask, fact & query)
        return not _partition_masks(self.masks + [extra], self.vocab.full_mask).consistent

    def tolerance_trace(self, fact: int, query: int) -> TolerancePartition:
        extra = (fact & ~query & self.vocab.full_mask, fact & query)
        return _partition_masks(self.masks + [extra], self.vocab.full_mask)


def _kb_masks(kb: KnowledgeBase, query: Formula) -> tuple[int, int]:
    vocab = kb.vocabulary
    return vocab.mask(fact_formula(kb)), vocab.mask(query)


def rc_entails(kb: KnowledgeBase, query: Formula) -> bool:
    """Rational closure (System Z) entailment."""
    return RationalClosure(kb.defaults, kb.vocabulary).entails_mask(*_kb_masks(kb, query))


def lex_entails(kb: KnowledgeBase, query: Formula) -> bool:
    """Lexicographic closure entailment."""
    return LexicographicClosure(kb.defaults, kb.vocabulary).entails_mask(*_kb_masks(kb, query))


def p_entails(kb: KnowledgeBase, query: Formula) -> bool:
    """Preferential (p-) entailment: adding ``facts ~> !query`` makes the defaults inconsistent."""
    return PreferentialClosure(kb.defaults, kb.vocabulary).entails_mask(*_kb_masks(kb, query))


def kappa_entails(R: RankingFn, fact: Formula, query: Formula) -> bool:
    return RankingReasoner(R).entails(fact, query)


def z_values(defaults: Sequence[Default], vocab: Vocabulary) -> tuple[int, ...]:
    return tolerance_partition(defaults, vocab).z_values()


__all__ = [
    "INCONSISTENT",
    "LexicographicClosure",
    "PreferentialClosure",
    "RankingFn",
    "RankingReasoner",
    "RationalClosure",
    "Reasoner",
    "TolerancePartition",
    "cond_kappa",
    "default_masks",
    "kappa",
    "kappa_entails",
    "lex_entails",
    "p_entails",
    "ranking_from_distribution",
    "ranking_satisfies",
    "rc_entails",
    "spohn_ranking",
    "tolerance_partition",
    "z_ranking",
    "z_values",
]
