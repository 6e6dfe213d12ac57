"""Maximum-entropy entailment for infinitesimally bounded defaults.

A default ``d_i`` with strength ``t_i`` becomes the constraint
``P(not conclusion_i | premise_i) <= e**t_i``.  The order-of-magnitude shape of
the entropy maximiser is the ranking ``kappa_z(w) = sum of z_i over defaults
violated by w``, where the weights ``z`` solve

    z_i = max(0, t_i + V_i(z) - W_i(z))

with ``V_i`` the least rank of a world verifying ``d_i`` and ``W_i`` the least
rank, ignoring ``z_i`` itself, of a world violating it.  Zero weights are
allowed: a default whose constraint already holds with slack stays inert.
"""

from __future__ import annotations

import math
import random
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .distribution import NPDistribution
from .errors import EngineError, InconsistentDelta, MEDivergence, MEInfeasible, SolverFailure
from .field import INF, EpsPoly, EpsRatio
from .logic import KnowledgeBase, fact_formula, iter_worlds
from .rankings import (
    RankingFn,
    RankingReasoner,
    _partition_masks,
    _violations,
    default_masks,
)

DEFAULT_MAX_ITERS = 1000


@dataclass(frozen=True)
class MEWeights:
    z: tuple[Fraction, ...]
    iterations: int
    feasible: bool = True


class _System:
    """World/default incidence data for one knowledge base."""

    def __init__(self, kb: KnowledgeBase):
        vocab = kb.vocabulary
        self.vocab = vocab
        self.masks = default_masks(kb.defaults, vocab)
        if not _partition_masks(self.masks, vocab.full_mask).consistent:
            raise InconsistentDelta("default set admits no tolerance partition")
        self.violations = _violations(self.masks, vocab.n_worlds)
        self.verifiers = [list(iter_worlds(v)) for v, _ in self.masks]
        self.violators = [list(iter_worlds(f)) for _, f in self.masks]

    def ranks(self, z: Sequence[Fraction]) -> list[Fraction]:
        return [sum((z[i] for i in viol), Fraction(0)) for viol in self.violations]

    def margins(self, z: Sequence[Fraction]) -> list[tuple[Fraction, Fraction]]:
        """``(V_i, W_i)`` for every default."""
        kz = self.ranks(z)
        out = []
        for i in range(len(self.masks)):
            v = min(kz[w] for w in self.verifiers[i])
            wi = min((kz[w] - z[i] for w in self.violators[i]), default=INF)
            out.append((v, wi))
        return out


def _strengths(kb: KnowledgeBase, t) -> tuple[Fraction, ...]:
    if t is None:
        return kb.strengths
    t = tuple(Fraction(x) for x in t)
    if len(t) != len(kb.defaults):
        raise ValueError(f"expected {len(kb.defaults)} strengths, got {len(t)}")
    if any(x <= 0 for x in t):
        raise ValueError("strengths must be positive")
    return t


def me_weights(kb: KnowledgeBase, t=None, max_iters: int = DEFAULT_MAX_ITERS) -> MEWeights:
    """Solve the weight fixpoint by synchronous iteration from ``z = t``.

    ``t`` defaults to the declared default strengths (all 1 when undeclared).
    Raises :class:`MEDivergence` when no fixpoint is reached within
    ``max_iters`` and :class:`MEInfeasible` when the fixpoint leaves some
    default with margin below its strength.
    """
    t = _strengths(kb, t)
    system = _System(kb)
    z = list(t)
    for iteration in range(1, max_iters + 1):
        new = []
        for i, (v, w) in enumerate(system.margins(z)):
            # a default without violating worlds never needs weight
            new.append(Fraction(0) if w == INF else max(Fraction(0), t[i] + v - w))
        if new == z:
            break
        z = new
    else:
        raise MEDivergence(f"no fixpoint after {max_iters} iterations")
    for i, (v, w) in enumerate(system.margins(z)):
        if w + z[i] < v + t[i]:
            raise MEInfeasible(f"default {i} misses its margin at the fixpoint z={z}")
        if z[i] > 0 and w + z[i] != v + t[i]:
            raise MEInfeasible(f"complementary slackness fails for default {i}")
    return MEWeights(tuple(z), iteration, True)


def me_ranking(kb: KnowledgeBase, weights: MEWeights | Sequence) -> RankingFn:
    """Rank of a world = sum of the weights of the defaults it violates."""
    z = weights.z if isinstance(weights, MEWeights) else tuple(Fraction(x) for x in weights)
    vocab = kb.vocabulary
    ranks = [Fraction(0)] * vocab.n_worlds
    for zi, (_, viol) in zip(z, default_masks(kb.defaults, vocab)):
        if zi:
            for w in iter_worlds(viol):
                ranks[w] += zi
    return RankingFn.normalised(vocab, ranks)


class MaxEntReasoner(RankingReasoner):
    """Entailment in the ME ranking of a fixed default set."""

    name = "me"

    def __init__(self, kb: KnowledgeBase, t=None, max_iters: int = DEFAULT_MAX_ITERS):
        self.weights = me_weights(kb, t, max_iters)
        super().__init__(me_ranking(kb, self.weights), kb.defaults)


def me_entails(kb: KnowledgeBase, query, t=None, max_iters: int = DEFAULT_MAX_ITERS) -> bool:
    """Single-bounded ME entailment: ``kappa(facts & !query) > kappa(facts & query)``."""
    reasoner = MaxEntReasoner(kb, t, max_iters)
    vocab = kb.vocabulary
    return reasoner.entails_mask(vocab.mask(fact_formula(kb)), vocab.mask(query))


# --------------------------------------------------------------------------
# plural bounds


@dataclass(frozen=True)
class PluralSampler:
    """Strength vectors used to approximate "for all independent bounds".

    Besides the all-ones vector and one dominant vector per default, ``samples``
    random vectors are drawn with entries ``k/denominator`` in ``[low, high]``.
    """

    samples: int = 64
    seed: int = 0
    low: Fraction = Fraction(1, 2)
    high: Fraction = Fraction(4)
    denominator: int = 4
    dominant: Fraction = Fraction(8)

    def vectors(self, n: int) -> list[tuple[Fraction, ...]]:
        out = [tuple([Fraction(1)] * n)]
        for i in range(n):
            v = [Fraction(1)] * n
            v[i] = Fraction(self.dominant)
            out.append(tuple(v))
        rng = random.Random(self.seed)
        lo = math.ceil(Fraction(self.low) * self.denominator)
        hi = math.floor(Fraction(self.high) * self.denominator)
        lo = max(lo, 1)
        for _ in range(self.samples):
            out.append(tuple(Fraction(rng.randint(lo, hi), self.denominator) for _ in range(n)))
        return out


@dataclass
class PluralResult:
    verdict: str
    tried: int = 0
    failures: list = field(default_factory=list)
    errors: list = field(default_factory=list)


def me_entails_plural(
    kb: KnowledgeBase,
    query,
    sampler: PluralSampler | None = None,
    max_iters: int = DEFAULT_MAX_ITERS,
    details: bool = False,
):
    """Sampled plural-bounded ME entailment.

    ``NotEntailed`` as soon as one strength vector refutes the query (sound for
    refutation), ``Entailed`` when every sample entails it, ``Unknown`` when a
    sample fails to solve and none refutes.
    """
    sampler = sampler or PluralSampler()
    vocab = kb.vocabulary
    fact, q = vocab.mask(fact_formula(kb)), vocab.mask(query)
    result = PluralResult("Entailed")
    for t in sampler.vectors(len(kb.defaults)):
        result.tried += 1
        try:
            ok = MaxEntReasoner(kb, t, max_iters).entails_mask(fact, q)
        except (MEDivergence, MEInfeasible) as exc:
            result.errors.append((t, type(exc).__name__))
            continue
        if not ok:
            result.failures.append(t)
    if result.failures:
        result.verdict = "NotEntailed"
    elif result.errors:
        result.verdict = "Unknown"
    return result if details else result.verdict


# --------------------------------------------------------------------------
# witnesses and oracles


def construct_me_distribution(kb: KnowledgeBase, weights: MEWeights | Sequence) -> NPDistribution:
    """Leading-order witness ``p(w) = e**rank(w) / sum_v e**rank(v)``."""
    R = me_ranking(kb, weights)
    return NPDistribution.from_weights(
        kb.vocabulary, [EpsRatio(EpsPoly.monomial(r)) for r in R.ranks]
    )


@dataclass(frozen=True)
class OracleResult:
    ranks: tuple[int, ...]
    log_probs: tuple[float, ...]
    multipliers: tuple[float, ...]
    sweeps: int
    gap: float


def numeric_me_oracle(
    kb: KnowledgeBase,
    t=None,
    u: Fraction = Fraction(1, 2**20),
    tol: float = 1e-9,
    max_sweeps: int = 200_000,
    clamp: Fraction | None = None,
) -> OracleResult:
    """Classical maximum entropy at the standard value ``e = u``.

    Maximises entropy over the simplex subject to the linear constraints
    ``P(premise & !conclusion) <= u**t_i * P(premise)`` by exact cyclic
    coordinate descent on the convex dual, working in log space.  Returns
    ``round(log_u p(w))`` clamped to ``[0, clamp]``.
    """
    t = _strengths(kb, t)
    vocab = kb.vocabulary
    masks = default_masks(kb.defaults, vocab)
    n_worlds = vocab.n_worlds
    k = len(masks)
    log_u = math.log(u.numerator) - math.log(u.denominator)
    viol = np.zeros((k, n_worlds), dtype=bool)
    ver = np.zeros((k, n_worlds), dtype=bool)
    for i, (v, f) in enumerate(masks):
        viol[i, list(iter_worlds(f))] = True
        ver[i, list(iter_worlds(v))] = True
    bound = np.array([math.exp(float(ti) * log_u) for ti in t])
    # constraint coefficients a_i(w): (1 - b) on violators, -b on verifiers
    a = np.where(viol, 1.0 - bound[:, None], 0.0) - np.where(ver, bound[:, None], 0.0)
    log_target = np.log(bound) - np.log1p(-bound)
    lam = np.zeros(k)
    gap = math.inf

    def logsumexp(x):
        m = x.max()
        return m + math.log(np.exp(x - m).sum())

    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        for i in range(k):
            if not viol[i].any():
                lam[i] = 0.0
                continue
            logw = -(lam @ a)
            s_viol = logsumexp(logw[viol[i]])
            s_ver = logsumexp(logw[ver[i]])
            # along coordinate i the violator/verifier mass ratio scales by exp(-delta)
            delta = s_viol - s_ver - log_target[i]
            lam[i] = max(0.0, lam[i] + delta)
        logw = -(lam @ a)
        gap = 0.0
        for i in range(k):
            if not viol[i].any():
                continue
            excess = logsumexp(logw[viol[i]]) - logsumexp(logw[ver[i]]) - log_target[i]
            gap = max(gap, abs(excess) if lam[i] > 0 else max(excess, 0.0))
        if gap <= tol:
            break
    else:
        raise SolverFailure(f"stationarity gap {gap:.3g} after {max_sweeps} sweeps")
    logw = -(lam @ a)
    logp = logw - logsumexp(logw)
    if clamp is None:
        try:
            clamp = sum(me_weights(kb, t).z, Fraction(0)) + k
        except EngineError:
            clamp = Fraction(4 * (k + 1))
    ranks = tuple(int(min(max(round(lp / log_u), 0), clamp)) for lp in logp)
    return OracleResult(ranks, tuple(logp), tuple(lam), sweeps, gap)


def me_cross_check(kb: KnowledgeBase, t=None, max_rank: int = 4) -> bool:
    """Compare the fixpoint ranking against the numeric oracle; warn on disagreement."""
    R = me_ranking(kb, me_weights(kb, t))
    oracle = numeric_me_oracle(kb, t)
    bad = [
        w for w, r in enumerate(R.ranks) if r <= max_rank and oracle.ranks[w] != r
    ]
    if bad:
        warnings.warn(
            f"numeric ME oracle disagrees with the weight fixpoint on worlds {bad}",
            RuntimeWarning,
            stacklevel=2,
        )
    return not bad


def random_feasible_distributions(
    kb: KnowledgeBase,
    count: int,
    seed: int = 0,
    max_exponent: int = 2,
    t=None,
    exclude: NPDistribution | None = None,
    max_draws: int = 1_000_000,
) -> list[NPDistribution]:
    """Random coherent distributions meeting every default as ``P(violation | premise) <= e**t_i``.

    World weights are ``c0*e**k + c1*e**(k+1)`` with small random integers
    (``c1`` present half of the time), normalised.  Exponent vectors whose
    leading-order ranking already misses a margin are rejected before any
    field arithmetic.
    """
    from .distribution import ConstraintMode, satisfies_default

    t = _strengths(kb, t)
    vocab = kb.vocabulary
    masks = default_masks(kb.defaults, vocab)
    rng = random.Random(seed)
    out: list[NPDistribution] = []
    for _ in range(max_draws):
        if len(out) >= count:
            break
        ks = [rng.randint(0, max_exponent) for _ in range(vocab.n_worlds)]
        low = min(ks)
        ks = [k - low for k in ks]
        if not all(
            min((ks[w] for w in iter_worlds(viol)), default=INF)
            >= min(ks[w] for w in iter_worlds(ver)) + ti
            for (ver, viol), ti in zip(masks, t)
        ):
            continue
        weights = []
        for k in ks:
            terms = {k: rng.randint(1, 4)}
            if rng.random() < 0.5:
                terms[k + 1] = rng.choice((-2, -1, 1, 2, 3))
            weights.append(EpsRatio(EpsPoly(terms)))
        P = NPDistribution.from_weights(vocab, weights)
        if P == exclude:
            continue
        if all(
            satisfies_default(P, d, ConstraintMode.weak_bound(ti))
            for d, ti in zip(kb.defaults, t)
        ):
            out.append(P)
    if len(out) < count:
        raise SolverFailure(f"only {len(out)} feasible samples in {max_draws} draws")
    return out
