"""Brute-force check of p-entailment against ranked models.

``p_entails_oracle`` decides whether every admissible ranking (all worlds
possible, values bounded by ``cap``) prefers ``facts & query`` over
``facts & !query``.  It never consults tolerance partitions, so it serves as
an independent check on :func:`epsreason.rankings.p_entails`.

Two enumerators are used:

* up to 8 worlds, every normalised ranking with values in ``0..cap`` is laid
  out in a numpy table and filtered in bulk;
* larger vocabularies (only on request) are searched level by level, as
  ordered partitions of the worlds, with early exit on the first
  counterexample.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import TooLargeForOracle
from .logic import KnowledgeBase, fact_formula, iter_worlds
from .rankings import default_masks

DEFAULT_MAX_WORLDS = 8
_TABLE_MAX_WORLDS = 8
_EMPTY = 127


@lru_cache(maxsize=8)
def ranking_table(n_worlds: int, cap: int) -> np.ndarray:
    """All rankings of ``n_worlds`` worlds with values in ``0..cap`` and minimum 0."""
    grids = np.indices((cap + 1,) * n_worlds, dtype=np.int8).reshape(n_worlds, -1).T
    return np.ascontiguousarray(grids[(grids == 0).any(axis=1)])


class _MinTable:
    """Per-ranking minimum over a world mask, memoised by mask."""

    def __init__(self, n_worlds: int, cap: int):
        self.table = ranking_table(n_worlds, cap)
        self.cache: dict[int, np.ndarray] = {}

    def __call__(self, mask: int) -> np.ndarray:
        got = self.cache.get(mask)
        if got is None:
            cols = list(iter_worlds(mask))
            if cols:
                got = self.table[:, cols].min(axis=1)
            else:
                got = np.full(len(self.table), _EMPTY, dtype=np.int8)
            self.cache[mask] = got
        return got


@lru_cache(maxsize=8)
def _min_table(n_worlds: int, cap: int) -> _MinTable:
    return _MinTable(n_worlds, cap)


def admissible(masks: Sequence[tuple[int, int]], n_worlds: int, cap: int) -> np.ndarray:
    """Boolean vector over :func:`ranking_table` rows satisfying every default with margin 1."""
    mins = _min_table(n_worlds, cap)
    ok = np.ones(len(mins.table), dtype=bool)
    for ver, viol in masks:
        if not viol:
            continue  # exceptions impossible: satisfied
        ok &= mins(viol).astype(np.int16) >= mins(ver).astype(np.int16) + 1
    return ok


class TableOracle:
    """Ranked-model oracle for one default set over at most 8 worlds."""

    def __init__(self, masks: Sequence[tuple[int, int]], n_worlds: int, cap: int):
        if n_worlds > _TABLE_MAX_WORLDS:
            raise TooLargeForOracle(f"{n_worlds} worlds exceed the table limit")
        self.mins = _min_table(n_worlds, cap)
        self.full = (1 << n_worlds) - 1
        self.rows = np.flatnonzero(admissible(masks, n_worlds, cap))

    @property
    def count(self) -> int:
        return len(self.rows)

    def entails_mask(self, fact: int, query: int) -> bool:
        if not fact or not len(self.rows):
            return True
        inside = self.mins(fact & query)[self.rows]
        outside = self.mins(fact & ~query & self.full)[self.rows]
        return bool((inside < outside).all())


def _level_search(
    masks: Sequence[tuple[int, int]],
    n_worlds: int,
    fact: int,
    query: int,
    cap: int,
    budget: int,
) -> bool:
    """Search ordered partitions (level 0 first) for a counterexample ranking."""
    full = (1 << n_worlds) - 1
    bad = fact & ~query & full
    n = len(masks)
    touch = [ver | viol for ver, viol in masks]
    # a world may join a level only once every default it violates is settled,
    # i.e. some verifier already sits on a strictly lower level
    violated_by = [0] * n_worlds
    for i, (_, viol) in enumerate(masks):
        for w in iter_worlds(viol):
            violated_by[w] |= 1 << i
    nodes = 0

    def allowed(remaining: int, settled: int) -> int:
        out = 0
        for w in iter_worlds(remaining):
            if violated_by[w] & ~settled == 0:
                out |= 1 << w
        return out

    def settle(level: int, settled: int) -> int:
        for i in range(n):
            if level & touch[i]:
                settled |= 1 << i
        return settled

    def completable(remaining: int, settled: int, levels_left: int) -> bool:
        while remaining:
            if levels_left <= 0:
                return False
            level = allowed(remaining, settled)
            if not level:
                return False
            settled = settle(level, settled)
            remaining &= ~level
            levels_left -= 1
        return True

    def submasks(m: int):
        s = m
        while s:
            yield s
            s = (s - 1) & m

    def dfs(remaining: int, settled: int, levels_left: int) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise TooLargeForOracle(f"search budget of {budget} nodes exhausted")
        if levels_left <= 0:
            return False
        avail = allowed(remaining, settled)
        # invariant: no fact world has been placed yet
        for level in submasks(avail):
            rest = remaining & ~level
            if not level & fact:
                if dfs(rest, settle(level, settled), levels_left - 1):
                    return True
                continue
            # this level holds the most plausible fact worlds
            if not level & bad:
                continue
            if completable(rest, settle(level, settled), levels_left - 1):
                return True
        return False

    if not fact:
        return True
    return not dfs(full, 0, cap + 1)


def p_entails_oracle(
    kb: KnowledgeBase,
    query,
    cap: int | None = None,
    max_worlds: int = DEFAULT_MAX_WORLDS,
    budget: int = 2_000_000,
) -> bool:
    """True iff every admissible finite ranking with values ``<= cap`` verifies the query.

    ``cap`` defaults to ``len(defaults) + 1``.  Vocabularies with more than
    ``max_worlds`` worlds raise :class:`TooLargeForOracle`.
    """
    vocab = kb.vocabulary
    n_worlds = vocab.n_worlds
    if n_worlds > max_worlds:
        raise TooLargeForOracle(f"{n_worlds} worlds exceed the oracle guard of {max_worlds}")
    if cap is None:
        cap = len(kb.defaults) + 1
    masks = default_masks(kb.defaults, vocab)
    fact, q = vocab.mask(fact_formula(kb)), vocab.mask(query)
    if n_worlds <= _TABLE_MAX_WORLDS:
        return TableOracle(masks, n_worlds, cap).entails_mask(fact, q)
    return _level_search(masks, n_worlds, fact, q, cap, budget)


def level_search_entails(kb: KnowledgeBase, query, cap: int | None = None, budget: int = 2_000_000) -> bool:
    """The ordered-partition search regardless of vocabulary size (for cross-checks)."""
    vocab = kb.vocabulary
    if cap is None:
        cap = len(kb.defaults) + 1
    masks = default_masks(kb.defaults, vocab)
    fact, q = vocab.mask(fact_formula(kb)), vocab.mask(query)
    return _level_search(masks, vocab.n_worlds, fact, q, cap, budget)
