"""Query dispatch over the five strategies and the built-in benchmark suite."""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import InconsistentDelta, TooLargeForOracle
from .field import INF
from .logic import (
    Formula,
    KnowledgeBase,
    fact_formula,
    parse_formula,
    to_text,
)
from .maxent import DEFAULT_MAX_ITERS, MaxEntReasoner, PluralSampler, me_entails_plural
from .oracle import p_entails_oracle
from .rankings import (
    LexicographicClosure,
    PreferentialClosure,
    RationalClosure,
    Reasoner,
    tolerance_partition,
)

STRATEGIES = ("pc", "rc", "lc", "me", "me-plural")
INSTANCES = ("ES", "EI", "GE", "AP", "RE", "NE")

ENTAILED = "Entailed"
NOT_ENTAILED = "NotEntailed"
UNKNOWN = "Unknown"

NON_INFERENCE_NOTE = (
    "GE, AP, RE and NE are checked as non-inferences: a strategy satisfies them "
    "by NOT concluding the listed queries (GE lists both psi and !psi)."
)

# Expected satisfaction table (1 = satisfied, 0 = violated).
REFERENCE_TABLE = {
    "me-plural": dict(ES=1, EI=1, GE=1, AP=1, RE=1, NE=1),
    "me": dict(ES=1, EI=1, GE=1, AP=1, RE=1, NE=1),
    "pc": dict(ES=1, EI=0, GE=1, AP=1, RE=1, NE=1),
    "rc": dict(ES=1, EI=0, GE=0, AP=0, RE=1, NE=1),
    "lc": dict(ES=1, EI=1, GE=0, AP=0, RE=0, NE=0),
}
FLAGGED_CELLS = (("pc", "ES"),)


def rational_text(x) -> str:
    if x == INF:
        return "inf"
    return str(Fraction(x))


# --------------------------------------------------------------------------
# instances


@dataclass(frozen=True)
class BenchInstance:
    name: str
    kb: KnowledgeBase
    checks: tuple[tuple[Formula, str], ...]  # (query, "must-infer" | "must-not-infer")


def _instance(name, facts, defaults, checks) -> BenchInstance:
    kb = KnowledgeBase.build(facts, defaults)
    return BenchInstance(name, kb, tuple((parse_formula(q), pol) for q, pol in checks))


def builtin_instances() -> dict[str, BenchInstance]:
    return {
        "ES": _instance(
            "ES",
            ["phi"],
            [("phi", "alpha"), ("alpha", "beta"), ("beta", "psi"), ("alpha", "!psi")],
            [("!psi", "must-infer")],
        ),
        "EI": _instance(
            "EI",
            ["alpha"],
            [("alpha", "beta"), ("alpha", "!psi"), ("beta", "psi"), ("beta", "phi")],
            [("phi", "must-infer")],
        ),
        "GE": _instance(
            "GE",
            ["alpha & beta & gamma"],
            [("alpha", "!psi"), ("gamma", "!psi"), ("alpha & beta", "psi")],
            [("psi", "must-not-infer"), ("!psi", "must-not-infer")],
        ),
        "AP": _instance(
            "AP",
            ["alpha | beta & gamma"],
            [("true", "!beta"), ("true", "!gamma"), ("alpha | beta", "!alpha")],
            [("!alpha", "must-not-infer")],
        ),
        "RE": _instance(
            "RE",
            ["!phi"],
            [("true", "phi"), ("true", "phi | psi")],
            [("psi", "must-not-infer")],
        ),
        "NE": _instance(
            "NE",
            ["!phi"],
            [("true", "phi"), ("true", "psi"), ("!phi | !psi", "!phi")],
            [("psi", "must-not-infer")],
        ),
    }


# --------------------------------------------------------------------------
# queries


def make_reasoner(strategy: str, kb: KnowledgeBase, max_iters: int = DEFAULT_MAX_ITERS) -> Reasoner:
    """Reasoner for a fixed default set (``me-plural`` is not a single reasoner)."""
    if strategy == "pc":
        return PreferentialClosure(kb.defaults, kb.vocabulary)
    if strategy == "rc":
        return RationalClosure(kb.defaults, kb.vocabulary)
    if strategy == "lc":
        return LexicographicClosure(kb.defaults, kb.vocabulary)
    if strategy == "me":
        return MaxEntReasoner(kb, None, max_iters)
    raise ValueError(f"unknown strategy {strategy!r}")


@dataclass
class QueryResult:
    verdict: str
    strategy: str
    query: str
    weights: tuple | None = None
    ranking: dict | None = None
    trace: dict = field(default_factory=dict)
    seed: int | None = None

    @property
    def entailed(self) -> bool:
        return self.verdict == ENTAILED

    def to_dict(self) -> dict:
        out = {"verdict": self.verdict, "strategy": self.strategy, "query": self.query}
        if self.weights is not None:
            out["weights"] = [rational_text(z) for z in self.weights]
        if self.ranking is not None:
            out["ranking"] = {bits: rational_text(r) for bits, r in self.ranking.items()}
        if self.trace:
            out["trace"] = self.trace
        if self.seed is not None:
            out["seed"] = self.seed
        return out


def _labels(kb: KnowledgeBase, groups) -> list[list[str]]:
    extra = len(kb.defaults)
    return [
        [str(kb.defaults[i]) if i < extra else "<facts ~> !query>" for i in group]
        for group in groups
    ]


def run_query(
    kb: KnowledgeBase,
    strategy: str,
    query: Formula | str,
    sampler: PluralSampler | None = None,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> QueryResult:
    """Answer ``query`` under ``strategy`` with a trace of the supporting structure.

    Raises :class:`InconsistentDelta` for a default set without a tolerance
    partition, and propagates ME solver errors for the ``me`` strategy.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if isinstance(query, str):
        query = parse_formula(query, kb.vocabulary)
    vocab = kb.vocabulary
    part = tolerance_partition(kb.defaults, vocab)
    if not part.consistent:
        raise InconsistentDelta("default set admits no tolerance partition")
    fact, q = vocab.mask(fact_formula(kb)), vocab.mask(query)
    result = QueryResult(NOT_ENTAILED, strategy, to_text(query))

    if strategy == "me-plural":
        sampler = sampler or PluralSampler()
        detail = me_entails_plural(kb, query, sampler, max_iters, details=True)
        result.verdict = detail.verdict
        result.seed = sampler.seed
        result.trace = {
            "samples": detail.tried,
            "refuting": [[rational_text(x) for x in t] for t in detail.failures[:5]],
            "errors": [[[rational_text(x) for x in t], e] for t, e in detail.errors[:5]],
        }
        return result

    reasoner = make_reasoner(strategy, kb, max_iters)
    ok = reasoner.entails_mask(fact, q)
    result.verdict = ENTAILED if ok else NOT_ENTAILED
    if strategy == "pc":
        trace = reasoner.tolerance_trace(fact, q)
        result.trace = {
            "augmented_partition": _labels(kb, trace.groups) if trace.consistent else "inconsistent"
        }
    elif strategy == "rc":
        result.ranking = reasoner.ranking.table()
        result.trace = {"z_partition": _labels(kb, part.groups)}
    elif strategy == "lc":
        result.trace = {
            "z_partition": _labels(kb, part.groups),
            "signatures": {
                vocab.world_bits(w): list(reasoner.signature(w)) for w in range(vocab.n_worlds)
            },
        }
    elif strategy == "me":
        result.weights = reasoner.weights.z
        result.ranking = reasoner.ranking.table()
        result.trace = {"iterations": reasoner.weights.iterations}
    return result


# --------------------------------------------------------------------------
# benchmark report


@dataclass
class BenchReport:
    matrix: dict  # strategy -> instance -> 1 | 0 | None (unknown)
    checks: dict  # strategy -> instance -> list of [query, polarity, verdict]
    flagged: list
    timing: dict
    seed: int
    samples: int
    note: str = NON_INFERENCE_NOTE

    def to_json(self, indent: int | None = 2) -> str:
        data = asdict(self)
        data["matrix"] = {
            s: {i: ("unknown" if v is None else v) for i, v in row.items()}
            for s, row in self.matrix.items()
        }
        data["flaggedCells"] = data.pop("flagged")
        return json.dumps(data, indent=indent, sort_keys=False)

    @classmethod
    def from_json(cls, text: str) -> "BenchReport":
        data = json.loads(text)
        data["matrix"] = {
            s: {i: (None if v == "unknown" else v) for i, v in row.items()}
            for s, row in data["matrix"].items()
        }
        data["flagged"] = data.pop("flaggedCells")
        return cls(**data)

    def mismatches(self) -> list[tuple[str, str, object, int]]:
        """Cells differing from the reference table, excluding flagged cells."""
        out = []
        for s, row in self.matrix.items():
            for i, v in row.items():
                if (s, i) in FLAGGED_CELLS:
                    continue
                expected = REFERENCE_TABLE[s][i]
                if v != expected:
                    out.append((s, i, v, expected))
        return out

    def format_table(self) -> str:
        names = list(next(iter(self.matrix.values())).keys()) if self.matrix else []
        lines = ["strategy   " + " ".join(f"{n:>3}" for n in names)]
        for s, row in self.matrix.items():
            cells = []
            for n in names:
                v = row[n]
                mark = "*" if (s, n) in FLAGGED_CELLS else " "
                cells.append(f"{'?' if v is None else v:>2}{mark}")
            lines.append(f"{s:<10} " + " ".join(cells))
        for f in self.flagged:
            lines.append(
                f"* ({f['strategy']}, {f['instance']}): p-entailment cell {f['cell']}, "
                f"ranked-model oracle cell {f['oracle_cell']}, reference {f['reference']}"
            )
        lines.append(f"note: {self.note}")
        return "\n".join(lines)


def _cell(verdicts: Sequence[tuple[str, str]]) -> int | None:
    value: int | None = 1
    for polarity, verdict in verdicts:
        if verdict == UNKNOWN:
            if value == 1:
                value = None
            continue
        want = ENTAILED if polarity == "must-infer" else NOT_ENTAILED
        if verdict != want:
            value = 0
    return value


def run_benchmarks(
    strategies: Sequence[str] = STRATEGIES,
    sampler: PluralSampler | None = None,
    instances: dict[str, BenchInstance] | None = None,
) -> BenchReport:
    sampler = sampler or PluralSampler()
    instances = instances or builtin_instances()
    matrix: dict = {}
    checks: dict = {}
    timing: dict = {}
    flagged = []
    for s in strategies:
        start = time.perf_counter()
        matrix[s], checks[s] = {}, {}
        for name, inst in instances.items():
            rows = []
            for query, polarity in inst.checks:
                try:
                    verdict = run_query(inst.kb, s, query, sampler).verdict
                except Exception as exc:  # failures become cells
                    verdict = UNKNOWN
                    rows.append([to_text(query), polarity, verdict, type(exc).__name__])
                    continue
                rows.append([to_text(query), polarity, verdict])
            checks[s][name] = rows
            matrix[s][name] = _cell([(r[1], r[2]) for r in rows])
            if (s, name) in FLAGGED_CELLS:
                oracle_rows = []
                for query, polarity in inst.checks:
                    try:
                        ok = p_entails_oracle(inst.kb, query, max_worlds=16)
                        oracle_rows.append((polarity, ENTAILED if ok else NOT_ENTAILED))
                    except TooLargeForOracle:
                        oracle_rows.append((polarity, UNKNOWN))
                flagged.append(
                    {
                        "strategy": s,
                        "instance": name,
                        "cell": matrix[s][name],
                        "oracle_cell": _cell(oracle_rows),
                        "oracle_verdicts": [v for _, v in oracle_rows],
                        "reference": REFERENCE_TABLE[s][name],
                    }
                )
        timing[s] = round(time.perf_counter() - start, 6)
    return BenchReport(matrix, checks, flagged, timing, sampler.seed, sampler.samples)
