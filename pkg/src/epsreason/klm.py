"""Random knowledge bases and KLM meta-property checks for the entailment strategies.

For each sampled default set the reasoner is fixed and the preferential rules
(Reflexivity, Left Logical Equivalence, Right Weakening, And, Or, Cautious
Monotony, Cut) plus Rational Monotony are tested on premise/conclusion
instances drawn from a pool of small formulas.  Antecedents are made to hold
by picking conclusions among the pool formulas the reasoner actually entails.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import EngineError
from .logic import (
    TOP,
    And,
    Default,
    Formula,
    Implies,
    KnowledgeBase,
    Not,
    Or,
    Var,
    Vocabulary,
    kb_to_text,
    to_text,
)
from .rankings import Reasoner, tolerance_partition

KLM_RULES = ("Reflexivity", "LLE", "RW", "And", "Or", "CM", "Cut")
RULES = KLM_RULES + ("RM",)
ATOM_NAMES = ("a", "b", "c", "d")


def random_formula(rng: random.Random, atoms, depth: int = 2) -> Formula:
    """Formula of connective depth at most ``depth`` over ``atoms``."""
    if depth == 0 or rng.random() < 0.3:
        return Var(rng.choice(atoms))
    op = rng.choice(("not", "and", "or", "implies", "and", "or"))
    if op == "not":
        return Not(random_formula(rng, atoms, depth - 1))
    left = random_formula(rng, atoms, depth - 1)
    right = random_formula(rng, atoms, depth - 1)
    return {"and": And, "or": Or, "implies": Implies}[op](left, right)


def random_kb(
    rng: random.Random, max_atoms: int = 4, max_defaults: int = 4, max_tries: int = 1000
) -> KnowledgeBase:
    """Consistent default set (no facts) over 2..max_atoms atoms."""
    for _ in range(max_tries):
        atoms = ATOM_NAMES[: rng.randint(2, max_atoms)]
        defaults = []
        for _ in range(rng.randint(1, max_defaults)):
            premise = TOP if rng.random() < 0.15 else random_formula(rng, atoms)
            defaults.append(Default(premise, random_formula(rng, atoms)))
        vocab = Vocabulary(tuple(atoms))
        if tolerance_partition(defaults, vocab).consistent:
            return KnowledgeBase(vocab, (), tuple(defaults))
    raise RuntimeError("could not sample a consistent default set")


@dataclass
class RuleStats:
    instances: int = 0
    applicable: int = 0
    failures: int = 0


@dataclass
class Counterexample:
    rule: str
    kb: str
    phi: str
    psi: str
    chi: str

    def __str__(self) -> str:
        return (
            f"[{self.rule}] phi = {self.phi}; psi = {self.psi}; chi = {self.chi}\n"
            + "\n".join("    " + line for line in self.kb.splitlines())
        )


@dataclass
class MetaReport:
    strategy: str
    trials: int
    seed: int
    rules: dict = field(default_factory=lambda: {r: RuleStats() for r in RULES})
    counterexamples: list = field(default_factory=list)
    skipped: int = 0

    def failures(self, rule: str) -> int:
        return self.rules[rule].failures

    @property
    def klm_failures(self) -> int:
        return sum(self.rules[r].failures for r in KLM_RULES)

    def examples(self, rule: str) -> list[Counterexample]:
        return [c for c in self.counterexamples if c.rule == rule]

    def format(self, max_examples: int = 3) -> str:
        lines = [f"strategy {self.strategy}: {self.trials} KBs, seed {self.seed}, skipped {self.skipped}"]
        for r in RULES:
            s = self.rules[r]
            lines.append(
                f"  {r:<12} applicable {s.applicable:>6}/{s.instances:<6} counterexamples {s.failures}"
            )
        for r in RULES:
            for c in self.examples(r)[:max_examples]:
                lines.append(str(c))
        return "\n".join(lines)


class _Instance:
    """Pool of (formula, mask) pairs and cached entailment for one reasoner."""

    def __init__(self, reasoner: Reasoner, kb: KnowledgeBase, rng: random.Random, pool_size: int):
        self.reasoner = reasoner
        self.vocab = kb.vocabulary
        self.rng = rng
        atoms = kb.vocabulary.atoms
        pool: list[Formula] = [TOP] + [Var(a) for a in atoms] + [Not(Var(a)) for a in atoms]
        for d in kb.defaults:
            pool += [d.premise, d.conclusion]
        pool += [random_formula(rng, atoms) for _ in range(pool_size)]
        self.pool = [(f, self.vocab.mask(f)) for f in pool]
        self.cache: dict[tuple[int, int], bool] = {}
        self.closure: dict[int, list] = {}

    def ent(self, phi: int, chi: int) -> bool:
        key = (phi, chi)
        got = self.cache.get(key)
        if got is None:
            got = self.cache[key] = self.reasoner.entails_mask(phi, chi)
        return got

    def mask(self, f: Formula) -> int:
        return self.vocab.mask(f)

    def pick(self) -> Formula:
        return self.rng.choice(self.pool)[0]

    def entailed(self, phi: Formula) -> list[Formula]:
        m = self.mask(phi)
        got = self.closure.get(m)
        if got is None:
            got = self.closure[m] = [g for g, gm in self.pool if self.ent(m, gm)]
        return got

    def pick_entailed(self, phi: Formula) -> Formula | None:
        options = self.entailed(phi)
        if not options:
            return None
        # prefer conclusions that are not classical consequences of phi
        m = self.mask(phi)
        defeasible = [g for g in options if m & ~self.mask(g) & self.vocab.full_mask]
        if defeasible and self.rng.random() < 0.8:
            return self.rng.choice(defeasible)
        return self.rng.choice(options)


def _check_rule(rule: str, inst: _Instance):
    """Return ``(applicable, holds, (phi, psi, chi))`` for one random instance."""
    rng = inst.rng
    ent, mask = inst.ent, inst.mask
    phi = inst.pick()
    if rule == "Reflexivity":
        return True, ent(mask(phi), mask(phi)), (phi, phi, phi)
    if rule == "LLE":
        psi = rng.choice((Not(Not(phi)), And(phi, TOP), Or(phi, And(phi, Not(phi)))))
        chi = inst.pick()
        return True, ent(mask(phi), mask(chi)) == ent(mask(psi), mask(chi)), (phi, psi, chi)
    if rule == "RW":
        psi = inst.pick_entailed(phi)
        if psi is None:
            return False, True, None
        chi = Or(psi, inst.pick())
        return True, ent(mask(phi), mask(chi)), (phi, psi, chi)
    if rule in ("And", "CM"):
        psi, chi = inst.pick_entailed(phi), inst.pick_entailed(phi)
        if psi is None:
            return False, True, None
        if rule == "And":
            return True, ent(mask(phi), mask(And(psi, chi))), (phi, psi, chi)
        return True, ent(mask(And(phi, psi)), mask(chi)), (phi, psi, chi)
    if rule == "Or":
        psi = inst.pick()
        both = [g for g in inst.entailed(phi) if g in set(inst.entailed(psi))]
        if not both:
            return False, True, None
        chi = rng.choice(both)
        return True, ent(mask(Or(phi, psi)), mask(chi)), (phi, psi, chi)
    if rule == "Cut":
        psi = inst.pick_entailed(phi)
        if psi is None:
            return False, True, None
        chi = inst.pick_entailed(And(phi, psi))
        if chi is None:
            return False, True, None
        return True, ent(mask(phi), mask(chi)), (phi, psi, chi)
    if rule == "RM":
        chi = inst.pick_entailed(phi)
        if chi is None:
            return False, True, None
        candidates = [g for g, gm in inst.pool if not ent(mask(phi), mask(Not(g)))]
        if not candidates:
            return False, True, None
        psi = rng.choice(candidates)
        return True, ent(mask(And(phi, psi)), mask(chi)), (phi, psi, chi)
    raise ValueError(f"unknown rule {rule!r}")


def check_meta_properties(
    strategy: str,
    trials: int = 500,
    seed: int = 0,
    per_rule: int = 6,
    pool_size: int = 10,
    max_atoms: int = 4,
    max_defaults: int = 4,
) -> MetaReport:
    """Sample ``trials`` random default sets and test the KLM rules plus Rational Monotony.

    Knowledge bases on which the strategy itself fails (e.g. an ME solver
    error) are counted in ``skipped``.  Every failing instance is kept as a
    :class:`Counterexample` holding the knowledge base verbatim.
    """
    from .bench import make_reasoner

    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = random.Random(seed)
    report = MetaReport(strategy, trials, seed)
    for _ in range(trials):
        kb = random_kb(rng, max_atoms, max_defaults)
        try:
            reasoner = make_reasoner(strategy, kb)
        except EngineError:
            report.skipped += 1
            continue
        inst = _Instance(reasoner, kb, rng, pool_size)
        for rule in RULES:
            stats = report.rules[rule]
            for _ in range(per_rule):
                applicable, holds, witness = _check_rule(rule, inst)
                stats.instances += 1
                if not applicable:
                    continue
                stats.applicable += 1
                if not holds:
                    stats.failures += 1
                    phi, psi, chi = witness
                    report.counterexamples.append(
                        Counterexample(rule, kb_to_text(kb), to_text(phi), to_text(psi), to_text(chi))
                    )
    return report
