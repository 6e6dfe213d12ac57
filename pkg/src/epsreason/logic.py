"""Propositional formulas, the knowledge-base file format and world enumeration.

Worlds are integers in ``[0, 2**n)``: bit ``i`` holds the truth value of the
``i``-th atom of the vocabulary.  A set of worlds is an ``int`` bitmask with bit
``w`` set when world ``w`` belongs to the set, so boolean connectives become
bitwise operations and logical equivalence is mask equality.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence, Union

from .errors import (
    DuplicateAtomDeclaration,
    ParseError,
    StrengthNotPositive,
    UnknownAtom,
    VocabularyTooLarge,
)

DEFAULT_MAX_ATOMS = 20
RESERVED = frozenset({"true", "false"})
_ATOM_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


# --------------------------------------------------------------------------
# AST


class Formula:
    __slots__ = ()

    def atoms(self) -> tuple[str, ...]:
        """Atom names in first-occurrence order (left to right)."""
        seen: dict[str, None] = {}
        _collect(self, seen)
        return tuple(seen)

    def __str__(self) -> str:
        return to_text(self)

    def __invert__(self) -> "Formula":
        return Not(self)

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)


@dataclass(frozen=True, repr=False)
class Top(Formula):
    def __repr__(self) -> str:
        return "Top()"


@dataclass(frozen=True, repr=False)
class Bottom(Formula):
    def __repr__(self) -> str:
        return "Bottom()"


@dataclass(frozen=True)
class Var(Formula):
    name: str


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


TOP = Top()
BOTTOM = Bottom()
_BINARY = (And, Or, Implies, Iff)


def _collect(f: Formula, seen: dict) -> None:
    if isinstance(f, Var):
        seen.setdefault(f.name, None)
    elif isinstance(f, Not):
        _collect(f.arg, seen)
    elif isinstance(f, _BINARY):
        _collect(f.left, seen)
        _collect(f.right, seen)


def conjoin(formulas: Iterable[Formula]) -> Formula:
    """Left-nested conjunction; ``TOP`` for an empty sequence."""
    result: Formula | None = None
    for f in formulas:
        result = f if result is None else And(result, f)
    return TOP if result is None else result


def disjoin(formulas: Iterable[Formula]) -> Formula:
    result: Formula | None = None
    for f in formulas:
        result = f if result is None else Or(result, f)
    return BOTTOM if result is None else result


# --------------------------------------------------------------------------
# canonical printer

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}
_SYMBOL = {Iff: "<->", Implies: "->", Or: "|", And: "&"}


def to_text(f: Formula) -> str:
    """Render with the minimal parentheses needed to re-parse to the same tree."""
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Not):
        inner = to_text(f.arg)
        if isinstance(f.arg, _BINARY):
            inner = f"({inner})"
        return "!" + inner
    kind = type(f)
    prec = _PREC[kind]
    left, right = to_text(f.left), to_text(f.right)
    lp = _PREC.get(type(f.left), 9)
    rp = _PREC.get(type(f.right), 9)
    if kind is Implies:
        # right associative
        if lp <= prec:
            left = f"({left})"
        if rp < prec:
            right = f"({right})"
    else:
        if lp < prec:
            left = f"({left})"
        if rp <= prec:
            right = f"({right})"
    return f"{left} {_SYMBOL[kind]} {right}"


# --------------------------------------------------------------------------
# parser

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op><->|->|~>|[!&|()]))"
)


class _Parser:
    def __init__(self, text: str, vocab: "Vocabulary | None", line: int, col0: int):
        self.text = text
        self.vocab = vocab
        self.line = line
        self.col0 = col0
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while True:
            while pos < len(text) and text[pos].isspace():
                pos += 1
            if pos >= len(text):
                break
            m = _TOKEN_RE.match(text, pos)
            if m is None:
                self.fail(f"unexpected character {text[pos]!r}", pos)
            kind = "ident" if m.group("ident") else "op"
            value = m.group(kind)
            start = m.start(kind)
            if value == "~>":
                self.fail("default arrow '~>' is not allowed inside a formula", start)
            self.tokens.append((kind, value, start))
            pos = m.end()
        self.i = 0

    def fail(self, message: str, pos: int | None = None) -> None:
        if pos is None:
            pos = self.tokens[self.i][2] if self.i < len(self.tokens) else len(self.text)
        raise ParseError(message, self.line, self.col0 + pos + 1)

    def peek(self) -> str | None:
        return self.tokens[self.i][1] if self.i < len(self.tokens) else None

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def parse(self) -> Formula:
        if not self.tokens:
            self.fail("empty formula", 0)
        f = self.iff()
        if self.i < len(self.tokens):
            self.fail(f"unexpected token {self.peek()!r}")
        return f

    def iff(self) -> Formula:
        f = self.implies()
        while self.peek() == "<->":
            self.take()
            f = Iff(f, self.implies())
        return f

    def implies(self) -> Formula:
        f = self.disj()
        if self.peek() == "->":
            self.take()
            return Implies(f, self.implies())
        return f

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek() == "|":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.peek() == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        if self.i >= len(self.tokens):
            self.fail("unexpected end of formula")
        kind, value, pos = self.take()
        if value == "!":
            return Not(self.unary())
        if value == "(":
            f = self.iff()
            if self.peek() != ")":
                self.fail("expected ')'")
            self.take()
            return f
        if kind == "ident":
            if value == "true":
                return TOP
            if value == "false":
                return BOTTOM
            if self.vocab is not None and value not in self.vocab:
                raise UnknownAtom(value, self.line, self.col0 + pos + 1)
            return Var(value)
        self.i -= 1
        self.fail(f"unexpected token {value!r}")
        raise AssertionError  # unreachable


def parse_formula(
    text: str, vocab: "Vocabulary | None" = None, *, line: int = 1, column: int = 1
) -> Formula:
    """Parse ``text`` into a formula.

    With ``vocab=None`` any atom name is accepted (collect mode; see
    :meth:`Vocabulary.collect`).  With a fixed vocabulary, unseen names raise
    :class:`UnknownAtom`.  ``line``/``column`` offset error positions when the
    formula is embedded in a larger file.
    """
    return _Parser(text, vocab, line, column - 1).parse()


# --------------------------------------------------------------------------
# vocabulary and worlds


@dataclass(frozen=True)
class Vocabulary:
    atoms: tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        atoms = tuple(self.atoms)
        object.__setattr__(self, "atoms", atoms)
        for a in atoms:
            if not _ATOM_RE.match(a) or a in RESERVED:
                raise ValueError(f"invalid atom name {a!r}")
        if len(set(atoms)) != len(atoms):
            raise ValueError("duplicate atom in vocabulary")
        object.__setattr__(self, "_index", {a: i for i, a in enumerate(atoms)})

    @classmethod
    def collect(cls, formulas: Iterable[Formula]) -> "Vocabulary":
        seen: dict[str, None] = {}
        for f in formulas:
            _collect(f, seen)
        return cls(tuple(seen))

    def __len__(self) -> int:
        return len(self.atoms)

    def __contains__(self, name: object) -> bool:
        return name in self._index

    def __iter__(self) -> Iterator[str]:
        return iter(self.atoms)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownAtom(name) from None

    @property
    def n_worlds(self) -> int:
        return 1 << len(self.atoms)

    @property
    def full_mask(self) -> int:
        return (1 << self.n_worlds) - 1

    def check_size(self, limit: int = DEFAULT_MAX_ATOMS) -> None:
        if len(self.atoms) > limit:
            raise VocabularyTooLarge(
                f"{len(self.atoms)} atoms exceed the enumeration limit of {limit}"
            )

    def mask(self, f: Formula) -> int:
        """Bitmask of the worlds satisfying ``f``."""
        return _mask(f, self.atoms)

    def world_bits(self, w: int) -> str:
        """Truth values of the atoms in vocabulary order, e.g. ``'10'``."""
        return "".join("1" if (w >> i) & 1 else "0" for i in range(len(self.atoms)))

    def world_from_bits(self, bits: str) -> int:
        if len(bits) != len(self.atoms) or set(bits) - {"0", "1"}:
            raise ValueError(f"bad world bit string {bits!r}")
        return sum(1 << i for i, b in enumerate(bits) if b == "1")

    def world(self, assignment: dict[str, bool]) -> int:
        if set(assignment) != set(self.atoms):
            raise ValueError("assignment must cover exactly the vocabulary")
        return sum(1 << self._index[a] for a, v in assignment.items() if v)

    def assignment(self, w: int) -> dict[str, bool]:
        return {a: bool((w >> i) & 1) for i, a in enumerate(self.atoms)}

    def minterm(self, w: int) -> Formula:
        lits = [Var(a) if (w >> i) & 1 else Not(Var(a)) for i, a in enumerate(self.atoms)]
        return conjoin(lits)

    def formula_of(self, mask: int) -> Formula:
        """A DNF formula whose model set is exactly ``mask``."""
        if mask == self.full_mask:
            return TOP
        return disjoin(self.minterm(w) for w in iter_worlds(mask))


def _atom_mask(i: int, n: int) -> int:
    block = 1 << i
    m = ((1 << block) - 1) << block
    length = block << 1
    total = 1 << n
    while length < total:
        m |= m << length
        length <<= 1
    return m


@lru_cache(maxsize=1 << 16)
def _mask(f: Formula, atoms: tuple[str, ...]) -> int:
    n = len(atoms)
    full = (1 << (1 << n)) - 1
    if isinstance(f, Top):
        return full
    if isinstance(f, Bottom):
        return 0
    if isinstance(f, Var):
        try:
            i = atoms.index(f.name)
        except ValueError:
            raise UnknownAtom(f.name) from None
        return _atom_mask(i, n)
    if isinstance(f, Not):
        return full ^ _mask(f.arg, atoms)
    left = _mask(f.left, atoms)
    right = _mask(f.right, atoms)
    if isinstance(f, And):
        return left & right
    if isinstance(f, Or):
        return left | right
    if isinstance(f, Implies):
        return (full ^ left) | right
    if isinstance(f, Iff):
        return full ^ (left ^ right)
    raise TypeError(f"not a formula: {f!r}")


def iter_worlds(mask: int) -> Iterator[int]:
    """Set bits of ``mask`` in increasing order."""
    bits = bin(mask)[:1:-1]
    return (i for i, c in enumerate(bits) if c == "1")


def evaluate(f: Formula, world: int | dict[str, bool], vocab: Vocabulary | None = None) -> bool:
    """Classical truth value of ``f`` in a world.

    ``world`` is either an assignment dict or a world index (the latter needs
    ``vocab``).
    """
    if isinstance(world, dict):
        return _eval(f, world)
    if vocab is None:
        raise TypeError("a vocabulary is required to evaluate on a world index")
    return bool((vocab.mask(f) >> world) & 1)


def _eval(f: Formula, a: dict[str, bool]) -> bool:
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Var):
        try:
            return a[f.name]
        except KeyError:
            raise UnknownAtom(f.name) from None
    if isinstance(f, Not):
        return not _eval(f.arg, a)
    left, right = _eval(f.left, a), _eval(f.right, a)
    if isinstance(f, And):
        return left and right
    if isinstance(f, Or):
        return left or right
    if isinstance(f, Implies):
        return (not left) or right
    return left == right


def models(f: Formula, vocab: Vocabulary, limit: int = DEFAULT_MAX_ATOMS) -> list[int]:
    """World indices satisfying ``f``, in increasing order."""
    vocab.check_size(limit)
    return list(iter_worlds(vocab.mask(f)))


def equivalent(f: Formula, g: Formula, vocab: Vocabulary) -> bool:
    return vocab.mask(f) == vocab.mask(g)


# --------------------------------------------------------------------------
# defaults and knowledge bases


@dataclass(frozen=True)
class Default:
    premise: Formula
    conclusion: Formula
    strength: Fraction = Fraction(1)

    def __post_init__(self):
        s = Fraction(self.strength)
        if s <= 0:
            raise StrengthNotPositive(f"default strength must be positive, got {s}")
        object.__setattr__(self, "strength", s)

    def __str__(self) -> str:
        text = f"{to_text(self.premise)} ~> {to_text(self.conclusion)}"
        if self.strength != 1:
            text += f" [{self.strength}]"
        return text

    def verify_mask(self, vocab: Vocabulary) -> int:
        return vocab.mask(And(self.premise, self.conclusion))

    def violate_mask(self, vocab: Vocabulary) -> int:
        return vocab.mask(And(self.premise, Not(self.conclusion)))


@dataclass(frozen=True)
class KnowledgeBase:
    vocabulary: Vocabulary
    facts: tuple[Formula, ...] = ()
    defaults: tuple[Default, ...] = ()
    queries: tuple[Formula, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "facts", tuple(self.facts))
        object.__setattr__(self, "defaults", tuple(self.defaults))
        object.__setattr__(self, "queries", tuple(self.queries))

    @classmethod
    def build(
        cls,
        facts: Sequence[Formula | str] = (),
        defaults: Sequence[Default | tuple] = (),
        atoms: Sequence[str] | None = None,
    ) -> "KnowledgeBase":
        """Convenience constructor accepting formula text and (premise, conclusion[, strength]) tuples."""
        fs = [parse_formula(f) if isinstance(f, str) else f for f in facts]
        ds = []
        for d in defaults:
            if isinstance(d, Default):
                ds.append(d)
                continue
            prem, concl, *rest = d
            prem = parse_formula(prem) if isinstance(prem, str) else prem
            concl = parse_formula(concl) if isinstance(concl, str) else concl
            ds.append(Default(prem, concl, *rest))
        if atoms is None:
            vocab = Vocabulary.collect(fs + [g for d in ds for g in (d.premise, d.conclusion)])
        else:
            vocab = Vocabulary(tuple(atoms))
        return cls(vocab, tuple(fs), tuple(ds))

    @property
    def strengths(self) -> tuple[Fraction, ...]:
        return tuple(d.strength for d in self.defaults)

    def with_facts(self, facts: Sequence[Formula]) -> "KnowledgeBase":
        return KnowledgeBase(self.vocabulary, tuple(facts), self.defaults, self.queries)


def fact_formula(kb: KnowledgeBase) -> Formula:
    """Conjunction of all facts, ``TOP`` when there are none."""
    return conjoin(kb.facts)


_STRENGTH_RE = re.compile(r"\[([^\]]*)\]\s*\Z")


def parse_kb(text: str, max_atoms: int = DEFAULT_MAX_ATOMS) -> KnowledgeBase:
    """Parse the line-oriented ``.dkb`` format.

    Recognised lines: ``# comment``, ``atoms a b c``, ``fact <formula>``,
    ``default <formula> ~> <formula> [p/q]`` and ``query <formula>``.  Without
    an ``atoms`` line the vocabulary is collected in first-occurrence order.
    """
    lines = text.splitlines()
    declared: list[str] | None = None
    for lineno, raw in enumerate(lines, 1):
        stripped = raw.strip()
        if stripped.startswith("atoms") and (len(stripped) == 5 or stripped[5].isspace()):
            if declared is None:
                declared = []
            col = raw.index("atoms") + 6
            for m in re.finditer(r"\S+", raw[col - 1:]):
                name = m.group()
                pos = col + m.start()
                if not _ATOM_RE.match(name) or name in RESERVED:
                    raise ParseError(f"invalid atom name {name!r}", lineno, pos)
                if name in declared:
                    raise DuplicateAtomDeclaration(f"atom {name!r} declared twice", lineno, pos)
                declared.append(name)
    fixed = Vocabulary(tuple(declared)) if declared is not None else None
    if fixed is not None:
        fixed.check_size(max_atoms)

    facts: list[Formula] = []
    defaults: list[Default] = []
    queries: list[Formula] = []
    for lineno, raw in enumerate(lines, 1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        indent = len(raw) - len(raw.lstrip())
        keyword, _, rest = stripped.partition(" ")
        rest_col = indent + len(keyword) + 2 + (len(rest) - len(rest.lstrip()))
        rest = rest.strip()
        if keyword == "atoms":
            continue
        if keyword in ("fact", "query"):
            if not rest:
                raise ParseError(f"missing formula after {keyword!r}", lineno, rest_col)
            f = parse_formula(rest, fixed, line=lineno, column=rest_col)
            (facts if keyword == "fact" else queries).append(f)
        elif keyword == "default":
            defaults.append(_parse_default_line(rest, fixed, lineno, rest_col))
        else:
            raise ParseError(f"unknown directive {keyword!r}", lineno, indent + 1)

    if fixed is None:
        vocab = Vocabulary.collect(
            facts + [g for d in defaults for g in (d.premise, d.conclusion)] + queries
        )
        vocab.check_size(max_atoms)
    else:
        vocab = fixed
    return KnowledgeBase(vocab, tuple(facts), tuple(defaults), tuple(queries))


def _parse_default_line(rest: str, vocab: Vocabulary | None, lineno: int, col: int) -> Default:
    strength = Fraction(1)
    m = _STRENGTH_RE.search(rest)
    if m:
        raw = m.group(1).strip()
        try:
            strength = Fraction(raw)
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"malformed strength {raw!r}", lineno, col + m.start()) from None
        if strength <= 0:
            raise StrengthNotPositive(
                f"default strength must be positive, got {raw}", lineno, col + m.start()
            )
        rest = rest[: m.start()]
    if rest.count("~>") != 1:
        raise ParseError("a default needs exactly one '~>'", lineno, col)
    left, right = rest.split("~>")
    if not left.strip():
        raise ParseError("missing premise", lineno, col)
    if not right.strip():
        raise ParseError("missing conclusion", lineno, col + len(left) + 2)
    premise = parse_formula(left, vocab, line=lineno, column=col)
    conclusion = parse_formula(right, vocab, line=lineno, column=col + len(left) + 2)
    return Default(premise, conclusion, strength)


def kb_to_text(kb: KnowledgeBase) -> str:
    lines = ["atoms " + " ".join(kb.vocabulary.atoms)] if len(kb.vocabulary) else []
    lines += [f"fact {to_text(f)}" for f in kb.facts]
    lines += [f"default {d}" for d in kb.defaults]
    lines += [f"query {to_text(q)}" for q in kb.queries]
    return "\n".join(lines) + "\n"


FormulaLike = Union[Formula, str]
