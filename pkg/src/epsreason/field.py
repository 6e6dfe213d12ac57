"""Exact arithmetic in one positive infinitesimal ``e``.

:class:`EpsPoly` is a finite sum ``sum c_q * e**q`` with rational coefficients
and nonnegative rational exponents; :class:`EpsRatio` is a quotient of two such
polynomials kept in lowest terms.  Because ``e`` is smaller than every positive
standard real, the sign of a nonzero polynomial is the sign of its coefficient
at the lowest exponent.

Magnitudes use the "surprise" polarity: the magnitude of a positive value is
its lowest ``e``-exponent (larger means smaller), and 0 has magnitude ``inf``.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .errors import NegativeOperand, RootMismatch

INF = math.inf
Rational = Union[int, Fraction]


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class EpsPoly:
    """Polynomial in ``e`` with nonnegative rational exponents, canonical form."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Fraction, Fraction] = {}
        for q, c in items:
            q = _frac(q)
            if q < 0:
                raise ValueError(f"negative exponent {q}")
            acc[q] = acc.get(q, 0) + _frac(c)
        self.terms: tuple[tuple[Fraction, Fraction], ...] = tuple(
            sorted((q, c) for q, c in acc.items() if c != 0)
        )
        self._hash = None

    @classmethod
    def _raw(cls, terms: tuple) -> "EpsPoly":
        p = object.__new__(cls)
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, c: Rational) -> "EpsPoly":
        c = _frac(c)
        return cls._raw(((Fraction(0), c),) if c else ())

    @classmethod
    def monomial(cls, q: Rational, c: Rational = 1) -> "EpsPoly":
        return cls({q: c})

    # -- queries ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def order(self) -> Fraction | None:
        """Lowest exponent, ``None`` for the zero polynomial."""
        return self.terms[0][0] if self.terms else None

    def lead(self) -> Fraction:
        """Coefficient at the lowest exponent (0 for the zero polynomial)."""
        return self.terms[0][1] if self.terms else Fraction(0)

    def sign(self) -> int:
        if not self.terms:
            return 0
        return 1 if self.terms[0][1] > 0 else -1

    def exponents(self) -> tuple[Fraction, ...]:
        return tuple(q for q, _ in self.terms)

    def coefficient(self, q: Rational) -> Fraction:
        q = _frac(q)
        for e, c in self.terms:
            if e == q:
                return c
        return Fraction(0)

    def root_denominator(self) -> int:
        """Least D such that every exponent times D is an integer."""
        d = 1
        for q, _ in self.terms:
            d = math.lcm(d, q.denominator)
        return d

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other) -> "EpsPoly":
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        acc = dict(self.terms)
        for q, c in other.terms:
            acc[q] = acc.get(q, 0) + c
        return EpsPoly._raw(tuple(sorted((q, c) for q, c in acc.items() if c)))

    __radd__ = __add__

    def __neg__(self) -> "EpsPoly":
        return EpsPoly._raw(tuple((q, -c) for q, c in self.terms))

    def __sub__(self, other) -> "EpsPoly":
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "EpsPoly":
        return _as_poly(other) - self

    def __mul__(self, other) -> "EpsPoly":
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        acc: dict[Fraction, Fraction] = {}
        for q1, c1 in self.terms:
            for q2, c2 in other.terms:
                q = q1 + q2
                acc[q] = acc.get(q, 0) + c1 * c2
        return EpsPoly._raw(tuple(sorted((q, c) for q, c in acc.items() if c)))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "EpsPoly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = EpsPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift(self, q: Rational) -> "EpsPoly":
        """Multiply by ``e**q`` (``q`` may be negative if the result stays valid)."""
        q = _frac(q)
        return EpsPoly._raw(tuple((e + q, c) for e, c in self.terms))

    def scale(self, c: Rational) -> "EpsPoly":
        c = _frac(c)
        if not c:
            return EpsPoly._raw(())
        return EpsPoly._raw(tuple((q, k * c) for q, k in self.terms))

    # -- comparison ------------------------------------------------------

    def __eq__(self, other) -> bool:
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(("EpsPoly", self.terms))
        return self._hash

    def __lt__(self, other) -> bool:
        return (self - _as_poly(other)).sign() < 0

    def __le__(self, other) -> bool:
        return (self - _as_poly(other)).sign() <= 0

    def __gt__(self, other) -> bool:
        return (self - _as_poly(other)).sign() > 0

    def __ge__(self, other) -> bool:
        return (self - _as_poly(other)).sign() >= 0

    # -- evaluation and text ------------------------------------------------

    def evaluate(self, u: Rational, root: int = 1) -> Fraction:
        """Exact value with ``e**(1/root) := u``."""
        u = _frac(u)
        total = Fraction(0)
        for q, c in self.terms:
            k = q * root
            if k.denominator != 1:
                raise RootMismatch(f"exponent {q} is not a multiple of 1/{root}")
            total += c * u ** int(k)
        return total

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for i, (q, c) in enumerate(self.terms):
            neg = c < 0
            a = -c if neg else c
            if q == 0:
                body = str(a)
            else:
                mono = "e" if q == 1 else f"e^{q}"
                body = mono if a == 1 else f"{a}*{mono}"
            if i == 0:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    def __repr__(self) -> str:
        return f"EpsPoly({str(self)!r})"


def _as_poly(x) -> EpsPoly:
    if isinstance(x, EpsPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return EpsPoly.const(x)
    return NotImplemented


# --------------------------------------------------------------------------
# dense polynomial helpers over Q[x], x = e**(1/D)


def _to_dense(p: EpsPoly, d: int) -> list[Fraction]:
    if not p.terms:
        return []
    deg = int(p.terms[-1][0] * d)
    out = [Fraction(0)] * (deg + 1)
    for q, c in p.terms:
        out[int(q * d)] = c
    return out


def _from_dense(coeffs: list[Fraction], d: int) -> EpsPoly:
    return EpsPoly._raw(tuple((Fraction(i, d), c) for i, c in enumerate(coeffs) if c))


def _trim(a: list[Fraction]) -> list[Fraction]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _divmod(a: list[Fraction], b: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    a = list(a)
    db = len(b) - 1
    lead = b[-1]
    if len(a) - 1 < db:
        return [], _trim(a)
    quot = [Fraction(0)] * (len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i] / lead
        if c:
            quot[i - db] = c
            for j in range(db + 1):
                a[i - db + j] -= c * b[j]
    return _trim(quot), _trim(a[:db])


def _gcd(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        _, r = _divmod(a, b)
        a, b = b, r
    lead = a[-1]
    return [c / lead for c in a]


# --------------------------------------------------------------------------


class EpsRatio:
    """Quotient of two :class:`EpsPoly` in lowest terms.

    Canonical form: numerator and denominator share no common factor, and the
    denominator's lowest-order coefficient is 1.  Equal values therefore have
    identical representations.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=1):
        num = _as_poly(num)
        den = _as_poly(den)
        if num is NotImplemented or den is NotImplemented:
            raise TypeError("EpsRatio expects EpsPoly or rational operands")
        if den.is_zero():
            raise ZeroDivisionError("EpsRatio with zero denominator")
        self.num, self.den = _reduce(num, den)
        self._hash = None

    @classmethod
    def _raw(cls, num: EpsPoly, den: EpsPoly) -> "EpsRatio":
        r = object.__new__(cls)
        r.num, r.den = num, den
        r._hash = None
        return r

    @classmethod
    def const(cls, c: Rational) -> "EpsRatio":
        return cls._raw(EpsPoly.const(c), _ONE_POLY)

    @classmethod
    def eps_pow(cls, q: Rational, c: Rational = 1) -> "EpsRatio":
        return cls._raw(EpsPoly.monomial(q, c), _ONE_POLY)

    # -- queries ---------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def sign(self) -> int:
        return self.num.sign()

    def order(self) -> Fraction | float:
        if self.num.is_zero():
            return INF
        return self.num.order() - self.den.order()

    def lead(self) -> Fraction:
        """Ratio of leading coefficients: ``self ~ lead * e**order``."""
        return self.num.lead() / self.den.lead()

    def root_denominator(self) -> int:
        return math.lcm(self.num.root_denominator(), self.den.root_denominator())

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other) -> "EpsRatio":
        other = _as_ratio(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return EpsRatio(self.num + other.num, self.den)
        return EpsRatio(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "EpsRatio":
        return EpsRatio._raw(-self.num, self.den)

    def __sub__(self, other) -> "EpsRatio":
        other = _as_ratio(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "EpsRatio":
        return _as_ratio(other) - self

    def __mul__(self, other) -> "EpsRatio":
        other = _as_ratio(other)
        if other is NotImplemented:
            return other
        return EpsRatio(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "EpsRatio":
        other = _as_ratio(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            raise ZeroDivisionError("division by zero EpsRatio")
        return EpsRatio(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other) -> "EpsRatio":
        return _as_ratio(other) / self

    def __pow__(self, n: int) -> "EpsRatio":
        if n < 0:
            return EpsRatio.const(1) / (self ** -n)
        return EpsRatio._raw(self.num ** n, self.den ** n) if n else EpsRatio.const(1)

    # -- comparison ------------------------------------------------------

    def compare(self, other) -> int:
        """-1, 0 or 1 according to the sign of ``self - other``."""
        other = _as_ratio(other)
        # denominators are positive, so cross-multiplication preserves the sign
        return (self.num * other.den - other.num * self.den).sign()

    def __eq__(self, other) -> bool:
        other = _as_ratio(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(("EpsRatio", self.num, self.den))
        return self._hash

    def __lt__(self, other) -> bool:
        return self.compare(other) < 0

    def __le__(self, other) -> bool:
        return self.compare(other) <= 0

    def __gt__(self, other) -> bool:
        return self.compare(other) > 0

    def __ge__(self, other) -> bool:
        return self.compare(other) >= 0

    # -- evaluation and text ------------------------------------------------

    def evaluate(self, u: Rational, root: int = 1) -> Fraction:
        return self.num.evaluate(u, root) / self.den.evaluate(u, root)

    def __str__(self) -> str:
        if self.den == _ONE_POLY:
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self) -> str:
        return f"EpsRatio({str(self)!r})"


_ONE_POLY = EpsPoly.const(1)


def _as_ratio(x) -> EpsRatio:
    if isinstance(x, EpsRatio):
        return x
    if isinstance(x, EpsPoly):
        return EpsRatio._raw(x, _ONE_POLY)
    if isinstance(x, (int, Fraction)):
        return EpsRatio.const(x)
    return NotImplemented


def _reduce(num: EpsPoly, den: EpsPoly) -> tuple[EpsPoly, EpsPoly]:
    if num.is_zero():
        return num, _ONE_POLY
    if len(den.terms) == 1:
        q, c = den.terms[0]
        shift = min(q, num.order())
        return num.shift(-shift).scale(1 / c), EpsPoly._raw(((q - shift, Fraction(1)),))
    d = math.lcm(num.root_denominator(), den.root_denominator())
    a, b = _to_dense(num, d), _to_dense(den, d)
    g = _gcd(a, b)
    if len(g) > 1:
        a, _ = _divmod(a, g)
        b, _ = _divmod(b, g)
    low = next(i for i, c in enumerate(b) if c)
    lead = b[low]
    return (
        _from_dense([c / lead for c in a], d),
        _from_dense([c / lead for c in b], d),
    )


ZERO = EpsRatio.const(0)
ONE = EpsRatio.const(1)
EPS = EpsRatio.eps_pow(1)


def eps(q: Rational = 1, c: Rational = 1) -> EpsRatio:
    """The value ``c * e**q``."""
    return EpsRatio.eps_pow(q, c)


def ratio_compare(a, b) -> int:
    return _as_ratio(a).compare(b)


def magnitude(a) -> Fraction | float:
    """Lowest ``e``-exponent of a nonnegative value; ``inf`` for 0."""
    a = _as_ratio(a)
    if a.sign() < 0:
        raise NegativeOperand(f"magnitude of negative value {a}")
    return a.order()


def much_smaller(a, b) -> bool:
    """``a << b``: ``a < r*b`` for every positive standard real ``r``."""
    a, b = _as_ratio(a), _as_ratio(b)
    if a.sign() < 0 or b.sign() < 0:
        raise NegativeOperand("much_smaller is defined on nonnegative values")
    if b.is_zero():
        return False
    if a.is_zero():
        return True
    return a.order() > b.order()


def eval_numeric(a, u: Rational, root: int = 1) -> Fraction:
    """Exact rational value of ``a`` with ``e**(1/root) := u``."""
    return _as_ratio(a).evaluate(u, root)


# --------------------------------------------------------------------------
# text syntax:  1 + 2*e^2,  (1 - e)/(2 + 2*e),  1/2*e^3/2

_TERM_RE = re.compile(
    r"\s*(?P<sign>[+-])?\s*"
    r"(?:(?P<coef>\d+(?:/\d+)?)\s*(?P<star>\*)?\s*)?"
    r"(?P<e>e(?:\s*\^\s*(?P<exp>\d+(?:/\d+)?))?)?\s*"
)


def parse_poly(text: str) -> EpsPoly:
    s = text.strip()
    if s.startswith("(") and s.endswith(")") and _balanced(s[1:-1]):
        s = s[1:-1].strip()
    if not s:
        raise ValueError("empty polynomial")
    terms = []
    pos = 0
    first = True
    while pos < len(s):
        m = _TERM_RE.match(s, pos)
        if not m or m.end() == pos or not (m.group("coef") or m.group("e")):
            raise ValueError(f"cannot parse polynomial at {s[pos:]!r}")
        if not first and not m.group("sign"):
            raise ValueError(f"missing operator before {s[pos:]!r}")
        if m.group("star") and not m.group("e"):
            raise ValueError(f"dangling '*' in {s!r}")
        coef = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
        if m.group("sign") == "-":
            coef = -coef
        exp = Fraction(0)
        if m.group("e"):
            exp = Fraction(m.group("exp")) if m.group("exp") else Fraction(1)
        terms.append((exp, coef))
        pos = m.end()
        first = False
    return EpsPoly(terms)


def _balanced(s: str) -> bool:
    depth = 0
    for ch in s:
        depth += ch == "("
        depth -= ch == ")"
        if depth < 0:
            return False
    return depth == 0


def parse_eps(text: str) -> EpsRatio:
    """Parse the rendering produced by ``str(EpsRatio)``."""
    s = text.strip()
    m = re.fullmatch(r"\((.*)\)\s*/\s*\((.*)\)", s)
    if m and _balanced(m.group(1)) and _balanced(m.group(2)):
        return EpsRatio(parse_poly(m.group(1)), parse_poly(m.group(2)))
    return EpsRatio(parse_poly(s))
