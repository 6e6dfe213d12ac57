"""Entropy of nonarchimedean distributions: exact comparison and numeric evaluation.

For a distribution whose entries are ``e``-ratios, the entropy is expanded as a
series in ``x = e**(1/L)`` (``L`` = common exponent denominator).  Writing an
entry as ``p = c * x**m * (1 + d(x))`` gives

    -p ln p = -p ln c + (m/L) * lam * p - p * ln(1 + d(x)),   lam = ln(1/e),

so every series coefficient has the form ``r + s*lam + sum a_i ln b_i`` with
rational ``r, s, a_i`` and positive rational ``b_i``.  ``lam`` is positive and
infinite, so within one power of ``x`` its coefficient dominates, and lower
powers dominate higher ones regardless of ``lam``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .distribution import NPDistribution, check_same_vocabulary
from .field import _to_dense

DEFAULT_MAX_LEVEL = 8
_MAX_BITS = 4096
_PRODUCT_BIT_LIMIT = 2_000_000


# --------------------------------------------------------------------------
# certified logarithms


def _floor_dyadic(x: Fraction, bits: int) -> Fraction:
    return Fraction(math.floor(x * (1 << bits)), 1 << bits)


def _ceil_dyadic(x: Fraction, bits: int) -> Fraction:
    return Fraction(math.ceil(x * (1 << bits)), 1 << bits)


def _two_atanh(y: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """Enclosure of ``2*atanh(y) = ln((1+y)/(1-y))`` for ``0 <= y <= 1/3``."""
    if y == 0:
        return Fraction(0), Fraction(0)
    y2 = y * y
    n_terms = bits // 3 + 4
    total = Fraction(0)
    power = y
    for i in range(n_terms):
        total += power / (2 * i + 1)
        power *= y2
    # remaining terms are bounded by a geometric series
    tail = power / ((2 * n_terms + 1) * (1 - y2))
    lo = 2 * total
    hi = 2 * (total + tail)
    return _floor_dyadic(lo, bits + 8), _ceil_dyadic(hi, bits + 8)


@lru_cache(maxsize=64)
def _ln2(bits: int) -> tuple[Fraction, Fraction]:
    return _two_atanh(Fraction(1, 3), bits)


def ln_bounds(b: Fraction, bits: int = 64) -> tuple[Fraction, Fraction]:
    """Rational ``lo <= ln(b) <= hi`` with width about ``2**-bits``."""
    b = Fraction(b)
    if b <= 0:
        raise ValueError("logarithm of a nonpositive number")
    if b == 1:
        return Fraction(0), Fraction(0)
    if b < 1:
        lo, hi = ln_bounds(1 / b, bits)
        return -hi, -lo
    k = b.numerator.bit_length() - b.denominator.bit_length()
    r = b / Fraction(2) ** k
    if r < 1:
        k -= 1
        r *= 2
    extra = max(k, 1).bit_length()
    lo2, hi2 = _ln2(bits + extra)
    lo_r, hi_r = _two_atanh((r - 1) / (r + 1), bits + extra)
    return k * lo2 + lo_r, k * hi2 + hi_r


def log2_bounds(q: Fraction, bits: int = 64) -> tuple[Fraction, Fraction]:
    """Enclosure of ``log2(q)``; exact when ``q`` is a power of two."""
    q = Fraction(q)
    if q <= 0:
        raise ValueError("logarithm of a nonpositive number")
    num, den = q.numerator, q.denominator
    k = 0
    tz = (num & -num).bit_length() - 1
    num >>= tz
    k += tz
    tz = (den & -den).bit_length() - 1
    den >>= tz
    k -= tz
    if num == den == 1:
        return Fraction(k), Fraction(k)
    lo, hi = ln_bounds(Fraction(num, den), bits + 2)
    l2lo, l2hi = _ln2(bits + 2)
    if lo >= 0:
        qlo, qhi = lo / l2hi, hi / l2lo
    elif hi <= 0:
        qlo, qhi = lo / l2lo, hi / l2hi
    else:
        qlo, qhi = lo / l2lo, hi / l2lo
    return k + qlo, k + qhi


# --------------------------------------------------------------------------
# numeric entropy


def entropy_bounds(
    P: NPDistribution, u, root: int = 1, bits: int = 32
) -> tuple[Fraction, Fraction]:
    """Enclosure of ``-sum p log2 p`` with ``e**(1/root) := u``."""
    lo = hi = Fraction(0)
    for x in P.p:
        v = x.evaluate(u, root)
        if v == 0:
            continue
        llo, lhi = log2_bounds(v, bits + 8)
        # -v*log2(v), v > 0
        lo -= v * lhi
        hi -= v * llo
    return lo, hi


def entropy_numeric(P: NPDistribution, u, root: int = 1, bits: int = 32) -> Fraction:
    """Entropy in bits at ``e := u**root`` with error at most ``2**-bits``.

    Exact whenever every evaluated probability is a power of two.
    """
    b = bits + 4
    while True:
        lo, hi = entropy_bounds(P, u, root, b)
        if hi - lo <= Fraction(1, 1 << (bits + 1)):
            return (lo + hi) / 2
        b *= 2


# --------------------------------------------------------------------------
# symbolic comparison


@dataclass(frozen=True)
class EntropyVerdict:
    """Outcome of comparing ``H(P)`` with ``H(Q)``.

    ``kind`` is ``Less``, ``Greater``, ``EqualUpToLevel`` or ``Unstable``;
    ``level`` is the ``e``-exponent at which the comparison was decided (or the
    last level examined).
    """

    kind: str
    level: Fraction

    def __str__(self) -> str:
        if self.kind == "EqualUpToLevel":
            return f"EqualUpToLevel({self.level})"
        return self.kind


@dataclass
class _Level:
    lam: Fraction
    rat: Fraction
    logs: dict


def _series_div(num: list[Fraction], den: list[Fraction], n: int) -> list[Fraction]:
    out = [Fraction(0)] * (n + 1)
    d0 = den[0]
    for k in range(n + 1):
        acc = num[k] if k < len(num) else Fraction(0)
        for i in range(1, min(k, len(den) - 1) + 1):
            if den[i] and out[k - i]:
                acc -= den[i] * out[k - i]
        out[k] = acc / d0
    return out


def _series_log(f: list[Fraction], n: int) -> list[Fraction]:
    """``ln f`` for a series with ``f[0] == 1``, via ``(ln f)' = f'/f``."""
    if n == 0:
        return [Fraction(0)]
    deriv = [(k + 1) * f[k + 1] for k in range(n)]
    h = _series_div(deriv, f, n - 1)
    return [Fraction(0)] + [h[k - 1] / k for k in range(1, n + 1)]


def _mul_trunc(a: list[Fraction], b: list[Fraction], n: int) -> list[Fraction]:
    out = [Fraction(0)] * (n + 1)
    for i, x in enumerate(a[: n + 1]):
        if not x:
            continue
        for j, y in enumerate(b[: n + 1 - i]):
            if y:
                out[i + j] += x * y
    return out


def _entropy_series(P: NPDistribution, L: int, n: int) -> list[_Level]:
    levels = [_Level(Fraction(0), Fraction(0), {}) for _ in range(n + 1)]
    for x in P.p:
        if x.is_zero():
            continue
        num, den = _to_dense(x.num, L), _to_dense(x.den, L)
        if den[0] == 0:
            raise ValueError(f"entry {x} exceeds 1")
        s = _series_div(num, den, n)
        m = next((i for i, c in enumerate(s) if c), None)
        if m is None:
            continue
        c = s[m]
        f = [v / c for v in s[m:]]
        g = _series_log(f, n - m)
        sg = _mul_trunc(s, g, n)
        for j in range(m, n + 1):
            lv = levels[j]
            lv.rat -= sg[j]
            if s[j]:
                lv.lam += Fraction(m, L) * s[j]
                lv.logs[c] = lv.logs.get(c, 0) - s[j]
    return levels


def _sign_log_sum(r: Fraction, terms: dict) -> int | None:
    """Sign of ``r + sum a*ln(b)``; ``None`` if it cannot be certified."""
    terms = {b: a for b, a in terms.items() if a and b != 1}
    if not terms:
        return (r > 0) - (r < 0)
    if r == 0:
        scale = 1
        for a in terms.values():
            scale = math.lcm(scale, a.denominator)
        cost = sum(
            abs(a * scale) * (b.numerator.bit_length() + b.denominator.bit_length())
            for b, a in terms.items()
        )
        if cost <= _PRODUCT_BIT_LIMIT:
            left, right = 1, 1
            for b, a in terms.items():
                k = int(a * scale)
                if k > 0:
                    left *= b ** k
                else:
                    right *= b ** (-k)
            return (left > right) - (left < right)
    bits = 64
    while bits <= _MAX_BITS:
        lo = hi = r
        for b, a in terms.items():
            llo, lhi = ln_bounds(b, bits)
            if a > 0:
                lo += a * llo
                hi += a * lhi
            else:
                lo += a * lhi
                hi += a * llo
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        bits *= 2
    return None


def entropy_compare(
    P: NPDistribution, Q: NPDistribution, max_level=DEFAULT_MAX_LEVEL
) -> EntropyVerdict:
    """Decide the sign of ``H(P) - H(Q)`` in the ordered field.

    Series levels are examined in increasing ``e``-exponent up to ``max_level``;
    agreement on all of them yields ``EqualUpToLevel``, never plain equality.
    """
    check_same_vocabulary(P, Q)
    L = math.lcm(P.root_denominator(), Q.root_denominator())
    max_level = Fraction(max_level)
    n = math.floor(max_level * L)
    hp = _entropy_series(P, L, n)
    hq = _entropy_series(Q, L, n)
    for j in range(n + 1):
        level = Fraction(j, L)
        a, b = hp[j], hq[j]
        lam = a.lam - b.lam
        if lam:
            return EntropyVerdict("Greater" if lam > 0 else "Less", level)
        logs = dict(a.logs)
        for base, coef in b.logs.items():
            logs[base] = logs.get(base, 0) - coef
        sign = _sign_log_sum(a.rat - b.rat, logs)
        if sign is None:
            return EntropyVerdict("Unstable", level)
        if sign:
            return EntropyVerdict("Greater" if sign > 0 else "Less", level)
    return EntropyVerdict("EqualUpToLevel", max_level)


def entropy_series(P: NPDistribution, max_level=DEFAULT_MAX_LEVEL) -> list[tuple]:
    """Series coefficients of ``H(P)`` (natural log) as ``(level, lam, rat, logs)`` tuples."""
    L = P.root_denominator()
    n = math.floor(Fraction(max_level) * L)
    return [
        (Fraction(j, L), lv.lam, lv.rat, {b: a for b, a in lv.logs.items() if a})
        for j, lv in enumerate(_entropy_series(P, L, n))
    ]


__all__ = [
    "EntropyVerdict",
    "entropy_bounds",
    "entropy_compare",
    "entropy_numeric",
    "entropy_series",
    "ln_bounds",
    "log2_bounds",
]
