"""Takagi-type functions with exact dyadic evaluation and certified enclosures.

On a dyadic ``t = p/2^m`` the doubling orbit hits the integers after ``m``
steps, so every series here is a finite sum there. Elsewhere partial sums are
paired with the termwise bound ``2^-n`` to give a rigorous interval.
"""

from __future__ import annotations

import math
import re
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2

from svtakagi.exactgeom import Vector, as_vector, format_rational, parse_rational, vscale, zero


class InexactError(ValueError):
    """The requested value is irrational; only an enclosure is available."""


@dataclass(frozen=True)
class Dyadic:
    """``p / 2^m`` in lowest terms (``p`` odd or ``m == 0``)."""

    p: int
    m: int = 0

    def __post_init__(self):
        p, m = int(self.p), int(self.m)
        if m < 0:
            raise ValueError("dyadic exponent must be nonnegative")
        while m > 0 and p % 2 == 0:
            p //= 2
            m -= 1
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "m", m)

    @classmethod
    def from_fraction(cls, q) -> Dyadic:
        q = Fraction(q)
        den = q.denominator
        if den & (den - 1):
            raise ValueError(f"{q} is not dyadic")
        return cls(q.numerator, den.bit_length() - 1)

    @classmethod
    def parse(cls, s: str) -> Dyadic:
        match = re.fullmatch(r"\s*(-?\d+)\s*/\s*2\^(\d+)\s*", s)
        if match:
            return cls(int(match[1]), int(match[2]))
        return cls.from_fraction(parse_rational(s))

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, 1 << self.m)

    def __str__(self) -> str:
        return f"{self.p}/2^{self.m}"

    def __lt__(self, other: Dyadic) -> bool:
        return self.value < other.value


def as_dyadic(t) -> Dyadic:
    return t if isinstance(t, Dyadic) else Dyadic.from_fraction(t)


def dyadic_lattice(depth: int, lo=0, hi=1) -> list[Dyadic]:
    """All ``k/2^depth`` in ``[lo, hi]``, ascending."""
    n = 1 << depth
    lo, hi = Fraction(lo), Fraction(hi)
    k0, k1 = math.ceil(lo * n), math.floor(hi * n)
    return [Dyadic(k, depth) for k in range(k0, k1 + 1)]


@dataclass(frozen=True)
class BoundedValue:
    """Rational enclosure ``[lower, upper]`` of a real number."""

    lower: Fraction
    upper: Fraction

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("lower bound exceeds upper bound")

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    @property
    def midpoint(self) -> Fraction:
        return (self.lower + self.upper) / 2

    def contains(self, q) -> bool:
        return self.lower <= Fraction(q) <= self.upper

    def intersects(self, other: BoundedValue) -> bool:
        return self.lower <= other.upper and other.lower <= self.upper

    def __mul__(self, c) -> BoundedValue:
        c = Fraction(c)
        if c < 0:
            return BoundedValue(c * self.upper, c * self.lower)
        return BoundedValue(c * self.lower, c * self.upper)

    __rmul__ = __mul__


def dist_to_integers(t) -> Fraction:
    t = Fraction(t)
    f = t - math.floor(t)
    return min(f, 1 - f)


def _doubling_residues(num: int, den: int, count: int) -> list[int]:
    """``min(r, den - r)`` for ``r = num * 2^n mod den``, ``n < count``."""
    out = []
    r = num % den
    for _ in range(count):
        out.append(min(r, den - r))
        r = (2 * r) % den
    return out


def _terms_for_tail(tail_bound) -> int:
    """Smallest N with 2^(1-N) <= tail_bound."""
    tail_bound = Fraction(tail_bound)
    if tail_bound <= 0:
        raise ValueError("tail_bound must be positive")
    n = 1
    while Fraction(2) ** (1 - n) > tail_bound:
        n += 1
    return n


def takagi_alpha_dyadic(t, alpha: int) -> Fraction:
    """Exact ``T_alpha(t)`` for dyadic ``t`` and ``alpha`` in {1, 2}."""
    if alpha not in (1, 2):
        raise ValueError(f"exact evaluation supports alpha in {{1, 2}}, got {alpha}")
    t = as_dyadic(t)
    if t.m == 0:
        return Fraction(0)
    m, den = t.m, 1 << t.m
    # sum_n 2^(alpha-n) (c_n/den)^alpha over the common denominator 2^(m-1) den^alpha
    num = sum(c**alpha << (alpha + m - 1 - n) for n, c in enumerate(_doubling_residues(t.p, den, m)))
    return Fraction(num, den**alpha << (m - 1))


def _root_enclosure(x: Fraction, alpha: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """Rational bounds on ``x**alpha`` for ``x >= 0``, width at most ``2^-bits``."""
    if x == 0:
        return Fraction(0), Fraction(0)
    p, q = alpha.numerator, alpha.denominator
    a, b = x.numerator**p, x.denominator**p
    if q == 1:
        v = Fraction(a, b)
        return v, v
    root, exact = gmpy2.iroot(gmpy2.mpz(a * b ** (q - 1)) << (q * bits), q)
    lo = Fraction(int(root), b << bits)
    return lo, (lo if exact else lo + Fraction(1, b << bits))


def takagi_alpha(t, alpha, tail_bound) -> BoundedValue:
    """Enclosure of ``T_alpha(t) = sum 2^(alpha-n) d(2^n t)^alpha`` for any rational ``t``."""
    alpha = Fraction(alpha)
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    t = Fraction(t)
    N = _terms_for_tail(tail_bound)
    tail = Fraction(2) ** (1 - N)
    residues = _doubling_residues(t.numerator, t.denominator, N)
    if alpha.denominator == 1:
        a = alpha.numerator
        num = sum((2 * c) ** a << (N - 1 - n) for n, c in enumerate(residues))
        partial = Fraction(num, t.denominator**a << (N - 1))
        return BoundedValue(partial, partial + tail)
    lo = hi = Fraction(0)
    for n, c in enumerate(residues):
        l, h = _root_enclosure(Fraction(2 * c, t.denominator), alpha, N + 2)
        lo += l / (1 << n)
        hi += h / (1 << n)
    return BoundedValue(lo, hi + tail)


def takagi_classic(t, tail_bound) -> BoundedValue:
    """Enclosure of the classical ``T(t) = sum 2^-n d(2^n t)``."""
    t = Fraction(t)
    N = _terms_for_tail(tail_bound)
    residues = _doubling_residues(t.numerator, t.denominator, N)
    num = sum(c << (N - 1 - n) for n, c in enumerate(residues))
    partial = Fraction(num, t.denominator << (N - 1))
    # each neglected term is at most 2^-n / 2
    return BoundedValue(partial, partial + Fraction(1, 1 << N))


def functional_equation_residual(alpha: int, t) -> Fraction:
    """``|T_a(t) - 2^a d(t)^a - T_a(2t)/2|``, exact on dyadics (always zero)."""
    t = as_dyadic(t)
    lhs = takagi_alpha_dyadic(t, alpha)
    rhs = 2**alpha * dist_to_integers(t.value) ** alpha + takagi_alpha_dyadic(Dyadic(2 * t.p, t.m), alpha) / 2
    return abs(lhs - rhs)


# -- error functions ---------------------------------------------------------

_ALPHA = {"constant": 0, "l1": 1, "linf": 1, "l2": 1, "sq_l2": 2}


@dataclass(frozen=True)
class ErrorFunction:
    """Nonnegative modulus ``phi``: ``epsilon`` times a norm power, or a table."""

    kind: str
    epsilon: Fraction = Fraction(1)
    table: Mapping[Vector, Fraction] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.kind not in _ALPHA and self.kind != "tabulated":
            raise ValueError(f"unknown error function kind {self.kind!r}")
        eps = Fraction(self.epsilon)
        if eps < 0:
            raise ValueError("epsilon must be nonnegative")
        object.__setattr__(self, "epsilon", eps)
        table = {as_vector(k): Fraction(v) for k, v in dict(self.table).items()}
        if any(v < 0 for v in table.values()):
            raise ValueError("tabulated error function must be nonnegative")
        object.__setattr__(self, "table", table)

    @property
    def alpha(self) -> int | None:
        return _ALPHA.get(self.kind)

    @property
    def exact(self) -> bool:
        return self.kind != "l2"

    def __call__(self, x) -> Fraction:
        x = as_vector(x)
        if self.kind == "constant":
            return self.epsilon
        if self.kind == "l1":
            return self.epsilon * sum((abs(c) for c in x), Fraction(0))
        if self.kind == "linf":
            return self.epsilon * max((abs(c) for c in x), default=Fraction(0))
        if self.kind == "sq_l2":
            return self.epsilon * sum((c * c for c in x), Fraction(0))
        if self.kind == "tabulated":
            try:
                return self.epsilon * self.table[x]
            except KeyError:
                raise KeyError(f"error function has no entry at {x}") from None
        sq = sum((c * c for c in x), Fraction(0))
        root = math.isqrt(sq.numerator * sq.denominator)
        if root * root == sq.numerator * sq.denominator:
            return self.epsilon * Fraction(root, sq.denominator)
        raise InexactError(f"l2 norm of {x} is irrational; use enclose()")

    def enclose(self, x, bits: int = 64) -> BoundedValue:
        x = as_vector(x)
        if self.exact:
            v = self(x)
            return BoundedValue(v, v)
        sq = sum((c * c for c in x), Fraction(0))
        lo, hi = _root_enclosure(sq, Fraction(1, 2), bits)
        return BoundedValue(self.epsilon * lo, self.epsilon * hi)

    def vanishes_at_zero(self, dim: int) -> bool:
        if self.kind == "constant":
            return self.epsilon == 0
        if self.kind == "tabulated":
            return self.table.get(zero(dim), Fraction(0)) == 0
        return True

    def to_json(self) -> dict:
        out = {"kind": self.kind, "epsilon": format_rational(self.epsilon)}
        if self.kind == "tabulated":
            out["table"] = [
                {"x": [format_rational(c) for c in k], "value": format_rational(v)} for k, v in self.table.items()
            ]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> ErrorFunction:
        if not isinstance(obj, dict) or set(obj) - {"kind", "epsilon", "table"} or "kind" not in obj:
            raise ValueError(f"bad error function object: {obj!r}")
        eps = parse_rational(obj.get("epsilon", "1"))
        table = {}
        for entry in obj.get("table", []):
            table[tuple(parse_rational(c) for c in entry["x"])] = parse_rational(entry["value"])
        return cls(obj["kind"], eps, table)


def phi_transform_dyadic(phi: ErrorFunction, t, x) -> Fraction:
    """Exact ``phi^T(t, x) = sum_n 2^-n phi(2 d(2^n t) x)`` at dyadic ``t``.

    Terms with ``n >= m`` all equal ``phi(0)`` and sum to ``2^(1-m) phi(0)``.
    """
    if not phi.exact:
        raise InexactError(f"{phi.kind} error function has no exact transform")
    x = as_vector(x)
    if phi.kind == "constant":
        return 2 * phi.epsilon
    t = as_dyadic(t)
    total = Fraction(0)
    for n in range(t.m):
        d = dist_to_integers(Fraction(t.p << n, 1 << t.m))
        total += phi(vscale(2 * d, x)) / (1 << n)
    at_zero = phi(zero(len(x)))
    if at_zero:
        total += at_zero * Fraction(2, 1 << t.m)
    return total
