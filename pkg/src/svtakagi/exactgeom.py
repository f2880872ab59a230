"""Exact polyhedral calculus over the rationals.

Every set is finitely generated, ``conv(vertices) + cone(rays)``, and every
predicate is decided by an exact linear feasibility test, so nothing here
touches floating point. Finitely generated sets are closed, which is why no
closure operator appears anywhere in the package.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from svtakagi import lp

Vector = tuple[Fraction, ...]

MAX_CONE_DIM = 4


class DimensionError(ValueError):
    """Operands live in different ambient dimensions."""


class CapabilityError(ValueError):
    """Request exceeds what the exact backend supports (e.g. cone dimension)."""


# -- vectors -----------------------------------------------------------------

def vec(*coords) -> Vector:
    return tuple(Fraction(c) for c in coords)


def as_vector(v: Iterable) -> Vector:
    if type(v) is tuple and all(type(c) is Fraction for c in v):
        return v
    return tuple(Fraction(c) for c in v)


def vadd(u: Vector, v: Vector) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def vsub(u: Vector, v: Vector) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def vscale(c: Fraction, v: Vector) -> Vector:
    return tuple(c * a for a in v)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def zero(dim: int) -> Vector:
    return (Fraction(0),) * dim


def is_zero(v: Vector) -> bool:
    return all(c == 0 for c in v)


def canonical_ray(v: Vector) -> Vector:
    """Scale ``v`` so its first nonzero coordinate is +1 or -1."""
    for c in v:
        if c != 0:
            s = abs(c)
            return v if s == 1 else tuple(a / s for a in v)
    raise ValueError("zero vector is not a ray")


def _dedup(items: Iterable[Vector]) -> tuple[Vector, ...]:
    return tuple(dict.fromkeys(items))


# -- membership primitives ---------------------------------------------------

def _in_generated(vertices: Sequence[Vector], rays: Sequence[Vector], point: Vector) -> bool:
    dim = len(point)
    cols = list(vertices) + list(rays)
    rows = [[c[i] for c in cols] for i in range(dim)]
    rhs = list(point)
    if vertices:
        rows.append([Fraction(1)] * len(vertices) + [Fraction(0)] * len(rays))
        rhs.append(Fraction(1))
    elif not rays:
        return is_zero(point)
    return lp.nonneg_solvable(rows, rhs)


def in_cone(rays: Sequence[Vector], v: Vector) -> bool:
    """Exact test of ``v`` in ``cone(rays)`` (the empty cone is ``{0}``)."""
    if is_zero(v):
        return True
    if not rays:
        return False
    return _in_generated((), rays, v)


# -- types -------------------------------------------------------------------

@dataclass(frozen=True)
class Cone:
    """``cone(rays)``; no rays means the trivial cone ``{0}``."""

    dim: int
    rays: tuple[Vector, ...] = ()

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        rays = []
        for r in self.rays:
            r = as_vector(r)
            if len(r) != self.dim:
                raise DimensionError(f"ray {r} has length {len(r)}, expected {self.dim}")
            if not is_zero(r):
                rays.append(canonical_ray(r))
        object.__setattr__(self, "rays", tuple(sorted(set(rays))))

    @classmethod
    def trivial(cls, dim: int) -> Cone:
        return cls(dim, ())

    def contains(self, v: Vector) -> bool:
        _check_dim(self.dim, len(v))
        return in_cone(self.rays, as_vector(v))

    def issubset(self, other: Cone) -> bool:
        _check_dim(self.dim, other.dim)
        return all(in_cone(other.rays, r) for r in self.rays)

    def same_set(self, other: Cone) -> bool:
        return self.issubset(other) and other.issubset(self)

    def as_polyhedron(self) -> Polyhedron:
        return Polyhedron(self.dim, (zero(self.dim),), self.rays)

    def minimal(self) -> Cone:
        rays = list(self.rays)
        i = 0
        while i < len(rays):
            others = rays[:i] + rays[i + 1:]
            if in_cone(others, rays[i]):
                rays.pop(i)
            else:
                i += 1
        return Cone(self.dim, tuple(rays))


@dataclass(frozen=True)
class Witness:
    """A generator of the left operand that the right operand misses.

    Falsy, so ``if subset(P, Q):`` reads naturally.
    """

    kind: str  # "vertex" or "ray"
    point: Vector

    def __bool__(self) -> bool:
        return False


@dataclass(frozen=True)
class Polyhedron:
    """The set ``conv(vertices) + cone(rays)`` in rational ``dim``-space."""

    dim: int
    vertices: tuple[Vector, ...]
    rays: tuple[Vector, ...] = field(default=())

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        verts = tuple(as_vector(v) for v in self.vertices)
        if not verts:
            raise ValueError("a polyhedron needs at least one vertex")
        rays = []
        for v in verts:
            if len(v) != self.dim:
                raise DimensionError(f"vertex {v} has length {len(v)}, expected {self.dim}")
        for r in self.rays:
            r = as_vector(r)
            if len(r) != self.dim:
                raise DimensionError(f"ray {r} has length {len(r)}, expected {self.dim}")
            if is_zero(r):
                raise ValueError("rays must be nonzero")
            rays.append(canonical_ray(r))
        object.__setattr__(self, "vertices", _dedup(verts))
        object.__setattr__(self, "rays", _dedup(rays))

    # constructors
    @classmethod
    def _trusted(cls, dim: int, vertices: tuple, rays: tuple) -> Polyhedron:
        """Skip validation; generators must already be canonical Fraction tuples."""
        P = object.__new__(cls)
        object.__setattr__(P, "dim", dim)
        object.__setattr__(P, "vertices", _dedup(vertices))
        object.__setattr__(P, "rays", _dedup(rays))
        return P

    @classmethod
    def point(cls, v: Iterable) -> Polyhedron:
        v = as_vector(v)
        return cls(len(v), (v,))

    @classmethod
    def zero(cls, dim: int) -> Polyhedron:
        return cls(dim, (zero(dim),))

    @classmethod
    def interval(cls, lo, hi) -> Polyhedron:
        return cls(1, (vec(lo), vec(hi)))

    @classmethod
    def box(cls, radius, dim: int) -> Polyhedron:
        r = Fraction(radius)
        if r < 0:
            raise ValueError("box radius must be nonnegative")
        if r == 0:
            return cls.zero(dim)
        return cls(dim, tuple(itertools.product((-r, r), repeat=dim)))

    def __add__(self, other: Polyhedron) -> Polyhedron:
        return minkowski_sum(self, other)

    @property
    def is_bounded(self) -> bool:
        return not self.rays

    def contains(self, v) -> bool:
        return contains_point(self, as_vector(v))

    def minimal(self) -> Polyhedron:
        """Drop redundant generators; the represented set is unchanged."""
        if self.dim == 1:
            return _minimal_1d(self)
        rays = list(Cone(self.dim, self.rays).minimal().rays) if self.rays else []
        verts = list(self.vertices)
        i = 0
        while i < len(verts) and len(verts) > 1:
            others = verts[:i] + verts[i + 1:]
            if _in_generated(others, rays, verts[i]):
                verts.pop(i)
            else:
                i += 1
        return Polyhedron(self.dim, tuple(verts), tuple(rays))


_UP, _DOWN = (Fraction(1),), (Fraction(-1),)


def _minimal_1d(P: Polyhedron) -> Polyhedron:
    xs = [v[0] for v in P.vertices]
    dirs = {r[0] for r in P.rays}
    up, down = Fraction(1) in dirs, Fraction(-1) in dirs
    if up and down:
        return Polyhedron._trusted(1, ((min(xs),),), (_UP, _DOWN))
    if up:
        return Polyhedron._trusted(1, ((min(xs),),), (_UP,))
    if down:
        return Polyhedron._trusted(1, ((max(xs),),), (_DOWN,))
    lo, hi = min(xs), max(xs)
    return Polyhedron._trusted(1, ((lo,), (hi,)) if lo != hi else ((lo,),), ())


def _check_dim(a: int, b: int) -> None:
    if a != b:
        raise DimensionError(f"dimension mismatch: {a} vs {b}")


# -- operations --------------------------------------------------------------

def minkowski_sum(P: Polyhedron, Q: Polyhedron) -> Polyhedron:
    _check_dim(P.dim, Q.dim)
    verts = tuple(vadd(p, q) for p in P.vertices for q in Q.vertices)
    return Polyhedron._trusted(P.dim, verts, P.rays + Q.rays)


def scale(P: Polyhedron, c, keep_rays: bool = False) -> Polyhedron:
    """``c * P`` for ``c >= 0``.

    ``0 * P`` is ``{0}`` unless ``keep_rays`` asks for ``{0} + rec(P)``.
    """
    c = Fraction(c)
    if c < 0:
        raise ValueError(f"negative scale factor {c}")
    if c == 0:
        return Polyhedron._trusted(P.dim, (zero(P.dim),), P.rays if keep_rays else ())
    if c == 1:
        return P
    return Polyhedron._trusted(P.dim, tuple(vscale(c, v) for v in P.vertices), P.rays)


def translate(P: Polyhedron, v: Vector) -> Polyhedron:
    _check_dim(P.dim, len(v))
    return Polyhedron(P.dim, tuple(vadd(v, u) for u in P.vertices), P.rays)


def _interval(P: Polyhedron) -> tuple[Fraction | None, Fraction | None]:
    """Endpoints of a 1-d polyhedron; ``None`` marks an infinite end."""
    xs = [v[0] for v in P.vertices]
    dirs = {r[0] for r in P.rays}
    return (None if -1 in dirs else min(xs)), (None if 1 in dirs else max(xs))


def _interval_has(lo, hi, x) -> bool:
    return (lo is None or lo <= x) and (hi is None or x <= hi)


def contains_point(P: Polyhedron, v: Vector) -> bool:
    _check_dim(P.dim, len(v))
    v = as_vector(v)
    if P.dim == 1:
        return _interval_has(*_interval(P), v[0])
    return _in_generated(P.vertices, P.rays, v)


def subset(P: Polyhedron, Q: Polyhedron, slack=0) -> bool | Witness:
    """``P`` inside ``Q + [-slack, slack]^d``; True, or a Witness on failure."""
    _check_dim(P.dim, Q.dim)
    slack = Fraction(slack)
    if slack < 0:
        raise ValueError("slack must be nonnegative")
    if slack > 0:
        Q = minkowski_sum(Q, Polyhedron.box(slack, Q.dim))
    if P.dim == 1:
        return _subset_1d(P, Q)
    for r in P.rays:
        if not in_cone(Q.rays, r):
            return Witness("ray", r)
    for v in P.vertices:
        if not _in_generated(Q.vertices, Q.rays, v):
            return Witness("vertex", v)
    return True


def _subset_1d(P: Polyhedron, Q: Polyhedron) -> bool | Witness:
    lo, hi = _interval(Q)
    for r in P.rays:
        if (r[0] > 0 and hi is not None) or (r[0] < 0 and lo is not None):
            return Witness("ray", r)
    for v in P.vertices:
        if not _interval_has(lo, hi, v[0]):
            return Witness("vertex", v)
    return True


def same_set(P: Polyhedron, Q: Polyhedron) -> bool:
    """Mutual inclusion with zero slack."""
    return bool(subset(P, Q)) and bool(subset(Q, P))


def recession_cone(P: Polyhedron) -> Cone:
    return Cone(P.dim, P.rays)


# -- double description ------------------------------------------------------

def _dd_generators(ineqs: Sequence[Vector], dim: int) -> tuple[list[Vector], list[Vector]]:
    """Generators of ``{x : a.x >= 0 for a in ineqs}`` as (lineality basis, rays)."""
    lin = [tuple(Fraction(int(i == j)) for j in range(dim)) for i in range(dim)]
    rays: list[Vector] = []
    for a in ineqs:
        if is_zero(a):
            continue
        vals = [dot(a, l) for l in lin]
        k = next((i for i, v in enumerate(vals) if v != 0), None)
        if k is not None:
            l, al = lin[k], vals[k]
            if al < 0:
                l, al = vscale(Fraction(-1), l), -al
            lin = [vsub(lin[j], vscale(vals[j] / al, l)) for j in range(len(lin)) if j != k]
            rays = [vsub(r, vscale(dot(a, r) / al, l)) for r in rays]
            rays = [canonical_ray(r) for r in rays if not is_zero(r)]
            rays.append(canonical_ray(l))
        else:
            pos, zer, neg = [], [], []
            for r in rays:
                s = dot(a, r)
                (pos if s > 0 else neg if s < 0 else zer).append((r, s))
            new = [r for r, _ in pos] + [r for r, _ in zer]
            # every positive/negative pair, then exact pruning; adjacency
            # shortcuts are unsafe once equality pairs flatten the cone
            for (p, sp), (q, sq) in itertools.product(pos, neg):
                c = vsub(vscale(sp, q), vscale(sq, p))
                if not is_zero(c):
                    new.append(canonical_ray(c))
            rays = list(Cone(dim, tuple(new)).minimal().rays) if new else []
    return lin, rays


def _cone_inequalities(C: Cone) -> list[Vector]:
    """Normals ``a`` with ``C = {x : a.x >= 0}``."""
    lin, rays = _dd_generators(C.rays, C.dim)
    return rays + lin + [vscale(Fraction(-1), l) for l in lin]


def cone_intersection(C1: Cone, C2: Cone) -> Cone:
    _check_dim(C1.dim, C2.dim)
    if C1.dim > MAX_CONE_DIM:
        raise CapabilityError(f"cone intersection supports dim <= {MAX_CONE_DIM}, got {C1.dim}")
    ineqs = _cone_inequalities(C1) + _cone_inequalities(C2)
    lin, rays = _dd_generators(ineqs, C1.dim)
    gens = rays + lin + [vscale(Fraction(-1), l) for l in lin]
    return Cone(C1.dim, tuple(gens)).minimal()


# -- serialization -----------------------------------------------------------

def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def parse_rational(s) -> Fraction:
    """Exact parse of ``"p/q"``, ``"p"`` or a JSON integer; floats are rejected."""
    if isinstance(s, bool):
        raise ValueError(f"not a rational: {s!r}")
    if isinstance(s, int):
        return Fraction(s)
    if not isinstance(s, str):
        raise ValueError(f"not a rational string: {s!r}")
    num, sep, den = s.strip().partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"not an exact rational: {s!r}") from None
    if q == 0:
        raise ValueError(f"zero denominator: {s!r}")
    return Fraction(p, q)


def vector_to_json(v: Vector) -> list[str]:
    return [format_rational(c) for c in v]


def vector_from_json(v) -> Vector:
    if not isinstance(v, list):
        raise ValueError(f"expected a list of rationals, got {v!r}")
    return tuple(parse_rational(c) for c in v)


def polyhedron_to_json(P: Polyhedron) -> dict:
    return {
        "dim": P.dim,
        "vertices": [vector_to_json(v) for v in P.vertices],
        "rays": [vector_to_json(r) for r in P.rays],
    }


def polyhedron_from_json(obj: dict) -> Polyhedron:
    if not isinstance(obj, dict) or set(obj) - {"dim", "vertices", "rays"}:
        raise ValueError(f"bad polyhedron object: {obj!r}")
    try:
        dim = obj["dim"]
        verts = [vector_from_json(v) for v in obj["vertices"]]
    except KeyError as e:
        raise ValueError(f"polyhedron is missing {e}") from None
    rays = [vector_from_json(r) for r in obj.get("rays", [])]
    if not isinstance(dim, int) or isinstance(dim, bool):
        raise ValueError("polyhedron dim must be an integer")
    return Polyhedron(dim, tuple(verts), tuple(rays))


def cone_to_json(C: Cone) -> dict:
    return {"dim": C.dim, "rays": [vector_to_json(r) for r in C.rays]}


def cone_from_json(obj: dict) -> Cone:
    if not isinstance(obj, dict) or set(obj) - {"dim", "rays"} or "dim" not in obj:
        raise ValueError(f"bad cone object: {obj!r}")
    return Cone(obj["dim"], tuple(vector_from_json(r) for r in obj.get("rays", [])))


def bounding_radius(vectors: Iterable[Vector]) -> Fraction:
    """Smallest ``r`` with every vector inside ``[-r, r]^d``."""
    return max((abs(c) for v in vectors for c in v), default=Fraction(0))


def lcm_denominator(vectors: Iterable[Vector]) -> int:
    return math.lcm(1, *(c.denominator for v in vectors for c in v))
