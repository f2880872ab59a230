"""Set-valued maps over rational domains and their Takagi transformation."""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

from svtakagi.exactgeom import (
    CapabilityError,
    Cone,
    DimensionError,
    MAX_CONE_DIM,
    Polyhedron,
    Vector,
    as_vector,
    cone_from_json,
    cone_intersection,
    cone_to_json,
    contains_point,
    format_rational,
    in_cone,
    minkowski_sum,
    parse_rational,
    polyhedron_from_json,
    polyhedron_to_json,
    recession_cone,
    same_set,
    scale,
    subset,
    vadd,
    vector_from_json,
    vector_to_json,
    vscale,
    zero,
)
from svtakagi.takagi import Dyadic, ErrorFunction, as_dyadic, dist_to_integers, phi_transform_dyadic

MAX_DEGREE = 4


class MissingPointError(KeyError):
    """A tabulated map was evaluated off its table."""


class NonConvexValueError(TypeError):
    """A polyhedral operation received a finite (non-convex) point set."""


@dataclass(frozen=True)
class PointSet:
    """A finite, generally non-convex set of points.

    Only tabulated maps produce these, and only the precondition validators
    accept them; everything polyhedral rejects them.
    """

    dim: int
    points: tuple[Vector, ...]

    def __post_init__(self):
        pts = tuple(dict.fromkeys(as_vector(p) for p in self.points))
        if not pts:
            raise ValueError("point set must be nonempty")
        if any(len(p) != self.dim for p in pts):
            raise DimensionError("point set coordinates do not match dim")
        object.__setattr__(self, "points", pts)

    def convex_hull(self) -> Polyhedron:
        return Polyhedron(self.dim, self.points)


def require_polyhedron(value) -> Polyhedron:
    if isinstance(value, PointSet):
        raise NonConvexValueError("finite point-set value where a polyhedron is required")
    return value


# -- polynomials -------------------------------------------------------------

@dataclass(frozen=True)
class Polynomial:
    """Rational polynomial in ``nvars`` variables, stored as exponent -> coefficient."""

    nvars: int
    terms: tuple[tuple[tuple[int, ...], Fraction], ...]

    def __post_init__(self):
        acc: dict[tuple[int, ...], Fraction] = {}
        for exps, coef in self.terms:
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.nvars or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent vector {exps}")
            if sum(exps) > MAX_DEGREE:
                raise CapabilityError(f"polynomial degree above {MAX_DEGREE}")
            acc[exps] = acc.get(exps, Fraction(0)) + Fraction(coef)
        object.__setattr__(self, "terms", tuple(sorted((e, c) for e, c in acc.items() if c != 0)))

    @classmethod
    def from_dict(cls, nvars: int, terms: Mapping) -> Polynomial:
        return cls(nvars, tuple(terms.items()))

    def __call__(self, x: Vector) -> Fraction:
        if len(x) != self.nvars:
            raise DimensionError(f"polynomial in {self.nvars} variables got {len(x)} coordinates")
        return sum((c * math.prod(xi**e for xi, e in zip(x, exps)) for exps, c in self.terms), Fraction(0))

    def to_json(self) -> list:
        return [{"coef": format_rational(c), "exp": list(e)} for e, c in self.terms]

    @classmethod
    def from_json(cls, obj, nvars: int) -> Polynomial:
        if not isinstance(obj, list):
            raise ValueError("polynomial must be a list of terms")
        terms = []
        for term in obj:
            if not isinstance(term, dict) or set(term) != {"coef", "exp"}:
                raise ValueError(f"bad polynomial term {term!r}")
            terms.append((tuple(term["exp"]), parse_rational(term["coef"])))
        return cls(nvars, tuple(terms))


def sq_norm(nvars: int, coef=1) -> Polynomial:
    """``coef * ||x||_2^2``."""
    return Polynomial(nvars, tuple((tuple(2 * (i == j) for j in range(nvars)), Fraction(coef)) for i in range(nvars)))


# -- maps --------------------------------------------------------------------

@dataclass(frozen=True)
class SingletonMap:
    """``x -> {f(x)} + plus`` with polynomial ``f``; ``plus`` defaults to ``{0}``."""

    f: tuple[Polynomial, ...]
    plus: Polyhedron | None = None

    def __post_init__(self):
        if not self.f:
            raise ValueError("singleton map needs at least one component")
        if len({p.nvars for p in self.f}) != 1:
            raise DimensionError("components disagree on the domain dimension")
        if self.plus is not None and self.plus.dim != len(self.f):
            raise DimensionError("addend dimension does not match value dimension")

    @property
    def dim(self) -> int:
        return len(self.f)

    @property
    def domain_dim(self) -> int:
        return self.f[0].nvars

    def evaluate(self, x) -> Polyhedron:
        x = as_vector(x)
        value = Polyhedron.point(tuple(p(x) for p in self.f))
        return value if self.plus is None else minkowski_sum(value, self.plus)

    def to_json(self) -> dict:
        out = {"kind": "singleton", "f": [p.to_json() for p in self.f]}
        if self.plus is not None:
            out["plus"] = polyhedron_to_json(self.plus)
        return out


@dataclass(frozen=True)
class ConePlusScaledMap:
    """``x -> K + phi(x) S0``."""

    K: Cone
    phi: ErrorFunction
    S0: Polyhedron

    def __post_init__(self):
        if self.K.dim != self.S0.dim:
            raise DimensionError("K and S0 live in different dimensions")

    @property
    def dim(self) -> int:
        return self.S0.dim

    def evaluate(self, x) -> Polyhedron:
        return minkowski_sum(self.K.as_polyhedron(), scale(self.S0, self.phi(as_vector(x))))

    def to_json(self) -> dict:
        return {
            "kind": "cone_plus_scaled",
            "K": cone_to_json(self.K),
            "phi": self.phi.to_json(),
            "S0": polyhedron_to_json(self.S0),
        }


@dataclass(frozen=True)
class TabulatedMap:
    """Finite table ``point -> Polyhedron`` (or ``PointSet``)."""

    dim: int
    table: Mapping[Vector, Polyhedron | PointSet] = field(compare=False)

    def __post_init__(self):
        table = {as_vector(k): v for k, v in dict(self.table).items()}
        if not table:
            raise ValueError("tabulated map needs at least one entry")
        if any(v.dim != self.dim for v in table.values()):
            raise DimensionError("tabulated value has the wrong dimension")
        object.__setattr__(self, "table", table)

    def evaluate(self, x) -> Polyhedron | PointSet:
        x = as_vector(x)
        try:
            return self.table[x]
        except KeyError:
            raise MissingPointError(f"no tabulated value at {tuple(str(c) for c in x)}") from None

    def to_json(self) -> dict:
        entries = []
        for k, v in self.table.items():
            val = {"points": [vector_to_json(p) for p in v.points]} if isinstance(v, PointSet) else polyhedron_to_json(v)
            entries.append({"x": vector_to_json(k), "value": val})
        return {"kind": "tabulated", "dim": self.dim, "table": entries}


SetValuedMap = SingletonMap | ConePlusScaledMap | TabulatedMap


def evaluate(S: SetValuedMap, x) -> Polyhedron | PointSet:
    return S.evaluate(x)


def map_from_json(obj, domain_dim: int) -> SetValuedMap:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValueError(f"bad map object: {obj!r}")
    kind = obj["kind"]
    if kind == "singleton":
        if set(obj) - {"kind", "f", "plus"} or not isinstance(obj.get("f"), list):
            raise ValueError(f"bad singleton map: {obj!r}")
        plus = polyhedron_from_json(obj["plus"]) if "plus" in obj else None
        return SingletonMap(tuple(Polynomial.from_json(p, domain_dim) for p in obj["f"]), plus)
    if kind == "cone_plus_scaled":
        if set(obj) != {"kind", "K", "phi", "S0"}:
            raise ValueError(f"cone_plus_scaled needs exactly K, phi, S0: {obj!r}")
        return ConePlusScaledMap(cone_from_json(obj["K"]), ErrorFunction.from_json(obj["phi"]), polyhedron_from_json(obj["S0"]))
    if kind == "tabulated":
        if set(obj) != {"kind", "dim", "table"}:
            raise ValueError(f"tabulated map needs exactly dim, table: {obj!r}")
        table = {}
        for entry in obj["table"]:
            x = vector_from_json(entry["x"])
            if len(x) != domain_dim:
                raise DimensionError(f"table point {entry['x']} is not in dimension {domain_dim}")
            val = entry["value"]
            if isinstance(val, dict) and set(val) == {"points"}:
                table[x] = PointSet(obj["dim"], tuple(vector_from_json(p) for p in val["points"]))
            else:
                table[x] = polyhedron_from_json(val)
        return TabulatedMap(obj["dim"], table)
    raise ValueError(f"unknown map kind {kind!r}")


def map_to_json(S: SetValuedMap) -> dict:
    return S.to_json()


# -- error maps --------------------------------------------------------------

class ErrorMap:
    """A set-valued map with ``0`` in every value, used as ``A`` or ``B``.

    The values are checked on ``sample`` (and at the origin) when the map is
    wrapped. ``S(0)`` may be any polyhedron containing ``0``; when it is a
    cone the Takagi tail collapses into it.
    """

    def __init__(self, S: SetValuedMap, domain_dim: int, sample: Iterable = ()):
        self.map = S
        self.domain_dim = domain_dim
        self.dim = S.dim
        self.zero_value = require_polyhedron(S.evaluate(zero(domain_dim)))
        for u in itertools.chain([zero(domain_dim)], sample):
            value = require_polyhedron(S.evaluate(u))
            if not contains_point(value, zero(self.dim)):
                raise ValueError(f"error map value at {tuple(str(c) for c in as_vector(u))} does not contain 0")

    def evaluate(self, u) -> Polyhedron:
        return require_polyhedron(self.map.evaluate(u))

    @property
    def zero_is_cone(self) -> bool:
        K = recession_cone(self.zero_value)
        return all(in_cone(K.rays, v) for v in self.zero_value.vertices)

    def to_json(self) -> dict:
        return self.map.to_json()


def _value(S, u) -> Polyhedron:
    return require_polyhedron(S.evaluate(u))


def _argument(t: Fraction, k: int, x: Vector) -> Vector:
    return vscale(2 * dist_to_integers(t * (1 << k)), x)


def _unit_t(t) -> Fraction:
    v = t.value if isinstance(t, Dyadic) else Fraction(t)
    if not 0 <= v <= 1:
        raise ValueError(f"t = {v} outside [0, 1]")
    return v


def takagi_transform_truncated(S, t, x, N: int, close_tail: bool = False) -> Polyhedron:
    """``sum_{k=0}^{N} 2^-k S(2 d(2^k t) x)`` as one exact Minkowski sum.

    With ``close_tail`` and a dyadic ``t = p/2^m`` with ``m <= N + 1``, the
    remaining terms are all ``2^-k S(0)`` and their closed sum ``2^-N S(0)``
    is added, giving ``S^T(t, x)`` exactly.
    """
    if N < 0:
        raise ValueError("truncation level must be nonnegative")
    t = _unit_t(t)
    x = as_vector(x)
    total = None
    for k in range(N + 1):
        term = scale(_value(S, _argument(t, k, x)), Fraction(1, 1 << k))
        total = term if total is None else minkowski_sum(total, term).minimal()
    if close_tail:
        d = as_dyadic(t)
        if d.m > N + 1:
            raise ValueError(f"tail of t={d} is not constant after level {N}")
        total = minkowski_sum(total, scale(_value(S, zero(len(x))), Fraction(1, 1 << N))).minimal()
    return total


def takagi_transform(S, t, x) -> Polyhedron:
    """Exact ``S^T(t, x)`` at dyadic ``t``: the finite part plus ``2^(1-m) S(0)``."""
    _unit_t(t)
    d = as_dyadic(t)
    x = as_vector(x)
    total = scale(_value(S, zero(len(x))), Fraction(2, 1 << d.m))
    tv = d.value
    for k in range(d.m):
        term = scale(_value(S, _argument(tv, k, x)), Fraction(1, 1 << k))
        total = minkowski_sum(total, term).minimal()
    return total


def takagi_transform_structured(K: Cone, phi: ErrorFunction, S0: Polyhedron, t, x) -> Polyhedron:
    """``K + phi^T(t, x) S0`` for the map ``u -> K + phi(u) S0``."""
    if not contains_point(S0, zero(S0.dim)):
        raise ValueError("S0 must contain 0")
    _unit_t(t)
    coef = phi_transform_dyadic(phi, t, x)
    return minkowski_sum(K.as_polyhedron(), scale(S0, coef)).minimal()


@dataclass(frozen=True)
class LemmaTTResult:
    inclusion: bool
    equality_applicable: bool
    equality: bool | None

    def __bool__(self) -> bool:
        return self.inclusion and (self.equality is not False)


def check_lemma_TT(S, x, N: int, sample: Sequence | None = None) -> LemmaTTResult:
    """``S(x)`` inside ``S^T(1/2, x)``, and equal when ``S(0)`` lies in ``rec(S)``."""
    x = as_vector(x)
    half = Dyadic(1, 1)
    value = _value(S, x)
    plain = takagi_transform_truncated(S, half, x, N)
    inclusion = bool(subset(value, plain))
    pts = [x] if sample is None else [as_vector(p) for p in sample]
    K = rec_of_map(S, pts + [x]) if S.dim <= MAX_CONE_DIM else None
    s0 = _value(S, zero(len(x)))
    applicable = K is not None and bool(subset(s0, K.as_polyhedron()))
    equality = None
    if applicable:
        exact = takagi_transform_truncated(S, half, x, N, close_tail=True)
        equality = same_set(value, exact)
    return LemmaTTResult(inclusion, applicable, equality)


def rec_of_map(S, sample: Iterable) -> Cone:
    """Intersection of the recession cones of ``S`` over a finite sample.

    This over-approximates the cone of the map on its whole domain; reports
    call it the sampled recession cone.
    """
    if S.dim > MAX_CONE_DIM:
        raise CapabilityError(f"recession cone of maps supports dim <= {MAX_CONE_DIM}")
    cones = []
    for x in sample:
        C = recession_cone(_value(S, x))
        if C not in cones:
            cones.append(C)
    if not cones:
        raise ValueError("empty sample")
    return reduce(cone_intersection, cones[1:], cones[0].minimal())


# -- domain grids ------------------------------------------------------------

@dataclass(frozen=True)
class DomainGrid:
    """Finite sample of a convex region; ``region`` records which one."""

    dim: int
    points: tuple[Vector, ...]
    region: Mapping = field(default_factory=dict, compare=False)

    def __post_init__(self):
        pts = tuple(dict.fromkeys(as_vector(p) for p in self.points))
        if not pts:
            raise ValueError("grid must be nonempty")
        if any(len(p) != self.dim for p in pts):
            raise DimensionError("grid point has the wrong dimension")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "_index", {p: i for i, p in enumerate(pts)})

    @classmethod
    def box(cls, lo, hi, step) -> DomainGrid:
        lo, hi, step = as_vector(lo), as_vector(hi), Fraction(step)
        if len(lo) != len(hi):
            raise DimensionError("box corners differ in dimension")
        if step <= 0 or any(a > b for a, b in zip(lo, hi)):
            raise ValueError("box needs lo <= hi and a positive step")
        axes = [[a + k * step for k in range(int((b - a) / step) + 1)] for a, b in zip(lo, hi)]
        region = {"kind": "box", "lo": lo, "hi": hi, "step": step}
        return cls(len(lo), tuple(itertools.product(*axes)), region)

    @classmethod
    def simplex(cls, vertices: Sequence, step) -> DomainGrid:
        verts = [as_vector(v) for v in vertices]
        step = Fraction(step)
        n = 1 / step
        if step <= 0 or n.denominator != 1:
            raise ValueError("simplex step must be 1/n")
        n = int(n)
        dim = len(verts[0])
        pts = []
        for ks in itertools.product(range(n + 1), repeat=len(verts)):
            if sum(ks) == n:
                p = zero(dim)
                for k, v in zip(ks, verts):
                    p = vadd(p, vscale(Fraction(k, n), v))
                pts.append(p)
        return cls(dim, tuple(pts), {"kind": "simplex", "vertices": tuple(verts), "step": step})

    def index(self, x) -> int:
        return self._index[as_vector(x)]

    def __contains__(self, x) -> bool:
        return as_vector(x) in self._index

    def __len__(self) -> int:
        return len(self.points)

    def adjoin(self, points: Iterable) -> DomainGrid:
        return DomainGrid(self.dim, self.points + tuple(as_vector(p) for p in points), self.region)
