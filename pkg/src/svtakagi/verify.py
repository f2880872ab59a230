"""Hypothesis, conclusion and proof-chain checks for Jensen-type set-valued maps.

Every check reduces to exact polyhedral inclusions. Conclusions are tested at
dyadic parameters, where the Takagi transforms of the error maps are finite
Minkowski sums.
"""

from __future__ import annotations

import os
import random
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from svtakagi.exactgeom import (
    Cone,
    Polyhedron,
    Vector,
    Witness,
    as_vector,
    bounding_radius,
    cone_to_json,
    contains_point,
    format_rational,
    in_cone,
    minkowski_sum,
    same_set,
    scale,
    subset,
    vadd,
    vector_to_json,
    vscale,
    vsub,
    zero,
)
from svtakagi.svmap import (
    ConePlusScaledMap,
    DomainGrid,
    MissingPointError,
    NonConvexValueError,
    PointSet,
    SingletonMap,
    Polynomial,
    rec_of_map,
    require_polyhedron,
    takagi_transform,
)
from svtakagi.takagi import Dyadic, ErrorFunction, as_dyadic, dist_to_integers, dyadic_lattice

CONVEX = "convex"
CONCAVE = "concave"
PROBE_FACTOR = 2


@dataclass(frozen=True)
class TestPair:
    __test__ = False  # not a pytest class

    index: int
    x: Vector
    y: Vector
    t_list: tuple[Dyadic, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "x", as_vector(self.x))
        object.__setattr__(self, "y", as_vector(self.y))
        object.__setattr__(self, "t_list", tuple(as_dyadic(t) for t in self.t_list))

    @property
    def u(self) -> Vector:
        return vsub(self.x, self.y)

    def point(self, t) -> Vector:
        t = as_dyadic(t).value if isinstance(t, Dyadic) else Fraction(t)
        return vadd(vscale(t, self.x), vscale(1 - t, self.y))


@dataclass(frozen=True)
class CheckRecord:
    kind: str
    pair: tuple[int, ...]
    t: Dyadic | None
    passed: bool | None  # None marks a skipped check
    witness: Witness | None = None
    slack: Fraction = Fraction(0)
    level: int | None = None
    note: str = ""
    point: Vector | None = None
    margin: Fraction | None = None

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "pair": list(self.pair),
            "t": None if self.t is None else str(self.t),
            "pass": self.passed,
            "witness": None if self.witness is None else vector_to_json(self.witness.point),
            "witness_kind": None if self.witness is None else self.witness.kind,
            "slack": format_rational(self.slack),
            "level": self.level,
        }
        if self.point is not None:
            out["point"] = vector_to_json(self.point)
        if self.margin is not None:
            out["margin"] = format_rational(self.margin)
        if self.note:
            out["note"] = self.note
        return out


def _is_probe(rec: CheckRecord) -> bool:
    return rec.kind.startswith("probe_")


@dataclass
class VerificationReport:
    scenario: str
    records: list[CheckRecord] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def extend(self, records: Iterable[CheckRecord]) -> None:
        self.records.extend(records)

    @property
    def failures(self) -> list[CheckRecord]:
        return [r for r in self.records if r.passed is False and not _is_probe(r)]

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> dict:
        main = [r for r in self.records if not _is_probe(r)]
        probes = [r for r in self.records if _is_probe(r)]
        margins = [r.margin for r in probes if r.margin is not None]
        return {
            "pass": sum(r.passed is True for r in main),
            "fail": sum(r.passed is False for r in main),
            "skipped": sum(r.passed is None for r in main),
            "probe_pass": sum(r.passed is True for r in probes),
            "probe_fail": sum(r.passed is False for r in probes),
            "probe_max_margin": format_rational(max(margins)) if margins else None,
        }

    def to_json(self) -> dict:
        out = {"scenario": self.scenario, "checks": [r.to_json() for r in self.records], "summary": self.summary()}
        if self.info:
            out["info"] = self.info
        return out


# -- evaluation with memoization ---------------------------------------------

class Problem:
    """``F``, ``A``, ``B`` with cached evaluations and transforms."""

    def __init__(self, F, A, B):
        self.F, self.A, self.B = F, A, B
        self._cache: dict = {}

    def _memo(self, key, thunk):
        try:
            return self._cache[key]
        except KeyError:
            value = self._cache[key] = thunk()
            return value

    def f(self, x) -> Polyhedron:
        x = as_vector(x)
        return self._memo(("F", x), lambda: require_polyhedron(self.F.evaluate(x)))

    def a(self, u) -> Polyhedron:
        u = as_vector(u)
        return self._memo(("A", u), lambda: require_polyhedron(self.A.evaluate(u)))

    def b(self, u) -> Polyhedron:
        u = as_vector(u)
        return self._memo(("B", u), lambda: require_polyhedron(self.B.evaluate(u)))

    def a_T(self, t: Dyadic, u) -> Polyhedron:
        u = as_vector(u)
        return self._memo(("AT", t, u), lambda: takagi_transform(_Cached(self.a, self.A.dim), t, u))

    def b_T(self, t: Dyadic, u) -> Polyhedron:
        u = as_vector(u)
        return self._memo(("BT", t, u), lambda: takagi_transform(_Cached(self.b, self.B.dim), t, u))


@dataclass(frozen=True)
class _Cached:
    fn: Callable
    dim: int

    def evaluate(self, u):
        return self.fn(u)


def _combo(F_x: Polyhedron, F_y: Polyhedron, t: Fraction) -> Polyhedron:
    """``t F(x) + (1 - t) F(y)`` with ``0 * P = {0}``."""
    return minkowski_sum(scale(F_x, t), scale(F_y, 1 - t))


def _half_sum(P: Polyhedron, Q: Polyhedron) -> Polyhedron:
    return scale(minkowski_sum(P, Q), Fraction(1, 2))


def _inclusion(kind, pair, t, lhs, rhs, slack=Fraction(0), level=None, note="") -> CheckRecord:
    result = subset(lhs, rhs, slack)
    witness = None if result is True else result
    return CheckRecord(kind, pair, t, result is True, witness, Fraction(slack), level, note)


# -- hypotheses --------------------------------------------------------------

def jensen_sets(P: Problem, x, y, mode: str) -> tuple[Polyhedron, Polyhedron]:
    x, y = as_vector(x), as_vector(y)
    mid = vscale(Fraction(1, 2), vadd(x, y))
    u = vsub(x, y)
    avg = _half_sum(P.f(x), P.f(y))
    if mode == CONVEX:
        return minkowski_sum(avg, P.a(u)), minkowski_sum(P.f(mid), P.b(u))
    return minkowski_sum(P.f(mid), P.a(u)), minkowski_sum(avg, P.b(u))


def _jensen_record(P: Problem, pair: TestPair, mode: str) -> CheckRecord:
    kind = f"jensen_{mode}"
    try:
        lhs, rhs = jensen_sets(P, pair.x, pair.y, mode)
    except MissingPointError as exc:
        return CheckRecord(kind, (pair.index,), None, None, note=f"coverage gap: {exc.args[0]}")
    return _inclusion(kind, (pair.index,), None, lhs, rhs)


def check_jensen_convex(F, A, B, pairs: Sequence[TestPair]) -> VerificationReport:
    P = Problem(F, A, B)
    return VerificationReport("jensen_convex", [_jensen_record(P, p, CONVEX) for p in pairs])


def check_jensen_concave(F, A, B, pairs: Sequence[TestPair]) -> VerificationReport:
    P = Problem(F, A, B)
    return VerificationReport("jensen_concave", [_jensen_record(P, p, CONCAVE) for p in pairs])


# -- conclusions -------------------------------------------------------------

def conclusion_sets(P: Problem, pair: TestPair, t, mode: str, a_factor: int = 1) -> tuple[Polyhedron, Polyhedron]:
    """Both sides of the convexity (or concavity) type inclusion at dyadic ``t``."""
    t = as_dyadic(t)
    return P._memo(("C", pair.x, pair.y, t, mode, a_factor), lambda: _conclusion_sets(P, pair, t, mode, a_factor))


def _conclusion_sets(P: Problem, pair: TestPair, t: Dyadic, mode: str, a_factor: int):
    u = pair.u
    combo = _combo(P.f(pair.x), P.f(pair.y), t.value)
    at = P.a_T(t, u)
    if a_factor != 1:
        at = scale(at, a_factor)
    if mode == CONVEX:
        return minkowski_sum(combo, at).minimal(), minkowski_sum(P.f(pair.point(t)), P.b_T(t, u)).minimal()
    return minkowski_sum(P.f(pair.point(t)), at).minimal(), minkowski_sum(combo, P.b_T(t, u)).minimal()


def _conclusion_record(P: Problem, pair: TestPair, t: Dyadic, mode: str, slack) -> CheckRecord:
    kind = f"conclusion_{mode}"
    try:
        lhs, rhs = conclusion_sets(P, pair, t, mode)
    except MissingPointError as exc:
        return CheckRecord(kind, (pair.index,), t, None, level=t.m, note=f"coverage gap: {exc.args[0]}")
    return _inclusion(kind, (pair.index,), t, lhs, rhs, slack, level=t.m)


def check_conclusion_convex(F, A, B, pair: TestPair, t, slack=0) -> CheckRecord:
    return _conclusion_record(Problem(F, A, B), pair, as_dyadic(t), CONVEX, Fraction(slack))


def check_conclusion_concave(F, A, B, pair: TestPair, t, slack=0) -> CheckRecord:
    return _conclusion_record(Problem(F, A, B), pair, as_dyadic(t), CONCAVE, Fraction(slack))


# -- inductive oracle --------------------------------------------------------

@dataclass(frozen=True)
class OracleResult:
    """Step-by-step replay of the bisection induction at one dyadic ``t``."""

    mode: str
    pair: TestPair
    t: Dyadic
    steps: tuple[CheckRecord, ...]
    left: Polyhedron
    right: Polyhedron
    K: Cone

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.steps)

    def first_failure(self) -> CheckRecord | None:
        return next((s for s in self.steps if not s.passed), None)

    def record(self) -> CheckRecord:
        bad = self.first_failure()
        if bad is None:
            return CheckRecord(f"oracle_{self.mode}", (self.pair.index,), self.t, True, level=self.t.m)
        return CheckRecord(f"oracle_{self.mode}", (self.pair.index,), self.t, False, bad.witness,
                           level=self.t.m, note=f"step {bad.kind}")


def bisection_orbit(t: Dyadic) -> list[Fraction]:
    """``t_0 = t``, ``t_{j+1} = 2 t_j`` or ``2 t_j - 1``; ends at 0 or 1 after ``m`` steps."""
    t = as_dyadic(t)
    orbit = [t.value]
    for _ in range(t.m):
        s = orbit[-1]
        orbit.append(2 * s if s <= Fraction(1, 2) else 2 * s - 1)
    return orbit


def _oracle_K(P: Problem, pair: TestPair, orbit: Sequence[Fraction], K: Cone | None) -> Cone:
    if K is not None:
        return K
    u = pair.u
    sample = [zero(len(u))] + [vscale(2 * dist_to_integers(s), u) for s in orbit]
    return rec_of_map(_Cached(P.b, P.B.dim), sample)


def _run_oracle(P: Problem, pair: TestPair, t, mode: str, K: Cone | None = None) -> OracleResult:
    t = as_dyadic(t)
    x, y, u = pair.x, pair.y, pair.u
    orbit = bisection_orbit(t)
    m = t.m
    K = _oracle_K(P, pair, orbit, K)
    Kp = K.as_polyhedron()
    half = Fraction(1, 2)
    idx = (pair.index,)
    steps: list[CheckRecord] = []

    def level_sets(s: Fraction, SA: Polyhedron, SB: Polyhedron):
        combo = _combo(P.f(x), P.f(y), s)
        here = P.f(pair.point(s))
        if mode == CONVEX:
            return minkowski_sum(combo, SA).minimal(), minkowski_sum(minkowski_sum(here, Kp), SB).minimal()
        return minkowski_sum(here, SA).minimal(), minkowski_sum(minkowski_sum(combo, Kp), SB).minimal()

    dim = P.A.dim
    SA = Polyhedron.zero(dim)
    SB = Polyhedron.zero(P.B.dim)
    L, R = level_sets(orbit[m], SA, SB)
    steps.append(_inclusion("base", idx, t, L, R, level=m))

    for j in range(m - 1, -1, -1):
        s, nxt = orbit[j], orbit[j + 1]
        w = pair.point(nxt)
        arg = vscale(2 * dist_to_integers(s), u)
        # the endpoint kept fixed by this bisection step
        anchor = y if s <= half else x
        F_anchor = P.f(anchor)
        a_arg, b_arg = P.a(arg), P.b(arg)
        SA_next, SB_next = SA, SB
        SA = minkowski_sum(a_arg, scale(SA_next, half)).minimal()
        SB = minkowski_sum(b_arg, scale(SB_next, half)).minimal()
        L_next, R_next = L, R
        L, R = level_sets(s, SA, SB)
        z = pair.point(s)
        lvl = m - j
        if mode == CONVEX:
            jl = minkowski_sum(_half_sum(P.f(w), F_anchor), a_arg)
            jr = minkowski_sum(P.f(z), b_arg)
            M1 = minkowski_sum(minkowski_sum(scale(L_next, half), scale(F_anchor, half)), a_arg).minimal()
            M2 = minkowski_sum(minkowski_sum(scale(R_next, half), scale(F_anchor, half)), a_arg).minimal()
            steps.append(_inclusion("split", idx, t, L, M1, level=lvl))
            steps.append(_inclusion("induction", idx, t, M1, M2, level=lvl))
            steps.append(_inclusion("jensen", idx, t, jl, jr, level=lvl))
            steps.append(_inclusion("combine", idx, t, M2, R, level=lvl))
        else:
            jl = minkowski_sum(P.f(z), a_arg)
            jr = minkowski_sum(_half_sum(P.f(w), F_anchor), b_arg)
            M1 = minkowski_sum(minkowski_sum(scale(L_next, half), scale(F_anchor, half)), b_arg).minimal()
            M2 = minkowski_sum(minkowski_sum(scale(R_next, half), scale(F_anchor, half)), b_arg).minimal()
            # weight the induction hypothesis put on the anchor endpoint
            c = (1 - nxt) if s <= half else nxt
            kl = minkowski_sum(scale(F_anchor, c), F_anchor)
            kr = minkowski_sum(scale(F_anchor, c + 1), Kp)
            steps.append(_inclusion("jensen", idx, t, jl, jr, level=lvl))
            steps.append(_inclusion("split", idx, t, L, M1, level=lvl))
            steps.append(_inclusion("induction", idx, t, M1, M2, level=lvl))
            steps.append(_inclusion("k_convexity", idx, t, kl, kr, level=lvl))
            steps.append(_inclusion("combine", idx, t, M2, R, level=lvl))

    tail = Fraction(2, 1 << m)
    left = minkowski_sum(L, scale(P.a(zero(len(u))), tail)).minimal()
    right = minkowski_sum(R, scale(P.b(zero(len(u))), tail)).minimal()
    steps.append(_inclusion("final", idx, t, left, right, level=m))
    return OracleResult(mode, pair, t, tuple(steps), left, right, K)


def inductive_oracle_convex(F, A, B, pair: TestPair, t, K: Cone | None = None) -> OracleResult:
    return _run_oracle(Problem(F, A, B), pair, t, CONVEX, K)


def inductive_oracle_concave(F, A, B, pair: TestPair, t, K: Cone | None = None) -> OracleResult:
    return _run_oracle(Problem(F, A, B), pair, t, CONCAVE, K)


def oracle_equivalent(P: Problem, oracle: OracleResult) -> bool:
    """Oracle final sets against the directly computed conclusion sets."""
    lhs, rhs = conclusion_sets(P, oracle.pair, oracle.t, oracle.mode)
    return same_set(lhs, oracle.left) and same_set(rhs, oracle.right)


# -- preconditions -----------------------------------------------------------

def _rays_in(rays: Iterable[Vector], K: Cone) -> Vector | None:
    return next((r for r in rays if not in_cone(K.rays, r)), None)


def _k_convex_witness(value, K: Cone, t: Fraction) -> Vector | None:
    if isinstance(value, PointSet):
        for p in value.points:
            for q in value.points:
                c = vadd(vscale(t, p), vscale(1 - t, q))
                if not any(in_cone(K.rays, vsub(c, v)) for v in value.points):
                    return c
        return None
    result = subset(minkowski_sum(scale(value, t), scale(value, 1 - t)), minkowski_sum(value, K.as_polyhedron()))
    return None if result is True else result.point


def _aggregate(kind: str, count: int, failures: list[CheckRecord]) -> list[CheckRecord]:
    if failures:
        return failures
    return [CheckRecord(kind, (), None, True, note=f"{count} grid points")]


def validate_preconditions(F, K: Cone, grid: DomainGrid, mode: str) -> VerificationReport:
    """Finite-sample boundedness (and, for the concave theorem, K-convexity) checks.

    Passing kinds collapse into one record each; every failing grid point
    gets its own record with a witness.
    """
    values = []
    gaps = []
    for x in grid.points:
        try:
            values.append((x, F.evaluate(x)))
        except MissingPointError:
            gaps.append(x)
    records: list[CheckRecord] = [
        CheckRecord("coverage_gap", (), None, None, note="no value at grid point", point=x) for x in gaps
    ]

    def generators(value):
        return (value.points, ()) if isinstance(value, PointSet) else (value.vertices, value.rays)

    lower_fail = []
    for x, value in values:
        bad = _rays_in(generators(value)[1], K)
        if bad is not None:
            lower_fail.append(CheckRecord("lower_bounded", (), None, False, Witness("ray", bad), point=x))
    radius = max((bounding_radius(generators(v)[0]) for _, v in values), default=Fraction(0))

    if mode == CONVEX:
        records += _aggregate("lower_bounded", len(values), lower_fail)
        # smallest box reaching the origin from every value at once
        reach = max((min(max(abs(c) for c in p) for p in generators(v)[0]) for _, v in values), default=Fraction(0))
        box = minkowski_sum(Polyhedron.box(reach, K.dim), K.as_polyhedron())
        upper_fail = []
        for x, value in values:
            hull = value.convex_hull() if isinstance(value, PointSet) else value
            if not contains_point(minkowski_sum(hull, box), zero(K.dim)):
                upper_fail.append(CheckRecord("weak_upper_bounded", (), None, False, Witness("vertex", zero(K.dim)), point=x))
        records += _aggregate("weak_upper_bounded", len(values), upper_fail)
    else:
        conv_fail = []
        for x, value in values:
            for t in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
                w = _k_convex_witness(value, K, t)
                if w is not None:
                    conv_fail.append(CheckRecord("k_convex", (), None, False, Witness("vertex", w), point=x,
                                                 note=f"t={format_rational(t)}"))
                    break
        records += _aggregate("k_convex", len(values), conv_fail)
        records += _aggregate("common_lower_bound", len(values), lower_fail)
    report = VerificationReport("preconditions", records)
    report.info["lower_box_radius"] = format_rational(radius)
    return report


# -- probing -----------------------------------------------------------------

def _margin(lhs: Polyhedron, rhs: Polyhedron, bits: int = 16) -> Fraction | None:
    """Smallest slack (to ``2^-bits``) making ``lhs`` fit; ``None`` if a ray escapes."""
    if any(not in_cone(rhs.rays, r) for r in lhs.rays):
        return None
    hi = Fraction(1)
    while not subset(lhs, rhs, hi):
        hi *= 2
    lo = Fraction(0)
    for _ in range(bits):
        mid = (lo + hi) / 2
        if subset(lhs, rhs, mid):
            hi = mid
        else:
            lo = mid
    return hi


def _probe_record(P: Problem, pair: TestPair, t: Dyadic, mode: str, with_margin: bool) -> CheckRecord:
    lhs, rhs = conclusion_sets(P, pair, t, mode, a_factor=PROBE_FACTOR)
    rec = _inclusion(f"probe_{mode}", (pair.index,), t, lhs, rhs, level=t.m,
                     note=f"A scaled by {PROBE_FACTOR}")
    if rec.passed or not with_margin:
        return rec
    return CheckRecord(rec.kind, rec.pair, rec.t, False, rec.witness, rec.slack, rec.level,
                       "hypothesis necessity witness", margin=_margin(lhs, rhs))


# -- orchestration -----------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    mode: str = CONVEX
    depth: int = 6
    slack: Fraction = Fraction(0)
    probe: bool = False
    oracle: bool = True


def pair_records(F, A, B, pair: TestPair, config: RunConfig, K: Cone | None = None) -> list[CheckRecord]:
    """All per-pair records: the hypothesis, then per ``t`` the conclusion, oracle and probe."""
    P = Problem(F, A, B)
    records = [_jensen_record(P, pair, config.mode)]
    ts = sorted(pair.t_list) if pair.t_list else dyadic_lattice(config.depth)
    for t in ts:
        idx = (pair.index,)
        try:
            rec = _conclusion_record(P, pair, t, config.mode, config.slack)
            records.append(rec)
            if rec.passed is None:
                continue
            if config.oracle:
                oracle = _run_oracle(P, pair, t, config.mode, K)
                records.append(oracle.record())
                same = oracle_equivalent(P, oracle)
                records.append(CheckRecord("oracle_equivalence", idx, t, same, None if same else
                                           Witness("vertex", pair.point(t)), level=t.m))
            if config.probe:
                records.append(_probe_record(P, pair, t, config.mode, with_margin=t == Dyadic(1, 1)))
        except MissingPointError as exc:
            records.append(CheckRecord("coverage_gap", idx, t, None, level=t.m, note=str(exc.args[0])))
        except NonConvexValueError as exc:
            records.append(CheckRecord("non_convex_value", idx, t, None, level=t.m, note=str(exc)))
    return records


def _pair_job(args):
    return pair_records(*args)


def worker_count() -> int:
    raw = os.environ.get("SVTAKAGI_THREADS", "0").strip() or "0"
    n = int(raw)
    if n < 0:
        raise ValueError("SVTAKAGI_THREADS must be nonnegative")
    return n or (os.cpu_count() or 1)


def sampled_cone(B, pairs: Sequence[TestPair], depth: int) -> Cone:
    """The sampled recession cone of ``B`` over the arguments the checks use."""
    sample = {zero(len(pairs[0].u))} if pairs else set()
    for pair in pairs:
        for k in range(depth + 1):
            for s in (Fraction(j, 1 << k) for j in range(0, (1 << k) + 1)):
                sample.add(vscale(2 * dist_to_integers(s), pair.u))
    return rec_of_map(B, sorted(sample))


def run_checks(scenario: str, F, A, B, grid: DomainGrid, pairs: Sequence[TestPair], config: RunConfig,
               workers: int | None = None) -> VerificationReport:
    K = sampled_cone(B, pairs, config.depth) if pairs else rec_of_map(B, [zero(grid.dim)])
    report = VerificationReport(scenario)
    pre = validate_preconditions(F, K, grid, config.mode)
    report.extend(pre.records)
    report.info["sampled_recession_cone"] = cone_to_json(K)
    report.info.update(pre.info)
    jobs = [(F, A, B, pair, config, K) for pair in pairs]
    workers = worker_count() if workers is None else workers
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            chunks = list(pool.map(_pair_job, jobs))
    else:
        chunks = [_pair_job(job) for job in jobs]
    for chunk in chunks:
        report.extend(chunk)
    return report


# -- counterexample search ---------------------------------------------------

@dataclass(frozen=True)
class FamilyInstance:
    F: object
    A: object
    B: object
    lo: Fraction
    hi: Fraction
    params: dict


@dataclass(frozen=True)
class Family:
    """A parameterized scenario: ``sample(rng)`` draws one concrete instance."""

    name: str
    mode: str
    sample: Callable[[random.Random], FamilyInstance]
    dim: int = 1


@dataclass(frozen=True)
class CounterexampleWitness:
    family: str
    trial: int
    kind: str  # "bug" or "hypothesis necessity witness"
    params: dict
    x: Vector
    y: Vector
    t: Dyadic
    witness: Witness


def _rand_q(rng: random.Random, lo: Fraction, hi: Fraction, den: int = 4) -> Fraction:
    a, b = int(lo * den), int(hi * den)
    return Fraction(rng.randint(a, b), den)


def strong_quadratic_family(mode: str = CONVEX) -> Family:
    """``f(x) = +-(a x^2 + b x + c)`` with strong modulus at most ``a/4``."""
    sign = 1 if mode == CONVEX else -1

    def sample(rng: random.Random) -> FamilyInstance:
        a = Fraction(rng.randint(1, 8), rng.randint(1, 4))
        b = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
        c = Fraction(rng.randint(-4, 4))
        modulus = a / 4 * Fraction(rng.randint(0, 4), 4)
        f = Polynomial(1, (((2,), sign * a), ((1,), sign * b), ((0,), sign * c)))
        one = Cone(1, ((Fraction(1),),))
        A = ConePlusScaledMap(Cone.trivial(1), ErrorFunction("sq_l2", modulus), Polyhedron.interval(-1, 0))
        B = ConePlusScaledMap(one, ErrorFunction("constant", 0), Polyhedron.zero(1))
        params = {"a": format_rational(a), "b": format_rational(b), "c": format_rational(c),
                  "modulus": format_rational(modulus)}
        return FamilyInstance(SingletonMap((f,)), A, B, Fraction(-2), Fraction(2), params)

    return Family(f"strong-quadratic-{mode}", mode, sample)


def zero_error_family() -> Family:
    """Strictly concave ``f`` tested as convex with ``A = B = {0}``."""

    def sample(rng: random.Random) -> FamilyInstance:
        a = Fraction(rng.randint(1, 6), rng.randint(1, 3))
        b = Fraction(rng.randint(-3, 3))
        f = Polynomial(1, (((2,), -a), ((1,), b)))
        zero_map = ConePlusScaledMap(Cone.trivial(1), ErrorFunction("constant", 0), Polyhedron.zero(1))
        params = {"a": format_rational(-a), "b": format_rational(b)}
        return FamilyInstance(SingletonMap((f,)), zero_map, zero_map, Fraction(-2), Fraction(2), params)

    return Family("zero-error-nonconvex", CONVEX, sample)


def search_counterexample(family: Family, trials: int, seed: int) -> CounterexampleWitness | None:
    """Random (instance, pair, t) draws; the first failing conclusion is returned.

    A failure with every sampled hypothesis satisfied would be a bug; a failure
    with a hypothesis violated is a necessity witness.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = random.Random(seed)
    for trial in range(trials):
        inst = family.sample(rng)
        x = tuple(_rand_q(rng, inst.lo, inst.hi) for _ in range(family.dim))
        y = tuple(_rand_q(rng, inst.lo, inst.hi) for _ in range(family.dim))
        m = rng.randint(1, 6)
        t = Dyadic(rng.randint(0, 1 << m), m)
        P = Problem(inst.F, inst.A, inst.B)
        pair = TestPair(0, x, y)
        lhs, rhs = conclusion_sets(P, pair, t, family.mode)
        result = subset(lhs, rhs)
        if result is True:
            continue
        # the Jensen instances the bisection argument consumes for this (x, y, t)
        orbit = bisection_orbit(t)
        hyp_ok = bool(subset(*jensen_sets(P, x, y, family.mode)))
        for s, nxt in zip(orbit, orbit[1:]):
            w = pair.point(nxt)
            left, right = (w, y) if s <= Fraction(1, 2) else (x, w)
            hyp_ok = hyp_ok and bool(subset(*jensen_sets(P, left, right, family.mode)))
        kind = "bug" if hyp_ok else "hypothesis necessity witness"
        return CounterexampleWitness(family.name, trial, kind, inst.params, as_vector(x), as_vector(y), t, result)
    return None
