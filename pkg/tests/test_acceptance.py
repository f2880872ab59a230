"""Acceptance criteria, one test each.

Every test carries a ``criterion`` marker; ``conftest.py`` prints one
PASS/FAIL line per criterion at the end of the run.
"""

from __future__ import annotations

import filecmp
import random
import time
from fractions import Fraction
from pathlib import Path

import pytest

from oracles import raster, support_oracle_2d
from svtakagi.cli import cmd_suite
from svtakagi.exactgeom import Cone, Polyhedron, contains_point, minkowski_sum, same_set, scale, vec
from svtakagi.scenario import builtin, builtin_scenarios, load_scenario, run_scenario
from svtakagi.svmap import ConePlusScaledMap, DomainGrid, takagi_transform, takagi_transform_truncated
from svtakagi.takagi import (
    Dyadic,
    ErrorFunction,
    dyadic_lattice,
    functional_equation_residual,
    takagi_alpha,
    takagi_alpha_dyadic,
    takagi_classic,
)
from svtakagi.verify import (
    CONVEX,
    Problem,
    check_conclusion_convex,
    conclusion_sets,
    inductive_oracle_concave,
    inductive_oracle_convex,
    oracle_equivalent,
)

F = Fraction
DATA = Path(__file__).parent / "data"
criterion = pytest.mark.criterion


def _random_dyadic(rng, max_m):
    m = rng.randint(0, max_m)
    return Dyadic(rng.randint(0, 1 << m), m)


@criterion(1, "T_2(t) = 4t(1-t) exactly on all k/4096, under 1 s")
def test_c01_quadratic_closed_form():
    start = time.perf_counter()
    lattice = dyadic_lattice(12)
    bad = [t for t in lattice if takagi_alpha_dyadic(t, 2) != 4 * t.value * (1 - t.value)]
    elapsed = time.perf_counter() - start
    assert len(lattice) == 4097 and not bad
    assert elapsed < 1.0, f"{elapsed:.3f} s"


@criterion(2, "T_1 = 2T within combined widths <= 2^-38 at 512 random rationals, under 1 s")
def test_c02_first_order_is_twice_classic():
    rng = random.Random(2)
    points = []
    for _ in range(512):
        q = rng.randint(1, 10**6)
        points.append(F(rng.randint(0, q), q))
    tail = F(1, 2**40)
    start = time.perf_counter()
    for t in points:
        a, c = takagi_alpha(t, 1, tail), 2 * takagi_classic(t, tail)
        assert a.width + c.width <= F(1, 2**38)
        assert a.intersects(c), t
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"{elapsed:.3f} s"


@criterion(3, "functional equation residual is 0 for alpha in {1,2}, m <= 12")
def test_c03_functional_equation():
    for alpha in (1, 2):
        assert all(functional_equation_residual(alpha, t) == 0 for t in dyadic_lattice(12))


def _structured_maps(rng, count):
    cones = [Cone(2, ()), Cone(2, ((1, 0),)), Cone(2, ((1, 0), (0, 1))), Cone(2, ((1, 1), (-1, 1)))]
    kinds = ["sq_l2", "l1", "linf"]
    out = []
    for _ in range(count):
        extra = [vec(F(rng.randint(-3, 3), 2), F(rng.randint(-3, 3), 2)) for _ in range(rng.randint(1, 3))]
        S0 = Polyhedron(2, (vec(0, 0), *extra))
        out.append(ConePlusScaledMap(rng.choice(cones), ErrorFunction(rng.choice(kinds), F(rng.randint(1, 8), 4)), S0))
    return out


@criterion(4, "S^T(1/2, x) = S(x) for 20 structured error maps at every grid point")
def test_c04_lemma_tt_equality():
    rng = random.Random(4)
    grid = DomainGrid.box(vec(-1, -1), vec(1, 1), F(1, 2))
    half = Dyadic(1, 1)
    for S in _structured_maps(rng, 20):
        for x in grid.points:
            assert same_set(takagi_transform(S, half, x), S.evaluate(x))
            assert same_set(takagi_transform_truncated(S, half, x, 12), S.evaluate(x))


@criterion(5, "constant phi: truncated transform at N=12 (closed tail) equals K + 2 eps S0")
def test_c05_constant_error():
    rng = random.Random(5)
    K = Cone(1, ((1,),))
    S0 = Polyhedron.interval(-1, 0)
    for eps in (F(1, 3), F(1), F(7, 2)):
        S = ConePlusScaledMap(K, ErrorFunction("constant", eps), S0)
        target = minkowski_sum(K.as_polyhedron(), scale(S0, 2 * eps))
        for _ in range(10):
            t = _random_dyadic(rng, 12)
            x = vec(F(rng.randint(-20, 20), rng.randint(1, 5)))
            assert same_set(takagi_transform_truncated(S, t, x, 12, close_tail=True), target)
            # the open partial sum falls short by exactly the tail 2^-12 eps S0
            short = minkowski_sum(K.as_polyhedron(), scale(S0, (2 - F(1, 2**12)) * eps))
            assert same_set(takagi_transform_truncated(S, t, x, 12), short)


def _assert_sound(name):
    sc = builtin(name)
    start = time.perf_counter()
    report = run_scenario(sc)
    elapsed = time.perf_counter() - start
    kind = sc.mode
    jensen = [r for r in report.records if r.kind == f"jensen_{kind}"]
    concl = [r for r in report.records if r.kind == f"conclusion_{kind}"]
    assert report.ok, report.failures[:3]
    assert len(jensen) >= 50 and all(r.passed for r in jensen)
    assert len(concl) == len(jensen) * 65 and all(r.passed and r.slack == 0 for r in concl)
    assert {r.t.m for r in concl} == set(range(7))
    return elapsed


@criterion(6, "strong-quadratic convex scenario sound at slack 0, m <= 6, >= 50 pairs, under 60 s")
def test_c06_strong_quadratic_convex():
    elapsed = _assert_sound("strong-quadratic")
    assert elapsed < 60, f"{elapsed:.1f} s"


@criterion(7, "strong-quadratic concave mirror sound at slack 0")
def test_c07_strong_quadratic_concave():
    _assert_sound("strong-quadratic-concave")


def _scenario_cases(name):
    sc = builtin(name)
    grid, F_, A, B, pairs = sc.build()
    return sc, F_, A, B, pairs


@criterion(8, "Ng-Nikodem: conclusion error is exactly K + 2 eps S0 on all tested (pair, t)")
def test_c08_ng_nikodem():
    sc, F_, A, B, pairs = _scenario_cases("ng-nikodem")
    phi = B.map.phi
    assert phi.kind == "constant"
    target = minkowski_sum(B.map.K.as_polyhedron(), scale(B.map.S0, 2 * phi.epsilon))
    P = Problem(F_, A, B)
    for pair in pairs:
        for t in pair.t_list:
            assert same_set(P.b_T(t, pair.u), target)
            assert check_conclusion_convex(F_, A, B, pair, t).passed


@criterion(9, "Hazy-Pales: conclusion error is eps T_1(t) |x-y|_1 S0 at dyadic t")
def test_c09_hazy_pales():
    sc, F_, A, B, pairs = _scenario_cases("hazy-pales")
    phi = B.map.phi
    assert phi.kind == "l1"
    P = Problem(F_, A, B)
    for pair in pairs:
        norm = sum(abs(c) for c in pair.u)
        for t in pair.t_list:
            coef = phi.epsilon * takagi_alpha_dyadic(t, 1) * norm
            target = minkowski_sum(B.map.K.as_polyhedron(), scale(B.map.S0, coef))
            assert same_set(P.b_T(t, pair.u), target)
            assert check_conclusion_convex(F_, A, B, pair, t).passed


@criterion(10, "inductive oracle and conclusion sets agree on 200 random (scenario, pair, t)")
def test_c10_oracle_equivalence():
    rng = random.Random(10)
    built = [(sc, *sc.build()) for sc in builtin_scenarios()]
    problems = {sc.id: Problem(F_, A, B) for sc, _, F_, A, B, _ in built}
    discrepancies = []
    for _ in range(200):
        sc, grid, F_, A, B, pairs = rng.choice(built)
        pair = rng.choice(pairs)
        t = rng.choice(pair.t_list)
        oracle = inductive_oracle_convex if sc.mode == CONVEX else inductive_oracle_concave
        res = oracle(F_, A, B, pair, t)
        if not (res.passed and oracle_equivalent(problems[sc.id], res)):
            discrepancies.append((sc.id, pair.index, str(t)))
    assert discrepancies == []


@criterion(11, "contains_point matches rasterization on 50 random 2-d polyhedra x 441 points")
def test_c11_geometry_oracle():
    rng = random.Random(11)
    grid = raster()
    assert len(grid) == 441
    mismatches = 0
    for _ in range(50):
        n_verts = rng.randint(1, 4)
        n_rays = rng.randint(0, 5 - n_verts)
        q = lambda: F(rng.randint(-12, 12), rng.randint(1, 3))  # noqa: E731
        verts = [(q(), q()) for _ in range(n_verts)]
        rays = []
        while len(rays) < n_rays:
            r = (q(), q())
            if r != (0, 0):
                rays.append(r)
        P = Polyhedron(2, tuple(verts), tuple(rays))
        oracle = support_oracle_2d(P)
        mismatches += sum(contains_point(P, p) != oracle(p) for p in grid)
    assert mismatches == 0


@criterion(12, "negative controls: -x^2 fails convex mode; modulus 1/2 fails at t = 1/2")
def test_c12_negative_controls():
    report = run_scenario(load_scenario(DATA / "negative_control.json"))
    assert not report.ok
    assert all(r.witness is not None for r in report.failures)

    sc, F_, A, B, pairs = _scenario_cases("strong-quadratic")
    strong = ConePlusScaledMap(A.map.K, ErrorFunction("sq_l2", F(1, 2)), A.map.S0)
    half = Dyadic(1, 1)
    failing = [p for p in pairs if not check_conclusion_convex(F_, strong, B, p, half).passed]
    assert failing
    assert all(check_conclusion_convex(F_, A, B, p, half).passed for p in pairs)
    lhs, rhs = conclusion_sets(Problem(F_, strong, B), failing[0], half, CONVEX)
    assert not contains_point(rhs, min(lhs.vertices))


@criterion(13, "two suite runs give byte-identical outputs")
def test_c13_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert cmd_suite(a) == 0
    assert cmd_suite(b) == 0
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir()) and "index.json" in names
    match, mismatch, errors = filecmp.cmpfiles(a, b, names, shallow=False)
    assert not mismatch and not errors and len(match) == len(names)
