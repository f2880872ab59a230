from __future__ import annotations

from fractions import Fraction

import pytest

from svtakagi.exactgeom import Cone, Polyhedron, same_set, vec
from svtakagi.svmap import ConePlusScaledMap, DomainGrid, PointSet, Polynomial, SingletonMap, TabulatedMap, sq_norm
from svtakagi.takagi import Dyadic, ErrorFunction, dyadic_lattice
from svtakagi.verify import (
    CONCAVE,
    CONVEX,
    Problem,
    RunConfig,
    TestPair,
    bisection_orbit,
    check_conclusion_concave,
    check_conclusion_convex,
    check_jensen_concave,
    check_jensen_convex,
    conclusion_sets,
    inductive_oracle_concave,
    inductive_oracle_convex,
    pair_records,
    run_checks,
    search_counterexample,
    strong_quadratic_family,
    validate_preconditions,
    zero_error_family,
)

F = Fraction
R_PLUS = Cone(1, ((1,),))


def cmap(K, kind, eps, S0):
    return ConePlusScaledMap(K, ErrorFunction(kind, eps), S0)


ZERO = cmap(Cone.trivial(1), "constant", 0, Polyhedron.zero(1))
PLUS = cmap(R_PLUS, "constant", 0, Polyhedron.zero(1))
STRONG_A = cmap(Cone.trivial(1), "sq_l2", F(1, 4), Polyhedron.interval(-1, 0))
SQ = SingletonMap((Polynomial(1, (((2,), 1),)),))
NEG_SQ = SingletonMap((Polynomial(1, (((2,), -1),)),))
PAIRS = [TestPair(0, vec(-1), vec(1)), TestPair(1, vec(F(1, 2)), vec(-2)), TestPair(2, vec(0), vec(F(3, 4)))]


class TestJensen:
    def test_convex_function_passes(self):
        assert check_jensen_convex(SQ, ZERO, PLUS, PAIRS).ok

    def test_strong_identity_is_tight(self):
        assert check_jensen_convex(SQ, STRONG_A, PLUS, PAIRS).ok
        too_strong = cmap(Cone.trivial(1), "sq_l2", F(1, 4) + F(1, 64), Polyhedron.interval(-1, 0))
        assert not check_jensen_convex(SQ, too_strong, PLUS, PAIRS).ok

    def test_concave_function_fails_convex_check(self):
        report = check_jensen_convex(NEG_SQ, ZERO, ZERO, PAIRS)
        assert len(report.failures) == len(PAIRS)
        assert all(r.witness is not None for r in report.failures)

    def test_concave_mirror(self):
        assert check_jensen_concave(NEG_SQ, ZERO, PLUS, PAIRS).ok
        assert not check_jensen_concave(SQ, ZERO, ZERO, PAIRS).ok
        const = SingletonMap((Polynomial(1, (((0,), 3),)),), Polyhedron.interval(0, 1))
        assert check_jensen_concave(const, ZERO, ZERO, PAIRS).ok


class TestConclusion:
    @pytest.mark.parametrize("t", dyadic_lattice(4))
    def test_strong_form_exact(self, t):
        for pair in PAIRS:
            assert check_conclusion_convex(SQ, STRONG_A, PLUS, pair, t).passed
            assert check_conclusion_concave(NEG_SQ, STRONG_A, PLUS, pair, t).passed

    def test_strong_form_coefficient(self):
        pair, t = PAIRS[1], Dyadic(3, 3)
        lhs, rhs = conclusion_sets(Problem(SQ, STRONG_A, PLUS), pair, t, CONVEX)
        v = t.value
        u2 = (pair.x[0] - pair.y[0]) ** 2
        combo = v * pair.x[0] ** 2 + (1 - v) * pair.y[0] ** 2
        assert same_set(lhs, Polyhedron.interval(combo - v * (1 - v) * u2, combo))
        assert same_set(rhs, Polyhedron(1, (((v * pair.x[0] + (1 - v) * pair.y[0]) ** 2,),), ((1,),)))

    def test_endpoints(self):
        for t in (Dyadic(0), Dyadic(1)):
            rec = check_conclusion_convex(NEG_SQ, ZERO, ZERO, PAIRS[0], t)
            assert rec.passed and rec.level == 0

    def test_constant_error_gives_twice_epsilon(self):
        eps = F(1, 4)
        f = SingletonMap((Polynomial(1, (((2,), -F(1, 4)),)),))
        B = cmap(R_PLUS, "constant", eps, Polyhedron.interval(-1, 0))
        P = Problem(f, ZERO, B)
        for pair in PAIRS[:1]:
            for t in dyadic_lattice(3):
                assert check_conclusion_convex(f, ZERO, B, pair, t).passed
                assert same_set(P.b_T(t, pair.u), Polyhedron(1, ((-2 * eps,),), ((1,),)))

    def test_slack_rescues_a_failure(self):
        pair = TestPair(0, vec(0), vec(1))
        assert not check_conclusion_convex(NEG_SQ, ZERO, ZERO, pair, Dyadic(1, 1)).passed
        assert check_conclusion_convex(NEG_SQ, ZERO, ZERO, pair, Dyadic(1, 1), slack=F(1, 4)).passed


class TestOracle:
    def test_orbit(self):
        assert bisection_orbit(Dyadic(3, 3)) == [F(3, 8), F(3, 4), F(1, 2), 1]
        assert bisection_orbit(Dyadic(0)) == [0]

    def test_half_reduces_to_the_hypothesis(self):
        res = inductive_oracle_convex(SQ, STRONG_A, PLUS, PAIRS[0], Dyadic(1, 1))
        jensen = [s for s in res.steps if s.kind == "jensen"]
        assert res.passed and len(jensen) == 1

    @pytest.mark.parametrize("t", [Dyadic(1, 2), Dyadic(3, 3), Dyadic(13, 5)])
    def test_final_sets_match_conclusion(self, t):
        for mode, f, oracle in ((CONVEX, SQ, inductive_oracle_convex), (CONCAVE, NEG_SQ, inductive_oracle_concave)):
            for pair in PAIRS:
                res = oracle(f, STRONG_A, PLUS, pair, t)
                assert res.passed
                assert len([s for s in res.steps if s.kind == "jensen"]) == t.m
                lhs, rhs = conclusion_sets(Problem(f, STRONG_A, PLUS), pair, t, mode)
                assert same_set(lhs, res.left) and same_set(rhs, res.right)

    def test_failing_hypothesis_is_located(self):
        res = inductive_oracle_convex(NEG_SQ, ZERO, ZERO, PAIRS[0], Dyadic(3, 3))
        assert not res.passed
        assert res.record().note.startswith("step jensen")


class TestPreconditions:
    GRID = DomainGrid.box(vec(-1), vec(1), F(1, 2))

    def test_polynomial_singleton(self):
        for mode in (CONVEX, CONCAVE):
            assert validate_preconditions(SQ, R_PLUS, self.GRID, mode).ok

    def test_non_convex_value(self):
        table = {x: PointSet(1, (vec(0), vec(1))) for x in self.GRID.points}
        report = validate_preconditions(TabulatedMap(1, table), Cone.trivial(1), self.GRID, CONCAVE)
        bad = report.failures
        assert bad and bad[0].kind == "k_convex" and bad[0].witness.point == vec(F(3, 4))  # 1/4 * 0 + 3/4 * 1

    def test_cone_plus_box(self):
        K = Cone(2, ((1, 0), (0, 1)))
        box_k = SingletonMap((sq_norm(1), sq_norm(1)), Polyhedron(2, ((0, 0), (1, 1), (1, 0), (0, 1)), K.rays))
        report = validate_preconditions(box_k, K, self.GRID, CONVEX)
        assert report.ok
        assert not validate_preconditions(box_k, Cone(2, ((1, 0),)), self.GRID, CONVEX).ok


class TestRun:
    def test_parallel_matches_serial(self):
        grid = DomainGrid.box(vec(-1), vec(1), F(1, 2))
        pairs = [TestPair(i, p.x, p.y, dyadic_lattice(2)) for i, p in enumerate(PAIRS)]
        cfg = RunConfig(mode=CONVEX, depth=2, probe=True)
        serial = run_checks("s", SQ, STRONG_A, PLUS, grid, pairs, cfg, workers=1)
        parallel = run_checks("s", SQ, STRONG_A, PLUS, grid, pairs, cfg, workers=2)
        assert serial.to_json() == parallel.to_json()
        assert serial.ok and serial.summary()["probe_fail"] > 0

    def test_records_are_ordered(self):
        recs = pair_records(SQ, STRONG_A, PLUS, TestPair(4, vec(0), vec(1)), RunConfig(depth=2))
        assert recs[0].kind == "jensen_convex" and recs[0].t is None
        ts = [r.t.value for r in recs[1:]]
        assert ts == sorted(ts)

    def test_coverage_gap_is_skipped(self):
        table = {vec(0): Polyhedron.point(vec(0)), vec(1): Polyhedron.point(vec(1)), vec(F(1, 2)): Polyhedron.point(vec(F(1, 2)))}
        recs = pair_records(TabulatedMap(1, table), ZERO, PLUS, TestPair(0, vec(0), vec(1)), RunConfig(depth=2))
        skipped = [r for r in recs if r.passed is None]
        assert skipped and all(r.t.m == 2 for r in skipped)
        assert all(r.passed for r in recs if r.t is None or r.t.m < 2)


class TestSearch:
    def test_zero_trials(self):
        with pytest.raises(ValueError):
            search_counterexample(strong_quadratic_family(), 0, 1)

    def test_non_convex_zero_error_family(self):
        w = search_counterexample(zero_error_family(), 50, 3)
        assert w is not None and w.kind == "hypothesis necessity witness"

    def test_full_hypotheses_never_fail(self):
        assert search_counterexample(strong_quadratic_family(CONVEX), 10_000, 2024) is None

    def test_full_hypotheses_never_fail_concave(self):
        assert search_counterexample(strong_quadratic_family(CONCAVE), 2_000, 7) is None

    def test_deterministic(self):
        a = search_counterexample(zero_error_family(), 20, 5)
        b = search_counterexample(zero_error_family(), 20, 5)
        assert a == b
