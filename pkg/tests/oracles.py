"""Independent reference implementations used to cross-check the library."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from svtakagi.exactgeom import Polyhedron


def _perp(v):
    return (-v[1], v[0])


def support_oracle_2d(P: Polyhedron):
    """Membership predicate for a 2-d polyhedron built from support functions.

    Every facet normal of ``conv(V) + cone(R)`` in the plane is perpendicular
    to an edge ``v_i - v_j`` or to a ray; for flat or point sets the edge
    directions and the axes finish the description. A point belongs to ``P``
    iff it satisfies ``n . p <= h(n)`` for each candidate normal ``n`` whose
    support value ``h(n)`` is finite. No linear programming is involved.
    """
    verts, rays = P.vertices, P.rays
    dirs = [tuple(a - b for a, b in zip(p, q)) for p, q in combinations(verts, 2)] + list(rays)
    cands = {(Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))}
    for d in dirs:
        cands.add(_perp(d))
        cands.add(d)
    normals = []
    for n in cands:
        for s in (n, tuple(-c for c in n)):
            if s == (0, 0) or any(s[0] * r[0] + s[1] * r[1] > 0 for r in rays):
                continue
            normals.append((s, max(s[0] * v[0] + s[1] * v[1] for v in verts)))

    def member(p) -> bool:
        return all(n[0] * p[0] + n[1] * p[1] <= h for n, h in normals)

    return member


def raster(lo=-5, hi=5, n=21):
    step = Fraction(hi - lo, n - 1)
    return [(lo + i * step, lo + j * step) for i in range(n) for j in range(n)]


def takagi_direct(t: Fraction, alpha: int, terms: int) -> Fraction:
    """Naive partial sum ``sum_{n<terms} 2^(alpha-n) d(2^n t)^alpha`` straight from the definition."""
    total = Fraction(0)
    for n in range(terms):
        s = t * 2**n
        frac = s - (s.numerator // s.denominator)
        d = min(frac, 1 - frac)
        total += Fraction(2) ** (alpha - n) * d**alpha
    return total
