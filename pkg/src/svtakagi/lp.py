"""Exact linear feasibility over the rationals.

The integer kernel is compiled from ``_lpcore.pyx`` when the extension is
available; otherwise the pure-Python twin in ``_lpcore_py`` is used. Setting
``SVTAKAGI_PURE=1`` forces the fallback.
"""

from __future__ import annotations

import math
import os
from collections.abc import Sequence
from fractions import Fraction

from svtakagi import _lpcore_py

if os.environ.get("SVTAKAGI_PURE", "") not in ("", "0"):
    _feasible_int = _lpcore_py.feasible
    BACKEND = "python"
else:
    try:
        from svtakagi._lpcore import feasible as _feasible_int

        BACKEND = "cython"
    except ImportError:  # extension not built
        _feasible_int = _lpcore_py.feasible
        BACKEND = "python"


def _integral_row(row: Sequence[Fraction], rhs: Fraction) -> tuple[list[int], int]:
    den = math.lcm(rhs.denominator, *(v.denominator for v in row))
    return [v.numerator * (den // v.denominator) for v in row], rhs.numerator * (den // rhs.denominator)


def nonneg_solvable(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> bool:
    """True iff ``rows @ z == rhs`` has a solution ``z >= 0`` (exact)."""
    A = []
    b = []
    for row, r in zip(rows, rhs):
        ir, ib = _integral_row(row, r)
        A.append(ir)
        b.append(ib)
    return _feasible_int(A, b)


def feasible_int(A: Sequence[Sequence[int]], b: Sequence[int]) -> bool:
    return _feasible_int(A, b)
