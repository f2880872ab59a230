"""Pure-Python exact feasibility kernel.

Decides whether ``A z = b, z >= 0`` has a solution for integer ``A`` and
``b`` with a phase-one simplex on an integer tableau (Edmonds pivoting, every
entry stays integral and the division by the previous pivot is exact).
Bland's rule picks both the entering and the leaving variable, so the
pivot sequence is deterministic and cannot cycle.
"""

from __future__ import annotations

from collections.abc import Sequence


def feasible(A: Sequence[Sequence[int]], b: Sequence[int]) -> bool:
    m = len(b)
    if m == 0:
        return True
    n = len(A[0])
    if n == 0:
        return all(v == 0 for v in b)

    T = []
    for row, rhs in zip(A, b):
        if rhs < 0:
            T.append([-a for a in row] + [-rhs])
        else:
            T.append(list(row) + [rhs])
    # artificial i is basic in row i and carries index n + i
    basis = [n + i for i in range(m)]
    obj = [-sum(T[i][j] for i in range(m)) for j in range(n + 1)]
    d = 1

    while True:
        if obj[n] == 0:
            return True
        col = -1
        for j in range(n):
            if obj[j] < 0:
                col = j
                break
        if col < 0:
            return False

        r = -1
        for i in range(m):
            a = T[i][col]
            if a > 0:
                if r < 0:
                    r = i
                    continue
                lhs = T[i][n] * T[r][col]
                rhs = T[r][n] * a
                if lhs < rhs or (lhs == rhs and basis[i] < basis[r]):
                    r = i
        if r < 0:
            # phase-one objective is bounded below by zero
            raise ArithmeticError("unbounded phase-one direction")

        p = T[r][col]
        prow = T[r]
        for i in range(m):
            if i == r:
                continue
            row = T[i]
            f = row[col]
            if f == 0:
                if p != d:
                    T[i] = [(p * v) // d for v in row]
                continue
            T[i] = [(p * row[j] - f * prow[j]) // d for j in range(n + 1)]
        f = obj[col]
        obj = [(p * obj[j] - f * prow[j]) // d for j in range(n + 1)]
        basis[r] = col
        d = p
