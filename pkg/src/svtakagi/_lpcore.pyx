# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled exact feasibility kernel.

Same algorithm as ``_lpcore_py``: the tableau lives in a flat ``int64``
buffer and every product and difference is overflow-checked. When an entry
would leave the 64-bit range the problem is re-solved with Python integers.
"""

from libc.stdlib cimport malloc, free

from svtakagi._lpcore_py import feasible as _feasible_bigint

cdef extern from *:
    """
    static int svt_mul(long long a, long long b, long long *r) {
        return __builtin_mul_overflow(a, b, r);
    }
    static int svt_sub(long long a, long long b, long long *r) {
        return __builtin_sub_overflow(a, b, r);
    }
    """
    int svt_mul(long long a, long long b, long long *r) nogil
    int svt_sub(long long a, long long b, long long *r) nogil

_LIMIT = 1 << 62


cdef int _pivot_row(long long *dst, long long *src, long long f, long long p,
                    long long d, int w) noexcept nogil:
    cdef int j
    cdef long long x, y, z
    for j in range(w):
        if svt_mul(p, dst[j], &x):
            return -1
        if svt_mul(f, src[j], &y):
            return -1
        if svt_sub(x, y, &z):
            return -1
        dst[j] = z // d
    return 0


cdef int _solve(long long *T, long long *obj, int *basis, int m, int n) noexcept nogil:
    cdef int w = n + 1
    cdef long long d = 1, p, a, lhs, rhs, t1, t2
    cdef int i, j, col, r
    while True:
        if obj[n] == 0:
            return 1
        col = -1
        for j in range(n):
            if obj[j] < 0:
                col = j
                break
        if col < 0:
            return 0
        r = -1
        for i in range(m):
            a = T[i * w + col]
            if a > 0:
                if r < 0:
                    r = i
                    continue
                if svt_mul(T[i * w + n], T[r * w + col], &lhs):
                    return -1
                if svt_mul(T[r * w + n], a, &rhs):
                    return -1
                if lhs < rhs or (lhs == rhs and basis[i] < basis[r]):
                    r = i
        if r < 0:
            return -2
        p = T[r * w + col]
        for i in range(m):
            if i == r:
                continue
            if _pivot_row(&T[i * w], &T[r * w], T[i * w + col], p, d, w):
                return -1
        if _pivot_row(obj, &T[r * w], obj[col], p, d, w):
            return -1
        basis[r] = col
        d = p


cdef int _run(object A, object b, int m, int n) except -3:
    cdef int w = n + 1
    cdef long long *T = <long long *> malloc(m * w * sizeof(long long))
    cdef long long *obj = <long long *> malloc(w * sizeof(long long))
    cdef int *basis = <int *> malloc(m * sizeof(int))
    cdef int i, j, status = 0
    cdef long long s, v
    if T == NULL or obj == NULL or basis == NULL:
        free(T); free(obj); free(basis)
        raise MemoryError()
    try:
        for i in range(m):
            row = A[i]
            s = 1 if b[i] >= 0 else -1
            for j in range(n):
                T[i * w + j] = s * <long long> row[j]
            T[i * w + n] = s * <long long> b[i]
            basis[i] = n + i
        for j in range(w):
            s = 0
            for i in range(m):
                v = T[i * w + j]
                if svt_sub(s, v, &s):
                    status = -1
                    break
            obj[j] = s
            if status:
                break
        if status == 0:
            with nogil:
                status = _solve(T, obj, basis, m, n)
    finally:
        free(T); free(obj); free(basis)
    return status


def feasible(A, b):
    """Return True iff ``A z = b`` has a solution with ``z >= 0``."""
    m = len(b)
    if m == 0:
        return True
    n = len(A[0])
    if n == 0:
        return all(x == 0 for x in b)
    for row in A:
        for item in row:
            if not -_LIMIT < item < _LIMIT:
                return _feasible_bigint(A, b)
    for item in b:
        if not -_LIMIT < item < _LIMIT:
            return _feasible_bigint(A, b)
    status = _run(A, b, m, n)
    if status == -1:
        return _feasible_bigint(A, b)
    if status == -2:
        raise ArithmeticError("unbounded phase-one direction")
    return status == 1
