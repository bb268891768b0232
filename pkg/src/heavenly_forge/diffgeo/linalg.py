"""Exact linear algebra over the function field of a chart.

Gaussian elimination; the pivot in each column is the nonzero entry with the
fewest monomials, which keeps intermediate expressions small.
"""
from __future__ import annotations

from ..symkernel import FieldElement

__all__ = ["SingularMatrixError", "size", "det", "inverse", "solve", "rank", "matmul", "transpose", "identity", "pfaffian"]


class SingularMatrixError(ArithmeticError):
    pass


def size(e):
    num, den = e.parts()
    return sum(len(P) for P in num.values()) + len(den)


def identity(chart, n):
    one, zero = chart.const(1), chart.const(0)
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def transpose(M):
    return [list(r) for r in zip(*M)]


def matmul(A, B):
    chart = _chart_of(A) or _chart_of(B)
    zero = chart.const(0)
    cols = list(zip(*B))
    out = []
    for row in A:
        out_row = []
        for col in cols:
            acc = zero
            for a, b in zip(row, col):
                if a and b:
                    acc = acc + a * b
            out_row.append(acc)
        out.append(out_row)
    return out


def _chart_of(M):
    for row in M:
        for e in row:
            if isinstance(e, FieldElement):
                return e.chart
    return None


def _eliminate(M, rhs=None):
    """Row-reduce a copy of M (and rhs columns); returns (reduced, rhs, pivots, sign, pivot values)."""
    n_rows = len(M)
    n_cols = len(M[0]) if M else 0
    A = [list(r) for r in M]
    R = [list(r) for r in rhs] if rhs is not None else None
    pivots = []
    pivot_vals = []
    sign = 1
    r = 0
    for c in range(n_cols):
        cands = [(size(A[i][c]), i) for i in range(r, n_rows) if A[i][c]]
        if not cands:
            continue
        _, p = min(cands)
        if p != r:
            A[p], A[r] = A[r], A[p]
            if R is not None:
                R[p], R[r] = R[r], R[p]
            sign = -sign
        piv = A[r][c]
        inv = piv.inverse()
        pivots.append(c)
        pivot_vals.append(piv)
        for i in range(n_rows):
            if i == r or not A[i][c]:
                continue
            f = A[i][c] * inv
            A[i] = [a - f * b if b else a for a, b in zip(A[i], A[r])]
            if R is not None:
                R[i] = [a - f * b if b else a for a, b in zip(R[i], R[r])]
        r += 1
        if r == n_rows:
            break
    return A, R, pivots, sign, pivot_vals


def rank(M):
    return len(_eliminate(M)[2])


def det(M):
    n = len(M)
    chart = _chart_of(M)
    A, _, pivots, sign, vals = _eliminate(M)
    if len(pivots) < n:
        return chart.const(0)
    out = chart.const(sign)
    for v in vals:
        out = out * v
    return out


def solve(M, rhs):
    """Solve M X = rhs (rhs a list of rows); raises SingularMatrixError if M is singular."""
    n = len(M)
    A, R, pivots, _, vals = _eliminate(M, rhs)
    if len(pivots) < n or len(M[0]) != n:
        raise SingularMatrixError("matrix is singular over the function field")
    out = [None] * n
    for r, c in enumerate(pivots):
        inv = vals[r].inverse()
        out[c] = [x * inv for x in R[r]]
    return out


def inverse(M):
    chart = _chart_of(M)
    return solve(M, identity(chart, len(M)))


def nullspace(M):
    """Basis of the right kernel of M, as a list of vectors."""
    if not M:
        return []
    chart = _chart_of(M)
    n_cols = len(M[0])
    A, _, pivots, _, vals = _eliminate(M)
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for f in free:
        vec = [chart.const(0)] * n_cols
        vec[f] = chart.const(1)
        for r, c in enumerate(pivots):
            vec[c] = -(A[r][f] / vals[r])
        basis.append(vec)
    return basis


def pfaffian(M):
    """Pfaffian of an antisymmetric matrix by expansion along the first row."""
    n = len(M)
    if n % 2:
        return M[0][0] * 0 if n else None
    if n == 0:
        raise ValueError("empty matrix")
    if n == 2:
        return M[0][1]
    acc = M[0][0] * 0
    for j in range(1, n):
        if not M[0][j]:
            continue
        keep = [k for k in range(1, n) if k != j]
        minor = [[M[r][c] for c in keep] for r in keep]
        term = M[0][j] * pfaffian(minor)
        acc = acc + term if j % 2 else acc - term
    return acc
