"""Levi-Civita curvature of a metric in a coordinate basis."""
from __future__ import annotations

from fractions import Fraction

from . import linalg

__all__ = ["DegenerateMetricError", "christoffel", "riemann", "ricci", "scalar_curvature", "weyl", "curvature_invariants"]


class DegenerateMetricError(ArithmeticError):
    pass


def _inverse_metric(g):
    try:
        return linalg.inverse(g.matrix())
    except linalg.SingularMatrixError:
        raise DegenerateMetricError("metric is degenerate") from None


def christoffel(g, ginv=None):
    """G[k][i][j] = Gamma^k_{ij}."""
    basis = g.basis
    n = basis.dim
    chart = basis.chart
    ginv = ginv or _inverse_metric(g)
    G = g.matrix()
    dG = [[[basis.apply(k, G[i][j]) if G[i][j] else chart.const(0) for k in range(n)] for j in range(n)] for i in range(n)]
    low = {}
    for i in range(n):
        for j in range(i, n):
            for l in range(n):
                v = dG[j][l][i] + dG[i][l][j] - dG[i][j][l]
                low[(l, i, j)] = v * Fraction(1, 2)
    out = [[[chart.const(0)] * n for _ in range(n)] for _ in range(n)]
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                acc = chart.const(0)
                for l in range(n):
                    a, b = ginv[k][l], low[(l, i, j)]
                    if a and b:
                        acc = acc + a * b
                out[k][i][j] = acc
                out[k][j][i] = acc
    return out


def riemann(g, gamma=None):
    """R[i][j][k][l] = R^i_{jkl} = d_k Gamma^i_{lj} - d_l Gamma^i_{kj} + Gamma^i_{km} Gamma^m_{lj} - Gamma^i_{lm} Gamma^m_{kj}."""
    basis = g.basis
    n = basis.dim
    chart = basis.chart
    gamma = gamma or christoffel(g)
    zero = chart.const(0)
    R = [[[[zero] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(k + 1, n):
                    acc = zero
                    if gamma[i][l][j]:
                        acc = acc + basis.apply(k, gamma[i][l][j])
                    if gamma[i][k][j]:
                        acc = acc - basis.apply(l, gamma[i][k][j])
                    for m in range(n):
                        a, b = gamma[i][k][m], gamma[m][l][j]
                        if a and b:
                            acc = acc + a * b
                        a, b = gamma[i][l][m], gamma[m][k][j]
                        if a and b:
                            acc = acc - a * b
                    R[i][j][k][l] = acc
                    R[i][j][l][k] = -acc
    return R


def _lower(g, R):
    n = len(R)
    G = g.matrix()
    zero = g.chart.const(0)
    out = [[[[zero] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for d in range(c + 1, n):
                    acc = zero
                    for m in range(n):
                        if G[a][m] and R[m][b][c][d]:
                            acc = acc + G[a][m] * R[m][b][c][d]
                    out[a][b][c][d] = acc
                    out[a][b][d][c] = -acc
    return out


def ricci(g, R=None):
    n = g.basis.dim
    R = R or riemann(g)
    zero = g.chart.const(0)
    out = [[zero] * n for _ in range(n)]
    for j in range(n):
        for l in range(n):
            acc = zero
            for i in range(n):
                if R[i][j][i][l]:
                    acc = acc + R[i][j][i][l]
            out[j][l] = acc
    return out


def scalar_curvature(g, Ric=None, ginv=None):
    n = g.basis.dim
    Ric = Ric or ricci(g)
    ginv = ginv or _inverse_metric(g)
    acc = g.chart.const(0)
    for i in range(n):
        for j in range(n):
            if ginv[i][j] and Ric[i][j]:
                acc = acc + ginv[i][j] * Ric[i][j]
    return acc


def weyl(g, Rlow=None, Ric=None, scal=None):
    """Fully covariant Weyl tensor C_{abcd}."""
    n = g.basis.dim
    if n < 3:
        raise ValueError("Weyl tensor needs dimension at least 3")
    G = g.matrix()
    R = riemann(g)
    Rlow = Rlow or _lower(g, R)
    Ric = Ric or ricci(g, R)
    scal = scal if scal is not None else scalar_curvature(g, Ric)
    zero = g.chart.const(0)
    c1 = Fraction(1, n - 2)
    c2 = scal * Fraction(1, (n - 1) * (n - 2))
    C = [[[[zero] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for d in range(c + 1, n):
                    v = Rlow[a][b][c][d]
                    v = v - (G[a][c] * Ric[b][d] - G[a][d] * Ric[b][c] - G[b][c] * Ric[a][d] + G[b][d] * Ric[a][c]) * c1
                    v = v + (G[a][c] * G[b][d] - G[a][d] * G[b][c]) * c2
                    C[a][b][c][d] = v
                    C[a][b][d][c] = -v
    return C


def _raise_all(ginv, T):
    n = len(T)
    zero = ginv[0][0] * 0
    cur = T
    for slot in range(4):
        nxt = [[[[zero] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
        for idx0 in range(n):
            for idx1 in range(n):
                for idx2 in range(n):
                    for idx3 in range(n):
                        idx = [idx0, idx1, idx2, idx3]
                        acc = zero
                        for m in range(n):
                            src = list(idx)
                            src[slot] = m
                            v = cur[src[0]][src[1]][src[2]][src[3]]
                            if v and ginv[idx[slot]][m]:
                                acc = acc + ginv[idx[slot]][m] * v
                        nxt[idx0][idx1][idx2][idx3] = acc
        cur = nxt
    return cur


def curvature_invariants(g):
    """{"weyl_norm": C_abcd C^abcd, "scalar": R, "ricci_flat": bool} for a coordinate-basis metric."""
    ginv = _inverse_metric(g)
    gamma = christoffel(g, ginv)
    R = riemann(g, gamma)
    Rlow = _lower(g, R)
    Ric = ricci(g, R)
    scal = scalar_curvature(g, Ric, ginv)
    C = weyl(g, Rlow, Ric, scal)
    Cup = _raise_all(ginv, C)
    n = g.basis.dim
    acc = g.chart.const(0)
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for d in range(n):
                    if C[a][b][c][d] and Cup[a][b][c][d]:
                        acc = acc + C[a][b][c][d] * Cup[a][b][c][d]
    ricci_flat = all(not e for row in Ric for e in row)
    return {"weyl_norm": acc, "scalar": scal, "ricci_flat": ricci_flat, "ricci": Ric}
