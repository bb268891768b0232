"""Deformed polynomial oscillator: potential, isomonodromic flows, flatness and weights.

The potential is Q = Q0/lam^2 + Q1/lam + Q2 on the chart X_n, with

    Q0 = x^(2n+1) + sum a_i x^(n+i-1) + sum b_i x^(i-1)
    Q1 = sum p_i/(x - q_i) + R(x)
    Q2 = sum 3/(4(x - q_i)^2) + sum v_i/(x - q_i) + S(x)

and R, S the Lagrange interpolants fixed by the apparent-singularity
condition at each q_i.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .charts import legacy_chart, xn_chart, xn_names
from .diffgeo import CoordinateBasis, VectorField, change_chart, lie_bracket, linalg
from .report import VerificationReport
from .symkernel import FieldElement, series_expand

__all__ = [
    "PotentialData",
    "FlowSystem",
    "build_potential",
    "build_flows",
    "fuchs_residual",
    "isomonodromy_check",
    "quasi_homogeneity_check",
    "painleve_reduction",
    "frobenius_check",
    "isopotential_check",
    "independence_check",
    "legacy_flows_check",
    "T_polynomial",
    "euler_field",
]


@dataclass
class PotentialData:
    n: int
    chart: object
    names: object
    Q0: FieldElement
    Q1: FieldElement
    Q2: FieldElement
    R: FieldElement
    S: FieldElement
    Q: FieldElement
    u: list

    def at(self, e, i):
        """Evaluate a function of x at x = q_i."""
        return e.subs({"x": self.chart.sym(self.names.q[i])})

    def dx(self, e):
        return e.diff("x")


@dataclass
class FlowSystem:
    n: int
    chart: object
    names: object
    basis: object
    potential: PotentialData
    U0: list
    U1: list
    V0: list
    V1: list
    T: list
    A: list
    Tmat: list
    Bt: list
    Bh: list
    Ct: list
    Ch: list
    W: VectorField
    notes: list = field(default_factory=list)

    def frame(self):
        """Ordered frame U_{i0'}, V_{i0'}, U_{i1'}, V_{i1'} (E_{k0'} then E_{k1'}, k = 1..2n)."""
        return self.U0 + self.V0 + self.U1 + self.V1

    def flow(self, kind, i, lam=None):
        """U_i or V_i = X_{i0'} + lam X_{i1'}; ``lam`` defaults to the symbol lam."""
        lam = self.chart.sym("lam") if lam is None else lam
        x0, x1 = (self.U0[i], self.U1[i]) if kind == "U" else (self.V0[i], self.V1[i])
        return x0 + x1 * lam


def _lagrange(chart, names, i, x):
    n = names.n
    qi = chart.sym(names.q[i])
    out = chart.const(1)
    for j in range(n):
        if j != i:
            qj = chart.sym(names.q[j])
            out = out * (x - qj) / (qi - qj)
    return out


def build_potential(n, indexed=None):
    chart = xn_chart(n, indexed)
    names = xn_names(n, indexed)
    x, lam = chart.sym("x"), chart.sym("lam")
    a = chart.syms(*names.a)
    b = chart.syms(*names.b)
    q = chart.syms(*names.q)
    v = chart.syms(*names.v)
    p = chart.syms(*names.p)
    Q0 = x ** (2 * n + 1)
    for i in range(n):
        Q0 = Q0 + a[i] * x ** (n + i) + b[i] * x ** i
    R = chart.const(0)
    S = chart.const(0)
    for i in range(n):
        cr = 2 * p[i] * v[i]
        cs = v[i] ** 2
        for k in range(n):
            if k != i:
                cr = cr - p[k] / (q[i] - q[k])
                cs = cs - Fraction(3, 4) / (q[i] - q[k]) ** 2 - v[k] / (q[i] - q[k])
        L = _lagrange(chart, names, i, x)
        R = R + cr * L
        S = S + cs * L
    Q1 = R
    Q2 = S
    for i in range(n):
        Q1 = Q1 + p[i] / (x - q[i])
        Q2 = Q2 + Fraction(3, 4) / (x - q[i]) ** 2 + v[i] / (x - q[i])
    Q = Q0 / lam ** 2 + Q1 / lam + Q2
    u = [p[i] / lam + v[i] for i in range(n)]
    return PotentialData(n, chart, names, Q0, Q1, Q2, R, S, Q, u)


def apparent_singularity_check(pot):
    """Laurent expansion of Q at each q_i is 3/(4 s^2) + u_i/s + u_i^2 + O(s)."""
    rep = VerificationReport("apparent", {"n": pot.n})
    chart = pot.chart
    for i in range(pot.n):
        s = series_expand(pot.Q, "x", chart.sym(pot.names.q[i]), 1)
        u = pot.u[i]
        rep.zero(f"apparent q{i + 1}: s^-2 coefficient", s.coefficient(-2) - Fraction(3, 4))
        rep.zero(f"apparent q{i + 1}: s^-1 coefficient", s.coefficient(-1) - u)
        rep.zero(f"apparent q{i + 1}: s^0 coefficient", s.coefficient(0) - u * u)
    return rep


def T_polynomial(chart, names, j, x=None):
    """T_j(x) = (2j-1) x^(n-j) + sum_{k=1}^{n-j-1} (2j+k) a_{n-k+1} x^(n-j-1-k), j 1-based."""
    n = names.n
    x = chart.sym("x") if x is None else x
    out = (2 * j - 1) * x ** (n - j)
    for k in range(1, n - j):
        out = out + (2 * j + k) * chart.sym(names.a[n - k]) * x ** (n - j - 1 - k)
    return out


def euler_field(chart, names, basis):
    n = names.n
    comps = {}
    for i in range(1, n + 1):
        comps[names.a[i - 1]] = chart.sym(names.a[i - 1]) * Fraction(2 * n - 2 * i + 4, 2 * n + 3)
        comps[names.b[i - 1]] = chart.sym(names.b[i - 1]) * Fraction(4 * n - 2 * i + 4, 2 * n + 3)
        comps[names.q[i - 1]] = chart.sym(names.q[i - 1]) * Fraction(2, 2 * n + 3)
        comps[names.v[i - 1]] = chart.sym(names.v[i - 1]) * Fraction(-2, 2 * n + 3)
    return VectorField(basis, comps)


def build_flows(n, indexed=None):
    pot = build_potential(n, indexed)
    chart, names = pot.chart, pot.names
    basis = CoordinateBasis(chart)
    q = chart.syms(*names.q)
    v = chart.syms(*names.v)
    p = chart.syms(*names.p)
    zero = chart.const(0)
    dQ0 = pot.Q0.diff("x")
    dR = pot.R.diff("x")
    dS = pot.S.diff("x")
    T = [T_polynomial(chart, names, j) for j in range(1, n + 1)]
    Tq = [[T[j].subs({"x": q[i]}) for j in range(n)] for i in range(n)]
    dQ0q = [dQ0.subs({"x": q[i]}) for i in range(n)]
    U0, U1, V0, V1 = [], [], [], []
    A = [[-(q[j] ** i) / (2 * p[j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        U0.append(VectorField(basis, {names.v[j]: A[i][j] for j in range(n)}))
        U1.append(VectorField(basis, {names.b[i]: 1}))
    Ch = [[zero] * n for _ in range(n)]
    Bt = [[zero] * n for _ in range(n)]
    Bh = [[zero] * n for _ in range(n)]
    for i in range(n):
        comps = {names.q[i]: -2 * p[i]}
        for j in range(n):
            if j == i:
                s = zero
                for k in range(n):
                    s = s + Tq[i][k] * q[i] ** (k + n)
                c = s / (2 * p[i]) - dQ0q[i] * v[i] / p[i] + dR.subs({"x": q[i]})
                for jj in range(n):
                    if jj != i:
                        c = c - p[jj] / (q[i] - q[jj]) ** 2
                Ch[i][i] = -c
            else:
                s = zero
                for k in range(n):
                    s = s + Tq[i][k] * q[j] ** (k + n)
                c = s / (2 * p[j]) + dQ0q[j] / (2 * p[j] * (q[i] - q[j])) + p[j] / (q[i] - q[j]) ** 2
                Ch[i][j] = -c
            comps[names.v[j]] = Ch[i][j]
        V0.append(VectorField(basis, comps))
        comps = {names.a[j]: Tq[i][j] for j in range(n)}
        for j in range(n):
            if j == i:
                Bt[i][i] = -2 * v[i]
                c = -dS.subs({"x": q[i]})
                for jj in range(n):
                    if jj != i:
                        c = c + Fraction(3, 2) / (q[i] - q[jj]) ** 3 + v[jj] / (q[i] - q[jj]) ** 2
                Bh[i][i] = c
            else:
                Bt[i][j] = 1 / (q[i] - q[j])
                Bh[i][j] = -(Fraction(3, 2) / (q[i] - q[j]) ** 3 + v[j] / (q[i] - q[j]) ** 2)
            comps[names.q[j]] = Bt[i][j]
            comps[names.v[j]] = Bh[i][j]
        V1.append(VectorField(basis, comps))
    Ct = [[-2 * p[i] if i == j else zero for j in range(n)] for i in range(n)]
    W = euler_field(chart, names, basis)
    return FlowSystem(n, chart, names, basis, pot, U0, U1, V0, V1, T, A, Tq, Bt, Bh, Ct, Ch, W)


def _check_gauge(pot, gauge):
    if gauge.is_zero():
        return
    chart = pot.chart
    x = chart.sym("x")
    prod = chart.const(1)
    for i in range(pot.n):
        prod = prod * (x - chart.sym(pot.names.q[i]))
    test = gauge * prod
    _, den = test.parts()
    if den.degrees()[chart.gen_index("x")] > 0:
        raise ValueError("gauge has poles outside {q_i}")


def fuchs_residual(pot, flow, gauge):
    """-2 flow(Q) - (A''' - 4 Q A' - 2 Q' A), a rational function of x and lam."""
    chart = pot.chart
    gauge = gauge if isinstance(gauge, FieldElement) else chart.const(gauge)
    _check_gauge(pot, gauge)
    Q = pot.Q
    lhs = -2 * flow(Q)
    if gauge.is_zero():
        return lhs
    d1 = gauge.diff("x")
    d3 = d1.diff("x").diff("x")
    return lhs - (d3 - 4 * Q * d1 - 2 * Q.diff("x") * gauge)


def isomonodromy_check(fs):
    """U_i with A = 0 and V_i / lam with A = 1/(x - q_i) satisfy the flatness identity."""
    pot = fs.potential
    chart = fs.chart
    x, lam = chart.sym("x"), chart.sym("lam")
    rep = VerificationReport("isomonodromy", {"n": fs.n})
    for i in range(fs.n):
        rep.zero(f"fuchs U{i + 1} (A = 0)", fuchs_residual(pot, fs.flow("U", i), 0))
        Vi = fs.flow("V", i) * (1 / lam)
        gauge = 1 / (x - chart.sym(fs.names.q[i]))
        rep.zero(f"fuchs V{i + 1}/lam (A = 1/(x - q{i + 1}))", fuchs_residual(pot, Vi, gauge))
    rep.note("V_i is normalised by 1/lam so that dq_i/dt = -2 u_i with A = 1/(x - q_i); "
             "equivalently V_i pairs with A = lam/(x - q_i)")
    return rep


def quasi_homogeneity_check(fs, p_weight=None):
    n = fs.n
    chart = fs.chart
    W = fs.W
    rep = VerificationReport("homogeneity", {"n": n})
    pw = Fraction(2 * n + 1, 2 * n + 3) if p_weight is None else Fraction(p_weight)
    for j in range(n):
        pj = chart.sym(fs.names.p[j])
        rep.zero(f"W(p{j + 1}) = {pw} p{j + 1}", W(pj) - pw * pj)
    for i in range(1, n + 1):
        k = i - 1
        rep.zero(f"[W, U{i}0'] weight", lie_bracket(W, fs.U0[k]) - fs.U0[k] * Fraction(2 * i - 2 * n - 1, 2 * n + 3))
        rep.zero(f"[W, U{i}1'] weight", lie_bracket(W, fs.U1[k]) + fs.U1[k] * Fraction(4 * n + 4 - 2 * i, 2 * n + 3))
        rep.zero(f"[W, V{i}0'] weight", lie_bracket(W, fs.V0[k]) - fs.V0[k] * Fraction(2 * n - 1, 2 * n + 3))
        rep.zero(f"[W, V{i}1'] weight", lie_bracket(W, fs.V1[k]) + fs.V1[k] * Fraction(4, 2 * n + 3))
        for j in range(1, n + 1):
            Tji = fs.Tmat[k][j - 1]
            rep.zero(f"W(T{j}(q{i})) = {Fraction(2 * n - 2 * j, 2 * n + 3)} T{j}(q{i})",
                     W(Tji) - Tji * Fraction(2 * n - 2 * j, 2 * n + 3))
    return rep


def in_span(vectors, target):
    """Exact membership of ``target`` in the span of ``vectors`` (columns of a linear system)."""
    M = [v.components() for v in vectors]
    r0 = linalg.rank(M)
    r1 = linalg.rank(M + [target.components()])
    return r0 == r1


def frobenius_check(fs, lam_values=(Fraction(1), Fraction(-2), Fraction(3, 7))):
    """At fixed lam, pairwise brackets of the 2n flows lie in their span."""
    chart = fs.chart
    rep = VerificationReport("frobenius", {"n": fs.n})
    for lv in lam_values:
        lam = chart.const(lv)
        flows = [fs.flow("U", i, lam) for i in range(fs.n)] + [fs.flow("V", i, lam) for i in range(fs.n)]
        labels = [f"U{i + 1}" for i in range(fs.n)] + [f"V{i + 1}" for i in range(fs.n)]
        for a in range(len(flows)):
            for b in range(a + 1, len(flows)):
                br = lie_bracket(flows[a], flows[b])
                rep.record(f"lam={lv}: [{labels[a]}, {labels[b]}] in span", in_span(flows, br))
    return rep


def isopotential_check(fs):
    rep = VerificationReport("isopotential", {"n": fs.n})
    for i in range(fs.n):
        rep.zero(f"U{i + 1}(Q) = 0", fs.flow("U", i)(fs.potential.Q))
        rep.zero(f"U{i + 1}0'(u_k) + ... : U{i + 1}(u) = 0", [fs.flow("U", i)(u) for u in fs.potential.u])
    return rep


def independence_check(fs):
    """The 4n frame vectors are independent; every factor of the determinant divides prod p_i * prod (q_i - q_j)."""
    rep = VerificationReport("independence", {"n": fs.n})
    M = [v.components() for v in fs.frame()]
    D = linalg.det(M)
    rep.record("frame determinant nonzero", not D.is_zero(), f"det = {D}")
    chart = fs.chart
    allowed = []
    for i in range(fs.n):
        allowed.append(chart.sym(fs.names.p[i]))
        for j in range(i + 1, fs.n):
            allowed.append(chart.sym(fs.names.q[i]) - chart.sym(fs.names.q[j]))
    # D * (p_i^2)^k ... : clear root symbols by multiplying with powers of the allowed factors
    ok, witness = _divides_power(D, allowed)
    rep.record("vanishing locus within {p_i = 0} U {q_i = q_j}", ok, witness=witness)
    return rep


def _divides_power(D, factors):
    """True if both numerator and denominator of D have all root-free factors among ``factors`` (and Q0(q_i))."""
    num, den = D.parts()
    base = set()
    for f in factors:
        sq = f * f
        for P in list(sq.parts()[0].values()) + [sq.parts()[1]]:
            if not P.is_constant():
                for g, _ in P.factor()[1]:
                    base.add(str(g))
    bad = []
    for P in list(num.values()) + [den]:
        if P.is_constant():
            continue
        for g, _ in P.factor()[1]:
            if str(g) not in base:
                bad.append(str(g))
    return (not bad), ("unexpected factor(s): " + ", ".join(bad)) if bad else None


def painleve_reduction():
    """Along -l2 (so that da/dt = -lam), q'' = 6 q^2 + 2 a as a field identity."""
    C = legacy_chart()
    P = C.parse
    rep = VerificationReport("painleve", {"n": 1})
    basis = CoordinateBasis(C)
    l2 = VectorField(basis, {
        "q": P("-2*p - lam*r/p"),
        "a": P("lam"),
        "b": P("-lam*q"),
        "r": P("-lam*r^2*(3*q^2+a)/(2*p^3)"),
    })
    flow = -l2
    rep.zero("da/dt = -lam", flow(C.sym("a")) + C.sym("lam"))
    qdot = flow(C.sym("q"))
    rdot = flow(C.sym("r"))
    pdot = flow(C.sym("p"))
    rep.zero("dq/dt = (2p^2 + lam r)/p", qdot - P("(2*p^2 + lam*r)/p"))
    rep.zero("dr/dt = lam r^2 (3q^2 + a)/(2p^3)", rdot - P("lam*r^2*(3*q^2+a)/(2*p^3)"))
    rep.zero("dp/dt = (6p^2q^2 + 3lam q^2 r + 2a p^2 + lam a r)/(2p^2)",
             pdot - P("(6*p^2*q^2 + 3*lam*q^2*r + 2*a*p^2 + lam*a*r)/(2*p^2)"))
    # 2 p dp/dt = dQ0(q)/dt + Q0'(q) dq/dt with Q0' evaluated at q
    rep.zero("2 p dp/dt = (dQ0/dt)(q) + Q0'(q) dq/dt",
             2 * C.sym("p") * pdot - (flow(C.sym("a")) * C.sym("q") + flow(C.sym("b")) + P("3*q^2 + a") * qdot))
    qddot = flow(qdot)
    rep.zero("q'' - 6q^2 - 2a = 0", qddot - P("6*q^2 + 2*a"))
    rq = qdot.subs({"r": 0})
    rp = pdot.subs({"r": 0})
    rep.zero("r = 0 slice: dq/dt = 2p", rq - 2 * C.sym("p"))
    rep.zero("r = 0 slice: q'' = 2 dp/dt = 6q^2 + 2a", 2 * rp - P("6*q^2 + 2*a"))
    return rep


def legacy_frame(lam=None):
    """l1, l2, L2 = l2 + q l1 on the (a, b, q, r) chart."""
    C = legacy_chart()
    P = C.parse
    basis = CoordinateBasis(C)
    lam = C.sym("lam") if lam is None else lam
    l1 = VectorField(basis, {"r": -1}) + VectorField(basis, {"b": 1, "r": P("r/(2*p^2)")}) * lam
    l2 = VectorField(basis, {"q": P("-2*p")}) + VectorField(basis, {
        "a": 1, "b": P("-q"), "q": P("-r/p"), "r": P("-r^2*(3*q^2+a)/(2*p^3)")}) * lam
    L2 = VectorField(basis, {"r": P("-q"), "q": P("-2*p")}) + VectorField(basis, {
        "a": 1, "q": P("-r/p"), "r": P("-r*(3*q^2*r + a*r - q*p)/(2*p^3)")}) * lam
    return l1, l2, L2


def to_legacy(fs, X):
    """Push a vector field on X_1 to the (a, b, q, r) chart via v = r/(2p)."""
    C = legacy_chart()
    images = {"v": C.parse("r/(2*p)"), "p": C.sym("p")}
    return change_chart(X, CoordinateBasis(C), images)


def legacy_flows_check(fs=None):
    """n = 1: U1 = l1 and V1 = L2 = l2 + q l1 on the (a, b, q, r) chart; [l1, l2] = 0."""
    fs = fs or build_flows(1)
    rep = VerificationReport("legacy-flows", {"n": 1})
    l1, l2, L2 = legacy_frame()
    U = to_legacy(fs, fs.flow("U", 0))
    V = to_legacy(fs, fs.flow("V", 0))
    rep.zero("U1 = l1", U - l1)
    rep.zero("L2 = l2 + q l1", L2 - (l2 + l1 * legacy_chart().sym("q")))
    rep.zero("[l1, l2] = 0", lie_bracket(l1, l2))
    rep.zero("[L1, L2] = 0", lie_bracket(l1, L2))
    rep.zero("V1 = L2", V - L2)
    return rep
