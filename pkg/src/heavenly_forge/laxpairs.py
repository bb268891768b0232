"""The sl2 Lax pair for Painleve I and the cohomogeneity-one metric on SL(2) x C.

sl2 is used only through its structure constants.  With h = diag(1/2, -1/2),
e = [[0, 1], [0, 0]], f = [[0, 0], [1, 0]] mapped to l1, l2, l3,

    [l1, l2] = l2,  [l1, l3] = -l3,  [l2, l3] = 2 l1,

which is what the dual coframe equations d sigma^1 = 2 sigma^3 ^ sigma^2,
d sigma^2 = sigma^2 ^ sigma^1, d sigma^3 = sigma^1 ^ sigma^3 encode with
d theta(X, Y) = X theta(Y) - Y theta(X) - theta([X, Y]).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .diffgeo import Form, StructureCoframe, VectorField, dual_coframe, lie_bracket, sym_product
from .oscillator import in_span
from .report import VerificationReport
from .symkernel import ChartSpec

__all__ = [
    "MatrixLaxPair",
    "painleve_lax_pair",
    "matrix_commutator",
    "appendix_commutator_check",
    "sigma_coframe",
    "matrix_to_frame",
    "lax_frame",
    "printed_frame",
    "lax_distribution_check",
    "build_metricpi",
    "printed_metricpi",
    "metricpi_check",
    "appendix_suite",
]

PI_RHS = "6*y^2 + t"


@lru_cache(maxsize=None)
def _matrix_chart():
    # yd, zd stand for dy/dt, dz/dt before the Painleve substitution
    return ChartSpec("lax_matrix", ["lam", "t"], transcendentals=("y", "z", "yd", "zd"))


def _mat(chart, rows):
    return [[chart.parse(c) if isinstance(c, str) else chart.const(c) for c in row] for row in rows]


def _mat_add(*ms):
    out = [row[:] for row in ms[0]]
    for m in ms[1:]:
        for i in range(2):
            for j in range(2):
                out[i][j] = out[i][j] + m[i][j]
    return out


def _mat_scale(m, c):
    return [[x * c for x in row] for row in m]


@dataclass
class MatrixLaxPair:
    """M1 = d/dlam - P(lam, t), M2 = d/dt - Q(lam, t) with 2x2 matrices P, Q."""

    chart: ChartSpec
    P: list
    Q: list

    def t_derivative(self, e):
        """Total t-derivative with y' = yd, z' = zd left unsubstituted."""
        c = self.chart
        return e.diff("t") + e.diff("y") * c.sym("yd") + e.diff("z") * c.sym("zd")

    def lam_degree(self, m):
        return max((_lam_degree(x) for row in m for x in row), default=0)


def _lam_degree(e):
    if not e:
        return -1
    num, den = e.parts()
    j = e.chart.gen_index("lam")
    return max(int(P.degrees()[j]) for P in num.values()) - int(den.degrees()[j])


def _lam_coefficients(e):
    """{k: coefficient of lam^k} for an element polynomial in lam."""
    c = e.chart
    out = {}
    k = 0
    cur = e
    fact = 1
    while cur:
        val = cur.subs({"lam": c.const(0)})
        if val:
            out[k] = val / fact
        cur = cur.diff("lam")
        k += 1
        fact *= k
    return out


def painleve_lax_pair(chart=None):
    """The sl2 pair with an order-four irregular singularity at lam = infinity."""
    c = chart or _matrix_chart()
    lam = c.sym("lam")
    P0 = _mat(c, [["-z", "y^2 + t/2"], ["-4*y", "z"]])
    P1 = _mat(c, [[0, "y"], [4, 0]])
    P2 = _mat(c, [[0, 1], [0, 0]])
    Q0 = _mat(c, [[0, "y"], [2, 0]])
    Q1 = _mat(c, [[0, Fraction(1, 2)], [0, 0]])
    P = _mat_add(P0, _mat_scale(P1, lam), _mat_scale(P2, lam * lam))
    Q = _mat_add(Q0, _mat_scale(Q1, lam))
    return MatrixLaxPair(c, P, Q)


def matrix_commutator(pair):
    """[M1, M2] = P_t - Q_lam + [P, Q] as a 2x2 matrix (multiplication part only)."""
    P, Q = pair.P, pair.Q
    out = [[None] * 2 for _ in range(2)]
    for i in range(2):
        for j in range(2):
            acc = pair.t_derivative(P[i][j]) - Q[i][j].diff("lam")
            for k in range(2):
                acc = acc + P[i][k] * Q[k][j] - Q[i][k] * P[k][j]
            out[i][j] = acc
    return out


def _substitute(m, images):
    return [[x.subs(images) for x in row] for row in m]


def _unit_multiple(e, target):
    """True if e = c * target for a nonzero rational c."""
    if not e or not target:
        return False
    q = e / target
    return q.as_constant() is not None


def appendix_commutator_check(drop_t=False):
    """[M1, M2] vanishes under y' = z, z' = 6y^2 + t and forces exactly those two equations."""
    pair = painleve_lax_pair()
    c = pair.chart
    rep = VerificationReport("appendix-commutator", {"drop_t": drop_t})
    com = matrix_commutator(pair)
    rep.record("lambda-degree of [M1, M2] <= 2", pair.lam_degree(com) <= 2, f"degree {pair.lam_degree(com)}")
    rhs = c.parse("6*y^2") if drop_t else c.parse(PI_RHS)
    rules = {"yd": c.sym("z"), "zd": rhs}
    rep.zero("[M1, M2] = 0 after y' = z, z' = " + ("6y^2" if drop_t else "6y^2 + t"), _substitute(com, rules))
    coeffs = [v for row in com for x in row for v in _lam_coefficients(x).values()]
    # the coefficients generate the ideal (y' - z, z' - 6y^2 - t): both generators occur
    # up to a constant and every coefficient vanishes modulo them
    gens = {"y' - z": c.parse("yd - z"), "z' - 6y^2 - t": c.parse("zd - 6*y^2 - t")}
    for k, g in gens.items():
        rep.record(f"{k} occurs among the lambda-coefficients (up to a constant)", any(_unit_multiple(v, g) for v in coeffs))
    full = {"yd": c.sym("z"), "zd": c.parse(PI_RHS)}
    rep.zero("every lambda-coefficient lies in the ideal of the two equations", [v.subs(full) for v in coeffs])
    # L1 = 2 lam M2 - M1 has no lam^2 term: 2 lam (-Q) + P at lam^2
    lam = c.sym("lam")
    L1 = _mat_add(_mat_scale(pair.Q, lam * -2), pair.P)
    rep.zero("L1 = 2 lam M2 - M1 has no lam^2 term", [_lam_coefficients(x).get(2, c.const(0)) for row in L1 for x in row])
    return rep


# -- SL(2) x C with its left-invariant coframe ----------------------------------------------


@lru_cache(maxsize=None)
def _frame_chart():
    return ChartSpec("sl2_t", ["t", "y", "z"], transcendentals=("lam",))


@lru_cache(maxsize=None)
def sigma_coframe(rhs=PI_RHS, with_lam=False):
    """StructureCoframe (sigma1, sigma2, sigma3, dt[, dlam]) with functions of (t, y, z[, lam]).

    l_a annihilate functions of t; the dt-dual vector acts as the total
    derivative d/dt + z d/dy + (rhs) d/dz.
    """
    c = _frame_chart()
    r = c.parse(rhs)
    zz = c.sym("z")
    zero = lambda f: c.const(0)
    D = lambda f: f.diff("t") + f.diff("y") * zz + f.diff("z") * r
    labels = ["s1", "s2", "s3", "dt"]
    ders = [zero, zero, zero, D]
    struct = [{(1, 2): -2}, {(0, 1): -1}, {(0, 2): 1}, {}]
    if with_lam:
        labels.append("dlam")
        ders.append(lambda f: f.diff("lam"))
        struct.append({})
    return StructureCoframe(c, labels, ders, struct)


def matrix_to_frame(basis, m):
    """[[a, b], [g, -a]] -> 2a l1 + b l2 + g l3."""
    return VectorField(basis, {"s1": m[0][0] * 2, "s2": m[0][1], "s3": m[1][0]})


def _frame_matrices(c):
    P0 = _mat(c, [["-z", "y^2 + t/2"], ["-4*y", "z"]])
    P1 = _mat(c, [[0, "y"], [4, 0]])
    Q0 = _mat(c, [[0, "y"], [2, 0]])
    e = _mat(c, [[0, 1], [0, 0]])
    return P0, P1, Q0, e


def lax_frame(basis):
    """E_{ij'} and f_i read off L1 = 2 lam M2 - M1, L2 = 2 M2 (order E10', E11', E20', E21')."""
    c = basis.chart
    P0, P1, Q0, e = _frame_matrices(c)
    dt = VectorField(basis, {"dt": 2})
    E10 = matrix_to_frame(basis, P0)
    E11 = dt - matrix_to_frame(basis, _mat_scale(Q0, 2)) + matrix_to_frame(basis, P1)
    E20 = dt - matrix_to_frame(basis, _mat_scale(Q0, 2))
    E21 = matrix_to_frame(basis, _mat_scale(e, -1))
    return [E10, E11, E20, E21], (c.const(-1), c.const(0))


def printed_frame(basis):
    c = basis.chart
    P = c.parse
    E10 = VectorField(basis, {"s1": P("-2*z"), "s2": P("y^2 + t/2"), "s3": P("-4*y")})
    E21 = VectorField(basis, {"s2": 1})
    E11 = VectorField(basis, {"dt": -2, "s2": P("y")})
    E20 = VectorField(basis, {"dt": 2, "s2": P("-2*y"), "s3": -4})
    return [E10, E11, E20, E21], (c.const(-1), c.const(0))


def _lax_vectors(basis, frame, fs):
    c = basis.chart
    lam = c.sym("lam")
    L = []
    for i in range(2):
        v = frame[2 * i] + frame[2 * i + 1] * lam
        if fs[i]:
            v = v + VectorField(basis, {"dlam": fs[i]})
        L.append(v)
    return L


def _lift(frame, basis):
    return [VectorField(basis, {basis.labels[i]: v.component(i) for i in range(4)}) for v in frame]


def lax_distribution_check(rhs=PI_RHS):
    """[L1, L2] = 0 for the frame read off the matrix pair; [E10', E20'] etc. by lambda-order."""
    rep = VerificationReport("lax-distribution", {"z'": rhs})
    b4 = sigma_coframe(rhs)
    b5 = sigma_coframe(rhs, with_lam=True)
    frame, fs = lax_frame(b4)
    L1, L2 = _lax_vectors(b5, _lift(frame, b5), fs)
    rep.zero("[L1, L2] = 0 for L1 = 2 lam M2 - M1, L2 = 2 M2", lie_bracket(L1, L2))
    # structure constants read back from the coframe
    l = [VectorField(b4, {a: 1}) for a in ("s1", "s2", "s3")]
    rep.zero("[l1, l2] = l2", lie_bracket(l[0], l[1]) - l[1])
    rep.zero("[l1, l3] = -l3", lie_bracket(l[0], l[2]) + l[2])
    rep.zero("[l2, l3] = 2 l1", lie_bracket(l[1], l[2]) - l[0] * 2)
    pf, pfs = printed_frame(b4)
    rep.zero("E10' as printed", frame[0] - pf[0])
    rep.zero("E20' as printed", frame[2] - pf[2])
    rep.zero("E11', E21' are minus the printed ones", [frame[1] + pf[1], frame[3] + pf[3]])
    P1, P2 = _lax_vectors(b5, _lift(pf, b5), pfs)
    br = lie_bracket(P1, P2)
    rep.record("printed form: E_{i1'} with f1 = -1, f2 = 0 span a Frobenius distribution",
               in_span([P1, P2], br), witness=None if in_span([P1, P2], br) else "; ".join(br.basis.labels[i] + ": " + str(v) for i, v in br.comps.items()))
    return rep


# -- the metric -----------------------------------------------------------------------------------


def _volume(basis):
    return Form(basis, 4, {("s1", "s2", "s3", "dt"): 1})


def _lax_metric(frame):
    """E^10'.E^21' - E^11'.E^20' (e_12 = 1) and nu^2 = vol(E10', E11', E20', E21')."""
    basis = frame[0].basis
    cof = dual_coframe(frame)
    nu2 = _volume(basis)(*frame)
    return sym_product(cof[0], cof[3]) - sym_product(cof[1], cof[2]), nu2


def printed_metricpi(basis, s13="-6"):
    """(12 y^2 + 2t)/z s1.s1 + 8 s1.s2 + (s13) s1.s3 + z s3.s3 + 2z s3.dt."""
    c = basis.chart
    d = {a: Form.basis_one_form(basis, a) for a in basis.labels}
    P = c.parse
    inner1 = d["s1"] * P("(12*y^2 + 2*t)/z") + d["s2"] * 8 + d["s3"] * P(s13)
    inner3 = d["s3"] * P("z") + d["dt"] * P("2*z")
    return sym_product(d["s1"], inner1) + sym_product(d["s3"], inner3)


def build_metricpi(frame_kind="derived"):
    """16 z (E^10'.E^21' - E^11'.E^20') in the sigma coframe, with nu^2 for the record."""
    basis = sigma_coframe()
    frame = (lax_frame if frame_kind == "derived" else printed_frame)(basis)[0]
    g, nu2 = _lax_metric(frame)
    return g * (basis.chart.sym("z") * 16), nu2


_COEFFS = [("s1", "s1", "(12*y^2 + 2*t)/z"), ("s1", "s2", "8"), ("s1", "s3", "-6"), ("s3", "s3", "z"), ("s3", "dt", "2*z")]


def _coefficient(g, a, b):
    # coefficient in front of sigma^a (.) sigma^b for the half-sum product
    return g.component(a, b) * (1 if a == b else 2)


def metricpi_check():
    basis = sigma_coframe()
    c = basis.chart
    rep = VerificationReport("metricpi", {})
    g, nu2 = build_metricpi("derived")
    rep.params["nu^2"] = str(nu2)
    rep.params["16 z g"] = "; ".join(g.listing())
    for a, b, txt in _COEFFS:
        got = _coefficient(g, a, b)
        if (a, b) == ("s1", "s3"):
            rep.equal("s1.s3 coefficient is -6 y", got, c.parse("-6*y"))
            rep.equal("printed form: s1.s3 coefficient is -6", got, c.parse(txt))
        else:
            rep.equal(f"{a}.{b} coefficient is {txt}", got, c.parse(txt))
    rep.zero("no other components", [g.component(a, b) for a in basis.labels for b in basis.labels
                                     if (a, b) not in {(x, y) for x, y, _ in _COEFFS} and (b, a) not in {(x, y) for x, y, _ in _COEFFS}])
    rep.zero("16 z g equals the cohomogeneity-one metric with -6 y s1.s3", g - printed_metricpi(basis, "-6*y"))
    gp, _ = build_metricpi("printed")
    rep.zero("the printed frame gives minus the same metric", gp + g)
    sig1 = Form.basis_one_form(basis, "s1")
    sig3 = Form.basis_one_form(basis, "s3")
    rep.zero("d(2 s3 ^ s1) = 0", ((sig3 ^ sig1) * 2).d())
    rep.zero("d d s_a = 0", [Form.basis_one_form(basis, a).d().d() for a in basis.labels])
    return rep


def appendix_suite():
    rep = VerificationReport("appendix", {})
    rep.merge(appendix_commutator_check(), "matrix pair: ")
    rep.merge(lax_distribution_check(), "Lax distribution: ")
    rep.merge(metricpi_check(), "metric: ")
    return rep
