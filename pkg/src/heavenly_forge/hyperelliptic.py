"""Residue calculus on y^2 = Q0(x) and the intersection form omega on M.

Everything happens in the local parameter t = 1/x at the branch point at
infinity.  For tangent vectors U, V of M

    omega(U, V) = -res_{t=0} U(y) phi_V dx,    d phi_V = V(y) dx,

which equals the contour integral around all finite poles.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from .charts import xn_chart, xn_names
from .diffgeo import CoordinateBasis, Form, linalg
from .report import VerificationReport
from .symkernel import RAMIFICATION, SeriesError, series_expand

__all__ = [
    "CurveFamily",
    "SymplecticFormOnM",
    "curve_family",
    "omega_matrix",
    "omega_residue",
    "golden_omega",
    "omega_check",
    "triangular_residues",
    "pullback_omega_on_flows",
    "F_function",
]

GROWTH_STEP = 4
GROWTH_CAP = 64


class CurveFamily:
    """y^2 = Q0(x) over X_n's (a, b) coordinates, with y expanded at infinity."""

    def __init__(self, n, order=None, indexed=None):
        self.n = n
        self.chart = xn_chart(n, indexed)
        self.names = xn_names(n, indexed)
        self.Q0 = self._q0()
        self.order = Fraction(order) if order is not None else Fraction(n + 2)
        self._expand()

    def _q0(self):
        c, nm, n = self.chart, self.names, self.n
        x = c.sym("x")
        out = x ** (2 * n + 1)
        for i in range(n):
            out = out + c.sym(nm.a[i]) * x ** (n + i) + c.sym(nm.b[i]) * x ** i
        return out

    def _expand(self):
        # y has valuation -(n + 1/2); ask Q0 for exactly enough terms
        q0 = series_expand(self.Q0, "x", "infinity", self.order - Fraction(2 * self.n + 1, 2))
        self.y = q0.sqrt()
        self.y_inv = self.y.inverse()

    def grow(self, step=GROWTH_STEP):
        self.order += step
        self._expand()

    @property
    def coordinates(self):
        return self.names.a + self.names.b

    def x_power(self, k):
        """x^k = t^-k as a series (exact)."""
        return series_expand(self.chart.sym("x") ** k, "x", "infinity", self.y_inv.truncation_order + k + 1)

    def dy(self, coord):
        """dy/dc = (dQ0/dc) / (2y) for a coordinate c of M."""
        nm, n = self.names, self.n
        if coord in nm.a:
            k = n + nm.a.index(coord)
        elif coord in nm.b:
            k = nm.b.index(coord)
        else:
            raise KeyError(f"{coord} is not a coordinate of M")
        return (self.y_inv * Fraction(1, 2)).shift(-k)

    def y_check(self):
        """(y-series)^2 - Q0 vanishes to the known order; leading coefficient +1."""
        q0 = series_expand(self.Q0, "x", "infinity", (self.y * self.y).truncation_order)
        lead = self.y.coefficient(self.y.valuation())
        return (self.y * self.y - q0).is_zero(), self.y.valuation(), lead


def omega_residue(U_dy, V_dy):
    """-res_{t=0} U(y) phi_V dx for series U(y), V(y); None if truncation is too short."""
    phi = V_dy.differential_at_infinity().antiderivative()
    integrand = (U_dy * phi).differential_at_infinity()
    if integrand.order <= -RAMIFICATION:
        return None
    return -integrand.residue()


@dataclass
class SymplecticFormOnM:
    n: int
    chart: object
    coordinates: tuple
    components: dict
    order: Fraction
    notes: list = field(default_factory=list)

    def __call__(self, c1, c2):
        if c1 == c2:
            return self.chart.const(0)
        if (c1, c2) in self.components:
            return self.components[(c1, c2)]
        return -self.components[(c2, c1)]

    def matrix(self):
        return [[self(c1, c2) for c2 in self.coordinates] for c1 in self.coordinates]

    @property
    def basis(self):
        return CoordinateBasis(self.chart, self.coordinates)

    def as_form(self):
        cs = self.coordinates
        comps = {(i, j): self(cs[i], cs[j]) for i in range(len(cs)) for j in range(i + 1, len(cs))}
        return Form(self.basis, 2, comps)

    def contract(self, X, Y):
        """omega(d pi X, d pi Y) for vector fields on X_n."""
        acc = self.chart.const(0)
        for c1 in self.coordinates:
            x1 = X.component(c1)
            if not x1:
                continue
            for c2 in self.coordinates:
                y2 = Y.component(c2)
                if y2 and c1 != c2:
                    acc = acc + x1 * y2 * self(c1, c2)
        return acc

    def listing(self):
        return self.as_form().listing()


def _compute(fam, both_orders=False):
    cs = fam.coordinates
    dys = {c: fam.dy(c) for c in cs}
    comps, swapped = {}, {}
    for i, c1 in enumerate(cs):
        for c2 in cs[i + 1:]:
            r = omega_residue(dys[c1], dys[c2])
            if r is None:
                return None
            comps[(c1, c2)] = r
            if both_orders:
                r2 = omega_residue(dys[c2], dys[c1])
                if r2 is None:
                    return None
                swapped[(c1, c2)] = r2
    return comps, swapped


def _grown(fam, both_orders):
    while True:
        got = _compute(fam, both_orders)
        if got is not None:
            return got
        if fam.order >= GROWTH_CAP:
            raise SeriesError(f"truncation order {fam.order} still too small for the residues of omega")
        fam.grow()


def omega_matrix(n, series_order=None, indexed=None, _both=False):
    """omega(d/dc, d/dc') for all pairs of (a, b) coordinates, as exact field elements."""
    fam = CurveFamily(n, series_order, indexed)
    comps, swapped = _grown(fam, _both)
    form = SymplecticFormOnM(n, fam.chart, fam.coordinates, comps, fam.order)
    if _both:
        form.notes.append(swapped)
    return form


@lru_cache(maxsize=None)
def _cached_omega(n, indexed=None):
    return omega_matrix(n, indexed=indexed)


def curve_family(n, order=None, indexed=None):
    return CurveFamily(n, order, indexed)


def golden_omega(n, indexed=None):
    """The printed omega for A_2, A_4, A_6 read from the bundled golden files."""
    text = resources.files("heavenly_forge").joinpath("golden", f"omega_A{2 * n}.txt").read_text()
    chart = xn_chart(n, indexed)
    cs = xn_names(n, indexed).a + xn_names(n, indexed).b
    basis = CoordinateBasis(chart, cs)
    out = Form.zero(basis, 2)
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        coef, wedge_text = line.split("\t")
        left, right = (w.strip()[1:] for w in wedge_text.split("^"))
        out = out + Form(basis, 2, {(left, right): chart.parse(coef)})
    return out


def omega_check(n, series_order=None):
    """Closure, nondegeneracy, antisymmetry, truncation invariance and the printed tables."""
    rep = VerificationReport("omega", {"n": n})
    fam = CurveFamily(n, series_order)
    ok, val, lead = fam.y_check()
    rep.record("y^2 = Q0 to the truncation order", ok, f"known below x^-{fam.y.truncation_order}")
    rep.equal("y leading exponent", val, Fraction(-(2 * n + 1), 2), "in t = 1/x")
    rep.zero("y branch: leading coefficient +1", lead - 1)
    for c in fam.coordinates:
        rep.record(f"dy/d{c} dx has no residue at infinity",
                   not fam.dy(c).differential_at_infinity().has_residue(),
                   "integration constant of phi is irrelevant")
    om = omega_matrix(n, series_order, _both=True)
    swapped = om.notes[0]
    for (c1, c2), v in om.components.items():
        rep.zero(f"omega(d{c1}, d{c2}) + omega(d{c2}, d{c1}) = 0", v + swapped[(c1, c2)])
    higher = omega_matrix(n, om.order + GROWTH_STEP)
    rep.zero("truncation invariance N -> N+4",
             [om.components[k] - higher.components[k] for k in om.components],
             f"N = {om.order}")
    form = om.as_form()
    rep.zero("d omega = 0", form.d())
    pf = linalg.pfaffian(om.matrix())
    rep.record("Pfaffian nonzero", bool(pf), f"Pf = {pf}")
    if n <= 3:
        gold = golden_omega(n)
        rep.zero(f"omega matches printed A_{2 * n}", form - gold)
    return rep, om


def triangular_residues(n, om=None):
    """omega(d a_j, d b_k) = 0 for j + k <= n, 1/(2-4j) on the antidiagonal, omega(d b, d b) = 0."""
    rep = VerificationReport("triangular", {"n": n})
    om = om or _cached_omega(n)
    nm = xn_names(n)
    for j in range(1, n + 1):
        for k in range(1, n + 1):
            # leading exponent of the integrand in t is n - j - k
            v = om(nm.a[j - 1], nm.b[k - 1])
            if j + k <= n:
                rep.zero(f"omega(da{j}, db{k}) = 0", v, f"integrand starts at t^{n - j - k}")
            elif j + k == n + 1:
                rep.zero(f"omega(da{j}, db{k}) = 1/(2-4*{j})", v - Fraction(1, 2 - 4 * j))
    for j in range(n):
        for k in range(j + 1, n):
            rep.zero(f"omega(db{j + 1}, db{k + 1}) = 0", om(nm.b[j], nm.b[k]))
    return rep


def F_function(fs, j, x=None):
    """F_j(x) = V_{j1'}(Q0(x)) - Q0'(x)/(x - q_j) + 2 Q0(x)/(x - q_j)^2."""
    chart = fs.chart
    xs = chart.sym("x")
    Q0 = fs.potential.Q0
    qj = chart.sym(fs.names.q[j])
    out = fs.V1[j](Q0) - Q0.diff("x") / (xs - qj) + 2 * Q0 / (xs - qj) ** 2
    return out if x is None else out.subs({"x": x})


def pullback_omega_on_flows(fs, om=None):
    """pi^* omega on the 1'-flows against q_k^(j-1)/2, (F_j(q_k) - F_k(q_j))/2 and 0."""
    n = fs.n
    rep = VerificationReport("pullback-omega", {"n": n})
    om = om or _cached_omega(n)
    q = fs.chart.syms(*fs.names.q)
    for j in range(n):
        for k in range(n):
            rep.zero(f"pi*omega(U{j + 1}1', V{k + 1}1') = q{k + 1}^{j}/2",
                     om.contract(fs.U1[j], fs.V1[k]) - q[k] ** j * Fraction(1, 2))
    for j in range(n):
        for k in range(n):
            val = om.contract(fs.V1[j], fs.V1[k])
            if j == k:
                rep.zero(f"pi*omega(V{j + 1}1', V{j + 1}1') = 0", val)
            elif j < k:
                target = (F_function(fs, j, q[k]) - F_function(fs, k, q[j])) * Fraction(1, 2)
                rep.zero(f"pi*omega(V{j + 1}1', V{k + 1}1') = (F{j + 1}(q{k + 1}) - F{k + 1}(q{j + 1}))/2", val - target)
    for j in range(n):
        for k in range(j + 1, n):
            rep.zero(f"pi*omega(U{j + 1}1', U{k + 1}1') = 0", om.contract(fs.U1[j], fs.U1[k]))
    return rep
