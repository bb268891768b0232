"""Both Plebanski systems, the quadratic reduction and the series solution.

Index conventions: eta = [[0, Id], [-Id, 0]] and eta^{kl} has the same
matrix.  Second-potential charts carry coordinates x^i, y^i; for n = 1 the
reduction chart (z, w, x, y) means (x^1, x^2, y^1, y^2).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from .diffgeo import CoordinateBasis, Form, SymmetricTensor, VectorField, change_chart, dual_coframe
from .diffgeo import lie_bracket, lie_derivative, linalg, sym_product
from .metricfactory import _frame_quaternions, _frame_values_to_form, _frame_values_to_metric
from .oscillator import in_span
from .report import VerificationReport
from .symkernel import ChartSpec, FieldElement, PuiseuxSeries, SeriesError, compose, series_expand

__all__ = [
    "eta",
    "HeavenlyPotential",
    "QuadReduction",
    "pleb2_chart",
    "quad_chart",
    "heavenly2_residual",
    "pleb2_metric",
    "standard_frame",
    "heavenly1_check",
    "heavenly_suite",
    "hyper_lagrangian_instance",
    "quad_reduction_residuals",
    "quad_decomposition_check",
    "legendre_equivalence",
    "LegendreDegenerateError",
    "toml_table",
    "toml_reduction",
    "toml_recursion",
    "toml_series_suite",
    "weierstrass_p",
    "pprime_identity",
    "sparling_tod_suite",
    "null_potential_check",
    "timmetric_metric",
    "timmetric_suite",
    "infinitesimal_limit_check",
]

TOML_MAX_ORDER = 16
# y-exponents below which (Aquad), (Bquad), (Cquad) are decided by the printed terms
TOML_CONSISTENT = {"A": 15, "B": 14, "C": 13}
TOML_WEIGHTS = {"A": Fraction(-7, 5), "B": Fraction(-6, 5), "C": Fraction(-1)}
# W = 4/5 w d_w + 6/5 z d_z + 1/5 x d_x - 1/5 y d_y
W_WEIGHTS = {"w": Fraction(4, 5), "z": Fraction(6, 5), "x": Fraction(1, 5), "y": Fraction(-1, 5)}


def eta(n):
    """The 2n x 2n matrix [[0, Id], [-Id, 0]] as integers (also eta^{kl})."""
    m = 2 * n
    return [[1 if j == i + n else -1 if i == j + n else 0 for j in range(m)] for i in range(m)]


# -- charts and potentials ---------------------------------------------------------


@lru_cache(maxsize=None)
def pleb2_chart(n, functions=(), extra=()):
    xs = tuple(f"x{i}" for i in range(1, 2 * n + 1))
    ys = tuple(f"y{i}" for i in range(1, 2 * n + 1))
    return ChartSpec(f"pleb2_{n}", xs + ys, transcendentals=tuple(extra), functions=dict(functions))


@lru_cache(maxsize=None)
def quad_chart(functions=(), extra=()):
    """(z, w, x, y) exactly as in the four-dimensional second heavenly equation."""
    return ChartSpec("zwxy", ["z", "w", "x", "y"], transcendentals=tuple(extra), functions=dict(functions))


@dataclass
class HeavenlyPotential:
    """Theta(x, y) (or U(z, zt)) on a chart, with the names of the two coordinate halves."""

    chart: ChartSpec
    xs: tuple
    ys: tuple
    theta: FieldElement | None = None

    @property
    def n(self):
        return len(self.xs) // 2

    @classmethod
    def pleb2(cls, n, theta=None, functions=()):
        chart = pleb2_chart(n, tuple(functions))
        xs = tuple(f"x{i}" for i in range(1, 2 * n + 1))
        ys = tuple(f"y{i}" for i in range(1, 2 * n + 1))
        if isinstance(theta, str):
            theta = chart.parse(theta)
        return cls(chart, xs, ys, theta)

    @classmethod
    def quad(cls, theta=None, functions=()):
        chart = quad_chart(tuple(functions))
        if isinstance(theta, str):
            theta = chart.parse(theta)
        return cls(chart, ("z", "w"), ("x", "y"), theta)

    @property
    def basis(self):
        return CoordinateBasis(self.chart, self.xs + self.ys)

    def hessian(self):
        """Theta_{y^i y^j}."""
        th = self.theta
        first = [th.diff(y) for y in self.ys]
        return [[first[i].diff(self.ys[j]) for j in range(len(self.ys))] for i in range(len(self.ys))]


@dataclass
class QuadReduction:
    """Theta = A x^2 + 2 B x + C with A, B, C functions of (z, w, y)."""

    A: FieldElement
    B: FieldElement
    C: FieldElement

    @property
    def chart(self):
        return self.A.chart

    def theta(self):
        x = self.chart.sym("x")
        return self.A * x * x + self.B * x * 2 + self.C

    def potential(self):
        return HeavenlyPotential(self.chart, ("z", "w"), ("x", "y"), self.theta())

    def parity_residuals(self):
        """A(-y) + A(y), B(-y) - B(y), C(-y) + C(y)."""
        c = self.chart
        flip = lambda e: compose(e, c, {"y": -c.sym("y")})
        return flip(self.A) + self.A, flip(self.B) - self.B, flip(self.C) + self.C


def heavenly2_residual(pot):
    """R_ij = Theta_{y^i x^j} - Theta_{y^j x^i} - eta^{kl} Theta_{y^i y^k} Theta_{y^j y^l}."""
    H = pot.hessian()
    m = len(pot.xs)
    et = eta(pot.n)
    zero = pot.chart.const(0)
    ty = [pot.theta.diff(y) for y in pot.ys]
    R = [[zero] * m for _ in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            v = ty[i].diff(pot.xs[j]) - ty[j].diff(pot.xs[i])
            for k in range(m):
                for l in range(m):
                    if et[k][l] and H[i][k] and H[j][l]:
                        v = v - H[i][k] * H[j][l] * et[k][l]
            R[i][j] = v
            R[j][i] = -v
    return R


def pleb2_metric(chart, xs, ys, hess):
    """g = eta_ij dy^i (.) dx^j + H_ij dx^i (.) dx^j."""
    basis = CoordinateBasis(chart, tuple(xs) + tuple(ys))
    d = {c: Form.basis_one_form(basis, c) for c in basis.labels}
    n = len(xs) // 2
    et = eta(n)
    g = SymmetricTensor(basis, {})
    for i in range(2 * n):
        for j in range(2 * n):
            if et[i][j]:
                g = g + sym_product(d[ys[i]], d[xs[j]]) * et[i][j]
            if hess[i][j]:
                g = g + sym_product(d[xs[i]], d[xs[j]]) * hess[i][j]
    return g


def standard_frame(chart, xs, ys, hess):
    """E_{i0'} = d/dy^i, E_{i1'} = d/dx^i + eta^{jk} H_ij d/dy^k (0' vectors first)."""
    basis = CoordinateBasis(chart, tuple(xs) + tuple(ys))
    m = len(xs)
    et = eta(m // 2)
    zero = [VectorField(basis, {y: 1}) for y in ys]
    one = []
    for i in range(m):
        comps = {xs[i]: chart.const(1)}
        for k in range(m):
            acc = chart.const(0)
            for j in range(m):
                if et[j][k] and hess[i][j]:
                    acc = acc + hess[i][j] * et[j][k]
            if acc:
                comps[ys[k]] = acc
        one.append(VectorField(basis, comps))
    return zero + one


@dataclass
class _Pleb2Structure:
    frame: list
    coframe: list
    g: SymmetricTensor
    g_direct: SymmetricTensor
    omega_plus: Form
    omega_minus: Form
    omega_I: Form


def _pleb2_structure(chart, xs, ys, hess):
    """Frame route: g(E_{ii'}, E_{jj'}) = eta_ij eps_{i'j'} / 2, Omega_{+/-} from the 0'0' and 1'1' pairs."""
    m = len(xs)
    n = m // 2
    frame = standard_frame(chart, xs, ys, hess)
    coframe = dual_coframe(frame)
    et = eta(n)
    zero = chart.const(0)
    half = Fraction(1, 2)
    G = [[zero] * (2 * m) for _ in range(2 * m)]
    plus = [[zero] * (2 * m) for _ in range(2 * m)]
    minus = [[zero] * (2 * m) for _ in range(2 * m)]
    for i in range(m):
        for j in range(m):
            if et[i][j]:
                G[i][j + m] = chart.const(Fraction(et[i][j], 2))
                G[i + m][j] = chart.const(Fraction(-et[i][j], 2))
                plus[i][j] = chart.const(et[i][j] * half)
                minus[i + m][j + m] = chart.const(et[i][j] * half)
    basis = frame[0].basis
    g = _frame_values_to_metric(basis, coframe, G)
    quats = _frame_quaternions(chart, n)
    return _Pleb2Structure(
        frame, coframe, g, pleb2_metric(chart, xs, ys, hess),
        _frame_values_to_form(basis, coframe, plus),
        _frame_values_to_form(basis, coframe, minus),
        _frame_values_to_form(basis, coframe, linalg.matmul(quats["I'"], G)),
    )


# -- first heavenly system -------------------------------------------------------------


def heavenly1_check(chart, zs, zts, U=None, matrix=None, label="U"):
    """sum_kl M_ki M_lj eta^{kl} = eta_ij for M_ki = U_{z^k zt^i}; integrability when only M is given."""
    m = len(zs)
    n = m // 2
    rep = VerificationReport("heavenly1", {"n": n, "input": label})
    if matrix is None:
        if U is None:
            raise ValueError("give U or the matrix of mixed second derivatives")
        matrix = [[U.diff(zk).diff(zti) for zti in zts] for zk in zs]
    M = matrix
    et = eta(n)
    res = []
    for i in range(m):
        for j in range(m):
            v = chart.const(-et[i][j])
            for k in range(m):
                for l in range(m):
                    if et[k][l] and M[k][i] and M[l][j]:
                        v = v + M[k][i] * M[l][j] * et[k][l]
            res.append(v)
    rep.zero("M^T eta M = eta", res)
    if U is None:
        mixed_z = [M[k][i].diff(zs[l]) - M[l][i].diff(zs[k])
                   for i in range(m) for k in range(m) for l in range(k + 1, m)]
        mixed_zt = [M[k][i].diff(zts[j]) - M[k][j].diff(zts[i])
                    for k in range(m) for i in range(m) for j in range(i + 1, m)]
        rep.zero("d_{z^l} M_ki = d_{z^k} M_li", mixed_z)
        rep.zero("d_{zt^j} M_ki = d_{zt^i} M_kj", mixed_zt)
    return rep


# -- the heavenly suite ------------------------------------------------------------------


def hyper_lagrangian_instance(n, cubic=False):
    """Theta at most quadratic in y^1..y^n (opaque coefficients): [E_{i0'}, E_{j1'}] stays in B for i, j <= n."""
    rest = 3 * n
    names = [f"P{i}{j}" for i in range(1, n + 1) for j in range(i, n + 1)]
    names += [f"Q{i}" for i in range(1, n + 1)] + ["R"]
    pot = HeavenlyPotential.pleb2(n, functions=tuple((s, rest) for s in names))
    chart = pot.chart
    args = [chart.sym(s) for s in pot.xs + pot.ys[n:]]
    y = [chart.sym(s) for s in pot.ys]
    th = chart.apply("R", *args)
    for i in range(n):
        th = th + y[i] * chart.apply(f"Q{i + 1}", *args)
        for j in range(i, n):
            th = th + y[i] * y[j] * chart.apply(f"P{i + 1}{j + 1}", *args)
    if cubic:
        th = th + y[0] ** 3
    pot.theta = th
    frame = standard_frame(chart, pot.xs, pot.ys, pot.hessian())
    m = 2 * n
    leaf = [frame[i] for i in range(n)] + [frame[m + i] for i in range(n)]
    rep = VerificationReport("hyper-lagrangian", {"n": n, "cubic_term": cubic})
    third = [pot.theta.diff(pot.ys[i]).diff(pot.ys[j]).diff(pot.ys[k])
             for i in range(n) for j in range(n) for k in range(n)]
    rep.zero("d^3 Theta / dy^i dy^j dy^k = 0 for i, j, k <= n", third)
    for i in range(n):
        for j in range(n):
            br = lie_bracket(frame[i], frame[m + j])
            rep.record(f"[E_{i + 1}0', E_{j + 1}1'] in span B", in_span(leaf, br))
    return rep


def heavenly_suite(n=1):
    """heavenly2 residual examples, the quadratic-reduction identity and the hyper-Lagrangian instance."""
    rep = VerificationReport("heavenly", {"n": n})
    pot = HeavenlyPotential.pleb2(n, "0")
    rep.zero("Theta = 0: heavenly2 residual vanishes", heavenly2_residual(pot))
    m = 2 * n
    # constant quadratic Theta = (1/2) S_ij y^i y^j with S = v v^T: S eta S = 0
    chart = pleb2_chart(n)
    v = [Fraction(k + 1) for k in range(m)]
    th = chart.const(0)
    for i in range(m):
        for j in range(m):
            th = th + chart.sym(f"y{i + 1}") * chart.sym(f"y{j + 1}") * (v[i] * v[j] / 2)
    rep.zero("Theta = (v.y)^2 / 2: residual vanishes", heavenly2_residual(HeavenlyPotential.pleb2(n, th)))
    # generic quadratic with constant coefficients: residual = -(S eta S)_ij
    S = [[Fraction(1 + i * j + (i + j) % 3) for j in range(m)] for i in range(m)]
    th = chart.const(0)
    for i in range(m):
        for j in range(m):
            th = th + chart.sym(f"y{i + 1}") * chart.sym(f"y{j + 1}") * (S[i][j] / 2)
    R = heavenly2_residual(HeavenlyPotential.pleb2(n, th))
    et = eta(n)
    SeS = [[sum(S[i][k] * et[k][l] * S[l][j] for k in range(m) for l in range(m)) for j in range(m)] for i in range(m)]
    rep.zero("constant quadratic Theta: residual = -(S eta S)",
             [R[i][j] + SeS[i][j] for i in range(m) for j in range(m)])
    rep.zero("residual antisymmetric", [R[i][j] + R[j][i] for i in range(m) for j in range(m)])
    fl_chart = ChartSpec("flat_z", [f"z{i}" for i in range(1, m + 1)] + [f"zt{i}" for i in range(1, m + 1)])
    zs = tuple(f"z{i}" for i in range(1, m + 1))
    zts = tuple(f"zt{i}" for i in range(1, m + 1))
    U = fl_chart.const(0)
    for i in range(m):
        for j in range(m):
            if et[i][j]:
                U = U + fl_chart.sym(zs[i]) * fl_chart.sym(zts[j]) * et[i][j]
    rep.merge(heavenly1_check(fl_chart, zs, zts, U=U, label="flat"), "flat U: ")
    if n == 1:
        rep.merge(quad_decomposition_check(), "quadratic reduction: ")
        rep.merge(null_potential_check(), "null case: ")
    rep.merge(hyper_lagrangian_instance(n), "quadratic in half the fibre: ")
    return rep


# -- quadratic reduction ---------------------------------------------------------------------


def quad_reduction_residuals(qr):
    """(Aquad, Bquad, Cquad) for A, B, C on the (z, w, x, y) chart."""
    A, B, C = qr.A, qr.B, qr.C
    Ay, By = A.diff("y"), B.diff("y")
    ra = A * A.diff("y").diff("y") * 2 - Ay * Ay * 4 + Ay.diff("z")
    rb = A * By.diff("y") * 2 - By * Ay * 4 + By.diff("z") - A.diff("w")
    rc = A * C.diff("y").diff("y") * 2 - By * By * 4 + C.diff("y").diff("z") - B.diff("w") * 2
    return ra, rb, rc


def _opaque_abc():
    chart = quad_chart((("A", 3), ("B", 3), ("C", 3)))
    args = chart.syms("z", "w", "y")
    return QuadReduction(chart.apply("A", *args), chart.apply("B", *args), chart.apply("C", *args))


def quad_decomposition_check(qr=None):
    """heavenly2 residual of A x^2 + 2 B x + C equals -(x^2 Aquad + 2 x Bquad + Cquad)."""
    qr = qr or _opaque_abc()
    rep = VerificationReport("quad-reduction", {})
    R = heavenly2_residual(qr.potential())
    ra, rb, rc = quad_reduction_residuals(qr)
    x = qr.chart.sym("x")
    rep.zero("residual_12 = -(x^2 Aquad + 2 x Bquad + Cquad)", R[0][1] + ra * x * x + rb * x * 2 + rc)
    zero = QuadReduction(*(qr.chart.const(0),) * 3)
    rep.zero("A = B = C = 0 gives (0, 0, 0)", list(quad_reduction_residuals(zero)))
    return rep


class LegendreDegenerateError(ArithmeticError):
    """F_pp vanishes identically: p = A_y is not a coordinate."""


def legendre_equivalence(F, z="z", w="w", p="p"):
    """(Aquad) in the (z, w, p) chart through y = -F_p, A = F - p F_p.

    Derivatives at fixed (z, w, y) are computed by the inverse Jacobian of
    (z, w, p) -> (z, w, y).  Certifies A_y = p, A_z = F_z, A_w = F_w and
    Aquad = -(2 (F - p F_p) + 4 p^2 F_pp + F_pz) / F_pp.
    """
    chart = F.chart
    rep = VerificationReport("legendre", {})
    Fp = F.diff(p)
    Fpp = Fp.diff(p)
    if Fpp.is_zero():
        raise LegendreDegenerateError("F_pp = 0: the Legendre transformation is degenerate")
    y = -Fp
    y_p = y.diff(p)
    # d/dy|_(z,w) = (1/y_p) d/dp ; d/dz|_(w,y) = d/dz - (y_z / y_p) d/dp
    Dy = lambda f: f.diff(p) / y_p
    Dz = lambda f: f.diff(z) - y.diff(z) / y_p * f.diff(p)
    Dw = lambda f: f.diff(w) - y.diff(w) / y_p * f.diff(p)
    A = F - chart.sym(p) * Fp
    Ay = Dy(A)
    rep.zero("A_y = p", Ay - chart.sym(p))
    rep.zero("A_z = F_z", Dz(A) - F.diff(z))
    rep.zero("A_w = F_w", Dw(A) - F.diff(w))
    aquad = A * Dy(Ay) * 2 - Ay * Ay * 4 + Dz(Ay)
    pde = (F - chart.sym(p) * Fp) * 2 + chart.sym(p) ** 2 * Fpp * 4 + Fp.diff(z)
    rep.zero("Aquad = -(2(F - p F_p) + 4 p^2 F_pp + F_pz) / F_pp", aquad + pde / Fpp)
    rep.params["linear_pde"] = str(pde)
    rep.params["aquad"] = str(aquad)
    return rep


# -- the (Toml) series ------------------------------------------------------------------------


@lru_cache(maxsize=None)
def toml_table():
    """{symbol: {exponent: coefficient text}} from the bundled golden table."""
    text = resources.files("heavenly_forge").joinpath("golden", "toml.txt").read_text()
    out, cur = {}, None
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("["):
            cur = line.strip("[]")
            out[cur] = {}
            continue
        k, c = line.split("\t")
        out[cur][int(k)] = c
    return out


def _poly_in_y(chart, coeffs):
    y = chart.sym("y")
    acc = chart.const(0)
    for k, c in coeffs.items():
        acc = acc + c * y ** k
    return acc


def toml_reduction(chart=None):
    """The printed truncations as a QuadReduction on the (z, w, x, y) chart."""
    chart = chart or quad_chart()
    tab = toml_table()
    parts = [_poly_in_y(chart, {k: chart.parse(c) for k, c in tab[s].items()}) for s in "ABC"]
    return QuadReduction(*parts)


def y_coefficients(e, upto, var="y"):
    """{k: coefficient of var^k} for k < upto, e rational with denominator free of var at 0."""
    ser = series_expand(e, var, 0, upto)
    return {int(k): c for k, c in ser.terms().items()}


def _weight(e):
    """W(e) for the homothety W on (z, w, x, y)."""
    acc = e.chart.const(0)
    for v, wt in W_WEIGHTS.items():
        d = e.diff(v)
        if d:
            acc = acc + d * e.chart.sym(v) * wt
    return acc


def _z_antiderivative(e):
    """Antiderivative in z with zero constant; the denominator must be free of z."""
    chart = e.chart
    num, den = e.parts()
    if set(num) - {0}:
        raise SeriesError("root symbols in a series coefficient")
    j = chart.gen_index("z")
    if den.degrees()[j] > 0:
        raise SeriesError("coefficient has z in its denominator")
    out = {}
    for exps, c in num.get(0, chart.ctx.from_dict({})).to_dict().items():
        k = int(exps[j])
        e2 = list(exps)
        e2[j] = k + 1
        out[tuple(e2)] = c / (k + 1)
    P = FieldElement._from_poly(chart, chart.ctx.from_dict(out)) if out else chart.const(0)
    return P / FieldElement._from_poly(chart, den)


def integration_slot(symbol, m):
    """Exponent k with W(w^k) matching the weight of the y^m coefficient, or None."""
    base = {"A": 7, "B": 6, "C": 5}[symbol]
    k = Fraction(m - base, 4)
    return int(k) if k.denominator == 1 else None


def toml_recursion(order=TOML_MAX_ORDER, seeds=None, chart=None):
    """Solve (Aquad)-(Cquad) order by order in y.

    The y^(m-1) coefficient of each equation reads m d_z(coefficient of y^m) =
    (known lower terms), so each step is a z-integration.  The kernel of d_z at
    the right weight is c w^k (see integration_slot); ``seeds[(symbol, m)]``
    supplies c w^k there (default 0).  A is generated through y^(order-1), B
    through y^(order-2), C through y^(order-3).
    """
    chart = chart or quad_chart()
    seeds = dict(seeds or {})
    for (s, m), val in seeds.items():
        val = val if isinstance(val, FieldElement) else chart.const(val)
        if val.diff("z") or val.diff("y") or val.diff("x"):
            raise SeriesError(f"seed for the y^{m} coefficient of {s} is not killed by d/dz")
        k = integration_slot(s, m)
        if k is None and val:
            raise SeriesError(f"no integration constant at y^{m} in {s}: the weight is fractional")
        if val and _weight(val) != val * (TOML_WEIGHTS[s] + Fraction(m, 5)):
            raise SeriesError(f"seed for the y^{m} coefficient of {s} has the wrong weight")
        seeds[(s, m)] = val
    y = chart.sym("y")
    zero = chart.const(0)
    coeffs = {"A": {}, "B": {}, "C": {}}
    tops = {"A": order, "B": order - 1, "C": order - 2}

    def current(s):
        return _poly_in_y(chart, coeffs[s])

    for s in "ABC":
        for m in range(1, tops[s]):
            qr = QuadReduction(current("A"), current("B") if s != "A" else zero, current("C") if s == "C" else zero)
            res = quad_reduction_residuals(qr)["ABC".index(s)]
            S = y_coefficients(res, m).get(m - 1, zero) if res else zero
            val = -_z_antiderivative(S) / m if S else zero
            val = val + seeds.get((s, m), zero)
            if val:
                coeffs[s][m] = val
    del y
    return coeffs


def printed_seeds(chart=None):
    """Integration constants read off the printed table (the pure w^k terms at the slots)."""
    chart = chart or quad_chart()
    tab = toml_table()
    out = {}
    for s in "ABC":
        for m, txt in tab[s].items():
            if integration_slot(s, m) is not None:
                c = chart.parse(txt)
                if not c.diff("z"):
                    out[(s, m)] = c
    return out


def toml_series_suite(order=TOML_MAX_ORDER):
    """Printed (Toml) against (Aquad)-(Cquad), homogeneity, parity and the recursion."""
    if order > TOML_MAX_ORDER:
        raise SeriesError(f"order {order} exceeds the printed truncation (max {TOML_MAX_ORDER})")
    chart = quad_chart()
    rep = VerificationReport("series", {"order": order})
    qr = toml_reduction(chart)
    res = quad_reduction_residuals(qr)
    for s, r in zip("ABC", res):
        top = min(TOML_CONSISTENT[s], order - "ABC".index(s) - 1)
        cs = y_coefficients(r, top)
        compared = sum(1 for k in range(top) if k >= 0)
        rep.zero(f"{s}quad residual vanishes below y^{top}", list(cs.values()),
                 f"{compared} coefficients compared (N = {top})")
    th = qr.theta()
    x = chart.sym("x")
    rep.zero("W(Theta) = -Theta", _weight(th) + th)
    for s, part in zip("ABC", (qr.A, qr.B, qr.C)):
        rep.zero(f"W({s}) = {TOML_WEIGHTS[s]} {s}", _weight(part) - part * TOML_WEIGHTS[s])
    pa, pb, pc = qr.parity_residuals()
    rep.zero("A odd in y", pa)
    rep.zero("B even in y", pb)
    rep.zero("C odd in y", pc)
    # heavenly2 route: the full residual of Theta is -(x^2 Aquad + 2 x Bquad + Cquad)
    R = heavenly2_residual(qr.potential())[0][1]
    rep.zero("heavenly2 residual of Theta = -(x^2 Aquad + 2 x Bquad + Cquad)", R + res[0] * x * x + res[1] * x * 2 + res[2])
    # recursion
    seeds = printed_seeds(chart)
    gen = toml_recursion(order, seeds, chart)
    tab = toml_table()
    regenerated = 0
    for s in "ABC":
        top = order - "ABC".index(s)
        for m, txt in sorted(tab[s].items()):
            if m >= top:
                continue
            printed = chart.parse(txt)
            got = gen[s].get(m, chart.const(0))
            is_seed = (s, m) in seeds
            tag = "integration constant (seed)" if is_seed else "regenerated"
            rep.equal(f"{s}: y^{m} coefficient", got, printed, tag)
            regenerated += not is_seed
        for m, c in gen[s].items():
            if m < top and m not in tab[s]:
                rep.zero(f"{s}: y^{m} coefficient absent in print and in recursion", c)
    rep.record("at least 3 coefficients regenerated without seeds", regenerated >= 3, f"{regenerated} regenerated")
    rep.params["seeds"] = ", ".join(f"{s}[y^{m}] = {v}" for (s, m), v in sorted(seeds.items()))
    rep.note("seeds are the pure w^k terms at y^m with integer k = (m - 7)/4, (m - 6)/4, (m - 5)/4 for A, B, C;"
             " each is in the kernel of d/dz at its weight and is not fixed by the recursion")
    # with seeds taken from the Weierstrass identity, A is determined completely
    p_seeds = pprime_seeds(order, chart)
    genA = toml_recursion(order, p_seeds, chart)["A"]
    for m, txt in sorted(tab["A"].items()):
        if m < order:
            rep.equal(f"A: y^{m} from the recursion with Weierstrass seeds", genA.get(m, chart.const(0)), chart.parse(txt))
    # derivative sanity: d/dy of the residual also vanishes to one order less
    dres = y_coefficients(res[0].diff("y"), TOML_CONSISTENT["A"] - 1)
    rep.zero("d/dy Aquad residual vanishes below y^14", list(dres.values()))
    return rep


# -- Weierstrass p --------------------------------------------------------------------------


def weierstrass_p(chart, g2, g3, terms=8, param="y"):
    """Laurent series of p(y; g2, g3) at 0 with ``terms`` coefficients after y^-2.

    p = y^-2 + sum_k c_k y^(2k): from p'' = 6 p^2 - g2/2,
    c_1 = g2/20, c_2 = g3/28, c_k = 3/((2k+3)(k-2)) sum_{m=1}^{k-2} c_m c_{k-1-m}.
    """
    g2 = g2 if isinstance(g2, FieldElement) else chart.const(g2)
    g3 = g3 if isinstance(g3, FieldElement) else chart.const(g3)
    c = {1: g2 * Fraction(1, 20), 2: g3 * Fraction(1, 28)}
    for k in range(3, terms + 1):
        acc = chart.const(0)
        for m in range(1, k - 1):
            acc = acc + c[m] * c[k - 1 - m]
        c[k] = acc * Fraction(3, (2 * k + 3) * (k - 2))
    out = {Fraction(-2): chart.const(1)}
    for k in range(1, terms + 1):
        out[Fraction(2 * k)] = c[k]
    return PuiseuxSeries.from_terms(chart, param, out, 2 * terms + 2)


def _minus_inv_pprime_sq(chart, g2, g3, terms):
    P = weierstrass_p(chart, g2, g3, terms)
    dP = P.derivative()
    return -((dP * dP).inverse()), P


def pprime_seeds(order, chart=None):
    """Seeds for A at its integration slots from A_y = -1/p'(y; -4w, -4z)^2."""
    chart = chart or quad_chart()
    ay, _ = _minus_inv_pprime_sq(chart, chart.sym("w") * -4, chart.sym("z") * -4, order // 2 + 2)
    out = {}
    for m in range(1, order):
        if integration_slot("A", m) is not None and m - 1 < ay.truncation_order:
            out[("A", m)] = ay.coefficient(m - 1) * Fraction(1, m)
    return out


def pprime_identity(order=15):
    """A_y from (Toml) against -1/p'(y)^2 with g2 = -4w, g3 = -4z, and with the printed order (-4z, -4w)."""
    if order < 7:
        raise SeriesError("order too small: the first nonzero coefficient of A_y is at y^6")
    chart = quad_chart()
    rep = VerificationReport("pprime", {"order": order})
    terms = order // 2 + 2
    z, w = chart.syms("z", "w")
    g2, g3 = w * -4, z * -4
    target, P = _minus_inv_pprime_sq(chart, g2, g3, terms)
    # the p series solves p'^2 = 4 p^3 - g2 p - g3 to its truncation order
    dP = P.derivative()
    ode = dP * dP - (P * P * P).scale(4) + P.scale(g2) - chart.const(0)
    ode = ode + PuiseuxSeries.from_terms(chart, "y", {0: g3}, ode.truncation_order)
    rep.record("p'^2 = 4 p^3 - g2 p - g3 to the truncation order", ode.is_zero(), f"N = {ode.truncation_order}")
    rep.zero("p series coefficient of y^2 is g2/20", P.coefficient(2) - g2 * Fraction(1, 20))
    rep.zero("leading term of -1/p'^2 is -y^6/4", target.coefficient(6) + Fraction(1, 4))
    rep.record("-1/p'^2 starts at y^6", target.valuation() == 6)
    odd = [c for k, c in target.terms().items() if k.denominator != 1 or k.numerator % 2]
    rep.zero("-1/p'^2 is even in y", odd)
    qr = toml_reduction(chart)
    Ay = y_coefficients(qr.A.diff("y"), order)
    N = min(order, int(target.truncation_order))
    diffs = [Ay.get(k, chart.const(0)) - target.coefficient(k) for k in range(N)]
    compared = sum(1 for k in range(N) if Ay.get(k))
    rep.zero(f"A_y = -1/p'(y; -4w, -4z)^2 through y^{N - 1}", diffs,
             f"{compared} nonzero coefficients compared; N = {N}")
    rep.record("at least 3 nonzero coefficients compared", compared >= 3)
    printed, _ = _minus_inv_pprime_sq(chart, z * -4, w * -4, terms)
    diffs = [Ay.get(k, chart.const(0)) - printed.coefficient(k) for k in range(N)]
    rep.zero(f"printed form: A_y = -1/p'(y; -4z, -4w)^2 through y^{N - 1}", diffs,
             "g2 must carry the weight of w (4/5 per W) for the y^10 terms to match")
    return rep


# -- the null case (Sparling-Tod) -------------------------------------------------------------


@lru_cache(maxsize=None)
def _st_chart():
    return ChartSpec("st", ["x1", "x2", "y1", "y2"], transcendentals=("c",), functions={"F": 2})


def _st_hessian(chart, F, exponent):
    x1, x2, y1, y2 = chart.syms("x1", "x2", "y1", "y2")
    s = x1 * y2 - x2 * y1
    H = F / s ** exponent
    ex = [-x2, x1]  # eta_ki x^k
    return [[H * ex[i] * ex[j] for j in range(2)] for i in range(2)], s


def sparling_tod_suite(n=1, F="opaque", exponent=3):
    """The null-homothety metric: hyper-Kahler, L_W g = g, g(W, W) = 0, T Killing; for constant F the foliation."""
    if n != 1:
        raise ValueError("the null-homothety metric is four-dimensional (n = 1)")
    chart = _st_chart()
    x1, x2 = chart.syms("x1", "x2")
    if F == "opaque":
        s0 = x1 * chart.sym("y2") - x2 * chart.sym("y1")
        Fe = chart.apply("F", x1 / s0, x2 / s0)
    elif F == "constant":
        Fe = chart.sym("c")
    else:
        Fe = F if isinstance(F, FieldElement) else chart.parse(F)
    rep = VerificationReport("sparling-tod", {"n": n, "F": str(F), "exponent": exponent})
    hess, s = _st_hessian(chart, Fe, exponent)
    xs, ys = ("x1", "x2"), ("y1", "y2")
    st = _pleb2_structure(chart, xs, ys, hess)
    rep.zero("frame route g equals eta dy.dx + Theta_yy dx.dx", st.g - st.g_direct)
    sym3 = [hess[i][j].diff(ys[k]) - hess[i][k].diff(ys[j]) for i in range(2) for j in range(2) for k in range(2)]
    rep.zero("d_{y^k} Theta_ij symmetric (Theta_yy is a y-Hessian)", sym3)
    rep.zero("d Omega_+ = 0", st.omega_plus.d())
    rep.zero("d Omega_- = 0", st.omega_minus.d())
    rep.zero("d Omega_I = 0", st.omega_I.d())
    basis = st.g.basis
    W = VectorField(basis, {"x1": x1, "x2": x2})
    T = VectorField(basis, {"y1": x1, "y2": x2})
    rep.zero("L_W g = g", lie_derivative(st.g, W) - st.g)
    rep.zero("g(W, W) = 0", st.g(W, W))
    rep.zero("L_T g = 0", lie_derivative(st.g, T))
    if F == "constant":
        fr = st.frame
        leaf = [fr[0] * x1 + fr[1] * x2, fr[2] * x1 + fr[3] * x2]
        rep.record("span{x^i E_i0', x^i E_i1'} closed under brackets", in_span(leaf, lie_bracket(leaf[0], leaf[1])))
        rep.merge(_st_adapted_check(st.g), "adapted Darboux chart: ")
    return rep


@lru_cache(maxsize=None)
def _adapted_chart():
    return ChartSpec("st_adapted", ["z", "w", "x", "y"], roots=[("r", "r^2 - 2*z")], transcendentals=("c",))


def null_potential_check():
    """Theta = c/(2 x.y) has the constant-F null Hessian and solves heavenly2."""
    chart = _st_chart()
    c = chart.sym("c")
    hess, s = _st_hessian(chart, c, 3)
    pot = HeavenlyPotential(chart, ("x1", "x2"), ("y1", "y2"), c / (s * 2))
    H2 = pot.hessian()
    rep = VerificationReport("null-potential", {"n": 1})
    rep.zero("Theta = c/(2 x.y) has Theta_yy = c (eta x)(eta x)^T / (x.y)^3",
             [H2[i][j] - hess[i][j] for i in range(2) for j in range(2)])
    rep.zero("Theta = c/(2 x.y) solves heavenly2", heavenly2_residual(pot))
    return rep


def _st_adapted_check(g):
    """Darboux (z, w) = (x1^2/2, x2/x1) with d/dz along W; fibre y = J (x, y)_new; Theta quadratic in x."""
    rep = VerificationReport("st-adapted", {})
    C = _adapted_chart()
    z, w, xn, yn, r = C.syms("z", "w", "x", "y", "r")
    # x1 = r, x2 = r w; J = d(x1, x2)/d(z, w) = [[1/r, 0], [w/r, r]]
    images = {"x1": r, "x2": r * w, "y1": xn / r, "y2": w * xn / r + r * yn}
    basis = CoordinateBasis(C, ("z", "w", "x", "y"))
    gn = change_chart(g, basis, images)
    half = Fraction(1, 2)
    rep.zero("no dx.dx, dx.dy, dy.dy terms", [gn.component(a, b) for a in "xy" for b in "xy"])
    rep.zero("g(d_x, d_w) = 1/2, g(d_y, d_z) = -1/2, g(d_x, d_z) = g(d_y, d_w) = 0",
             [gn.component("x", "w") - half, gn.component("y", "z") + half, gn.component("x", "z"), gn.component("y", "w")])
    Hzz = gn.component("z", "z")
    rep.zero("Theta_xx independent of x (quadratic in the first fibre coordinate)", Hzz.diff("x"))
    A = Hzz * half
    qr = QuadReduction(A, C.const(0), C.const(0))
    rep.zero("A = Theta_xx / 2 solves Aquad", quad_reduction_residuals(qr)[0])
    rep.params["A"] = str(A)
    return rep


# -- strengthened projectability --------------------------------------------------------------


@lru_cache(maxsize=None)
def _tim_chart():
    return ChartSpec("tim", ["u1", "u2", "ut1", "ut2"], functions={"A": 2, "D": 2})


def timmetric_metric(utilde_sign=1):
    """A du1 dut2 + du2 dut1 / A + (u1 A_u2 + s ut1 A^-2 A_ut2 + D) du2 dut2; s = +1 is the printed sign."""
    C = _tim_chart()
    u1, u2, ut1, ut2 = C.syms("u1", "u2", "ut1", "ut2")
    A = C.apply("A", u2, ut2)
    D = C.apply("D", u2, ut2)
    H = u1 * A.diff("u2") + ut1 * A.diff("ut2") / (A * A) * utilde_sign + D
    basis = CoordinateBasis(C)
    d = {c: Form.basis_one_form(basis, c) for c in basis.labels}
    return sym_product(d["u1"], d["ut2"]) * A + sym_product(d["u2"], d["ut1"]) * A.inverse() + sym_product(d["u2"], d["ut2"]) * H


def _mixed_matrix(g, zs, zts):
    """M_jk = U_{z^j zt^k} from g = M_jk dz^j (.) dzt^k."""
    return [[g.component(a, b) * 2 for b in zts] for a in zs]


def _explicit_tim_u():
    """U = A u1 + ut1 u2^2/(2 ut2) + C + D + E with A = ut2^2/(2 u2), so d^2 B/dut1 du2 = 1/A_ut2."""
    C = ChartSpec("tim_u", ["u1", "u2", "ut1", "ut2"])
    P = C.parse
    return C, P("ut2^2*u1/(2*u2) + ut1*u2^2/(2*ut2) + u1^3*u2 + ut2*u2^2 + ut1^2*ut2")


def timmetric_suite():
    rep = VerificationReport("timmetric", {"n": 1})
    zs, zts = ("u1", "u2"), ("ut2", "ut1")
    g = timmetric_metric(-1)
    rep.zero("no du du or dut dut terms", [g.component(a, b) for a in zs for b in zs] + [g.component(a, b) for a in zts for b in zts])
    M = _mixed_matrix(g, zs, zts)
    rep.merge(heavenly1_check(g.chart, zs, zts, matrix=M, label="opaque A, D; ut^1 term with minus sign"),
              "sign-corrected, zt = (ut2, ut1): ")
    Cu, U = _explicit_tim_u()
    rep.merge(heavenly1_check(Cu, zs, zts, U=U, label="explicit A = ut2^2/(2 u2)"), "explicit U: ")
    gp = timmetric_metric(1)
    Mp = _mixed_matrix(gp, zs, zts)
    rep.merge(heavenly1_check(gp.chart, zs, zts, matrix=Mp, label="printed"), "printed form, zt = (ut2, ut1): ")
    return rep


# -- infinitesimal limit ------------------------------------------------------------------------


def infinitesimal_limit_check(pot, xi_order=2):
    """U = xi^-1 eta z zt - xi^2 Theta(z, (z - zt)/xi): heavenly1 with right side eta/xi^2, expanded in xi.

    Coefficients of xi^-2 and xi^-1 vanish; the xi^0 coefficient, written in
    (x, y), equals minus the heavenly2 residual of Theta.
    """
    n = pot.n
    m = 2 * n
    xs, ys = pot.xs, pot.ys
    zs = tuple(f"Z{i}" for i in range(1, m + 1))
    zts = tuple(f"Zt{i}" for i in range(1, m + 1))
    Zc = ChartSpec(f"limZ{n}", zs + zts, transcendentals=("xi",))
    XY = ChartSpec(f"limXY{n}", xs + ys, transcendentals=("xi",))
    xi = Zc.sym("xi")
    images = {}
    for i in range(m):
        images[xs[i]] = Zc.sym(zs[i])
        images[ys[i]] = (Zc.sym(zs[i]) - Zc.sym(zts[i])) / xi
    theta = compose(pot.theta, Zc, images)
    et = eta(n)
    U = theta * -(xi * xi)
    for i in range(m):
        for j in range(m):
            if et[i][j]:
                U = U + Zc.sym(zs[i]) * Zc.sym(zts[j]) * et[i][j] / xi
    M = [[U.diff(zk).diff(zti) for zti in zts] for zk in zs]
    back = {}
    for i in range(m):
        back[zs[i]] = XY.sym(xs[i])
        back[zts[i]] = XY.sym(xs[i]) - XY.sym("xi") * XY.sym(ys[i])
    rep = VerificationReport("limit", {"n": n, "xi_order": xi_order})
    theta_xy = compose(pot.theta, XY, {})
    R2 = heavenly2_residual(HeavenlyPotential(XY, xs, ys, theta_xy))
    lead, below, nxt = [], [], []
    for i in range(m):
        for j in range(m):
            v = XY.const(0)
            for k in range(m):
                for l in range(m):
                    if et[k][l] and M[k][i] and M[l][j]:
                        v = v + compose(M[k][i] * M[l][j], XY, back) * et[k][l]
            v = v - XY.const(et[i][j]) / (XY.sym("xi") ** 2)
            ser = series_expand(v, "xi", 0, xi_order)
            below += [ser.coefficient(-2), ser.coefficient(-1)]
            lead.append(ser.coefficient(0) + R2[i][j])
            if xi_order > 1:
                nxt.append(ser.coefficient(1))
    rep.zero("xi^-2 and xi^-1 coefficients vanish", below)
    rep.zero("xi^0 coefficient = -heavenly2 residual of Theta", lead)
    if nxt:
        rep.params["xi^1 remainder nonzero"] = any(bool(c) for c in nxt)
    return rep
