"""The distinguished hyper-Kahler metric g^omega on X_n and its certification.

Frame: E_{k0'} = (U_{i0'}, V_{i0'}), E_{k1'} = (U_{i1'}, V_{i1'}), k = 1..2n.
The metric has frame values g(E_{ki'}, E_{lj'}) = e_kl eps_{i'j'} with
eps_{0'1'} = 1 and

    e = 2 [[mu, nu], [-nu^T, xi]].

Omega_{+/-} take the values e_kl / 2 on the 0'0' (resp. 1'1') frame pairs, so
that Omega_- = pi^* omega with omega from the residue pairing.  The tensorial
forms g(J., .) and g(N., .) are twice as large; both relations are certified.
Over Q the complex structures are I = i I', K = i K' with I' = +1 on the 0'
half and -1 on the 1' half.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from .charts import apqr_chart, legacy_chart
from .diffgeo import (
    CoordinateBasis,
    Form,
    SymmetricTensor,
    VectorField,
    change_chart,
    curvature_invariants,
    dual_coframe,
    lie_bracket,
    lie_derivative,
    linalg,
    sym_product,
)
from .hyperelliptic import _cached_omega
from .oscillator import build_flows, in_span, legacy_frame
from .report import VerificationReport

__all__ = [
    "ParaconformalPackage",
    "build_distinguished_metric",
    "matrix_components",
    "with_e",
    "certify_hyperkahler",
    "certify_comb_identities",
    "certify_homothety",
    "certify_hyper_lagrangian",
    "beta_surface_check",
    "dual_trivialisation_check",
    "cubic_flows_check",
    "pi1_metric",
    "met58_metric",
    "pi1_comparison",
    "weyl_check",
    "euler_variant",
]


@dataclass
class ParaconformalPackage:
    n: int
    fs: object
    frame: list
    coframe: list
    mu: list
    nu: list
    xi: list
    e: list
    G: list
    quaternions: dict
    g: SymmetricTensor
    omega_plus: Form
    omega_minus: Form
    omega_I: Form
    omega_J: Form
    omega_K: Form
    notes: list = field(default_factory=list)

    @property
    def chart(self):
        return self.fs.chart

    @property
    def basis(self):
        return self.fs.basis

    def idx(self, k, half):
        """Frame index of E_{k half'} (k 0-based in 0..2n-1)."""
        return k + 2 * self.n * half


def matrix_components(fs):
    """mu = 0, nu_ij = A_ik Ct_jk / 2, xi_ij = (Ch_ik Ct_jk - Ch_jk Ct_ik) / 2."""
    n, zero = fs.n, fs.chart.const(0)
    A, Ct, Ch = fs.A, fs.Ct, fs.Ch
    half = Fraction(1, 2)

    def dot(X, Y, i, j):
        acc = zero
        for k in range(n):
            if X[i][k] and Y[j][k]:
                acc = acc + X[i][k] * Y[j][k]
        return acc

    mu = [[zero] * n for _ in range(n)]
    nu = [[dot(A, Ct, i, j) * half for j in range(n)] for i in range(n)]
    xi = [[(dot(Ch, Ct, i, j) - dot(Ch, Ct, j, i)) * half for j in range(n)] for i in range(n)]
    return mu, nu, xi


def _e_matrix(mu, nu, xi):
    n = len(mu)
    e = [[None] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            e[i][j] = mu[i][j] * 2
            e[i][j + n] = nu[i][j] * 2
            e[i + n][j] = -nu[j][i] * 2
            e[i + n][j + n] = xi[i][j] * 2
    return e


def _frame_quaternions(chart, n):
    """Matrices R with Q(E_K) = sum_L R[K][L] E_L for I', J, K', N."""
    m = 4 * n
    h = 2 * n
    zero, one = chart.const(0), chart.const(1)
    mats = {name: [[zero] * m for _ in range(m)] for name in ("I'", "J", "K'", "N")}
    for k in range(h):
        mats["I'"][k][k] = one
        mats["I'"][k + h][k + h] = -one
        mats["J"][k][k + h] = -one
        mats["J"][k + h][k] = one
        mats["K'"][k][k + h] = one
        mats["K'"][k + h][k] = one
        mats["N"][k + h][k] = one
    return mats


def _frame_values_to_form(basis, coframe, values, degree=2):
    """Coordinate form with Omega(d_a, d_b) = sum values[K][L] theta^K_a theta^L_b."""
    dim = basis.dim
    chart = basis.chart
    th = [[t.component(a) for a in range(dim)] for t in coframe]
    nz = [(K, L, v) for K, row in enumerate(values) for L, v in enumerate(row) if v]
    comps = {}
    for a in range(dim):
        for b in range(a + 1, dim):
            acc = chart.const(0)
            for K, L, v in nz:
                x, y = th[K][a], th[L][b]
                if x and y:
                    acc = acc + v * x * y
            if acc:
                comps[(a, b)] = acc
    return Form(basis, degree, comps)


def _frame_values_to_metric(basis, coframe, values):
    dim = basis.dim
    chart = basis.chart
    th = [[t.component(a) for a in range(dim)] for t in coframe]
    nz = [(K, L, v) for K, row in enumerate(values) for L, v in enumerate(row) if v]
    comps = {}
    for a in range(dim):
        for b in range(a, dim):
            acc = chart.const(0)
            for K, L, v in nz:
                x, y = th[K][a], th[L][b]
                if x and y:
                    acc = acc + v * x * y
            if acc:
                comps[(a, b)] = acc
    return SymmetricTensor(basis, comps)


def _assemble(fs, frame, coframe, mu, nu, xi):
    n = fs.n
    chart = fs.chart
    zero = chart.const(0)
    h, m = 2 * n, 4 * n
    e = _e_matrix(mu, nu, xi)
    eps = [[0, 1], [-1, 0]]
    G = [[e[K % h][L % h] * eps[K // h][L // h] if eps[K // h][L // h] else zero for L in range(m)] for K in range(m)]
    half = Fraction(1, 2)
    plus = [[e[K][L] * half if (K < h and L < h) else zero for L in range(m)] for K in range(m)]
    minus = [[e[K - h][L - h] * half if (K >= h and L >= h) else zero for L in range(m)] for K in range(m)]
    quats = _frame_quaternions(chart, n)
    basis = fs.basis
    g = _frame_values_to_metric(basis, coframe, G)
    op = _frame_values_to_form(basis, coframe, plus)
    om = _frame_values_to_form(basis, coframe, minus)
    oI = _frame_values_to_form(basis, coframe, linalg.matmul(quats["I'"], G))
    return ParaconformalPackage(n, fs, frame, coframe, mu, nu, xi, e, G, quats, g, op, om, oI, op + om, op - om)


def build_distinguished_metric(n=1, fs=None):
    """g^omega from the flows of X_n with the matrix components fixed by the fibre Darboux condition."""
    fs = fs or build_flows(n)
    frame = fs.frame()
    coframe = dual_coframe(frame)
    mu, nu, xi = matrix_components(fs)
    return _assemble(fs, frame, coframe, mu, nu, xi)


def with_e(pkg, mu=None, nu=None, xi=None):
    """Rebuild the package with replaced blocks (negative controls)."""
    return _assemble(pkg.fs, pkg.frame, pkg.coframe, mu or pkg.mu, nu or pkg.nu, xi or pkg.xi)


def _vertical(fs):
    return fs.names.q + fs.names.v


def _fibre_target(pkg):
    """(1/2) sum dv_i ^ dq_i: the fibre Darboux form in the half-wedge reading."""
    basis = pkg.basis
    out = Form.zero(basis, 2)
    for q, v in zip(pkg.fs.names.q, pkg.fs.names.v):
        out = out + Form(basis, 2, {(v, q): Fraction(1, 2)})
    return out


def _restrict(form, coords):
    idx = {form.basis.index[c] for c in coords}
    return Form(form.basis, form.degree, {k: v for k, v in form.comps.items() if set(k) <= idx})


def pullback_omega_form(pkg, om=None):
    om = om or _cached_omega(pkg.n)
    basis = pkg.basis
    comps = {(c1, c2): v for (c1, c2), v in om.components.items()}
    return Form(basis, 2, comps)


def _unknown_layout(n):
    """Unknowns: mu_{k<l}, nu_{kl}, xi_{k<l}."""
    lay = []
    for k in range(n):
        for l in range(k + 1, n):
            lay.append(("mu", k, l))
    for k in range(n):
        for l in range(n):
            lay.append(("nu", k, l))
    for k in range(n):
        for l in range(k + 1, n):
            lay.append(("xi", k, l))
    return lay


def _blocks_from_unknowns(chart, n, lay, vals):
    zero = chart.const(0)
    mu = [[zero] * n for _ in range(n)]
    nu = [[zero] * n for _ in range(n)]
    xi = [[zero] * n for _ in range(n)]
    for (kind, k, l), v in zip(lay, vals):
        if kind == "nu":
            nu[k][l] = v
        else:
            M = mu if kind == "mu" else xi
            M[k][l] = v
            M[l][k] = -v
    return mu, nu, xi


def _linear_system(pkg, half, coords, target):
    """Equations Omega_half(d c1, d c2) = target(c1, c2) for c1 < c2 in ``coords``, linear in the unknowns."""
    n = pkg.n
    chart = pkg.chart
    lay = _unknown_layout(n)
    h = 2 * n
    basis = pkg.basis
    dim = basis.dim
    th = [[t.component(a) for a in range(dim)] for t in pkg.coframe]
    off = h * half
    zero = chart.const(0)
    rows, rhs = [], []
    pairs = [(basis.index[c1], basis.index[c2]) for i, c1 in enumerate(coords) for c2 in coords[i + 1:]]
    for a, b in pairs:
        a, b = min(a, b), max(a, b)
        row = []
        for kind, k, l in lay:
            # contribution of a unit unknown to e/2 on the frame pairs
            entries = []
            if kind == "nu":
                entries = [(k, l + n, 1), (l + n, k, -1)]
            else:
                s = 0 if kind == "mu" else n
                entries = [(k + s, l + s, 1), (l + s, k + s, -1)]
            acc = zero
            for K, L, sgn in entries:
                x, y = th[K + off][a], th[L + off][b]
                if x and y:
                    acc = acc + x * y * sgn
            row.append(acc)
        rows.append(row)
        rhs.append([target.component(a, b)])
    return rows, rhs, lay


def _solve_blocks(pkg, half, coords, target):
    rows, rhs, lay = _linear_system(pkg, half, coords, target)
    r = linalg.rank(rows)
    if r < len(lay):
        return r, len(lay), None
    # square after selecting independent rows
    A, R, pivots, _, _ = linalg._eliminate(rows, rhs)
    sol = linalg.solve([A[i] for i in range(len(lay))], [R[i] for i in range(len(lay))])
    vals = [s[0] for s in sol]
    return r, len(lay), _blocks_from_unknowns(pkg.chart, pkg.n, lay, vals)


def _blocks_equal(X, Y):
    return all((a - b).is_zero() for rx, ry in zip(X, Y) for a, b in zip(rx, ry))


def certify_hyperkahler(pkg, om=None):
    """Darboux property, closures, Omega_- = pi^* omega, quaternion relations and uniqueness."""
    n = pkg.n
    rep = VerificationReport("metric", {"n": n})
    rep.zero("mu = 0", pkg.mu)
    rep.zero("mu antisymmetric", [pkg.mu[i][j] + pkg.mu[j][i] for i in range(n) for j in range(n)])
    rep.zero("xi antisymmetric", [pkg.xi[i][j] + pkg.xi[j][i] for i in range(n) for j in range(n)])
    rep.zero("e antisymmetric", [pkg.e[i][j] + pkg.e[j][i] for i in range(2 * n) for j in range(2 * n)])
    rep.record("e nondegenerate", not linalg.det(pkg.e).is_zero())
    vert = _vertical(pkg.fs)
    target = _fibre_target(pkg)
    rep.zero("Omega_+ restricted to ker(pi) = sum dv_i ^ dq_i", _restrict(pkg.omega_plus, vert) - target,
             "half-wedge reading")
    rep.zero("d Omega_+ = 0", pkg.omega_plus.d())
    om = om or _cached_omega(n)
    pb = pullback_omega_form(pkg, om)
    rep.zero("Omega_- = pi^* omega", pkg.omega_minus - pb)
    rep.zero("d Omega_- = 0", pkg.omega_minus.d())
    rep.zero("d Omega_I = 0", pkg.omega_I.d(), "Omega_I = i g(I'., .)")
    rep.zero("d Omega_J = 0", pkg.omega_J.d())
    rep.zero("d Omega_K = 0", pkg.omega_K.d())
    _quaternion_checks(pkg, rep)
    basis, coframe = pkg.basis, pkg.coframe
    gJ = _frame_values_to_form(basis, coframe, linalg.matmul(pkg.quaternions["J"], pkg.G))
    gK = _frame_values_to_form(basis, coframe, linalg.matmul(pkg.quaternions["K'"], pkg.G))
    gN = _frame_values_to_form(basis, coframe, linalg.matmul(pkg.quaternions["N"], pkg.G))
    rep.zero("g(J., .) = 2 (Omega_+ + Omega_-)", gJ - pkg.omega_J * 2)
    rep.zero("g(K'., .) = -2 (Omega_+ - Omega_-)", gK + pkg.omega_K * 2)
    rep.zero("g(N., .) = 2 pi^* omega", gN - pb * 2)
    # uniqueness: both linear systems have full rank and the same solution
    r1, u1, sol1 = _solve_blocks(pkg, 0, vert, target)
    rep.record("fibre Darboux system has a unique solution", sol1 is not None, f"rank {r1} of {u1} unknowns")
    ab = pkg.fs.names.a + pkg.fs.names.b
    r2, u2, sol2 = _solve_blocks(pkg, 1, ab, pb)
    rep.record("Omega_- = pi^* omega system has a unique solution", sol2 is not None, f"rank {r2} of {u2} unknowns")
    if sol1 is not None:
        ok = all(_blocks_equal(X, Y) for X, Y in zip(sol1, (pkg.mu, pkg.nu, pkg.xi)))
        rep.record("fibre Darboux solution = matrix components", ok)
    if sol1 is not None and sol2 is not None:
        ok = all(_blocks_equal(X, Y) for X, Y in zip(sol1, sol2))
        rep.record("both systems give the same metric", ok)
    return rep


def _compose(*mats):
    """Matrix of Q1 o Q2 o ... (row convention: Q(E_K) = sum R[K][L] E_L)."""
    out = mats[-1]
    for R in reversed(mats[:-1]):
        out = linalg.matmul(out, R)
    return out


def _quaternion_checks(pkg, rep):
    Q = pkg.quaternions
    chart = pkg.chart
    m = 4 * pkg.n
    Id = linalg.identity(chart, m)

    def diff(X, Y, s=1):
        return [X[i][j] - Y[i][j] * s for i in range(m) for j in range(m)]

    rep.zero("I'^2 = Id  (I^2 = -Id)", diff(_compose(Q["I'"], Q["I'"]), Id))
    rep.zero("J^2 = -Id", diff(_compose(Q["J"], Q["J"]), Id, -1))
    rep.zero("K'^2 = Id  (K^2 = -Id)", diff(_compose(Q["K'"], Q["K'"]), Id))
    rep.zero("I' J K' = Id  (IJK = -Id)", diff(_compose(Q["I'"], Q["J"], Q["K'"]), Id))
    rep.zero("I' J = K'  (IJ = K)", diff(_compose(Q["I'"], Q["J"]), Q["K'"]))
    rep.zero("N = (J + K')/2", diff(Q["N"], [[(a + b) * Fraction(1, 2) for a, b in zip(r1, r2)] for r1, r2 in zip(Q["J"], Q["K'"])]))
    rep.zero("N^2 = 0", [x for row in _compose(Q["N"], Q["N"]) for x in row])
    G = pkg.G
    GT = linalg.transpose

    def herm(R, s):
        lhs = linalg.matmul(linalg.matmul(R, G), GT(R))
        return diff(lhs, G, s)

    rep.zero("g(JX, JY) = g(X, Y)", herm(Q["J"], 1))
    rep.zero("g(I'X, I'Y) = -g(X, Y)", herm(Q["I'"], -1))
    rep.zero("g(K'X, K'Y) = -g(X, Y)", herm(Q["K'"], -1))
    NG = linalg.matmul(Q["N"], G)
    rep.zero("g(NX, Y) = -g(X, NY)", [NG[i][j] + NG[j][i] for i in range(m) for j in range(m)])


def certify_comb_identities(fs=None, n=None, flip_comb3=False):
    """The three matrix identities behind d Omega_+ = 0, with T = Q G, Q_ik = q_i^(k-1)."""
    fs = fs or build_flows(n or 1)
    n = fs.n
    chart = fs.chart
    rep = VerificationReport("comb", {"n": n})
    q, v = fs.names.q, fs.names.v
    Bt, Bh, T = fs.Bt, fs.Bh, fs.Tmat
    Tinv = linalg.inverse(T)
    zero = chart.const(0)
    d = lambda e, c: e.diff(c)
    for k in range(n):
        for i in range(n):
            for j in range(i + 1, n):
                rep.zero(f"comb1 k={k + 1} i={i + 1} j={j + 1}", d(Bt[k][i], v[j]) - d(Bt[k][j], v[i]))
    TinvBh = linalg.matmul(Tinv, Bh)
    for k in range(n):
        for i in range(n):
            for j in range(i + 1, n):
                rep.zero(f"comb2 k={k + 1} i={i + 1} j={j + 1}", d(TinvBh[k][j], q[i]) - d(TinvBh[k][i], q[j]))
    s3 = -1 if flip_comb3 else 1
    dTinv = {i: [[d(x, q[i]) for x in row] for row in Tinv] for i in range(n)}
    for k in range(n):
        for i in range(n):
            for j in range(n):
                acc = zero
                for l in range(n):
                    for m in range(n):
                        if T[k][l] and dTinv[i][l][m] and Bt[m][j]:
                            acc = acc + T[k][l] * dTinv[i][l][m] * Bt[m][j]
                res = d(Bh[k][i], v[j]) + d(Bt[k][j], q[i]) + acc * s3
                rep.zero(f"comb3 k={k + 1} i={i + 1} j={j + 1}", res)
    # T = Q G with G constant in q
    Qm = [[chart.sym(q[i]) ** k for k in range(n)] for i in range(n)]
    Gm = linalg.matmul(linalg.inverse(Qm), T)
    rep.record("T = Q G with G independent of q", all(not Gm[a][b].diff(c) for a in range(n) for b in range(n) for c in q))
    Qinv = linalg.inverse(Qm)
    for i in range(n):
        dT = [[d(x, q[i]) for x in row] for row in T]
        lhs = linalg.matmul(dT, Tinv)
        rhs = linalg.matmul([[d(x, q[i]) for x in row] for row in Qm], Qinv)
        rep.zero(f"(d T/d q{i + 1}) T^-1 = (d Q/d q{i + 1}) Q^-1", [a - b for r1, r2 in zip(lhs, rhs) for a, b in zip(r1, r2)])
        # only row i survives; its entries are Lagrange-basis derivatives at q_i
        qi = chart.sym(q[i])
        for l in range(n):
            if l == i:
                expect = chart.const(0)
                for k in range(n):
                    if k != i:
                        expect = expect + 1 / (qi - chart.sym(q[k]))
            else:
                num, den = chart.const(1), chart.const(1)
                for k in range(n):
                    if k != l and k != i:
                        num = num * (qi - chart.sym(q[k]))
                    if k != l:
                        den = den * (chart.sym(q[l]) - chart.sym(q[k]))
                expect = num / den
            rep.zero(f"row {i + 1}, column {l + 1}: Lagrange derivative L{l + 1}'(q{i + 1})", lhs[i][l] - expect)
        rep.zero(f"rows other than {i + 1} vanish", [lhs[r][c] for r in range(n) if r != i for c in range(n)])
    return rep


def euler_variant(fs, b_weight=None):
    """The Euler field, optionally with every b-component replaced by ``b_weight`` * b (negative control)."""
    W = fs.W
    if b_weight is None:
        return W
    comps = {c: W.component(c) for c in fs.basis.labels}
    for b in fs.names.b:
        comps[b] = fs.chart.sym(b) * Fraction(b_weight)
    return VectorField(fs.basis, comps)


def certify_homothety(pkg, W=None):
    n = pkg.n
    fs = pkg.fs
    rep = VerificationReport("homothety", {"n": n})
    W = W or fs.W
    rep.zero("L_W g - g = 0", lie_derivative(pkg.g, W) - pkg.g)
    for i in range(n):
        for j in range(n):
            w = Fraction(2 * (i + 1) - 2 * n - 3, 2 * n + 3)
            rep.zero(f"W(A_{i + 1}{j + 1}) = {w} A", W(fs.A[i][j]) - fs.A[i][j] * w)
            w = Fraction(2 * n + 1, 2 * n + 3)
            rep.zero(f"W(Ct_{i + 1}{j + 1}) = {w} Ct", W(fs.Ct[i][j]) - fs.Ct[i][j] * w)
            w = Fraction(2 * n - 3, 2 * n + 3)
            rep.zero(f"W(Ch_{i + 1}{j + 1}) = {w} Ch", W(fs.Ch[i][j]) - fs.Ch[i][j] * w)
    return rep


def certify_hyper_lagrangian(pkg, leaf=None):
    """span{U_{i0'}, U_{i1'}} is integrable, isotropic for all three Kahler forms, and projects to span{d/db_i}."""
    n = pkg.n
    fs = pkg.fs
    rep = VerificationReport("foliation", {"n": n})
    leaf = leaf or (fs.U0 + fs.U1)
    for a in range(len(leaf)):
        for b in range(a + 1, len(leaf)):
            rep.record(f"[U_{a + 1}, U_{b + 1}] in span", in_span(leaf, lie_bracket(leaf[a], leaf[b])))
    for name, form in (("Omega_I", pkg.omega_I), ("Omega_J", pkg.omega_J), ("Omega_K", pkg.omega_K)):
        vals = [form(leaf[a], leaf[b]) for a in range(len(leaf)) for b in range(a + 1, len(leaf))]
        rep.zero(f"{name} vanishes on the leaf", vals)
    basis = fs.basis
    ab = set(fs.names.a + fs.names.b)
    proj = [VectorField(basis, {c: X.component(c) for c in basis.labels if c in ab}) for X in leaf]
    dbs = [VectorField(basis, {b: 1}) for b in fs.names.b]
    rep.record("d pi(leaf) within span{d/db_i}", all(in_span(dbs, X) for X in proj))
    rep.record("d pi(leaf) spans span{d/db_i}", linalg.rank([X.components() for X in proj]) == n)
    return rep


def beta_surface_check(pkg):
    """Brackets of sigma^i U_{i0'} and sigma^i U_{i1'} for symbolic constants sigma^i."""
    n = pkg.n
    fs = pkg.fs
    rep = VerificationReport("beta-surfaces", {"n": n})
    names = tuple(f"s{i + 1}" for i in range(n))
    ext = _sigma_chart(fs, names)
    basis = CoordinateBasis(ext, fs.basis.labels)
    lift = lambda X: VectorField(basis, {c: _lift(ext, X.component(c)) for c in fs.basis.labels})
    sig = ext.syms(*names)
    X0 = VectorField(basis, {})
    X1 = VectorField(basis, {})
    for i in range(n):
        X0 = X0 + lift(fs.U0[i]) * sig[i]
        X1 = X1 + lift(fs.U1[i]) * sig[i]
    br = lie_bracket(X0, X1)
    ok = in_span([X0, X1], br)
    witness = None
    if not ok:
        witness = "; ".join(f"d/d{c}: {br.component(c)}" for c in fs.names.v if br.component(c))
    rep.record("[sigma U_0', sigma U_1'] in span{sigma U_0', sigma U_1'}", ok,
               "constant sigma", witness)
    return rep


def _sigma_chart(fs, names):
    from .charts import xn_chart

    return xn_chart(fs.n, None, extra=names)


def _lift(ext, e):
    from .symkernel import compose

    return compose(e, ext, {})


def dual_trivialisation_check(pkg):
    """Compare the solved coframe with the closed-form dual trivialisation; mismatches are noted, not failed."""
    n = pkg.n
    fs = pkg.fs
    rep = VerificationReport("dual-trivialisation", {"n": n})
    basis = fs.basis
    A, Ct, Ch, Bt, Bh, T = fs.A, fs.Ct, fs.Ch, fs.Bt, fs.Bh, fs.Tmat
    Ai, Cti, Ti = linalg.inverse(A), linalg.inverse(Ct), linalg.inverse(T)
    nm = fs.names
    one = lambda c: Form.basis_one_form(basis, c)
    R = range(n)
    printed = {}
    for i in R:
        f = Form.zero(basis, 1)
        for j in R:
            f = f + one(nm.v[j]) * Ai[j][i]
            for k in R:
                for l in R:
                    f = f - one(nm.q[j]) * (Ai[k][i] * Ch[l][k] * Cti[j][l])
                    f = f - one(nm.a[j]) * (Ai[k][i] * Bh[l][k] * Ti[j][l])
                    for m in R:
                        for r in R:
                            f = f + one(nm.a[j]) * (Ai[k][i] * Ch[l][k] * Cti[m][l] * Bt[r][m] * Ti[j][r])
        printed[("U", 0, i)] = f
        printed[("U", 1, i)] = one(nm.b[i])
        f = Form.zero(basis, 1)
        for j in R:
            f = f + one(nm.q[j]) * Cti[j][i]
            for k in R:
                for l in R:
                    f = f - one(nm.a[j]) * (Cti[k][i] * Bt[l][k] * Ti[j][l])
        printed[("V", 0, i)] = f
        printed[("V", 1, i)] = sum((one(nm.a[j]) * Ti[j][i] for j in R), Form.zero(basis, 1))
    order = [("U", 0, i) for i in R] + [("V", 0, i) for i in R] + [("U", 1, i) for i in R] + [("V", 1, i) for i in R]
    for K, key in enumerate(order):
        diff = printed[key] - pkg.coframe[K]
        label = f"{key[0]}^{key[2] + 1}{key[1]}'"
        if diff.is_zero():
            rep.record(f"{label} matches the closed form", True)
        else:
            rep.note(f"{label}: closed form differs from the solved coframe by {diff}")
    return rep


# -- n = 1: the cubic oscillator metric -----------------------------------------


def pi1_metric():
    """The n = 1 metric on (a, b, q, r) with p^2 = q^3 + a q + b."""
    C = legacy_chart()
    B = CoordinateBasis(C)
    P = C.parse
    d = {c: Form.basis_one_form(B, c) for c in B.labels}
    first = (d["a"] * P("r*(3*q^2*r + a*r - 2*q*p)/(2*p^3)") - d["b"] * P("r/(2*p^2)")
             - d["q"] * P("q/(2*p)") + d["r"])
    second = d["a"] * P("r/(2*p^2)") + d["q"] * P("1/(2*p)")
    return sym_product(first, d["a"]) - sym_product(second, d["b"])


def met58_metric():
    """The same metric on (a, p, q, r)."""
    M = apqr_chart()
    B = CoordinateBasis(M)
    P = M.parse
    d = {c: Form.basis_one_form(B, c) for c in B.labels}
    first = (d["a"] * P("r*(3*q^2*r + a*r - q*p)/(2*p^3)") - d["p"] * P("r/p")
             + d["q"] * P("(3*q^2*r + a*r - p*q)/(2*p^2)") + d["r"])
    second = d["a"] * P("r/(2*p^2)") + d["q"] * P("1/(2*p)")
    third = d["p"] * P("2*p") - d["a"] * P("q") - d["q"] * P("a + 3*q^2")
    return sym_product(first, d["a"]) - sym_product(second, third)


def cubic_flows_check(drop=None):
    """n = 1 legacy frame: commuting flows, preserved volume, nu^2 = 1 and the Lax metric equals the printed one."""
    rep = VerificationReport("cubic-flows", {"n": 1})
    C = legacy_chart()
    basis = CoordinateBasis(C)
    P = C.parse
    lam = C.sym("lam")
    l1, l2, L2 = legacy_frame()
    rep.zero("[L1, L2] = 0", lie_bracket(l1, L2))
    E10 = VectorField(basis, {"r": -1})
    E11 = VectorField(basis, {"b": 1, "r": P("r/(2*p^2)")})
    E20 = VectorField(basis, {"r": P("-q"), "q": P("-2*p")})
    E21 = VectorField(basis, {"a": 1, "q": P("-r/p"), "r": P("-r*(3*q^2*r + a*r - q*p)/(2*p^3)")})
    rep.zero("L1 = E10' + lam E11'", l1 - (E10 + E11 * lam))
    rep.zero("L2 = E20' + lam E21'", L2 - (E20 + E21 * lam))
    vol = Form(basis, 4, {("b", "a", "q", "r"): P("1/(2*p)")})
    for name, E in (("E10'", E10), ("E11'", E11), ("E20'", E20), ("E21'", E21)):
        rep.zero(f"L_{name} vol = 0", lie_derivative(vol, E))
    frame = [E10, E11, E20, E21]
    nu2 = vol(*frame)
    rep.zero("nu^2 = 1", nu2 - 1)
    cof = dual_coframe(frame)
    g = (sym_product(cof[0], cof[3]) - sym_product(cof[1], cof[2])) * nu2
    ref = pi1_metric()
    rep.zero("Lax metric equals the printed n = 1 metric", g - ref)
    rep.zero("Lax metric equals minus the printed n = 1 metric", g + ref)
    return rep


def _golden_json(name):
    return json.loads(resources.files("heavenly_forge").joinpath("golden", name).read_text())


def pi1_comparison(pkg=None):
    """g^omega for n = 1 after v = r/(2p) is a constant multiple of the printed metric."""
    rep = VerificationReport("pi1", {"n": 1})
    pkg = pkg or build_distinguished_metric(1)
    C = legacy_chart()
    images = {"v": C.parse("r/(2*p)"), "p": C.sym("p")}
    g = change_chart(pkg.g, CoordinateBasis(C), images)
    ref = pi1_metric()
    c = None
    for key, v in ref.comps.items():
        if v:
            c = g.comps.get(key, C.const(0)) / v
            break
    const = c.as_constant() if c is not None else None
    rep.record("proportionality factor is a rational constant", const is not None, f"c = {const}")
    if const is not None:
        rep.zero("g^omega - c * g_printed = 0", g - ref * const)
        pinned = Fraction(_golden_json("pi1.json")["constant"])
        rep.equal("c matches the pinned value", const, pinned)
    rep.params["constant"] = str(const)
    return rep


def weyl_check():
    """|Weyl|^2 of the (a, p, q, r) metric against 96 (3q^2 + a)^2 / p^6; also the chart change from (a, b, q, r)."""
    rep = VerificationReport("weyl", {"n": 1})
    M = apqr_chart()
    g58 = met58_metric()
    g = change_chart(pi1_metric(), CoordinateBasis(M), {"b": M.parse("p^2 - q^3 - a*q"), "p": M.sym("p")})
    rep.zero("(a, b, q, r) metric in (a, p, q, r) coordinates", g - g58)
    inv = curvature_invariants(g58)
    rep.record("Ricci flat", inv["ricci_flat"])
    rep.zero("scalar curvature = 0", inv["scalar"])
    target = M.parse("96*(3*q^2 + a)^2/p^6")
    ratio = inv["weyl_norm"] / target
    c = ratio.as_constant()
    rep.record("|Weyl|^2 / (96 (3q^2 + a)^2 / p^6) is constant", c is not None, f"ratio = {ratio}")
    if c is not None:
        pinned = Fraction(_golden_json("pi1.json")["weyl_constant"])
        rep.equal("ratio matches the pinned constant", c, pinned)
        rep.record("ratio positive", c > 0)
    return rep
