import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import same, to_sympy
from heavenly_forge.diffgeo import (
    CoordinateBasis,
    DegenerateMetricError,
    Form,
    JacobianError,
    SingularFrameError,
    StructureCoframe,
    SymmetricTensor,
    VectorField,
    change_chart,
    christoffel,
    dual_coframe,
    interior,
    lie_bracket,
    lie_derivative,
    ricci,
    riemann,
    scalar_curvature,
    sym_product,
    weyl,
)
from heavenly_forge.symkernel import ChartMismatchError, ChartSpec

C = ChartSpec("xyz3", ["x", "y", "z"])
B = CoordinateBasis(C)

monomial = st.tuples(st.integers(-3, 3), st.integers(0, 2), st.integers(0, 2), st.integers(0, 2)).map(
    lambda t: f"{t[0]}*x^{t[1]}*y^{t[2]}*z^{t[3]}"
)
coef = st.lists(monomial, min_size=1, max_size=3).map(lambda ms: C.parse(" + ".join(ms)))


def one_form(cs):
    return Form(B, 1, {(i,): c for i, c in enumerate(cs)})


@settings(max_examples=60)
@given(st.lists(coef, min_size=3, max_size=3))
def test_d_squared_vanishes(cs):
    a = one_form(cs)
    assert a.d().d().is_zero()
    assert Form.scalar(B, cs[0]).d().d().is_zero()


@settings(max_examples=40)
@given(st.lists(coef, min_size=9, max_size=9))
def test_jacobi_identity(cs):
    X, Y, Z = (VectorField(B, cs[3 * k:3 * k + 3]) for k in range(3))
    total = lie_bracket(X, lie_bracket(Y, Z)) + lie_bracket(Y, lie_bracket(Z, X)) + lie_bracket(Z, lie_bracket(X, Y))
    assert total.is_zero()


@settings(max_examples=40)
@given(st.lists(coef, min_size=6, max_size=6))
def test_cartan_formula_on_one_forms(cs):
    X = VectorField(B, cs[:3])
    a = one_form(cs[3:])
    # L_X a evaluated on Y equals X(a(Y)) - a([X, Y]) for any Y
    L = lie_derivative(a, X)
    for i in range(3):
        Y = VectorField(B, {i: C.parse("x*y + z")})
        assert L(Y) == X(a(Y)) - a(lie_bracket(X, Y))


@settings(max_examples=40)
@given(st.lists(coef, min_size=6, max_size=6))
def test_leibniz_for_wedge(cs):
    a, b = one_form(cs[:3]), one_form(cs[3:])
    assert (a ^ b).d() == (a.d() ^ b) - (a ^ b.d())
    assert (a ^ b) == -(b ^ a)


def test_form_evaluation_determinant_convention():
    dx, dy = Form.basis_one_form(B, "x"), Form.basis_one_form(B, "y")
    ex, ey = VectorField(B, {"x": 1}), VectorField(B, {"y": 1})
    assert (dx ^ dy)(ex, ey) == 1
    assert (dx ^ dy)(ey, ex) == -1
    assert interior(ex, dx ^ dy) == dy


def test_sym_product_is_half_sum():
    dx, dy = Form.basis_one_form(B, "x"), Form.basis_one_form(B, "y")
    g = sym_product(dx, dy)
    assert g.component("x", "y") == C.const(1) / 2
    assert sym_product(dx, dx).component(0, 0) == 1


def test_lie_derivative_of_metric_against_sympy():
    x, y, z = sp.symbols("x y z")
    G = [[C.parse("1 + x^2"), C.parse("y"), C.const(0)], [C.parse("y"), C.parse("z"), C.const(0)], [C.const(0), C.const(0), C.const(1)]]
    g = SymmetricTensor.from_matrix(B, G)
    X = VectorField(B, [C.parse("x*y"), C.parse("z"), C.parse("x^2")])
    L = lie_derivative(g, X)
    Gs = sp.Matrix(3, 3, lambda i, j: to_sympy(G[i][j]))
    Xs = [x * y, z, x ** 2]
    v = (x, y, z)
    for i in range(3):
        for j in range(3):
            want = sum(Xs[k] * sp.diff(Gs[i, j], v[k]) for k in range(3))
            want += sum(Gs[k, j] * sp.diff(Xs[k], v[i]) + Gs[i, k] * sp.diff(Xs[k], v[j]) for k in range(3))
            assert same(to_sympy(L.component(i, j)), want)


def test_change_chart_pulls_back_metric():
    P = ChartSpec("polar-ish", ["u", "v", "z"])
    flat = SymmetricTensor(B, {(0, 0): 1, (1, 1): 1, (2, 2): 1})
    images = {"x": P.parse("u + v"), "y": P.parse("u - v")}
    h = change_chart(flat, CoordinateBasis(P), images)
    assert h.component("u", "u") == 2 and h.component("v", "v") == 2 and h.component("u", "v") == 0
    with pytest.raises(JacobianError):
        change_chart(flat, CoordinateBasis(P), {"x": P.parse("u + v"), "y": P.parse("2*u + 2*v")})


def test_dual_coframe_and_singular_frame():
    E = [VectorField(B, [1, C.parse("x"), 0]), VectorField(B, [0, 1, 0]), VectorField(B, [0, C.parse("y"), 1])]
    th = dual_coframe(E)
    for a in range(3):
        for b in range(3):
            assert th[a](E[b]) == (1 if a == b else 0)
    bad = [VectorField(B, [1, 0, 0]), VectorField(B, [C.parse("x"), 0, 0]), VectorField(B, [0, 0, 1])]
    with pytest.raises(SingularFrameError):
        dual_coframe(bad)
    near = [VectorField(B, [1, 0, 0]), VectorField(B, [0, C.parse("x - 1"), 0]), VectorField(B, [0, 0, 1])]
    with pytest.raises(SingularFrameError, match="x - 1"):
        dual_coframe(near, specialize={"x": C.const(1)})


def test_basis_mismatch_is_rejected():
    other = CoordinateBasis(ChartSpec("uvw", ["u", "v", "w"]))
    with pytest.raises(ChartMismatchError):
        Form.basis_one_form(B, 0) ^ Form.basis_one_form(other, 0)


# -- structure coframes --------------------------------------------------------------

# left-invariant coframe of the Heisenberg group: d th3 = -th1 ^ th2
H = ChartSpec("heis", ["a", "b", "c"])


def _heis():
    e1 = lambda f: f.diff("a")
    e2 = lambda f: f.diff("b") + H.sym("a") * f.diff("c")
    e3 = lambda f: f.diff("c")
    return StructureCoframe(H, ["t1", "t2", "t3"], [e1, e2, e3], [{}, {}, {(0, 1): -1}])


def test_structure_coframe_bracket_and_d():
    S = _heis()
    e1, e2, e3 = (VectorField(S, {i: 1}) for i in range(3))
    assert lie_bracket(e1, e2) == e3
    assert lie_bracket(e1, e3).is_zero()
    t3 = Form.basis_one_form(S, 2)
    assert t3.d() == -(Form.basis_one_form(S, 0) ^ Form.basis_one_form(S, 1))
    assert t3.d().d().is_zero()
    with pytest.raises(NotImplementedError):
        lie_derivative(SymmetricTensor(S, {(0, 0): 1}), e1)


# -- curvature -----------------------------------------------------------------------


def _sympy_curvature(Gs, v):
    n = len(v)
    ginv = Gs.inv()
    Gam = [[[sum(ginv[k, m] * (sp.diff(Gs[m, i], v[j]) + sp.diff(Gs[m, j], v[i]) - sp.diff(Gs[i, j], v[m])) for m in range(n)) / 2
             for j in range(n)] for i in range(n)] for k in range(n)]
    R = [[[[sp.diff(Gam[i][l][j], v[k]) - sp.diff(Gam[i][k][j], v[l])
            + sum(Gam[i][k][m] * Gam[m][l][j] - Gam[i][l][m] * Gam[m][k][j] for m in range(n))
            for l in range(n)] for k in range(n)] for j in range(n)] for i in range(n)]
    Ric = sp.Matrix(n, n, lambda j, l: sum(R[i][j][i][l] for i in range(n)))
    scal = sum(ginv[i, j] * Ric[i, j] for i in range(n) for j in range(n))
    return Gam, R, Ric, sp.simplify(scal)


def test_curvature_against_sympy():
    x, y, z = sp.symbols("x y z")
    G = [[C.parse("1 + y^2"), C.const(0), C.const(0)], [C.const(0), C.parse("x^2 + 1"), C.parse("z")], [C.const(0), C.parse("z"), C.const(2)]]
    g = SymmetricTensor.from_matrix(B, G)
    Gs = sp.Matrix(3, 3, lambda i, j: to_sympy(G[i][j]))
    Gam, R, Ric, scal = _sympy_curvature(Gs, (x, y, z))
    ours = christoffel(g)
    for k in range(3):
        for i in range(3):
            for j in range(3):
                assert same(to_sympy(ours[k][i][j]), Gam[k][i][j])
    Rm = riemann(g)
    assert same(to_sympy(Rm[0][1][0][1]), R[0][1][0][1])
    Rc = ricci(g)
    for i in range(3):
        for j in range(3):
            assert same(to_sympy(Rc[i][j]), Ric[i, j])
    assert same(to_sympy(scalar_curvature(g)), scal)


def test_weyl_vanishes_for_conformally_flat_metric():
    F = ChartSpec("r4", ["x", "y", "z", "w"])
    f = F.parse("1/(1 + x^2 + y^2 + z^2 + w^2)^2")
    g = SymmetricTensor(CoordinateBasis(F), {(i, i): f for i in range(4)})
    W = weyl(g)
    assert all(W[a][b][c][d].is_zero() for a in range(4) for b in range(4) for c in range(4) for d in range(4))
    # round sphere: scalar curvature 4*n*(n-1)/4 with this normalisation
    assert scalar_curvature(g) == 48


def test_degenerate_metric():
    g = SymmetricTensor(B, {(0, 0): 1, (1, 1): 1})
    with pytest.raises(DegenerateMetricError):
        christoffel(g)
