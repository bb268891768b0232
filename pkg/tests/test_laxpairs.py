import sympy as sp

from conftest import same, to_sympy
from heavenly_forge.diffgeo import VectorField, lie_bracket
from heavenly_forge.laxpairs import (
    appendix_commutator_check,
    appendix_suite,
    build_metricpi,
    lax_distribution_check,
    lax_frame,
    matrix_commutator,
    matrix_to_frame,
    metricpi_check,
    painleve_lax_pair,
    sigma_coframe,
)

t, lam = sp.symbols("t lam")
Y, Z = sp.Function("y")(t), sp.Function("z")(t)


def sympy_pair():
    P = sp.Matrix([[-Z, Y ** 2 + t / 2], [-4 * Y, Z]]) + lam * sp.Matrix([[0, Y], [4, 0]]) + lam ** 2 * sp.Matrix([[0, 1], [0, 0]])
    Q = sp.Matrix([[0, Y], [2, 0]]) + lam * sp.Matrix([[0, sp.Rational(1, 2)], [0, 0]])
    return P, Q


def test_commutator_sympy_oracle():
    P, Q = sympy_pair()
    com = sp.diff(P, t) - sp.diff(Q, lam) + P * Q - Q * P
    on_shell = com.subs({sp.Derivative(Y, t): Z, sp.Derivative(Z, t): 6 * Y ** 2 + t}).applyfunc(sp.expand)
    assert on_shell == sp.zeros(2, 2)
    # and the flatness conditions are exactly y' = z, z' = 6y^2 + t
    yd, zd = sp.symbols("yd zd")
    flat = com.subs({sp.Derivative(Y, t): yd, sp.Derivative(Z, t): zd}).applyfunc(sp.expand)
    eqs = {e for x in flat for e in sp.Poly(x, lam).coeffs()}
    sol = sp.solve(list(eqs), [yd, zd], dict=True)
    assert sol == [{yd: Z, zd: 6 * Y ** 2 + t}]


def test_kernel_commutator_agrees_with_sympy():
    pair = painleve_lax_pair()
    com = matrix_commutator(pair)
    P, Q = sympy_pair()
    yd, zd = sp.symbols("yd zd")
    ref = (sp.diff(P, t) - sp.diff(Q, lam) + P * Q - Q * P).subs({sp.Derivative(Y, t): yd, sp.Derivative(Z, t): zd})
    ref = ref.subs({Y: sp.Symbol("y"), Z: sp.Symbol("z")})
    for i in range(2):
        for j in range(2):
            assert same(to_sympy(com[i][j]), ref[i, j])


def test_appendix_commutator_and_dropped_t():
    assert appendix_commutator_check().passed
    rep = appendix_commutator_check(drop_t=True)
    bad = [c for c in rep.checks if not c.passed]
    assert [c.name for c in bad] == ["[M1, M2] = 0 after y' = z, z' = 6y^2"]
    assert bad[0].witness


def test_structure_constants():
    b = sigma_coframe()
    l1, l2, l3 = (VectorField(b, {a: 1}) for a in ("s1", "s2", "s3"))
    assert lie_bracket(l1, l2) == l2
    assert lie_bracket(l1, l3) == -l3
    assert lie_bracket(l2, l3) == l1 * 2
    assert sigma_coframe() is b


def test_matrix_to_frame_is_a_lie_algebra_map():
    """[m(A), m(B)] = m([A, B]) on sl2 (constant matrices)."""
    b = sigma_coframe()
    c = b.chart
    A = sp.Matrix([[1, 2], [3, -1]])
    B = sp.Matrix([[0, 5], [-1, 0]])
    conv = lambda M: [[c.const(int(M[i, j])) for j in range(2)] for i in range(2)]
    lhs = lie_bracket(matrix_to_frame(b, conv(A)), matrix_to_frame(b, conv(B)))
    assert lhs == matrix_to_frame(b, conv(A * B - B * A))


def test_lax_distribution():
    rep = lax_distribution_check()
    bad = [c.name for c in rep.checks if not c.passed]
    assert bad == ["printed form: E_{i1'} with f1 = -1, f2 = 0 span a Frobenius distribution"]
    # with z' = 6y^2 only the distribution no longer closes
    assert not lax_distribution_check("6*y^2").checks[0].passed


def test_metric_sympy_oracle():
    """16 z (E^10'.E^21' - E^11'.E^20') by plain linear algebra in sympy."""
    y, z = sp.symbols("y z")
    # rows: E10', E11', E20', E21' in the basis (l1, l2, l3, d/dt)
    F = sp.Matrix([
        [-2 * z, y ** 2 + t / 2, -4 * y, 0],
        [0, -y, 0, 2],
        [0, -2 * y, -4, 2],
        [0, -1, 0, 0],
    ])
    cof = F.inv()  # column a holds the coframe element E^a
    sym = lambda u, v: (u * v.T + v * u.T) / 2
    g = 16 * z * (sym(cof[:, 0], cof[:, 3]) - sym(cof[:, 1], cof[:, 2]))
    g = g.applyfunc(sp.simplify)
    ours, _ = build_metricpi()
    labels = ("s1", "s2", "s3", "dt")
    for i in range(4):
        for j in range(4):
            assert same(to_sympy(ours.component(labels[i], labels[j])), g[i, j])
    # frozen values: coefficient of s1.s3 is -6y (twice the off-diagonal entry)
    assert sp.simplify(2 * g[0, 2] + 6 * y) == 0
    assert sp.simplify(2 * g[0, 1] - 8) == 0
    assert sp.simplify(g[0, 0] - (12 * y ** 2 + 2 * t) / z) == 0


def test_frame_derived_from_matrices():
    b = sigma_coframe()
    frame, fs = lax_frame(b)
    c = b.chart
    assert frame[1] == VectorField(b, {"dt": 2, "s2": -c.sym("y")})
    assert frame[3] == VectorField(b, {"s2": -1})
    assert fs[0] == -1 and fs[1] == 0


def test_metricpi_check_flags_only_printed_constant():
    rep = metricpi_check()
    bad = [c.name for c in rep.checks if not c.passed]
    assert bad == ["printed form: s1.s3 coefficient is -6"]
    assert rep.params["nu^2"] == "16*z"


def test_appendix_suite_failures_are_printed_forms():
    rep = appendix_suite()
    bad = [c for c in rep.checks if not c.passed]
    assert len(bad) == 2 and all("printed form" in c.name for c in bad)
