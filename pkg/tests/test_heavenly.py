from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import same, to_sympy
from heavenly_forge.heavenly import (
    HeavenlyPotential,
    LegendreDegenerateError,
    QuadReduction,
    eta,
    heavenly1_check,
    heavenly2_residual,
    heavenly_suite,
    hyper_lagrangian_instance,
    infinitesimal_limit_check,
    integration_slot,
    legendre_equivalence,
    null_potential_check,
    pprime_identity,
    pprime_seeds,
    quad_chart,
    quad_decomposition_check,
    quad_reduction_residuals,
    sparling_tod_suite,
    timmetric_suite,
    toml_recursion,
    toml_reduction,
    toml_series_suite,
    toml_table,
    weierstrass_p,
)
from heavenly_forge.symkernel import ChartSpec, SeriesError

z, w, x, y = sp.symbols("z w x y")


def sympy_residual(theta, xs, ys):
    """R_ij for a sympy Theta, with eta = [[0, I], [-I, 0]]."""
    m = len(xs)
    et = sp.Matrix(eta(m // 2))
    H = sp.Matrix(m, m, lambda i, j: sp.diff(theta, ys[i], ys[j]))
    return sp.Matrix(m, m, lambda i, j: sp.diff(theta, ys[i], xs[j]) - sp.diff(theta, ys[j], xs[i]) - (H * et * H.T)[i, j])


def sympy_quad(A, B, C):
    Ay, By = sp.diff(A, y), sp.diff(B, y)
    return (2 * A * sp.diff(A, y, 2) - 4 * Ay ** 2 + sp.diff(Ay, z),
            2 * A * sp.diff(By, y) - 4 * By * Ay + sp.diff(By, z) - sp.diff(A, w),
            2 * A * sp.diff(C, y, 2) - 4 * By ** 2 + sp.diff(C, y, z) - 2 * sp.diff(B, w))


# -- heavenly2 ---------------------------------------------------------------------------

mono = st.tuples(st.integers(-3, 3), *(st.integers(0, 2) for _ in range(4))).map(
    lambda t: f"{t[0]}*x1^{t[1]}*x2^{t[2]}*y1^{t[3]}*y2^{t[4]}")


@settings(max_examples=30)
@given(st.lists(mono, min_size=1, max_size=4))
def test_heavenly2_residual_matches_sympy(terms):
    pot = HeavenlyPotential.pleb2(1, " + ".join(terms))
    R = heavenly2_residual(pot)
    xs, ys = sp.symbols("x1 x2"), sp.symbols("y1 y2")
    want = sympy_residual(to_sympy(pot.theta), xs, ys)
    for i in range(2):
        for j in range(2):
            assert same(to_sympy(R[i][j]), want[i, j])


@pytest.mark.parametrize("n", [1, 2])
def test_heavenly_suite(n):
    rep = heavenly_suite(n)
    assert rep.passed, rep.to_text()


def test_quad_decomposition_sympy_oracle():
    A, B, C = (sp.Function(s)(z, w, y) for s in "ABC")
    theta = A * x ** 2 + 2 * B * x + C
    R = sympy_residual(theta, (z, w), (x, y))
    qa, qb, qc = sympy_quad(A, B, C)
    assert same(R[0, 1], -(x ** 2 * qa + 2 * x * qb + qc))
    assert quad_decomposition_check().passed


def test_quad_residuals_opaque_match_sympy():
    chart = quad_chart((("A", 3), ("B", 3), ("C", 3)))
    args = chart.syms("z", "w", "y")
    qr = QuadReduction(*(chart.apply(s, *args) for s in "ABC"))
    ours = quad_reduction_residuals(qr)
    want = sympy_quad(*(sp.Function(s)(z, w, y) for s in "ABC"))
    for o, wv in zip(ours, want):
        assert same(to_sympy(o), wv)


def test_cubic_term_breaks_hyper_lagrangian():
    assert hyper_lagrangian_instance(1).passed
    rep = hyper_lagrangian_instance(1, cubic=True)
    assert not rep.passed


def test_null_potential_sympy_oracle():
    x1, x2, y1, y2, c = sp.symbols("x1 x2 y1 y2 c")
    theta = c / (2 * (x1 * y2 - x2 * y1))
    assert sympy_residual(theta, (x1, x2), (y1, y2)).applyfunc(sp.simplify) == sp.zeros(2, 2)
    assert null_potential_check().passed


# -- first heavenly system ------------------------------------------------------------------


def test_heavenly1_explicit_u_sympy_oracle():
    """The explicit potential used by the strengthened-projectability suite, checked in sympy."""
    u1, u2, ut1, ut2 = sp.symbols("u1 u2 ut1 ut2")
    U = ut2 ** 2 * u1 / (2 * u2) + ut1 * u2 ** 2 / (2 * ut2) + u1 ** 3 * u2 + ut2 * u2 ** 2 + ut1 ** 2 * ut2
    zs, zts = (u1, u2), (ut2, ut1)
    M = sp.Matrix(2, 2, lambda k, i: sp.diff(U, zs[k], zts[i]))
    et = sp.Matrix(eta(1))
    assert (M.T * et * M - et).applyfunc(sp.simplify) == sp.zeros(2, 2)


def test_heavenly1_rejects_missing_input():
    C = ChartSpec("zz", ["z1", "z2", "zt1", "zt2"])
    with pytest.raises(ValueError):
        heavenly1_check(C, ("z1", "z2"), ("zt1", "zt2"))


def test_timmetric_corrected_passes_printed_fails():
    rep = timmetric_suite()
    status = {c.name: c.passed for c in rep.checks}
    corrected = [k for k in status if k.startswith("sign-corrected") or k.startswith("explicit U")]
    printed = [k for k in status if k.startswith("printed form")]
    assert corrected and all(status[k] for k in corrected)
    assert not all(status[k] for k in printed)
    bad = [c for c in rep.checks if not c.passed]
    assert all(c.name.startswith("printed form") and c.witness for c in bad)


# -- the series solution ------------------------------------------------------------------


def test_toml_satisfies_quad_equations_sympy_oracle():
    chart = quad_chart()
    qr = toml_reduction(chart)
    A, B, C = (to_sympy(e) for e in (qr.A, qr.B, qr.C))
    qa, qb, qc = (sp.expand(e) for e in sympy_quad(A, B, C))
    for res, top in ((qa, 15), (qb, 14), (qc, 13)):
        poly = sp.Poly(res, y)
        assert all(poly.coeff_monomial(y ** k) == 0 for k in range(top))
    # Aquad is even in y: its first surviving term is y^16
    assert sp.Poly(qa, y).coeff_monomial(y ** 16) == sp.Rational(39, 385) * w


def test_toml_parity_and_weights():
    A = to_sympy(toml_reduction().A)
    assert same(A.subs(y, -y), -A)
    # W = 4/5 w d_w + 6/5 z d_z - 1/5 y d_y, W(A) = -7/5 A
    W = lambda f: sp.Rational(4, 5) * w * sp.diff(f, w) + sp.Rational(6, 5) * z * sp.diff(f, z) - sp.Rational(1, 5) * y * sp.diff(f, y)
    assert same(W(A), -sp.Rational(7, 5) * A)


def test_toml_series_suite():
    rep = toml_series_suite(16)
    assert rep.passed, rep.to_text()
    with pytest.raises(SeriesError):
        toml_series_suite(17)


def test_recursion_without_seeds_differs_only_at_slots():
    chart = quad_chart()
    gen = toml_recursion(12, {}, chart)
    tab = toml_table()
    # A: y^7 is a slot (k = 0); without a seed its coefficient is zero
    assert integration_slot("A", 7) == 0
    assert not gen["A"].get(7)
    assert chart.parse(tab["A"][7]) == Fraction(-1, 28)
    assert integration_slot("A", 8) is None


def test_bad_seed_rejected():
    chart = quad_chart()
    with pytest.raises(SeriesError):
        toml_recursion(12, {("A", 7): chart.sym("z")}, chart)
    with pytest.raises(SeriesError):
        toml_recursion(12, {("A", 8): 1}, chart)
    with pytest.raises(SeriesError):
        toml_recursion(12, {("A", 11): chart.sym("w") ** 2}, chart)


# -- Weierstrass ------------------------------------------------------------------------------


def sympy_wp(g2, g3, K):
    """p = y^-2 + sum c_k y^(2k) with coefficients fixed by p'^2 = 4 p^3 - g2 p - g3."""
    cs = sp.symbols(f"c1:{K + 1}")
    p = y ** -2 + sum(c * y ** (2 * k) for k, c in enumerate(cs, 1))
    ode = sp.expand((sp.diff(p, y) ** 2 - 4 * p ** 3 + g2 * p + g3) * y ** 6)
    sol = sp.solve([ode.coeff(y, e) for e in range(4, 2 * K + 5, 2)][:K], cs, dict=True)[0]
    return p.subs(sol)


def test_weierstrass_series_matches_sympy():
    chart = quad_chart()
    g2, g3 = chart.sym("w") * -4, chart.sym("z") * -4
    P = weierstrass_p(chart, g2, g3, terms=6)
    ref = sympy_wp(-4 * w, -4 * z, 6)
    for k in range(1, 7):
        assert same(to_sympy(P.coefficient(2 * k)), ref.coeff(y, 2 * k))


def test_pprime_identity_against_sympy():
    """A_y from the printed truncation equals -1/p'(y; -4w, -4z)^2 through y^14."""
    A = to_sympy(toml_reduction().A)
    ref = sympy_wp(-4 * w, -4 * z, 8)
    target = sp.series(-1 / sp.diff(ref, y) ** 2, y, 0, 15).removeO()
    assert same(sp.expand(sp.diff(A, y)), sp.expand(target))
    swapped = sympy_wp(-4 * z, -4 * w, 8)
    target2 = sp.series(-1 / sp.diff(swapped, y) ** 2, y, 0, 15).removeO()
    # the printed invariant order disagrees at y^10
    diff = sp.Poly(sp.expand(sp.diff(A, y) - target2), y)
    assert all(diff.coeff_monomial(y ** k) == 0 for k in range(10))
    assert diff.coeff_monomial(y ** 10) != 0


def test_pprime_suite_reports_printed_order_failure():
    rep = pprime_identity(15)
    status = {c.name: c.passed for c in rep.checks}
    assert status["A_y = -1/p'(y; -4w, -4z)^2 through y^14"]
    assert not status["printed form: A_y = -1/p'(y; -4z, -4w)^2 through y^14"]
    assert [c.name for c in rep.checks if not c.passed] == ["printed form: A_y = -1/p'(y; -4z, -4w)^2 through y^14"]
    with pytest.raises(SeriesError):
        pprime_identity(5)


def test_pprime_seeds_are_printed_values():
    seeds = pprime_seeds(16)
    chart = quad_chart()
    assert seeds[("A", 7)] == Fraction(-1, 28)
    assert seeds[("A", 11)] == chart.parse("w/110")
    assert seeds[("A", 15)] == chart.parse("-w^2/300")


# -- Legendre ------------------------------------------------------------------------------


def test_legendre_opaque_and_sympy_pde():
    C = ChartSpec("zwp", ["z", "w", "p"], functions={"F": 3})
    rep = legendre_equivalence(C.apply("F", *C.syms("z", "w", "p")))
    assert rep.passed
    p = sp.Symbol("p")
    F = sp.Function("F")(z, w, p)
    want = 2 * (F - p * sp.diff(F, p)) + 4 * p ** 2 * sp.diff(F, p, 2) + sp.diff(F, p, z)
    assert same(to_sympy(C.parse(rep.params["linear_pde"])), want)


def test_legendre_sympy_oracle_for_aquad():
    """A(z, w, y) built by an explicit Legendre transform in sympy satisfies Aquad = -PDE/F_pp."""
    p = sp.Symbol("p", positive=True)
    F = sp.sqrt(p) * z - 1 / (12 * sp.sqrt(p))
    pde = 2 * (F - p * sp.diff(F, p)) + 4 * p ** 2 * sp.diff(F, p, 2) + sp.diff(F, p, z)
    assert sp.simplify(pde) == 0
    R = ChartSpec("zwps", ["z", "w", "p"], roots=[("s", "s^2 - p")])
    rep = legendre_equivalence(R.parse("s*z - 1/(12*s)"))
    assert rep.passed and R.parse(rep.params["linear_pde"]).is_zero()


def test_legendre_degenerate():
    C = ChartSpec("zwp", ["z", "w", "p"])
    with pytest.raises(LegendreDegenerateError):
        legendre_equivalence(C.parse("p*z + w"))


# -- null homothety and the infinitesimal limit ------------------------------------------------------


def test_sparling_tod_opaque_and_constant():
    assert sparling_tod_suite(1).passed
    rep = sparling_tod_suite(1, F="constant")
    assert rep.passed, rep.to_text()
    assert any(c.name.startswith("adapted Darboux chart: ") for c in rep.checks)


def test_sparling_tod_wrong_exponent_fails():
    rep = sparling_tod_suite(1, exponent=2)
    failed = {c.name for c in rep.checks if not c.passed}
    assert "L_W g = g" in failed and "d Omega_+ = 0" in failed
    with pytest.raises(ValueError):
        sparling_tod_suite(2)


@pytest.mark.parametrize("theta", ["0", "y1^3", "x1*y2^2 + 3*y1*y2*x2"])
def test_infinitesimal_limit(theta):
    assert infinitesimal_limit_check(HeavenlyPotential.pleb2(1, theta)).passed


def test_infinitesimal_limit_n2():
    assert infinitesimal_limit_check(HeavenlyPotential.pleb2(2, "y1^2*y3 + x2*y4^2"), xi_order=1).passed
