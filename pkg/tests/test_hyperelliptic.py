from fractions import Fraction
from functools import lru_cache

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import same, to_sympy
from heavenly_forge.charts import xn_names
from heavenly_forge.hyperelliptic import (
    curve_family,
    golden_omega,
    omega_check,
    omega_matrix,
    omega_residue,
    pullback_omega_on_flows,
    triangular_residues,
)
from heavenly_forge.oscillator import build_flows
from heavenly_forge.symkernel import ChartSpec, NotIntegrableError, PuiseuxSeries, SeriesError, series_expand


@lru_cache(maxsize=None)
def sympy_omega(n):
    """omega(d/dc1, d/dc2) = -res U(y) phi_V dx, computed in the uniformiser s with x = s^-2.

    The t = 1/x residue is half the residue in s.
    """
    nm = xn_names(n)
    s = sp.Symbol("s")
    a = sp.symbols(" ".join(nm.a) + ",")
    b = sp.symbols(" ".join(nm.b) + ",")
    X = sp.Symbol("X")
    Q0 = X ** (2 * n + 1) + sum(a[i] * X ** (n + i) + b[i] * X ** i for i in range(n))
    x = s ** -2
    inner = sp.expand(Q0.subs(X, x) * s ** (4 * n + 2))
    Y = s ** -(2 * n + 1) * sp.sqrt(inner)
    dx = sp.diff(x, s)
    N = 4 * n + 8
    dY = {str(c): sp.series(sp.diff(Q0, c).subs(X, x) / (2 * Y), s, 0, N).removeO() for c in a + b}
    out = {}
    names = [str(c) for c in a + b]
    for i, c1 in enumerate(names):
        for c2 in names[i + 1:]:
            phi = sp.integrate(sp.expand(dY[c2] * dx), s)
            res = sp.expand(dY[c1] * phi * dx).coeff(s, -1)
            out[(c1, c2)] = -res / 2
    return out


@pytest.mark.parametrize("n", [1, 2])
def test_omega_matches_sympy_residues(n):
    om = omega_matrix(n)
    oracle = sympy_omega(n)
    for key, want in oracle.items():
        assert same(to_sympy(om.components[key]), want), key


def test_omega_n1_frozen():
    om = omega_matrix(1)
    assert om("a", "b") == -Fraction(1, 2)
    assert om("b", "a") == Fraction(1, 2)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_omega_equals_printed_tables(n):
    rep, om = omega_check(n)
    assert rep.passed, rep.to_text()
    assert (om.as_form() - golden_omega(n)).is_zero()


@pytest.mark.parametrize("n", [1, 2, 3])
def test_triangular_residues(n):
    assert triangular_residues(n).passed


def test_pullback_on_flows_n2():
    rep = pullback_omega_on_flows(build_flows(2))
    assert rep.passed, rep.to_text()


def test_y_branch_leading_term():
    fam = curve_family(2)
    ok, val, lead = fam.y_check()
    assert ok and val == Fraction(-5, 2) and lead == 1


def test_short_truncation_reports_none():
    C = ChartSpec("c", ["a"])
    V = PuiseuxSeries.from_terms(C, "xt", {Fraction(3, 2): 1}, 2)
    assert omega_residue(PuiseuxSeries.from_terms(C, "xt", {}, 0), V) is None
    # d(2 t^(1/2)) against t^(1/2): residue of -2 t^-1
    assert omega_residue(PuiseuxSeries.from_terms(C, "xt", {Fraction(1, 2): 1}, 1), V) == -2


@settings(max_examples=12)
@given(st.integers(0, 4), st.sampled_from([1, 2]))
def test_residue_truncation_stability(extra, n):
    """Growing the truncation order does not move any residue."""
    base = omega_matrix(n)
    grown = omega_matrix(n, base.order + extra)
    assert all(base.components[k] == grown.components[k] for k in base.components)


@settings(max_examples=12)
@given(st.sampled_from(["a", "b"]), st.fractions(min_value=-4, max_value=4, max_denominator=5))
def test_phi_constant_is_irrelevant(coord, c):
    fam = curve_family(1)
    U, V = fam.dy("a"), fam.dy(coord)
    phi = V.differential_at_infinity().antiderivative()
    shift = series_expand(fam.chart.const(c), "x", "infinity", phi.truncation_order)
    I1 = (U * phi).differential_at_infinity()
    I2 = (U * (phi + shift)).differential_at_infinity()
    assert I1.residue() == I2.residue()


def test_residue_term_blocks_antiderivative():
    fam = curve_family(1)
    t_inv = series_expand(fam.chart.parse("1/x"), "x", "infinity", 3).differential_at_infinity()
    with pytest.raises(NotIntegrableError):
        t_inv.antiderivative()
    with pytest.raises(SeriesError):
        fam.y.coefficient(100)
