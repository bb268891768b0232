from fractions import Fraction

import pytest
import sympy as sp

from conftest import same, to_sympy
from heavenly_forge.metricfactory import (
    beta_surface_check,
    build_distinguished_metric,
    certify_comb_identities,
    certify_homothety,
    certify_hyper_lagrangian,
    certify_hyperkahler,
    cubic_flows_check,
    euler_variant,
    met58_metric,
    pi1_comparison,
    pi1_metric,
    weyl_check,
    with_e,
)

a, b, q, r, v = sp.symbols("a b q r v")
P = sp.sqrt(q ** 3 + a * q + b)


@pytest.fixture(scope="module")
def pkg1():
    return build_distinguished_metric(1)


@pytest.fixture(scope="module")
def pkg2():
    return build_distinguished_metric(2)


def _matrix(g, roots=None):
    n = g.basis.dim
    return sp.Matrix(n, n, lambda i, j: to_sympy(g.component(i, j), roots=roots))


@pytest.mark.parametrize("n", [1, 2])
def test_hyperkahler_certificate(n, pkg1, pkg2):
    rep = certify_hyperkahler(pkg1 if n == 1 else pkg2)
    assert rep.passed, rep.to_text()


@pytest.mark.parametrize("n", [1, 2])
def test_homothety_and_foliation(n, pkg1, pkg2):
    pkg = pkg1 if n == 1 else pkg2
    assert certify_homothety(pkg).passed
    assert certify_hyper_lagrangian(pkg).passed


def test_beta_surfaces_close_only_for_n1(pkg1, pkg2):
    assert beta_surface_check(pkg1).passed
    rep = beta_surface_check(pkg2)
    # the bracket picks up s_k^2/(4 p_k^3) d/dv_k, not proportional to sigma U_0'
    assert not rep.passed
    assert "d/dv1" in rep.checks[0].witness and "d/dv2" in rep.checks[0].witness


@pytest.mark.parametrize("n", [1, 2])
def test_comb_identities(n):
    assert certify_comb_identities(n=n).passed


def test_pinned_constant_is_minus_two(pkg1):
    rep = pi1_comparison(pkg1)
    assert rep.passed, rep.to_text()
    assert rep.params["constant"] == "-2"


def test_pi1_pullback_sympy_oracle(pkg1):
    """g^omega pulled back through v = r/(2p) in sympy equals -2 times the printed metric."""
    G = _matrix(pkg1.g, roots={"p": P})
    new = (a, b, q, r)
    images = [a, b, q, r / (2 * P)]
    J = sp.Matrix(4, 4, lambda i, j: sp.diff(images[i], new[j]))
    G = G.subs(v, r / (2 * P))
    pulled = J.T * G * J
    ref = _matrix(pi1_metric(), roots={"p": P})
    for i in range(4):
        for j in range(4):
            assert same(pulled[i, j], -2 * ref[i, j])


def test_pi1_homothety_sympy_oracle():
    """L_W g = g for W = (4a, 6b, 2q, r)/5 on the (a, b, q, r) chart."""
    G = _matrix(pi1_metric(), roots={"p": P})
    xs = (a, b, q, r)
    W = [sp.Rational(4, 5) * a, sp.Rational(6, 5) * b, sp.Rational(2, 5) * q, sp.Rational(1, 5) * r]
    for i in range(4):
        for j in range(4):
            L = sum(W[k] * sp.diff(G[i, j], xs[k]) for k in range(4))
            L += sum(G[k, j] * sp.diff(W[k], xs[i]) + G[i, k] * sp.diff(W[k], xs[j]) for k in range(4))
            assert same(L, G[i, j])


def test_weyl_norm_sympy_oracle():
    """|Weyl|^2 of the (a, p, q, r) metric recomputed from scratch in sympy."""
    g = met58_metric()
    xs = sp.symbols("a p q r")
    A, Pp, Q, R = xs
    n = 4
    G = _matrix(g)
    Gi = sp.simplify(G.inv())
    Gam = [[[sp.cancel(sum(Gi[k, m] * (sp.diff(G[m, i], xs[j]) + sp.diff(G[m, j], xs[i]) - sp.diff(G[i, j], xs[m]))
                               for m in range(n)) / 2) for j in range(n)] for i in range(n)] for k in range(n)]
    Rm = [[[[sp.cancel(sp.diff(Gam[i][l][j], xs[k]) - sp.diff(Gam[i][k][j], xs[l])
                       + sum(Gam[i][k][m] * Gam[m][l][j] - Gam[i][l][m] * Gam[m][k][j] for m in range(n)))
             for l in range(n)] for k in range(n)] for j in range(n)] for i in range(n)]
    Ric = [[sp.cancel(sum(Rm[i][j][i][l] for i in range(n))) for l in range(n)] for j in range(n)]
    assert all(x == 0 for row in Ric for x in row)
    # Ricci flat, so the Weyl tensor is the Riemann tensor
    Rl = [[[[sp.cancel(sum(G[p, i] * Rm[i][bb][c][d] for i in range(n))) for d in range(n)] for c in range(n)]
           for bb in range(n)] for p in range(n)]
    nz = [(i, j, k, l) for i in range(n) for j in range(n) for k in range(n) for l in range(n) if Rl[i][j][k][l] != 0]
    norm = 0
    for (i, j, k, l) in nz:
        up = sum(Gi[i, i2] * Gi[j, j2] * Gi[k, k2] * Gi[l, l2] * Rl[i2][j2][k2][l2] for (i2, j2, k2, l2) in nz)
        norm += Rl[i][j][k][l] * up
    assert sp.simplify(norm - 96 * (3 * Q ** 2 + A) ** 2 / Pp ** 6) == 0


def test_weyl_suite_pins_constant_one():
    rep = weyl_check()
    assert rep.passed, rep.to_text()


# -- negative controls ---------------------------------------------------------------


def test_perturbed_nu_breaks_certificate(pkg1):
    nu = [[x * 2 for x in row] for row in pkg1.nu]
    rep = certify_hyperkahler(with_e(pkg1, nu=nu))
    assert not rep.passed
    failed = {c.name for c in rep.checks if not c.passed}
    assert "Omega_- = pi^* omega" in failed
    assert all(c.witness for c in rep.checks if not c.passed)


def test_wrong_b_weight_breaks_homothety(pkg1):
    W = euler_variant(pkg1.fs, b_weight=Fraction(1))
    rep = certify_homothety(pkg1, W)
    assert not rep.passed
    assert any(c.name == "L_W g - g = 0" and not c.passed and c.witness for c in rep.checks)


def test_flipped_comb3_fails():
    rep = certify_comb_identities(n=2, flip_comb3=True)
    assert not rep.passed
    assert all(c.name.startswith("comb3") for c in rep.checks if not c.passed)


def test_wrong_leaf_is_not_lagrangian(pkg1):
    fs = pkg1.fs
    rep = certify_hyper_lagrangian(pkg1, leaf=fs.U0 + fs.V1)
    assert not rep.passed


def test_lax_metric_sign_against_printed():
    rep = cubic_flows_check()
    by_name = {c.name: c.passed for c in rep.checks}
    assert by_name["nu^2 = 1"]
    assert by_name["Lax metric equals minus the printed n = 1 metric"]
    assert not by_name["Lax metric equals the printed n = 1 metric"]
