"""Truncated Puiseux series with exponents in (1/2)Z and field-element coefficients.

Exponents are stored as integer numerators over the fixed ramification 2, so
the key ``k`` stands for ``t^(k/2)``.  ``order`` is the numerator of the first
exponent that is *not* known.
"""
from __future__ import annotations

from fractions import Fraction

from .errors import NotIntegrableError, SeriesError
from .field import FieldElement

__all__ = ["PuiseuxSeries", "series_expand", "RAMIFICATION"]

RAMIFICATION = 2


def _num(exponent):
    e = Fraction(exponent) * RAMIFICATION
    if e.denominator != 1:
        raise SeriesError(f"exponent {exponent} is not in (1/{RAMIFICATION})Z")
    return int(e)


class PuiseuxSeries:
    __slots__ = ("chart", "param", "coeffs", "order")

    def __init__(self, chart, param, coeffs, order):
        self.chart = chart
        self.param = param
        self.order = int(order)
        self.coeffs = {k: c for k, c in coeffs.items() if k < self.order and c}

    @classmethod
    def from_terms(cls, chart, param, terms, order):
        """Build from {exponent (Fraction): coefficient} and a truncation exponent."""
        coeffs = {}
        for e, c in terms.items():
            c = c if isinstance(c, FieldElement) else chart.const(c)
            coeffs[_num(e)] = c
        return cls(chart, param, coeffs, _num(order))

    # -- inspection -------------------------------------------------------------

    @property
    def truncation_order(self):
        return Fraction(self.order, RAMIFICATION)

    @property
    def ramification(self):
        return RAMIFICATION

    def valuation_num(self):
        return min(self.coeffs) if self.coeffs else self.order

    def valuation(self):
        return Fraction(self.valuation_num(), RAMIFICATION)

    def coefficient(self, exponent):
        k = _num(exponent)
        if k >= self.order:
            raise SeriesError(f"coefficient at {exponent} is beyond the truncation order {self.truncation_order}")
        return self.coeffs.get(k, self.chart.const(0))

    def terms(self):
        return {Fraction(k, RAMIFICATION): c for k, c in sorted(self.coeffs.items())}

    def has_residue(self):
        return -RAMIFICATION < self.order and bool(self.coeffs.get(-RAMIFICATION))

    def residue(self):
        """Coefficient of t^-1."""
        if self.order <= -RAMIFICATION:
            raise SeriesError("series truncated before exponent -1")
        return self.coeffs.get(-RAMIFICATION, self.chart.const(0))

    def is_zero(self):
        return not self.coeffs

    def __repr__(self):
        parts = [f"({c})*{self.param}^{Fraction(k, RAMIFICATION)}" for k, c in sorted(self.coeffs.items())]
        body = " + ".join(parts) if parts else "0"
        return f"{body} + O({self.param}^{self.truncation_order})"

    def agrees_with(self, other):
        """Equality up to the common truncation order."""
        m = min(self.order, other.order)
        keys = {k for k in list(self.coeffs) + list(other.coeffs) if k < m}
        zero = self.chart.const(0)
        return all(self.coeffs.get(k, zero) == other.coeffs.get(k, zero) for k in keys)

    # -- arithmetic -------------------------------------------------------------

    def _check(self, other):
        if not isinstance(other, PuiseuxSeries):
            return None
        if other.chart is not self.chart or other.param != self.param:
            raise SeriesError("series in different local parameters")
        return other

    def truncate(self, order_num):
        return PuiseuxSeries(self.chart, self.param, self.coeffs, min(self.order, order_num))

    def __neg__(self):
        return PuiseuxSeries(self.chart, self.param, {k: -c for k, c in self.coeffs.items()}, self.order)

    def __add__(self, other):
        if isinstance(other, PuiseuxSeries):
            self._check(other)
            order = min(self.order, other.order)
            out = dict(self.coeffs)
            for k, c in other.coeffs.items():
                out[k] = out[k] + c if k in out else c
            return PuiseuxSeries(self.chart, self.param, out, order)
        c = other if isinstance(other, FieldElement) else self.chart.const(other)
        if self.order <= 0:
            return self
        out = dict(self.coeffs)
        out[0] = out[0] + c if 0 in out else c
        return PuiseuxSeries(self.chart, self.param, out, self.order)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = c if isinstance(c, FieldElement) else self.chart.const(c)
        return PuiseuxSeries(self.chart, self.param, {k: v * c for k, v in self.coeffs.items()}, self.order)

    def shift(self, exponent):
        """Multiply by t^exponent."""
        k = _num(exponent)
        return PuiseuxSeries(self.chart, self.param, {e + k: c for e, c in self.coeffs.items()}, self.order + k)

    def __mul__(self, other):
        if not isinstance(other, PuiseuxSeries):
            return self.scale(other)
        self._check(other)
        va, vb = self.valuation_num(), other.valuation_num()
        order = min(self.order + vb, other.order + va)
        out = {}
        for ka, ca in self.coeffs.items():
            for kb, cb in other.coeffs.items():
                k = ka + kb
                if k < order:
                    out[k] = out[k] + ca * cb if k in out else ca * cb
        return PuiseuxSeries(self.chart, self.param, out, order)

    def __rmul__(self, other):
        return self.scale(other)

    def _unit_parts(self):
        """Split as c * t^(v/2) * (1 + u) with u of positive valuation; returns (v, c, [u_k])."""
        if not self.coeffs:
            raise SeriesError("series is zero to the known order")
        v = self.valuation_num()
        lead = self.coeffs[v]
        inv = lead.inverse()
        rel = self.order - v
        u = [self.chart.const(0)] * rel
        for k, c in self.coeffs.items():
            if k > v:
                u[k - v] = c * inv
        return v, lead, u

    def inverse(self):
        v, lead, u = self._unit_parts()
        rel = len(u)
        b = [self.chart.const(0)] * rel
        b[0] = self.chart.const(1)
        for k in range(1, rel):
            acc = self.chart.const(0)
            for j in range(1, k + 1):
                if u[j] and b[k - j]:
                    acc = acc + u[j] * b[k - j]
            b[k] = -acc
        linv = lead.inverse()
        coeffs = {k - v: b[k] * linv for k in range(rel) if b[k]}
        return PuiseuxSeries(self.chart, self.param, coeffs, rel - v)

    def __truediv__(self, other):
        if isinstance(other, PuiseuxSeries):
            return self * other.inverse()
        c = other if isinstance(other, FieldElement) else self.chart.const(other)
        return self.scale(c.inverse())

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        result = PuiseuxSeries(self.chart, self.param, {0: self.chart.const(1)}, 10 ** 9)
        for _ in range(k):
            result = result * self
        return result

    def sqrt(self):
        """Principal square root; the leading coefficient must be a rational square."""
        v, lead, u = self._unit_parts()
        if v % 2:
            raise SeriesError("square root would need ramification 4")
        c = lead.as_constant()
        if c is None or c <= 0:
            raise SeriesError("leading coefficient is not a positive rational square")
        rn, rd = _isqrt(c.numerator), _isqrt(c.denominator)
        if rn is None or rd is None:
            raise SeriesError("leading coefficient is not a rational square")
        rel = len(u)
        b = [self.chart.const(0)] * rel
        b[0] = self.chart.const(1)
        for k in range(1, rel):
            acc = u[k]
            for j in range(1, k):
                if b[j] and b[k - j]:
                    acc = acc - b[j] * b[k - j]
            b[k] = acc * Fraction(1, 2)
        root = Fraction(rn, rd)
        coeffs = {k + v // 2: b[k] * root for k in range(rel) if b[k]}
        return PuiseuxSeries(self.chart, self.param, coeffs, rel + v // 2)

    # -- calculus ---------------------------------------------------------------

    def derivative(self):
        out = {k - RAMIFICATION: c * Fraction(k, RAMIFICATION) for k, c in self.coeffs.items() if k}
        return PuiseuxSeries(self.chart, self.param, out, self.order - RAMIFICATION)

    def antiderivative(self):
        """Term-wise antiderivative with zero integration constant."""
        res = self.coeffs.get(-RAMIFICATION)
        if res:
            raise NotIntegrableError("not integrable in the local field: nonzero coefficient at exponent -1")
        out = {k + RAMIFICATION: c * Fraction(RAMIFICATION, k + RAMIFICATION) for k, c in self.coeffs.items()}
        return PuiseuxSeries(self.chart, self.param, out, self.order + RAMIFICATION)

    def map_coefficients(self, fn):
        return PuiseuxSeries(self.chart, self.param, {k: fn(c) for k, c in self.coeffs.items()}, self.order)

    def differential_at_infinity(self):
        """Coefficient series of f(x) dx after x = 1/t, i.e. f * (-t^-2)."""
        return (-self).shift(-2)


def _isqrt(n):
    from math import isqrt

    r = isqrt(n)
    return r if r * r == n else None


def _x_coefficients(chart, poly, j):
    """Split a polynomial by powers of generator ``j``: {k: FieldElement}."""
    groups = {}
    for exps, c in poly.to_dict().items():
        k = int(exps[j])
        e2 = list(exps)
        e2[j] = 0
        groups.setdefault(k, {})[tuple(e2)] = c
    return {k: FieldElement._from_poly(chart, chart.ctx.from_dict(d)) for k, d in groups.items()}


def _as_x_polynomial(e, var):
    """(numerator coefficients, denominator coefficients) in the variable ``var``."""
    chart = e.chart
    num, den = e.parts()
    j = chart.gen_index(var)
    for g in e.atoms():
        info = chart.atom_info(g)
        if any(_mentions(a, var) for a in info.args):
            raise SeriesError(f"{var} occurs inside an opaque function: no finite principal part")
    ncoef = {}
    for mask, P in num.items():
        rp = FieldElement._raw(chart, {mask: chart.ctx.constant(1)}, chart.ctx.constant(1))
        for k, c in _x_coefficients(chart, P, j).items():
            val = c * rp
            ncoef[k] = ncoef[k] + val if k in ncoef else val
    dcoef = _x_coefficients(chart, den, j)
    return ncoef, dcoef


def _mentions(e, var):
    num, den = e.parts()
    j = e.chart.gen_index(var)
    if any(P.degrees()[j] > 0 for P in list(num.values()) + [den]):
        return True
    return any(_mentions(a, var) for g in e.atoms() for a in e.chart.atom_info(g).args)


def _power_series_quotient(N, D, count, chart):
    """First ``count`` coefficients of N(s)/D(s) for lists with D[0] != 0."""
    inv0 = D[0].inverse()
    out = []
    for k in range(count):
        acc = N[k] if k < len(N) else chart.const(0)
        for j in range(1, min(k, len(D) - 1) + 1):
            if D[j] and out[k - j]:
                acc = acc - D[j] * out[k - j]
        out.append(acc * inv0 if acc else chart.const(0))
    return out


def series_expand(e, var="x", point="infinity", order=4, param=None):
    """Laurent expansion of a field element rational in ``var``.

    At ``point="infinity"`` the local parameter is t = 1/var; at a finite point
    ``c`` (a field element or rational) it is t = var - c.  The result holds
    every exponent below ``order``.
    """
    chart = e.chart
    order_num = _num(order)
    ncoef, dcoef = _as_x_polynomial(e, var)
    zero = chart.const(0)
    if not ncoef:
        return PuiseuxSeries(chart, param or ("xt" if point == "infinity" else "s"), {}, order_num)
    if point == "infinity":
        param = param or "xt"
        dn, dd = max(ncoef), max(dcoef)
        N = [ncoef.get(dn - k, zero) for k in range(dn + 1)]
        D = [dcoef.get(dd - k, zero) for k in range(dd + 1)]
        lead_shift = dd - dn
    else:
        param = param or "s"
        c = point if isinstance(point, FieldElement) else chart.const(point)
        N = _taylor_shift(ncoef, c, chart)
        D = _taylor_shift(dcoef, c, chart)
        m = 0
        while m < len(D) and not D[m]:
            m += 1
        if m == len(D):
            raise SeriesError("denominator vanishes identically")
        D = D[m:]
        lead_shift = -m
    count = max(-(-order_num // RAMIFICATION) - lead_shift, 0)
    q = _power_series_quotient(N, D, count, chart)
    coeffs = {(k + lead_shift) * RAMIFICATION: v for k, v in enumerate(q) if v}
    return PuiseuxSeries(chart, param, coeffs, order_num)


def _taylor_shift(coef, c, chart):
    from math import comb

    deg = max(coef)
    powers = [chart.const(1)]
    for _ in range(deg):
        powers.append(powers[-1] * c)
    out = []
    for j in range(deg + 1):
        acc = chart.const(0)
        for k in range(j, deg + 1):
            ck = coef.get(k)
            if ck:
                acc = acc + ck * powers[k - j] * comb(k, j)
        out.append(acc)
    return out
