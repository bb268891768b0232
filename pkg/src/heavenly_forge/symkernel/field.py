"""Exact rational functions on a chart, reduced modulo the quadratic root relations.

A field element is stored as ``sum_S N_S * p^S / D`` where ``S`` runs over
subsets of the root symbols (encoded as bit masks), ``p^S`` is the product of
the roots in ``S`` and every ``N_S`` and ``D`` is a flint polynomial free of
root symbols.  Normal form: ``D`` has leading coefficient 1 in the graded-lex
order, ``gcd(D, N_S for all S) = 1``, zero parts are dropped.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational

import flint

from .errors import ChartError, ChartMismatchError, UndeclaredSymbolError, ZeroDivisionInField

__all__ = ["FieldElement", "differentiate", "compose"]


def _acc(out, mask, poly):
    prev = out.get(mask)
    out[mask] = poly if prev is None else prev + poly


def _ml_mul(chart, A, B):
    out = {}
    for s, P in A.items():
        for t, Q in B.items():
            prod = P * Q
            ov = s & t
            if not ov:
                _acc(out, s | t, prod)
            else:
                base = s ^ t
                for w, c in chart.overlap_expansion(ov):
                    _acc(out, base | w, prod * c)
    return {m: P for m, P in out.items() if not P.is_zero()}


def _ml_add(A, B, sign=1):
    out = dict(A)
    for m, P in B.items():
        prev = out.get(m)
        if prev is None:
            out[m] = P if sign > 0 else -P
        else:
            out[m] = prev + P if sign > 0 else prev - P
    return {m: P for m, P in out.items() if not P.is_zero()}


def _ml_scale(A, poly):
    return {m: P * poly for m, P in A.items()}


class FieldElement:
    """Immutable exact element of the function field of a chart."""

    __slots__ = ("chart", "_num", "_den", "_ctx", "_key", "__weakref__")

    # -- construction -----------------------------------------------------------

    @classmethod
    def _raw(cls, chart, num, den):
        self = object.__new__(cls)
        self.chart = chart
        self._num = num
        self._den = den
        self._ctx = den.context()
        self._key = None
        return self

    @classmethod
    def _from_poly(cls, chart, poly):
        ctx = poly.context()
        if poly.is_zero():
            return cls._raw(chart, {}, ctx.constant(1))
        return cls._raw(chart, {0: poly}, ctx.constant(1))

    @classmethod
    def _make(cls, chart, num, den):
        num = {m: P for m, P in num.items() if not P.is_zero()}
        ctx = den.context()
        if den.is_zero():
            raise ZeroDivisionInField("division by an expression equal to zero")
        if not num:
            return cls._raw(chart, {}, ctx.constant(1))
        if not den.is_constant():
            g = den
            for P in num.values():
                g = g.gcd(P)
                if g.is_constant():
                    break
            if not g.is_constant():
                den = den / g
                num = {m: P / g for m, P in num.items()}
        lc = chart.leading_coefficient(den) if not den.is_constant() else den.leading_coefficient()
        if lc != 1:
            inv = 1 / lc
            den = den * inv
            num = {m: P * inv for m, P in num.items()}
        return cls._raw(chart, num, den)

    def _sync(self):
        ctx = self.chart.ctx
        if self._ctx is not ctx:
            lift = self.chart.lift
            self._num = {m: lift(P) for m, P in self._num.items()}
            self._den = lift(self._den)
            self._ctx = ctx
        return self

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.chart is not self.chart:
                raise ChartMismatchError(
                    f"cannot combine elements of charts {self.chart.name} and {other.chart.name}")
            return other._sync()
        if isinstance(other, (int, Fraction, Rational)) and not isinstance(other, bool):
            return self.chart.const(other)
        return None

    # -- inspection -------------------------------------------------------------

    def parts(self):
        """Dict {root mask: numerator polynomial} and the denominator polynomial."""
        self._sync()
        return dict(self._num), self._den

    def is_zero(self):
        return not self._num

    def __bool__(self):
        return bool(self._num)

    def is_root_free(self):
        return all(m == 0 for m in self._num)

    def is_polynomial(self):
        self._sync()
        return self._den.is_constant()

    def as_constant(self):
        """The rational value if the element is constant, else None."""
        self._sync()
        if not self._num:
            return Fraction(0)
        if len(self._num) != 1 or 0 not in self._num:
            return None
        P = self._num[0]
        if not P.is_constant() or not self._den.is_constant():
            return None
        from .chart import fmpq_to_fraction

        c = P.leading_coefficient() / self._den.leading_coefficient()
        return fmpq_to_fraction(c)

    def key(self):
        if self._key is None:
            self._sync()
            self._key = (tuple(sorted((m, str(P)) for m, P in self._num.items())), str(self._den))
        return self._key

    def __hash__(self):
        return hash(self.key())

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            if other.chart is not self.chart:
                return False
            o = other._sync()
        else:
            o = self._coerce(other)
            if o is None:
                return NotImplemented
        self._sync()
        if set(self._num) != set(o._num) or self._den != o._den:
            return False
        return all(self._num[m] == o._num[m] for m in self._num)

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __repr__(self):
        from .printing import print_canonical

        return f"FieldElement({print_canonical(self)!r})"

    def __str__(self):
        from .printing import print_canonical

        return print_canonical(self)

    # -- arithmetic -------------------------------------------------------------

    def __neg__(self):
        self._sync()
        return FieldElement._raw(self.chart, {m: -P for m, P in self._num.items()}, self._den)

    def __pos__(self):
        return self

    def _addsub(self, o, sign):
        self._sync()
        chart = self.chart
        if not o._num:
            return self
        if not self._num:
            return o if sign > 0 else -o
        da, db = self._den, o._den
        if da == db:
            num = _ml_add(self._num, o._num, sign)
            return FieldElement._make(chart, num, da)
        if da.is_constant() or db.is_constant():
            g = None
        else:
            g = da.gcd(db)
            if g.is_constant():
                g = None
        if g is None:
            num = _ml_add(_ml_scale(self._num, db), _ml_scale(o._num, da), sign)
            return FieldElement._make(chart, num, da * db)
        da2, db2 = da / g, db / g
        num = _ml_add(_ml_scale(self._num, db2), _ml_scale(o._num, da2), sign)
        return FieldElement._make(chart, num, da * db2)

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._addsub(o, 1)

    def __radd__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o._addsub(self, 1)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._addsub(o, -1)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o._addsub(self, -1)

    def _mul(self, o):
        self._sync()
        o._sync()
        if not self._num or not o._num:
            return FieldElement._raw(self.chart, {}, self.chart.ctx.constant(1))
        chart = self.chart
        num = _ml_mul(chart, self._num, o._num)
        if self._den.is_constant() and o._den.is_constant():
            return FieldElement._make(chart, num, self._den * o._den)
        return FieldElement._make(chart, num, self._den * o._den)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._mul(o)

    def __rmul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o._mul(self)

    def inverse(self):
        """Multiplicative inverse, rationalising the root symbols one at a time."""
        self._sync()
        if not self._num:
            raise ZeroDivisionInField("division by an expression equal to zero")
        chart = self.chart
        B = dict(self._num)
        F = {0: self._den}
        used = 0
        for m in B:
            used |= m
        i = 0
        while used >> i:
            bit = 1 << i
            if used & bit:
                B0 = {m: P for m, P in B.items() if not m & bit}
                B1 = {m ^ bit: P for m, P in B.items() if m & bit}
                if B1:
                    c1, c0 = chart.root_relation(i)
                    conj = dict(B0)
                    for m, P in B1.items():
                        if not c1.is_zero():
                            _acc(conj, m, -(P * c1))
                        conj[m | bit] = -P
                    conj = {m: P for m, P in conj.items() if not P.is_zero()}
                    norm = _ml_mul(chart, B0, B0) if B0 else {}
                    if B0 and not c1.is_zero():
                        norm = _ml_add(norm, _ml_scale(_ml_mul(chart, B0, B1), c1), -1)
                    if not c0.is_zero():
                        norm = _ml_add(norm, _ml_scale(_ml_mul(chart, B1, B1), c0), 1)
                    if not norm:
                        raise ZeroDivisionInField("division by a zero divisor of the root relations")
                    F = _ml_mul(chart, F, conj)
                    B = norm
            i += 1
        D = B.get(0)
        if D is None or len(B) != 1:
            raise ZeroDivisionInField("rationalisation failed")
        return FieldElement._make(chart, F, D)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not o._num:
            raise ZeroDivisionInField("division by an expression equal to zero")
        return self._mul(o.inverse())

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o._mul(self.inverse())

    def __pow__(self, k):
        if not isinstance(k, int):
            raise TypeError("only integer powers are supported")
        if k < 0:
            return self.inverse() ** (-k)
        result = self.chart.const(1)
        base = self
        while k:
            if k & 1:
                result = result._mul(base)
            k >>= 1
            if k:
                base = base._mul(base)
        return result

    # -- calculus ---------------------------------------------------------------

    def diff(self, v):
        return differentiate(self, v)

    def subs(self, images):
        return compose(self, self.chart, images)

    def atoms(self):
        """Generator names of the opaque applications occurring in this element."""
        self._sync()
        chart = self.chart
        nb = len(chart.base_names)
        if len(chart.names) == nb:
            return set()
        found = set()
        for P in list(self._num.values()) + [self._den]:
            degs = P.degrees()
            for j in range(nb, len(degs)):
                if degs[j] > 0:
                    found.add(chart.names[j])
        return found


def _root_power(chart, mask):
    ctx = chart.ctx
    return FieldElement._raw(chart, {mask: ctx.constant(1)}, ctx.constant(1))


def _atom_derivative(chart, gen, v):
    key = ("atom", gen, v)
    hit = chart._dcache.get(key)
    if hit is not None:
        return hit
    info = chart.atom_info(gen)
    total = chart.const(0)
    for k, arg in enumerate(info.args, start=1):
        da = differentiate(arg, v)
        if da:
            total = total + chart.apply(info.fname, *info.args, partials=info.partials + (k,)) * da
    chart._dcache[key] = total
    return total


def _root_derivative(chart, i, v):
    key = ("root", i, v)
    hit = chart._dcache.get(key)
    if hit is not None:
        return hit
    c1, c0 = chart.root_relation(i)
    F1 = FieldElement._from_poly(chart, c1)
    F0 = FieldElement._from_poly(chart, c0)
    d1, d0 = differentiate(F1, v), differentiate(F0, v)
    if not d1 and not d0:
        res = chart.const(0)
    else:
        p = _root_power(chart, 1 << i)
        res = -(d1 * p + d0) / (2 * p + F1)
    chart._dcache[key] = res
    return res


def _dpoly(chart, P, v, atom_gens):
    """Derivative of a root-free polynomial, as a field element."""
    out = None
    if chart.is_base(v):
        d = P.derivative(chart.gen_index(v))
        if not d.is_zero():
            out = FieldElement._from_poly(chart, d)
    if atom_gens:
        degs = P.degrees()
        for g in atom_gens:
            j = chart.gen_index(g)
            if degs[j] > 0:
                da = _atom_derivative(chart, g, v)
                if da:
                    term = FieldElement._from_poly(chart, P.derivative(j)) * da
                    out = term if out is None else out + term
    return out


def differentiate(e, v):
    """Partial derivative of ``e`` with respect to the coordinate or parameter ``v``."""
    chart = e.chart
    if not chart.differentiable(v):
        raise UndeclaredSymbolError(f"{v!r} is not a coordinate or parameter of chart {chart.name}")
    e._sync()
    if not e._num:
        return e
    atom_gens = e.atoms()
    num, den = e._num, e._den
    if not atom_gens and len(num) == 1 and 0 in num:
        j = chart.gen_index(v)
        N = num[0]
        dN = N.derivative(j)
        dD = den.derivative(j)
        if dD.is_zero():
            return FieldElement._make(chart, {0: dN}, den)
        return FieldElement._make(chart, {0: dN * den - N * dD}, den * den)
    dN = chart.const(0)
    for mask, P in num.items():
        dP = _dpoly(chart, P, v, atom_gens)
        if dP is not None:
            dN = dN + dP * _root_power(chart, mask) if mask else dN + dP
        m, i = mask, 0
        while m:
            if m & 1:
                dr = _root_derivative(chart, i, v)
                if dr:
                    rest = _root_power(chart, mask ^ (1 << i))
                    dN = dN + FieldElement._from_poly(chart, P) * rest * dr
            m >>= 1
            i += 1
    dD = _dpoly(chart, den, v, atom_gens)
    Dfe = FieldElement._from_poly(chart, den)
    if dD is None:
        return dN / Dfe
    return (dN - e * dD) / Dfe


def compose(e, target, images):
    """Substitute symbols of ``e`` and land in chart ``target``.

    ``images`` maps symbol names of ``e.chart`` (base generators or root
    symbols) to field elements of ``target`` or rational numbers.  Symbols not
    mentioned map to the same-named symbol of ``target``.  Opaque applications
    are rebuilt in ``target`` with substituted arguments.
    """
    src = e.chart
    e._sync()
    if target is src:
        for i, r in enumerate(src.roots):
            if r in images:
                continue
            c1, c0 = src.root_relation(i)
            for k in images:
                if src.is_base(k) and (c1.degrees()[src.gen_index(k)] > 0 or c0.degrees()[src.gen_index(k)] > 0):
                    raise ChartError(f"substituting {k} changes the relation of root {r}; give an image for {r}")
    cache = {}

    def image(name):
        hit = cache.get(name)
        if hit is not None:
            return hit
        if name in images:
            val = images[name]
            val = val if isinstance(val, FieldElement) else target.const(val)
            if val.chart is not target:
                raise ChartMismatchError(f"image of {name} is not in chart {target.name}")
        else:
            info = src.atom_info(name)
            if info is not None:
                args = [compose(a, target, images) for a in info.args]
                val = target.apply(info.fname, *args, partials=info.partials)
            else:
                val = target.sym(name)
        cache[name] = val
        return val

    if target is src and images and all(
        not isinstance(v, FieldElement) or v.as_constant() is not None for v in images.values()
    ) and all(src.is_base(k) for k in images) and not e.atoms():
        vals = {}
        for k, v in images.items():
            c = Fraction(v) if not isinstance(v, FieldElement) else v.as_constant()
            vals[k] = flint.fmpq(c.numerator, c.denominator)
        num = {}
        for m, P in e._num.items():
            _acc(num, m, P.subs(vals))
        den = e._den.subs(vals)
        return FieldElement._make(src, num, den)

    powcache = {}

    def power(name, k):
        key = (name, k)
        hit = powcache.get(key)
        if hit is None:
            hit = image(name) ** k
            powcache[key] = hit
        return hit

    names = src.names

    def eval_poly(P):
        total = target.const(0)
        for exps, c in P.to_dict().items():
            term = target.const(Fraction(int(c.p), int(c.q)))
            for j, k in enumerate(exps):
                if k:
                    term = term * power(names[j], int(k))
            total = total + term
        return total

    out = target.const(0)
    for m, P in e._num.items():
        val = eval_poly(P)
        i = 0
        mm = m
        while mm:
            if mm & 1:
                val = val * image(src.roots[i])
            mm >>= 1
            i += 1
        out = out + val
    return out / eval_poly(e._den)
