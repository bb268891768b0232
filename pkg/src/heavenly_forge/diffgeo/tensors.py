"""Vector fields, differential forms and symmetric 2-tensors with exact components.

Every tensor lives on a *basis*: either the coordinate basis of a chart or a
structure coframe with declared exterior derivatives.  Forms use the
determinant convention, ``(a ^ b)(X, Y) = a(X) b(Y) - a(Y) b(X)``, and store one
component per strictly increasing index tuple.
"""
from __future__ import annotations

from fractions import Fraction

from ..symkernel import ChartMismatchError, FieldElement, differentiate, print_canonical

__all__ = [
    "CoordinateBasis",
    "StructureCoframe",
    "VectorField",
    "Form",
    "SymmetricTensor",
    "sym_product",
    "wedge",
    "exterior_derivative",
    "interior",
    "lie_bracket",
    "lie_derivative",
]


class CoordinateBasis:
    """Coordinate frame {d/dx^i} and coframe {dx^i} on a chart."""

    is_coordinate = True

    def __init__(self, chart, coords=None):
        self.chart = chart
        self.labels = tuple(coords if coords is not None else chart.coordinates)
        self.index = {c: i for i, c in enumerate(self.labels)}

    def __eq__(self, other):
        return isinstance(other, CoordinateBasis) and other.chart is self.chart and other.labels == self.labels

    def __hash__(self):
        return hash((id(self.chart), self.labels))

    @property
    def dim(self):
        return len(self.labels)

    def apply(self, a, f):
        return differentiate(f, self.labels[a])

    def d_basis(self, a):
        return None

    def dual_name(self, a):
        return "d" + self.labels[a]


class StructureCoframe:
    """A non-coordinate coframe with declared structure equations.

    ``derivations[a]`` maps a field element f to e_a(f), the frame vector
    dual to the a-th coframe element applied to f.  ``structure[a]`` is a dict
    {(b, c) with b < c: coefficient} giving d(theta^a) in the same coframe.
    """

    is_coordinate = False

    def __init__(self, chart, labels, derivations, structure):
        self.chart = chart
        self.labels = tuple(labels)
        self.index = {c: i for i, c in enumerate(self.labels)}
        self._derivations = list(derivations)
        self._structure = [dict(s) for s in structure]

    @property
    def dim(self):
        return len(self.labels)

    def apply(self, a, f):
        return self._derivations[a](f)

    def d_basis(self, a):
        s = self._structure[a]
        if not s:
            return None
        return Form(self, 2, s)

    def dual_name(self, a):
        return self.labels[a]


def _check_same(*objs):
    b = objs[0].basis
    for o in objs[1:]:
        if o.basis != b and o.basis is not b:
            raise ChartMismatchError("tensors live on different bases")
    return b


def _coerce(chart, c):
    if isinstance(c, FieldElement):
        if c.chart is not chart:
            raise ChartMismatchError("scalar from another chart")
        return c
    return chart.const(c)


class VectorField:
    __slots__ = ("basis", "comps")

    def __init__(self, basis, comps):
        self.basis = basis
        chart = basis.chart
        out = {}
        for k, v in (comps.items() if isinstance(comps, dict) else enumerate(comps)):
            idx = basis.index[k] if isinstance(k, str) else k
            v = _coerce(chart, v)
            if v:
                out[idx] = v
        self.comps = out

    @property
    def chart(self):
        return self.basis.chart

    def component(self, i):
        i = self.basis.index[i] if isinstance(i, str) else i
        return self.comps.get(i, self.chart.const(0))

    def components(self):
        return [self.component(i) for i in range(self.basis.dim)]

    def __call__(self, f):
        chart = self.chart
        acc = chart.const(0)
        for i, c in self.comps.items():
            d = self.basis.apply(i, f)
            if d:
                acc = acc + c * d
        return acc

    def __add__(self, other):
        _check_same(self, other)
        out = dict(self.comps)
        for i, c in other.comps.items():
            out[i] = out[i] + c if i in out else c
        return VectorField(self.basis, out)

    def __neg__(self):
        return VectorField(self.basis, {i: -c for i, c in self.comps.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, f):
        f = _coerce(self.chart, f)
        return VectorField(self.basis, {i: c * f for i, c in self.comps.items()})

    __rmul__ = __mul__

    def is_zero(self):
        return not self.comps

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return (self - other).is_zero()

    def __repr__(self):
        parts = [f"({print_canonical(c)})*d/d{self.basis.labels[i]}" for i, c in sorted(self.comps.items())]
        return " + ".join(parts) if parts else "0"


def _sort_sign(idx):
    """Sign of the permutation sorting ``idx`` and the sorted tuple; sign 0 on repeats."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return 0, None
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return sign, tuple(idx)


class Form:
    """A k-form sum_{I increasing} c_I theta^I."""

    __slots__ = ("basis", "degree", "comps")

    def __init__(self, basis, degree, comps):
        self.basis = basis
        self.degree = degree
        chart = basis.chart
        out = {}
        for idx, v in comps.items():
            idx = tuple(basis.index[i] if isinstance(i, str) else i for i in (idx if isinstance(idx, tuple) else (idx,)))
            if len(idx) != degree:
                raise ValueError("index length does not match the form degree")
            s, key = _sort_sign(idx)
            if not s:
                continue
            v = _coerce(chart, v)
            if not v:
                continue
            v = v if s > 0 else -v
            out[key] = out[key] + v if key in out else v
        self.comps = {k: v for k, v in out.items() if v}

    @classmethod
    def zero(cls, basis, degree):
        return cls(basis, degree, {})

    @classmethod
    def scalar(cls, basis, f):
        return cls(basis, 0, {(): f})

    @classmethod
    def basis_one_form(cls, basis, i):
        i = basis.index[i] if isinstance(i, str) else i
        return cls(basis, 1, {(i,): 1})

    @property
    def chart(self):
        return self.basis.chart

    def component(self, *idx):
        idx = tuple(self.basis.index[i] if isinstance(i, str) else i for i in idx)
        s, key = _sort_sign(idx)
        if not s:
            return self.chart.const(0)
        v = self.comps.get(key)
        if v is None:
            return self.chart.const(0)
        return v if s > 0 else -v

    def __add__(self, other):
        _check_same(self, other)
        if other.degree != self.degree:
            raise ValueError("cannot add forms of different degree")
        out = dict(self.comps)
        for k, c in other.comps.items():
            out[k] = out[k] + c if k in out else c
        return Form(self.basis, self.degree, out)

    def __neg__(self):
        return Form(self.basis, self.degree, {k: -c for k, c in self.comps.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, f):
        f = _coerce(self.chart, f)
        return Form(self.basis, self.degree, {k: c * f for k, c in self.comps.items()})

    __rmul__ = __mul__

    def __xor__(self, other):
        return wedge(self, other)

    def is_zero(self):
        return not self.comps

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return other.degree == self.degree and (self - other).is_zero()

    def __call__(self, *vectors):
        """Evaluate on k vectors (determinant convention)."""
        if len(vectors) != self.degree:
            raise ValueError("wrong number of arguments")
        chart = self.chart
        acc = chart.const(0)
        for idx, c in self.comps.items():
            acc = acc + c * _det([[v.component(i) for i in idx] for v in vectors])
        return acc

    def d(self):
        return exterior_derivative(self)

    def __repr__(self):
        if not self.comps:
            return "0"
        parts = []
        for idx, c in sorted(self.comps.items()):
            basis_text = "^".join(self.basis.dual_name(i) for i in idx)
            parts.append(f"({print_canonical(c)})*{basis_text}" if idx else f"({print_canonical(c)})")
        return " + ".join(parts)

    def listing(self):
        """Deterministic lines 'dx^dy<TAB>coefficient' for reports and golden files."""
        return [
            "^".join(self.basis.dual_name(i) for i in idx) + "\t" + print_canonical(c)
            for idx, c in sorted(self.comps.items())
        ]


def _det(M):
    n = len(M)
    if n == 0:
        return 1
    if n == 1:
        return M[0][0]
    if n == 2:
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]
    acc = 0
    for j in range(n):
        if M[0][j]:
            minor = [row[:j] + row[j + 1:] for row in M[1:]]
            term = M[0][j] * _det(minor)
            acc = acc + term if j % 2 == 0 else acc - term
    return acc


def wedge(a, b):
    _check_same(a, b)
    out = {}
    for ia, ca in a.comps.items():
        for ib, cb in b.comps.items():
            s, key = _sort_sign(ia + ib)
            if not s:
                continue
            v = ca * cb
            v = v if s > 0 else -v
            out[key] = out[key] + v if key in out else v
    return Form(a.basis, a.degree + b.degree, out)


def exterior_derivative(form):
    basis = form.basis
    out = Form.zero(basis, form.degree + 1)
    acc = {}
    for idx, c in form.comps.items():
        for a in range(basis.dim):
            if a in idx:
                continue
            dc = basis.apply(a, c)
            if not dc:
                continue
            s, key = _sort_sign((a,) + idx)
            v = dc if s > 0 else -dc
            acc[key] = acc[key] + v if key in acc else v
    out = Form(basis, form.degree + 1, acc)
    if not basis.is_coordinate:
        for idx, c in form.comps.items():
            for m, i in enumerate(idx):
                dtheta = basis.d_basis(i)
                if dtheta is None:
                    continue
                left = Form(basis, m, {idx[:m]: 1})
                right = Form(basis, len(idx) - m - 1, {idx[m + 1:]: 1})
                term = wedge(wedge(left, dtheta), right) * c
                out = out + (term if m % 2 == 0 else -term)
    return out


def interior(X, form):
    """Contraction i_X form (first slot)."""
    _check_same(X, form)
    if form.degree == 0:
        raise ValueError("cannot contract a function")
    acc = {}
    for idx, c in form.comps.items():
        for pos, i in enumerate(idx):
            xi = X.comps.get(i)
            if xi is None:
                continue
            rest = idx[:pos] + idx[pos + 1:]
            v = c * xi
            v = v if pos % 2 == 0 else -v
            acc[rest] = acc[rest] + v if rest in acc else v
    return Form(form.basis, form.degree - 1, acc)


def lie_bracket(X, Y):
    """[X, Y]; in a structure coframe [e_a, e_b] = -sum_c d theta^c(e_a, e_b) e_c."""
    basis = _check_same(X, Y)
    out = {}
    for i in range(basis.dim):
        v = X(Y.component(i)) - Y(X.component(i))
        if v:
            out[i] = v
    if not basis.is_coordinate:
        for c in range(basis.dim):
            dth = basis.d_basis(c)
            if dth is None:
                continue
            for (a, b), k in dth.comps.items():
                xa, xb = X.component(a), X.component(b)
                ya, yb = Y.component(a), Y.component(b)
                w = xa * yb - xb * ya
                if w:
                    out[c] = out[c] - k * w if c in out else -k * w
    return VectorField(basis, {i: v for i, v in out.items() if v})


class SymmetricTensor:
    """Symmetric bilinear form; ``comps[(i, j)]`` with i <= j is the value g(e_i, e_j)."""

    __slots__ = ("basis", "comps")

    def __init__(self, basis, comps):
        self.basis = basis
        chart = basis.chart
        out = {}
        for (i, j), v in comps.items():
            i = basis.index[i] if isinstance(i, str) else i
            j = basis.index[j] if isinstance(j, str) else j
            key = (min(i, j), max(i, j))
            v = _coerce(chart, v)
            if v:
                out[key] = out[key] + v if key in out else v
        self.comps = {k: v for k, v in out.items() if v}

    @classmethod
    def from_matrix(cls, basis, M):
        n = basis.dim
        comps = {}
        for i in range(n):
            for j in range(i, n):
                if M[i][j] != M[j][i]:
                    raise ValueError("matrix is not symmetric")
                comps[(i, j)] = M[i][j]
        return cls(basis, comps)

    @property
    def chart(self):
        return self.basis.chart

    def component(self, i, j):
        i = self.basis.index[i] if isinstance(i, str) else i
        j = self.basis.index[j] if isinstance(j, str) else j
        return self.comps.get((min(i, j), max(i, j)), self.chart.const(0))

    def matrix(self):
        n = self.basis.dim
        return [[self.component(i, j) for j in range(n)] for i in range(n)]

    def __call__(self, X, Y):
        acc = self.chart.const(0)
        for (i, j), c in self.comps.items():
            xi, yj = X.comps.get(i), Y.comps.get(j)
            if xi is not None and yj is not None:
                acc = acc + c * xi * yj
            if i != j:
                xj, yi = X.comps.get(j), Y.comps.get(i)
                if xj is not None and yi is not None:
                    acc = acc + c * xj * yi
        return acc

    def __add__(self, other):
        _check_same(self, other)
        out = dict(self.comps)
        for k, c in other.comps.items():
            out[k] = out[k] + c if k in out else c
        return SymmetricTensor(self.basis, out)

    def __neg__(self):
        return SymmetricTensor(self.basis, {k: -c for k, c in self.comps.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, f):
        f = _coerce(self.chart, f)
        return SymmetricTensor(self.basis, {k: c * f for k, c in self.comps.items()})

    __rmul__ = __mul__

    def is_zero(self):
        return not self.comps

    def __eq__(self, other):
        if not isinstance(other, SymmetricTensor):
            return NotImplemented
        return (self - other).is_zero()

    def __repr__(self):
        parts = []
        for (i, j), c in sorted(self.comps.items()):
            a, b = self.basis.dual_name(i), self.basis.dual_name(j)
            parts.append(f"({print_canonical(c)})*{a}.{b}")
        return " + ".join(parts) if parts else "0"

    def listing(self):
        return [
            f"{self.basis.dual_name(i)}.{self.basis.dual_name(j)}\t{print_canonical(c)}"
            for (i, j), c in sorted(self.comps.items())
        ]


def sym_product(a, b):
    """a (.) b = (a (x) b + b (x) a) / 2 for 1-forms a, b."""
    _check_same(a, b)
    half = Fraction(1, 2)
    out = {}
    for (i,), ca in a.comps.items():
        for (j,), cb in b.comps.items():
            key = (min(i, j), max(i, j))
            v = ca * cb if i == j else ca * cb * half
            out[key] = out[key] + v if key in out else v
    return SymmetricTensor(a.basis, out)


def lie_derivative(T, X):
    """Lie derivative of a function, vector field, form or symmetric tensor along X."""
    if isinstance(T, FieldElement):
        return X(T)
    if isinstance(T, VectorField):
        return lie_bracket(X, T)
    if isinstance(T, Form):
        _check_same(T, X)
        if T.degree == 0:
            return Form.scalar(T.basis, X(T.component()))
        first = interior(X, exterior_derivative(T))
        second = exterior_derivative(interior(X, T))
        return first + second
    if isinstance(T, SymmetricTensor):
        basis = _check_same(T, X)
        if not basis.is_coordinate:
            raise NotImplementedError("Lie derivatives of symmetric tensors use coordinate bases")
        n = basis.dim
        dX = {}
        for k, c in X.comps.items():
            for i in range(n):
                v = basis.apply(i, c)
                if v:
                    dX[(k, i)] = v
        out = {}
        for i in range(n):
            for j in range(i, n):
                acc = X(T.component(i, j))
                for k in range(n):
                    if (k, i) in dX:
                        gk = T.component(k, j)
                        if gk:
                            acc = acc + gk * dX[(k, i)]
                    if (k, j) in dX:
                        gk = T.component(i, k)
                        if gk:
                            acc = acc + gk * dX[(k, j)]
                if acc:
                    out[(i, j)] = acc
        return SymmetricTensor(basis, out)
    raise TypeError(f"cannot take the Lie derivative of {type(T).__name__}")
