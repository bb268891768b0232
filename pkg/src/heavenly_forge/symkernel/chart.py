"""Charts: ordered coordinates, quadratic root symbols and transcendental parameters.

A chart owns the flint polynomial context its field elements live in.  Root
symbols are not flint generators; they are tracked structurally (see
``field``).  Applications of opaque function symbols become extra generators
that are appended to the context the first time they are seen.
"""
from __future__ import annotations

import re
import threading
from fractions import Fraction

import flint

from .errors import ChartError, ChartMismatchError, UndeclaredSymbolError

__all__ = ["ChartSpec", "name_sort_key", "fmpq_to_fraction"]

_IDENT = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")
_GROUP_RANK = {"a": 0, "b": 1, "q": 2, "v": 3, "p": 4, "lam": 5, "x": 6, "t": 7, "xi": 8}
_OTHER_RANK = 9


def _split_name(name):
    m = re.match(r"^(.*?)(\d*)$", name)
    stem, digits = m.group(1), m.group(2)
    return stem, (int(digits) if digits else 0)


def name_sort_key(name, declared_position=0):
    """Key realising the fixed variable order a < b < q < v < p < lam < x < t < xi < others.

    Within a group variables are ordered by index; unrecognised names keep
    their declared order.
    """
    stem, idx = _split_name(name)
    rank = _GROUP_RANK.get(stem, _OTHER_RANK)
    if rank == _OTHER_RANK:
        return (rank, declared_position, 0, name)
    return (rank, 0, idx, name)


def fmpq_to_fraction(c):
    return Fraction(int(c.p), int(c.q))


class _AtomInfo:
    __slots__ = ("gen", "fname", "args", "partials", "key", "text")

    def __init__(self, gen, fname, args, partials, key):
        self.gen = gen
        self.fname = fname
        self.args = args
        self.partials = partials
        self.key = key
        self.text = None


class ChartSpec:
    """A named chart.

    Parameters
    ----------
    name : str
    coordinates : sequence of str
        The differentiable coordinates, in the order used for tensor components.
    roots : sequence of (symbol, defining polynomial text)
        Each defining polynomial must be monic quadratic in its symbol, e.g.
        ``("p1", "p1^2 - q1^3 - a1*q1 - b1")``.
    transcendentals : sequence of str
        Independent parameters such as ``lam`` or ``x``.
    functions : mapping of name to arity
        Opaque function symbols that may appear in expressions.
    """

    def __init__(self, name, coordinates, roots=(), transcendentals=(), functions=None):
        self.name = name
        self.coordinates = tuple(coordinates)
        self.transcendentals = tuple(transcendentals)
        self.functions = dict(functions or {})
        declared = list(self.coordinates) + list(self.transcendentals)
        root_names = [r[0] for r in roots]
        everything = declared + root_names + list(self.functions)
        for s in everything:
            if not _IDENT.match(s):
                raise ChartError(f"invalid identifier {s!r}")
        if len(set(everything)) != len(everything):
            raise ChartError("coordinate, root, transcendental and function names must be distinct")
        pos = {s: i for i, s in enumerate(declared)}
        self.base_names = tuple(sorted(declared, key=lambda s: name_sort_key(s, pos[s])))
        self.roots = tuple(root_names)
        self.root_index = {s: i for i, s in enumerate(self.roots)}
        self._lock = threading.RLock()
        self._names = list(self.base_names)
        self.ctx = flint.fmpq_mpoly_ctx.get(tuple(self._names), "deglex")
        self._gen_index = {s: i for i, s in enumerate(self._names)}
        self._atoms = {}
        self._atom_by_key = {}
        self._root_c1 = []
        self._root_c0 = []
        for sym, text in roots:
            c1, c0 = self._parse_defining(sym, text)
            self._root_c1.append(c1)
            self._root_c0.append(c0)
        self._overlap_cache = {}
        self._dcache = {}
        self._elem_cache = {}

    def __repr__(self):
        return f"ChartSpec({self.name!r}, n_coords={len(self.coordinates)}, roots={list(self.roots)})"

    # -- defining polynomials -------------------------------------------------

    def _parse_defining(self, sym, text):
        from .parse import parse_expression, tree_to_poly

        tmp_ctx = flint.fmpq_mpoly_ctx.get(tuple(self.base_names) + self.roots, "deglex")
        tree = parse_expression(text)
        poly = tree_to_poly(tree, tmp_ctx)
        k = len(self.base_names) + self.roots.index(sym)
        byk = {}
        for exps, c in poly.to_dict().items():
            for j, e in enumerate(exps):
                if j >= len(self.base_names) and j != k and e:
                    raise ChartError(f"defining polynomial of {sym} involves another root symbol")
            byk.setdefault(exps[k], {})[exps[: len(self.base_names)]] = c
        if set(byk) - {0, 1, 2} or 2 not in byk:
            raise ChartError(f"defining polynomial of {sym} is not quadratic in {sym}")
        lead = byk[2]
        if len(lead) != 1 or next(iter(lead.values())) != 1 or any(next(iter(lead.keys()))):
            raise ChartError(f"defining polynomial of {sym} is not monic in {sym}")
        mk = lambda d: self.ctx.from_dict(d) if d else self.ctx.from_dict({})
        return mk(byk.get(1, {})), mk(byk.get(0, {}))

    def root_relation(self, i):
        """(c1, c0) with p_i^2 + c1 p_i + c0 = 0, as polynomials in the current context."""
        return self.lift(self._root_c1[i]), self.lift(self._root_c0[i])

    def overlap_expansion(self, mask):
        """Expansion of prod_{i in mask} p_i^2 as a list of (root mask, polynomial)."""
        ctx = self.ctx
        hit = self._overlap_cache.get(mask)
        if hit is not None and hit[0] is ctx:
            return hit[1]
        terms = {0: ctx.constant(1)}
        i = 0
        m = mask
        while m:
            if m & 1:
                c1, c0 = self.root_relation(i)
                new = {}
                for w, poly in terms.items():
                    if not c0.is_zero():
                        new[w] = new.get(w, ctx.constant(0)) - poly * c0
                    if not c1.is_zero():
                        w2 = w | (1 << i)
                        new[w2] = new.get(w2, ctx.constant(0)) - poly * c1
                terms = {w: poly for w, poly in new.items() if not poly.is_zero()}
            m >>= 1
            i += 1
        out = list(terms.items())
        self._overlap_cache[mask] = (ctx, out)
        return out

    # -- generators and atoms -------------------------------------------------

    @property
    def names(self):
        return tuple(self._names)

    def is_base(self, name):
        return name in self._gen_index and not name.startswith("_")

    def gen_index(self, name):
        return self._gen_index[name]

    def lift(self, poly):
        ctx = self.ctx
        if poly.context() is ctx:
            return poly
        return poly.project_to_context(ctx)

    def atom_info(self, gen):
        return self._atoms.get(gen)

    @property
    def atom_gens(self):
        return tuple(self._atoms)

    def register_atom(self, fname, args, partials):
        """Return the generator name for F_{partials}(args), creating it if new."""
        if fname not in self.functions:
            raise UndeclaredSymbolError(f"undeclared function symbol {fname!r}")
        arity = self.functions[fname]
        if len(args) != arity:
            raise ChartError(f"{fname} takes {arity} argument(s), got {len(args)}")
        for a in args:
            if a.chart is not self:
                raise ChartMismatchError("function argument belongs to another chart")
        partials = tuple(sorted(partials))
        if any(not 1 <= k <= arity for k in partials):
            raise ChartError(f"partial index out of range for {fname}")
        key = (fname, tuple(a.key() for a in args), partials)
        with self._lock:
            hit = self._atom_by_key.get(key)
            if hit is not None:
                return hit
            gen = f"_{fname}{len(self._atoms)}"
            self._names.append(gen)
            self.ctx = flint.fmpq_mpoly_ctx.get(tuple(self._names), "deglex")
            self._gen_index[gen] = len(self._names) - 1
            self._atoms[gen] = _AtomInfo(gen, fname, tuple(args), partials, key)
            self._atom_by_key[key] = gen
            return gen

    # -- element factories ----------------------------------------------------

    def const(self, value):
        from .field import FieldElement

        value = Fraction(value)
        return FieldElement._from_poly(self, self.ctx.constant(flint.fmpq(value.numerator, value.denominator)))

    def sym(self, name):
        """The field element for a coordinate, transcendental or root symbol."""
        from .field import FieldElement

        hit = self._elem_cache.get(name)
        if hit is not None:
            return hit
        if name in self.root_index:
            i = self.root_index[name]
            e = FieldElement._raw(self, {1 << i: self.ctx.constant(1)}, self.ctx.constant(1))
        elif self.is_base(name):
            e = FieldElement._from_poly(self, self.ctx.gens()[self._gen_index[name]])
        else:
            raise UndeclaredSymbolError(f"undeclared symbol {name!r} in chart {self.name}")
        self._elem_cache[name] = e
        return e

    def syms(self, *names):
        return [self.sym(s) for s in names]

    def apply(self, fname, *args, partials=()):
        """Opaque application F_{partials}(args) as a field element."""
        from .field import FieldElement

        args = tuple(a if hasattr(a, "chart") else self.const(a) for a in args)
        gen = self.register_atom(fname, args, partials)
        return FieldElement._from_poly(self, self.ctx.gens()[self._gen_index[gen]])

    def parse(self, text):
        from .parse import normalize, parse_expression

        return normalize(parse_expression(text), self)

    # -- ordering -------------------------------------------------------------

    def monomial_key(self, exps):
        """Graded-lex key of an exponent tuple (root exponents excluded)."""
        nb = len(self.base_names)
        if len(exps) == nb:
            return (sum(exps), exps)
        atoms = sorted(range(nb, len(exps)), key=lambda j: self.atom_text(self._names[j]))
        ordered = tuple(exps[:nb]) + tuple(exps[j] for j in atoms)
        return (sum(exps), ordered)

    def leading_coefficient(self, poly):
        if len(self._names) == len(self.base_names):
            return poly.leading_coefficient()
        d = poly.to_dict()
        best = max(d, key=self.monomial_key)
        return d[best]

    def atom_text(self, gen):
        info = self._atoms[gen]
        if info.text is None:
            from .printing import print_canonical

            head = info.fname
            if info.partials:
                head += "_" + "".join(f"d{k}" for k in info.partials)
            info.text = head + "(" + ", ".join(print_canonical(a) for a in info.args) + ")"
        return info.text

    def differentiable(self, name):
        return name in self.coordinates or name in self.transcendentals
