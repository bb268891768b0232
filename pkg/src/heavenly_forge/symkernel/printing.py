"""Deterministic text rendering of field elements (graded-lex, descending)."""
from __future__ import annotations

from fractions import Fraction

__all__ = ["print_canonical", "format_rational"]


def format_rational(c):
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _column(chart, j):
    """(print name, sort key) of polynomial generator ``j``."""
    from .chart import name_sort_key

    name = chart.names[j]
    if chart.atom_info(name) is not None:
        text = chart.atom_text(name)
        return text, (20, 0, 0, text)
    return name, name_sort_key(name, j)[:3] + (name,)


def _poly_terms(chart, num):
    """List of (coefficient, exponent tuple) in print order, with the column names."""
    nb = len(chart.names)
    raw = []
    used = set()
    for mask, P in num.items():
        rbits = [nb + i for i in range(len(chart.roots)) if (mask >> i) & 1]
        used.update(rbits)
        for exps, c in P.to_dict().items():
            support = {j: e for j, e in enumerate(exps) if e}
            used.update(support)
            for r in rbits:
                support[r] = 1
            raw.append((Fraction(int(c.p), int(c.q)), support))
    from .chart import name_sort_key

    cols = {}
    for j in used:
        if j < nb:
            cols[j] = _column(chart, j)
        else:
            r = chart.roots[j - nb]
            cols[j] = (r, name_sort_key(r)[:3] + (r,))
    order = sorted(used, key=lambda j: cols[j][1])
    terms = [(c, tuple(sup.get(j, 0) for j in order)) for c, sup in raw]
    terms.sort(key=lambda t: (sum(t[1]), t[1]), reverse=True)
    return terms, [cols[j][0] for j in order]


def _render(terms, names):
    if not terms:
        return "0"
    out = []
    for k, (c, exps) in enumerate(terms):
        factors = []
        for name, e in zip(names, exps):
            if e == 1:
                factors.append(name)
            elif e:
                factors.append(f"{name}^{e}")
        mag = abs(c)
        if factors:
            body = "*".join(factors)
            body = body if mag == 1 else f"{format_rational(mag)}*{body}"
        else:
            body = format_rational(mag)
        if k == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)


def print_canonical(e):
    """Canonical text of a field element; ``parse`` inverts it on normal forms."""
    num, den = e.parts()
    chart = e.chart
    terms, names = _poly_terms(chart, num)
    top = _render(terms, names)
    if den.is_one():
        return top
    dterms, dnames = _poly_terms(chart, {0: den})
    bottom = _render(dterms, dnames)
    return f"({top})/({bottom})"
