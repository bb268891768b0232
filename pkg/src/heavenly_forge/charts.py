"""Standard charts: X_n = (a, b, q, v) with roots p_i, and the n = 1 legacy chart (a, b, q, r)."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .symkernel import ChartSpec

__all__ = ["XnNames", "xn_names", "xn_chart", "q0_text", "legacy_chart", "apqr_chart"]


@dataclass(frozen=True)
class XnNames:
    n: int
    a: tuple
    b: tuple
    q: tuple
    v: tuple
    p: tuple

    @property
    def coordinates(self):
        return self.a + self.b + self.q + self.v


def xn_names(n, indexed=None):
    """Coordinate names; n = 1 uses the unindexed a, b, q, v, p unless ``indexed`` is True."""
    if indexed is None:
        indexed = n > 1
    if not indexed and n != 1:
        raise ValueError("unindexed names only exist for n = 1")
    suf = [str(i) for i in range(1, n + 1)] if indexed else [""]
    return XnNames(n, *(tuple(s + k for k in suf) for s in "abqvp"))


def q0_text(names, var):
    """Q0(var) = var^(2n+1) + sum_i a_i var^(n+i-1) + sum_i b_i var^(i-1)."""
    n = names.n
    terms = [f"{var}^{2 * n + 1}"]
    for i in range(1, n + 1):
        terms.append(f"{names.a[i - 1]}*{var}^{n + i - 1}")
    for i in range(1, n + 1):
        terms.append(f"{names.b[i - 1]}*{var}^{i - 1}")
    return " + ".join(terms)


@lru_cache(maxsize=None)
def xn_chart(n, indexed=None, extra=(), functions=()):
    """The chart of X_n with transcendentals lam and x (plus ``extra``)."""
    names = xn_names(n, indexed)
    roots = [(names.p[i], f"{names.p[i]}^2 - ({q0_text(names, names.q[i])})") for i in range(n)]
    return ChartSpec(
        f"X{n}",
        names.coordinates,
        roots=roots,
        transcendentals=("lam", "x") + tuple(extra),
        functions=dict(functions),
    )


@lru_cache(maxsize=None)
def legacy_chart():
    """n = 1 chart (a, b, q, r) with p^2 = q^3 + a q + b and spectral parameter lam."""
    return ChartSpec("abqr", ["a", "b", "q", "r"], roots=[("p", "p^2 - q^3 - a*q - b")], transcendentals=("lam",))


@lru_cache(maxsize=None)
def apqr_chart():
    """n = 1 chart (a, p, q, r), b eliminated through the cubic."""
    return ChartSpec("apqr", ["a", "p", "q", "r"])
