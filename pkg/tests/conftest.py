import re

import pytest
import sympy as sp
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_PARTIAL = re.compile(r"\b([A-Za-z]\w*?)_d(\d+(?:d\d+)*)\(")


def _opaque(base, idx):
    def build(*args):
        dummies = sp.symbols(f"_a1:{len(args) + 1}")
        f = sp.Function(base)(*dummies)
        for k in idx:
            f = f.diff(dummies[k - 1])
        return f.subs(dict(zip(dummies, args)), simultaneous=True)

    return build


def to_sympy(e, roots=None):
    """Canonical text of a field element as a sympy expression.

    Opaque partials F_d1d3(a, b, c) become sympy derivatives of F; root symbols
    are replaced by ``roots[name]`` when given (e.g. sqrt(p)).
    """
    text = str(e).replace("^", "**")
    local = {}
    for m in _PARTIAL.finditer(text):
        base, idx = m.group(1), [int(d) for d in re.findall(r"\d+", m.group(2))]
        local[f"{base}_d{m.group(2)}"] = _opaque(base, idx)
    for name in set(re.findall(r"\b([A-Za-z]\w*)\(", text)):
        if name not in local:
            local[name] = sp.Function(name)
    for name in set(re.findall(r"\b([A-Za-z]\w*)\b", text)) - set(local):
        local[name] = sp.Symbol(name)
    out = sp.sympify(text, locals=local)
    if roots:
        out = out.subs({sp.Symbol(k): v for k, v in roots.items()})
    return out


def same(a, b):
    return sp.simplify(sp.expand(a - b)) == 0


@pytest.fixture
def sym():
    return to_sympy


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
