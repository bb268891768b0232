"""Text front end: a whitelisting walk over Python's ``ast`` for the expression grammar.

Raw trees are nested tuples::

    ("num", Fraction) | ("sym", name) | ("neg", t) | ("pow", t, int)
    ("add" | "sub" | "mul" | "div", t1, t2) | ("call", name, (t, ...))
"""
from __future__ import annotations

import ast
import re
from fractions import Fraction

import flint

from .errors import ChartError, ParseError, UndeclaredSymbolError

__all__ = ["parse_expression", "normalize", "tree_to_poly"]

_ALLOWED = re.compile(r"[A-Za-z0-9_+\-*/^(), \t\r\n]")
_PARTIAL = re.compile(r"^([A-Za-z][A-Za-z0-9_]*?)_((?:d\d+)+)$")
_BINOPS = {ast.Add: "add", ast.Sub: "sub", ast.Mult: "mul", ast.Div: "div"}


def _check_surface(text):
    for i, ch in enumerate(text):
        if not _ALLOWED.match(ch):
            raise ParseError(f"unexpected character {ch!r}", i)
    depth = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ParseError("unbalanced parentheses: unmatched ')'", i)
    if depth:
        raise ParseError("unbalanced parentheses: unclosed '('", text.rindex("("))
    m = re.search(r"\*\*", text)
    if m:
        raise ParseError("'**' is not an operator; use '^'", m.start())
    if not text.strip():
        raise ParseError("empty expression", 0)


def _orig_offset(text, py_index):
    """Map an index into the rewritten text "(" + text.replace("^", "**") + ")" back."""
    k = 1
    for j, ch in enumerate(text):
        step = 2 if ch == "^" else 1
        if k + step > py_index:
            return j
        k += step
    return len(text)


def parse_expression(text):
    """Parse ``text`` into a raw expression tree."""
    _check_surface(text)
    py = "(" + text.replace("^", "**") + ")"
    try:
        node = ast.parse(py, mode="eval")
    except SyntaxError as exc:
        lines = py.split("\n")
        line = min(max(exc.lineno or 1, 1), len(lines))
        idx = sum(len(s) + 1 for s in lines[: line - 1]) + max((exc.offset or 1) - 1, 0)
        raise ParseError("syntax error", _orig_offset(text, idx)) from None
    return _walk(node.body, text)


def _pos(node, text):
    return getattr(node, "col_offset", 0)


def _walk(node, text):
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, int):
            raise ParseError("only integer and rational literals are allowed", _pos(node, text))
        return ("num", Fraction(node.value))
    if isinstance(node, ast.Name):
        return ("sym", node.id)
    if isinstance(node, ast.UnaryOp):
        inner = _walk(node.operand, text)
        if isinstance(node.op, ast.USub):
            if inner[0] == "num":
                return ("num", -inner[1])
            return ("neg", inner)
        if isinstance(node.op, ast.UAdd):
            return inner
        raise ParseError("unsupported unary operator", _pos(node, text))
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            base = _walk(node.left, text)
            expo = _walk(node.right, text)
            if expo[0] != "num" or expo[1].denominator != 1:
                raise ParseError("exponents must be integer literals", _pos(node.right, text))
            return ("pow", base, int(expo[1]))
        op = _BINOPS.get(type(node.op))
        if op is None:
            raise ParseError("unsupported operator", _pos(node, text))
        left, right = _walk(node.left, text), _walk(node.right, text)
        if op == "div" and left[0] == "num" and right[0] == "num" and right[1] != 0:
            return ("num", left[1] / right[1])
        return (op, left, right)
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.keywords:
            raise ParseError("malformed function application", _pos(node, text))
        return ("call", node.func.id, tuple(_walk(a, text) for a in node.args))
    raise ParseError("unsupported syntax", _pos(node, text))


def normalize(tree, chart):
    """Evaluate a raw tree to a FieldElement of ``chart`` in normal form."""
    kind = tree[0]
    if kind == "num":
        return chart.const(tree[1])
    if kind == "sym":
        name = tree[1]
        if name in chart.functions:
            raise ChartError(f"function symbol {name!r} used without arguments")
        return chart.sym(name)
    if kind == "neg":
        return -normalize(tree[1], chart)
    if kind == "pow":
        return normalize(tree[1], chart) ** tree[2]
    if kind == "call":
        name, args = tree[1], tree[2]
        partials = ()
        if name not in chart.functions:
            m = _PARTIAL.match(name)
            if not m or m.group(1) not in chart.functions:
                raise UndeclaredSymbolError(f"undeclared function symbol {name!r}")
            name = m.group(1)
            partials = tuple(int(d) for d in re.findall(r"d(\d+)", m.group(2)))
        return chart.apply(name, *(normalize(a, chart) for a in args), partials=partials)
    left, right = normalize(tree[1], chart), normalize(tree[2], chart)
    if kind == "add":
        return left + right
    if kind == "sub":
        return left - right
    if kind == "mul":
        return left * right
    return left / right


def tree_to_poly(tree, ctx):
    """Evaluate a division-free (except by constants) tree to a flint polynomial."""
    kind = tree[0]
    if kind == "num":
        return ctx.constant(flint.fmpq(tree[1].numerator, tree[1].denominator))
    if kind == "sym":
        names = ctx.names()
        if tree[1] not in names:
            raise UndeclaredSymbolError(f"undeclared symbol {tree[1]!r}")
        return ctx.gens()[names.index(tree[1])]
    if kind == "neg":
        return -tree_to_poly(tree[1], ctx)
    if kind == "pow":
        if tree[2] < 0:
            raise ChartError("negative power in a polynomial")
        return tree_to_poly(tree[1], ctx) ** tree[2]
    if kind == "call":
        raise ChartError("function application in a polynomial")
    left, right = tree_to_poly(tree[1], ctx), tree_to_poly(tree[2], ctx)
    if kind == "add":
        return left + right
    if kind == "sub":
        return left - right
    if kind == "mul":
        return left * right
    if not right.is_constant() or right.is_zero():
        raise ChartError("division by a non-constant in a polynomial")
    return left * (1 / right.leading_coefficient())
