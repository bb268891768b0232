"""Structured pass/fail records with symbolic witnesses."""
from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field

from . import __version__
from .symkernel import FieldElement, print_canonical

__all__ = ["Check", "VerificationReport", "render"]

_WITNESS_LIMIT = 2000


def render(obj):
    """Canonical text of a field element, tensor, series or plain value."""
    if isinstance(obj, FieldElement):
        return print_canonical(obj)
    if hasattr(obj, "listing"):
        return "; ".join(obj.listing()) or "0"
    return str(obj)


def _is_zero(obj):
    if isinstance(obj, FieldElement):
        return obj.is_zero()
    if hasattr(obj, "is_zero"):
        return obj.is_zero()
    if isinstance(obj, (list, tuple)):
        return all(_is_zero(o) for o in obj)
    return obj == 0


def _clip(text):
    if text is None or len(text) <= _WITNESS_LIMIT:
        return text
    return text[:_WITNESS_LIMIT] + f"... [{len(text) - _WITNESS_LIMIT} more characters]"


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    witness: str | None = None
    expected: str | None = None
    actual: str | None = None
    skipped: bool = False
    anchor: str = ""
    seconds: float = 0.0

    @property
    def status(self):
        return "skipped" if self.skipped else "pass" if self.passed else "fail"

    def to_dict(self):
        out = asdict(self)
        out["status"] = self.status
        return out

    def line(self):
        status = self.status.upper()
        text = f"[{status}] {self.name}"
        if self.detail:
            text += f": {self.detail}"
        if not self.passed and self.witness:
            text += f"\n        witness: {self.witness}"
        return text


@dataclass
class VerificationReport:
    suite: str
    params: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    anchor: str = ""

    def __post_init__(self):
        self._clock = time.perf_counter()

    @property
    def passed(self):
        """True iff there is at least one check and every non-skipped check passed."""
        return bool(self.checks) and all(c.passed for c in self.checks if not c.skipped)

    @property
    def skipped(self):
        return bool(self.checks) and all(c.skipped for c in self.checks)

    def add(self, check):
        # wall time is charged from the previous check (or report creation) to this one
        now = time.perf_counter()
        if not check.seconds:
            check.seconds = now - self._clock
        if not check.anchor:
            check.anchor = self.anchor
        self._clock = now
        self.checks.append(check)
        return check

    def record(self, name, ok, detail="", witness=None, expected=None, actual=None, anchor=""):
        ok = bool(ok)
        if not ok and not witness:
            witness = "check returned False"
        return self.add(Check(name, ok, detail, _clip(witness), _clip(expected), _clip(actual), anchor=anchor))

    def skip(self, name, reason):
        return self.add(Check(name, True, reason, skipped=True))

    def zero(self, name, residual, detail=""):
        """Pass iff ``residual`` (field element, tensor, list) is exactly zero."""
        ok = _is_zero(residual)
        return self.record(name, ok, detail, None if ok else render_residual(residual))

    def equal(self, name, actual, expected, detail=""):
        if isinstance(actual, FieldElement) or isinstance(expected, FieldElement):
            ok = (actual - expected).is_zero()
            witness = None if ok else render(actual - expected)
        else:
            ok = actual == expected
            witness = None if ok else f"{render(actual)} != {render(expected)}"
        return self.record(name, ok, detail, witness, render(expected), render(actual))

    def note(self, text):
        self.notes.append(text)

    def merge(self, other, prefix=""):
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.passed, c.detail, c.witness, c.expected, c.actual,
                                     c.skipped, c.anchor or other.anchor, c.seconds))
        self._clock = time.perf_counter()
        self.notes.extend(other.notes)
        return self

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def to_dict(self):
        return {
            "suite": self.suite,
            "params": self.params,
            "checks": [c.to_dict() for c in self.checks],
            "notes": list(self.notes),
            "passed": self.passed,
            "version": __version__,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)

    def to_text(self):
        head = f"suite {self.suite} " + " ".join(f"{k}={v}" for k, v in self.params.items())
        lines = [head.rstrip()]
        lines += [c.line() for c in self.checks]
        lines += [f"note: {n}" for n in self.notes]
        live = [c for c in self.checks if not c.skipped]
        n_ok = sum(c.passed for c in live)
        n_skip = len(self.checks) - len(live)
        verdict = "SKIPPED" if self.skipped else "PASSED" if self.passed else "FAILED"
        tail = f", {n_skip} skipped" if n_skip else ""
        lines.append(f"{verdict} ({n_ok}/{len(live)} checks{tail})")
        return "\n".join(lines)


def render_residual(residual):
    if isinstance(residual, (list, tuple)):
        parts = [render(r) for r in residual if not _is_zero(r)]
        return "; ".join(parts)
    return render(residual)
