"""Frames, dual coframes and changes of chart."""
from __future__ import annotations

from ..symkernel import FieldElement, compose, print_canonical
from . import linalg
from .tensors import CoordinateBasis, Form, SymmetricTensor, VectorField

__all__ = ["SingularFrameError", "JacobianError", "frame_matrix", "dual_coframe", "coframe_matrix", "change_chart"]


class SingularFrameError(ArithmeticError):
    pass


class JacobianError(ArithmeticError):
    pass


def frame_matrix(frame):
    """Rows are the frame vectors, columns the coordinate components."""
    return [v.components() for v in frame]


def coframe_matrix(coframe):
    basis = coframe[0].basis
    return [[th.component(i) for i in range(basis.dim)] for th in coframe]


def _factor_text(poly_fe):
    num, den = poly_fe.parts()
    out = []
    for P in num.values():
        try:
            _, facs = P.factor()
        except Exception:
            facs = [(P, 1)]
        for f, e in facs:
            if not f.is_constant():
                out.append(f)
    return out


def dual_coframe(frame, specialize=None):
    """The coframe theta^a with theta^a(E_b) = delta^a_b.

    If ``specialize`` (a substitution dict) is given, the frame is first
    checked at that specialisation; a vanishing determinant is reported by
    naming the irreducible factors of the generic determinant that vanish there.
    """
    basis = frame[0].basis
    chart = basis.chart
    M = frame_matrix(frame)
    if len(frame) != basis.dim:
        raise SingularFrameError(f"{len(frame)} vectors cannot frame a {basis.dim}-dimensional chart")
    if specialize:
        D = linalg.det(M)
        if D.is_zero():
            raise SingularFrameError("frame determinant vanishes identically")
        at = D.subs(specialize) if _safe(D, specialize) else None
        if at is not None and at.is_zero():
            bad = [f for f in _factor_text(D) if _vanishes(chart, f, specialize)]
            names = ", ".join(f"({print_canonical(FieldElement._from_poly(chart, f))})" for f in bad) or "(unidentified)"
            raise SingularFrameError(f"frame is singular at the given point: determinant factor(s) {names} vanish")
        M = [[e.subs(specialize) for e in row] for row in M]
    try:
        inv = linalg.inverse(M)
    except linalg.SingularMatrixError:
        D = linalg.det(frame_matrix(frame))
        raise SingularFrameError(
            "frame is singular: determinant " + print_canonical(D) + " vanishes") from None
    # theta^a_i = (M^{-1})_{i a}
    n = basis.dim
    return [Form(basis, 1, {(i,): inv[i][a] for i in range(n)}) for a in range(n)]


def _safe(D, specialize):
    return True


def _vanishes(chart, poly, specialize):
    e = FieldElement._from_poly(chart, poly)
    return e.subs(specialize).is_zero()


def _jacobian(source_basis, target_basis, images):
    """J[i][j] = d(old coordinate i)/d(new coordinate j)."""
    tchart = target_basis.chart
    J = []
    for old in source_basis.labels:
        img = images.get(old)
        if img is None:
            img = tchart.sym(old)
        elif not isinstance(img, FieldElement):
            img = tchart.const(img)
        J.append([img.diff(new) for new in target_basis.labels])
    return J


def change_chart(T, target_basis, images):
    """Re-express T in ``target_basis``.

    ``images`` maps each old coordinate (and root symbol, when needed) to its
    expression in the new chart.  Forms and symmetric tensors are pulled back;
    vector fields are pushed through the inverse Jacobian.
    """
    src = T.basis
    if not isinstance(target_basis, CoordinateBasis):
        target_basis = CoordinateBasis(target_basis)
    tchart = target_basis.chart
    J = _jacobian(src, target_basis, images)
    if linalg.det(J).is_zero():
        raise JacobianError("substitution has a degenerate Jacobian")
    conv = lambda e: compose(e, tchart, images)
    n_new = target_basis.dim
    if isinstance(T, VectorField):
        Jinv = linalg.inverse(J)
        old = [conv(c) for c in T.components()]
        comps = {}
        for j in range(n_new):
            acc = tchart.const(0)
            for i, c in enumerate(old):
                if c and Jinv[j][i]:
                    acc = acc + Jinv[j][i] * c
            comps[j] = acc
        return VectorField(target_basis, comps)
    if isinstance(T, SymmetricTensor):
        G = [[conv(c) for c in row] for row in T.matrix()]
        JT = linalg.transpose(J)
        M = linalg.matmul(linalg.matmul(JT, G), J)
        return SymmetricTensor.from_matrix(target_basis, M)
    if isinstance(T, Form):
        out = Form.zero(target_basis, T.degree)
        pulled = [Form(target_basis, 1, {(j,): J[i][j] for j in range(n_new)}) for i in range(src.dim)]
        for idx, c in T.comps.items():
            term = Form.scalar(target_basis, conv(c))
            for i in idx:
                term = term ^ pulled[i]
            out = out + term
        return out
    raise TypeError(f"cannot change chart of {type(T).__name__}")
