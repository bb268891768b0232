"""Exterior calculus, brackets, frames, chart changes and curvature with exact components."""
from . import linalg
from .curvature import (
    DegenerateMetricError,
    christoffel,
    curvature_invariants,
    ricci,
    riemann,
    scalar_curvature,
    weyl,
)
from .frames import JacobianError, SingularFrameError, change_chart, coframe_matrix, dual_coframe, frame_matrix
from .tensors import (
    CoordinateBasis,
    Form,
    StructureCoframe,
    SymmetricTensor,
    VectorField,
    exterior_derivative,
    interior,
    lie_bracket,
    lie_derivative,
    sym_product,
    wedge,
)

__all__ = [
    "linalg",
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
    "dual_coframe",
    "frame_matrix",
    "coframe_matrix",
    "change_chart",
    "SingularFrameError",
    "JacobianError",
    "christoffel",
    "riemann",
    "ricci",
    "scalar_curvature",
    "weyl",
    "curvature_invariants",
    "DegenerateMetricError",
]
