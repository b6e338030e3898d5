"""Spectral screen laboratory: python facade over the C++ core."""

from ._core import (
    __version__,
    check_tensor,
    eigenvalues,
    far_field,
    far_field_matrix,
    scan,
)

__all__ = [
    "__version__",
    "check_tensor",
    "eigenvalues",
    "far_field",
    "far_field_matrix",
    "scan",
]
