"""Linear repair of Reed-Solomon codes with side information.

Exact finite-field machinery for building, checking, optimizing and
executing trace-based repair schemes in which the repairing node already
knows some F_q-linear combinations of the lost symbol's sub-symbols.
"""

from .fields import FieldElement, FieldError, FieldTower, make_tower

__version__ = "0.1.0"

__all__ = [
    "FieldElement",
    "FieldError",
    "FieldTower",
    "make_tower",
    "__version__",
]
