"""Model sets with p-adic and profinite internal spaces.

Exact window constructions for limit-periodic and limit-quasiperiodic
substitution tilings, the chair tiling, and their Bragg spectra.
"""

__version__ = "0.1.0"

from .exactnum import QuadInt, QuadRational  # noqa: E402
from .padic import Coset, CosetUnion, PadicFiltration, MatrixFiltration, valuation  # noqa: E402
from .substitution import SubstitutionSystem, named_system, pf_data  # noqa: E402

__all__ = [
    "Coset",
    "CosetUnion",
    "MatrixFiltration",
    "PadicFiltration",
    "QuadInt",
    "QuadRational",
    "SubstitutionSystem",
    "named_system",
    "pf_data",
    "valuation",
]
