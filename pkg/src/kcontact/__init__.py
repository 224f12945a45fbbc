"""Numerical toolkit for k-contact Hamiltonian field theories with dissipation."""

from .core import (
    DarbouxLayout,
    KContactSystem,
    darboux_kvector,
    hdw_residual_kvector,
    solve_reeb,
    verify_structure,
)
from .section import SectionGrid, SpaceGrid

__all__ = [
    "DarbouxLayout",
    "KContactSystem",
    "SectionGrid",
    "SpaceGrid",
    "darboux_kvector",
    "hdw_residual_kvector",
    "solve_reeb",
    "verify_structure",
]
__version__ = "0.1.0"
