"""Movable singularities of polynomial Hamiltonian systems

    H = L1 y1^(M+1) + L2 y2^(N+1) + sum alpha_ij(z) y1^i y2^j.

Submodules: ``model`` (system specs), ``series`` (formal Puiseux series and
resonance conditions), ``auxw`` (the auxiliary function W), ``flow``
(numerical continuation, landing, monodromy) and ``cli``.
"""

from .errors import HamsingError
from .model import (
    CoeffPoly,
    HamiltonianSpec,
    autonomous_22,
    branching_23,
    branching_33,
    load_spec,
    make_spec,
    painleve_22,
    structural_constants,
)

__version__ = "0.1.0"

__all__ = [
    "CoeffPoly",
    "HamiltonianSpec",
    "HamsingError",
    "autonomous_22",
    "branching_23",
    "branching_33",
    "load_spec",
    "make_spec",
    "painleve_22",
    "structural_constants",
]
