"""Invariant special geometric structures on Lie algebras.

Exterior algebra, Chevalley-Eilenberg calculus, stable forms for SU(2),
SU(3), G2 and Spin(7), the lifts between them, intrinsic torsion and the
torsion flow.
"""
from .errors import SgkitError
from .exterior import Form
from .liealg import LieAlgebra
from .structures import GStructure, check_model_type, model_structure

__version__ = "0.1.0"

__all__ = ["SgkitError", "Form", "LieAlgebra", "GStructure", "check_model_type", "model_structure"]
