"""Intrinsic torsion of an invariant G2 structure.

The torsion is the endomorphism T with nabla_X phi = -(T X) -| psi for the
Levi-Civita connection of the induced metric.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import linalg
from .errors import DimensionMismatch, InconsistentSystem, PreconditionError, SgkitError
from .exterior import Form, basis_tuples, contract_basis, endo_derivation
from .liealg import LieAlgebra, is_automorphism, koszul_connection
from .structures import GStructure


def covariant_derivative_form(L: LieAlgebra, g, a: Form) -> list:
    """[nabla_{e_1} a, ..., nabla_{e_n} a] for an invariant form a."""
    if a.dim != L.dim:
        raise DimensionMismatch("form and algebra dimensions differ")
    gamma = koszul_connection(L, g)
    if a.exact != linalg.is_exact(gamma):
        if a.exact:
            a = a.to_float()
        else:
            gamma = linalg.to_float(gamma)
    return [-endo_derivation(gamma[i], a) for i in range(L.dim)]


def _as_vector(a: Form, tuples: list, exact: bool) -> np.ndarray:
    zero = Fraction(0) if exact else 0.0
    return np.array([a.terms.get(t, zero) for t in tuples], dtype=object if exact else float)


def contraction_matrix(psi: Form) -> np.ndarray:
    """Columns are the coefficient vectors of -(e_m -| psi) over 3-tuples."""
    tuples = list(basis_tuples(psi.dim, 3))
    cols = [_as_vector(-contract_basis(m, psi), tuples, psi.exact) for m in range(1, psi.dim + 1)]
    return np.stack(cols, axis=1)


def torsion_split(T, g):
    """Split T into its g-self-adjoint and g-skew parts."""
    T, g = np.asarray(T), np.asarray(g)
    if linalg.is_exact(T) != linalg.is_exact(g):
        T, g = linalg.to_float(T), linalg.to_float(g)
    adj = linalg.inv(g) @ T.T @ g
    half = Fraction(1, 2) if linalg.is_exact(T) else 0.5
    return (T + adj) * half, (T - adj) * half


def alt_two_form(alt, g) -> Form:
    """tau(X, Y) = g(alt X, Y)."""
    alt, g = np.asarray(alt), np.asarray(g)
    m = alt.T @ g
    n = m.shape[0]
    return Form(n, {(i + 1, j + 1): m[i, j] for i in range(n) for j in range(i + 1, n)})


@dataclass(frozen=True, eq=False)
class TorsionData:
    T: np.ndarray
    sym: np.ndarray
    alt: np.ndarray
    residual: object

    @property
    def exact(self) -> bool:
        return linalg.is_exact(self.T)

    def is_symmetric(self, tol: float = 1e-9) -> bool:
        if self.exact:
            return all(v == 0 for v in self.alt.flat)
        return linalg.max_abs(self.alt) <= tol

    def to_json(self) -> dict:
        def mat(m):
            return [[str(v) if isinstance(v, Fraction) else float(v) for v in row] for row in m]

        r = self.residual
        return {
            "T": mat(self.T),
            "sym": mat(self.sym),
            "alt": mat(self.alt),
            "residual": str(r) if isinstance(r, Fraction) else float(r),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TorsionData":
        def mat(rows):
            vals = [[Fraction(v) if isinstance(v, str) else v for v in row] for row in rows]
            exact = all(isinstance(v, Fraction) for row in vals for v in row)
            return np.array(vals, dtype=object if exact else float)

        r = obj["residual"]
        return cls(mat(obj["T"]), mat(obj["sym"]), mat(obj["alt"]), Fraction(r) if isinstance(r, str) else r)


def intrinsic_torsion(L: LieAlgebra, s: GStructure, tol: float = 1e-9) -> TorsionData:
    if s.group != "G2":
        raise SgkitError("intrinsic torsion is computed for G2 structures")
    if s.dim != L.dim:
        raise DimensionMismatch("structure and algebra dimensions differ")
    exact = s.exact and L.exact
    if not exact:
        s, L = s.to_float(), L.to_float() if L.exact else L
    g, phi, psi = s.metric, s["phi"], s["psi"]
    M = contraction_matrix(psi)
    tuples = list(basis_tuples(s.dim, 3))
    cols, worst = [], Fraction(0) if exact else 0.0
    for i, dphi in enumerate(covariant_derivative_form(L, g, phi)):
        try:
            x, r = linalg.solve(M, _as_vector(dphi, tuples, exact), tol)
        except InconsistentSystem as exc:
            raise InconsistentSystem(f"nabla_{i + 1} phi is not of type 7: {exc}") from None
        cols.append(x)
        worst = max(worst, r)
    T = np.stack(cols, axis=1)
    sym, alt = torsion_split(T, g)
    return TorsionData(T, sym, alt, worst)


def torsion_equivariance_check(L: LieAlgebra, s: GStructure, F) -> object:
    """max |T(F^* s) - F^{-1} T(s) F| for an automorphism F.

    F^* s is the pullback, i.e. the gauge action of F^{-1}.
    """
    F = np.asarray(F)
    if not is_automorphism(L, F):
        raise PreconditionError("F is not an automorphism of the algebra")
    Finv = linalg.inv(F)
    T = intrinsic_torsion(L, s).T
    T_pull = intrinsic_torsion(L, s.act(Finv)).T
    diff = T_pull - Finv @ T @ F
    if linalg.is_exact(diff):
        return max((abs(v) for v in diff.flat), default=Fraction(0))
    return linalg.max_abs(diff)


__all__ = [
    "covariant_derivative_form",
    "contraction_matrix",
    "torsion_split",
    "alt_two_form",
    "TorsionData",
    "intrinsic_torsion",
    "torsion_equivariance_check",
]
