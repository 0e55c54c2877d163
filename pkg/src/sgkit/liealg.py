"""Left-invariant calculus on a Lie algebra given by structure constants.

Conventions: ``c[k, i, j]`` is c^k_{ij} with [e_i, e_j] = sum_k c^k_{ij} e_k
(0-based array indices, 1-based in forms). On 1-forms the differential is
d alpha(X, Y) = -alpha([X, Y]); fixture files store de^k directly.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import linalg
from .errors import DimensionMismatch, SingularError
from .exterior import Form, endo_derivation, interior_product


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    dim: int
    c: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c)
        if c.shape != (self.dim,) * 3:
            raise DimensionMismatch("structure constants must have shape (n, n, n)")
        if any(c[k, i, j] != -c[k, j, i] for k in range(self.dim) for i in range(self.dim) for j in range(self.dim)):
            raise ValueError("structure constants are not antisymmetric")

    @property
    def exact(self) -> bool:
        return linalg.is_exact(self.c)

    @classmethod
    def abelian(cls, dim: int, exact: bool = True) -> "LieAlgebra":
        return cls(dim, linalg.zeros((dim,) * 3, exact))

    @classmethod
    def from_differentials(cls, dim: int, d: dict) -> "LieAlgebra":
        """Build from {k: de^k} with k 1-based and de^k a 2-form."""
        exact = all(f.exact for f in d.values())
        c = linalg.zeros((dim,) * 3, exact)
        for k, form in d.items():
            if form.dim != dim or (form.terms and form.grade != 2):
                raise DimensionMismatch(f"de^{k} must be a 2-form in dimension {dim}")
            for (i, j), v in form.terms.items():
                c[k - 1, i - 1, j - 1] = -v
                c[k - 1, j - 1, i - 1] = v
        return cls(dim, c)

    def differential_of_basis(self, k: int) -> Form:
        """de^k as a 2-form (k is 1-based)."""
        terms = {}
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                v = self.c[k - 1, i, j]
                if v != 0:
                    terms[(i + 1, j + 1)] = -v
        return Form(self.dim, terms)

    def bracket(self, x, y) -> np.ndarray:
        return np.einsum("kij,i,j->k", self.c, np.asarray(x), np.asarray(y))

    def ad(self, v) -> np.ndarray:
        """Matrix of X -> [v, X]."""
        return np.einsum("kij,i->kj", self.c, np.asarray(v))

    def to_float(self) -> "LieAlgebra":
        return LieAlgebra(self.dim, linalg.to_float(self.c))

    def to_json(self) -> dict:
        d = []
        for k in range(1, self.dim + 1):
            f = self.differential_of_basis(k)
            if f.terms:
                d.append({"of": k, "terms": f.to_json()["terms"]})
        return {"dim": self.dim, "d": d}

    @classmethod
    def from_json(cls, obj: dict) -> "LieAlgebra":
        dim = int(obj["dim"])
        d = {int(e["of"]): Form.from_json({"dim": dim, "terms": e["terms"]}) for e in obj.get("d", [])}
        if not d:
            return cls.abelian(dim)
        return cls.from_differentials(dim, d)


def jacobi_check(L: LieAlgebra, tol: float = 1e-12):
    """Return (ok, first violating (i, j, k) 1-based or None)."""
    n = L.dim
    c = L.c
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                # [[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j]
                for m in range(n):
                    s = sum(
                        c[l, i, j] * c[m, l, k] + c[l, j, k] * c[m, l, i] + c[l, k, i] * c[m, l, j]
                        for l in range(n)
                    )
                    if (s != 0) if L.exact else abs(s) > tol:
                        return False, (i + 1, j + 1, k + 1)
    return True, None


def ce_differential(L: LieAlgebra, a: Form) -> Form:
    """Chevalley-Eilenberg differential, extended from 1-forms as an antiderivation."""
    if a.dim != L.dim:
        raise DimensionMismatch("form and algebra dimensions differ")
    de = [L.differential_of_basis(k) for k in range(1, L.dim + 1)]
    if not a.exact:
        de = [f.to_float() for f in de]
    out = Form.zero(a.dim)
    for I, coef in a.terms.items():
        for p, i in enumerate(I):
            if de[i - 1].is_zero():
                continue
            left = Form.basis(a.dim, I[:p], coef)
            right = Form.basis(a.dim, I[p + 1 :], 1 if a.exact else 1.0)
            term = left ^ de[i - 1] ^ right
            out = out + (term if p % 2 == 0 else -term)
    return out


def lie_derivative(v, a: Form, L: LieAlgebra) -> Form:
    """Cartan formula L_v a = v -| da + d(v -| a)."""
    v = list(v)
    if len(v) != L.dim or a.dim != L.dim:
        raise DimensionMismatch("vector, form and algebra dimensions differ")
    out = Form.zero(a.dim)
    da = ce_differential(L, a)
    if da.terms:
        out = out + interior_product(v, da)
    if a.grade != 0:
        out = out + ce_differential(L, interior_product(v, a))
    return out


def koszul_connection(L: LieAlgebra, g) -> np.ndarray:
    """Levi-Civita connection of a left-invariant metric.

    Returns ``gamma`` with ``gamma[i]`` the matrix of Y -> nabla_{e_i} Y, so
    ``gamma[i][m, j]`` is Gamma^m_{ij}.
    """
    g = np.asarray(g)
    if g.shape != (L.dim, L.dim):
        raise DimensionMismatch("metric shape does not match algebra")
    c = L.c
    if linalg.is_exact(c) and not linalg.is_exact(g):
        c = linalg.to_float(c)
    elif linalg.is_exact(g) and not linalg.is_exact(c):
        g = linalg.to_float(g)
    try:
        ginv = linalg.inv(g)
    except SingularError:
        raise SingularError("metric is singular") from None
    cl = np.einsum("mij,mk->ijk", c, g)
    koszul = cl - np.transpose(cl, (2, 0, 1)) + np.transpose(cl, (1, 2, 0))
    half = Fraction(1, 2) if linalg.is_exact(g) else 0.5
    # koszul[i, j, k] = 2 g(nabla_i e_j, e_k)
    return np.einsum("mk,ijk->imj", ginv, koszul) * half


def riemann_ricci(L: LieAlgebra, g):
    """Curvature R[i, j] = matrix of R(e_i, e_j) and Ricci bilinear form.

    R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z and
    Ric(X, Y) = trace(Z -> R(Z, X) Y).
    """
    gamma = koszul_connection(L, g)
    c = L.c if linalg.is_exact(gamma) == linalg.is_exact(L.c) else linalg.to_float(L.c)
    R = np.einsum("iab,jbc->ijac", gamma, gamma)
    R = R - np.transpose(R, (1, 0, 2, 3)) - np.einsum("lij,lac->ijac", c, gamma)
    ric = np.einsum("ijik->jk", R)
    return R, ric


def ricci_endomorphism(L: LieAlgebra, g) -> np.ndarray:
    """Ric raised by g, as the endomorphism X -> Ric X."""
    _, ric = riemann_ricci(L, g)
    g = np.asarray(g)
    if linalg.is_exact(ric) != linalg.is_exact(g):
        g, ric = linalg.to_float(g), linalg.to_float(ric)
    return linalg.inv(g) @ ric


def is_automorphism(L: LieAlgebra, F, tol: float = 1e-12) -> bool:
    """F[X, Y] = [F X, F Y] for all basis pairs, and F invertible."""
    F = np.asarray(F)
    if linalg.det(F) == 0:
        return False
    lhs = np.einsum("ak,kij->aij", F, L.c)
    rhs = np.einsum("kpq,pi,qj->kij", L.c, F, F)
    diff = lhs - rhs
    if L.exact and linalg.is_exact(F):
        return all(v == 0 for v in diff.flat)
    return linalg.max_abs(diff) <= tol


def transport(L: LieAlgebra, A) -> LieAlgebra:
    """The bracket [u, v]_A = A^{-1}[A u, A v], making A an isomorphism onto L."""
    A = np.asarray(A)
    Ainv = linalg.inv(A)
    return LieAlgebra(L.dim, np.einsum("km,mpq,pi,qj->kij", Ainv, L.c, A, A))


def central_extension(L: LieAlgebra, k: int) -> LieAlgebra:
    """Prepend k central directions (new indices 1..k, base shifted by k)."""
    n = L.dim + k
    c = linalg.zeros((n, n, n), L.exact)
    c[k:, k:, k:] = L.c
    return LieAlgebra(n, c)


def derivation_of_forms(L: LieAlgebra, v, a: Form) -> Form:
    """-derivation(ad_v, a): the bracket form of the Lie derivative on invariant forms."""
    return -endo_derivation(L.ad(v), a)


def basis_vector(n: int, i: int, exact: bool = True) -> list:
    one, zero = (Fraction(1), Fraction(0)) if exact else (1.0, 0.0)
    return [one if j == i - 1 else zero for j in range(n)]


__all__ = [
    "LieAlgebra",
    "jacobi_check",
    "ce_differential",
    "lie_derivative",
    "koszul_connection",
    "riemann_ricci",
    "ricci_endomorphism",
    "is_automorphism",
    "transport",
    "central_extension",
]
