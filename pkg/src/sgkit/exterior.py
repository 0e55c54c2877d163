"""Sparse exterior algebra on R^n, n in 5..8.

A :class:`Form` maps strictly increasing index tuples (1-based) to
coefficients. Coefficients are either all :class:`~fractions.Fraction`
(exact mode) or all ``float`` (float mode); the two never mix.

Forms are evaluated with the determinant convention, e^{12}(e_1, e_2) = 1,
and endomorphisms act on forms by inverse pullback::

    (A . a)(X_1, ..., X_k) = a(A^{-1} X_1, ..., A^{-1} X_k)

so that A^{-1} . vol = det(A) vol.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb

import numpy as np

from . import linalg
from .errors import DimensionMismatch, ModeMismatch, NotPositiveDefinite, SgkitError

DIMS = range(1, 9)


def _normalize_coef(c):
    if isinstance(c, (bool, np.bool_)):
        raise TypeError("boolean coefficient")
    if isinstance(c, (int, np.integer)):
        return Fraction(int(c))
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (float, np.floating)):
        return float(c)
    raise TypeError(f"unsupported coefficient type {type(c).__name__}")


def _mode_of(c) -> str:
    return "exact" if isinstance(c, Fraction) else "float"


def _merge_sign(a: tuple, b: tuple) -> int:
    """Sign of the shuffle sorting a+b, or 0 when they share an index."""
    inv = 0
    j = 0
    for x in a:
        while j < len(b) and b[j] < x:
            j += 1
        if j < len(b) and b[j] == x:
            return 0
        inv += j
    return -1 if inv & 1 else 1


def _merge(a: tuple, b: tuple) -> tuple:
    return tuple(sorted(a + b))


class Form:
    """An element of the exterior algebra of (R^dim)*."""

    __slots__ = ("dim", "terms", "_mode")

    def __init__(self, dim: int, terms: dict | None = None):
        if dim not in DIMS:
            raise DimensionMismatch(f"unsupported dimension {dim}")
        clean = {}
        mode = None
        for idx, c in (terms or {}).items():
            idx = tuple(int(i) for i in idx)
            if any(i < 1 or i > dim for i in idx) or any(
                idx[k] >= idx[k + 1] for k in range(len(idx) - 1)
            ):
                raise SgkitError(f"index tuple {idx} is not strictly increasing in 1..{dim}")
            c = _normalize_coef(c)
            m = _mode_of(c)
            if mode is None:
                mode = m
            elif mode != m:
                raise ModeMismatch("form mixes exact and float coefficients")
            if c != 0:
                clean[idx] = c
        self.dim = dim
        self.terms = clean
        self._mode = mode if clean else None

    # construction helpers -------------------------------------------------
    @classmethod
    def zero(cls, dim: int) -> "Form":
        return cls(dim, {})

    @classmethod
    def basis(cls, dim: int, idx, coef=1) -> "Form":
        """The monomial coef * e^{idx}; idx may be unsorted (sign applied)."""
        idx = tuple(idx)
        if len(set(idx)) != len(idx):
            return cls(dim, {})
        perm = sorted(range(len(idx)), key=lambda k: idx[k])
        sign = _perm_sign(perm)
        return cls(dim, {tuple(sorted(idx)): sign * _normalize_coef(coef)})

    @classmethod
    def parse(cls, dim: int, text: str) -> "Form":
        """Parse signed digit monomials, e.g. ``"246 -356 +123"``.

        A term may carry a rational prefactor: ``"1/2*12"``.
        """
        out = cls.zero(dim)
        for tok in text.split():
            sign = -1 if tok.startswith("-") else 1
            tok = tok.lstrip("+-")
            coef = Fraction(1)
            if "*" in tok:
                c, tok = tok.split("*")
                coef = Fraction(c)
            out = out + cls.basis(dim, [int(ch) for ch in tok], sign * coef)
        return out

    @classmethod
    def volume(cls, dim: int, exact: bool = True) -> "Form":
        return cls(dim, {tuple(range(1, dim + 1)): Fraction(1) if exact else 1.0})

    @classmethod
    def from_vector(cls, dim: int, v) -> "Form":
        """The 1-form sum_i v[i] e^{i+1}."""
        return cls(dim, {(i + 1,): _normalize_coef(c) for i, c in enumerate(v)})

    # properties -----------------------------------------------------------
    @property
    def mode(self) -> str | None:
        return self._mode

    @property
    def exact(self) -> bool:
        return self._mode != "float"

    @property
    def grade(self) -> int | None:
        """Common degree of all terms; ``None`` for mixed forms (zero is grade 0)."""
        degs = {len(k) for k in self.terms}
        if not degs:
            return 0
        return degs.pop() if len(degs) == 1 else None

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, idx) -> object:
        idx = tuple(idx)
        if idx in self.terms:
            return self.terms[idx]
        return 0.0 if self._mode == "float" else Fraction(0)

    def top(self):
        """Coefficient of e^{1..dim}."""
        return self.coefficient(tuple(range(1, self.dim + 1)))

    def norm(self) -> float:
        return max((abs(float(c)) for c in self.terms.values()), default=0.0)

    def to_float(self) -> "Form":
        return Form(self.dim, {k: float(v) for k, v in self.terms.items()})

    def homogeneous_part(self, k: int) -> "Form":
        return Form(self.dim, {i: c for i, c in self.terms.items() if len(i) == k})

    # arithmetic -----------------------------------------------------------
    def _check(self, other: "Form") -> None:
        if not isinstance(other, Form):
            raise TypeError("expected a Form")
        if self.dim != other.dim:
            raise DimensionMismatch(f"dimensions {self.dim} and {other.dim} differ")
        if self._mode and other._mode and self._mode != other._mode:
            raise ModeMismatch("cannot combine exact and float forms")

    def __add__(self, other: "Form") -> "Form":
        self._check(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return Form(self.dim, out)

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def __neg__(self) -> "Form":
        return Form(self.dim, {k: -v for k, v in self.terms.items()})

    def __mul__(self, s) -> "Form":
        if isinstance(s, Form):
            return wedge(self, s)
        s = self._scalar(s)
        if self._mode and _mode_of(s) != self._mode:
            raise ModeMismatch("scalar mode differs from form mode")
        return Form(self.dim, {k: v * s for k, v in self.terms.items()})

    __rmul__ = __mul__

    def _scalar(self, s):
        """Plain integers are mode-neutral and take the form's mode."""
        if isinstance(s, (int, np.integer)) and not isinstance(s, (bool, np.bool_)) and self._mode == "float":
            return float(s)
        return _normalize_coef(s)

    def __truediv__(self, s) -> "Form":
        s = self._scalar(s)
        return self * (Fraction(1) / s if isinstance(s, Fraction) else 1.0 / s)

    def __xor__(self, other: "Form") -> "Form":
        return wedge(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Form):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def __hash__(self):
        return hash((self.dim, frozenset(self.terms.items())))

    def allclose(self, other: "Form", tol: float = 1e-10) -> bool:
        if self.dim != other.dim:
            return False
        keys = set(self.terms) | set(other.terms)
        return all(abs(float(self.coefficient(k)) - float(other.coefficient(k))) <= tol for k in keys)

    def __repr__(self) -> str:
        if not self.terms:
            return f"Form({self.dim}, 0)"
        parts = []
        for k in sorted(self.terms, key=lambda t: (len(t), t)):
            c = self.terms[k]
            parts.append(f"{c}*e{''.join(map(str, k))}" if k else f"{c}")
        return f"Form({self.dim}, " + " + ".join(parts) + ")"

    # dense conversion -----------------------------------------------------
    def to_dense(self) -> np.ndarray:
        """Fully antisymmetric float array of shape (dim,)*k."""
        k = self.grade
        if k is None:
            raise SgkitError("dense form of a mixed-degree form")
        arr = np.zeros((self.dim,) * k)
        for idx, c in self.terms.items():
            base = tuple(i - 1 for i in idx)
            for perm in itertools.permutations(range(k)):
                arr[tuple(base[p] for p in perm)] = _perm_sign(perm) * float(c)
        return arr

    @classmethod
    def from_dense(cls, arr: np.ndarray, tol: float = 0.0) -> "Form":
        arr = np.asarray(arr, dtype=float)
        dim = arr.shape[0] if arr.ndim else 1
        k = arr.ndim
        terms = {}
        for idx in itertools.combinations(range(dim), k):
            v = float(arr[idx])
            if abs(v) > tol:
                terms[tuple(i + 1 for i in idx)] = v
        return cls(dim, terms)

    # json -----------------------------------------------------------------
    def to_json(self) -> dict:
        terms = []
        for idx in sorted(self.terms, key=lambda t: (len(t), t)):
            c = self.terms[idx]
            terms.append({"idx": list(idx), "c": str(c) if isinstance(c, Fraction) else float(c)})
        return {"dim": self.dim, "terms": terms}

    @classmethod
    def from_json(cls, obj: dict) -> "Form":
        terms = {}
        for t in obj["terms"]:
            c = t["c"]
            c = Fraction(c) if isinstance(c, str) else (Fraction(c) if isinstance(c, int) else float(c))
            idx = tuple(t["idx"])
            terms[idx] = terms.get(idx, 0) + c
        return cls(int(obj["dim"]), terms)


def _perm_sign(perm) -> int:
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def wedge(*forms: Form) -> Form:
    if not forms:
        raise SgkitError("wedge of nothing")
    out = forms[0]
    for b in forms[1:]:
        out = _wedge2(out, b)
    return out


def _wedge2(a: Form, b: Form) -> Form:
    a._check(b)
    out: dict = {}
    for I, x in a.terms.items():
        for J, y in b.terms.items():
            s = _merge_sign(I, J)
            if s == 0:
                continue
            K = _merge(I, J)
            v = x * y if s > 0 else -(x * y)
            out[K] = out[K] + v if K in out else v
    return Form(a.dim, out)


def contract_basis(i: int, a: Form) -> Form:
    """e_i contracted into the first slot of a."""
    out: dict = {}
    for I, c in a.terms.items():
        if i in I:
            p = I.index(i)
            J = I[:p] + I[p + 1 :]
            v = c if p % 2 == 0 else -c
            out[J] = out[J] + v if J in out else v
    return Form(a.dim, out)


def interior_product(x, a: Form) -> Form:
    """x contracted into the first slot of a; x is a coefficient vector."""
    x = list(x)
    if len(x) != a.dim:
        raise DimensionMismatch("vector and form dimensions differ")
    if a.terms and a.grade == 0:
        raise SgkitError("contraction of a 0-form")
    out = Form.zero(a.dim)
    for i, xi in enumerate(x):
        if xi == 0:
            continue
        out = out + contract_basis(i + 1, a) * _normalize_coef(xi)
    return out


def _check_endo(B, a: Form) -> np.ndarray:
    B = np.asarray(B)
    if B.shape != (a.dim, a.dim):
        raise DimensionMismatch(f"endomorphism of shape {B.shape} on dimension {a.dim}")
    if a.terms:
        if a.exact and not linalg.is_exact(B):
            raise ModeMismatch("float endomorphism acting on exact form")
        if not a.exact and linalg.is_exact(B):
            B = linalg.to_float(B)
    return B


def _covector_image(M: np.ndarray, j: int, dim: int) -> Form:
    """The 1-form e^j o M, i.e. sum_i M[j-1, i] e^{i+1}."""
    return Form(dim, {(i + 1,): M[j - 1, i] for i in range(dim) if M[j - 1, i] != 0})


def gl_action(A, a: Form) -> Form:
    """Inverse-pullback action A . a = a(A^{-1} ., ..., A^{-1} .)."""
    A = _check_endo(A, a)
    Ainv = linalg.inv(A)
    if not a.terms:
        return a
    if not a.exact:
        return _gl_action_dense(Ainv, a)
    rows = {}
    out = Form.zero(a.dim)
    for I, c in a.terms.items():
        if not I:
            out = out + Form(a.dim, {(): c})
            continue
        factors = []
        for j in I:
            if j not in rows:
                rows[j] = _covector_image(Ainv, j, a.dim)
            factors.append(rows[j])
        out = out + wedge(*factors) * c
    return out


def _gl_action_dense(Ainv: np.ndarray, a: Form) -> Form:
    out = Form.zero(a.dim).to_float()
    for k in sorted({len(i) for i in a.terms}):
        part = a.homogeneous_part(k)
        arr = part.to_dense()
        for ax in range(k):
            arr = np.moveaxis(np.tensordot(arr, Ainv, axes=([ax], [0])), -1, ax)
        out = out + Form.from_dense(arr) if k else out + part
    return out


def endo_derivation(B, a: Form) -> Form:
    """Sum over slots of a(X_1, .., B X_j, .., X_k)."""
    B = _check_endo(B, a)
    out: dict = {}
    n = a.dim
    for I, c in a.terms.items():
        for m, j in enumerate(I):
            for i in range(1, n + 1):
                bji = B[j - 1, i - 1]
                if bji == 0 or (i != j and i in I):
                    continue
                new = I[:m] + (i,) + I[m + 1 :]
                perm = sorted(range(len(new)), key=lambda q: new[q])
                key = tuple(new[q] for q in perm)
                v = c * bji if _perm_sign(perm) > 0 else -(c * bji)
                out[key] = out[key] + v if key in out else v
    return Form(n, out)


def infinitesimal_action(B, a: Form) -> Form:
    """d/ds at s=0 of exp(sB) . a, which equals -endo_derivation(B, a)."""
    return -endo_derivation(B, a)


def orientation_sign(orientation) -> int:
    if orientation is None:
        return 1
    if isinstance(orientation, Form):
        t = orientation.top()
        if t == 0 or orientation.grade != orientation.dim:
            raise SgkitError("orientation must be a nonzero top form")
        return 1 if t > 0 else -1
    return 1 if orientation > 0 else -1


def _minor(M: np.ndarray, rows, cols):
    sub = M[np.ix_([r - 1 for r in rows], [c - 1 for c in cols])]
    if not rows:
        return Fraction(1) if linalg.is_exact(M) else 1.0
    return linalg.det(sub)


def hodge_star(a: Form, g, orientation=None) -> Form:
    """Riemannian Hodge star with respect to metric g and an orientation."""
    g = np.asarray(g)
    n = a.dim
    if g.shape != (n, n):
        raise DimensionMismatch("metric shape does not match form dimension")
    if a.exact and a.terms and not linalg.is_exact(g):
        raise ModeMismatch("float metric with exact form")
    if not a.exact and linalg.is_exact(g):
        g = linalg.to_float(g)
    if not linalg.is_positive_definite(g):
        raise NotPositiveDefinite("metric is not positive definite")
    ginv = linalg.inv(g)
    vol = linalg.root(linalg.det(g), 2) * orientation_sign(orientation)
    full = tuple(range(1, n + 1))
    out = Form.zero(n)
    by_grade: dict = {}
    for J, c in a.terms.items():
        by_grade.setdefault(len(J), []).append((J, c))
    for k, items in by_grade.items():
        for I in itertools.combinations(full, k):
            raised = sum((c * _minor(ginv, I, J) for J, c in items), 0)
            if raised == 0:
                continue
            Ic = tuple(i for i in full if i not in I)
            sign = _merge_sign(I, Ic)
            out = out + Form(n, {Ic: raised * vol * sign})
    return out


def grade_dimension(n: int, k: int) -> int:
    return comb(n, k)


def basis_tuples(n: int, k: int):
    return list(itertools.combinations(range(1, n + 1), k))
