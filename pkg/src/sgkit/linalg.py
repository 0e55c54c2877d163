"""Small dense linear algebra over exact rationals or binary64.

Matrices are numpy arrays. Exact matrices have ``dtype=object`` and hold
:class:`fractions.Fraction` entries; everything else is treated as float64.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

import numpy as np

from .errors import InconsistentSystem, InexactRoot, NotPositiveDefinite, SingularError


def is_exact_scalar(x) -> bool:
    return isinstance(x, Rational)


def is_exact(m) -> bool:
    m = np.asarray(m)
    return m.dtype == object


def exact_matrix(rows) -> np.ndarray:
    m = np.array(rows, dtype=object)
    return np.vectorize(Fraction, otypes=[object])(m) if m.size else m


def float_matrix(rows) -> np.ndarray:
    return np.array(np.asarray(rows, dtype=object).astype(float), dtype=float)


def identity(n: int, exact: bool = True) -> np.ndarray:
    if not exact:
        return np.eye(n)
    m = np.full((n, n), Fraction(0), dtype=object)
    for i in range(n):
        m[i, i] = Fraction(1)
    return m


def zeros(shape, exact: bool = True) -> np.ndarray:
    if not exact:
        return np.zeros(shape)
    return np.full(shape, Fraction(0), dtype=object)


def to_float(m) -> np.ndarray:
    return np.asarray(m, dtype=object).astype(float) if is_exact(m) else np.asarray(m, dtype=float)


def _integer_root(n: int, k: int) -> int | None:
    if n < 0:
        return None
    if n < 2:
        return n
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    return x if x**k == n else None


def root(x, k: int):
    """Positive real ``k``-th root; exact inputs must be perfect powers."""
    if is_exact_scalar(x):
        x = Fraction(x)
        if x < 0:
            raise InexactRoot(f"negative radicand {x}")
        p, q = _integer_root(x.numerator, k), _integer_root(x.denominator, k)
        if p is None or q is None:
            raise InexactRoot(f"{x} is not a perfect {k}-th power")
        return Fraction(p, q)
    if x < 0:
        raise InexactRoot(f"negative radicand {x}")
    return float(x) ** (1.0 / k)


def rref(m: np.ndarray):
    """Reduced row echelon form of an exact matrix; returns (R, pivot columns)."""
    a = [list(map(Fraction, row)) for row in np.asarray(m, dtype=object)]
    n_rows = len(a)
    n_cols = len(a[0]) if n_rows else 0
    pivots = []
    r = 0
    for c in range(n_cols):
        piv = next((i for i in range(r, n_rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        a[r] = [v / p for v in a[r]]
        for i in range(n_rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [vi - f * vr for vi, vr in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    return np.array(a, dtype=object).reshape(n_rows, n_cols), pivots


def nullspace(m: np.ndarray, tol: float = 1e-10) -> list[np.ndarray]:
    """Basis of the right kernel. Exact input gives an exact basis."""
    m = np.asarray(m)
    n_cols = m.shape[1]
    if m.shape[0] == 0:
        return [identity(n_cols, is_exact(m))[:, j] for j in range(n_cols)]
    if not is_exact(m):
        _, s, vt = np.linalg.svd(m)
        rank = int(np.sum(s > tol * max(1.0, s[0] if s.size else 0.0)))
        return [vt[j] for j in range(rank, n_cols)]
    r, pivots = rref(m)
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for f in free:
        v = zeros(n_cols)
        v[f] = Fraction(1)
        for row, pc in enumerate(pivots):
            v[pc] = -r[row, f]
        basis.append(v)
    return basis


def det(m: np.ndarray):
    m = np.asarray(m)
    if not is_exact(m):
        return float(np.linalg.det(m))
    a = [list(row) for row in m]
    n = len(a)
    d = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            d = -d
        d *= a[c][c]
        for i in range(c + 1, n):
            if a[i][c] != 0:
                f = a[i][c] / a[c][c]
                a[i] = [vi - f * vc for vi, vc in zip(a[i], a[c])]
    return d


def inv(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m)
    n = m.shape[0]
    if not is_exact(m):
        if abs(np.linalg.det(m)) < 1e-300:
            raise SingularError("matrix is singular")
        return np.linalg.inv(m)
    aug = np.concatenate([m, identity(n)], axis=1)
    r, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise SingularError("matrix is singular")
    return r[:, n:]


def solve(m: np.ndarray, b: np.ndarray, tol: float = 1e-9):
    """Solve a consistent (possibly overdetermined) system ``m x = b``.

    Returns ``(x, residual)`` with residual the max-norm of ``m x - b``.
    Raises :class:`InconsistentSystem` when exact residual is nonzero or the
    float residual exceeds ``tol`` (relative to the right-hand side scale).
    """
    m = np.asarray(m)
    b = np.asarray(b)
    if is_exact(m) or is_exact(b):
        aug = np.concatenate([np.asarray(m, dtype=object), np.asarray(b, dtype=object).reshape(-1, 1)], axis=1)
        r, pivots = rref(aug)
        n = m.shape[1]
        if n in pivots:
            raise InconsistentSystem("exact system has no solution")
        x = zeros(n)
        for row, pc in enumerate(pivots):
            x[pc] = r[row, n]
        res = m.dot(x) - b
        resid = max((abs(v) for v in res), default=Fraction(0))
        return x, resid
    x, *_ = np.linalg.lstsq(m, b, rcond=None)
    resid = float(np.max(np.abs(m @ x - b))) if b.size else 0.0
    if resid > tol * max(1.0, float(np.max(np.abs(b))) if b.size else 1.0):
        raise InconsistentSystem(f"residual {resid:.3e} exceeds tolerance")
    return x, resid


def is_positive_definite(g: np.ndarray) -> bool:
    """Sylvester criterion (exact) or Cholesky (float)."""
    g = np.asarray(g)
    if is_exact(g):
        n = g.shape[0]
        return all(det(g[:k, :k]) > 0 for k in range(1, n + 1))
    try:
        np.linalg.cholesky(0.5 * (g + g.T))
    except np.linalg.LinAlgError:
        return False
    return True


def require_positive_definite(g: np.ndarray, what: str = "metric") -> None:
    if not is_positive_definite(g):
        raise NotPositiveDefinite(f"{what} is not positive definite")


def min_eigenvalue(g: np.ndarray) -> float:
    g = to_float(g)
    return float(np.linalg.eigvalsh(0.5 * (g + g.T))[0])


def expm(b: np.ndarray) -> np.ndarray:
    """Matrix exponential by scaling and squaring of the Taylor series."""
    b = to_float(b)
    norm = np.linalg.norm(b, 1)
    s = max(0, int(math.ceil(math.log2(norm))) + 1) if norm > 0.5 else 0
    x = b / 2.0**s
    term = np.eye(b.shape[0])
    out = term.copy()
    for k in range(1, 30):
        term = term @ x / k
        out = out + term
        if np.max(np.abs(term)) < 1e-18:
            break
    for _ in range(s):
        out = out @ out
    return out


def max_abs(m) -> float:
    arr = np.asarray(m)
    if arr.size == 0:
        return 0.0
    return float(np.max(np.abs(to_float(arr))))
