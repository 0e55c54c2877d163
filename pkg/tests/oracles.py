"""Brute-force oracles and hypothesis strategies shared by the tests.

The oracles deliberately avoid the package's sparse algorithms: forms are
expanded to dense alternating arrays by summing over permutations, and
everything else is plain numpy loops.
"""
import itertools
import math
from fractions import Fraction

import numpy as np
from hypothesis import strategies as st

from sgkit import linalg
from sgkit.exterior import Form


def perm_sign(p):
    s = 1
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                s = -s
    return s


def dense(a: Form, k: int | None = None) -> np.ndarray:
    """Dense alternating array with a(e_I) = coefficient (object dtype)."""
    k = a.grade if k is None else k
    n = a.dim
    arr = np.zeros((n,) * k, dtype=object)
    arr[...] = Fraction(0)
    for idx, c in a.terms.items():
        for p in itertools.permutations(range(k)):
            arr[tuple(idx[q] - 1 for q in p)] = perm_sign(p) * c
    return arr


def undense(arr: np.ndarray) -> Form:
    n, k = arr.shape[0], arr.ndim
    return Form(n, {tuple(i + 1 for i in I): arr[I] for I in itertools.combinations(range(n), k)})


def wedge_oracle(a: Form, b: Form) -> Form:
    """(a^b)(v) = 1/(k! l!) sum_sigma sgn(sigma) a(v_sigma..) b(v_sigma..)."""
    k, l = a.grade, b.grade
    A, B = dense(a, k), dense(b, l)
    n = a.dim
    out = {}
    for I in itertools.combinations(range(n), k + l):
        tot = Fraction(0)
        for p in itertools.permutations(range(k + l)):
            J = [I[q] for q in p]
            tot += perm_sign(p) * A[tuple(J[:k])] * B[tuple(J[k:])]
        out[tuple(i + 1 for i in I)] = tot / (math.factorial(k) * math.factorial(l))
    return Form(n, out)


def pullback_oracle(M: np.ndarray, a: Form) -> Form:
    """a(M ., ..., M .) by contracting every slot of the dense array."""
    arr = dense(a)
    for ax in range(arr.ndim):
        arr = np.moveaxis(np.tensordot(arr, M, axes=([ax], [0])), -1, ax)
    return undense(arr)


def evaluate(a: Form, vectors) -> object:
    """a(v_1, .., v_k) via the dense array."""
    arr = dense(a)
    for v in vectors:
        arr = np.tensordot(np.asarray(v, dtype=object), arr, axes=([0], [0]))
    return arr if not isinstance(arr, np.ndarray) else arr[()]



# ---------------------------------------------------------------------------
# strategies

small_q = st.builds(Fraction, st.integers(-3, 3), st.integers(1, 3))
nonzero_q = small_q.filter(bool)


@st.composite
def forms(draw, dim=None, grade=None, max_terms=4):
    n = draw(st.sampled_from([5, 6, 7])) if dim is None else dim
    k = draw(st.integers(1, min(4, n - 1))) if grade is None else grade
    tuples = list(itertools.combinations(range(1, n + 1), k))
    chosen = draw(st.lists(st.sampled_from(tuples), min_size=1, max_size=max_terms, unique=True))
    return Form(n, {t: draw(nonzero_q) for t in chosen})


@st.composite
def rational_matrices(draw, n, invertible=True):
    entries = draw(st.lists(small_q, min_size=n * n, max_size=n * n))
    M = np.array(entries, dtype=object).reshape(n, n)
    if invertible:
        # diagonal shift keeps the draw small while making singular M rare
        M = M + linalg.identity(n) * 4
        if linalg.det(M) == 0:
            M = M + linalg.identity(n)
    return M


@st.composite
def spd_matrices(draw, n):
    """Rational symmetric positive definite: B^T B + I."""
    B = draw(rational_matrices(n, invertible=False))
    return B.T @ B + linalg.identity(n)


