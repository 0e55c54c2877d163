"""Stable forms for SU(2), SU(3), G2 and Spin(7) and the tensors they determine.

Each group is described by its defining forms:

    SU2    omega1, rho2, rho3   (dim 5)
    SU3    sigma, rho           (dim 6)
    G2     phi                  (dim 7)
    Spin7  Psi                  (dim 8)

Every construction below takes a reference volume mu = s e^{1..n} with s the
orientation sign and is equivariant under GL+(n) acting by inverse pullback.
In exact mode the roots that normalise volumes must be rational; otherwise
:class:`~sgkit.errors.InexactRoot` is raised and the caller can retry in
float mode.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np

from . import linalg
from .errors import (
    DegenerateStructure,
    DimensionMismatch,
    InexactRoot,
    NotPositiveDefinite,
    SgkitError,
)
from .exterior import (
    Form,
    basis_tuples,
    contract_basis,
    gl_action,
    hodge_star,
    infinitesimal_action,
    orientation_sign,
)

GROUPS = ("SU2", "SU3", "G2", "Spin7")
DIM = {"SU2": 5, "SU3": 6, "G2": 7, "Spin7": 8}
DEFINING = {
    "SU2": ("omega1", "rho2", "rho3"),
    "SU3": ("sigma", "rho"),
    "G2": ("phi",),
    "Spin7": ("Psi",),
}
STABILIZER_DIM = {"SU2": 3, "SU3": 8, "G2": 14, "Spin7": 21}

_MODEL_TEXT = {
    "Psi0": (8, "3456 3478 5678 -2358 2468 -2457 -2367 1357 -1467 -1458 -1368 1234 1256 1278"),
    "psi0": (7, "2345 2367 4567 -1247 1357 -1346 -1256"),
    "phi0": (7, "246 -356 -347 -257 123 145 167"),
    "sigma0": (6, "1234 1256 3456"),
    "rho0": (6, "135 -245 -236 -146"),
    "omega0": (6, "12 34 56"),
    "rhohat0": (6, "136 -246 235 145"),
    "omega1": (5, "23 45"),
    "rho2": (5, "124 -135"),
    "rho3": (5, "125 134"),
    "alpha0": (5, "1"),
    "omega2": (5, "24 -35"),
    "omega3": (5, "25 34"),
}

_MODEL_DEFINING = {
    "SU2": {"omega1": "omega1", "rho2": "rho2", "rho3": "rho3"},
    "SU3": {"sigma": "sigma0", "rho": "rho0"},
    "G2": {"phi": "phi0"},
    "Spin7": {"Psi": "Psi0"},
}


def model_form(name: str) -> Form:
    """One of the exact model tensors, e.g. ``model_form("phi0")``."""
    dim, text = _MODEL_TEXT[name]
    return Form.parse(dim, text)


def model_endo_I0() -> np.ndarray:
    """The model complex structure: I e_1 = e_2, I e_2 = -e_1, and so on."""
    m = linalg.zeros((6, 6))
    for k in (0, 2, 4):
        m[k + 1, k] = 1
        m[k, k + 1] = -1
    return m


# ---------------------------------------------------------------------------
# small helpers


def _ref(dim: int, exact: bool, s: int):
    """(reference volume form, its sign); mu = s e^{1..n}."""
    return Form.volume(dim, exact) * s, s


def _rel(form: Form, s: int):
    """Coefficient of a top form relative to mu = s e^{1..n}."""
    return form.top() * s


def _check_forms(forms, dim, grades):
    exact = None
    for f, k in zip(forms, grades):
        if f.dim != dim:
            raise DimensionMismatch(f"expected dimension {dim}, got {f.dim}")
        if f.terms and f.grade != k:
            raise DimensionMismatch(f"expected a {k}-form")
        if f.terms:
            if exact is None:
                exact = f.exact
            elif exact != f.exact:
                raise SgkitError("defining forms mix exact and float coefficients")
    return True if exact is None else exact


def _is_zero(x, exact: bool, tol: float) -> bool:
    return x == 0 if exact else abs(x) <= tol


def _forms_equal(a: Form, b: Form, tol: float = 1e-9) -> bool:
    if a.exact and b.exact:
        return a == b
    return a.to_float().allclose(b.to_float(), tol)


def evaluate(form: Form, idx) -> object:
    """form(e_{i_1}, ..., e_{i_k}) for 1-based indices in any order."""
    mono = Form.basis(form.dim, idx)
    if not mono.terms:
        return form.coefficient(())  # zero of the right mode
    (key, sign), = mono.terms.items()
    c = form.coefficient(key)
    return c if sign > 0 else -c


# ---------------------------------------------------------------------------
# G2


class G2Geometry(NamedTuple):
    g: np.ndarray
    eps: Form
    psi: Form


def g2_bilinear(phi: Form, orientation=1) -> np.ndarray:
    """b_ij with b_ij mu = (1/6)(e_i -| phi) ^ (e_j -| phi) ^ phi."""
    exact = _check_forms([phi], 7, [3])
    s = orientation_sign(orientation)
    six = 6 if exact else 6.0
    cs = [contract_basis(i, phi) for i in range(1, 8)]
    b = linalg.zeros((7, 7), exact)
    for i in range(7):
        for j in range(i, 7):
            v = _rel(cs[i] ^ cs[j] ^ phi, s) / six
            b[i, j] = b[j, i] = v
    return b


def g2_geometry(phi: Form, orientation=1) -> G2Geometry:
    """Metric, volume and coassociative 4-form of a positive 3-form in dim 7.

    g = det(b)^{-1/9} b and eps = det(b)^{1/9} mu; psi is the Hodge dual of phi.
    """
    s = orientation_sign(orientation)
    b = g2_bilinear(phi, s)
    if not (linalg.is_positive_definite(b) or linalg.is_positive_definite(-b)):
        raise NotPositiveDefinite("metric not positive definite")
    d = linalg.det(b)
    if d <= 0:
        raise DegenerateStructure("not a positive G2 3-form for this orientation")
    r = linalg.root(d, 9)
    g = b / r
    if not linalg.is_positive_definite(g):
        raise NotPositiveDefinite("metric not positive definite")
    mu, _ = _ref(7, phi.exact, s)
    eps = mu * r
    return G2Geometry(g, eps, hodge_star(phi, g, eps))


# ---------------------------------------------------------------------------
# SU(3)


class SU3Derived(NamedTuple):
    omega: Form
    I: np.ndarray
    rhohat: Form
    g: np.ndarray
    eps: Form


def _sigma_bivector(sigma: Form, mu: Form) -> Form:
    """The bivector w with w -| mu = sigma, stored in a Form (indices are vectors)."""
    w = {}
    for i, j in itertools.combinations(range(1, 7), 2):
        tau = contract_basis(j, contract_basis(i, mu))
        (comp, sign), = tau.terms.items()
        c = sigma.coefficient(comp)
        if c != 0:
            w[(i, j)] = c / sign
    return Form(6, w)


def _bivector_contract(w: Form, a: Form) -> Form:
    out = Form.zero(a.dim)
    for (i, j), c in w.terms.items():
        out = out + contract_basis(j, contract_basis(i, a)) * c
    return out


def su3_volume_sigma(sigma: Form, orientation=1):
    """Positive volume of a stable 4-form in dim 6, as a scalar relative to mu."""
    exact = _check_forms([sigma], 6, [4])
    mu, s = _ref(6, exact, orientation_sign(orientation))
    w = _sigma_bivector(sigma, mu)
    p = (w ^ w ^ w).top() * s / (6 if exact else 6.0)
    if p <= 0:
        raise DegenerateStructure("sigma is degenerate or wrongly oriented")
    return linalg.root(p, 2)


def su3_rho_matrix(rho: Form, orientation=1) -> np.ndarray:
    """M with M[j, i] mu = rho ^ (e_i -| rho) ^ e^j; equals 2 I times the volume."""
    exact = _check_forms([rho], 6, [3])
    s = orientation_sign(orientation)
    M = linalg.zeros((6, 6), exact)
    one = 1 if exact else 1.0
    for i in range(1, 7):
        left = rho ^ contract_basis(i, rho)
        for j in range(1, 7):
            M[j - 1, i - 1] = _rel(left ^ Form.basis(6, [j], one), s)
    return M


def su3_volume_rho(rho: Form, orientation=1):
    """Positive volume of a stable 3-form of SU(3) type: sqrt(-tr(M^2)/24)."""
    M = su3_rho_matrix(rho, orientation)
    t = -np.trace(M @ M) / (24 if linalg.is_exact(M) else 24.0)
    if t <= 0:
        raise DegenerateStructure("rho is not of SU(3) type")
    return linalg.root(t, 2)


def su3_derived(sigma: Form, rho: Form, orientation=1, tol: float = 1e-9) -> SU3Derived:
    exact = _check_forms([sigma, rho], 6, [4, 3])
    mu, s = _ref(6, exact, orientation_sign(orientation))
    w = _sigma_bivector(sigma, mu)
    lam = su3_volume_sigma(sigma, s)
    lam_rho = su3_volume_rho(rho, s)
    if not _is_zero(lam - lam_rho, exact, tol * max(1.0, abs(float(lam)))):
        raise DegenerateStructure("volumes of sigma and rho disagree")
    half = 2 if exact else 2.0
    omega = _bivector_contract(w, sigma) / (half * lam)
    I = su3_rho_matrix(rho, s) / (half * lam)
    if linalg.max_abs(I @ I + linalg.identity(6, exact)) > (0 if exact else tol):
        raise DegenerateStructure("I^2 is not -id")
    # single-slot substitution rhohat(X, Y, Z) = -rho(I X, Y, Z)
    terms = {}
    vals = {}
    for trip in itertools.permutations(range(1, 7), 3):
        vals[trip] = -sum(I[m - 1, trip[0] - 1] * evaluate(rho, (m, trip[1], trip[2])) for m in range(1, 7))
    for trip, v in vals.items():
        mono = Form.basis(6, trip)
        (key, sign), = mono.terms.items()
        if not _is_zero(v - sign * vals[key], exact, tol):
            raise DegenerateStructure("-rho(I., ., .) is not alternating")
        if trip == key and v != 0:
            terms[key] = v
    rhohat = Form(6, terms)
    cs = [contract_basis(i, rho) for i in range(1, 7)]
    G = linalg.zeros((6, 6), exact)
    for i in range(6):
        for j in range(6):
            G[i, j] = _rel(cs[i] ^ cs[j] ^ omega, s) / (half * lam)
    g = _symmetrize(G, exact, tol)
    return SU3Derived(omega, I, rhohat, g, mu * lam)


def _symmetrize(G: np.ndarray, exact: bool, tol: float) -> np.ndarray:
    if linalg.max_abs(G - G.T) > (0 if exact else tol):
        raise DegenerateStructure("metric candidate is not symmetric")
    half = (G + G.T) / (2 if exact else 2.0)
    if not linalg.is_positive_definite(half):
        raise NotPositiveDefinite("metric not positive definite")
    return half


# ---------------------------------------------------------------------------
# SU(2)


class SU2Volume(NamedTuple):
    P: np.ndarray
    Q: np.ndarray
    L: np.ndarray
    L2: np.ndarray
    trace: object
    eps: Form

    def K(self, x, a, y, b):
        """K(x, a, y, b) relative to mu^2; x, y vectors and a, b covectors."""
        return np.asarray(a) @ self.P @ np.asarray(b) * (np.asarray(x) @ self.Q @ np.asarray(y))


def su2_volume_data(omega1: Form, rho2: Form, rho3: Form, orientation=1) -> SU2Volume:
    """Recover the volume from the triple through K, L = tr K and tr(L^2).

    P[a, b] mu = rho2 ^ e^a ^ e^b and Q[x, y] mu = rho3 ^ (e_x -| omega1) ^ (e_y -| omega1),
    so that K(x, a, y, b) = P(a, b) Q(x, y) mu^2 and L = P^T Q as a matrix
    (L[b, y] is the e^b component of L e_y).
    """
    exact = _check_forms([omega1, rho2, rho3], 5, [2, 3, 3])
    mu, s = _ref(5, exact, orientation_sign(orientation))
    one = 1 if exact else 1.0
    e = [Form.basis(5, [i], one) for i in range(1, 6)]
    c = [contract_basis(i, omega1) for i in range(1, 6)]
    P = linalg.zeros((5, 5), exact)
    Q = linalg.zeros((5, 5), exact)
    for i in range(5):
        for j in range(5):
            P[i, j] = _rel(rho2 ^ e[i] ^ e[j], s)
            Q[i, j] = _rel(rho3 ^ c[i] ^ c[j], s)
    L = P.T @ Q
    L2 = L @ L
    tr = np.trace(L2)
    t = -tr / (4 if exact else 4.0)
    if t <= 0:
        raise DegenerateStructure("degenerate or wrongly oriented triple")
    return SU2Volume(P, Q, L, L2, tr, mu * linalg.root(t, 4))


def su2_volume(omega1: Form, rho2: Form, rho3: Form, orientation=1) -> Form:
    return su2_volume_data(omega1, rho2, rho3, orientation).eps


class SU2Derived(NamedTuple):
    alpha: Form
    omega2: Form
    omega3: Form
    g: np.ndarray
    eps: Form


def su2_derived(omega1: Form, rho2: Form, rho3: Form, orientation=1, tol: float = 1e-9) -> SU2Derived:
    s = orientation_sign(orientation)
    eps = su2_volume(omega1, rho2, rho3, s)
    exact = eps.exact
    lam = _rel(eps, s)
    two = 2 if exact else 2.0
    alpha = Form(5, {(i,): _rel(contract_basis(i, rho2) ^ rho2, s) / (two * lam) for i in range(1, 6)})
    c = [contract_basis(i, omega1) for i in range(1, 6)]

    def pair(rho):
        terms = {}
        for i, j in itertools.combinations(range(5), 2):
            terms[(i + 1, j + 1)] = -_rel(c[i] ^ c[j] ^ rho, s) / lam
        return Form(5, terms)

    omega2, omega3 = pair(rho2), pair(rho3)
    base = alpha ^ omega1
    c2 = [contract_basis(i, omega2) for i in range(1, 6)]
    c3 = [contract_basis(i, omega3) for i in range(1, 6)]
    a = [alpha.coefficient((i,)) for i in range(1, 6)]
    G = linalg.zeros((5, 5), exact)
    for i in range(5):
        for j in range(5):
            G[i, j] = a[i] * a[j] + _rel(base ^ c2[i] ^ c3[j], s) / lam
    return SU2Derived(alpha, omega2, omega3, _symmetrize(G, exact, tol), eps)


# ---------------------------------------------------------------------------
# stabilizers and Spin(7)


def _unit(n, a, b, exact):
    E = linalg.zeros((n, n), exact)
    E[a, b] = 1
    return E


def stabilizer_algebra(forms, dim: int, tol: float = 1e-10) -> list:
    """Basis of {B in gl(dim) : B acts trivially on every form}."""
    forms = list(forms)
    for f in forms:
        if f.dim != dim:
            raise DimensionMismatch("form dimension differs from dim")
    exact = all(f.exact for f in forms)
    if not exact:
        forms = [f.to_float() for f in forms]
    rows = []
    for f in forms:
        for k in sorted({len(i) for i in f.terms}):
            rows.extend(basis_tuples(dim, k))
    M = linalg.zeros((len(rows), dim * dim), exact)
    for a in range(dim):
        for b in range(dim):
            E = _unit(dim, a, b, exact)
            offset = 0
            for f in forms:
                img = infinitesimal_action(E, f)
                for k in sorted({len(i) for i in f.terms}):
                    for r, idx in enumerate(basis_tuples(dim, k)):
                        M[offset + r, a * dim + b] = img.coefficient(idx)
                    offset += len(basis_tuples(dim, k))
    if not rows:
        return [_unit(dim, a, b, exact) for a in range(dim) for b in range(dim)]
    return [v.reshape(dim, dim) for v in linalg.nullspace(M, tol)]


def invariant_metric(algebra: list, dim: int, tol: float = 1e-10) -> np.ndarray:
    """The symmetric form S, unique up to scale, with B^T S + S B = 0 for all B.

    Normalised to be positive definite with unit determinant up to a rational
    factor (exact) or unit Frobenius norm (float).
    """
    exact = all(linalg.is_exact(B) for B in algebra) if algebra else True
    pairs = [(i, j) for i in range(dim) for j in range(i, dim)]
    eqs = []
    for B in algebra:
        for p in range(dim):
            for q in range(p, dim):
                row = [0] * len(pairs)
                for u, (i, j) in enumerate(pairs):
                    # coefficient of S_ij in (B^T S + S B)_pq
                    v = 0
                    for a, b in ((i, j), (j, i)) if i != j else ((i, j),):
                        if b == q:
                            v += B[a, p]
                        if a == p:
                            v += B[b, q]
                    row[u] = v
                eqs.append(row)
    M = linalg.exact_matrix(eqs) if exact else np.array(eqs, dtype=float)
    null = linalg.nullspace(M, tol)
    if len(null) != 1:
        raise DegenerateStructure(f"invariant symmetric forms span dimension {len(null)}, expected 1")
    S = linalg.zeros((dim, dim), exact)
    for u, (i, j) in enumerate(pairs):
        S[i, j] = S[j, i] = null[0][u]
    if not linalg.is_positive_definite(S):
        S = -S
        if not linalg.is_positive_definite(S):
            raise NotPositiveDefinite("metric not positive definite")
    return S


class Spin7Geometry(NamedTuple):
    g: np.ndarray
    eps: Form


def spin7_geometry(Psi: Form, orientation=1) -> Spin7Geometry:
    """Metric and volume of a Cayley 4-form.

    The metric is the stabilizer-invariant quadratic form scaled so that its
    volume equals Psi ^ Psi / 14.
    """
    exact = _check_forms([Psi], 8, [4])
    s = orientation_sign(orientation)
    stab = stabilizer_algebra([Psi], 8)
    if len(stab) != 21:
        raise DegenerateStructure(f"stabilizer has dimension {len(stab)}, expected 21")
    S = invariant_metric(stab, 8)
    e = _rel(Psi ^ Psi, s) / (14 if exact else 14.0)
    if e <= 0:
        raise DegenerateStructure("Psi ^ Psi is not positive for this orientation")
    lam = linalg.root(e * e / linalg.det(S), 8)
    mu, _ = _ref(8, exact, s)
    return Spin7Geometry(S * lam, mu * e)


# ---------------------------------------------------------------------------
# G-structures


@dataclass(frozen=True)
class Derived:
    g: np.ndarray
    eps: Form
    aux: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class GStructure:
    """A group tag with its defining forms; derived tensors are computed lazily."""

    group: str
    forms: dict
    orientation: int = 1

    def __post_init__(self):
        if self.group not in DIM:
            raise SgkitError(f"unknown group {self.group!r}")
        names = DEFINING[self.group]
        if set(self.forms) != set(names):
            raise SgkitError(f"{self.group} needs forms {names}")
        for f in self.forms.values():
            if f.dim != DIM[self.group]:
                raise DimensionMismatch(f"{self.group} forms live in dimension {DIM[self.group]}")

    @property
    def dim(self) -> int:
        return DIM[self.group]

    @property
    def exact(self) -> bool:
        return all(f.exact for f in self.forms.values())

    def __getitem__(self, name: str) -> Form:
        return self.form(name)

    def form(self, name: str) -> Form:
        if name in self.forms:
            return self.forms[name]
        if name in self.derived.aux:
            return self.derived.aux[name]
        raise KeyError(name)

    @property
    def defining(self) -> list:
        return [self.forms[n] for n in DEFINING[self.group]]

    @cached_property
    def derived(self) -> Derived:
        return derive(self)

    @property
    def metric(self) -> np.ndarray:
        return self.derived.g

    @property
    def volume(self) -> Form:
        return self.derived.eps

    def act(self, A) -> "GStructure":
        """Gauge deformation A . s on every defining form."""
        return GStructure(self.group, {k: gl_action(A, f) for k, f in self.forms.items()}, self.orientation)

    def to_float(self) -> "GStructure":
        return GStructure(self.group, {k: f.to_float() for k, f in self.forms.items()}, self.orientation)

    def same_forms(self, other: "GStructure", tol: float = 1e-9) -> bool:
        return self.group == other.group and all(
            _forms_equal(self.forms[k], other.forms[k], tol) for k in self.forms
        )

    def to_json(self) -> dict:
        return {
            "group": self.group,
            "dim": self.dim,
            "orientation": self.orientation,
            "forms": {k: self.forms[k].to_json() for k in DEFINING[self.group]},
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GStructure":
        forms = {k: Form.from_json(v) for k, v in obj["forms"].items()}
        return cls(obj["group"], forms, int(obj.get("orientation", 1)))


def derive(s: GStructure) -> Derived:
    f = s.forms
    if s.group == "G2":
        r = g2_geometry(f["phi"], s.orientation)
        return Derived(r.g, r.eps, {"psi": r.psi})
    if s.group == "SU3":
        r = su3_derived(f["sigma"], f["rho"], s.orientation)
        return Derived(r.g, r.eps, {"omega": r.omega, "I": r.I, "rhohat": r.rhohat})
    if s.group == "SU2":
        r = su2_derived(f["omega1"], f["rho2"], f["rho3"], s.orientation)
        return Derived(r.g, r.eps, {"alpha": r.alpha, "omega2": r.omega2, "omega3": r.omega3})
    r = spin7_geometry(f["Psi"], s.orientation)
    return Derived(r.g, r.eps, {})


def model_structure(group: str) -> GStructure:
    return GStructure(group, {k: model_form(v) for k, v in _MODEL_DEFINING[group].items()})


class ModelCheck(NamedTuple):
    ok: bool
    failures: list


def _group_identities(s: GStructure, d: Derived) -> list:
    eps = d.eps
    out = []
    if s.group == "SU2":
        w1, w2, w3 = s["omega1"], d.aux["omega2"], d.aux["omega3"]
        if not (_forms_equal(w1 ^ w1, w2 ^ w2) and _forms_equal(w1 ^ w1, w3 ^ w3)):
            out.append("omega1^2, omega2^2, omega3^2 differ")
        if not _forms_equal(d.aux["alpha"] ^ w1 ^ w1, eps * 2):
            out.append("alpha ^ omega1^2 / 2 is not the volume")
    elif s.group == "SU3":
        w = d.aux["omega"]
        if not _forms_equal(w ^ s["rho"], Form.zero(6)):
            out.append("omega ^ rho is not zero")
        if not _forms_equal(w ^ w ^ w, eps * 6):
            out.append("omega^3 / 6 is not the volume")
    elif s.group == "G2":
        if not _forms_equal(s["phi"] ^ d.aux["psi"], eps * 7):
            out.append("phi ^ psi is not 7 vol")
    else:
        if not _forms_equal(s["Psi"] ^ s["Psi"], eps * 14):
            out.append("Psi ^ Psi is not 14 vol")
    return out


def check_model_type(s: GStructure) -> ModelCheck:
    """Derived-tensor sanity: definite metric, positive volume, stabilizer
    dimension, and the algebraic identities of the group.

    Exact input whose normalising roots are irrational is checked in float mode.
    """
    failures = []
    t = s
    try:
        try:
            d = t.derived
        except InexactRoot:
            t = s.to_float()
            d = t.derived
    except SgkitError as exc:
        return ModelCheck(False, [str(exc)])
    if not linalg.is_positive_definite(d.g):
        failures.append("metric not positive definite")
    if not _rel(d.eps, t.orientation) > 0:
        failures.append("volume not positive")
    stab = stabilizer_algebra(t.defining, t.dim)
    if len(stab) != STABILIZER_DIM[t.group]:
        failures.append(f"stabilizer dimension {len(stab)} != {STABILIZER_DIM[t.group]}")
    failures.extend(_group_identities(t, d))
    return ModelCheck(not failures, failures)


__all__ = [
    "GROUPS",
    "DIM",
    "DEFINING",
    "STABILIZER_DIM",
    "model_form",
    "model_structure",
    "model_endo_I0",
    "evaluate",
    "G2Geometry",
    "g2_bilinear",
    "g2_geometry",
    "SU3Derived",
    "su3_volume_sigma",
    "su3_volume_rho",
    "su3_rho_matrix",
    "su3_derived",
    "SU2Volume",
    "su2_volume_data",
    "su2_volume",
    "SU2Derived",
    "su2_derived",
    "stabilizer_algebra",
    "invariant_metric",
    "Spin7Geometry",
    "spin7_geometry",
    "Derived",
    "GStructure",
    "derive",
    "ModelCheck",
    "check_model_type",
]
