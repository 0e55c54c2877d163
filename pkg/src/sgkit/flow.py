"""The intrinsic torsion flow  A' = T(A . s0) A,  A(0) = id.

All tensors along the flow come from the gauge A: psi_t = A . psi0,
g_t = A . g0. Instead of rebuilding the structure every step we use
naturality: A is an isomorphism from the algebra with transported bracket
c_A = A^{-1}[A ., A .] to the original one, so

    T(A . s0; c) = A T(s0; c_A) A^{-1},

and T(s0; c) is linear in c for fixed s0. That linear map is assembled
once (exactly) and makes each field evaluation a handful of einsums. The
same linearity lets truncated power series be pushed through the field for
the Taylor coefficients of A.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import linalg
from .errors import PreconditionError, SgkitError
from .exterior import Form, basis_tuples
from .liealg import LieAlgebra, ce_differential, riemann_ricci
from .lifts import hypo_check
from .structures import GStructure


def _dense(a: Form, exact: bool) -> np.ndarray:
    """Fully antisymmetric array of a homogeneous form (object dtype if exact)."""
    import itertools

    from .exterior import _perm_sign

    k = a.grade
    arr = linalg.zeros((a.dim,) * k, exact)
    for idx, c in a.terms.items():
        base = tuple(i - 1 for i in idx)
        for perm in itertools.permutations(range(k)):
            v = c if exact else float(c)
            arr[tuple(base[p] for p in perm)] = v if _perm_sign(perm) > 0 else -v
    return arr


def _bracket_basis(n: int):
    """Pairs (k, i, j) with i < j indexing antisymmetric structure constants."""
    return [(k, i, j) for k in range(n) for i in range(n) for j in range(i + 1, n)]


def _bracket_vector(c: np.ndarray, basis) -> np.ndarray:
    ks, is_, js = (np.array(x) for x in zip(*basis))
    return c[..., ks, is_, js]


class TorsionMap:
    """The linear map c -> T(s0; c) for a fixed G2 structure s0."""

    def __init__(self, s0: GStructure):
        if s0.group != "G2":
            raise SgkitError("the flow is defined for G2 structures")
        n = s0.dim
        self.n = n
        self.s0 = s0
        self.exact = s0.exact
        self.g0 = s0.metric
        g = linalg.to_float(self.g0)
        phi = _dense(s0["phi"], False)
        psi = _dense(s0["psi"], False)
        tuples = [tuple(i - 1 for i in t) for t in basis_tuples(n, 3)]
        ta, tb, tc = (np.array(x) for x in zip(*tuples))
        # columns -(e_m -| psi) on increasing triples
        P = -np.stack([psi[m][ta, tb, tc] for m in range(n)], axis=1)
        left = np.linalg.solve(P.T @ P, P.T)
        self.basis = _bracket_basis(n)
        nb = len(self.basis)
        cb = np.zeros((nb, n, n, n))
        for b, (k, i, j) in enumerate(self.basis):
            cb[b, k, i, j], cb[b, k, j, i] = 1.0, -1.0
        cl = np.einsum("bmij,mk->bijk", cb, g)
        kz = cl - np.transpose(cl, (0, 3, 1, 2)) + np.transpose(cl, (0, 2, 3, 1))
        gamma = 0.5 * np.einsum("mk,bijk->bimj", np.linalg.inv(g), kz)
        # nabla_i phi = -derivation(gamma_i, phi)
        nab = (
            np.einsum("bima,mxy->biaxy", gamma, phi)
            + np.einsum("bimx,amy->biaxy", gamma, phi)
            + np.einsum("bimy,axm->biaxy", gamma, phi)
        )
        nab = -nab[:, :, ta, tb, tc]
        T = np.einsum("mt,bit->bmi", left, nab)
        # (n*n, nb) acting on bracket vectors
        self.matrix = T.reshape(nb, n * n).T

    def __call__(self, c: np.ndarray) -> np.ndarray:
        """Torsion of s0 for bracket(s) c of shape (..., n, n, n).

        Exact brackets (single, with exact s0) go through the exact solve.
        """
        c = np.asarray(c)
        if linalg.is_exact(c) and self.exact and c.ndim == 3:
            from .torsion import intrinsic_torsion

            return intrinsic_torsion(LieAlgebra(self.n, c), self.s0).T
        v = _bracket_vector(linalg.to_float(c) if linalg.is_exact(c) else c, self.basis)
        out = np.einsum("pb,...b->...p", self.matrix, v)
        return out.reshape(out.shape[:-1] + (self.n, self.n))


def transported(c: np.ndarray, A: np.ndarray, Ainv: np.ndarray) -> np.ndarray:
    return np.einsum("km,mpq,pi,qj->kij", Ainv, c, A, A)


@dataclass(frozen=True)
class FlowConfig:
    t_end: float = 1.0
    h: float = 1e-3
    min_eig: float = 1e-6
    max_torsion: float = 1e6
    max_halvings: int = 30
    monitors: tuple = ("thm32", "hypo", "subspace")
    extra: int = 0  # number of leading circle directions to monitor


class FlowProblem:
    """Prepared data for integrating the flow from s0 on L."""

    def __init__(self, L: LieAlgebra, s0: GStructure, check: bool = True):
        if s0.group != "G2":
            raise SgkitError("the flow is defined for G2 structures")
        if L.dim != 7:
            raise SgkitError("the flow needs a 7-dimensional algebra")
        if check:
            chk = hypo_check(s0, L)
            if not chk.ok:
                bad = ", ".join(k for k, v in chk.residuals.items() if not (v.is_zero() if v.exact else v.norm() <= 1e-10))
                raise PreconditionError(f"initial structure is not hypo ({bad} nonzero)")
        self.L = L
        self.s0 = s0
        self.tmap = TorsionMap(s0)
        self.c = L.c
        self.c_float = linalg.to_float(L.c)
        self.g0 = linalg.to_float(s0.metric)
        self._dpsi = _psi_differential_map(s0)

    # --- evaluations in float ---------------------------------------------
    def field(self, A: np.ndarray) -> np.ndarray:
        Ainv = np.linalg.inv(A)
        return A @ self.tmap(transported(self.c_float, A, Ainv))

    def torsion(self, A: np.ndarray) -> np.ndarray:
        Ainv = np.linalg.inv(A)
        return A @ self.tmap(transported(self.c_float, A, Ainv)) @ Ainv

    def metric(self, A: np.ndarray) -> np.ndarray:
        Ainv = np.linalg.inv(A)
        return Ainv.T @ self.g0 @ Ainv

    def hypo_residual(self, A: np.ndarray) -> float:
        """|d psi_t| measured in g_t (A is an isometry g0 -> g_t)."""
        Ainv = np.linalg.inv(A)
        v = self._dpsi(transported(self.c_float, A, Ainv))
        return float(np.linalg.norm(v))

    def ricci(self, A: np.ndarray) -> np.ndarray:
        """Ricci endomorphism of g_t."""
        g = self.metric(A)
        _, ric = riemann_ricci(LieAlgebra(7, self.c_float), g)
        return np.linalg.solve(g, ric)

    # --- exact field at A = id -----------------------------------------------
    def initial_torsion(self) -> np.ndarray:
        return self.tmap(self.c)


def _psi_differential_map(s0: GStructure):
    """c -> coefficient vector of d_c psi0 (increasing 5-tuples, g0-orthonormal scale)."""
    psi = s0["psi"].to_float()
    n = psi.dim
    basis = _bracket_basis(n)
    tuples = list(basis_tuples(n, 5))
    cols = []
    for k, i, j in basis:
        c = np.zeros((n, n, n))
        c[k, i, j], c[k, j, i] = 1.0, -1.0
        d = ce_differential(LieAlgebra(n, c), psi)
        cols.append([d.terms.get(t, 0.0) for t in tuples])
    M = np.array(cols).T
    g0 = linalg.to_float(s0.metric)
    # coefficient norm equals the g0-norm only for orthonormal frames; correct via the Gram factor
    scale = 1.0 if np.allclose(g0, np.eye(n)) else None

    def apply(c):
        v = M @ _bracket_vector(c, basis)
        if scale is None:
            return _gram_norm_vector(Form(n, {t: float(x) for t, x in zip(tuples, v)}), g0)
        return v

    return apply


def _gram_norm_vector(a: Form, g) -> np.ndarray:
    from .exterior import hodge_star

    star = hodge_star(a, g)
    val = (a ^ star).top() / math.sqrt(np.linalg.det(g))
    return np.array([math.sqrt(max(float(val), 0.0))])


# ---------------------------------------------------------------------------
# states and integration


@dataclass
class FlowState:
    t: float
    A: np.ndarray
    min_eig: float = float("nan")
    tr_T: float = float("nan")
    torsion_norm: float = float("nan")
    hypo_res: float = float("nan")
    subspace_res: float = float("nan")
    thm32a_res: float = float("nan")
    thm32b_res: float = float("nan")
    shape_a_res: float = float("nan")
    shape_b_res: float = float("nan")
    T: np.ndarray | None = field(default=None, repr=False)
    g: np.ndarray | None = field(default=None, repr=False)


def diagnose(problem: FlowProblem, t: float, A: np.ndarray, extra: int = 0) -> FlowState:
    T = problem.torsion(A)
    g = problem.metric(A)
    st = FlowState(t, A, T=T, g=g)
    st.min_eig = linalg.min_eigenvalue(g)
    st.tr_T = float(np.trace(T))
    st.torsion_norm = float(np.linalg.norm(T))
    st.hypo_res = problem.hypo_residual(A)
    if extra:
        st.subspace_res = subspace_residual(A, T, extra)
    return st


def subspace_residual(A: np.ndarray, T: np.ndarray, extra: int) -> float:
    """max over circle directions of |A e_i - e_i|, |e^i A - e^i| and |T e_i|."""
    n = A.shape[0]
    I = np.eye(n)
    worst = 0.0
    for i in range(extra):
        worst = max(
            worst,
            float(np.max(np.abs(A[:, i] - I[:, i]))),
            float(np.max(np.abs(A[i, :] - I[i, :]))),
            float(np.max(np.abs(T[:, i]))),
        )
    return worst


def flow_field(A, L: LieAlgebra, s0: GStructure, method: str = "fast") -> np.ndarray:
    """T(A . s0) A, either via transported brackets or by rebuilding A . s0."""
    A = np.asarray(A)
    if method == "fast":
        p = FlowProblem(L, s0, check=False)
        if linalg.is_exact(A):
            Ainv = linalg.inv(A)
            return A @ p.tmap(transported(L.c, A, Ainv))
        return p.field(A)
    from .torsion import intrinsic_torsion

    if not linalg.is_exact(A):
        s0, L = s0.to_float(), L.to_float() if L.exact else L
    return intrinsic_torsion(L, s0.act(A)).T @ A


def _rk4_step(f, A, h):
    k1 = f(A)
    k2 = f(A + 0.5 * h * k1)
    k3 = f(A + 0.5 * h * k2)
    k4 = f(A + h * k3)
    return A + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


class Trajectory(NamedTuple):
    states: list
    breakdown: bool
    t_breakdown: float | None
    reason: str | None
    trigger_min_eig: float | None = None
    trigger_torsion: float | None = None


def _check(problem, A, cfg):
    """(reason or None, min eig, torsion norm) for a candidate gauge."""
    if not np.all(np.isfinite(A)) or np.linalg.det(A) <= 0:
        return "gauge degenerate", float("nan"), float("nan")
    lam = linalg.min_eigenvalue(problem.metric(A))
    tn = float(np.linalg.norm(problem.torsion(A)))
    if lam < cfg.min_eig:
        return "metric degenerate", lam, tn
    if tn > cfg.max_torsion:
        return "torsion blow-up", lam, tn
    return None, lam, tn


def integrate_rk4(problem: FlowProblem, t_end: float, h: float, cfg: FlowConfig | None = None) -> Trajectory:
    """Fixed-step RK4 from A = id to t_end (either sign), halting on breakdown.

    A step that would cross a breakdown threshold is retried at half length,
    up to ``max_halvings`` times; the breakdown time is the last time reached
    and the rejected step's values are kept as the trigger.
    """
    if h <= 0:
        raise ValueError("step must be positive")
    cfg = cfg or FlowConfig(t_end=t_end, h=h)
    sgn = 1.0 if t_end >= 0 else -1.0
    A = np.eye(7)
    t = 0.0
    states = [diagnose(problem, t, A, cfg.extra)]
    nsteps = int(round(abs(t_end) / h))
    done = 0
    dt = sgn * h
    halvings = 0
    while done < nsteps:
        B = _rk4_step(problem.field, A, dt)
        why, lam, tn = _check(problem, B, cfg)
        if why is not None:
            if halvings >= cfg.max_halvings:
                return Trajectory(states, True, t, why, lam, tn)
            halvings += 1
            dt /= 2
            continue
        A = B
        if halvings == 0:
            done += 1
            t = sgn * done * h
        else:
            t += dt
            if abs(t) >= abs(t_end):
                break
        states.append(diagnose(problem, t, A, cfg.extra))
    if "thm32" in cfg.monitors:
        evolution_monitors(problem, states)
    return Trajectory(states, False, None, None)


def evolve(problem: FlowProblem, t: float, h: float, A0=None) -> np.ndarray:
    """A(t) by fixed-step RK4 (no diagnostics), starting from A0 = id."""
    A = np.eye(7) if A0 is None else np.array(A0, dtype=float)
    if t == 0:
        return A
    nsteps = max(1, int(round(abs(t) / h)))
    dt = t / nsteps
    for _ in range(nsteps):
        A = _rk4_step(problem.field, A, dt)
    return A


# ---------------------------------------------------------------------------
# monitors


def _central(problem: FlowProblem, a: FlowState, b: FlowState, c: FlowState):
    """Residuals of the metric and torsion evolution equations at b.

    Returns (stated a, stated b, shape a, shape b) where the stated pair is
    g' = 2 g(T ., .), T' = Ric - tr(T) T and the shape pair is the same pair
    for the shape operator W = -T: g' = -2 g(T ., .), T' = -Ric + tr(T) T.
    """
    dtot = c.t - a.t
    dg = (c.g - a.g) / dtot
    dT = (c.T - a.T) / dtot
    T, g = b.T, b.g
    gT = T.T @ g
    rhs = problem.ricci(b.A) - np.trace(T) * T
    return (
        float(np.max(np.abs(dg - 2 * gT))),
        float(np.max(np.abs(dT - rhs))),
        float(np.max(np.abs(dg + 2 * gT))),
        float(np.max(np.abs(dT + rhs))),
    )


def evolution_monitors(problem: FlowProblem, states: list, extra: int = 0) -> list:
    """Fill the evolution-equation residuals by central differences.

    Interior points with equal spacing on both sides get values; end points
    and points next to a step change stay NaN.
    """
    for k in range(1, len(states) - 1):
        a, b, c = states[k - 1], states[k], states[k + 1]
        if not math.isclose(b.t - a.t, c.t - b.t, rel_tol=1e-9):
            continue
        b.thm32a_res, b.thm32b_res, b.shape_a_res, b.shape_b_res = _central(problem, a, b, c)
        if extra:
            b.subspace_res = subspace_residual(b.A, b.T, extra)
    return states


def monitor_residuals(problem: FlowProblem, t: float, h: float, h_int: float = 1e-3) -> dict:
    """Evolution residuals at time t from central differences with spacing h.

    A(t) comes from RK4 with step h_int; the neighbours are single RK4 steps
    of length +-h, so their error is far below the O(h^2) differencing error.
    """
    At = evolve(problem, t, h_int)
    a, b, c = (diagnose(problem, t + s, _rk4_step(problem.field, At, s) if s else At) for s in (-h, 0.0, h))
    ra, rb, sa, sb = _central(problem, a, b, c)
    return {"thm32a": ra, "thm32b": rb, "shape_a": sa, "shape_b": sb}


def _restricted_forms(psi: Form, k: int) -> dict:
    """Forms of the restricted SU(3) (and for k = 2, SU(2)) families, linear in psi."""
    from .exterior import contract_basis
    from .lifts import pullback_slice

    out = {"rho": -pullback_slice(contract_basis(1, psi)), "sigma": pullback_slice(psi)}
    if k == 2:
        rho, sigma = out["rho"], out["sigma"]
        out.update(
            omega1=-pullback_slice(contract_basis(1, rho)),
            rho2=pullback_slice(rho),
            rho3=pullback_slice(contract_basis(1, sigma)),
            half_omega3_sq=pullback_slice(sigma),
        )
    return out


def _structure_at(problem: FlowProblem, A: np.ndarray) -> GStructure:
    from .exterior import gl_action

    s0 = problem.s0.to_float()
    return GStructure("G2", {"phi": gl_action(A, s0["phi"])}, s0.orientation)


def restricted_flow_residuals(problem: FlowProblem, t: float, extra: int, h: float | None = None, h_int: float = 1e-3) -> dict:
    """Residuals of the lower-dimensional evolution equations along the flow.

    The G2 solution at time t is restricted to the slices of its circle
    directions. Time derivatives of the restricted forms come from
    psi' = D_psi(T) (h None) or from central differences with spacing h; they
    are compared with rho' = d omega, sigma' = -d rhohat and, for two circles,
    omega1' = d alpha, rho2' = d omega3, rho3' = -d omega2,
    (omega3^2 / 2)' = d(alpha ^ omega1).
    """
    from .exterior import infinitesimal_action
    from .lifts import restrict_to_hypersurface, su2_directions, su3_directions

    if extra not in (1, 2):
        raise PreconditionError("expected one or two circle directions")
    At = evolve(problem, t, h_int)
    st = _structure_at(problem, At)
    forms = _restricted_forms(st["psi"], extra)
    if h is None:
        T = problem.torsion(At)
        dots = _restricted_forms(infinitesimal_action(T, st["psi"]), extra)
    else:
        plus = _restricted_forms(_structure_at(problem, _rk4_step(problem.field, At, h))["psi"], extra)
        minus = _restricted_forms(_structure_at(problem, _rk4_step(problem.field, At, -h))["psi"], extra)
        dots = {key: (plus[key] - minus[key]) / (2 * h) for key in forms}
    L = problem.L.to_float() if problem.L.exact else problem.L
    L6 = LieAlgebra(6, L.c[1:, 1:, 1:])
    s6 = restrict_to_hypersurface(st)
    res = {}
    for key, f in su3_directions(s6, L6).items():
        res[key] = (dots[key] - f).norm()
    if extra == 2:
        L5 = LieAlgebra(5, L.c[2:, 2:, 2:])
        s5 = restrict_to_hypersurface(s6)
        for key, f in su2_directions(s5, L5).items():
            res[key] = (dots[key] - f).norm()
    return res


# ---------------------------------------------------------------------------
# Taylor series


@dataclass
class TaylorSeries:
    K: int
    coefficients: list  # A^(k)_0, k = 0..K
    norms: list

    def partial_sum(self, t: float, K: int | None = None) -> np.ndarray:
        K = self.K if K is None else K
        out = np.zeros((7, 7))
        for k in range(K + 1):
            out = out + linalg.to_float(self.coefficients[k]) * (t**k / math.factorial(k))
        return out

    def to_json(self) -> dict:
        def mat(m):
            return [[str(v) if isinstance(v, Fraction) else float(v) for v in row] for row in m]

        return {"order": self.K, "coefficients": [mat(c) for c in self.coefficients], "norms": self.norms}


def taylor_jets(problem: FlowProblem, K: int, exact: bool = False) -> TaylorSeries:
    """Coefficients A^(k)_0 from truncated power-series arithmetic.

    With a_k = A^(k)_0 / k!, the field is expanded order by order:
    A^{-1} by the series inverse, the transported bracket by Cauchy products,
    T by the linear torsion map, and (k + 1) a_{k+1} = [A T]_k.
    """
    if K < 1:
        raise ValueError("order must be at least 1")
    ex = exact and problem.tmap.exact and problem.L.exact
    c = problem.c if ex else problem.c_float
    one = Fraction(1) if ex else 1.0
    a = [linalg.identity(7, ex)]
    ainv = [linalg.identity(7, ex)]
    Ts = []
    for k in range(K):
        # inverse coefficient k (a_0 = id)
        if k > 0:
            acc = linalg.zeros((7, 7), ex)
            for j in range(1, k + 1):
                acc = acc + a[j] @ ainv[k - j]
            ainv.append(-acc)
        # bracket coefficient k of c(A ., A .)
        B = linalg.zeros((7, 7, 7), ex)
        for p in range(k + 1):
            B = B + np.einsum("mpq,pi,qj->mij", c, a[p], a[k - p])
        # transported bracket coefficient k needs B_0..B_k; recompute cumulatively
        if k == 0:
            Bs = [B]
        else:
            Bs.append(B)
        cA = linalg.zeros((7, 7, 7), ex)
        for p in range(k + 1):
            cA = cA + np.einsum("km,mij->kij", ainv[p], Bs[k - p])
        Ts.append(problem.tmap(cA))
        F = linalg.zeros((7, 7), ex)
        for p in range(k + 1):
            F = F + a[p] @ Ts[k - p]
        a.append(F * (one / (k + 1)) if ex else F / (k + 1))
    coeffs = [a[k] * math.factorial(k) for k in range(K + 1)]
    norms = [linalg.max_abs(ck) if k == 0 else float(np.linalg.norm(linalg.to_float(ck))) for k, ck in enumerate(coeffs)]
    return TaylorSeries(K, coeffs, norms)


class RadiusEstimate(NamedTuple):
    radius: float
    trend: list
    infinite: bool


def series_diagnostics(series: TaylorSeries, K: int | None = None) -> RadiusEstimate:
    """Cauchy-Hadamard estimate from |A^(k)| / k! (a heuristic).

    The root test sequence r_k = (|A^(k)|/k!)^(-1/k) is extrapolated by a
    least-squares fit of r_k against 1/k over the upper half of the orders.
    """
    K = series.K if K is None else K
    if K < 4:
        raise ValueError("need at least four orders")
    mags = [series.norms[k] / math.factorial(k) for k in range(1, K + 1)]
    if all(m == 0 for m in mags):
        return RadiusEstimate(math.inf, [], True)
    trend = []
    for k, m in enumerate(mags, start=1):
        trend.append(m ** (-1.0 / k) if m > 0 else math.inf)
    ks = [k for k in range(max(2, K // 2), K + 1) if math.isfinite(trend[k - 1])]
    if len(ks) < 2:
        return RadiusEstimate(trend[-1], trend, False)
    x = np.array([1.0 / k for k in ks])
    y = np.array([trend[k - 1] for k in ks])
    slope, intercept = np.polyfit(x, y, 1)
    radius = float(intercept) if intercept > 0 else float(y[-1])
    return RadiusEstimate(radius, trend, False)


# ---------------------------------------------------------------------------
# breakdown


@dataclass
class BreakdownReport:
    parallel: bool
    t_plus: float | None
    t_minus: float | None
    reason_plus: str | None
    reason_minus: str | None
    min_eig_plus: float
    min_eig_minus: float
    max_torsion_plus: float
    max_torsion_minus: float

    @property
    def verdict(self) -> str:
        if self.parallel:
            return "parallel (no breakdown)"
        if self.t_plus is not None and self.t_minus is not None:
            return "breakdown in both directions"
        return "breakdown in one direction"

    def to_json(self) -> dict:
        d = asdict(self)
        d["verdict"] = self.verdict
        return d


def _min_eig(tr: Trajectory) -> float:
    vals = [s.min_eig for s in tr.states]
    if tr.trigger_min_eig is not None and tr.trigger_min_eig == tr.trigger_min_eig:
        vals.append(tr.trigger_min_eig)
    return min(vals)


def breakdown_detect(forward: Trajectory, backward: Trajectory, T0, tol: float = 1e-12) -> BreakdownReport:
    parallel = linalg.max_abs(T0) <= tol
    return BreakdownReport(
        parallel=parallel,
        t_plus=forward.t_breakdown,
        t_minus=backward.t_breakdown,
        reason_plus=forward.reason,
        reason_minus=backward.reason,
        min_eig_plus=_min_eig(forward),
        min_eig_minus=_min_eig(backward),
        max_torsion_plus=max(s.torsion_norm for s in forward.states),
        max_torsion_minus=max(s.torsion_norm for s in backward.states),
    )


# ---------------------------------------------------------------------------
# output

CSV_COLUMNS = (
    ["t"]
    + [f"A{i}{j}" for i in range(1, 8) for j in range(1, 8)]
    + ["min_eig_g", "tr_T", "hypo_res", "thm32a_res", "thm32b_res", "subspace_res", "shape_a_res", "shape_b_res"]
)


def _fmt(x: float) -> str:
    return "nan" if x != x else repr(float(x))


def trajectory_csv(states: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for s in states:
        row = [_fmt(s.t)] + [_fmt(v) for v in np.asarray(s.A).flat]
        row += [_fmt(v) for v in (
            s.min_eig, s.tr_T, s.hypo_res, s.thm32a_res, s.thm32b_res, s.subspace_res, s.shape_a_res, s.shape_b_res
        )]
        w.writerow(row)
    return buf.getvalue()


def summary_json(report: BreakdownReport, radius: RadiusEstimate | None = None, extra: dict | None = None) -> str:
    out = {"breakdown": report.to_json()}
    if radius is not None:
        out["radius_estimate"] = {
            "value": None if radius.infinite else radius.radius,
            "infinite": radius.infinite,
            "heuristic": True,
        }
    if extra:
        out.update(extra)
    return json.dumps(out, indent=2, sort_keys=True, default=_json_default)


def _json_default(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, Fraction):
        return str(x)
    raise TypeError(type(x))


__all__ = [
    "TorsionMap",
    "FlowConfig",
    "FlowProblem",
    "FlowState",
    "Trajectory",
    "flow_field",
    "diagnose",
    "subspace_residual",
    "integrate_rk4",
    "evolve",
    "evolution_monitors",
    "monitor_residuals",
    "restricted_flow_residuals",
    "TaylorSeries",
    "taylor_jets",
    "RadiusEstimate",
    "series_diagnostics",
    "BreakdownReport",
    "breakdown_detect",
    "trajectory_csv",
    "summary_json",
]
