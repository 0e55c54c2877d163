"""Moving one dimension up or down the ladder SU(2) < SU(3) < G2 < Spin(7).

Extra directions (dt for the evolution lift, dtheta for the circle lift) are
always central and, by default, occupy index 1 of the larger space; base
index i becomes i + 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from . import linalg
from .errors import DimensionMismatch, PreconditionError, SgkitError
from .exterior import Form, contract_basis
from .liealg import (
    LieAlgebra,
    basis_vector,
    ce_differential,
    central_extension,
    lie_derivative,
)
from .structures import GStructure, check_model_type

_UP = {"SU2": "SU3", "SU3": "G2", "G2": "Spin7"}
_DOWN = {"SU3": "SU2", "G2": "SU3"}


@dataclass(frozen=True, eq=False)
class ExtendedAlgebra:
    """base with k central directions prepended (indices 1..k)."""

    base: LieAlgebra
    k: int

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("number of extra directions must be non-negative")

    @cached_property
    def algebra(self) -> LieAlgebra:
        return central_extension(self.base, self.k)

    @property
    def dim(self) -> int:
        return self.base.dim + self.k

    def theta(self, i: int) -> list:
        """The vector d/dtheta_i (i = 1..k)."""
        return basis_vector(self.dim, i, self.base.exact)

    def dtheta(self, i: int) -> Form:
        return Form.basis(self.dim, [i], 1 if self.base.exact else 1.0)

    def lower(self) -> "ExtendedAlgebra":
        """Drop the first extra direction."""
        if self.k == 0:
            raise PreconditionError("no extra direction to drop")
        return ExtendedAlgebra(self.base, self.k - 1)

    def to_json(self) -> dict:
        return {"base": self.base.to_json(), "extra": self.k}

    @classmethod
    def from_json(cls, obj: dict) -> "ExtendedAlgebra":
        return cls(LieAlgebra.from_json(obj["base"]), int(obj.get("extra", 0)))


# ---------------------------------------------------------------------------
# index bookkeeping


def insert_index(a: Form, pos: int = 1) -> Form:
    """Embed a form in one dimension more; indices >= pos move up by one."""
    return Form(a.dim + 1, {tuple(i + 1 if i >= pos else i for i in I): c for I, c in a.terms.items()})


def pullback_slice(a: Form, pos: int = 1) -> Form:
    """Pullback to the slice {x_pos = const}: drop terms with pos, relabel."""
    return Form(
        a.dim - 1,
        {tuple(i - 1 if i > pos else i for i in I): c for I, c in a.terms.items() if pos not in I},
    )


def _new_direction(dim: int, pos: int, exact: bool) -> Form:
    return Form.basis(dim, [pos], 1 if exact else 1.0)


def lifted_metric(g, pos: int = 1) -> np.ndarray:
    """dt^2 + g with the new direction at index pos."""
    g = np.asarray(g)
    n = g.shape[0]
    exact = linalg.is_exact(g)
    out = linalg.zeros((n + 1, n + 1), exact)
    keep = [i for i in range(n + 1) if i != pos - 1]
    out[np.ix_(keep, keep)] = g
    out[pos - 1, pos - 1] = 1
    return out


def _require_valid(s: GStructure):
    chk = check_model_type(s)
    if not chk.ok:
        raise PreconditionError("invalid structure: " + "; ".join(chk.failures))


# ---------------------------------------------------------------------------
# lifts


def evolution_lift(s: GStructure, dt_index: int = 1, check: bool = True) -> GStructure:
    """The structure on I x M built from a single slice (dt at index dt_index)."""
    if s.group not in _UP:
        raise SgkitError(f"no evolution lift from {s.group}")
    if check:
        _require_valid(s)
    n = s.dim + 1
    up = lambda f: insert_index(f, dt_index)  # noqa: E731
    dt = _new_direction(n, dt_index, s.exact)
    if s.group == "SU2":
        w1, alpha = up(s["omega1"]), up(s["alpha"])
        half = (w1 ^ w1) / 2
        forms = {
            "sigma": half + (dt ^ alpha ^ w1),
            "rho": -up(s["rho3"]) + (dt ^ up(s["omega2"])),
        }
    elif s.group == "SU3":
        forms = {"phi": up(s["rho"]) + (dt ^ up(s["omega"]))}
    else:
        forms = {"Psi": up(s["psi"]) + (dt ^ up(s["phi"]))}
    return GStructure(_UP[s.group], forms, s.orientation)


def hypo_lift(s: GStructure, check: bool = True) -> GStructure:
    """The circle lift that maps hypo structures to hypo structures."""
    if s.group not in ("SU2", "SU3"):
        raise SgkitError(f"no hypo lift from {s.group}")
    if check:
        _require_valid(s)
    n = s.dim + 1
    up = insert_index
    dth = _new_direction(n, 1, s.exact)
    if s.group == "SU2":
        w3 = up(s["omega3"])
        forms = {
            "sigma": (w3 ^ w3) / 2 + (dth ^ up(s["rho3"])),
            "rho": up(s["rho2"]) - (dth ^ up(s["omega1"])),
        }
        return GStructure("SU3", forms, s.orientation)
    forms = {"phi": -up(s["rhohat"]) + (dth ^ up(s["omega"]))}
    return GStructure("G2", forms, s.orientation)


def hypo_lift_partner(s: GStructure) -> GStructure:
    """The relabelled structure whose evolution lift is the hypo lift of s.

    SU(2): (alpha, omega1, omega2, omega3) -> (alpha, omega3, -omega1, -omega2),
    with rho_i = alpha ^ omega_i. SU(3): (omega, rho, rhohat) -> (omega, -rhohat, rho).
    """
    if s.group == "SU2":
        a = s["alpha"]
        forms = {"omega1": s["omega3"], "rho2": -(a ^ s["omega1"]), "rho3": -(a ^ s["omega2"])}
        return GStructure("SU2", forms, s.orientation)
    if s.group == "SU3":
        return GStructure("SU3", {"sigma": s["sigma"], "rho": -s["rhohat"]}, s.orientation)
    raise SgkitError(f"no hypo lift from {s.group}")


def _check_theta(g, pos: int, tol: float):
    g = np.asarray(g)
    exact = linalg.is_exact(g)
    for j in range(g.shape[0]):
        want = 1 if j == pos - 1 else 0
        v = g[pos - 1, j] - want
        if (v != 0) if exact else abs(v) > tol:
            raise PreconditionError("theta direction is not a unit normal to the slice")


def restrict_to_hypersurface(s: GStructure, theta_index: int = 1, tol: float = 1e-9) -> GStructure:
    """The structure induced on {theta = const} by s and the unit normal e_theta."""
    if s.group not in _DOWN:
        raise SgkitError(f"no restriction from {s.group}")
    _check_theta(s.metric, theta_index, tol)
    down = lambda f: pullback_slice(f, theta_index)  # noqa: E731
    hook = lambda f: contract_basis(theta_index, f)  # noqa: E731
    if s.group == "G2":
        psi = s["psi"]
        forms = {"sigma": down(psi), "rho": -down(hook(psi))}
    else:
        rho, sigma = s["rho"], s["sigma"]
        forms = {"omega1": -down(hook(rho)), "rho2": down(rho), "rho3": down(hook(sigma))}
    return GStructure(_DOWN[s.group], forms, s.orientation)


# ---------------------------------------------------------------------------
# conditions


class HypoCheck(NamedTuple):
    ok: bool
    residuals: dict


def hypo_forms(s: GStructure) -> dict:
    """The forms whose closedness is the hypo condition."""
    if s.group == "SU2":
        return {k: s[k] for k in ("omega1", "rho2", "rho3")}
    if s.group == "SU3":
        return {"rho": s["rho"], "sigma": s["sigma"]}
    if s.group == "G2":
        return {"psi": s["psi"]}
    return {"Psi": s["Psi"]}


def hypo_check(s: GStructure, L: LieAlgebra, tol: float = 1e-10) -> HypoCheck:
    if s.dim != L.dim:
        raise DimensionMismatch("structure and algebra dimensions differ")
    res = {}
    ok = True
    for name, f in hypo_forms(s).items():
        alg = L if f.exact else L.to_float()
        if f.exact and not L.exact:
            f = f.to_float()
        d = ce_differential(alg, f)
        res["d" + name] = d
        if d.exact and d.terms or (not d.exact and d.norm() > tol):
            ok = False
    return HypoCheck(ok, res)


class LiftRecognition(NamedTuple):
    ok: bool
    failures: list


def recognize_hypo_lift(s: GStructure, ext: ExtendedAlgebra, tol: float = 1e-10) -> LiftRecognition:
    """Invariance, orthogonality and unit length of every extra direction."""
    if s.group != "G2":
        raise SgkitError("recognition applies to G2 structures")
    if s.dim != ext.dim:
        raise DimensionMismatch("structure and algebra dimensions differ")
    failures = []
    psi = s["psi"]
    alg = ext.algebra if psi.exact else ext.algebra.to_float()
    g = s.metric
    exact = linalg.is_exact(g)
    for i in range(1, ext.k + 1):
        v = basis_vector(ext.dim, i, psi.exact)
        L_psi = lie_derivative(v, psi, alg)
        if (L_psi.terms if psi.exact else L_psi.norm() > tol):
            failures.append(f"psi not invariant along theta_{i}")
        for j in range(ext.dim):
            want = 1 if j == i - 1 else 0
            if j < ext.k and j != i - 1:
                want = 0
            d = g[i - 1, j] - want
            if (d != 0) if exact else abs(d) > tol:
                what = "unit" if j == i - 1 else "orthogonal"
                failures.append(f"theta_{i} not {what} (entry {j + 1})")
                break
    return LiftRecognition(not failures, failures)


# ---------------------------------------------------------------------------
# flow directions and their compatibility with lifts


def su2_directions(s: GStructure, L: LieAlgebra) -> dict:
    """Right-hand sides of the SU(2) evolution: omega1, rho2, rho3 and omega3^2 / 2."""
    d = lambda f: ce_differential(L, f)  # noqa: E731
    a = s["alpha"]
    return {
        "omega1": d(a),
        "rho2": d(s["omega3"]),
        "rho3": -d(s["omega2"]),
        "half_omega3_sq": d(a ^ s["omega1"]),
    }


def su3_directions(s: GStructure, L: LieAlgebra) -> dict:
    d = lambda f: ce_differential(L, f)  # noqa: E731
    return {"rho": d(s["omega"]), "sigma": -d(s["rhohat"])}


def lift_su2_directions(dirs: dict) -> dict:
    """SU(3) directions of the circle lift of an SU(2) family."""
    up = insert_index
    n = dirs["omega1"].dim + 1
    exact = all(f.exact for f in dirs.values())
    dth = _new_direction(n, 1, exact)
    return {
        "rho": up(dirs["rho2"]) - (dth ^ up(dirs["omega1"])),
        "sigma": up(dirs["half_omega3_sq"]) + (dth ^ up(dirs["rho3"])),
    }


def lift_su3_directions(dirs: dict) -> Form:
    """psi-direction of the circle lift of an SU(3) family."""
    n = dirs["rho"].dim + 1
    exact = all(f.exact for f in dirs.values())
    dth = _new_direction(n, 1, exact)
    return insert_index(dirs["sigma"]) - (dth ^ insert_index(dirs["rho"]))


class Compatibility(NamedTuple):
    residual: Form
    levels: dict
    remark: Form | None


def lift_field_compatibility(s: GStructure, ext: ExtendedAlgebra, su2_dirs: dict | None = None) -> Compatibility:
    """Compare the G2 flow direction d phi with the lift of the lower-dimensional flow.

    For one extra direction the lower structure is SU(3); for two it is SU(2)
    and ``su2_dirs`` may override its computed flow directions. ``levels``
    holds the per-form differences at each intermediate dimension and
    ``remark`` is omega1 ^ d alpha - d(alpha ^ omega1), which vanishes for
    hypo SU(2) data.
    """
    if ext.k not in (1, 2):
        raise PreconditionError("expected one or two circle directions")
    rec = recognize_hypo_lift(s, ext)
    if not rec.ok:
        raise PreconditionError("not a hypo lift: " + "; ".join(rec.failures))
    alg = ext.algebra
    top = ce_differential(alg, s["phi"])
    s6 = restrict_to_hypersurface(s)
    lower6 = ext.lower()
    levels = {}
    remark = None
    if ext.k == 1:
        d6 = su3_directions(s6, lower6.algebra)
    else:
        s5 = restrict_to_hypersurface(s6)
        L5 = lower6.lower().algebra
        d5 = su2_directions(s5, L5) if su2_dirs is None else su2_dirs
        d6 = lift_su2_directions(d5)
        ref6 = su3_directions(s6, lower6.algebra)
        for k in ("rho", "sigma"):
            levels[k] = ref6[k] - d6[k]
        w1 = s5["omega1"]
        remark = (w1 ^ ce_differential(L5, s5["alpha"])) - ce_differential(L5, s5["alpha"] ^ w1)
    return Compatibility(top - lift_su3_directions(d6), levels, remark)


__all__ = [
    "ExtendedAlgebra",
    "insert_index",
    "pullback_slice",
    "lifted_metric",
    "evolution_lift",
    "hypo_lift",
    "hypo_lift_partner",
    "restrict_to_hypersurface",
    "HypoCheck",
    "hypo_forms",
    "hypo_check",
    "LiftRecognition",
    "recognize_hypo_lift",
    "su2_directions",
    "su3_directions",
    "lift_su2_directions",
    "lift_su3_directions",
    "Compatibility",
    "lift_field_compatibility",
]

