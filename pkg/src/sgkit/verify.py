"""Batch checks of the model tensors, stabilizers and equivariance.

Each suite returns a list of :class:`Check` records; everything is exact.
"""
from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import linalg
from .exterior import Form, gl_action
from .structures import (
    DEFINING,
    GROUPS,
    STABILIZER_DIM,
    model_endo_I0,
    model_form,
    model_structure,
    stabilizer_algebra,
    su2_volume,
    su2_volume_data,
)


class Check(NamedTuple):
    name: str
    ok: bool
    detail: str
    validates: str


def random_gl_plus(n: int, rng: np.random.Generator, spread: int = 3) -> np.ndarray:
    """Random rational matrix with positive determinant (diagonally boosted)."""
    while True:
        B = linalg.zeros((n, n))
        for i in range(n):
            for j in range(n):
                B[i, j] = Fraction(int(rng.integers(-spread, spread + 1)), int(rng.integers(1, 4)))
            B[i, i] += spread + 1
        if linalg.det(B) > 0:
            return B


def _eq(a, b) -> bool:
    if isinstance(a, Form):
        return a == b
    return bool(np.all(np.asarray(a) == np.asarray(b)))


def suite_models() -> list:
    out = []
    expected = {
        "SU2": {"alpha": model_form("alpha0"), "omega2": model_form("omega2"), "omega3": model_form("omega3")},
        "SU3": {"omega": model_form("omega0"), "rhohat": model_form("rhohat0"), "I": model_endo_I0()},
        "G2": {"psi": model_form("psi0")},
        "Spin7": {},
    }
    for g in GROUPS:
        s = model_structure(g)
        n = s.dim
        out.append(Check(f"{g} metric", _eq(s.metric, linalg.identity(n)), "g = id", f"model {g} metric"))
        out.append(Check(f"{g} volume", _eq(s.volume, Form.volume(n)), "eps = e^1..n", f"model {g} volume"))
        for name, want in expected[g].items():
            out.append(Check(f"{g} {name}", _eq(s[name], want), f"{name} equals model value", f"model {g} {name}"))
    return out


def suite_stabilizers() -> list:
    out = []
    for g in GROUPS:
        s = model_structure(g)
        basis = stabilizer_algebra(s.defining, s.dim)
        want = STABILIZER_DIM[g]
        out.append(Check(f"{g} stabilizer", len(basis) == want, f"dim {len(basis)} (expected {want})", f"{g} stabilizer"))
        if g == "SU2":
            block = all(all(v == 0 for v in B[0, :]) and all(v == 0 for v in B[:, 0]) for B in basis)
            out.append(Check("SU2 block form", block, "first row and column vanish", "SU2 inside SO(4)"))
    return out


def suite_appendix(samples: int = 20, seed: int = 0) -> list:
    s = model_structure("SU2")
    forms = [s[k] for k in DEFINING["SU2"]]
    data = su2_volume_data(*forms)
    out = [
        Check("tr(L0^2)", data.trace == -4, f"tr(L0^2) = {data.trace} eps0^4", "trace identity for the model triple"),
        Check("volume of model triple", data.eps == Form.volume(5), "eps = eps0", "volume of the model triple"),
    ]
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(samples):
        B = random_gl_plus(5, rng)
        t = s.act(B)
        if su2_volume(*[t[k] for k in DEFINING["SU2"]]) != gl_action(B, Form.volume(5)):
            bad += 1
    out.append(Check("volume equivariance", bad == 0, f"{samples - bad}/{samples} random B in GL+(5)", "equivariance of the volume"))
    return out


def suite_equivariance(samples: int = 3, seed: int = 1) -> list:
    """g, eps and auxiliary forms transform with the structure."""
    rng = np.random.default_rng(seed)
    out = []
    for g in GROUPS:
        s = model_structure(g)
        ok = True
        for _ in range(samples):
            B = random_gl_plus(s.dim, rng, spread=1)
            t = s.act(B)
            Binv = linalg.inv(B)
            ok &= _eq(t.metric, Binv.T @ s.metric @ Binv)
            ok &= t.volume == gl_action(B, s.volume)
            for name, f in s.derived.aux.items():
                if isinstance(f, Form):
                    ok &= t[name] == gl_action(B, f)
                else:
                    ok &= _eq(t[name], B @ f @ Binv)
        out.append(Check(f"{g} equivariance", bool(ok), f"{samples} random B in GL+({s.dim})", f"{g} derived tensors"))
    return out


SUITES = {
    "models": suite_models,
    "stabilizers": suite_stabilizers,
    "appendix": suite_appendix,
    "equivariance": suite_equivariance,
}


def run_suite(name: str) -> list:
    if name == "all":
        return [c for k in SUITES for c in SUITES[k]()]
    return SUITES[name]()


__all__ = ["Check", "random_gl_plus", "SUITES", "run_suite"] + [f"suite_{k}" for k in SUITES]
