"""Command line front end.

    sgkit verify --suite models|stabilizers|appendix|equivariance|all
    sgkit lift INPUT --kind hypo|evolution|restrict [--check-hypo]
    sgkit flow INPUT --t-end T --step H [--monitor thm32] --out PREFIX
    sgkit series INPUT --order K [--compare-t T]

INPUT is a bundled fixture name, a fixture JSON file, or a bare structure
JSON file. Exit codes: 0 success, 1 usage or IO error, 2 verification
failure, 3 precondition failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import PreconditionError, SgkitError
from .fixtures import Fixture, load_fixture
from .liealg import LieAlgebra
from .lifts import (
    ExtendedAlgebra,
    evolution_lift,
    hypo_check,
    hypo_lift,
    restrict_to_hypersurface,
)
from .structures import GStructure

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_PRECONDITION = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    mode: str = "exact"
    t_end: float = 1.0
    h: float = 1e-3
    order: int = 12
    min_eig: float = 1e-6
    max_torsion: float = 1e6
    out: str | None = None
    suite: str = "all"
    kind: str = "hypo"
    check_hypo: bool = False
    monitors: tuple = ()
    compare_t: float | None = None

    def __post_init__(self):
        if self.mode not in ("exact", "float"):
            raise UsageError(f"unknown mode {self.mode!r}")
        for name in ("h", "min_eig", "max_torsion"):
            if getattr(self, name) <= 0:
                raise UsageError(f"--{name.replace('_', '-')} must be positive")
        if self.order < 1:
            raise UsageError("--order must be positive")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sgkit", description="Invariant special geometric structures and their flows.")
    p.add_argument("--mode", choices=("exact", "float"), default="exact")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run model, stabilizer and equivariance suites")
    v.add_argument("--suite", default="all", choices=("models", "stabilizers", "appendix", "equivariance", "all"))
    v.add_argument("--out")

    lf = sub.add_parser("lift", help="lift or restrict a structure")
    lf.add_argument("input")
    lf.add_argument("--kind", default="hypo", choices=("hypo", "evolution", "restrict"))
    lf.add_argument("--check-hypo", action="store_true")
    lf.add_argument("--out")

    fl = sub.add_parser("flow", help="integrate the torsion flow in both time directions")
    fl.add_argument("input")
    fl.add_argument("--t-end", type=float, default=1.0)
    fl.add_argument("--step", type=float, default=1e-3)
    fl.add_argument("--order", type=int, default=12)
    fl.add_argument("--min-eig", type=float, default=1e-6)
    fl.add_argument("--max-torsion", type=float, default=1e6)
    fl.add_argument("--monitor", action="append", default=[], choices=("thm32", "hypo", "subspace"))
    fl.add_argument("--out")

    se = sub.add_parser("series", help="Taylor coefficients of the flow")
    se.add_argument("input")
    se.add_argument("--order", type=int, default=12)
    se.add_argument("--compare-t", type=float)
    se.add_argument("--step", type=float, default=1e-3)
    se.add_argument("--out")
    return p


def _config(ns) -> RunConfig:
    return RunConfig(
        command=ns.command,
        inputs=[getattr(ns, "input")] if hasattr(ns, "input") else [],
        mode=ns.mode,
        t_end=getattr(ns, "t_end", 1.0),
        h=getattr(ns, "step", 1e-3),
        order=getattr(ns, "order", 12),
        min_eig=getattr(ns, "min_eig", 1e-6),
        max_torsion=getattr(ns, "max_torsion", 1e6),
        out=getattr(ns, "out", None),
        suite=getattr(ns, "suite", "all"),
        kind=getattr(ns, "kind", "hypo"),
        check_hypo=getattr(ns, "check_hypo", False),
        monitors=tuple(getattr(ns, "monitor", ())),
        compare_t=getattr(ns, "compare_t", None),
    )


# ---------------------------------------------------------------------------
# io


def read_input(spec: str) -> Fixture:
    """Fixture by name or file; a bare structure gets the abelian algebra."""
    path = Path(spec)
    if path.suffix != ".json":
        try:
            return load_fixture(spec)
        except FileNotFoundError:
            raise UsageError(f"no fixture named {spec!r}") from None
    try:
        obj = json.loads(path.read_text())
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read {spec}: {exc}") from None
    if "structure" in obj:
        return Fixture.from_json(obj)
    s = GStructure.from_json(obj)
    return Fixture(path.stem, "", ExtendedAlgebra(LieAlgebra.abelian(s.dim), 0), s)


def _emit(text: str, out: str | None, suffix: str = ""):
    if out is None:
        sys.stdout.write(text)
        return
    target = Path(out + suffix) if suffix else Path(out)
    try:
        target.write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {target}: {exc}") from None


def _dump(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def _with_mode(fx: Fixture, mode: str) -> Fixture:
    if mode == "float":
        return Fixture(fx.name, fx.description, fx.ext, fx.structure.to_float())
    return fx


# ---------------------------------------------------------------------------
# commands


def cmd_verify(cfg: RunConfig) -> int:
    from .verify import run_suite

    checks = run_suite(cfg.suite)
    lines = [f"{'PASS' if c.ok else 'FAIL'}  {c.name}: {c.detail}  [{c.validates}]" for c in checks]
    ok = all(c.ok for c in checks)
    lines.append(f"{sum(c.ok for c in checks)}/{len(checks)} checks passed")
    _emit("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK if ok else EXIT_VERIFY


def _hypo_report(s: GStructure, L: LieAlgebra) -> tuple:
    chk = hypo_check(s, L)
    lines = [f"  {k} = {v!r}" for k, v in chk.residuals.items()]
    return chk.ok, lines


def cmd_lift(cfg: RunConfig) -> int:
    fx = _with_mode(read_input(cfg.inputs[0]), cfg.mode)
    s, ext = fx.structure, fx.ext
    if cfg.check_hypo:
        ok, lines = _hypo_report(s, ext.algebra)
        if not ok:
            sys.stderr.write("input is not hypo:\n" + "\n".join(lines) + "\n")
            return EXIT_VERIFY
    if cfg.kind == "hypo":
        t, new_ext = hypo_lift(s), ExtendedAlgebra(ext.base, ext.k + 1)
    elif cfg.kind == "evolution":
        t, new_ext = evolution_lift(s), ExtendedAlgebra(ext.base, ext.k + 1)
    else:
        t = restrict_to_hypersurface(s)
        if ext.k == 0:
            raise PreconditionError("restriction needs a circle direction in the algebra")
        new_ext = ext.lower()
    if cfg.check_hypo:
        ok, lines = _hypo_report(t, new_ext.algebra)
        if not ok:
            sys.stderr.write("result is not hypo:\n" + "\n".join(lines) + "\n")
            return EXIT_VERIFY
    out = Fixture(fx.name, fx.description, new_ext, t)
    _emit(_dump(out.to_json()), cfg.out)
    return EXIT_OK


def cmd_flow(cfg: RunConfig) -> int:
    from .flow import (
        FlowConfig,
        FlowProblem,
        breakdown_detect,
        integrate_rk4,
        series_diagnostics,
        summary_json,
        taylor_jets,
        trajectory_csv,
    )

    fx = read_input(cfg.inputs[0])
    problem = FlowProblem(fx.algebra, fx.structure)
    fc = FlowConfig(
        t_end=cfg.t_end,
        h=cfg.h,
        min_eig=cfg.min_eig,
        max_torsion=cfg.max_torsion,
        monitors=cfg.monitors,
        extra=fx.ext.k,
    )
    fwd = integrate_rk4(problem, abs(cfg.t_end), cfg.h, fc)
    bwd = integrate_rk4(problem, -abs(cfg.t_end), cfg.h, fc)
    T0 = problem.tmap(fx.algebra.to_float().c if not fx.algebra.exact else fx.algebra.c)
    report = breakdown_detect(fwd, bwd, T0)
    radius = series_diagnostics(taylor_jets(problem, max(cfg.order, 4))) if cfg.order >= 4 else None
    states = list(reversed(bwd.states[1:])) + fwd.states
    extra = {"fixture": fx.name, "t_end": cfg.t_end, "step": cfg.h, "trace_T0": float(np.trace(np.asarray(T0, dtype=float)))}
    summary = summary_json(report, radius, extra) + "\n"
    if cfg.out is None:
        sys.stdout.write(summary)
    else:
        _emit(trajectory_csv(states), cfg.out, ".csv")
        _emit(summary, cfg.out, ".json")
    return EXIT_OK


def cmd_series(cfg: RunConfig) -> int:
    from .flow import FlowProblem, evolve, series_diagnostics, taylor_jets

    fx = read_input(cfg.inputs[0])
    problem = FlowProblem(fx.algebra, fx.structure)
    ser = taylor_jets(problem, cfg.order, exact=cfg.mode == "exact" and cfg.order <= 3)
    out = ser.to_json()
    if cfg.order >= 4:
        r = series_diagnostics(ser)
        out["radius_estimate"] = {"value": None if r.infinite else r.radius, "infinite": r.infinite, "heuristic": True}
        if cfg.order >= 6:
            r2 = series_diagnostics(ser, cfg.order - 2)
            out["radius_estimate_K_minus_2"] = None if r2.infinite else r2.radius
    if cfg.compare_t is not None:
        diff = ser.partial_sum(cfg.compare_t) - evolve(problem, cfg.compare_t, cfg.h)
        out["rk4_comparison"] = {"t": cfg.compare_t, "step": cfg.h, "max_abs_diff": float(np.max(np.abs(diff)))}
    _emit(_dump(out), cfg.out)
    return EXIT_OK


COMMANDS = {"verify": cmd_verify, "lift": cmd_lift, "flow": cmd_flow, "series": cmd_series}


def main(argv=None) -> int:
    try:
        ns = build_parser().parse_args(argv)
        cfg = _config(ns)
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        sys.stderr.write(f"sgkit: {exc}\n")
        return EXIT_USAGE
    except (PreconditionError, SgkitError) as exc:
        sys.stderr.write(f"sgkit: precondition failed: {exc}\n")
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
