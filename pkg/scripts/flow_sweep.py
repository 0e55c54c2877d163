"""Breakdown times of the torsion flow over a sweep of gauge scalings and steps.

    python scripts/flow_sweep.py [--fixture heisenberg5_ext2] [--out sweep.csv]

Rescaling the initial structure by c multiplies the torsion by c, so the
breakdown times should scale like 1/c; the last column checks that.
"""
import argparse
import csv
import sys
from dataclasses import dataclass

from sgkit import linalg
from sgkit.fixtures import load_fixture
from sgkit.flow import FlowConfig, FlowProblem, integrate_rk4


@dataclass
class SweepConfig:
    fixture: str = "heisenberg5_ext2"
    scales: tuple = (1, 2, 3)
    steps: tuple = (2e-2, 1e-2, 5e-3)
    t_end: float = 3.0
    max_torsion: float = 1e12


def sweep(cfg: SweepConfig):
    f = load_fixture(cfg.fixture)
    base = None
    for c in cfg.scales:
        s = f.structure.act(linalg.identity(7) * c)
        p = FlowProblem(f.algebra, s)
        for h in cfg.steps:
            fc = FlowConfig(max_torsion=cfg.max_torsion, monitors=())
            fwd = integrate_rk4(p, cfg.t_end, h / c, fc)
            bwd = integrate_rk4(p, -cfg.t_end, h / c, fc)
            if base is None:
                base = fwd.t_breakdown
            scaled = None if fwd.t_breakdown is None or base is None else c * fwd.t_breakdown / base
            yield {
                "scale": c,
                "step": h / c,
                "t_plus": fwd.t_breakdown,
                "t_minus": bwd.t_breakdown,
                "reason_plus": fwd.reason,
                "reason_minus": bwd.reason,
                "scaled_ratio": scaled,
            }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--fixture", default=SweepConfig.fixture)
    ap.add_argument("--out")
    ns = ap.parse_args(argv)
    rows = list(sweep(SweepConfig(fixture=ns.fixture)))
    fh = open(ns.out, "w", newline="") if ns.out else sys.stdout
    w = csv.DictWriter(fh, fieldnames=list(rows[0]))
    w.writeheader()
    w.writerows(rows)
    if ns.out:
        fh.close()


if __name__ == "__main__":
    main()
