"""Taylor series of the flow against RK4, and the radius estimate versus order.

    python scripts/series_convergence.py [--fixture heisenberg5_ext2] [--max-order 16]
"""
import argparse

import numpy as np

from sgkit.fixtures import load_fixture
from sgkit.flow import (
    FlowConfig,
    FlowProblem,
    evolve,
    integrate_rk4,
    series_diagnostics,
    taylor_jets,
)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--fixture", default="heisenberg5_ext2")
    ap.add_argument("--max-order", type=int, default=16)
    ap.add_argument("--times", type=float, nargs="+", default=[0.05, 0.1, 0.2, 0.4])
    ns = ap.parse_args(argv)

    f = load_fixture(ns.fixture)
    p = FlowProblem(f.algebra, f.structure)
    ser = taylor_jets(p, ns.max_order)
    ref = {t: evolve(p, t, 1e-4) for t in ns.times}
    tb = integrate_rk4(p, 3.0, 1e-2, FlowConfig(max_torsion=1e12, monitors=())).t_breakdown

    print("K  radius   " + "  ".join(f"err(t={t:g})" for t in ns.times))
    for K in range(4, ns.max_order + 1, 2):
        r = series_diagnostics(ser, K)
        radius = "inf" if r.infinite else f"{r.radius:.4f}"
        errs = []
        for t in ns.times:
            errs.append(f"{np.max(np.abs(ser.partial_sum(t, K) - ref[t])):.2e}")
        print(f"{K:<2d} {radius:<8s} " + "  ".join(f"{e:>11s}" for e in errs))
    print(f"forward breakdown time {tb}")


if __name__ == "__main__":
    main()
