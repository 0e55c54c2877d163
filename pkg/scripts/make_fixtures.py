"""Regenerate the bundled JSON fixtures.

    python scripts/make_fixtures.py [outdir]
"""
import sys
from pathlib import Path

from sgkit.exterior import Form
from sgkit.fixtures import Fixture, dump_fixture, fixture_dir
from sgkit.liealg import LieAlgebra
from sgkit.lifts import ExtendedAlgebra, hypo_lift
from sgkit.structures import DIM, GStructure, model_structure


def heisenberg5() -> LieAlgebra:
    return LieAlgebra.from_differentials(5, {5: Form.parse(5, "12 34")})


def asd_triple() -> GStructure:
    # alpha = e5 and omega_i anti-self-dual on span(e1..e4): every omega_i
    # wedges to zero with de5, so the triple is hypo. The orientation is the
    # one for which alpha ^ omega1^2 / 2 is a positive volume.
    a = Form.parse(5, "5")
    w1, w2, w3 = (Form.parse(5, x) for x in ("12 -34", "14 -23", "13 24"))
    return GStructure("SU2", {"omega1": w1, "rho2": a ^ w2, "rho3": a ^ w3}, -1)


def sd_triple() -> GStructure:
    # the model triple moved by the even permutation e1 -> e5, e_i -> e_{i-1}:
    # omega1 = de5, a Sasaki-type hypo structure
    a = Form.parse(5, "5")
    w1, w2, w3 = (Form.parse(5, x) for x in ("12 34", "13 -24", "14 23"))
    return GStructure("SU2", {"omega1": w1, "rho2": a ^ w2, "rho3": a ^ w3})


def build() -> list:
    H = heisenberg5()
    out = []
    for g in ("SU2", "SU3", "G2", "Spin7"):
        out.append(Fixture(f"model_{g}", f"model {g} structure on the abelian algebra",
                           ExtendedAlgebra(LieAlgebra.abelian(DIM[g]), 0), model_structure(g)))
    out.append(Fixture("abelian7", "model G2 on the abelian algebra (parallel)",
                       ExtendedAlgebra(LieAlgebra.abelian(7), 0), model_structure("G2")))
    s = asd_triple()
    out.append(Fixture("heisenberg5", "hypo SU2 triple on de5 = e12 + e34 (anti-self-dual)",
                       ExtendedAlgebra(H, 0), s))
    s1 = hypo_lift(s)
    out.append(Fixture("heisenberg5_ext1", "hypo lift of heisenberg5 (SU3, one circle)",
                       ExtendedAlgebra(H, 1), s1))
    out.append(Fixture("heisenberg5_ext2", "double hypo lift of heisenberg5 (hypo G2, two circles)",
                       ExtendedAlgebra(H, 2), hypo_lift(s1)))
    out.append(Fixture("heisenberg5_sasaki", "hypo SU2 triple on de5 = e12 + e34 with omega1 = de5",
                       ExtendedAlgebra(H, 0), sd_triple()))
    H3 = LieAlgebra.from_differentials(5, {3: Form.parse(5, "12")})
    out.append(Fixture("h3r2", "model SU2 triple on de3 = e12 (hypo, omega2 and omega3 not closed)",
                       ExtendedAlgebra(H3, 0), model_structure("SU2")))
    out.append(Fixture("h3r2_ext2", "double hypo lift of h3r2",
                       ExtendedAlgebra(H3, 2), hypo_lift(hypo_lift(model_structure("SU2")))))
    N7 = LieAlgebra.from_differentials(7, {7: Form.parse(7, "12 34")})
    out.append(Fixture("nonhypo7", "model G2 on de7 = e12 + e34, where d psi is nonzero",
                       ExtendedAlgebra(N7, 0), model_structure("G2")))
    return out


def main(argv):
    outdir = Path(argv[1]) if len(argv) > 1 else fixture_dir()
    outdir.mkdir(parents=True, exist_ok=True)
    for fx in build():
        dump_fixture(fx, outdir / f"{fx.name}.json")
        print(fx.name)


if __name__ == "__main__":
    main(sys.argv)
