"""Bundled JSON fixtures: algebras, extensions and structures on them.

Each file holds ``{"name", "description", "algebra", "extra", "structure"}``
where ``algebra`` is the base algebra and ``extra`` the number of central
directions prepended to it. The directory can be replaced by pointing the
``SGKIT_FIXTURES`` environment variable elsewhere.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from ..liealg import LieAlgebra
from ..lifts import ExtendedAlgebra
from ..structures import GStructure

NAMES = (
    "model_SU2",
    "model_SU3",
    "model_G2",
    "model_Spin7",
    "abelian7",
    "heisenberg5",
    "heisenberg5_ext1",
    "heisenberg5_ext2",
    "heisenberg5_sasaki",
    "h3r2",
    "h3r2_ext2",
    "nonhypo7",
)


def fixture_dir() -> Path:
    env = os.environ.get("SGKIT_FIXTURES")
    return Path(env) if env else Path(__file__).resolve().parent


@dataclass(frozen=True, eq=False)
class Fixture:
    name: str
    description: str
    ext: ExtendedAlgebra
    structure: GStructure

    @property
    def algebra(self) -> LieAlgebra:
        """The full algebra the structure lives on (extension included)."""
        return self.ext.algebra

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "description": self.description,
            "algebra": self.ext.base.to_json(),
            "extra": self.ext.k,
            "structure": self.structure.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Fixture":
        ext = ExtendedAlgebra(LieAlgebra.from_json(obj["algebra"]), int(obj.get("extra", 0)))
        return cls(obj["name"], obj.get("description", ""), ext, GStructure.from_json(obj["structure"]))


def load_fixture(name_or_path: str) -> Fixture:
    """Load by bundled name or by path to a JSON file."""
    p = Path(name_or_path)
    if not p.suffix:
        p = fixture_dir() / f"{name_or_path}.json"
    with open(p) as fh:
        return Fixture.from_json(json.load(fh))


def dump_fixture(fx: Fixture, path) -> None:
    with open(path, "w") as fh:
        json.dump(fx.to_json(), fh, indent=1, sort_keys=True)
        fh.write("\n")


__all__ = ["NAMES", "Fixture", "fixture_dir", "load_fixture", "dump_fixture"]
