"""Flat four-torus conventions and the self-dual / anti-self-dual split.

Coordinates x1..x4 live in [0, 1) with the flat unit metric, orientation
dx1^dx2^dx3^dx4 and complex structure z1 = x1 + i x2, z2 = x3 + i x4.
The dual torus uses the same conventions with coordinates xi1..xi4.

Two-forms are stored with the plane axis first, in the order
(12, 13, 14, 23, 24, 34).  Components may be scalars, arrays of scalars,
or arrays of hermitian matrices; trailing axes are carried along untouched.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PLANES = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
PLANE_LABELS = ("12", "13", "14", "23", "24", "34")
PLANE_INDEX = {p: i for i, p in enumerate(PLANES)}


@dataclass(frozen=True)
class TorusSpec:
    """Lattice discretization of the unit torus (base ``X`` or dual ``Y``)."""

    N: int
    role: str = "X"

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"side count must be an integer >= 2, got {self.N!r}")
        if self.role not in ("X", "Y"):
            raise ValueError(f"role must be 'X' or 'Y', got {self.role!r}")

    @property
    def spacing(self) -> float:
        return 1.0 / self.N

    @property
    def volume_count(self) -> int:
        return self.N ** 4

    def points(self) -> np.ndarray:
        """All lattice points as an (N^4, 4) array of coordinates, lexicographic."""
        s = np.arange(self.N) / self.N
        g = np.stack(np.meshgrid(s, s, s, s, indexing="ij"), axis=-1)
        return g.reshape(-1, 4)


@dataclass(frozen=True)
class TwoForm:
    """A 2-form with components ``c[p]`` for the planes listed in ``PLANES``."""

    c: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c)
        if c.shape[:1] != (6,):
            raise ValueError(f"a 2-form needs 6 plane components, got shape {c.shape}")
        object.__setattr__(self, "c", c)

    @classmethod
    def from_planes(cls, **coeffs) -> "TwoForm":
        """Build a constant scalar form, e.g. ``TwoForm.from_planes(p12=1, p34=-1)``."""
        c = np.zeros(6)
        for key, val in coeffs.items():
            label = key.lstrip("p")
            if label not in PLANE_LABELS:
                raise KeyError(f"unknown plane {key!r}")
            c[PLANE_LABELS.index(label)] = val
        return cls(c)

    def component(self, mu: int, nu: int):
        """c_{mu nu} for 0-based indices; antisymmetry is applied on the fly."""
        if mu == nu:
            return np.zeros_like(self.c[0])
        if mu < nu:
            return self.c[PLANE_INDEX[(mu, nu)]]
        return -self.c[PLANE_INDEX[(nu, mu)]]

    def norm(self) -> float:
        """Component-wise l2 norm over planes, sites and matrix entries."""
        return float(np.sqrt(np.sum(np.abs(self.c) ** 2)))

    def __add__(self, other: "TwoForm") -> "TwoForm":
        return TwoForm(self.c + other.c)

    def __sub__(self, other: "TwoForm") -> "TwoForm":
        return TwoForm(self.c - other.c)


def sd_asd_split(f: TwoForm) -> tuple[TwoForm, TwoForm]:
    """Orthogonal projection onto self-dual and anti-self-dual parts."""
    c = f.c
    s = 0.5 * (c[0] + c[5])   # along dx12 + dx34
    t = 0.5 * (c[1] - c[4])   # along dx13 - dx24
    u = 0.5 * (c[2] + c[3])   # along dx14 + dx23
    sd = np.stack([s, t, u, u, -t, s])
    return TwoForm(sd), TwoForm(c - sd)


def asd_fraction(f: TwoForm, eps: float = 1e-14) -> float:
    """||sd(f)|| / ||f||, the relative self-dual content (0 for an instanton)."""
    sd, _ = sd_asd_split(f)
    return sd.norm() / max(f.norm(), eps)
