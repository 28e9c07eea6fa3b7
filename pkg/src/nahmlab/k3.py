"""Mukai-lattice arithmetic on a K3 surface.

H^2(K3, Z) is realized as U + U + U + E8(-1) + E8(-1) in a fixed basis of
22 integer coordinates: (e1, f1, e2, f2, e3, f3, then 8 + 8 root coordinates).
All arithmetic is in Python integers.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

_E8_CARTAN = np.array([
    [2, -1, 0, 0, 0, 0, 0, 0],
    [-1, 2, -1, 0, 0, 0, 0, 0],
    [0, -1, 2, -1, 0, 0, 0, -1],
    [0, 0, -1, 2, -1, 0, 0, 0],
    [0, 0, 0, -1, 2, -1, 0, 0],
    [0, 0, 0, 0, -1, 2, -1, 0],
    [0, 0, 0, 0, 0, -1, 2, 0],
    [0, 0, -1, 0, 0, 0, 0, 2],
], dtype=np.int64)


def k3_gram() -> np.ndarray:
    """The 22x22 intersection form U^3 + E8(-1)^2."""
    g = np.zeros((22, 22), dtype=np.int64)
    for i in range(3):
        g[2 * i, 2 * i + 1] = g[2 * i + 1, 2 * i] = 1
    g[6:14, 6:14] = -_E8_CARTAN
    g[14:22, 14:22] = -_E8_CARTAN
    return g


def _check_gram(g: np.ndarray):
    if not np.array_equal(g, g.T):
        raise ValueError("Gram matrix is not symmetric")
    if np.any(np.diag(g) % 2):
        raise ValueError("Gram matrix is not even")
    det = round(np.linalg.det(g.astype(float)))
    if abs(det) != 1:
        raise ValueError(f"Gram matrix is not unimodular (det {det})")
    ev = np.linalg.eigvalsh(g.astype(float))
    if (int(np.sum(ev > 0)), int(np.sum(ev < 0))) != (3, 19):
        raise ValueError("Gram matrix does not have signature (3, 19)")


GRAM = k3_gram()
_check_gram(GRAM)


@dataclass(frozen=True)
class K3Class:
    """Integral class in H^2(K3); ``coords`` has length 22."""

    coords: tuple

    def __post_init__(self):
        c = tuple(int(v) for v in self.coords)
        if len(c) != 22:
            raise ValueError(f"K3 classes have 22 coordinates, got {len(c)}")
        object.__setattr__(self, "coords", c)

    @classmethod
    def zero(cls) -> "K3Class":
        return cls((0,) * 22)

    @classmethod
    def from_hyperbolic(cls, **kw) -> "K3Class":
        """Shorthand like ``from_hyperbolic(e1=1, f1=1)`` for the three U summands."""
        names = ("e1", "f1", "e2", "f2", "e3", "f3")
        c = [0] * 22
        for k, v in kw.items():
            c[names.index(k)] = v
        return cls(tuple(c))

    def dot(self, other: "K3Class") -> int:
        a = self.coords
        b = other.coords
        return int(sum(a[i] * int(GRAM[i, j]) * b[j]
                       for i in range(22) for j in range(22) if GRAM[i, j]))

    def square(self) -> int:
        return self.dot(self)

    def __add__(self, other):
        return K3Class(tuple(x + y for x, y in zip(self.coords, other.coords)))

    def __mul__(self, n: int):
        return K3Class(tuple(n * x for x in self.coords))

    __rmul__ = __mul__


@dataclass(frozen=True)
class MukaiVector:
    """v = (r, l, s) with s = r + int ch2."""

    r: int
    l: K3Class
    s: int

    @classmethod
    def from_chern(cls, rank: int, c1: K3Class, c2: int) -> "MukaiVector":
        ch2 = Fraction(c1.square(), 2) - c2
        return cls(int(rank), c1, int(rank + ch2))

    @property
    def c2(self) -> int:
        """Second Chern class recovered from s - r = l^2/2 - c2."""
        return int(Fraction(self.l.square(), 2) - (self.s - self.r))


def mukai_pairing(v: MukaiVector, w: MukaiVector) -> int:
    return v.l.dot(w.l) - v.r * w.s - w.r * v.s


def moduli_dimension(v: MukaiVector) -> int:
    return mukai_pairing(v, v) + 2


def check_paper_conditions(H: K3Class, l: K3Class) -> dict:
    """Polarization and determinant conditions for the rank-2 K3 example."""
    h2, hl, l2 = H.square(), H.dot(l), l.square()
    c2 = Fraction(l2, 4) + 2
    return {
        "H2": h2,
        "lH": hl,
        "l2": l2,
        "H2_is_2": h2 == 2,
        "lH_is_0": hl == 0,
        "l2_is_minus12": l2 == -12,
        "c2": int(c2) if c2.denominator == 1 else str(c2),
        "c2_integral": c2.denominator == 1,
        "c2_is_minus1": c2 == -1,
        "all_conditions": h2 == 2 and hl == 0 and l2 == -12 and c2 == -1,
    }


def hyperbolic_swap(i: int, j: int) -> np.ndarray:
    """Isometry exchanging the i-th and j-th hyperbolic planes (0-based)."""
    p = np.eye(22, dtype=np.int64)
    for a, b in ((2 * i, 2 * j), (2 * i + 1, 2 * j + 1)):
        p[[a, b]] = p[[b, a]]
    return p


def apply_isometry(g: np.ndarray, c: K3Class) -> K3Class:
    return K3Class(tuple(int(v) for v in g @ np.array(c.coords, dtype=np.int64)))


def is_isometry(g: np.ndarray) -> bool:
    return bool(np.array_equal(g.T @ GRAM @ g, GRAM))
