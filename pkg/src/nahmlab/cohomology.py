"""Exact exterior-algebra calculus on H*(X), H*(Y) and H*(X x Y).

X is the torus with degree-1 generators e1..e4, Y its dual with ehat1..ehat4.
A class is a map from monomials (bitmasks over the eight generators, ordered
e1 < ... < e4 < ehat1 < ... < ehat4) to exact rationals.  The orientation is
fixed by  int_{X x Y} e1 e2 e3 e4 ehat1 ehat2 ehat3 ehat4 = +1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import factorial

from .geometry import PLANES

GEN_NAMES = ("e1", "e2", "e3", "e4", "eh1", "eh2", "eh3", "eh4")
X_MASK = 0x0F
Y_MASK = 0xF0
SPACES = {"X": X_MASK, "Y": Y_MASK, "XY": 0xFF}


class CohomologyError(ValueError):
    pass


def _bits(mask: int) -> list[int]:
    return [i for i in range(8) if mask >> i & 1]


def _merge_sign(a: int, b: int) -> int:
    """Sign of reordering (gens of a)(gens of b) into increasing order."""
    swaps = 0
    for i in _bits(b):
        swaps += bin(a >> (i + 1)).count("1")
    return -1 if swaps & 1 else 1


def _as_fraction(v) -> Fraction:
    if isinstance(v, float):
        if not v.is_integer():
            raise CohomologyError(f"non-exact coefficient {v!r}; pass a Fraction")
        v = int(v)
    return Fraction(v)


@dataclass(frozen=True)
class CohClass:
    """Exact cohomology class; ``terms`` maps generator bitmasks to Fractions."""

    space: str
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.space not in SPACES:
            raise CohomologyError(f"unknown space tag {self.space!r}")
        allowed = SPACES[self.space]
        clean = {}
        for m, v in self.terms.items():
            v = _as_fraction(v)
            if v == 0:
                continue
            if m & ~allowed:
                raise CohomologyError(
                    f"monomial {monomial_name(m)} does not live on {self.space}")
            clean[m] = v
        object.__setattr__(self, "terms", clean)

    # construction helpers
    @classmethod
    def scalar(cls, value, space: str = "X") -> "CohClass":
        return cls(space, {0: value})

    @classmethod
    def monomial(cls, *gens: str, coeff=1, space: str | None = None) -> "CohClass":
        """``CohClass.monomial('e1', 'e2')`` is e1^e2 (sign follows argument order)."""
        mask, sign = 0, 1
        for g in gens:
            i = GEN_NAMES.index(g)
            bit = 1 << i
            if mask & bit:
                return cls(space or _space_of(mask | bit), {})
            sign *= _merge_sign(mask, bit)
            mask |= bit
        return cls(space or _space_of(mask), {mask: sign * _as_fraction(coeff)})

    # algebra
    def __add__(self, other: "CohClass") -> "CohClass":
        _check_same(self, other)
        out = dict(self.terms)
        for m, v in other.terms.items():
            out[m] = out.get(m, 0) + v
        return CohClass(self.space, out)

    def __neg__(self) -> "CohClass":
        return CohClass(self.space, {m: -v for m, v in self.terms.items()})

    def __sub__(self, other: "CohClass") -> "CohClass":
        return self + (-other)

    def scale(self, a) -> "CohClass":
        a = _as_fraction(a) if not isinstance(a, Fraction) else a
        return CohClass(self.space, {m: a * v for m, v in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, CohClass):
            return NotImplemented
        return self.space == other.space and self.terms == other.terms

    def __hash__(self):
        return hash((self.space, tuple(sorted(self.terms.items()))))

    def degree_part(self, d: int) -> "CohClass":
        return CohClass(self.space, {m: v for m, v in self.terms.items()
                                     if bin(m).count("1") == d})

    def coeff(self, *gens: str) -> Fraction:
        """Coefficient of the monomial with the given generators (in that order)."""
        probe = CohClass.monomial(*gens, space=self.space)
        if not probe.terms:
            return Fraction(0)
        (m, sign), = probe.terms.items()
        return sign * self.terms.get(m, Fraction(0))

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self):
        if not self.terms:
            return f"CohClass({self.space}: 0)"
        parts = [f"{v}*{monomial_name(m)}" for m, v in sorted(self.terms.items(),
                                                           key=lambda t: (bin(t[0]).count("1"), t[0]))]
        return f"CohClass({self.space}: " + " + ".join(parts) + ")"


def _space_of(mask: int) -> str:
    if mask & Y_MASK and mask & X_MASK:
        return "XY"
    return "Y" if mask & Y_MASK else "X"


def _check_same(a: CohClass, b: CohClass):
    if a.space != b.space:
        raise CohomologyError(f"space mismatch: {a.space} vs {b.space}")


def monomial_name(mask: int) -> str:
    return "1" if mask == 0 else "".join(GEN_NAMES[i] for i in _bits(mask))


def wedge(a: CohClass, b: CohClass) -> CohClass:
    """Graded-commutative cup product."""
    _check_same(a, b)
    out: dict[int, Fraction] = {}
    for ma, va in a.terms.items():
        for mb, vb in b.terms.items():
            if ma & mb:
                continue
            m = ma | mb
            out[m] = out.get(m, 0) + _merge_sign(ma, mb) * va * vb
    return CohClass(a.space, out)


def lift(c: CohClass, space: str = "XY") -> CohClass:
    """Pull a class on X or Y back to X x Y."""
    return CohClass(space, dict(c.terms))


def two_form_class(coeffs, space: str = "X") -> CohClass:
    """Degree-2 class from six plane coefficients ordered (12,13,14,23,24,34)."""
    off = 0 if space == "X" else 4
    out = {}
    for (a, b), v in zip(PLANES, coeffs):
        out[(1 << (a + off)) | (1 << (b + off))] = _as_fraction(v)
    return CohClass(space, out)


def two_form_coeffs(c: CohClass) -> tuple[Fraction, ...]:
    """Inverse of :func:`two_form_class` on the degree-2 part."""
    off = 4 if c.space == "Y" else 0
    return tuple(c.terms.get((1 << (a + off)) | (1 << (b + off)), Fraction(0))
                 for a, b in PLANES)


def top_coefficient(c: CohClass) -> Fraction:
    mask = {"X": X_MASK, "Y": Y_MASK, "XY": 0xFF}[c.space]
    return c.terms.get(mask, Fraction(0))


def chern_character(rank: int, c1: CohClass, ch2_int, space: str | None = None) -> CohClass:
    """rank + c1 + ch2 with int ch2 = ch2_int, on X or Y."""
    space = space or c1.space
    if space not in ("X", "Y"):
        raise CohomologyError("chern_character lives on X or Y")
    if c1.space != space:
        raise CohomologyError("c1 is on the wrong space")
    if any(bin(m).count("1") != 2 for m in c1.terms):
        raise CohomologyError("c1 must be a pure degree-2 class")
    top = X_MASK if space == "X" else Y_MASK
    return CohClass(space, {0: rank, top: ch2_int}) + c1


def chern_data(c: CohClass) -> tuple[Fraction, tuple[Fraction, ...], Fraction]:
    """(rank, c1 plane coefficients, int ch2) of a class on X or Y."""
    return c.terms.get(0, Fraction(0)), two_form_coeffs(c.degree_part(2)), top_coefficient(c)


def _exp(p: CohClass) -> CohClass:
    out = CohClass.scalar(1, p.space)
    power = CohClass.scalar(1, p.space)
    for m in range(1, 5):
        power = wedge(power, p)
        out = out + power.scale(Fraction(1, factorial(m)))
    return out


def _poincare_exponent(sign: int = 1) -> CohClass:
    p = CohClass("XY", {})
    for i in range(4):
        p = p + CohClass.monomial(GEN_NAMES[i], GEN_NAMES[4 + i], coeff=sign, space="XY")
    return p


def poincare_class(sign: int = 1) -> CohClass:
    """ch(Q) = exp(sign * sum_i e_i ehat_i); sign=-1 gives the dual class."""
    return _exp(_poincare_exponent(sign))


def pushforward_to_Y(c: CohClass) -> CohClass:
    """Integrate over X: keep terms containing e1e2e3e4, drop that factor."""
    if c.space != "XY":
        raise CohomologyError("pushforward_to_Y needs a class on X x Y")
    return CohClass("Y", {m & Y_MASK: v for m, v in c.terms.items()
                          if m & X_MASK == X_MASK})


def pushforward_to_X(c: CohClass) -> CohClass:
    """Integrate over Y (the fibre factor ehat1..ehat4 sits on the right)."""
    if c.space != "XY":
        raise CohomologyError("pushforward_to_X needs a class on X x Y")
    return CohClass("X", {m & X_MASK: v for m, v in c.terms.items()
                          if m & Y_MASK == Y_MASK})


def fm_transform_coh(chE: CohClass) -> CohClass:
    """ch of the transform: -pi_Y*(pi_X^* chE . ch Q)."""
    if chE.space != "X":
        raise CohomologyError("fm_transform_coh expects a class on X")
    return -pushforward_to_Y(wedge(lift(chE), poincare_class(+1)))


def fm_inverse_coh(chF: CohClass) -> CohClass:
    """Mirror transform Y -> X with the dual kernel exp(-P).

    The sign of the exponent is the one for which the round trip
    X -> Y -> X is the identity on every class.
    """
    if chF.space != "Y":
        raise CohomologyError("fm_inverse_coh expects a class on Y")
    return -pushforward_to_X(wedge(lift(chF), poincare_class(-1)))


def euler_characteristic(ch: CohClass) -> Fraction:
    """Index on a torus (td = 1): the top-degree coefficient."""
    if ch.space not in ("X", "Y"):
        raise CohomologyError("euler_characteristic needs a class on X or Y")
    return top_coefficient(ch)


def all_monomials(space: str = "X"):
    gens = _bits(SPACES[space])
    for d in range(len(gens) + 1):
        for combo in combinations(gens, d):
            yield sum(1 << i for i in combo)


def as_integer(x: Fraction, what: str = "value") -> int:
    if x.denominator != 1:
        raise CohomologyError(f"{what} = {x} is not integral")
    return int(x)
