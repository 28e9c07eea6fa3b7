"""Discrete Nahm / Fourier-Mukai transform of a lattice gauge field.

At every point of an M^4 dual grid the low Delta^1 cluster of the twisted
complex is computed; neighbouring frames are compared through their overlap
matrix and the polar factor of that overlap is the Berry link.  Crossing the
boundary of the dual torus uses the Poincare identification: the twisted
problem at xi + e_mu is the one at xi conjugated by g(x) = exp(-2 pi i x_mu).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dolbeault import (DEFAULT_REGULATOR, DEFAULT_RHO_GAP, DEFAULT_TAU_KER,
                        IT1Report, make_solver, scan)
from .geometry import PLANES, TwoForm, asd_fraction
from .lattice import (CurvatureError, LinkField, chern_numbers, constant_flux_field,
                      field_invariants, link_curvature, wilson_loops)

MIN_OVERLAP_SV = 0.1
INTEGER_TOL = 0.2
WILSON_TOL = 0.15


class NotIT1Error(RuntimeError):
    def __init__(self, report: IT1Report):
        fs = report.failure_set[:5]
        ind = report.indeterminate_set[:5]
        super().__init__(f"input is not IT1 on the dual grid: failures at {fs}"
                         f"{'...' if len(report.failure_set) > 5 else ''}, indeterminate at {ind}")
        self.report = report


class SingularOverlapError(RuntimeError):
    def __init__(self, idx, mu, smin, threshold=MIN_OVERLAP_SV):
        super().__init__(f"singular overlap on link (xi index {tuple(int(i) for i in idx)}, direction {mu + 1}): "
                         f"smallest singular value {smin:.3g} < {threshold}; dual grid too coarse")
        self.idx, self.mu, self.smin = idx, mu, smin


class ResolutionError(ValueError):
    """Chern numbers too far from integers: resolution insufficient."""


@dataclass(frozen=True, eq=False)
class BerryBundle:
    """Berry links on the dual grid (plus the frames that produced them)."""

    links: np.ndarray                      # (4, M, M, M, M, r, r)
    frames: tuple | None = None            # grid-ordered ZeroModeFrames
    source: dict = field(default_factory=dict)
    index_report: IT1Report | None = None

    def __post_init__(self):
        u = np.ascontiguousarray(self.links, dtype=np.complex128)
        r = u.shape[-1]
        err = np.abs(np.einsum("...ji,...jk->...ik", u.conj(), u) - np.eye(r)).max()
        if err > 1e-10:
            raise ValueError(f"Berry links are not unitary ({err:.2e})")
        u.setflags(write=False)
        object.__setattr__(self, "links", u)

    @property
    def M(self) -> int:
        return self.links.shape[1]

    @property
    def r(self) -> int:
        return self.links.shape[-1]

    def as_link_field(self) -> LinkField:
        return LinkField(self.links)

    @classmethod
    def from_links(cls, links, **kw) -> "BerryBundle":
        return cls(np.asarray(links), **kw)


def _polar(o: np.ndarray):
    w, s, zh = np.linalg.svd(o)
    return w @ zh, s


def berry_links(frames, M: int, sign: int = 1, min_sv: float = MIN_OVERLAP_SV) -> np.ndarray:
    """Polar-unitarized overlaps between neighbouring frames, grid-ordered input."""
    r = frames[0].rank
    links = np.zeros((4, M, M, M, M, r, r), dtype=complex)
    grid = np.arange(M ** 4).reshape((M,) * 4)
    for flat, idx in enumerate(np.ndindex(*(M,) * 4)):
        here = frames[flat]
        for mu in range(4):
            nb = list(idx)
            wrap = nb[mu] == M - 1
            nb[mu] = (nb[mu] + 1) % M
            there = frames[grid[tuple(nb)]]
            if wrap:
                there = there.gauge_wrap(mu, sign)
            v, s = _polar(here.inner(there))
            if s.min() < min_sv:
                raise SingularOverlapError(idx, mu, float(s.min()), min_sv)
            links[(mu,) + idx] = v
    return links


def transform_bundle(f: LinkField, M: int, *, tau_ker: float = DEFAULT_TAU_KER,
                     rho_gap: float = DEFAULT_RHO_GAP, regulator: float = DEFAULT_REGULATOR,
                     solver: str = "auto", twist_sign: int = 1, n_eigs: int = 6,
                     threads: int = 1, keep_frames: bool = True,
                     min_overlap_sv: float = MIN_OVERLAP_SV, **solver_kw) -> BerryBundle:
    """Frames at each dual grid point and the induced (Berry) connection."""
    if M < 2:
        raise ValueError("dual grid needs M >= 2")
    s = make_solver(f, regulator, solver, **solver_kw)

    class _Signed:
        kind, N, n = s.kind, s.N, s.n

        def solve(self, xi, **kw):
            return s.solve(tuple(twist_sign * v for v in xi), **kw)

    rep, _, frames = scan(_Signed(), M, tau_ker, rho_gap, n_eigs=n_eigs,
                          threads=threads, keep_frames=True)
    if not rep.it1:
        raise NotIT1Error(rep)
    if not rep.rank:
        raise NotIT1Error(rep)
    links = berry_links(frames, M, twist_sign, min_overlap_sv)
    src = {"N": f.N, "n": f.n, "regulator": regulator, "twist_sign": twist_sign,
           "solver": s.kind, "tau_ker": tau_ker, "rho_gap": rho_gap}
    return BerryBundle(links, tuple(frames) if keep_frames else None, src, rep)


def berry_curvature(b: BerryBundle) -> TwoForm:
    try:
        return link_curvature(b.links)
    except CurvatureError as exc:
        raise CurvatureError(f"dual grid too coarse: {exc}") from None


def transform_asd_residual(b: BerryBundle) -> float:
    return asd_fraction(berry_curvature(b))


def _round(x: float, what: str, tol: float) -> int:
    k = int(np.rint(x))
    if abs(x - k) > tol:
        raise ResolutionError(f"resolution insufficient: {what} = {x:.4f} is not within {tol} of an integer")
    return k


def raw_invariants(F: TwoForm, M: int, rank: int):
    c1, ch2 = chern_numbers(F, M)
    return rank, c1, ch2


def round_invariants(rank, c1, ch2, tol: float = INTEGER_TOL):
    c1i = tuple(_round(v, f"c1[{i}]", tol) for i, v in enumerate(c1))
    return int(rank), c1i, _round(ch2, "ch2", tol)


def transform_invariants(b: BerryBundle, tol: float = INTEGER_TOL):
    """(rank, c1 plane fluxes, ch2) rounded to integers."""
    return round_invariants(*raw_invariants(berry_curvature(b), b.M, b.r), tol)


def link_field_invariants(f: LinkField, tol: float = INTEGER_TOL):
    return round_invariants(*field_invariants(f), tol)


# ----------------------------------------------------------- double transform

@dataclass
class DoubleTransformReport:
    original: tuple
    double: tuple | None
    invariants_equal: bool
    wilson_max_error: float | None
    wilson_ok: bool
    it1_second: bool
    theorem_violation: bool
    recovered_twist: list | None = None
    detail: str = ""

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        if d["recovered_twist"] is not None:
            d["recovered_twist"] = [[float(z.real), float(z.imag)] for z in self.recovered_twist]
        return d


def double_transform_check(f: LinkField, M: int, *, reference: LinkField | None = None,
                           wilson_tol: float = WILSON_TOL, integer_tol: float = INTEGER_TOL,
                           first: BerryBundle | None = None, **kw) -> DoubleTransformReport:
    """Transform f to the M-grid and back to an N-lattice; compare invariants and holonomy.

    The second transform uses the same lattice twist formula, which is the
    dual Poincare kernel in these conventions.  With ``reference`` given (the
    untwisted field), the report carries, per direction, the mean ratio of
    the double transform's Wilson traces to the reference ones; for an input
    twisted by zeta this is exp(2 pi i zeta_mu).
    """
    orig = link_field_invariants(f, integer_tol)
    b1 = first if first is not None else transform_bundle(f, M, **kw)
    g = b1.as_link_field()
    try:
        b2 = transform_bundle(g, f.N, **kw)
    except NotIT1Error as exc:
        return DoubleTransformReport(orig, None, False, None, False, False, True,
                                     detail=f"transformed field is not IT1: {exc}")
    dbl = transform_invariants(b2, integer_tol)
    errs, ratios = [], []
    for mu in range(4):
        w2 = np.trace(wilson_loops(b2.links, mu), axis1=-2, axis2=-1)
        w1 = np.trace(wilson_loops(f.links, mu), axis1=-2, axis2=-1)
        errs.append(np.abs(w2 - w1).max())
        if reference is not None:
            wr = np.trace(wilson_loops(reference.links, mu), axis1=-2, axis2=-1)
            ratios.append(complex(np.mean(w2 * wr.conj()) / np.mean(np.abs(wr) ** 2)))
    werr = float(max(errs))
    eq = dbl == orig
    return DoubleTransformReport(orig, dbl, eq, werr, werr <= wilson_tol, True, not eq,
                                 ratios if reference is not None else None)


# ------------------------------------------------------------ irreducibility

@dataclass
class IrreducibilityResult:
    verdict: str          # 'irreducible', 'reducible' or 'indeterminate'
    algebra_dim: int
    commutant_dim: int

    def __iter__(self):
        return iter((self.verdict, self.algebra_dim, self.commutant_dim))


def _transport(links: np.ndarray, idx) -> np.ndarray:
    """Parallel transport from fibre idx to the basepoint along the
    lexicographic staircase (direction 1 first, then 2, 3, 4)."""
    r = links.shape[-1]
    p = np.eye(r, dtype=complex)
    pos = [0, 0, 0, 0]
    for mu in range(4):
        for _ in range(idx[mu]):
            p = p @ links[(mu,) + tuple(pos)]
            pos[mu] += 1
    return p


def _rank(s: np.ndarray, tol: float):
    """Numerical rank of a singular-value list and whether it is ambiguous."""
    if s.size == 0 or s[0] == 0:
        return 0, False
    rel = s / s[0]
    ambiguous = bool(np.any((rel > tol / 10) & (rel < tol * 10)))
    return int(np.sum(rel > tol)), ambiguous


def algebra_and_commutant(gens, r: int, tol: float = 1e-6):
    """Dimension of the unital algebra generated by ``gens`` and of its commutant."""
    ambiguous = False
    gens = [g / np.linalg.norm(g) for g in gens if np.linalg.norm(g) > tol]
    basis = np.eye(r, dtype=complex).reshape(1, -1) / np.sqrt(r)
    cand = np.vstack([basis] + [g.reshape(1, -1) for g in gens])
    dim = 0
    for _ in range(2 * r * r):
        _, s, vh = np.linalg.svd(cand, full_matrices=False)
        k, amb = _rank(s, tol)
        ambiguous |= amb
        basis = vh[:k]
        if k == dim or k == r * r:
            dim = k
            break
        dim = k
        prods = [(g @ b.reshape(r, r)).reshape(1, -1) for g in gens for b in basis]
        cand = np.vstack([basis] + prods)
    eye = np.eye(r)
    if gens:
        K = np.vstack([np.kron(g, eye) - np.kron(eye, g.T) for g in gens])
        s = np.linalg.svd(K, compute_uv=False)
        s = np.concatenate([s, np.zeros(r * r - s.size)]) if s.size < r * r else s
        scale = max(s[0], 1.0)
        small = s / scale
        ambiguous |= bool(np.any((small > tol / 10) & (small < tol * 10)))
        comm = int(np.sum(small <= tol))
    else:
        comm = r * r
    return dim, comm, ambiguous


def links_irreducibility(links: np.ndarray, samples: int = 16, tol: float = 1e-6) -> IrreducibilityResult:
    """Irreducibility from curvature and loop holonomies transported to the basepoint.

    Generators are F_{mu nu}(x_s) for all planes and the four straight-loop
    holonomies at x_s, all transported back along the lexicographic staircase.
    The loop holonomies capture flat (global) data that curvature alone misses.
    Works for any link array: Berry data or an input field.
    """
    r, M = links.shape[-1], links.shape[1]
    if r < 1:
        raise ValueError("rank must be positive")
    try:
        F = link_curvature(links).c
    except CurvatureError as exc:
        raise CurvatureError(f"dual grid too coarse: {exc}") from None
    loops = [wilson_loops(links, mu) for mu in range(4)]
    n_pts = M ** 4
    picks = sorted(set(int(round(v)) for v in np.linspace(0, n_pts - 1, max(1, min(samples, n_pts)))))
    gens = []
    for flat in picks:
        idx = tuple(int(i) for i in np.unravel_index(flat, (M,) * 4))
        p = _transport(links, idx)
        ph = p.conj().T
        for comp in range(6):
            gens.append(p @ F[(comp,) + idx] @ ph)
        for mu in range(4):
            gens.append(p @ loops[mu][idx] @ ph)
    dim, comm, amb = algebra_and_commutant(gens, r, tol)
    if amb:
        verdict = "indeterminate"
    else:
        verdict = "irreducible" if dim == r * r and comm == 1 else "reducible"
    return IrreducibilityResult(verdict, dim, comm)


def irreducibility_test(b: BerryBundle, samples: int = 16, tol: float = 1e-6) -> IrreducibilityResult:
    """(verdict, algebra_dim, commutant_dim) for the transformed connection."""
    return links_irreducibility(b.links, samples, tol)


# --------------------------------------------------------- synthetic bundles

def abelian_flux_bundle(M: int, fluxes: dict) -> BerryBundle:
    """Rank-1 Berry data with constant curvature 2 pi q in the given planes."""
    return BerryBundle(constant_flux_field(M, fluxes=fluxes).links)


def pauli_pair_bundle(M: int, strength: float = 0.25) -> BerryBundle:
    """Rank-2 links whose curvature is F_12 ~ sigma_x, F_34 ~ sigma_z.

    V_2 = exp(i c x_1 sigma_x), V_4 = exp(i c x_3 sigma_z), V_1 = V_3 = 1, with
    c = ``strength`` per site.  Not a periodic constant-curvature bundle, only
    a small-angle test datum whose curvature generates all of M_2(C).
    """
    if strength * (M - 1) >= np.pi / 2:
        raise ValueError("strength too large for this grid")
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    x = np.indices((M,) * 4)
    links = np.broadcast_to(np.eye(2, dtype=complex), (4,) + (M,) * 4 + (2, 2)).copy()
    for mu, coord, s in ((1, 0, sx), (3, 2, sz)):
        a = strength * x[coord]
        links[mu] = np.cos(a)[..., None, None] * np.eye(2) + 1j * np.sin(a)[..., None, None] * s
    return BerryBundle(links)
