"""U(n) link fields on the periodic lattice (Z/N)^4.

Links are stored as one complex array of shape (4, N, N, N, N, n, n);
``links[mu][x]`` transports from site x + mu to site x.  Lattice spacing
1/N is folded into the curvature normalization so that curvatures and
Chern numbers compare directly with the continuum.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .geometry import PLANES, TwoForm, asd_fraction

UNITARITY_TOL = 1e-10
BRANCH_MARGIN = 1e-6


class CurvatureError(ValueError):
    """A plaquette sits on the branch cut of the principal logarithm."""


@dataclass(frozen=True, eq=False)
class LinkField:
    links: np.ndarray

    def __post_init__(self):
        u = np.ascontiguousarray(self.links, dtype=np.complex128)
        if u.ndim != 7 or u.shape[0] != 4 or len(set(u.shape[1:5])) != 1 or u.shape[5] != u.shape[6]:
            raise ValueError(f"links must have shape (4,N,N,N,N,n,n), got {u.shape}")
        if u.shape[1] < 2:
            raise ValueError("need N >= 2")
        n = u.shape[-1]
        err = np.abs(np.einsum("...ji,...jk->...ik", u.conj(), u) - np.eye(n)).max()
        if err > UNITARITY_TOL:
            raise ValueError(f"links are not unitary (max |U^dag U - I| = {err:.2e})")
        u.setflags(write=False)
        object.__setattr__(self, "links", u)

    @property
    def N(self) -> int:
        return self.links.shape[1]

    @property
    def n(self) -> int:
        return self.links.shape[-1]

    def __repr__(self):
        return f"LinkField(N={self.N}, n={self.n})"


def trivial_field(N: int, n: int = 1) -> LinkField:
    u = np.broadcast_to(np.eye(n, dtype=complex), (4, N, N, N, N, n, n))
    return LinkField(u.copy())


def _plane_key(p) -> tuple[int, int]:
    if isinstance(p, str):
        p = (int(p[0]), int(p[1]))
    a, b = int(p[0]), int(p[1])
    if not (1 <= a < b <= 4):
        raise ValueError(f"bad plane {p!r}; use 1-based (mu, nu) with mu < nu")
    return a - 1, b - 1


def constant_flux_field(N: int, k: int = 1, fluxes: dict | None = None) -> LinkField:
    """Line bundle with constant curvature.

    By default F = 2 pi k (dx12 - dx34).  ``fluxes`` maps 1-based planes
    (e.g. ``{(1, 3): 1, (2, 4): 1}``) to integer fluxes and overrides ``k``.
    Each plane uses the boundary-corrected gauge U_b = exp(2 pi i q x_a / N^2),
    U_a = exp(-2 pi i q x_b / N) on the slice x_a = N - 1.
    """
    if N < 2:
        raise ValueError("need N >= 2")
    if fluxes is None:
        fluxes = {(1, 2): k, (3, 4): -k}
    x = np.indices((N,) * 4)
    phase = np.zeros((4,) + (N,) * 4)
    for p, q in fluxes.items():
        a, b = _plane_key(p)
        q = int(q)
        phase[b] += q * x[a] / N ** 2
        phase[a] -= np.where(x[a] == N - 1, q * x[b] / N, 0.0)
    u = np.exp(2j * np.pi * phase)[..., None, None]
    return LinkField(u)


def poincare_twist(f: LinkField, xi, sign: int = 1) -> LinkField:
    """Tensor with the flat line bundle of holonomy exp(2 pi i sign xi_mu)."""
    xi = np.asarray(xi, dtype=float)
    ph = np.exp(2j * np.pi * sign * xi / f.N)
    return LinkField(f.links * ph[:, None, None, None, None, None, None])


def direct_sum(fields) -> LinkField:
    fields = list(fields)
    if not fields:
        raise ValueError("direct_sum of nothing")
    N = fields[0].N
    if any(g.N != N for g in fields):
        raise ValueError("direct_sum needs equal N")
    n = sum(g.n for g in fields)
    u = np.zeros((4, N, N, N, N, n, n), dtype=complex)
    o = 0
    for g in fields:
        u[..., o:o + g.n, o:o + g.n] = g.links
        o += g.n
    return LinkField(u)


def _shift(a: np.ndarray, mu: int, axis0: int = 0) -> np.ndarray:
    """a(x + mu) for site axes starting at ``axis0``."""
    return np.roll(a, -1, axis=axis0 + mu)


def plaquettes(links: np.ndarray, mu: int, nu: int) -> np.ndarray:
    """U_mu(x) U_nu(x+mu) U_mu(x+nu)^dag U_nu(x)^dag at every site."""
    um, un = links[mu], links[nu]
    a = um @ _shift(un, mu)
    b = un @ _shift(um, nu)
    return a @ np.swapaxes(b.conj(), -1, -2)


_GOLD = 0.6180339887498949


def unitary_log(p: np.ndarray, margin: float = BRANCH_MARGIN, label: str = "") -> np.ndarray:
    """Hermitian H with p = exp(iH), eigenphases in (-pi, pi); batched."""
    n = p.shape[-1]
    if n == 1:
        th = np.angle(p)
        bad = np.abs(th) > np.pi - margin
        if bad.any():
            idx = tuple(int(i) for i in np.argwhere(bad)[0][:-2])
            raise CurvatureError(f"curvature too large for this lattice: plaquette {label} at {idx} is at -1")
        return th
    # diagonalize a generic hermitian combination of the commuting parts,
    # then confirm that its eigenbasis also diagonalizes p
    ph = np.swapaxes(p.conj(), -1, -2)
    c = 0.5 * (p + ph) + _GOLD * (p - ph) / 2j
    _, v = np.linalg.eigh(c)
    d = np.swapaxes(v.conj(), -1, -2) @ p @ v
    diag = np.diagonal(d, axis1=-2, axis2=-1)
    off = np.abs(d - diag[..., None] * np.eye(n)).max(axis=(-1, -2))
    flat_p = p.reshape(-1, n, n)
    flat_v = v.reshape(-1, n, n).copy()
    flat_diag = diag.reshape(-1, n).copy()
    for i in np.flatnonzero(off.ravel() > 1e-10):
        t, z = scipy.linalg.schur(flat_p[i], output="complex")
        flat_v[i], flat_diag[i] = z, np.diag(t)
    th = np.angle(flat_diag)
    bad = np.abs(th) > np.pi - margin
    if bad.any():
        i = int(np.argwhere(bad)[0][0])
        idx = np.unravel_index(i, p.shape[:-2])
        raise CurvatureError(f"curvature too large for this lattice: plaquette {label} at {tuple(int(j) for j in idx)} has eigenvalue -1")
    h = (flat_v * th[:, None, :]) @ np.swapaxes(flat_v.conj(), -1, -2)
    h = 0.5 * (h + np.swapaxes(h.conj(), -1, -2))
    return h.reshape(p.shape)


def link_curvature(links: np.ndarray, margin: float = BRANCH_MARGIN) -> TwoForm:
    """Plaquette-log curvature N^2 (-i) log P_{mu nu} for any link array."""
    N = links.shape[1]
    comps = []
    for mu, nu in PLANES:
        h = unitary_log(plaquettes(links, mu, nu), margin, f"{mu + 1}{nu + 1}")
        comps.append(N * N * h)
    return TwoForm(np.stack(comps))


def plaquette_curvature(f: LinkField) -> TwoForm:
    return link_curvature(f.links)


def asd_residual(f: LinkField) -> float:
    return asd_fraction(plaquette_curvature(f))


def chern_numbers(F: TwoForm, N: int) -> tuple[np.ndarray, float]:
    """(c1 plane fluxes, int ch2) from a lattice curvature field.

    c1_{mu nu} is the flux through a coordinate slice divided by 2 pi,
    averaged over the transverse coordinates; ch2 is the Chern-Weil
    integral (1/8 pi^2) int tr F^F.
    """
    c = F.c
    sites = tuple(range(1, 5))
    tr = np.trace(c, axis1=-2, axis2=-1).real            # (6, N, N, N, N)
    c1 = tr.mean(axis=sites) / (2 * np.pi)
    def prod(i, j):
        return np.einsum("...ab,...ba->...", c[i], c[j]).real
    density = prod(0, 5) - prod(1, 4) + prod(2, 3)
    ch2 = density.mean() / (4 * np.pi ** 2)
    return c1, float(ch2)


def field_invariants(f: LinkField) -> tuple[int, np.ndarray, float]:
    c1, ch2 = chern_numbers(plaquette_curvature(f), f.N)
    return f.n, c1, ch2


def slice_fluxes(f: LinkField, mu: int, nu: int) -> np.ndarray:
    """(1/2 pi) sum of tr plaquette phases over every (mu, nu) slice (0-based)."""
    h = unitary_log(plaquettes(f.links, mu, nu))
    tr = np.trace(h, axis1=-2, axis2=-1).real
    return tr.sum(axis=(mu, nu)) / (2 * np.pi)


def wilson_loops(links: np.ndarray, mu: int) -> np.ndarray:
    """Ordered product of the N links along direction mu, for every basepoint."""
    N = links.shape[1]
    u = links[mu]
    w = u.copy()
    for j in range(1, N):
        w = w @ np.roll(u, -j, axis=mu)
    return w


def wilson_loop(f: LinkField, mu: int, x=(0, 0, 0, 0)) -> np.ndarray:
    """Holonomy around cycle mu (0-based) through basepoint x."""
    N = f.N
    x = list(x)
    w = np.eye(f.n, dtype=complex)
    for _ in range(N):
        w = w @ f.links[mu][tuple(x)]
        x[mu] = (x[mu] + 1) % N
    return w


def haar_unitaries(rng: np.random.Generator, shape, n: int) -> np.ndarray:
    """Haar-random U(n) matrices: QR of a complex Ginibre matrix, phases fixed."""
    z = (rng.standard_normal(tuple(shape) + (n, n))
         + 1j * rng.standard_normal(tuple(shape) + (n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[..., None, :]


def random_gauge_transform(f: LinkField, seed: int) -> LinkField:
    """U_mu(x) -> g(x) U_mu(x) g(x+mu)^dag with Haar g from PCG64(seed)."""
    rng = np.random.Generator(np.random.PCG64(seed))
    g = haar_unitaries(rng, (f.N,) * 4, f.n)
    gh = np.swapaxes(g.conj(), -1, -2)
    u = np.stack([g @ f.links[mu] @ _shift(gh, mu) for mu in range(4)])
    return LinkField(u)
