"""Twisted Dolbeault complex on the lattice, its Laplacians and the IT1 scan.

Derivatives are covariant central differences
    nabla_mu = (N/2) (T_mu - T_mu^dag),   (T_mu psi)(x) = U_mu(x) psi(x + mu),
with dbar_1 = (nabla_1 + i nabla_2)/2 and dbar_2 = (nabla_3 + i nabla_4)/2.
Central differences alone have doublers at momentum pi; these are lifted by
a plane-wise covariant Wilson term R = W_12^2 + W_34^2,
    W_p = (r N / 2) sum_{mu in p} (2 - T_mu - T_mu^dag),
added to all three Laplacians.  R vanishes on smooth sections as N grows.

Vector layout is C-order over (component, x1, x2, x3, x4, fibre index).
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .lattice import LinkField, poincare_twist

DEFAULT_REGULATOR = 0.2
DEFAULT_TAU_KER = 0.5
DEFAULT_RHO_GAP = 50.0
GAP_EPS = 1e-12
DENSE_MAX = 4096
SEPARABLE_TOL = 1e-13


class SolverError(RuntimeError):
    def __init__(self, msg, xi=None, degree=None):
        where = ""
        if xi is not None or degree is not None:
            where = f" (xi={None if xi is None else tuple(float(v) for v in xi)}, degree={degree})"
        super().__init__(msg + where)
        self.xi, self.degree = xi, degree


class ClusterError(ValueError):
    """The low spectrum of Delta^1 does not have the expected cluster."""


# ---------------------------------------------------------------- operators

def covariant_shift(links: np.ndarray, mu: int) -> sp.csr_matrix:
    """Sparse T_mu acting on site-major, fibre-minor vectors."""
    N, n = links.shape[1], links.shape[-1]
    sites = np.arange(N ** 4).reshape((N,) * 4)
    nb = np.roll(sites, -1, axis=mu).ravel()
    s = sites.ravel()
    u = links[mu].reshape(-1, n, n)
    rows, cols, vals = [], [], []
    for i in range(n):
        for j in range(n):
            rows.append(s * n + i)
            cols.append(nb * n + j)
            vals.append(u[:, i, j])
    dim = N ** 4 * n
    t = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(dim, dim))
    return t.tocsr()


def _h(a):
    return a.conj().T


@dataclass(frozen=True, eq=False)
class DolbeaultOps:
    """D0: Omega^0 -> Omega^{01}, D1: Omega^{01} -> Omega^{02}, plus regulator R."""

    N: int
    n: int
    regulator: float
    D0: sp.csr_matrix
    D1: sp.csr_matrix
    R: sp.csr_matrix

    @property
    def dims(self) -> tuple[int, int, int]:
        d = self.N ** 4 * self.n
        return d, 2 * d, d

    def laplacian(self, degree: int) -> sp.csr_matrix:
        return laplacian(self, degree)


def assemble(f: LinkField, regulator: float = DEFAULT_REGULATOR) -> DolbeaultOps:
    N = f.N
    T = [covariant_shift(f.links, mu) for mu in range(4)]
    nab = [0.5 * N * (t - _h(t)) for t in T]
    db1 = 0.5 * (nab[0] + 1j * nab[1])
    db2 = 0.5 * (nab[2] + 1j * nab[3])
    D0 = sp.vstack([db1, db2]).tocsr()
    D1 = sp.hstack([-db2, db1]).tocsr()
    dim = T[0].shape[0]
    eye = sp.identity(dim, format="csr")
    R = sp.csr_matrix((dim, dim), dtype=complex)
    if regulator:
        for a, b in ((0, 1), (2, 3)):
            w = 0.5 * regulator * N * (4 * eye - T[a] - _h(T[a]) - T[b] - _h(T[b]))
            R = R + w @ w
    return DolbeaultOps(N, f.n, float(regulator), D0, D1, R.tocsr())


def laplacian(ops: DolbeaultOps, degree: int) -> sp.csr_matrix:
    if degree == 0:
        L = _h(ops.D0) @ ops.D0 + ops.R
    elif degree == 1:
        L = ops.D0 @ _h(ops.D0) + _h(ops.D1) @ ops.D1 + sp.block_diag([ops.R, ops.R])
    elif degree == 2:
        L = ops.D1 @ _h(ops.D1) + ops.R
    else:
        raise ValueError(f"degree must be 0, 1 or 2, got {degree}")
    L = 0.5 * (L + _h(L))
    return L.tocsr()


# ------------------------------------------------------------ eigen solver

def _norm_est(a) -> float:
    if sp.issparse(a):
        return float(spla.norm(a, 1))
    return float(np.abs(a).sum(axis=0).max())


def smallest_eigenpairs(op, m: int, tol: float = 1e-9, *, seed: int = 0,
                        maxiter: int = 2000, dense_max: int = DENSE_MAX,
                        xi=None, degree=None) -> tuple[np.ndarray, np.ndarray]:
    """The m smallest eigenpairs of a hermitian matrix (dense or sparse).

    Dense LAPACK below ``dense_max``, LOBPCG with a seeded random start above.
    Returns ascending eigenvalues and orthonormal eigenvector columns; raises
    SolverError if the residual test ||A v - lambda v|| <= tol ||A|| fails.
    """
    dim = op.shape[0]
    if not 1 <= m <= dim:
        raise ValueError(f"need 1 <= m <= dim, got m={m}, dim={dim}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    scale = _norm_est(op)
    if dim <= dense_max:
        a = op.toarray() if sp.issparse(op) else np.asarray(op)
        w, v = scipy.linalg.eigh(a, subset_by_index=[0, m - 1], driver="evr")
    else:
        rng = np.random.Generator(np.random.PCG64(seed))
        k = min(dim, max(2 * m, m + 8))
        x0 = rng.standard_normal((dim, k)) + 1j * rng.standard_normal((dim, k))
        x0, _ = np.linalg.qr(x0)
        w, v = spla.lobpcg(op, x0, tol=tol * scale, maxiter=maxiter, largest=False)
        order = np.argsort(w)
        w, v = w[order][:m], v[:, order][:, :m]
        v, _ = np.linalg.qr(v)
        # Rayleigh-Ritz on the returned block
        h = _h(v) @ (op @ v)
        w, s = np.linalg.eigh(0.5 * (h + _h(h)))
        v = v @ s
    res = np.linalg.norm(op @ v - v * w, axis=0)
    if np.any(res > tol * max(scale, 1.0)):
        raise SolverError(f"eigensolver did not converge (max residual {res.max():.2e})",
                          xi=xi, degree=degree)
    return np.asarray(w, dtype=float), v


# ------------------------------------------------------------------ frames

def _phase_fix(v: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry (first on ties) is real positive."""
    v = np.array(v, dtype=complex, copy=True)
    if v.ndim == 1:
        v = v[:, None]
    mags = np.abs(v)
    for j in range(v.shape[1]):
        p = int(np.argmax(mags[:, j] >= mags[:, j].max() * (1 - 1e-9)))
        z = v[p, j]
        if z != 0:
            v[:, j] *= np.conj(z) / abs(z)
    return v


def _coord_phase(N: int, mu: int, sign: int, ndim: int = 4) -> np.ndarray:
    """exp(-sign 2 pi i x_mu / N) on an (N,)*ndim site array."""
    x = np.arange(N).reshape([-1 if a == mu else 1 for a in range(ndim)])
    return np.broadcast_to(np.exp(-2j * np.pi * sign * x / N), (N,) * ndim)


class ZeroModeFrame:
    """Orthonormal basis of the low Delta^1 cluster at one dual point."""

    N: int
    n: int
    xi: tuple

    @property
    def rank(self) -> int:
        raise NotImplementedError

    def dense(self) -> np.ndarray:
        raise NotImplementedError

    def inner(self, other: "ZeroModeFrame") -> np.ndarray:
        return _h(self.dense()) @ other.dense()

    def gauge_wrap(self, mu: int, sign: int) -> "ZeroModeFrame":
        raise NotImplementedError


@dataclass(eq=False)
class DenseFrame(ZeroModeFrame):
    vectors: np.ndarray
    N: int
    n: int
    xi: tuple = (0.0, 0.0, 0.0, 0.0)

    @property
    def rank(self) -> int:
        return self.vectors.shape[1]

    def dense(self) -> np.ndarray:
        return self.vectors

    def inner(self, other: ZeroModeFrame) -> np.ndarray:
        return _h(self.vectors) @ other.dense()

    def gauge_wrap(self, mu: int, sign: int) -> "DenseFrame":
        g = _coord_phase(self.N, mu, sign)[None, ..., None]
        shape = (2,) + (self.N,) * 4 + (self.n,)
        v = self.vectors.reshape(shape + (-1,)) * g[..., None]
        return DenseFrame(v.reshape(self.vectors.shape), self.N, self.n, self.xi)


@dataclass(eq=False)
class KronFrame(ZeroModeFrame):
    """Frame whose columns are comp(c) x summand(i) x u(x1,x2) v(x3,x4)."""

    comps: np.ndarray      # (r,) 0 for the dbar_1 slot, 1 for dbar_2
    summands: np.ndarray   # (r,)
    U: np.ndarray          # (N^2, r)
    V: np.ndarray          # (N^2, r)
    N: int
    n: int
    xi: tuple = (0.0, 0.0, 0.0, 0.0)

    @property
    def rank(self) -> int:
        return self.U.shape[1]

    def dense(self) -> np.ndarray:
        N, n, r = self.N, self.n, self.rank
        out = np.zeros((2, N * N, N * N, n, r), dtype=complex)
        for j in range(r):
            out[self.comps[j], :, :, self.summands[j], j] = np.outer(self.U[:, j], self.V[:, j])
        return out.reshape(-1, r)

    def inner(self, other: ZeroModeFrame) -> np.ndarray:
        if not isinstance(other, KronFrame):
            return _h(self.dense()) @ other.dense()
        mask = ((self.comps[:, None] == other.comps[None, :])
                & (self.summands[:, None] == other.summands[None, :]))
        return (_h(self.U) @ other.U) * (_h(self.V) @ other.V) * mask

    def gauge_wrap(self, mu: int, sign: int) -> "KronFrame":
        g = _coord_phase(self.N, mu % 2, sign, ndim=2).ravel()[:, None]
        U, V = (self.U * g, self.V) if mu < 2 else (self.U, self.V * g)
        return KronFrame(self.comps, self.summands, U, V, self.N, self.n, self.xi)


# --------------------------------------------------------------- solvers

@dataclass
class FiberSolution:
    xi: tuple
    eig0: np.ndarray
    eig1: np.ndarray
    eig2: np.ndarray
    frame: ZeroModeFrame | None = None


def separable_planes(f: LinkField, tol: float = SEPARABLE_TOL):
    """Per-summand plane link data if f is a direct sum of U(1) fields with
    U1, U2 depending only on (x1, x2) and U3, U4 only on (x3, x4); else None."""
    u = f.links
    n = f.n
    off = u * (1 - np.eye(n))
    if n > 1 and np.abs(off).max() > tol:
        return None
    d = np.diagonal(u, axis1=-2, axis2=-1)           # (4, N, N, N, N, n)
    a = d[:2, :, :, :1, :1]
    b = d[2:, :1, :1, :, :]
    if np.abs(d[:2] - a).max() > tol or np.abs(d[2:] - b).max() > tol:
        return None
    return [(a[:, :, :, 0, 0, i], b[:, 0, 0, :, :, i]) for i in range(n)]


def plane_operators(u0: np.ndarray, u1: np.ndarray, t, regulator: float):
    """Dense 2D (A^dag A + W^2, A A^dag + W^2) for one coordinate plane."""
    N = u0.shape[0]
    idx = np.arange(N * N).reshape(N, N)
    T = []
    for ax, u, tt in ((0, u0, t[0]), (1, u1, t[1])):
        m = np.zeros((N * N, N * N), dtype=complex)
        m[idx.ravel(), np.roll(idx, -1, axis=ax).ravel()] = (u * np.exp(2j * np.pi * tt / N)).ravel()
        T.append(m)
    nab = [0.5 * N * (m - _h(m)) for m in T]
    A = 0.5 * (nab[0] + 1j * nab[1])
    W = 0.5 * regulator * N * (4 * np.eye(N * N) - T[0] - _h(T[0]) - T[1] - _h(T[1]))
    W2 = W @ W
    P = _h(A) @ A + W2
    Q = A @ _h(A) + W2
    return 0.5 * (P + _h(P)), 0.5 * (Q + _h(Q))


class KronSolver:
    """Exact solver for plane-separable abelian fields.

    The Laplacians are Kronecker sums of 2D plane operators:
    Delta^0 = P_a + P_b, Delta^1 = (Q_a + P_b) (+) (P_a + Q_b), Delta^2 = Q_a + Q_b.
    """

    kind = "kron"

    def __init__(self, f: LinkField, regulator: float = DEFAULT_REGULATOR, keep: int = 12):
        planes = separable_planes(f)
        if planes is None:
            raise ValueError("field is not plane-separable")
        self.f, self.N, self.n = f, f.N, f.n
        self.regulator = regulator
        self.planes = planes
        self.keep = min(keep, f.N ** 2)
        self._cache = {}

    def _plane(self, i: int, which: int, t) -> dict:
        key = (i, which, float(t[0]), float(t[1]))
        hit = self._cache.get(key)
        if hit is None:
            u = self.planes[i][which]
            P, Q = plane_operators(u[0], u[1], t, self.regulator)
            k = self.keep
            hit = {}
            for name, m in (("P", P), ("Q", Q)):
                w, v = scipy.linalg.eigh(m, subset_by_index=[0, k - 1], driver="evr")
                hit[name] = (w, v)
            self._cache[key] = hit
        return hit

    def _sums(self, xi, pairs, m):
        """Lowest m values of the union of Kronecker sums; pairs = [(comp, i, A, B)]."""
        cand = []
        for comp, i, (wa, _), (wb, _) in pairs:
            s = wa[:, None] + wb[None, :]
            for p, q in zip(*np.unravel_index(np.argsort(s, axis=None, kind="stable"), s.shape)):
                cand.append((s[p, q], comp, i, p, q))
        cand.sort(key=lambda c: (c[0], c[1], c[2], c[3], c[4]))
        return cand[:m]

    def solve(self, xi, m1: int = 6, frame_rank: int | None = None, m0: int = 2, m2: int = 2):
        ta, tb = (xi[0], xi[1]), (xi[2], xi[3])
        d0, d1, d2 = [], [], []
        for i in range(self.n):
            a, b = self._plane(i, 0, ta), self._plane(i, 1, tb)
            d0.append((0, i, a["P"], b["P"]))
            d2.append((0, i, a["Q"], b["Q"]))
            d1.append((0, i, a["Q"], b["P"]))
            d1.append((1, i, a["P"], b["Q"]))
        e0 = np.array([c[0] for c in self._sums(xi, d0, m0)])
        e2 = np.array([c[0] for c in self._sums(xi, d2, m2)])
        low1 = self._sums(xi, d1, max(m1, (frame_rank or 0) + 1))
        e1 = np.array([c[0] for c in low1])
        frame = None
        if frame_rank:
            sel = low1[:frame_rank]
            comps = np.array([c[1] for c in sel])
            summ = np.array([c[2] for c in sel])
            U = np.stack([self._plane(c[2], 0, ta)["Q" if c[1] == 0 else "P"][1][:, c[3]] for c in sel], axis=1)
            V = np.stack([self._plane(c[2], 1, tb)["P" if c[1] == 0 else "Q"][1][:, c[4]] for c in sel], axis=1)
            frame = KronFrame(comps, summ, _phase_fix(U), _phase_fix(V), self.N, self.n, tuple(xi))
        return FiberSolution(tuple(xi), e0[:m0], e1[:m1], e2[:m2], frame)


class GenericSolver:
    """Assemble the twisted complex at each xi and diagonalize."""

    kind = "generic"

    def __init__(self, f: LinkField, regulator: float = DEFAULT_REGULATOR, *,
                 dense_max: int = DENSE_MAX, tol: float = 1e-9, maxiter: int = 2000, seed: int = 0):
        self.f, self.N, self.n = f, f.N, f.n
        self.regulator = regulator
        self.dense_max, self.tol, self.maxiter, self.seed = dense_max, tol, maxiter, seed

    def solve(self, xi, m1: int = 6, frame_rank: int | None = None, m0: int = 2, m2: int = 2):
        ops = assemble(poincare_twist(self.f, xi), self.regulator)
        kw = dict(tol=self.tol, seed=self.seed, maxiter=self.maxiter,
                  dense_max=self.dense_max, xi=xi)
        e0, _ = smallest_eigenpairs(laplacian(ops, 0), min(m0, ops.dims[0]), degree=0, **kw)
        e2, _ = smallest_eigenpairs(laplacian(ops, 2), min(m2, ops.dims[2]), degree=2, **kw)
        m = min(max(m1, (frame_rank or 0) + 1), ops.dims[1])
        e1, v1 = smallest_eigenpairs(laplacian(ops, 1), m, degree=1, **kw)
        frame = None
        if frame_rank:
            frame = DenseFrame(_phase_fix(v1[:, :frame_rank]), self.N, self.n, tuple(xi))
        return FiberSolution(tuple(xi), e0, e1[:m1], e2, frame)


def make_solver(f: LinkField, regulator: float = DEFAULT_REGULATOR, mode: str = "auto", **kw):
    """'kron' (plane-separable fields only), 'generic', or 'auto'."""
    if mode not in ("auto", "kron", "generic"):
        raise ValueError(f"unknown solver mode {mode!r}")
    if mode in ("auto", "kron") and separable_planes(f) is not None:
        return KronSolver(f, regulator)
    if mode == "kron":
        raise ValueError("kron solver requested but the field is not plane-separable")
    return GenericSolver(f, regulator, **kw)


# ------------------------------------------------------------ classifier

@dataclass
class SpectralReport:
    degree: int
    eigenvalues: np.ndarray
    kernel_dim: int
    gap_ratio: float


def spectral_report(degree: int, eigenvalues, tau_ker: float) -> SpectralReport:
    ev = np.sort(np.asarray(eigenvalues, dtype=float))
    k = int(np.sum(ev < tau_ker))
    if 0 < k < len(ev):
        gap = float(ev[k] / (max(ev[k - 1], 0.0) + GAP_EPS))
    else:
        gap = float("inf") if k == 0 else float("nan")
    return SpectralReport(degree, ev, k, gap)


def dual_grid(M: int) -> list[tuple]:
    """Lexicographic grid {0, 1/M, ..., (M-1)/M}^4 on the dual torus."""
    if M < 1:
        raise ValueError("grid size must be positive")
    return [tuple(i / M for i in idx) for idx in product(range(M), repeat=4)]


def _grid_points(grid):
    if isinstance(grid, (int, np.integer)):
        return dual_grid(int(grid))
    pts = [tuple(float(v) for v in p) for p in grid]
    if not pts:
        raise ValueError("empty grid")
    return pts


@dataclass
class PointResult:
    xi: tuple
    status: str                 # 'ok', 'fail' or 'indeterminate'
    rank: int
    reports: tuple              # SpectralReport for degrees 0, 1, 2
    reason: str = ""


@dataclass
class IT1Report:
    points: list
    tau_ker: float
    rho_gap: float
    rank: int | None = None
    it1: bool = False
    failure_set: list = field(default_factory=list)
    indeterminate_set: list = field(default_factory=list)
    min_gap_ratio: float = float("inf")
    min_lambda0: float = float("inf")
    min_lambda2: float = float("inf")
    solver: str = ""

    def summary(self) -> dict:
        return {
            "it1": self.it1,
            "rank": self.rank,
            "grid_points": len(self.points),
            "failure_set": [list(p) for p in self.failure_set],
            "indeterminate_set": [list(p) for p in self.indeterminate_set],
            "min_gap_ratio": self.min_gap_ratio,
            "min_lambda0": self.min_lambda0,
            "min_lambda2": self.min_lambda2,
            "tau_ker": self.tau_ker,
            "rho_gap": self.rho_gap,
            "solver": self.solver,
        }


def classify_point(sol: FiberSolution, tau_ker: float, rho_gap: float) -> PointResult:
    r0 = spectral_report(0, sol.eig0, tau_ker)
    r1 = spectral_report(1, sol.eig1, tau_ker)
    r2 = spectral_report(2, sol.eig2, tau_ker)
    reps = (r0, r1, r2)
    if r0.kernel_dim or r2.kernel_dim:
        why = []
        if r0.kernel_dim:
            why.append(f"lambda_min(Delta0)={r0.eigenvalues[0]:.3g}")
        if r2.kernel_dim:
            why.append(f"lambda_min(Delta2)={r2.eigenvalues[0]:.3g}")
        return PointResult(sol.xi, "fail", r1.kernel_dim, reps, "; ".join(why) + " below tau_ker")
    if r1.kernel_dim == len(r1.eigenvalues):
        return PointResult(sol.xi, "indeterminate", r1.kernel_dim, reps,
                           "cluster fills all computed eigenvalues")
    if r1.kernel_dim and r1.gap_ratio < rho_gap:
        return PointResult(sol.xi, "indeterminate", r1.kernel_dim, reps,
                           f"gap ratio {r1.gap_ratio:.3g} < {rho_gap}")
    return PointResult(sol.xi, "ok", r1.kernel_dim, reps)


def scan(solver, grid, tau_ker: float = DEFAULT_TAU_KER, rho_gap: float = DEFAULT_RHO_GAP,
         n_eigs: int = 6, threads: int = 1, keep_frames: bool = False):
    """Solve and classify every grid point; returns (IT1Report, results, frames).

    Frames (when requested) span the low cluster of each point; points are
    processed in parallel if ``threads > 1`` and reduced in grid order.
    """
    pts = _grid_points(grid)

    def work(xi):
        sol = solver.solve(xi, m1=n_eigs)
        res = classify_point(sol, tau_ker, rho_gap)
        m = n_eigs
        while res.status == "indeterminate" and res.reason.startswith("cluster fills") \
                and m < solver.N ** 4 * solver.n:
            m *= 2
            sol = solver.solve(xi, m1=m)
            res = classify_point(sol, tau_ker, rho_gap)
        if keep_frames and res.status == "ok" and res.rank:
            sol = solver.solve(xi, m1=n_eigs, frame_rank=res.rank)
        return sol, res

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            out = list(ex.map(work, pts))
    else:
        out = [work(p) for p in pts]
    sols = [o[0] for o in out]
    results = [o[1] for o in out]
    rep = IT1Report(pts, tau_ker, rho_gap, solver=solver.kind)
    rep.failure_set = [r.xi for r in results if r.status == "fail"]
    rep.indeterminate_set = [r.xi for r in results if r.status == "indeterminate"]
    ok = [r for r in results if r.status == "ok"]
    ranks = sorted({r.rank for r in ok})
    gaps = [r.reports[1].gap_ratio for r in ok if r.rank]
    rep.min_gap_ratio = float(min(gaps)) if gaps else float("inf")
    rep.min_lambda0 = float(min(r.reports[0].eigenvalues[0] for r in results))
    rep.min_lambda2 = float(min(r.reports[2].eigenvalues[0] for r in results))
    if len(ranks) > 1:
        # a rank jump is a failure of the bundle property at the minority points
        counts = {k: sum(r.rank == k for r in ok) for k in ranks}
        major = max(ranks, key=lambda k: (counts[k], -k))
        for r in ok:
            if r.rank != major:
                r.status, r.reason = "fail", f"cluster size {r.rank} != {major}"
                rep.failure_set.append(r.xi)
        rep.failure_set = [p for p in pts if p in set(rep.failure_set)]
        ranks = [major]
    rep.rank = ranks[0] if ranks and not rep.failure_set and not rep.indeterminate_set else (
        ranks[0] if len(ranks) == 1 else None)
    rep.it1 = not rep.failure_set and not rep.indeterminate_set and len(ranks) == 1
    frames = [s.frame for s in sols] if keep_frames else None
    return rep, results, frames


def classify_IT1(f: LinkField, grid, tau_ker: float = DEFAULT_TAU_KER,
                 rho_gap: float = DEFAULT_RHO_GAP, *, regulator: float = DEFAULT_REGULATOR,
                 solver: str = "auto", n_eigs: int = 6, threads: int = 1, **solver_kw) -> IT1Report:
    """IT1 certificate on a finite dual grid (an int M means the M^4 grid)."""
    s = make_solver(f, regulator, solver, **solver_kw)
    rep, results, _ = scan(s, grid, tau_ker, rho_gap, n_eigs=n_eigs, threads=threads)
    rep.results = results
    return rep


def zero_mode_frame(f: LinkField, xi, r: int, *, regulator: float = DEFAULT_REGULATOR,
                    tau_ker: float = DEFAULT_TAU_KER, rho_gap: float = DEFAULT_RHO_GAP,
                    solver: str = "auto", **solver_kw) -> ZeroModeFrame:
    s = make_solver(f, regulator, solver, **solver_kw)
    sol = s.solve(tuple(float(v) for v in xi), m1=max(6, r + 1), frame_rank=r)
    res = classify_point(sol, tau_ker, rho_gap)
    if res.status != "ok" or res.rank != r:
        raise ClusterError(f"cluster mismatch at xi={tuple(xi)}: expected {r}, "
                           f"status {res.status} with {res.rank} low modes {res.reason}")
    return sol.frame
