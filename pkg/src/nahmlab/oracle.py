"""Continuum predictions for the constant-flux line bundle.

Independent of the lattice solvers: zero modes are products of magnetic
theta sections in each complex plane, the Delta^1 gap comes from the
oscillator ladder of the two commuting magnetic Laplacians, and the
transformed curvature follows from translation symmetry plus c1 of the
transform.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import TwoForm

DEFAULT_TRUNCATION = 7


class OracleError(ValueError):
    pass


def theta_sections(kappa: int, t, N: int, truncation: int = DEFAULT_TRUNCATION) -> np.ndarray:
    """|kappa| magnetic theta sections of one plane on the N x N lattice.

    phi_j(xa, xb) = sum_l exp(-2 pi i ta l) exp(-pi |kappa| (xa + (j + kappa l + tb)/kappa)^2)
                    * exp(-2 pi i ta xa) exp(2 pi i (j + kappa l) xb)
    for flux 2 pi kappa in the plane and flat twist (ta, tb).  For kappa > 0
    these span ker dbar^dag, for kappa < 0 they span ker dbar.  Columns are
    raw (not orthonormalized); shape (N*N, |kappa|).
    """
    if kappa == 0:
        raise OracleError("no theta sections for zero flux")
    if truncation < 3:
        raise OracleError("truncation must be >= 3")
    ta, tb = float(t[0]), float(t[1])
    x = np.arange(N) / N
    xa, xb = np.meshgrid(x, x, indexing="ij")
    half = truncation // 2
    ls = np.arange(-half, truncation - half)
    cols = []
    for j in range(abs(kappa)):
        acc = np.zeros((N, N), dtype=complex)
        for l in ls:
            m = j + kappa * l
            acc += (np.exp(-2j * np.pi * ta * l)
                    * np.exp(-np.pi * abs(kappa) * (xa + (m + tb) / kappa) ** 2)
                    * np.exp(2j * np.pi * m * xb))
        cols.append((acc * np.exp(-2j * np.pi * ta * xa)).ravel())
    return np.stack(cols, axis=1)


def landau_zero_modes(k: int, xi, N: int, truncation: int = DEFAULT_TRUNCATION) -> np.ndarray:
    """Orthonormal frame of the k^2 continuum harmonic (0,1)-forms at xi.

    The field has flux +k in the (1,2) plane and -k in the (3,4) plane; the
    modes sit in the dbar_1 slot for k > 0 and the dbar_2 slot for k < 0.
    Layout matches the lattice (component, x1, x2, x3, x4).
    """
    if k == 0:
        raise OracleError("k must be nonzero")
    xi = [float(v) for v in xi]

    def frame(trunc):
        a = theta_sections(k, xi[0:2], N, trunc)
        b = theta_sections(-k, xi[2:4], N, trunc)
        prod = np.einsum("ap,bq->abpq", a, b).reshape(N ** 4, -1)
        out = np.zeros((2, N ** 4, prod.shape[1]), dtype=complex)
        out[0 if k > 0 else 1] = prod
        return out.reshape(2 * N ** 4, -1)

    raw = frame(truncation)
    ref = frame(truncation + 2)
    drift = abs(np.linalg.norm(raw) / np.linalg.norm(ref) - 1)
    if drift > 1e-8:
        raise OracleError(f"truncation {truncation} too small (normalization drift {drift:.1e})")
    q, _ = np.linalg.qr(raw)
    return q


def oracle_gap(k: int) -> float:
    """First nonzero eigenvalue of the continuum Delta^1 for flux 2 pi |k| per plane.

    Each dbar^dag dbar ladder has spacing |F|/2 = pi |k|.
    """
    if k == 0:
        raise OracleError("k must be nonzero")
    return float(np.pi * abs(k))


def oracle_transform_curvature(k: int) -> TwoForm:
    """Constant dual curvature -(2 pi / k)(dxi12 - dxi34), times the identity of rank k^2."""
    if k == 0:
        raise OracleError("k must be nonzero")
    a = 2 * np.pi / k
    return TwoForm(np.array([-a, 0, 0, 0, 0, a]))


def landau_overlap(dxi) -> float:
    """|<psi(xi), psi(xi + dxi)>| for k = 1: coherent-state overlap exp(-pi |dxi|^2 / 2)."""
    d = np.asarray(dxi, dtype=float)
    return float(np.exp(-np.pi * np.dot(d, d) / 2))


@dataclass(frozen=True)
class OraclePrediction:
    k: int
    r: int
    gap: float
    F_hat: TwoForm

    def as_dict(self) -> dict:
        return {"k": self.k, "r": self.r, "gap": self.gap,
                "F_hat": [float(v) for v in self.F_hat.c],
                "planes": ["12", "13", "14", "23", "24", "34"]}


def predict(k: int) -> OraclePrediction:
    return OraclePrediction(k, k * k, oracle_gap(k), oracle_transform_curvature(k))
