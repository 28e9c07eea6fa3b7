"""Little-endian binary files for link fields, zero-mode frames and Berry bundles.

NFRG  b"NFRG" | u32 version | u32 N | u32 n | links (4,N,N,N,N,n,n) complex128, row-major
NFBB  b"NFBB" | u32 version | u32 M | u32 r | links (4,M,M,M,M,r,r) complex128, row-major
NFZM  b"NFZM" | u32 N | u32 n | u32 r | f64 xi[4] | frame (2 N^4 n, r) complex128, column-major
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .lattice import LinkField

VERSION = 1
_C16 = np.dtype("<c16")


class FormatError(ValueError):
    pass


def _write_links(path, magic: bytes, links: np.ndarray):
    side, rank = links.shape[1], links.shape[-1]
    with open(path, "wb") as fh:
        fh.write(magic + struct.pack("<III", VERSION, side, rank))
        fh.write(np.ascontiguousarray(links, dtype=_C16).tobytes(order="C"))


def _read_links(path, magic: bytes) -> np.ndarray:
    raw = Path(path).read_bytes()
    if raw[:4] != magic:
        raise FormatError(f"{path}: bad magic {raw[:4]!r}, expected {magic!r}")
    version, side, rank = struct.unpack("<III", raw[4:16])
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    shape = (4,) + (side,) * 4 + (rank, rank)
    body = raw[16:]
    if len(body) != int(np.prod(shape)) * 16:
        raise FormatError(f"{path}: truncated payload")
    return np.frombuffer(body, dtype=_C16).reshape(shape).astype(np.complex128)


def save_link_field(path, f: LinkField):
    _write_links(path, b"NFRG", f.links)


def load_link_field(path) -> LinkField:
    return LinkField(_read_links(path, b"NFRG"))


def save_berry_bundle(path, b):
    _write_links(path, b"NFBB", b.links)


def load_berry_bundle(path):
    from .transform import BerryBundle
    return BerryBundle(_read_links(path, b"NFBB"))


def save_frame(path, vectors: np.ndarray, N: int, n: int, xi):
    v = np.asarray(vectors, dtype=_C16)
    if v.ndim != 2 or v.shape[0] != 2 * N ** 4 * n:
        raise FormatError(f"frame shape {v.shape} does not match N={N}, n={n}")
    with open(path, "wb") as fh:
        fh.write(b"NFZM" + struct.pack("<III", N, n, v.shape[1]))
        fh.write(struct.pack("<4d", *[float(x) for x in xi]))
        fh.write(v.tobytes(order="F"))


def load_frame(path):
    """Returns (vectors, N, n, xi)."""
    raw = Path(path).read_bytes()
    if raw[:4] != b"NFZM":
        raise FormatError(f"{path}: bad magic {raw[:4]!r}")
    N, n, r = struct.unpack("<III", raw[4:16])
    xi = struct.unpack("<4d", raw[16:48])
    dim = 2 * N ** 4 * n
    body = raw[48:]
    if len(body) != dim * r * 16:
        raise FormatError(f"{path}: truncated payload")
    v = np.frombuffer(body, dtype=_C16).reshape((dim, r), order="F").astype(np.complex128)
    return v, N, n, tuple(xi)
