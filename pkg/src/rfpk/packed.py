"""Level-2 packed-storage baseline and SPD test-matrix generation.

The packed Cholesky routines deliberately work one column at a time with
vector updates (no blocking), which is what the nonuniform packed layout
forces on an implementation; they exist as the comparison target for the
benchmark harness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .convert import PackedTriangle, _as_scalar_array

__all__ = [
    "SpdSpec",
    "pack",
    "unpack",
    "pptrf_ref",
    "pptrs_ref",
    "spd_generate",
]


@dataclass(frozen=True)
class SpdSpec:
    """Recipe for a reproducible SPD/HPD test matrix.

    The spectrum is log-spaced on ``[1, target_kappa]``, so the 2-norm
    condition number equals the target by construction.
    """

    n: int
    seed: int
    target_kappa: float = 100.0
    domain: str = "real"  # 'real' or 'complex'


def pack(a, uplo: str) -> PackedTriangle:
    """Column-pack the declared triangle of a full matrix."""
    a = _as_scalar_array(np.asarray(a))
    n = a.shape[1]
    if a.shape[0] < n:
        raise ValueError(f"leading dimension {a.shape[0]} < n={n}")
    out = PackedTriangle.zeros(n, uplo, dtype=a.dtype)
    for j in range(n):
        col = out.column(j)
        col[:] = a[j:n, j] if out.uplo == "L" else a[:j + 1, j]
    return out


def unpack(p: PackedTriangle, ld=None) -> np.ndarray:
    """Expand a packed triangle to a full column-major array; elements
    outside the triangle are zero."""
    n = p.n
    ld = n if ld is None else int(ld)
    if ld < n:
        raise ValueError(f"leading dimension {ld} < n={n}")
    a = np.zeros((ld, n), dtype=p.dtype, order="F")
    for j in range(n):
        if p.uplo == "L":
            a[j:n, j] = p.column(j)
        else:
            a[:j + 1, j] = p.column(j)
    return a


def pptrf_ref(p: PackedTriangle) -> int:
    """Unblocked packed Cholesky factorization, in place.

    Right-looking for lower storage (rank-1 updates of the trailing
    packed columns), left-looking for upper storage.  Returns 0 or the
    1-based order of the first non-positive leading minor.
    """
    n = p.n
    data = p.data
    herm = np.iscomplexobj(data)
    if p.uplo == "L":
        starts = [j * n - j * (j - 1) // 2 for j in range(n + 1)]
        for j in range(n):
            off = starts[j]
            d = data[off].real if herm else data[off]
            if not d > 0:
                return j + 1
            d = np.sqrt(d)
            data[off] = d
            x = data[off + 1:starts[j + 1]]
            x /= d
            for c in range(j + 1, n):
                t = c - j - 1
                xc = np.conj(x[t]) if herm else x[t]
                data[starts[c]:starts[c + 1]] -= xc * x[t:]
        return 0
    for j in range(n):
        col = p.column(j)
        for t in range(j):
            pcol = p.column(t)
            col[t] = (col[t] - np.vdot(pcol[:t], col[:t])) / pcol[t]
        d = col[j].real if herm else col[j]
        if j > 0:
            d = d - (np.vdot(col[:j], col[:j]).real if herm
                     else col[:j] @ col[:j])
        if not d > 0:
            return j + 1
        col[j] = np.sqrt(d)
    return 0


def pptrs_ref(p: PackedTriangle, b) -> None:
    """Solve ``A @ X = B`` in place from a packed Cholesky factor via
    column-at-a-time forward and backward substitution."""
    b = np.asarray(b)
    flat = b.ndim == 1
    bv = b.reshape(-1, 1) if flat else b
    n = p.n
    if bv.shape[0] != n:
        raise ValueError(f"right-hand side shape {b.shape} does not match n={n}")
    if n == 0 or bv.shape[1] == 0:
        return
    herm = np.iscomplexobj(p.data)
    if p.uplo == "L":
        for j in range(n):  # L y = b
            col = p.column(j)
            bv[j] /= col[0]
            if j + 1 < n:
                bv[j + 1:] -= col[1:, None] * bv[j:j + 1]
        for j in range(n - 1, -1, -1):  # L^H x = y
            col = p.column(j)
            if j + 1 < n:
                tail = np.conj(col[1:]) if herm else col[1:]
                bv[j] -= tail @ bv[j + 1:]
            bv[j] /= np.conj(col[0]) if herm else col[0]
    else:
        for j in range(n):  # U^H y = b
            col = p.column(j)
            if j > 0:
                head = np.conj(col[:j]) if herm else col[:j]
                bv[j] -= head @ bv[:j]
            bv[j] /= np.conj(col[j]) if herm else col[j]
        for j in range(n - 1, -1, -1):  # U x = y
            col = p.column(j)
            bv[j] /= col[j]
            if j > 0:
                bv[:j] -= col[:j, None] * bv[j:j + 1]


def spd_generate(spec: SpdSpec) -> np.ndarray:
    """Deterministic SPD/HPD matrix with a prescribed condition number.

    ``A = Q @ diag(lam) @ Q^H`` with ``lam`` log-spaced on
    ``[1, target_kappa]`` and ``Q`` from the QR factorization of a seeded
    Gaussian matrix.  Both triangles are filled and symmetry is exact.
    """
    if spec.target_kappa < 1:
        raise ValueError(f"target_kappa must be >= 1, got {spec.target_kappa}")
    if spec.domain not in ("real", "complex"):
        raise ValueError(f"domain must be 'real' or 'complex', got {spec.domain!r}")
    n = int(spec.n)
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    dtype = np.complex128 if spec.domain == "complex" else np.float64
    if n == 0:
        return np.zeros((0, 0), dtype=dtype, order="F")
    rng = np.random.default_rng(spec.seed)
    g = rng.standard_normal((n, n))
    if spec.domain == "complex":
        g = g + 1j * rng.standard_normal((n, n))
    q, _ = np.linalg.qr(g)
    lam = np.logspace(0.0, np.log10(spec.target_kappa), n)
    a = (q * lam) @ np.conj(q.T)
    a = (a + np.conj(a.T)) / 2  # imaginary diagonal cancels exactly
    return np.asfortranarray(a)
