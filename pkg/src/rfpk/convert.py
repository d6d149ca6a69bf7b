"""Storage containers and lossless conversions between full, packed, and
RFP representations.

Conversions move scalar values verbatim (no arithmetic, no conjugation),
so every round trip is bit exact.  They never read the unreferenced
triangle of a full input.
"""

from __future__ import annotations

import enum

import numpy as np

from .layout import LayoutDescriptor, make_descriptor

__all__ = [
    "FactorState",
    "RfpTriangle",
    "PackedTriangle",
    "trttf",
    "tfttr",
    "tpttf",
    "tfttp",
]


class FactorState(enum.Enum):
    """What the values of an :class:`RfpTriangle` currently represent."""

    UNFACTORED = "unfactored"
    CHOLESKY = "cholesky"
    TRIANGULAR_INVERSE = "triangular_inverse"
    FULL_INVERSE = "full_inverse"


def _as_scalar_array(a) -> np.ndarray:
    a = np.asarray(a)
    if a.dtype == np.float64 or a.dtype == np.complex128:
        return a
    if np.iscomplexobj(a):
        return a.astype(np.complex128)
    return a.astype(np.float64)


class RfpTriangle:
    """Minimal-storage buffer of ``n*(n+1)//2`` scalars in RFP layout.

    ``data`` is the flat column-major buffer of the stored rectangle
    (``ldar x n1``, or ``n1 x ldar`` when ``transr='T'``).  ``state``
    tracks the factorization lifecycle of the held values.
    """

    __slots__ = ("data", "desc", "state")

    def __init__(self, data, desc: LayoutDescriptor,
                 state: FactorState = FactorState.UNFACTORED):
        data = _as_scalar_array(data).reshape(-1)
        if data.shape[0] != desc.nt:
            raise ValueError(
                f"buffer length {data.shape[0]} != nt={desc.nt} for n={desc.n}")
        self.data = data
        self.desc = desc
        self.state = state

    @classmethod
    def zeros(cls, n: int, uplo: str, transr: str, dtype=np.float64
              ) -> "RfpTriangle":
        desc = make_descriptor(n, uplo, transr)
        return cls(np.zeros(desc.nt, dtype=dtype), desc)

    @property
    def dtype(self):
        return self.data.dtype

    def rect(self) -> np.ndarray:
        """Stored rectangle as a 2-D view (no copy)."""
        d = self.desc
        if d.transr == "N":
            return self.data.reshape((d.ldar, d.n1), order="F")
        return self.data.reshape((d.n1, d.ldar), order="F")

    def rect_normal(self) -> np.ndarray:
        """The ``ldar x n1`` rectangle regardless of ``transr`` (for
        ``transr='T'`` this is the transposed view of the buffer)."""
        r = self.rect()
        return r if self.desc.transr == "N" else r.T

    def copy(self) -> "RfpTriangle":
        return RfpTriangle(self.data.copy(), self.desc, self.state)

    def __repr__(self):
        d = self.desc
        return (f"RfpTriangle(n={d.n}, uplo={d.uplo!r}, transr={d.transr!r}, "
                f"state={self.state.value}, dtype={self.dtype})")


class PackedTriangle:
    """LAPACK-style column-packed triangle: the columns of one triangle
    stored consecutively in a vector of length ``n*(n+1)//2``."""

    __slots__ = ("data", "n", "uplo")

    def __init__(self, data, n: int, uplo: str):
        data = _as_scalar_array(data).reshape(-1)
        if data.shape[0] != n * (n + 1) // 2:
            raise ValueError(
                f"packed length {data.shape[0]} != {n * (n + 1) // 2} for n={n}")
        uplo = str(uplo).upper()[:1]
        if uplo not in ("L", "U"):
            raise ValueError(f"uplo must be 'L' or 'U', got {uplo!r}")
        self.data = data
        self.n = int(n)
        self.uplo = uplo

    @classmethod
    def zeros(cls, n: int, uplo: str, dtype=np.float64) -> "PackedTriangle":
        return cls(np.zeros(n * (n + 1) // 2, dtype=dtype), n, uplo)

    @property
    def dtype(self):
        return self.data.dtype

    def copy(self) -> "PackedTriangle":
        return PackedTriangle(self.data.copy(), self.n, self.uplo)

    def column(self, j: int) -> np.ndarray:
        """View of packed column ``j`` (0-based): rows ``j..n-1`` for lower
        storage, rows ``0..j`` for upper storage."""
        n = self.n
        if self.uplo == "L":
            off = j * n - j * (j - 1) // 2
            return self.data[off:off + n - j]
        off = j * (j + 1) // 2
        return self.data[off:off + j + 1]

    def __repr__(self):
        return (f"PackedTriangle(n={self.n}, uplo={self.uplo!r}, "
                f"dtype={self.dtype})")


def _blocks(rect: np.ndarray, desc: LayoutDescriptor) -> tuple:
    """(t1, t2, s1) views of the normal-oriented rectangle."""
    n1, n2, d = desc.n1, desc.n2, desc.shift
    if desc.uplo == "L":
        t1 = rect[d:d + n1, :n1]
        t2 = rect[:n2, 1 - d:1 - d + n2]
        s1 = rect[n1 + d:n1 + d + n2, :n1]
    else:
        t1 = rect[n2 + 1:2 * n2 + 1, :n2]
        t2 = rect[n2:n2 + n1, :n1]
        s1 = rect[:n2, :n1]
    return t1, t2, s1


def trttf(a, uplo: str, transr: str) -> RfpTriangle:
    """Copy the declared triangle of a full matrix into RFP storage.

    ``a`` is ``(ld, n)`` with ``ld >= n``; only ``a[:n, :n]``'s declared
    triangle is read.
    """
    a = _as_scalar_array(np.asarray(a))
    if a.ndim != 2:
        raise ValueError("full input must be 2-dimensional")
    n = a.shape[1]
    if a.shape[0] < n:
        raise ValueError(f"leading dimension {a.shape[0]} < n={n}")
    desc = make_descriptor(n, uplo, transr)
    out = RfpTriangle(np.empty(desc.nt, dtype=a.dtype), desc)
    if n == 0:
        return out
    t1, t2, s1 = _blocks(out.rect_normal(), desc)
    n1, n2 = desc.n1, desc.n2
    if desc.uplo == "L":
        for j in range(n1):
            t1[j:, j] = a[j:n1, j]
        s1[:, :] = a[n1:n, :n1]
        for r in range(n2):
            t2[r, r:] = a[n1 + r:n, n1 + r]
    else:
        s1[:, :] = a[:n2, n2:n]
        for c in range(n2):
            t1[c:, c] = a[c, c:n2]
        for c in range(n1):
            t2[:c + 1, c] = a[n2:n2 + c + 1, n2 + c]
    return out


def tfttr(r: RfpTriangle, ld=None) -> np.ndarray:
    """Expand RFP storage to a full column-major array.

    Returns an ``(ld, n)`` array (``ld >= n``, default ``n``) with the
    triangle filled and every other element zero.
    """
    desc = r.desc
    n = desc.n
    ld = n if ld is None else int(ld)
    if ld < n:
        raise ValueError(f"leading dimension {ld} < n={n}")
    a = np.zeros((ld, n), dtype=r.dtype, order="F")
    if n == 0:
        return a
    t1, t2, s1 = _blocks(r.rect_normal(), desc)
    n1, n2 = desc.n1, desc.n2
    if desc.uplo == "L":
        for j in range(n1):
            a[j:n1, j] = t1[j:, j]
        a[n1:n, :n1] = s1
        for rr in range(n2):
            a[n1 + rr:n, n1 + rr] = t2[rr, rr:]
    else:
        a[:n2, n2:n] = s1
        for c in range(n2):
            a[c, c:n2] = t1[c:, c]
        for c in range(n1):
            a[n2:n2 + c + 1, n2 + c] = t2[:c + 1, c]
    return a


def tpttf(p: PackedTriangle, transr: str) -> RfpTriangle:
    """Repack a column-packed triangle into RFP storage."""
    n = p.n
    desc = make_descriptor(n, p.uplo, transr)
    out = RfpTriangle(np.empty(desc.nt, dtype=p.dtype), desc)
    if n == 0:
        return out
    t1, t2, s1 = _blocks(out.rect_normal(), desc)
    n1, n2 = desc.n1, desc.n2
    if desc.uplo == "L":
        for j in range(n):
            col = p.column(j)
            if j < n1:
                t1[j:, j] = col[:n1 - j]
                s1[:, j] = col[n1 - j:]
            else:
                t2[j - n1, j - n1:] = col
    else:
        for j in range(n):
            col = p.column(j)
            if j < n2:
                t1[j, :j + 1] = col
            else:
                c = j - n2
                s1[:, c] = col[:n2]
                t2[:c + 1, c] = col[n2:]
    return out


def tfttp(r: RfpTriangle) -> PackedTriangle:
    """Repack RFP storage into a column-packed triangle."""
    desc = r.desc
    n = desc.n
    out = PackedTriangle.zeros(n, desc.uplo, dtype=r.dtype)
    if n == 0:
        return out
    t1, t2, s1 = _blocks(r.rect_normal(), desc)
    n1, n2 = desc.n1, desc.n2
    if desc.uplo == "L":
        for j in range(n):
            col = out.column(j)
            if j < n1:
                col[:n1 - j] = t1[j:, j]
                col[n1 - j:] = s1[:, j]
            else:
                col[:] = t2[j - n1, j - n1:]
    else:
        for j in range(n):
            col = out.column(j)
            if j < n2:
                col[:] = t1[j, :j + 1]
            else:
                c = j - n2
                col[:n2] = s1[:, c]
                col[n2:] = t2[:c + 1, c]
    return out
