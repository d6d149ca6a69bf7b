"""Geometry of the rectangular full packed (RFP) triangular layout.

An order-``n`` triangle (``n*(n+1)//2`` scalars) is rearranged into a dense
``ldar x n1`` rectangle, where ``n1 = ceil(n/2)`` and ``ldar = n`` for odd
``n``, ``n + 1`` for even ``n``.  The rectangle concatenates three pieces:

* ``T1`` -- a lower-stored triangle,
* ``T2`` -- an upper-stored triangle holding the opposite diagonal block
  transposed,
* ``S1`` -- the full off-diagonal rectangle.

Eight layouts exist in total: lower/upper triangle, odd/even order, and the
rectangle stored directly or transposed.  This module provides the
descriptor arithmetic, the element-to-offset map, and the block geometry;
it performs no arithmetic on matrix values.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "LayoutDescriptor",
    "BlockView",
    "make_descriptor",
    "map_index",
    "block_views",
]

_UPLOS = ("L", "U")
_TRANSRS = ("N", "T")


def _norm_flag(value: str, allowed: tuple, what: str) -> str:
    flag = str(value).upper()[:1]
    if flag not in allowed:
        raise ValueError(f"{what} must be one of {allowed}, got {value!r}")
    return flag


@dataclass(frozen=True)
class LayoutDescriptor:
    """Derived geometry of one RFP instance.

    Attributes
    ----------
    n : int
        Matrix order.
    n1, n2 : int
        Split sizes ``n1 = ceil(n/2)`` and ``n2 = n - n1``.
    nt : int
        Number of stored scalars, ``n*(n+1)//2``.
    ldar : int
        Leading dimension of the rectangle: ``n`` if ``n`` is odd else
        ``n + 1``.
    uplo : str
        ``'L'`` or ``'U'`` -- which triangle of the matrix is stored.
    transr : str
        ``'N'`` for the ``ldar x n1`` rectangle, ``'T'`` when the buffer
        holds its transpose (``n1 x ldar``, leading dimension ``n1``).
    """

    n: int
    n1: int
    n2: int
    nt: int
    ldar: int
    uplo: str
    transr: str

    @property
    def even(self) -> bool:
        return self.n % 2 == 0

    @property
    def shift(self) -> int:
        """Diagonal shift of the lower layout: 1 for even ``n``, else 0."""
        return 1 if self.even else 0


@dataclass(frozen=True)
class BlockView:
    """Position of one constituent block inside the stored rectangle.

    Offsets are 0-based and expressed in the orientation of the buffer:
    inside the ``ldar x n1`` rectangle for ``transr='N'`` and inside the
    ``n1 x ldar`` rectangle for ``transr='T'``.  ``triangle`` is one of
    ``'lower'``, ``'upper'``, ``'full'``.  ``conjugated`` marks the block
    whose stored values are the conjugate transpose of the logical block
    when the buffer represents a Hermitian matrix (meaningful for complex
    scalars only).
    """

    kind: str
    row_offset: int
    col_offset: int
    rows: int
    cols: int
    triangle: str
    conjugated: bool


def make_descriptor(n: int, uplo: str, transr: str) -> LayoutDescriptor:
    """Build the layout descriptor for an order-``n`` RFP triangle.

    ``n = 0`` is legal and yields an empty layout (``nt = 0``).

    Examples
    --------
    >>> d = make_descriptor(7, "L", "N")
    >>> (d.n1, d.n2, d.nt, d.ldar)
    (4, 3, 28, 7)
    """
    n = int(n)
    if n < 0:
        raise ValueError(f"matrix order must be nonnegative, got {n}")
    uplo = _norm_flag(uplo, _UPLOS, "uplo")
    transr = _norm_flag(transr, _TRANSRS, "transr")
    n1 = (n + 1) // 2
    n2 = n - n1
    nt = n * (n + 1) // 2
    ldar = n if n % 2 == 1 else n + 1
    return LayoutDescriptor(n=n, n1=n1, n2=n2, nt=nt, ldar=ldar,
                            uplo=uplo, transr=transr)


def _rect_cell(desc: LayoutDescriptor, i: int, j: int) -> tuple:
    """1-based (row, col) of triangle element (i, j) in the ``ldar x n1``
    rectangle, before any transposition."""
    n, n1, n2 = desc.n, desc.n1, desc.n2
    if not (1 <= i <= n and 1 <= j <= n):
        raise IndexError(f"indices ({i}, {j}) outside matrix of order {n}")
    if desc.uplo == "L":
        if i < j:
            raise IndexError(f"({i}, {j}) is not in the stored lower triangle")
        d = desc.shift
        if j <= n1:
            return i + d, j
        return j - n1, i - n1 + 1 - d
    if i > j:
        raise IndexError(f"({i}, {j}) is not in the stored upper triangle")
    if j > n2:
        return i, j - n2
    return j + n2 + 1, i


def map_index(desc: LayoutDescriptor, i: int, j: int) -> int:
    """1-based buffer offset of triangle element ``(i, j)``.

    The map is a bijection from the stored triangle onto ``1..nt``.  The
    buffer is column major with leading dimension ``ldar`` (``n1`` when
    ``transr='T'``).

    Examples
    --------
    >>> d = make_descriptor(7, "L", "N")
    >>> [map_index(d, 5, 5), map_index(d, 7, 4), map_index(d, 2, 1)]
    [8, 28, 2]
    """
    r, c = _rect_cell(desc, int(i), int(j))
    if desc.transr == "N":
        return (c - 1) * desc.ldar + r
    return (r - 1) * desc.n1 + c


def block_views(desc: LayoutDescriptor) -> tuple:
    """Geometry of the three blocks ``(T1, T2, S1)`` tiling the triangle.

    For the lower layout ``T1`` holds the leading diagonal block directly
    and ``T2`` holds the trailing block transposed; for the upper layout
    the roles are reversed (``T1`` transposed, ``T2`` direct).  ``n2 = 0``
    yields empty ``T2``/``S1`` (lower) or empty ``T1``/``S1`` (upper).
    """
    if desc.n < 1:
        raise ValueError("block_views requires n >= 1")
    n1, n2, d = desc.n1, desc.n2, desc.shift
    if desc.uplo == "L":
        t1 = ("T1", d, 0, n1, n1, "lower", False)
        t2 = ("T2", 0, 1 - d, n2, n2, "upper", True)
        s1 = ("S1", n1 + d, 0, n2, n1, "full", False)
    else:
        t1 = ("T1", n2 + 1, 0, n2, n2, "lower", True)
        t2 = ("T2", n2, 0, n1, n1, "upper", False)
        s1 = ("S1", 0, 0, n2, n1, "full", False)
    views = []
    for kind, r0, c0, rows, cols, tri, conj in (t1, t2, s1):
        if desc.transr == "T":
            r0, c0 = c0, r0
            rows, cols = cols, rows
            if tri == "lower":
                tri = "upper"
            elif tri == "upper":
                tri = "lower"
        views.append(BlockView(kind=kind, row_offset=r0, col_offset=c0,
                               rows=rows, cols=cols, triangle=tri,
                               conjugated=conj))
    return tuple(views)
