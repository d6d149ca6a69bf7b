"""Reference full-format level-3 kernels and factor/invert kernels.

All kernels operate in place on 2-D numpy views of column-major buffers
(arbitrary strides are fine, so transposed views work too).  Matrix
products are evaluated in a fixed column-panel order, so results are
reproducible run to run.  Workspace stays bounded by one output panel;
no kernel materialises a full-matrix temporary.

Flag conventions follow BLAS/LAPACK: ``side`` in ``{'L','R'}``, ``uplo``
in ``{'L','U'}``, ``trans`` in ``{'N','T','C'}`` (``'C'`` degenerates to
``'T'`` for real data), ``diag`` in ``{'N','U'}``.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "SingularMatrixError",
    "default_block_size",
    "gemm",
    "trsm",
    "trmm",
    "syrk_herk",
    "potrf_ref",
    "trtri_ref",
    "lauum_ref",
]

# Block size for the factor/invert kernels; RFPK_NB overrides it.
_DEFAULT_NB = max(1, int(os.environ.get("RFPK_NB", "64")))
# Column-panel width used when accumulating matrix products.
_PANEL = 256


class SingularMatrixError(np.linalg.LinAlgError):
    """A non-unit triangular matrix has a zero diagonal entry.

    ``index`` is the 1-based position of the offending entry.
    """

    def __init__(self, index: int):
        self.index = int(index)
        super().__init__(f"zero diagonal entry at position {self.index}")


def default_block_size() -> int:
    return _DEFAULT_NB


def _nb(nb) -> int:
    return _DEFAULT_NB if nb is None else max(1, int(nb))


def _check(flag: str, allowed: str, what: str) -> str:
    f = str(flag).upper()[:1]
    if f not in allowed:
        raise ValueError(f"{what} must be one of {tuple(allowed)}, got {flag!r}")
    return f


def _as2d(a, what: str) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2:
        raise ValueError(f"{what} must be 2-dimensional, got ndim={a.ndim}")
    return a


def _square(a, what: str) -> np.ndarray:
    a = _as2d(a, what)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"{what} must be square, got shape {a.shape}")
    return a


def _effective(a: np.ndarray, uplo: str, trans: str) -> tuple:
    """Reduce op(A) to (view, uplo, conjugate-flag) with no data movement."""
    if trans == "N":
        return a, uplo, False
    flipped = "U" if uplo == "L" else "L"
    conj = trans == "C" and np.iscomplexobj(a)
    return a.T, flipped, conj


# ---------------------------------------------------------------------------
# matrix multiply


def _mm_panel(av, bp, conj_a, conj_b):
    """op-aware product of ``av`` with panel ``bp`` (both already
    transpose-resolved); conjugations are folded so only panel-sized
    temporaries are created."""
    if conj_a:
        p = av @ (bp if conj_b else np.conj(bp))
        return np.conj(p, out=p)
    return av @ (np.conj(bp) if conj_b else bp)


def _gemm(transa, transb, alpha, a, b, beta, c):
    m, n = c.shape
    if m == 0 or n == 0:
        return
    if alpha == 0:
        if beta == 0:
            c[:] = 0
        elif beta != 1:
            c *= beta
        return
    av = a if transa == "N" else a.T
    bv = b if transb == "N" else b.T
    conj_a = transa == "C" and np.iscomplexobj(a)
    conj_b = transb == "C" and np.iscomplexobj(b)
    for j0 in range(0, n, _PANEL):
        j1 = min(j0 + _PANEL, n)
        p = _mm_panel(av, bv[:, j0:j1], conj_a, conj_b)
        cp = c[:, j0:j1]
        if alpha != 1:
            p *= alpha
        if beta == 0:
            cp[:] = p
        else:
            if beta != 1:
                cp *= beta
            cp += p


def gemm(transa: str, transb: str, alpha, a, b, beta, c) -> None:
    """``C <- alpha*op(A)@op(B) + beta*C`` in place on ``c``.

    With ``alpha == 0`` neither ``a`` nor ``b`` is referenced; with
    ``beta == 0`` the prior contents of ``c`` are not referenced.
    """
    transa = _check(transa, "NTC", "transa")
    transb = _check(transb, "NTC", "transb")
    a, b, c = _as2d(a, "a"), _as2d(b, "b"), _as2d(c, "c")
    m, n = c.shape
    if alpha != 0:
        sa = a.shape if transa == "N" else a.shape[::-1]
        sb = b.shape if transb == "N" else b.shape[::-1]
        if sa[0] != m or sb[1] != n or sa[1] != sb[0]:
            raise ValueError(
                f"gemm shape mismatch: op(a)={sa}, op(b)={sb}, c={c.shape}")
    _gemm(transa, transb, alpha, a, b, beta, c)


# ---------------------------------------------------------------------------
# triangular solve


def _trsm_unb(m, b, uplo, diag, base):
    """Unblocked solve of the triangular diagonal block ``m`` against the
    row slab ``b``; ``base`` offsets singularity indices."""
    k = m.shape[0]
    nonunit = diag == "N"
    if uplo == "L":
        for i in range(k):
            if nonunit:
                d = m[i, i]
                if d == 0:
                    raise SingularMatrixError(base + i + 1)
                b[i] /= d
            if i + 1 < k:
                b[i + 1:] -= m[i + 1:, i:i + 1] * b[i:i + 1]
    else:
        for i in range(k - 1, -1, -1):
            if nonunit:
                d = m[i, i]
                if d == 0:
                    raise SingularMatrixError(base + i + 1)
                b[i] /= d
            if i > 0:
                b[:i] -= m[:i, i:i + 1] * b[i:i + 1]


def _trsm_left(uplo, diag, alpha, m, b, nb, base=0):
    n = m.shape[0]
    if alpha == 0:
        b[:] = 0
        return
    if alpha != 1:
        b *= alpha
    if uplo == "L":
        for j0 in range(0, n, nb):
            j1 = min(j0 + nb, n)
            _trsm_unb(m[j0:j1, j0:j1], b[j0:j1], "L", diag, base + j0)
            if j1 < n:
                _gemm("N", "N", -1.0, m[j1:, j0:j1], b[j0:j1], 1.0, b[j1:])
    else:
        for j1 in range(n, 0, -nb):
            j0 = max(j1 - nb, 0)
            _trsm_unb(m[j0:j1, j0:j1], b[j0:j1], "U", diag, base + j0)
            if j0 > 0:
                _gemm("N", "N", -1.0, m[:j0, j0:j1], b[j0:j1], 1.0, b[:j0])


def _trsm(side, uplo, trans, diag, alpha, a, b, nb=None, base=0):
    nb = _nb(nb)
    if side == "R":
        # X*op(A) = alpha*B  <=>  op(A)^T X^T = alpha*B^T
        if trans == "C" and np.iscomplexobj(a):
            _trsm(side="L", uplo="U" if uplo == "L" else "L", trans="C",
                  diag=diag, alpha=alpha, a=a.T, b=b.T, nb=nb, base=base)
        else:
            _trsm(side="L", uplo=uplo, trans="T" if trans == "N" else "N",
                  diag=diag, alpha=alpha, a=a, b=b.T, nb=nb, base=base)
        return
    m, mu, conj = _effective(a, uplo, trans)
    if conj:
        np.conjugate(b, out=b)
        _trsm_left(mu, diag, np.conj(alpha), m, b, nb, base)
        np.conjugate(b, out=b)
    else:
        _trsm_left(mu, diag, alpha, m, b, nb, base)


def trsm(side: str, uplo: str, trans: str, diag: str, alpha, a, b,
         nb=None) -> None:
    """Solve ``op(A) @ X = alpha*B`` (side 'L') or ``X @ op(A) = alpha*B``
    (side 'R'), overwriting ``b`` with ``X``.

    ``a`` is triangular as declared by ``uplo``; the other triangle is not
    referenced.  A zero diagonal entry with ``diag='N'`` raises
    :class:`SingularMatrixError` carrying the 1-based index.  With
    ``alpha == 0``, ``b`` is zeroed and ``a`` is not referenced.
    """
    side = _check(side, "LR", "side")
    uplo = _check(uplo, "LU", "uplo")
    trans = _check(trans, "NTC", "trans")
    diag = _check(diag, "NU", "diag")
    a, b = _square(a, "a"), _as2d(b, "b")
    k = b.shape[0] if side == "L" else b.shape[1]
    if a.shape[0] != k:
        raise ValueError(f"trsm shape mismatch: a={a.shape}, b={b.shape}")
    if b.size == 0 or k == 0:
        return
    _trsm(side, uplo, trans, diag, alpha, a, b, nb)


# ---------------------------------------------------------------------------
# triangular multiply


def _trmm_unb(m, b, uplo, diag, alpha):
    k = m.shape[0]
    nonunit = diag == "N"
    if uplo == "L":
        for i in range(k - 1, -1, -1):
            d = m[i, i] if nonunit else 1.0
            row = d * b[i]
            if i > 0:
                row += m[i, :i] @ b[:i]
            if alpha != 1:
                row *= alpha
            b[i] = row
    else:
        for i in range(k):
            d = m[i, i] if nonunit else 1.0
            row = d * b[i]
            if i + 1 < k:
                row += m[i, i + 1:] @ b[i + 1:]
            if alpha != 1:
                row *= alpha
            b[i] = row


def _trmm_left(uplo, diag, alpha, m, b, nb):
    n = m.shape[0]
    if uplo == "L":
        # bottom-up so every read of earlier rows sees original data
        for j1 in range(n, 0, -nb):
            j0 = max(j1 - nb, 0)
            _trmm_unb(m[j0:j1, j0:j1], b[j0:j1], "L", diag, alpha)
            if j0 > 0:
                _gemm("N", "N", alpha, m[j0:j1, :j0], b[:j0], 1.0, b[j0:j1])
    else:
        for j0 in range(0, n, nb):
            j1 = min(j0 + nb, n)
            _trmm_unb(m[j0:j1, j0:j1], b[j0:j1], "U", diag, alpha)
            if j1 < n:
                _gemm("N", "N", alpha, m[j0:j1, j1:], b[j1:], 1.0, b[j0:j1])


def _trmm(side, uplo, trans, diag, alpha, a, b, nb=None):
    nb = _nb(nb)
    if alpha == 0:
        b[:] = 0
        return
    if side == "R":
        if trans == "C" and np.iscomplexobj(a):
            _trmm("L", "U" if uplo == "L" else "L", "C", diag, alpha,
                  a.T, b.T, nb)
        else:
            _trmm("L", uplo, "T" if trans == "N" else "N", diag, alpha,
                  a, b.T, nb)
        return
    m, mu, conj = _effective(a, uplo, trans)
    if conj:
        np.conjugate(b, out=b)
        _trmm_left(mu, diag, np.conj(alpha), m, b, nb)
        np.conjugate(b, out=b)
    else:
        _trmm_left(mu, diag, alpha, m, b, nb)


def trmm(side: str, uplo: str, trans: str, diag: str, alpha, a, b,
         nb=None) -> None:
    """``B <- alpha*op(A) @ B`` (side 'L') or ``alpha*B @ op(A)`` (side 'R')
    in place on ``b``, with triangular ``a``."""
    side = _check(side, "LR", "side")
    uplo = _check(uplo, "LU", "uplo")
    trans = _check(trans, "NTC", "trans")
    diag = _check(diag, "NU", "diag")
    a, b = _square(a, "a"), _as2d(b, "b")
    k = b.shape[0] if side == "L" else b.shape[1]
    if a.shape[0] != k:
        raise ValueError(f"trmm shape mismatch: a={a.shape}, b={b.shape}")
    if b.size == 0 or k == 0:
        return
    _trmm(side, uplo, trans, diag, alpha, a, b, nb)


# ---------------------------------------------------------------------------
# symmetric / Hermitian rank-k update


def _syrk_panel(a, trans, herm, r0, r1, j0, j1):
    """Panel ``rows r0:r1 x cols j0:j1`` of ``op(A) @ op(A)^(T|H)``."""
    if trans == "N":
        right = a[j0:j1, :].T
        if herm:
            return a[r0:r1, :] @ np.conj(right)
        return a[r0:r1, :] @ right
    if herm:
        p = a[:, r0:r1].T @ np.conj(a[:, j0:j1])
        return np.conj(p, out=p)
    return a[:, r0:r1].T @ a[:, j0:j1]


def _blend_tri(cd, pd, alpha, beta, uplo, herm):
    """Blend a diagonal panel, touching only the declared triangle."""
    w = cd.shape[0]
    idx = np.tril_indices(w) if uplo == "L" else np.triu_indices(w)
    if beta == 0:
        cd[idx] = alpha * pd[idx]
    else:
        cd[idx] = alpha * pd[idx] + beta * cd[idx]
    if herm and np.iscomplexobj(cd):
        dd = np.arange(w)
        cd[dd, dd] = cd[dd, dd].real


def _scale_tri(c, beta, uplo):
    n = c.shape[0]
    for j in range(n):
        col = c[j:, j] if uplo == "L" else c[:j + 1, j]
        if beta == 0:
            col[:] = 0
        else:
            col *= beta


def _syrk(uplo, trans, alpha, a, beta, c, herm):
    n = c.shape[0]
    if n == 0:
        return
    k = a.shape[1] if trans == "N" else a.shape[0]
    if alpha == 0 or k == 0:
        if beta != 1:
            _scale_tri(c, beta, uplo)
        return
    for j0 in range(0, n, _PANEL):
        j1 = min(j0 + _PANEL, n)
        if uplo == "L":
            p = _syrk_panel(a, trans, herm, j0, n, j0, j1)
            _blend_tri(c[j0:j1, j0:j1], p[:j1 - j0], alpha, beta, "L", herm)
            if j1 < n:
                cp = c[j1:, j0:j1]
                pp = p[j1 - j0:]
                if alpha != 1:
                    pp *= alpha
                if beta == 0:
                    cp[:] = pp
                else:
                    if beta != 1:
                        cp *= beta
                    cp += pp
        else:
            p = _syrk_panel(a, trans, herm, 0, j1, j0, j1)
            if j0 > 0:
                cp = c[:j0, j0:j1]
                pp = p[:j0]
                if alpha != 1:
                    pp *= alpha
                if beta == 0:
                    cp[:] = pp
                else:
                    if beta != 1:
                        cp *= beta
                    cp += pp
            _blend_tri(c[j0:j1, j0:j1], p[j0:], alpha, beta, "U", herm)


def syrk_herk(uplo: str, trans: str, alpha, a, beta, c,
              hermitian: bool = False) -> None:
    """Rank-k update of the declared triangle of ``c``.

    ``trans='N'`` computes ``alpha*A@A^T + beta*C`` (``A@A^H`` when
    ``hermitian``); ``trans`` in ``{'T','C'}`` computes ``alpha*A^T@A``
    (``A^H@A``).  ``alpha`` and ``beta`` are real.  Only the ``uplo``
    triangle of ``c`` is read or written; for Hermitian updates the
    diagonal imaginary parts are forced to zero.
    """
    uplo = _check(uplo, "LU", "uplo")
    trans = _check(trans, "NTC", "trans")
    a, c = _as2d(a, "a"), _square(c, "c")
    alpha, beta = float(alpha), float(beta)
    n = c.shape[0]
    rows = a.shape[0] if trans == "N" else a.shape[1]
    if alpha != 0 and rows != n:
        raise ValueError(f"syrk_herk shape mismatch: a={a.shape}, c={c.shape}")
    _syrk(uplo, trans, alpha, a, beta, c, herm=bool(hermitian))


# ---------------------------------------------------------------------------
# Cholesky factorization


def _potf2(a, uplo, herm, base):
    """Unblocked left-looking Cholesky of a diagonal block.  Returns 0 or
    the 1-based global index of the first non-positive pivot."""
    k = a.shape[0]
    if uplo == "L":
        for i in range(k):
            row = a[i, :i]
            if herm:
                d = a[i, i].real - np.vdot(row, row).real
            else:
                d = a[i, i] - row @ row
            if not d > 0:
                return base + i + 1
            d = np.sqrt(d)
            a[i, i] = d
            if i + 1 < k:
                col = a[i + 1:, i]
                if i > 0:
                    col -= a[i + 1:, :i] @ (np.conj(row) if herm else row)
                col /= d
    else:
        for i in range(k):
            col = a[:i, i]
            if herm:
                d = a[i, i].real - np.vdot(col, col).real
            else:
                d = a[i, i] - col @ col
            if not d > 0:
                return base + i + 1
            d = np.sqrt(d)
            a[i, i] = d
            if i + 1 < k:
                if i > 0:
                    a[i, i + 1:] -= (np.conj(col) if herm else col) @ a[:i, i + 1:]
                a[i, i + 1:] /= d
    return 0


def potrf_ref(uplo: str, a, nb=None) -> int:
    """Blocked right-looking Cholesky factorization, in place.

    The declared triangle of ``a`` (symmetric PD for real, Hermitian PD
    for complex) is overwritten with ``L`` (``A = L@L^H``) or ``U``
    (``A = U^H@U``).  Returns 0 on success, or the 1-based order of the
    first non-positive leading minor (LAPACK ``info`` convention).
    """
    uplo = _check(uplo, "LU", "uplo")
    a = _square(a, "a")
    nb = _nb(nb)
    n = a.shape[0]
    herm = np.iscomplexobj(a)
    for j0 in range(0, n, nb):
        j1 = min(j0 + nb, n)
        blk = a[j0:j1, j0:j1]
        info = _potf2(blk, uplo, herm, j0)
        if info:
            return info
        if j1 < n:
            if uplo == "L":
                panel = a[j1:, j0:j1]
                _trsm("R", "L", "C", "N", 1.0, blk, panel, nb)
                _syrk("L", "N", -1.0, panel, 1.0, a[j1:, j1:], herm)
            else:
                panel = a[j0:j1, j1:]
                _trsm("L", "U", "C", "N", 1.0, blk, panel, nb)
                _syrk("U", "C", -1.0, panel, 1.0, a[j1:, j1:], herm)
    return 0


# ---------------------------------------------------------------------------
# triangular inversion


def _trti2(a, uplo, diag, nb):
    """Invert a triangular diagonal block by solving against the identity."""
    k = a.shape[0]
    eye = np.eye(k, dtype=a.dtype)
    _trsm_left(uplo, diag, 1.0, a, eye, nb)
    if uplo == "L":
        idx = np.tril_indices(k, -1 if diag == "U" else 0)
    else:
        idx = np.triu_indices(k, 1 if diag == "U" else 0)
    a[idx] = eye[idx]


def trtri_ref(uplo: str, diag: str, a, nb=None) -> int:
    """Invert a triangular matrix in place.

    Returns 0 on success or the 1-based index of a zero diagonal entry
    (``diag='N'`` only); the matrix is untouched on failure.
    """
    uplo = _check(uplo, "LU", "uplo")
    diag = _check(diag, "NU", "diag")
    a = _square(a, "a")
    nb = _nb(nb)
    n = a.shape[0]
    if diag == "N":
        for i in range(n):
            if a[i, i] == 0:
                return i + 1
    if uplo == "U":
        for j0 in range(0, n, nb):
            j1 = min(j0 + nb, n)
            if j0 > 0:
                # leading block already holds its inverse
                _trmm("L", "U", "N", diag, 1.0, a[:j0, :j0], a[:j0, j0:j1], nb)
                _trsm("R", "U", "N", diag, -1.0, a[j0:j1, j0:j1],
                      a[:j0, j0:j1], nb)
            _trti2(a[j0:j1, j0:j1], "U", diag, nb)
    else:
        for j1 in range(n, 0, -nb):
            j0 = max(j1 - nb, 0)
            if j1 < n:
                _trmm("L", "L", "N", diag, 1.0, a[j1:, j1:], a[j1:, j0:j1], nb)
                _trsm("R", "L", "N", diag, -1.0, a[j0:j1, j0:j1],
                      a[j1:, j0:j1], nb)
            _trti2(a[j0:j1, j0:j1], "L", diag, nb)
    return 0


# ---------------------------------------------------------------------------
# triangular product U*U^H / L^H*L


def _lauu2(a, uplo, herm):
    k = a.shape[0]
    if uplo == "L":
        for i in range(k):
            col = a[i + 1:, i].copy()
            aii = a[i, i]
            if i > 0:
                left = np.conj(aii) * a[i, :i] if herm else aii * a[i, :i]
                if i + 1 < k:
                    left += (np.conj(col) if herm else col) @ a[i + 1:, :i]
                a[i, :i] = left
            d = np.vdot(col, col) + np.conj(aii) * aii
            a[i, i] = d.real if herm else d
    else:
        for j in range(k):
            row = np.conj(a[j, j:]) if herm else a[j, j:].copy()
            a[:j + 1, j] = a[:j + 1, j:] @ row
            if herm:
                a[j, j] = a[j, j].real


def lauum_ref(uplo: str, a, nb=None) -> None:
    """In-place triangular product: ``A <- U@U^H`` for upper ``a`` or
    ``A <- L^H@L`` for lower ``a`` (plain transpose for real data)."""
    uplo = _check(uplo, "LU", "uplo")
    a = _square(a, "a")
    nb = _nb(nb)
    n = a.shape[0]
    herm = np.iscomplexobj(a)
    if uplo == "L":
        for i0 in range(0, n, nb):
            i1 = min(i0 + nb, n)
            blk = a[i0:i1, i0:i1]
            if i0 > 0:
                _trmm("L", "L", "C", "N", 1.0, blk, a[i0:i1, :i0], nb)
                if i1 < n:
                    _gemm("C", "N", 1.0, a[i1:, i0:i1], a[i1:, :i0], 1.0,
                          a[i0:i1, :i0])
            _lauu2(blk, "L", herm)
            if i1 < n:
                _syrk("L", "C", 1.0, a[i1:, i0:i1], 1.0, blk, herm)
    else:
        for i0 in range(0, n, nb):
            i1 = min(i0 + nb, n)
            blk = a[i0:i1, i0:i1]
            if i0 > 0:
                _trmm("R", "U", "C", "N", 1.0, blk, a[:i0, i0:i1], nb)
                if i1 < n:
                    _gemm("N", "C", 1.0, a[:i0, i1:], a[i0:i1, i1:], 1.0,
                          a[:i0, i0:i1])
            _lauu2(blk, "U", herm)
            if i1 < n:
                _syrk("U", "N", 1.0, a[i0:i1, i1:], 1.0, blk, herm)
