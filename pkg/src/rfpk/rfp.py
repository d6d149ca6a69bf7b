"""Cholesky-family operations on RFP storage.

Every operation is a fixed composition of full-format kernels applied to
the three blocks of the stored rectangle (the leading triangle ``T1``,
the transposed trailing triangle ``T2`` and the off-diagonal rectangle
``S1``).  The transposed-rectangle layouts reduce to the direct ones by
operating on the transposed buffer view, so a single code path per
``uplo`` covers all eight cases.

For complex data the triangle is Hermitian (the transposed block holds
conjugated values of the opposite triangle); conjugations are expressed
through conjugate-transpose kernel ops on transposed views, never by
rewriting the buffer.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .convert import FactorState, RfpTriangle, _blocks
from .kernels import SingularMatrixError

__all__ = [
    "pftrf",
    "pftrs",
    "tfsm",
    "sfrk_hfrk",
    "tftri",
    "pftri",
    "lansf",
]


def _flag(value, allowed, what):
    f = str(value).upper()[:1]
    if f not in allowed:
        raise ValueError(f"{what} must be one of {tuple(allowed)}, got {value!r}")
    return f


def _views(r: RfpTriangle):
    return _blocks(r.rect_normal(), r.desc)


def _offset_singular(base: int, func, *args):
    """Run a kernel call, translating a block-local singularity index to
    the global 1-based row."""
    try:
        func(*args)
    except SingularMatrixError as exc:
        raise SingularMatrixError(base + exc.index) from None


def pftrf(r: RfpTriangle) -> int:
    """Cholesky-factorize an RFP-stored SPD/HPD matrix in place.

    On success the buffer holds the factor (``A = L@L^H`` for the lower
    layout, ``A = U^H@U`` for the upper one) and 0 is returned.  A
    non-positive-definite input returns the 1-based order of the first
    offending leading minor, matching the full-format reference.
    """
    desc = r.desc
    n1, n2 = desc.n1, desc.n2
    if desc.n == 0:
        r.state = FactorState.CHOLESKY
        return 0
    herm = np.iscomplexobj(r.data)
    t1, t2, s1 = _views(r)
    if desc.uplo == "L":
        info = kernels.potrf_ref("L", t1)
        if info:
            return info
        if n2:
            kernels.trsm("R", "L", "C", "N", 1.0, t1, s1)
            kernels.syrk_herk("U", "C", -1.0, s1.T, 1.0, t2, hermitian=herm)
            info = kernels.potrf_ref("U", t2)
            if info:
                return n1 + info
    else:
        if n2:
            info = kernels.potrf_ref("L", t1)
            if info:
                return info
            kernels.trsm("L", "U", "C", "N", 1.0, t1.T, s1)
            kernels.syrk_herk("U", "C", -1.0, s1, 1.0, t2, hermitian=herm)
        info = kernels.potrf_ref("U", t2)
        if info:
            return n2 + info
    r.state = FactorState.CHOLESKY
    return 0


def _rhs_view(r: RfpTriangle, b) -> np.ndarray:
    b = np.asarray(b)
    flat = b.ndim == 1
    bv = b.reshape(-1, 1) if flat else b
    if bv.ndim != 2 or bv.shape[0] != r.desc.n:
        raise ValueError(
            f"right-hand side shape {b.shape} does not match order {r.desc.n}")
    if np.iscomplexobj(r.data) and not np.iscomplexobj(bv):
        raise ValueError("complex system needs a complex right-hand side")
    return bv


def pftrs(r: RfpTriangle, b) -> None:
    """Solve ``A @ X = B`` in place on ``b`` using a factor from
    :func:`pftrf` (forward then backward substitution through the three
    blocks)."""
    if r.state is not FactorState.CHOLESKY:
        raise ValueError(f"pftrs needs a Cholesky factor, state is {r.state.value}")
    bv = _rhs_view(r, b)
    desc = r.desc
    if desc.n == 0 or bv.shape[1] == 0:
        return
    n1, n2 = desc.n1, desc.n2
    t1, t2, s1 = _views(r)
    if desc.uplo == "L":
        b1, b2 = bv[:n1], bv[n1:]
        kernels.trsm("L", "L", "N", "N", 1.0, t1, b1)
        if n2:
            kernels.gemm("N", "N", -1.0, s1, b1, 1.0, b2)
            kernels.trsm("L", "U", "T", "N", 1.0, t2, b2)
            kernels.trsm("L", "L", "C", "N", 1.0, t2.T, b2)
            kernels.gemm("C", "N", -1.0, s1, b2, 1.0, b1)
        kernels.trsm("L", "L", "C", "N", 1.0, t1, b1)
    else:
        b1, b2 = bv[:n2], bv[n2:]
        if n2:
            kernels.trsm("L", "U", "C", "N", 1.0, t1.T, b1)
            kernels.gemm("C", "N", -1.0, s1, b1, 1.0, b2)
        kernels.trsm("L", "U", "C", "N", 1.0, t2, b2)
        kernels.trsm("L", "U", "N", "N", 1.0, t2, b2)
        if n2:
            kernels.gemm("N", "N", -1.0, s1, b2, 1.0, b1)
            kernels.trsm("L", "L", "T", "N", 1.0, t1, b1)


def _tfsm_left(uplo, trans, diag, alpha, r, b):
    n1, n2 = r.desc.n1, r.desc.n2
    t1, t2, s1 = _views(r)
    if uplo == "L":
        b1, b2 = b[:n1], b[n1:]
        if trans == "N":
            _offset_singular(0, kernels.trsm, "L", "L", "N", diag, alpha, t1, b1)
            if n2:
                kernels.gemm("N", "N", -1.0, s1, b1, alpha, b2)
                _offset_singular(n1, kernels.trsm, "L", "U", "T", diag, 1.0, t2, b2)
        elif trans == "T":
            if n2:
                _offset_singular(n1, kernels.trsm, "L", "U", "N", diag, alpha, t2, b2)
                kernels.gemm("T", "N", -1.0, s1, b2, alpha, b1)
                _offset_singular(0, kernels.trsm, "L", "L", "T", diag, 1.0, t1, b1)
            else:
                _offset_singular(0, kernels.trsm, "L", "L", "T", diag, alpha, t1, b1)
        else:
            if n2:
                _offset_singular(n1, kernels.trsm, "L", "L", "C", diag, alpha, t2.T, b2)
                kernels.gemm("C", "N", -1.0, s1, b2, alpha, b1)
                _offset_singular(0, kernels.trsm, "L", "L", "C", diag, 1.0, t1, b1)
            else:
                _offset_singular(0, kernels.trsm, "L", "L", "C", diag, alpha, t1, b1)
    else:
        b1, b2 = b[:n2], b[n2:]
        if trans == "N":
            _offset_singular(n2, kernels.trsm, "L", "U", "N", diag, alpha, t2, b2)
            if n2:
                kernels.gemm("N", "N", -1.0, s1, b2, alpha, b1)
                _offset_singular(0, kernels.trsm, "L", "L", "T", diag, 1.0, t1, b1)
        elif trans == "T":
            if n2:
                _offset_singular(0, kernels.trsm, "L", "L", "N", diag, alpha, t1, b1)
                kernels.gemm("T", "N", -1.0, s1, b1, alpha, b2)
                _offset_singular(n2, kernels.trsm, "L", "U", "T", diag, 1.0, t2, b2)
            else:
                _offset_singular(n2, kernels.trsm, "L", "U", "T", diag, alpha, t2, b2)
        else:
            if n2:
                _offset_singular(0, kernels.trsm, "L", "U", "C", diag, alpha, t1.T, b1)
                kernels.gemm("C", "N", -1.0, s1, b1, alpha, b2)
                _offset_singular(n2, kernels.trsm, "L", "U", "C", diag, 1.0, t2, b2)
            else:
                _offset_singular(n2, kernels.trsm, "L", "U", "C", diag, alpha, t2, b2)


def tfsm(transr: str, side: str, uplo: str, trans: str, diag: str,
         m: int, n: int, alpha, a: RfpTriangle, b) -> None:
    """Triangular solve with an RFP-stored coefficient matrix.

    Overwrites the ``m x n`` array ``b`` with the solution of
    ``op(A) @ X = alpha*B`` (side 'L') or ``X @ op(A) = alpha*B``
    (side 'R').  ``a`` holds the order-``m`` (side 'L') or order-``n``
    (side 'R') triangle; its descriptor must agree with ``transr``/``uplo``.
    """
    transr = _flag(transr, "NT", "transr")
    side = _flag(side, "LR", "side")
    uplo = _flag(uplo, "LU", "uplo")
    trans = _flag(trans, "NTC", "trans")
    diag = _flag(diag, "NU", "diag")
    order = m if side == "L" else n
    desc = a.desc
    if (desc.n, desc.uplo, desc.transr) != (order, uplo, transr):
        raise ValueError(
            f"descriptor (n={desc.n}, uplo={desc.uplo}, transr={desc.transr}) "
            f"does not match (n={order}, uplo={uplo}, transr={transr})")
    b = np.asarray(b)
    if b.shape != (m, n):
        raise ValueError(f"b must be {(m, n)}, got {b.shape}")
    if m == 0 or n == 0:
        return
    if alpha == 0:
        b[:] = 0
        return
    if not np.iscomplexobj(a.data) and trans == "C":
        trans = "T"
    if side == "L":
        _tfsm_left(uplo, trans, diag, alpha, a, b)
    elif trans == "C":
        # X@A^H = alpha*B  <=>  A@conj(X)^T = conj(alpha)*conj(B)^T
        np.conjugate(b, out=b)
        _tfsm_left(uplo, "N", diag, np.conj(alpha), a, b.T)
        np.conjugate(b, out=b)
    else:
        _tfsm_left(uplo, "T" if trans == "N" else "N", diag, alpha, a, b.T)


def sfrk_hfrk(transr: str, uplo: str, trans: str, n: int, k: int,
              alpha: float, a, beta: float, c: RfpTriangle,
              hermitian=None) -> None:
    """Symmetric/Hermitian rank-k update of an RFP-stored triangle.

    ``C <- alpha*G@G^H + beta*C`` with ``G = A`` (``n x k``) for
    ``trans='N'`` or ``G = A^H`` (``A`` is ``k x n``) otherwise; plain
    transposes for real data.  ``alpha`` and ``beta`` are real.
    """
    transr = _flag(transr, "NT", "transr")
    uplo = _flag(uplo, "LU", "uplo")
    trans = _flag(trans, "NTC", "trans")
    desc = c.desc
    if (desc.n, desc.uplo, desc.transr) != (int(n), uplo, transr):
        raise ValueError(
            f"descriptor (n={desc.n}, uplo={desc.uplo}, transr={desc.transr}) "
            f"does not match (n={n}, uplo={uplo}, transr={transr})")
    alpha, beta = float(alpha), float(beta)
    herm = np.iscomplexobj(c.data) if hermitian is None else bool(hermitian)
    if np.iscomplexobj(c.data) and not herm:
        raise ValueError("complex symmetric (non-conjugated) updates are not supported")
    if n == 0:
        return
    if alpha == 0 or k == 0:
        if beta == 0:
            c.data[:] = 0
        elif beta != 1:
            c.data *= beta
        return
    a = np.asarray(a)
    want = (n, k) if trans == "N" else (k, n)
    if a.shape != want:
        raise ValueError(f"a must be {want} for trans={trans!r}, got {a.shape}")
    n1, n2 = desc.n1, desc.n2
    t1, t2, s1 = _views(c)
    if desc.uplo == "L":
        a1 = a[:n1, :] if trans == "N" else a[:, :n1]
        a2 = a[n1:, :] if trans == "N" else a[:, n1:]
        kernels.syrk_herk("L", trans, alpha, a1, beta, t1, hermitian=herm)
        if n2:
            if trans == "N":
                kernels.gemm("N", "C", alpha, a2, a1, beta, s1)
            else:
                kernels.gemm("C", "N", alpha, a2, a1, beta, s1)
            kernels.syrk_herk("U", "C" if trans == "N" else "N", alpha,
                              a2.T, beta, t2, hermitian=herm)
    else:
        a1 = a[:n2, :] if trans == "N" else a[:, :n2]
        a2 = a[n2:, :] if trans == "N" else a[:, n2:]
        if n2:
            kernels.syrk_herk("L", "C" if trans == "N" else "N", alpha,
                              a1.T, beta, t1, hermitian=herm)
            if trans == "N":
                kernels.gemm("N", "C", alpha, a1, a2, beta, s1)
            else:
                kernels.gemm("C", "N", alpha, a1, a2, beta, s1)
        kernels.syrk_herk("U", trans, alpha, a2, beta, t2, hermitian=herm)


def tftri(r: RfpTriangle, diag: str = "N") -> int:
    """Invert an RFP-stored triangular matrix in place.

    Returns 0 on success or the 1-based global index of a zero diagonal
    entry (``diag='N'``); the buffer may be partially overwritten on
    failure, as with the full-format kernel chain.
    """
    diag = _flag(diag, "NU", "diag")
    desc = r.desc
    if desc.n == 0:
        return 0
    n1, n2 = desc.n1, desc.n2
    t1, t2, s1 = _views(r)
    if desc.uplo == "L":
        info = kernels.trtri_ref("L", diag, t1)
        if info:
            return info
        if n2:
            kernels.trmm("R", "L", "N", diag, -1.0, t1, s1)
            info = kernels.trtri_ref("U", diag, t2)
            if info:
                return n1 + info
            kernels.trmm("L", "U", "T", diag, 1.0, t2, s1)
    else:
        if n2:
            info = kernels.trtri_ref("L", diag, t1)
            if info:
                return info
            kernels.trmm("L", "L", "T", diag, -1.0, t1, s1)
            info = kernels.trtri_ref("U", diag, t2)
            if info:
                return n2 + info
            kernels.trmm("R", "U", "N", diag, 1.0, t2, s1)
        else:
            info = kernels.trtri_ref("U", diag, t2)
            if info:
                return info
    if r.state is FactorState.CHOLESKY:
        r.state = FactorState.TRIANGULAR_INVERSE
    return 0


def pftri(r: RfpTriangle) -> int:
    """Invert an SPD/HPD matrix in place from its Cholesky factor.

    Runs the triangular inversion and then the triangular product stage,
    leaving the ``uplo`` triangle of ``A^{-1}`` in RFP storage.  Returns
    0 or the failure index propagated from the triangular inversion.
    """
    if r.state is not FactorState.CHOLESKY:
        raise ValueError(f"pftri needs a Cholesky factor, state is {r.state.value}")
    info = tftri(r, "N")
    if info:
        return info
    desc = r.desc
    if desc.n == 0:
        r.state = FactorState.FULL_INVERSE
        return 0
    herm = np.iscomplexobj(r.data)
    n2 = desc.n2
    t1, t2, s1 = _views(r)
    if desc.uplo == "L":
        kernels.lauum_ref("L", t1)
        if n2:
            kernels.syrk_herk("L", "C", 1.0, s1, 1.0, t1, hermitian=herm)
            kernels.trmm("L", "L", "C", "N", 1.0, t2.T, s1)
            kernels.lauum_ref("U", t2)
    else:
        if n2:
            kernels.lauum_ref("L", t1)
            kernels.syrk_herk("L", "C", 1.0, s1.T, 1.0, t1, hermitian=herm)
            kernels.trmm("R", "U", "C", "N", 1.0, t2, s1)
        kernels.lauum_ref("U", t2)
    r.state = FactorState.FULL_INVERSE
    return 0


def _column_pieces(r: RfpTriangle, j: int):
    """Slices whose concatenation is column ``j`` of the full symmetric or
    Hermitian matrix, in ascending row order (values up to conjugation,
    which leaves magnitudes unchanged)."""
    desc = r.desc
    n1, n2 = desc.n1, desc.n2
    t1, t2, s1 = _views(r)
    if desc.uplo == "L":
        if j < n1:
            return t1[j, :j], t1[j:, j], s1[:, j]
        jj = j - n1
        return s1[jj, :], t2[:jj, jj], t2[jj, jj:]
    if j < n2:
        return t1[j, :j + 1], t1[j + 1:, j], s1[j, :]
    c = j - n2
    return s1[:, c], t2[:c + 1, c], t2[c, c + 1:]


def lansf(norm: str, r: RfpTriangle, hermitian: bool = True) -> float:
    """Norm of the full symmetric/Hermitian matrix implied by an RFP
    triangle: ``'M'`` (max absolute value), ``'1'``/``'O'`` (one norm),
    ``'I'`` (infinity norm), ``'F'``/``'E'`` (Frobenius)."""
    norm = str(norm).upper()[:1]
    if norm not in ("M", "1", "O", "I", "F", "E"):
        raise ValueError(f"unknown norm selector {norm!r}")
    n = r.desc.n
    if n == 0:
        return 0.0
    if norm == "M":
        rect = r.rect()
        best = 0.0
        for j in range(rect.shape[1]):
            best = max(best, float(np.abs(rect[:, j]).max()))
        return best
    buf = np.empty(n, dtype=np.float64)
    if norm in ("1", "O", "I"):
        # one and infinity norms coincide for symmetric/Hermitian matrices
        best = 0.0
        for j in range(n):
            pos = 0
            for piece in _column_pieces(r, j):
                ln = piece.shape[0]
                np.abs(piece, out=buf[pos:pos + ln])
                pos += ln
            best = max(best, float(buf.sum()))
        return best
    ssq = 0.0
    for j in range(n):
        pos = 0
        for piece in _column_pieces(r, j):
            ln = piece.shape[0]
            np.abs(piece, out=buf[pos:pos + ln])
            pos += ln
        ssq += float(buf @ buf)
    return float(np.sqrt(ssq))
