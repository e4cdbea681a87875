"""Rank and null-space routines for the exact and float backends.

Exact matrices are numpy object arrays whose entries are ExactScalar (or
anything coercible to it).  Float routines threshold singular values
relative to the largest one.
"""
from __future__ import annotations

import numpy as np

from .exact import ONE, ZERO, ExactScalar

DEFAULT_RANK_TOL = 1e-9


def is_exact_array(M) -> bool:
    return isinstance(M, np.ndarray) and M.dtype == object


def to_exact(M) -> np.ndarray:
    M = np.asarray(M, dtype=object)
    out = np.empty(M.shape, dtype=object)
    for idx, v in np.ndenumerate(M):
        out[idx] = ExactScalar.coerce(v)
    return out


def to_float(M) -> np.ndarray:
    if is_exact_array(M):
        return np.vectorize(float, otypes=[float])(M) if M.size else np.zeros(M.shape)
    return np.asarray(M, dtype=float)


def identity(n: int, exact: bool):
    if not exact:
        return np.eye(n)
    out = np.full((n, n), ZERO, dtype=object)
    for i in range(n):
        out[i, i] = ONE
    return out


def zeros(shape, exact: bool):
    if not exact:
        return np.zeros(shape)
    return np.full(shape, ZERO, dtype=object)


def matmul(A, B):
    if is_exact_array(A) or is_exact_array(B):
        A, B = to_exact(A), to_exact(B)
        n, m = A.shape[0], B.shape[1]
        out = zeros((n, m), True)
        for i in range(n):
            for j in range(m):
                acc = ZERO
                for k in range(A.shape[1]):
                    a, b = A[i, k], B[k, j]
                    if a and b:
                        acc = acc + a * b
                out[i, j] = acc
        return out
    return np.asarray(A) @ np.asarray(B)


def matrix_power(M, p: int):
    out = identity(M.shape[0], is_exact_array(M))
    for _ in range(p):
        out = matmul(out, M)
    return out


def rref(M) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over Q(sqrt2, sqrt3) with its pivot columns."""
    R = to_exact(M).copy()
    rows, cols = R.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if R[i, c]), None)
        if p is None:
            continue
        if p != r:
            R[[r, p]] = R[[p, r]]
        inv = R[r, c].inverse()
        R[r] = [x * inv for x in R[r]]
        for i in range(rows):
            if i != r and R[i, c]:
                f = R[i, c]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
    return R, pivots


def exact_rank(M) -> int:
    M = np.asarray(M, dtype=object)
    if M.size == 0:
        return 0
    return len(rref(M)[1])


def exact_nullspace(M) -> np.ndarray:
    """Columns spanning the kernel, one free variable set to 1 per column."""
    R, pivots = rref(M)
    cols = R.shape[1]
    free = [c for c in range(cols) if c not in pivots]
    basis = zeros((cols, len(free)), True)
    for k, f in enumerate(free):
        basis[f, k] = ONE
        for i, p in enumerate(pivots):
            basis[p, k] = -R[i, f]
    return basis


def float_rank(M, tol: float = DEFAULT_RANK_TOL, scale: float | None = None) -> int:
    """Singular values above tol * scale; scale defaults to the largest one."""
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    ref = s[0] if scale is None else scale
    if ref == 0:
        return 0
    return int(np.sum(s > tol * ref))


def float_nullspace(M, tol: float = DEFAULT_RANK_TOL, scale: float | None = None
                    ) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    _, s, vh = np.linalg.svd(M)
    ref = (s[0] if s.size else 0.0) if scale is None else scale
    if ref == 0:
        return np.eye(M.shape[1])
    r = int(np.sum(s > tol * ref))
    return vh[r:].conj().T


def rank(M, tol: float = DEFAULT_RANK_TOL, scale: float | None = None) -> int:
    if is_exact_array(M):
        return exact_rank(M)
    return float_rank(M, tol, scale)


def nullspace(M, tol: float = DEFAULT_RANK_TOL, scale: float | None = None):
    if is_exact_array(M):
        return exact_nullspace(M)
    return float_nullspace(M, tol, scale)


def hstack(blocks, n: int, exact: bool):
    blocks = [b for b in blocks if b.shape[1]]
    if not blocks:
        return zeros((n, 0), exact)
    if exact:
        return np.concatenate([to_exact(b) for b in blocks], axis=1)
    return np.concatenate([np.asarray(b, dtype=float) for b in blocks], axis=1)


def max_abs(M) -> float:
    F = to_float(M)
    return float(np.max(np.abs(F))) if F.size else 0.0


def determinant(M):
    """Exact determinant by elimination, or the float determinant."""
    if not is_exact_array(M):
        return float(np.linalg.det(np.asarray(M, dtype=float)))
    A = to_exact(M).copy()
    n = A.shape[0]
    det = ONE
    for c in range(n):
        p = next((i for i in range(c, n) if A[i, c]), None)
        if p is None:
            return ZERO
        if p != c:
            A[[c, p]] = A[[p, c]]
            det = -det
        det = det * A[c, c]
        inv = A[c, c].inverse()
        for i in range(c + 1, n):
            if A[i, c]:
                f = A[i, c] * inv
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return det
