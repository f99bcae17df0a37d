"""Dense linear algebra over Z/p on numpy int64 arrays.

Every routine keeps entries in 0..p-1, so products stay far below the
int64 range for the primes we allow (p <= 31).
"""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

import numpy as np


def as_matrix(rows, p: int, ncols: Optional[int] = None) -> np.ndarray:
    M = np.asarray(rows, dtype=np.int64)
    if M.ndim == 1:
        M = M.reshape(0, ncols or 0) if M.size == 0 else M.reshape(1, -1)
    return M % p


def _inv(a: int, p: int) -> int:
    return pow(int(a) % p, p - 2, p)


def row_reduce(M, p: int) -> Tuple[np.ndarray, List[int]]:
    """Reduced row echelon form mod p.

    Returns ``(R, pivot_cols)``; pivot rows are scaled to 1 and every
    pivot column is zero outside its pivot row.
    """
    R = np.array(M, dtype=np.int64, copy=True) % p
    if R.ndim != 2 or R.size == 0:
        return R, []
    m, n = R.shape
    pivot_cols: List[int] = []
    row = 0
    for col in range(n):
        if row >= m:
            break
        nz = np.nonzero(R[row:, col])[0]
        if nz.size == 0:
            continue
        found = row + int(nz[0])
        if found != row:
            R[[row, found]] = R[[found, row]]
        R[row] = (R[row] * _inv(R[row, col], p)) % p
        factors = R[:, col].copy()
        factors[row] = 0
        if factors.any():
            R = (R - np.outer(factors, R[row])) % p
        pivot_cols.append(col)
        row += 1
    return R, pivot_cols


def rank(M, p: int) -> int:
    _, pivots = row_reduce(M, p)
    return len(pivots)


def nullspace(M, p: int) -> np.ndarray:
    """Basis of {v : M v = 0}, one vector per row, free-column order."""
    M = np.asarray(M, dtype=np.int64)
    n = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(n, dtype=np.int64)
    R, pivots = row_reduce(M, p)
    free = [c for c in range(n) if c not in set(pivots)]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, c in enumerate(pivots):
            basis[i, c] = (-R[r, f]) % p
    return basis


def det(M, p: int) -> int:
    A = np.array(M, dtype=np.int64, copy=True) % p
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("determinant of a non-square matrix")
    result = 1
    for col in range(n):
        nz = np.nonzero(A[col:, col])[0]
        if nz.size == 0:
            return 0
        found = col + int(nz[0])
        if found != col:
            A[[col, found]] = A[[found, col]]
            result = -result
        pivot = int(A[col, col])
        result = (result * pivot) % p
        inv = _inv(pivot, p)
        below = A[col + 1:, col].copy()
        if below.any():
            A[col + 1:] = (A[col + 1:] - np.outer(below * inv % p, A[col])) % p
    return result % p


def inverse(M, p: int) -> Optional[np.ndarray]:
    A = np.asarray(M, dtype=np.int64) % p
    n = A.shape[0]
    R, pivots = row_reduce(np.hstack([A, np.eye(n, dtype=np.int64)]), p)
    if pivots[:n] != list(range(n)):
        return None
    return R[:, n:] % p


def solve(M, b, p: int) -> Optional[np.ndarray]:
    """Some x with M x = b, or None when the system is inconsistent."""
    M = np.asarray(M, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64).reshape(-1, 1) % p
    m, n = M.shape
    R, pivots = row_reduce(np.hstack([M, b]), p)
    if n in pivots:
        return None
    x = np.zeros(n, dtype=np.int64)
    for r, c in enumerate(pivots):
        x[c] = R[r, n]
    return x


def echelon_basis(rows, p: int) -> np.ndarray:
    """Nonzero rows of the reduced echelon form."""
    R, pivots = row_reduce(rows, p)
    if R.size == 0:
        return R
    return R[: len(pivots)]


def in_span(rows, v, p: int) -> bool:
    v = np.asarray(v, dtype=np.int64) % p
    if not np.asarray(rows).size:
        return not v.any()
    base = rank(rows, p)
    return rank(np.vstack([np.asarray(rows, dtype=np.int64), v]), p) == base


def extend_independent(rows: Sequence, candidates: Sequence, p: int) -> List[int]:
    """Indices of the candidates that enlarge span(rows), scanned in order."""
    current = [np.asarray(r, dtype=np.int64) % p for r in rows]
    r0 = rank(np.vstack(current), p) if current else 0
    chosen = []
    for i, v in enumerate(candidates):
        trial = current + [np.asarray(v, dtype=np.int64) % p]
        r1 = rank(np.vstack(trial), p)
        if r1 > r0:
            current, r0 = trial, r1
            chosen.append(i)
    return chosen
