"""Exact dense linear algebra over F_p.

Matrices are ``numpy.int64`` arrays with entries in ``[0, p)``.  Vectors are
columns: a basis of a subspace of ``F_p^n`` is an ``(n, k)`` array.  The hot
loop (row reduction) is compiled with numba and only touches the nonzero
entries of each pivot row, which keeps the sparse matrices coming out of
Koszul complexes cheap to reduce.
"""

from __future__ import annotations

import numba
import numpy as np

MAX_PRIME = 1 << 16


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    q = 2
    while q * q <= p:
        if p % q == 0:
            return False
        q += 1
    return True


def check_prime(p: int) -> int:
    p = int(p)
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p >= MAX_PRIME:
        raise ValueError(f"prime {p} too large (must be < {MAX_PRIME})")
    return p


def as_cols(a, n: int) -> np.ndarray:
    """View ``a`` as a matrix with n rows (a 1-d vector becomes one column)."""
    a = np.asarray(a, dtype=np.int64)
    if a.ndim == 1:
        return a.reshape(n, 1)
    if a.shape[0] != n:
        raise ValueError(f"expected {n} rows, got {a.shape[0]}")
    return a


def mat(a, p: int, shape=None) -> np.ndarray:
    """Coerce to a reduced int64 array (a fresh copy)."""
    out = np.array(a, dtype=np.int64)
    if shape is not None:
        out = out.reshape(shape)
    return out % p


def zeros(m: int, n: int) -> np.ndarray:
    return np.zeros((m, n), dtype=np.int64)


def eye(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


_EXACT = float(1 << 52)


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    if a.shape[1] == 0 or a.shape[0] == 0 or b.shape[1] == 0:
        return zeros(a.shape[0], b.shape[1])
    if a.shape[1] * float(p - 1) ** 2 < _EXACT:
        # float64 BLAS is exact here and far faster than integer matmul
        c = a.astype(np.float64) @ b.astype(np.float64)
        return np.fmod(c, p).astype(np.int64)
    return (a @ b) % p


@numba.njit(cache=True)
def _rref_kernel(R, p, full):
    m, n = R.shape
    piv = np.empty(min(m, n), np.int64)
    nzc = np.empty(n, np.int64)
    r = 0
    for c in range(n):
        if r == m:
            break
        i = r
        while i < m and R[i, c] == 0:
            i += 1
        if i == m:
            continue
        if i != r:
            for j in range(c, n):
                t = R[r, j]
                R[r, j] = R[i, j]
                R[i, j] = t
        v = R[r, c]
        inv = 1
        b = v
        e = p - 2
        while e > 0:
            if e & 1:
                inv = inv * b % p
            b = b * b % p
            e >>= 1
        k = 0
        for j in range(c, n):
            if R[r, j] != 0:
                if inv != 1:
                    R[r, j] = R[r, j] * inv % p
                nzc[k] = j
                k += 1
        start = 0 if full else r + 1
        for i2 in range(start, m):
            if i2 == r:
                continue
            f = R[i2, c]
            if f != 0:
                f = p - f
                for t in range(k):
                    j = nzc[t]
                    x = R[i2, j] + (f * R[r, j]) % p
                    if x >= p:
                        x -= p
                    R[i2, j] = x
        piv[r] = c
        r += 1
    return piv[:r]


def rref(a: np.ndarray, p: int) -> tuple[np.ndarray, tuple[int, ...]]:
    """Reduced row echelon form and pivot columns."""
    R = np.ascontiguousarray(np.array(a, dtype=np.int64) % p)
    if R.size == 0:
        return R, ()
    piv = _rref_kernel(R, p, True)
    return R, tuple(int(c) for c in piv)


def rank(a: np.ndarray, p: int) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    # eliminate along the short side
    R = np.array(a.T if a.shape[0] > a.shape[1] else a, dtype=np.int64) % p
    R = np.ascontiguousarray(R)
    return len(_rref_kernel(R, p, False))


def nullspace(a: np.ndarray, p: int) -> np.ndarray:
    """Basis (as columns) of ``{x : a @ x = 0}``."""
    a = np.asarray(a)
    m, n = a.shape
    if n == 0:
        return zeros(0, 0)
    if m == 0:
        return eye(n)
    R, piv = rref(a, p)
    free = [c for c in range(n) if c not in set(piv)]
    N = zeros(n, len(free))
    for t, f in enumerate(free):
        N[f, t] = 1
        for r, c in enumerate(piv):
            N[c, t] = (-R[r, f]) % p
    return N


def pivot_columns(a: np.ndarray, p: int) -> tuple[int, ...]:
    a = np.asarray(a)
    if a.size == 0:
        return ()
    return rref(a, p)[1]


def colspace(a: np.ndarray, p: int) -> np.ndarray:
    """A basis of the column space, chosen among the columns of ``a``."""
    a = np.asarray(a, dtype=np.int64)
    if a.shape[0] == 0:
        return zeros(0, 0)
    return a[:, list(pivot_columns(a, p))] % p


def solve(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray | None:
    """Some ``x`` with ``a @ x = b``, or None when the system is inconsistent."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if b.ndim == 1:
        x = solve(a, b.reshape(-1, 1), p)
        return None if x is None else x[:, 0]
    m, n = a.shape
    k = b.shape[1]
    if m == 0:
        return zeros(n, k)
    if n == 0:
        return zeros(0, k) if not np.any(b % p) else None
    R, piv = rref(np.hstack([a, b]), p)
    if any(c >= n for c in piv):
        return None
    x = zeros(n, k)
    for r, c in enumerate(piv):
        x[c] = R[r, n:]
    return x


def inverse(a: np.ndarray, p: int) -> np.ndarray:
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    x = solve(a, eye(n), p)
    if x is None or rank(a, p) != n:
        raise ValueError("matrix is singular")
    return x


def extend_basis(basis: np.ndarray, n: int, p: int) -> np.ndarray:
    """Standard basis vectors completing the columns of ``basis`` to F_p^n."""
    basis = as_cols(basis, n)
    piv = pivot_columns(np.hstack([basis, eye(n)]), p)
    k = basis.shape[1]
    return eye(n)[:, [c - k for c in piv if c >= k]]


def complement_in(sub: np.ndarray, ambient: np.ndarray, p: int) -> np.ndarray:
    """Columns of ``ambient`` spanning a complement of span(sub) inside span(ambient)."""
    n = ambient.shape[0]
    sub = as_cols(sub, n)
    k = sub.shape[1]
    piv = pivot_columns(np.hstack([sub, ambient]), p)
    return ambient[:, [c - k for c in piv if c >= k]]


def in_span(basis: np.ndarray, v: np.ndarray, p: int) -> bool:
    n = v.shape[0]
    basis = as_cols(basis, n)
    v = as_cols(v, n)
    return rank(np.hstack([basis, v]), p) == rank(basis, p)


def intersect(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Basis of span(a) ∩ span(b)."""
    n = a.shape[0]
    a = as_cols(a, n)
    b = as_cols(b, n)
    if a.shape[1] == 0 or b.shape[1] == 0:
        return zeros(n, 0)
    N = nullspace(np.hstack([a, (-b) % p]), p)
    if N.shape[1] == 0:
        return zeros(n, 0)
    return colspace(matmul(a, N[: a.shape[1]], p), p)


def rref_reference(a: np.ndarray, p: int) -> tuple[np.ndarray, tuple[int, ...]]:
    """Plain numpy Gauss-Jordan, kept as an independent check on the kernel."""
    R = np.array(a, dtype=np.int64) % p
    m, n = R.shape
    piv = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(R[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            R[[r, i]] = R[[i, r]]
        R[r] = (R[r] * pow(int(R[r, c]), -1, p)) % p
        for i2 in range(m):
            if i2 != r and R[i2, c]:
                R[i2] = (R[i2] - R[i2, c] * R[r]) % p
        piv.append(c)
        r += 1
    return R, tuple(piv)
