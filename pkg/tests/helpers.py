"""Independent brute-force oracles shared by the tests."""

import itertools

import numpy as np

from freerank import linalg as la


def count_monomials(r: int, degree: int, sigma: int) -> int:
    """Number of monomials in r variables of degree sigma in total degree ``degree``."""
    if degree < 0 or degree % sigma:
        return 0
    n = degree // sigma
    return sum(1 for e in itertools.product(range(n + 1), repeat=r) if sum(e) == n) if r else int(n == 0)


def all_subspaces(w: int, p: int):
    """Every subspace of F_p^w as a w x r matrix (reduced echelon bases)."""
    out = []
    for r in range(w + 1):
        for piv in itertools.combinations(range(w), r):
            free = [(i, j) for i in range(r) for j in range(w) if j > piv[i] and j not in piv]
            for vals in itertools.product(range(p), repeat=len(free)):
                A = np.zeros((r, w), dtype=np.int64)
                for i, c in enumerate(piv):
                    A[i, c] = 1
                for (i, j), v in zip(free, vals):
                    A[i, j] = v
                out.append(A.T.copy())
    return out


def homology_dim(D_in, D_out, n: int, p: int) -> int:
    r_in = la.rank(D_in, p) if D_in is not None and D_in.size else 0
    r_out = la.rank(D_out, p) if D_out is not None and D_out.size else 0
    return n - r_in - r_out
