"""Finite cochain complexes of F_p-vector spaces.

A complex is a list of term dimensions ``dims[i]`` (cohomological degree
``start + i``) and differentials ``diffs[i] : dims[i] -> dims[i+1]``.  The
cohomology at a spot is described by a :class:`CohomologyBasis`, which
supports taking coordinates of cocycles so that induced maps and connecting
maps can be written down as honest matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg as la


@dataclass
class CohomologyBasis:
    """Representatives of Z/B at one spot of a complex."""

    p: int
    n: int  # dimension of the ambient term
    cycles: np.ndarray  # Z, (n, z)
    boundaries: np.ndarray  # B, (n, b)
    reps: np.ndarray  # cocycles lifting a basis of Z/B, (n, h)
    _solver: tuple | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.reps.shape[1]

    def coords(self, z: np.ndarray) -> np.ndarray:
        """Coordinates of the classes of the cocycle columns ``z`` in ``reps``.

        Raises ValueError if some column is not a cocycle.
        """
        z = la.as_cols(z, self.n)
        A = np.hstack([self.boundaries, self.reps])
        x = la.solve(A, z, self.p)
        if x is None:
            raise ValueError("vector is not a cocycle")
        return x[self.boundaries.shape[1]:]


@dataclass
class Complex:
    p: int
    dims: list[int]
    diffs: list[np.ndarray]
    start: int = 0

    def __post_init__(self):
        if len(self.diffs) != max(len(self.dims) - 1, 0):
            raise ValueError("need one differential between consecutive terms")
        for i, D in enumerate(self.diffs):
            if D.shape != (self.dims[i + 1], self.dims[i]):
                raise ValueError(f"differential {i} has shape {D.shape}")

    def term(self, k: int) -> int:
        i = k - self.start
        return self.dims[i] if 0 <= i < len(self.dims) else 0

    def diff(self, k: int) -> np.ndarray:
        """The differential leaving cohomological degree ``k``."""
        i = k - self.start
        if 0 <= i < len(self.diffs):
            return self.diffs[i]
        return la.zeros(self.term(k + 1), self.term(k))

    def is_complex(self) -> bool:
        return all(
            not np.any(la.matmul(self.diffs[i + 1], self.diffs[i], self.p))
            for i in range(len(self.diffs) - 1)
        )

    def betti(self, k: int) -> int:
        n = self.term(k)
        if n == 0:
            return 0
        return n - la.rank(self.diff(k), self.p) - la.rank(self.diff(k - 1), self.p)

    def cohomology(self, k: int) -> CohomologyBasis:
        p, n = self.p, self.term(k)
        if n == 0:
            e = la.zeros(0, 0)
            return CohomologyBasis(p, 0, e, e, e)
        Z = la.nullspace(self.diff(k), p)
        B = la.as_cols(la.colspace(self.diff(k - 1), p), n)
        reps = la.complement_in(B, Z, p)
        return CohomologyBasis(p, n, Z, B, reps)


def induced_map(f: np.ndarray, src: CohomologyBasis, dst: CohomologyBasis) -> np.ndarray:
    """Matrix of the map on cohomology induced by the chain map component ``f``."""
    if src.dim == 0:
        return la.zeros(dst.dim, 0)
    return dst.coords(la.matmul(f, src.reps, src.p))


def connecting_map(
    dB: np.ndarray,
    f_next: np.ndarray,
    g: np.ndarray,
    src: CohomologyBasis,
    dst: CohomologyBasis,
    p: int,
) -> np.ndarray:
    """Snake-lemma map H^k(C) -> H^{k+1}(A) for ``0 -> A -f-> B -g-> C -> 0``.

    ``g`` is the degree-k component B^k -> C^k, ``dB`` the differential
    B^k -> B^{k+1} and ``f_next`` the degree-(k+1) component A^{k+1} -> B^{k+1}.
    """
    if src.dim == 0:
        return la.zeros(dst.dim, 0)
    lift = la.solve(g, src.reps, p)
    if lift is None:
        raise ValueError("projection is not surjective")
    y = la.matmul(dB, lift, p)
    a = la.solve(f_next, y, p)
    if a is None:
        raise ValueError("boundary of the lift does not come from the subcomplex")
    return dst.coords(a)
