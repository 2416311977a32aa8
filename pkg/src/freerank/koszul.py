"""Local cohomology at the irrelevant ideal via stable Koszul complexes.

The Čech complex of M is the colimit over n of the Koszul cochain complexes
K_n = K(y_1^n, ..., y_w^n; M), with transition maps K_n -> K_{n+1} given by
multiplication by y_S on the component indexed by the subset S.  In a fixed
internal degree d every K_n is finite-dimensional:

    K_n^a (degree d) = ⊕_{|S| = a} M_{d + n*sigma*a}.

The colimit is reached at a finite level, which we certify in one of two
ways:

* with an end bound E (every H^b_m(M) vanishes above degree E), the level
  n with n*sigma > E - d already computes H_m(M)_d exactly;
* otherwise we iterate n and accept once the transition maps have been
  isomorphisms on cohomology for ``run`` consecutive steps.  This is a
  heuristic; degrees where it runs out of window are reported uncertified.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .graded import GradedModule, WindowTooSmall, subsets
from .homology import CohomologyBasis, Complex, connecting_map as _snake, induced_map


# Consecutive cohomology isomorphisms required before a Koszul level is
# accepted as stable when no end bound is supplied.
DEFAULT_RUN = 2


def _sign(S: tuple[int, ...], k: int) -> int:
    return -1 if sum(1 for s in S if s < k) % 2 else 1


@dataclass
class CechComplex:
    """The Koszul complex K_n(M) in internal degree d (cohomological indices 0..top)."""

    module: GradedModule
    degree: int
    level: int
    top: int
    subsets: list[list[tuple[int, ...]]]
    complex: Complex

    def term_degree(self, a: int) -> int:
        return self.degree + self.level * self.module.sigma * a

    def blocks(self, a: int) -> list[tuple[tuple[int, ...], int, int]]:
        """(subset, start, stop) of each summand of the a-th term."""
        dim = self.module.dim(self.term_degree(a))
        return [(S, i * dim, (i + 1) * dim) for i, S in enumerate(self.subsets[a])]


def cech_complex(M: GradedModule, d: int, n: int, top: int | None = None) -> CechComplex:
    """K_n(M) in internal degree d, truncated to cohomological indices <= top."""
    w, p, s = M.w, M.p, M.sigma
    top = w if top is None else min(top, w)
    subs = [subsets(w, a) for a in range(top + 1)]
    dims, diffs = [], []
    for a in range(top + 1):
        dims.append(len(subs[a]) * M.dim(d + n * s * a))
    for a in range(top):
        e = d + n * s * a
        m0, m1 = M.dim(e), M.dim(e + n * s)
        D = la.zeros(dims[a + 1], dims[a])
        if m0 and m1:
            pos = {S: i for i, S in enumerate(subs[a + 1])}
            for c, S in enumerate(subs[a]):
                for k in range(w):
                    if k in S:
                        continue
                    T = tuple(sorted(S + (k,)))
                    blk = M.power(k, n, e)
                    if _sign(S, k) < 0:
                        blk = (-blk) % p
                    r = pos[T]
                    D[r * m1:(r + 1) * m1, c * m0:(c + 1) * m0] = blk
        diffs.append(D)
    return CechComplex(M, d, n, top, subs, Complex(p, dims, diffs))


def _ys(M: GradedModule, S: tuple[int, ...], e: int) -> np.ndarray:
    """Matrix of prod_{k in S} y_k on degree e."""
    key = ("ys", S, e)
    if key not in M._cache:
        out = la.eye(M.dim(e))
        for k in S:
            out = la.matmul(M.act(k, e), out, M.p)
            e += M.sigma
        M._cache[key] = out
    return M._cache[key]


def transition(M: GradedModule, d: int, n: int, a: int) -> np.ndarray:
    """K_n^a -> K_{n+1}^a in internal degree d."""
    s = M.sigma
    e0, e1 = d + n * s * a, d + (n + 1) * s * a
    m0, m1 = M.dim(e0), M.dim(e1)
    subs = subsets(M.w, a)
    out = la.zeros(len(subs) * m1, len(subs) * m0)
    if m0 and m1:
        for i, S in enumerate(subs):
            out[i * m1:(i + 1) * m1, i * m0:(i + 1) * m0] = _ys(M, S, e0)
    return out


def fits(M: GradedModule, d: int, n: int, top: int | None = None) -> bool:
    top = M.w if top is None else min(top, M.w)
    return all(M.known(d + n * M.sigma * a) for a in range(top + 1))


@dataclass
class StableLevel:
    """A level n at which K_n(M)_d computes local cohomology, with cocycle bases."""

    cech: CechComplex
    bases: dict[int, CohomologyBasis]
    certified_by: str  # "bound" or "run"

    @property
    def level(self) -> int:
        return self.cech.level

    def dim(self, i: int) -> int:
        return self.bases[i].dim if i in self.bases else 0


def _bases(C: CechComplex, indices) -> dict[int, CohomologyBasis]:
    return {i: C.complex.cohomology(i) for i in indices}


def bound_level(sigma: int, d: int, end_bound: float) -> int:
    """Smallest n >= 1 with n*sigma > end_bound - d."""
    if end_bound == -np.inf or end_bound < d:
        return 1
    return max(1, int((end_bound - d) // sigma) + 1)


def _start_level(M: GradedModule, d: int) -> int:
    # a bounded-below module vanishes below its first nonzero degree, so the
    # early levels only see zeros and would fake a stable run
    if not M.bounded_below:
        return 1
    nz = [e for e in M.degrees() if M.dim(e)]
    if not nz:
        return 1
    return max(1, -(-(nz[0] - d) // M.sigma))


def _is_iso(T: np.ndarray, src: CohomologyBasis, dst: CohomologyBasis, p: int) -> bool:
    if src.dim != dst.dim:
        return False
    if src.dim == 0:
        return True
    img = la.matmul(T, src.reps, p)
    return la.rank(np.hstack([dst.boundaries, img]), p) == dst.boundaries.shape[1] + src.dim


def stable_level(
    M: GradedModule,
    d: int,
    end_bound: float | None = None,
    run: int | None = None,
    indices=None,
    min_level: int = 1,
) -> StableLevel:
    """Find a level computing H^i_m(M)_d for i in ``indices`` (default all).

    Raises WindowTooSmall when the needed degrees leave the window.
    """
    w = M.w
    indices = list(range(w + 1)) if indices is None else sorted(indices)
    top = min(w, max(indices, default=0) + 1)
    if end_bound is not None:
        n = max(bound_level(M.sigma, d, end_bound), min_level)
        if not fits(M, d, n, top):
            raise WindowTooSmall(f"degree {d}: level {n} needs degrees above {M.hi}")
        C = cech_complex(M, d, n, top)
        return StableLevel(C, _bases(C, indices), "bound")

    run = DEFAULT_RUN if run is None else run
    n = max(_start_level(M, d), min_level)
    if not fits(M, d, n, top):
        raise WindowTooSmall(f"degree {d}: level {n} needs degrees above {M.hi}")
    C = cech_complex(M, d, n, top)
    B = _bases(C, indices)
    first, streak = (C, B), 0
    while streak < run:
        if not fits(M, d, n + 1, top):
            raise WindowTooSmall(
                f"degree {d}: no stable run of length {run} before leaving the window"
            )
        C2 = cech_complex(M, d, n + 1, top)
        B2 = _bases(C2, indices)
        ok = all(_is_iso(transition(M, d, n, i), B[i], B2[i], M.p) for i in indices)
        if ok:
            streak += 1
        else:
            streak = 0
            first = (C2, B2)
        C, B, n = C2, B2, n + 1
    return StableLevel(first[0], first[1], "run")


@dataclass
class LocalCohomology:
    """dim H^i_m(M)_d at certified degrees; other degrees are unknown."""

    w: int
    dims: dict[tuple[int, int], int]
    certified: list[int]
    uncertified: list[int] = field(default_factory=list)
    levels: dict[int, int] = field(default_factory=dict)
    mode: str = "run"

    def dim(self, i: int, d: int) -> int:
        if d not in self.certified:
            raise WindowTooSmall(f"degree {d} is not certified")
        return self.dims.get((i, d), 0)

    def nonzero(self) -> list[tuple[int, int, int]]:
        return sorted((i, d, n) for (i, d), n in self.dims.items() if n)

    def a_inv(self, i: int) -> float:
        """Top certified degree with H^i nonzero, or -inf."""
        ds = [d for (j, d), n in self.dims.items() if j == i and n]
        return max(ds) if ds else -np.inf

    def table(self) -> list[tuple[int, int, int]]:
        return [(i, d, self.dims.get((i, d), 0)) for i in range(self.w + 1) for d in self.certified]


def local_cohomology(
    M: GradedModule,
    degrees=None,
    end_bound: float | None = None,
    run: int | None = None,
    strict: bool = False,
) -> LocalCohomology:
    """Dimensions of H^i_m(M) degree by degree.

    Degrees that cannot be certified inside the window are listed in
    ``uncertified`` (or raise WindowTooSmall with ``strict``).
    """
    degrees = list(M.degrees()) if degrees is None else list(degrees)
    dims, cert, unc, levels = {}, [], [], {}
    for d in degrees:
        try:
            st = stable_level(M, d, end_bound=end_bound, run=run)
        except WindowTooSmall:
            if strict:
                raise
            unc.append(d)
            continue
        cert.append(d)
        levels[d] = st.level
        for i in range(M.w + 1):
            if st.dim(i):
                dims[(i, d)] = st.dim(i)
    mode = "bound" if end_bound is not None else "run"
    return LocalCohomology(M.w, dims, cert, unc, levels, mode)


@dataclass
class Localization:
    dim: int
    stage: int  # colimit realized as M_{d + stage*sigma*|S|}
    degree: int
    canonical: np.ndarray  # M_d -> colimit


def localize(M: GradedModule, S, d: int, run: int | None = None) -> Localization:
    """M[1/y_S]_d as the colimit of M_d -> M_{d+sigma|S|} -> ... along y_S.

    Accepted once the ladder maps have been isomorphisms for ``run``
    consecutive steps (default w + 2).
    """
    S = tuple(sorted(set(S)))
    run = M.w + 2 if run is None else run
    step = M.sigma * len(S)
    if step == 0:
        return Localization(M.dim(d), 0, d, la.eye(M.dim(d)))
    m, start, streak = 0, 0, 0
    while streak < run:
        e = d + m * step
        if not (M.known(e) and M.known(e + step)):
            raise WindowTooSmall(f"localization ladder at degree {d} leaves the window")
        A = _ys(M, S, e)
        if A.shape[0] == A.shape[1] and la.rank(A, M.p) == A.shape[0]:
            streak += 1
        else:
            streak, start = 0, m + 1
        m += 1
    can = la.eye(M.dim(d))
    for t in range(start):
        can = la.matmul(_ys(M, S, d + t * step), can, M.p)
    return Localization(M.dim(d + start * step), start, d + start * step, can)


# -- short exact sequences ------------------------------------------------

def _block_map(Msrc: GradedModule, Mdst: GradedModule, f: dict, e: int, count: int) -> np.ndarray:
    F = f.get(e)
    if F is None:
        F = la.zeros(Mdst.dim(e), Msrc.dim(e))
    return np.kron(la.eye(count), F)


def check_ses(A, B, C, f: dict, g: dict, degrees) -> list[str]:
    """Violations of exactness / linearity of 0 -> A -f-> B -g-> C -> 0 at ``degrees``."""
    out = []
    p, s = B.p, B.sigma
    for e in degrees:
        F = f.get(e, la.zeros(B.dim(e), A.dim(e)))
        G = g.get(e, la.zeros(C.dim(e), B.dim(e)))
        if F.shape != (B.dim(e), A.dim(e)) or G.shape != (C.dim(e), B.dim(e)):
            out.append(f"degree {e}: map shapes do not match the modules")
            continue
        if la.rank(F, p) != A.dim(e):
            out.append(f"degree {e}: A -> B not injective")
        if la.rank(G, p) != C.dim(e):
            out.append(f"degree {e}: B -> C not surjective")
        if np.any(la.matmul(G, F, p)):
            out.append(f"degree {e}: composite is nonzero")
        if B.dim(e) != A.dim(e) + C.dim(e):
            out.append(f"degree {e}: dimensions do not add up")
        if e + s in degrees:
            F2 = f.get(e + s, la.zeros(B.dim(e + s), A.dim(e + s)))
            G2 = g.get(e + s, la.zeros(C.dim(e + s), B.dim(e + s)))
            for k in range(B.w):
                if not np.array_equal(la.matmul(B.act(k, e), F, p), la.matmul(F2, A.act(k, e), p)):
                    out.append(f"degree {e}: A -> B does not commute with y{k + 1}")
                if not np.array_equal(la.matmul(C.act(k, e), G, p), la.matmul(G2, B.act(k, e), p)):
                    out.append(f"degree {e}: B -> C does not commute with y{k + 1}")
    return out


def snake_at_level(A, B, C, f, g, i: int, d: int, n: int,
                   src: CohomologyBasis | None = None,
                   dst: CohomologyBasis | None = None) -> tuple[np.ndarray, CohomologyBasis, CohomologyBasis]:
    """The connecting map H^i(K_n C)_d -> H^{i+1}(K_n A)_d."""
    p, s = B.p, B.sigma
    top = min(B.w, i + 2)
    KA = cech_complex(A, d, n, top)
    KB = cech_complex(B, d, n, top)
    KC = cech_complex(C, d, n, top)
    if src is None:
        src = KC.complex.cohomology(i)
    if dst is None:
        dst = KA.complex.cohomology(i + 1)
    if i + 1 > B.w:
        return la.zeros(0, src.dim), src, dst
    e_i, e_n = d + n * s * i, d + n * s * (i + 1)
    cnt_i, cnt_n = len(KB.subsets[i]), len(KB.subsets[i + 1])
    G = _block_map(B, C, g, e_i, cnt_i)
    F = _block_map(A, B, f, e_n, cnt_n)
    M = _snake(KB.complex.diff(i), F, G, src, dst, p)
    return M, src, dst


@dataclass
class ConnectingMap:
    matrices: dict[int, np.ndarray]  # internal degree -> matrix
    levels: dict[int, int]
    uncertified: list[int]


def connecting_map(A, B, C, f: dict, g: dict, i: int, degrees=None,
                   end_bound: float | None = None, run: int | None = None) -> ConnectingMap:
    """Snake-lemma map H^i_m(C) -> H^{i+1}_m(A) degree by degree.

    Rejects input that is not a short exact sequence of modules on the window.
    """
    bad = check_ses(A, B, C, f, g, list(B.degrees()))
    if bad:
        raise ValueError("not a short exact sequence: " + "; ".join(bad[:5]))
    degrees = list(B.degrees()) if degrees is None else list(degrees)
    mats, levels, unc = {}, {}, []
    for d in degrees:
        try:
            if end_bound is not None:
                n = bound_level(B.sigma, d, end_bound)
            else:
                nA = stable_level(A, d, run=run, indices=[i + 1]).level
                nC = stable_level(C, d, run=run, indices=[i]).level
                n = max(nA, nC)
            if not fits(B, d, n, min(B.w, i + 2)):
                raise WindowTooSmall(f"degree {d}")
            M, _, _ = snake_at_level(A, B, C, f, g, i, d, n)
        except WindowTooSmall:
            unc.append(d)
            continue
        mats[d] = M
        levels[d] = n
    return ConnectingMap(mats, levels, unc)


def induced_on_level(Msrc: GradedModule, Mdst: GradedModule, f: dict, i: int, d: int, n: int,
                     src: CohomologyBasis, dst: CohomologyBasis) -> np.ndarray:
    """Map H^i(K_n Msrc)_d -> H^i(K_n Mdst)_d induced by a module map f."""
    e = d + n * Msrc.sigma * i
    F = _block_map(Msrc, Mdst, f, e, len(subsets(Msrc.w, i)))
    return induced_map(F, src, dst)
