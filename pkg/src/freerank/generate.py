"""Seeded random instances: nonsplit filtrations, stratifications, bundles.

Filtrations are glued top-down from cyclic pieces Σ^e P_V.  A new piece C at
level j is attached to the submodule A spanned by all pieces of higher level
through an extension class: writing W's dual coordinates as (m_1..m_r,
ℓ_1..ℓ_c) with the ℓ_i cutting out V, the piece is presented by a generator
g with relations ℓ_i g = a_i, where (a_i) ∈ A_{e+σ}^c satisfies
ℓ_i a_j = ℓ_j a_i.  On the vector space A ⊕ P_V the action becomes

    y_k (a, μ) = (y_k a + Σ_i U[k, i] μ(m)·a_i,  ȳ_k μ),

where y_k = Σ_j V[k, j] m_j + Σ_i U[k, i] ℓ_i.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .filtration import FreeRankFiltration, JFreeSummand
from .kbundle import FiniteGroup, KAction, KBundle, PosetCovering
from .poset import (
    DuflotSplitting,
    EmbeddedAlgebra,
    PosetFiltration,
    RankedPoset,
    TopStratification,
    identity_embedding,
)
from .graded import (
    BoundedFactor,
    GradedModule,
    PWAlgebra,
    SubspaceV,
    algebra_from_table,
    make_module,
    monomials,
    poly_dim,
    pv_action,
)

# Hilbert functions of small bounded connected algebras: a point, exterior
# algebras on one or two classes, truncated polynomial algebras.
FACTOR_CATALOG = {
    2: [(1,), (1, 1), (1, 0, 1), (1, 1, 1), (1, 0, 0, 1), (1, 1, 1, 1), (1, 2, 1), (1, 1, 1, 1)],
    3: [(1,), (1, 1), (1, 0, 1), (1, 0, 1, 0), (1, 0, 0, 1), (1, 1, 1, 1), (1, 2, 1), (1, 1, 0, 1)],
}


def random_subspace(rng, w: int, r: int, p: int) -> SubspaceV:
    while True:
        A = rng.integers(0, p, size=(w, r))
        if la.rank(A, p) == r:
            return SubspaceV(A, p)


def random_factor(rng, p: int, max_top: int = 3) -> BoundedFactor:
    cands = [c for c in FACTOR_CATALOG[2 if p == 2 else 3] if len(c) - 1 <= max_top]
    dims = list(cands[rng.integers(len(cands))])
    while dims[-1] == 0:
        dims.pop()
    return BoundedFactor(tuple(dims))


@dataclass
class Piece:
    V: SubspaceV
    e: int
    level: int
    nonsplit: bool = False


@dataclass
class Builder:
    """Incrementally glued module on the window [lo, hi]."""

    alg: PWAlgebra
    lo: int
    hi: int
    pieces: list[Piece] = field(default_factory=list)
    # acts[k][f] is the full action matrix from degree f to f + sigma
    acts: list[dict] = field(default_factory=list)

    def __post_init__(self):
        self.acts = [dict() for _ in range(self.alg.w)]

    def piece_dim(self, q: Piece, f: int) -> int:
        return poly_dim(q.V.rank, f - q.e, self.alg.sigma)

    def dim(self, f: int, upto: int | None = None) -> int:
        ps = self.pieces if upto is None else self.pieces[:upto]
        return sum(self.piece_dim(q, f) for q in ps)

    def offset(self, idx: int, f: int) -> int:
        return sum(self.piece_dim(q, f) for q in self.pieces[:idx])

    def module(self, upto: int | None = None) -> GradedModule:
        s = self.alg.sigma
        n = len(self.pieces) if upto is None else upto

        def action(k, f):
            A = self.acts[k].get(f)
            m0, m1 = self.dim(f, n), self.dim(f + s, n)
            if A is None:
                return la.zeros(m1, m0)
            return A[:m1, :m0]

        return make_module(
            self.alg, self.lo, self.hi,
            {f: self.dim(f, n) for f in range(self.lo, self.hi + 1)}, action,
            bounded_below=self.lo <= min([q.e for q in self.pieces[:n]], default=self.lo),
            bounded_above=all(q.V.rank == 0 for q in self.pieces[:n]),
        )

    def add(self, V: SubspaceV, e: int, level: int, cocycle: list | None, Binv, U):
        """Append Σ^e P_V, glued by ``cocycle[i][e + sigma]`` (vectors in the current module)."""
        alg, s, p, w = self.alg, self.alg.sigma, self.alg.p, self.alg.w
        A = self.module() if cocycle is not None else None
        r = V.rank
        q = Piece(V, e, level, nonsplit=False)
        old = len(self.pieces)
        self.pieces.append(q)
        # images mu(m)·a_i in the old module, by degree of mu
        glue = {}
        if cocycle is not None:
            mforms = [Binv[j] for j in range(r)]
            for i, a in enumerate(cocycle):
                cache = {(0,) * r: a}
                for t in range(1, (self.hi - e) // s + 1):
                    for mu in monomials(r, t):
                        j = next(j for j in range(r) if mu[j])
                        prev = list(mu)
                        prev[j] -= 1
                        prev = tuple(prev)
                        src_deg = e + s + s * (t - 1)
                        if src_deg + s > self.hi:
                            continue
                        cache[mu] = la.matmul(A.act_form(mforms[j], src_deg),
                                              cache[prev].reshape(-1, 1), p)[:, 0]
                glue[i] = cache
        for k in range(w):
            for f in range(self.lo, self.hi - s + 1):
                m0, m1 = self.dim(f), self.dim(f + s)
                o0, o1 = self.dim(f, old), self.dim(f + s, old)
                out = la.zeros(m1, m0)
                prev = self.acts[k].get(f)
                if prev is not None:
                    out[:o1, :o0] = prev[:o1, :o0]
                c0, c1 = self.piece_dim(q, f), self.piece_dim(q, f + s)
                if c0 and c1:
                    out[o1:, o0:] = pv_action(V, k, f - e, s)
                if c0 and cocycle is not None and o1:
                    for col, mu in enumerate(monomials(r, (f - e) // s)):
                        v = la.zeros(o1, 1)[:, 0]
                        for i in range(len(cocycle)):
                            coef = int(U[k, i]) % p
                            if coef and mu in glue[i]:
                                v = (v + coef * glue[i][mu]) % p
                        out[:o1, o0 + col] = v
                self.acts[k][f] = out
        return q


def cocycle_space(A: GradedModule, forms: np.ndarray, e: int):
    """Solutions (a_i) in A_{e+σ}^c of ℓ_i a_j = ℓ_j a_i, as columns of stacked vectors."""
    s, p = A.sigma, A.p
    c = forms.shape[0]
    n1 = A.dim(e + s)
    if c == 0 or n1 == 0:
        return la.zeros(c * n1, 0)
    n2 = A.dim(e + 2 * s) if A.known(e + 2 * s) else None
    if n2 is None:
        return None
    rows = []
    for i in range(c):
        for j in range(i + 1, c):
            blk = la.zeros(n2, c * n1)
            blk[:, j * n1:(j + 1) * n1] = A.act_form(forms[i], e + s)
            blk[:, i * n1:(i + 1) * n1] = (-A.act_form(forms[j], e + s)) % p
            rows.append(blk)
    if not rows:
        return la.eye(c * n1)
    return la.nullspace(np.vstack(rows), p)


def coboundaries(A: GradedModule, forms: np.ndarray, e: int) -> np.ndarray:
    s = A.sigma
    c = forms.shape[0]
    if A.dim(e) == 0 or c == 0:
        return la.zeros(c * A.dim(e + s), 0)
    return np.vstack([A.act_form(forms[i], e) for i in range(c)])


def _basis_with(V: SubspaceV, rng, p: int):
    """B = [V | U] invertible, and B^{-1}."""
    w, r = V.w, V.rank
    U = la.extend_basis(V.matrix, w, p)
    if r < w and rng is not None:
        # random complement keeps instances from being coordinate-aligned
        while True:
            cand = rng.integers(0, p, size=(w, w - r))
            if la.rank(np.hstack([V.matrix, cand]), p) == w:
                U = cand % p
                break
    B = np.hstack([V.matrix, U]) if r < w else V.matrix.copy()
    return U, la.inverse(B, p)


@dataclass
class SummandSpec:
    V: SubspaceV
    shift: int
    factor: BoundedFactor
    level: int


def glue_filtration(alg: PWAlgebra, specs: list[SummandSpec], lo: int, hi: int, rng,
                    glue: bool = True) -> tuple[FreeRankFiltration, list[Piece]]:
    """Assemble L from summand specs (any order), gluing each onto higher levels."""
    s, p = alg.sigma, alg.p
    specs = sorted(specs, key=lambda t: -t.level)
    b = Builder(alg, lo, hi)
    owner = []  # summand index for each piece
    level_start = {}
    for si, sp in enumerate(specs):
        if sp.level not in level_start:
            level_start[sp.level] = len(b.pieces)
        A_count = level_start[sp.level]
        U, Binv = _basis_with(sp.V, rng, p)
        forms = Binv[sp.V.rank:]
        for k in range(sp.factor.top + 1):
            for _ in range(sp.factor.dim(k)):
                e = sp.shift + k
                cocycle = None
                nonsplit = False
                if glue and A_count and forms.shape[0]:
                    A = b.module(A_count)
                    Z = cocycle_space(A, forms, e)
                    if Z is not None and Z.shape[1]:
                        coef = rng.integers(0, p, Z.shape[1])
                        z = la.matmul(Z, coef.reshape(-1, 1), p)[:, 0]
                        n1 = A.dim(e + s)
                        cocycle = [z[i * n1:(i + 1) * n1] for i in range(forms.shape[0])]
                        Bd = coboundaries(A, forms, e)
                        nonsplit = bool(np.any(z)) and not la.in_span(Bd, z, p)
                        # pad the vectors to the full current module (pieces of this level come after A)
                        full = b.dim(e + s)
                        cocycle = [np.concatenate([v, la.zeros(full - n1, 1)[:, 0]]) for v in cocycle]
                q = b.add(sp.V, e, sp.level, cocycle, Binv, U)
                q.nonsplit = nonsplit
                owner.append(si)
    L = b.module()
    degs = range(lo, hi + 1)
    levels_present = sorted({sp.level for sp in specs})
    top = (max(levels_present) + 1) if levels_present else 1
    levels = []
    for j in range(top + 1):
        lev = {}
        for f in degs:
            cols = []
            for qi, q in enumerate(b.pieces):
                if q.level >= j:
                    off = b.offset(qi, f)
                    cols.extend(range(off, off + b.piece_dim(q, f)))
            lev[f] = la.eye(L.dim(f))[:, cols]
        levels.append(lev)
    summands = [[] for _ in range(top)]
    for si, sp in enumerate(specs):
        iso = {}
        for f in degs:
            cols = []
            for qi, q in enumerate(b.pieces):
                if owner[qi] == si:
                    off = b.offset(qi, f)
                    cols.extend(range(off, off + b.piece_dim(q, f)))
            iso[f] = la.eye(L.dim(f))[:, cols]
        summands[sp.level].append(JFreeSummand(sp.V, sp.shift, sp.factor, iso))
    return FreeRankFiltration(L, levels, summands), b.pieces


def window_for(alg: PWAlgebra, specs: list[SummandSpec], degrees, run: int = 2) -> int:
    """An upper window degree letting both the Duflot complex and the oracle
    certify every degree in ``degrees``."""
    s, w = alg.sigma, max(alg.w, 1)
    E = max((sp.shift + sp.factor.top - s * sp.level for sp in specs), default=0)
    lo = min((sp.shift for sp in specs), default=0)
    need = lo
    for d in degrees:
        n = max(1, (E - d) // s + 1) if E >= d else 1
        n0 = max(1, -(-(lo - d) // s))
        need = max(need, d + (max(n, n0) + run) * s * w)
    return need


def top_dim(alg: PWAlgebra, specs: list[SummandSpec], hi: int) -> int:
    return sum(
        sp.factor.dim(k) * poly_dim(sp.V.rank, hi - sp.shift - k, alg.sigma)
        for sp in specs for k in range(sp.factor.top + 1)
    )


@dataclass
class FiltrationInstance:
    seed: int
    frf: FreeRankFiltration
    pieces: list[Piece]
    degrees: list[int]

    @property
    def nonsplit(self) -> bool:
        return any(q.nonsplit for q in self.pieces)


def random_specs(rng, alg: PWAlgebra, max_levels: int, max_shift: int, max_top: int,
                 max_per_level: int) -> list[SummandSpec]:
    p, w = alg.p, alg.w
    nlev = min(max_levels, w + 1, int(rng.integers(1, max_levels + 1)))
    ranks = sorted(int(j) for j in rng.choice(np.arange(w + 1), size=nlev, replace=False))
    specs = []
    for j in ranks:
        for _ in range(int(rng.integers(1, max_per_level + 1))):
            V = random_subspace(rng, w, j, p)
            specs.append(SummandSpec(V, int(rng.integers(0, max_shift + 1)),
                                     random_factor(rng, p, max_top), j))
    return specs


def random_filtration(seed: int, p: int | None = None, w: int | None = None,
                      max_levels: int = 3, max_shift: int = 4, max_top: int = 3,
                      max_per_level: int = 2, qlo: int = -2, hi: int | None = None,
                      glue: bool = True, budget: int = 400) -> FiltrationInstance:
    """A seeded free rank filtration with w <= 3, glued nonsplit where possible.

    Summand data are redrawn (deterministically) until the module's top
    window degree has dimension at most ``budget``.  ``degrees`` lists the
    internal degrees worth comparing: from ``qlo`` to one past the largest
    end degree.
    """
    rng = np.random.default_rng(seed)
    p = int(rng.choice([2, 3])) if p is None else p
    w = int(rng.integers(1, 4)) if w is None else w
    alg = PWAlgebra(p, w)
    for _ in range(100):
        specs = random_specs(rng, alg, max_levels, max_shift, max_top, max_per_level)
        top_end = max(sp.shift + sp.factor.top for sp in specs)
        degrees = list(range(qlo, top_end + 2))
        h = window_for(alg, specs, degrees) if hi is None else hi
        if top_dim(alg, specs, h) <= budget:
            break
    else:
        raise RuntimeError("could not draw an instance within the size budget")
    frf, pieces = glue_filtration(alg, specs, 0, h, rng, glue=glue)
    return FiltrationInstance(seed, frf, pieces, degrees)


# -- stratifications: face rings of simplicial complexes -------------------
#
# For a simplicial complex Δ on the vertices of W, R = F_p[Δ] ⊗ N is
# stratified by the faces: the stratum of a face A is the face ring of its
# star, pushed into R by multiplication with x_A (codimension σ|A|) and
# restricted by killing the monomials whose support leaves the star.  The
# Euler class is x_A, a nonzerodivisor on the star, and the star's ring
# splits as P_{V_A} ⊗ F_p[link A] with V_A spanned by the vertices of A.

def small_algebra(kind: tuple, p: int):
    """Labelled basis, product and Hilbert function of a bounded algebra.

    kinds: ("point",), ("trunc", deg, k) for F_p[u]/u^k, ("ext", deg) for
    an exterior algebra on one class.
    """
    if kind[0] == "point":
        return {0: [("1", 0)]}, (lambda a, b: {("1", 0): 1}), BoundedFactor((1,))
    if kind[0] == "trunc":
        _, deg, k = kind
        if p != 2 and deg % 2:
            raise ValueError("odd-degree classes square to zero for odd p")
        basis = {deg * i: [("u", i)] for i in range(k)}

        def product(a, b):
            i = a[1] + b[1]
            return {("u", i): 1} if i < k else {}

        return basis, product, BoundedFactor.from_dims({deg * i: 1 for i in range(k)})
    if kind[0] == "ext":
        _, deg = kind
        basis = {0: [("u", 0)], deg: [("u", 1)]}

        def product(a, b):
            i = a[1] + b[1]
            return {("u", i): 1} if i < 2 else {}

        return basis, product, BoundedFactor.from_dims({0: 1, deg: 1})
    raise ValueError(f"unknown algebra kind {kind!r}")


def _support(m) -> frozenset:
    return frozenset(i for i, a in enumerate(m) if a)


def face_ring_basis(alg: PWAlgebra, faces: set, N_basis: dict, lo: int, hi: int) -> dict:
    s, w = alg.sigma, alg.w
    basis = {}
    for d in range(lo, hi + 1):
        labels = []
        for nd, nb in sorted(N_basis.items()):
            t = d - nd
            if t < 0 or t % s:
                continue
            for m in monomials(w, t // s):
                if _support(m) in faces:
                    labels.extend((m, u) for u in nb)
        basis[d] = labels
    return basis


def face_ring(alg: PWAlgebra, faces: set, N_basis: dict, N_product, lo: int, hi: int,
              change: np.ndarray | None = None):
    """F_p[Δ] ⊗ N with y_k acting as Σ_i change[i, k] x_i; returns (algebra, basis labels)."""
    p, w = alg.p, alg.w
    basis = face_ring_basis(alg, faces, N_basis, lo, hi)
    unit_n = N_basis[0][0]

    def product(x, y):
        (m1, u1), (m2, u2) = x, y
        m = tuple(a + b for a, b in zip(m1, m2))
        if _support(m) not in faces:
            return {}
        return {(m, u): c for u, c in N_product(u1, u2).items()}

    C = np.eye(w, dtype=np.int64) if change is None else la.mat(change, p)
    gens = []
    for k in range(w):
        g = {}
        for i in range(w):
            if C[i, k] and frozenset([i]) in faces:
                e = [0] * w
                e[i] = 1
                g[(tuple(e), unit_n)] = int(C[i, k])
        gens.append(g)
    R = algebra_from_table(alg, lo, hi, basis, product, gens, bounded_below=lo <= 0)
    return R, basis


def _relabel_matrix(src: list, dst: list, fn, p: int) -> np.ndarray:
    """Matrix sending label u of ``src`` to fn(u) (a label of ``dst`` or None)."""
    index = {u: i for i, u in enumerate(dst)}
    out = la.zeros(len(dst), len(src))
    for c, u in enumerate(src):
        v = fn(u)
        if v is not None and v in index:
            out[index[v], c] = 1
    return out


def face_name(A) -> str:
    return "[" + ",".join(str(i + 1) for i in sorted(A)) + "]"


def star(faces: set, A: frozenset) -> set:
    return {B for B in faces if (B | A) in faces}


def _subfaces(A):
    A = sorted(A)
    for r in range(len(A)):
        yield from itertools.combinations(A, r)


def face_ring_stratification(alg: PWAlgebra, faces, small: tuple, lo: int, hi: int,
                             change: np.ndarray | None = None) -> TopStratification:
    """The stratification of F_p[Δ] ⊗ N by the faces of Δ."""
    p, s, w = alg.p, alg.sigma, alg.w
    faces = {frozenset(A) for A in faces}
    if frozenset() not in faces or any(frozenset(B) not in faces for A in faces for B in _subfaces(A)):
        raise ValueError("faces must form a simplicial complex containing the empty face")
    N_basis, N_product, factor = small_algebra(small, p)
    unit_n = N_basis[0][0]
    C = np.eye(w, dtype=np.int64) if change is None else la.mat(change, p)
    R, Rb = face_ring(alg, faces, N_basis, N_product, lo, hi, C)
    order = sorted(faces, key=lambda A: (len(A), sorted(A)))
    rings = {A: face_ring(alg, star(faces, A), N_basis, N_product, lo, hi, C) for A in order}

    def shift_by(B):
        def fn(lab):
            m, u = lab
            return (tuple(a + (1 if i in B else 0) for i, a in enumerate(m)), u)
        return fn

    def same(lab):
        return lab

    strata, nesting, splittings = {}, {}, {}
    for A in order:
        T, Tb = rings[A]
        d = s * len(A)
        push = {e: _relabel_matrix(Tb.get(e - d, []), Rb[e], shift_by(A), p) for e in range(lo, hi + 1)}
        restrict = {e: _relabel_matrix(Rb[e], Tb[e], same, p) for e in range(lo, hi + 1)}
        strata[face_name(A)] = EmbeddedAlgebra(T, d, push, restrict)
        cols = sorted(A)
        V = SubspaceV(C[cols, :].T.copy() if cols else la.zeros(w, 0), p)
        idx = {u: i for i, u in enumerate(Tb.get(s, []))}
        gens = la.zeros(T.module.dim(s), len(cols))
        for c, i in enumerate(cols):
            e_i = tuple(1 if k == i else 0 for k in range(w))
            gens[idx[(e_i, unit_n)], c] = 1
        lifts = {}
        for k in range(factor.top + 1):
            pos = {u: i for i, u in enumerate(Tb.get(k, []))}
            M = la.zeros(len(pos), factor.dim(k))
            for c, u in enumerate(N_basis.get(k, [])):
                M[pos[((0,) * w, u)], c] = 1
            lifts[k] = M
        splittings[face_name(A)] = DuflotSplitting(V, factor, gens, lifts)
    for A in order:
        for B in order:
            if B < A:
                TA, TAb = rings[A]
                _, TBb = rings[B]
                d = s * len(A - B)
                push = {e: _relabel_matrix(TAb.get(e - d, []), TBb[e], shift_by(A - B), p)
                        for e in range(lo, hi + 1)}
                restrict = {e: _relabel_matrix(TBb[e], TAb[e], same, p) for e in range(lo, hi + 1)}
                nesting[(face_name(A), face_name(B))] = EmbeddedAlgebra(TA, d, push, restrict)
    elements = [face_name(A) for A in order]
    covers = [(face_name(A), face_name(A - {i})) for A in order for i in sorted(A)]
    poset = RankedPoset(elements, covers, {face_name(A): len(A) for A in order})
    return TopStratification(R, poset, strata, nesting, splittings)


def random_complex(rng, w: int) -> set:
    faces = {frozenset(), *(frozenset([i]) for i in range(w))}
    edges = [frozenset(e) for e in itertools.combinations(range(w), 2) if rng.random() < 0.6]
    faces |= set(edges)
    if w == 3 and len(edges) == 3 and rng.random() < 0.5:
        faces.add(frozenset(range(3)))
    return faces


def random_invertible(rng, w: int, p: int) -> np.ndarray:
    while True:
        C = rng.integers(0, p, size=(w, w))
        if la.rank(C, p) == w:
            return C % p


SMALL_ALGEBRAS = {
    2: [("point",), ("trunc", 1, 2), ("trunc", 1, 3), ("ext", 2), ("trunc", 2, 2)],
    3: [("point",), ("ext", 1), ("ext", 3), ("trunc", 2, 2), ("ext", 2)],
}


@dataclass
class StratificationInstance:
    seed: int
    strat: TopStratification
    degrees: list[int]
    faces: set
    small: tuple
    change: np.ndarray


def _strat_specs(alg: PWAlgebra, faces, factor: BoundedFactor, C: np.ndarray) -> list[SummandSpec]:
    specs = []
    for A in faces:
        cols = sorted(A)
        V = SubspaceV(C[cols, :].T.copy() if cols else la.zeros(alg.w, 0), alg.p)
        specs.append(SummandSpec(V, alg.sigma * len(A), factor, len(A)))
    return specs


def random_stratification(seed: int, p: int | None = None, w: int | None = None,
                          qlo: int = -2, budget: int = 100) -> StratificationInstance:
    """A seeded Duflot stratification of a face ring tensored with a small algebra."""
    rng = np.random.default_rng(seed)
    p = int(rng.choice([2, 3])) if p is None else p
    w = int(rng.integers(1, 4)) if w is None else w
    alg = PWAlgebra(p, w)
    for _ in range(100):
        faces = random_complex(rng, w)
        small = SMALL_ALGEBRAS[p][int(rng.integers(len(SMALL_ALGEBRAS[p])))]
        C = random_invertible(rng, w, p) if rng.random() < 0.7 else np.eye(w, dtype=np.int64)
        factor = small_algebra(small, p)[2]
        specs = _strat_specs(alg, faces, factor, C)
        top_end = max(sp.shift + sp.factor.top for sp in specs)
        degrees = list(range(qlo, top_end + 2))
        hi = window_for(alg, specs, degrees)
        if top_dim(alg, specs, hi) <= budget:
            break
    else:
        raise RuntimeError("could not draw a stratification within the size budget")
    TS = face_ring_stratification(alg, faces, small, 0, hi, C)
    return StratificationInstance(seed, TS, degrees, faces, small, C)


def socle_stratification(p: int = 2, hi: int = 12) -> TopStratification:
    """R = F_p[y, s]/(ys, s^2) with |s| = σ, stratified by R > T = F_p[y].

    The class s is killed by the maximal ideal, so R has depth 0, while the
    rank-1 stratum restricts it to zero.
    """
    alg = PWAlgebra(p, 1)
    s = alg.sigma
    basis = {d: [] for d in range(0, hi + 1)}
    for d in range(0, hi + 1, s):
        basis[d].append(("y", d // s))
    basis[s].append(("s", 1))

    def product(a, b):
        if a[0] == "y" and b[0] == "y":
            return {("y", a[1] + b[1]): 1}
        if a == ("y", 0):
            return {b: 1}
        if b == ("y", 0):
            return {a: 1}
        return {}

    R = algebra_from_table(alg, 0, hi, basis, product, [{("y", 1): 1}], bounded_below=True)
    tb = {d: ([("y", d // s)] if d % s == 0 else []) for d in range(0, hi + 1)}
    T = algebra_from_table(alg, 0, hi, tb, lambda a, b: {("y", a[1] + b[1]): 1},
                           [{("y", 1): 1}], bounded_below=True)
    push = {e: _relabel_matrix(tb.get(e - s, []), basis[e], lambda u: ("y", u[1] + 1), p)
            for e in range(0, hi + 1)}
    restrict = {e: _relabel_matrix(basis[e], tb[e], lambda u: u if u[0] == "y" else None, p)
                for e in range(0, hi + 1)}
    embT = EmbeddedAlgebra(T, s, push, restrict)
    poset = RankedPoset(["R", "T"], [("T", "R")], {"R": 0, "T": 1})
    one = la.eye(1)
    lifts_R = {k: la.zeros(len(basis.get(k, [])), 0) for k in range(s + 1)}
    lifts_R[0] = one.copy()
    sv = la.zeros(len(basis[s]), 1)
    sv[basis[s].index(("s", 1)), 0] = 1
    lifts_R[s] = sv
    splittings = {
        "R": DuflotSplitting(SubspaceV.zero(1, p), BoundedFactor.from_dims({0: 1, s: 1}),
                             la.zeros(len(basis[s]), 0), lifts_R),
        "T": DuflotSplitting(SubspaceV.full(1, p), BoundedFactor.point(), one.copy(), {0: one.copy()}),
    }
    return TopStratification(R, poset, {"R": identity_embedding(R), "T": embT},
                             {("T", "R"): embT}, splittings)


# -- K-bundles: voltage lifts of two-level posets --------------------------
#
# Q has top elements (corank b) and bottom elements (corank b+1); each top
# piece is glued onto the bottom pieces below it.  The m-sheeted lift P has
# elements (x, i), i ∈ ℤ/m, with (u, i) < (v, i + t(u, v)) for a voltage t
# on the covers of Q.  L repeats the pieces of N once per sheet and glues
# sheet i of v onto sheet i - t(u, v) of u with the same extension class,
# so that shifting sheets is a module automorphism and K = ℤ/m acts freely.

@dataclass
class BundleInstance:
    seed: int
    bundle: KBundle
    degrees: list[int]
    nonsplit: bool
    voltage: dict


def sheet_name(x: str, i: int) -> str:
    return f"{x}.{i}"


def voltage_bundle(alg: PWAlgebra, top: list[str], bottom: list[str], covers: list[tuple[str, str]],
                   voltage: dict, m: int, specs: dict[str, SummandSpec], lo: int, hi: int,
                   rng, unit_glue: bool = False) -> tuple[KBundle, bool]:
    """The bundle of the m-sheeted voltage lift; ``covers`` are (bottom, top) pairs.

    Extension classes are random cocycles, or the sum of the cocycle basis
    with ``unit_glue``.
    """
    s, p = alg.sigma, alg.p
    below = {v: [u for u, v2 in covers if v2 == v] for v in top}
    # N-side pieces: (x, k) for each factor basis element
    shapes = {x: [sp.shift + k for k in range(sp.factor.top + 1) for _ in range(sp.factor.dim(k))]
              for x, sp in specs.items()}
    bases = {x: _basis_with(specs[x].V, rng, p) for x in top}
    glue = {}  # (v, piece) -> stacked cocycle in the bottom pieces below v, or None
    nonsplit = False
    for v in top:
        sp = specs[v]
        forms = bases[v][1][sp.V.rank:]
        A_b = Builder(alg, lo, hi)
        for u in below[v]:
            for e in shapes[u]:
                A_b.add(specs[u].V, e, specs[u].level, None, None, None)
        A = A_b.module()
        for k, e in enumerate(shapes[v]):
            glue[(v, k)] = None
            if not below[v] or not forms.shape[0]:
                continue
            Z = cocycle_space(A, forms, e)
            if Z is None or not Z.shape[1]:
                continue
            coef = np.ones((Z.shape[1], 1), dtype=np.int64) if unit_glue else rng.integers(0, p, (Z.shape[1], 1))
            z = la.matmul(Z, coef, p)[:, 0]
            n1 = A.dim(e + s)
            nonsplit |= bool(np.any(z)) and not la.in_span(coboundaries(A, forms, e), z, p)
            # split each a_i into blocks, one per bottom piece in A
            blocks = []
            for i in range(forms.shape[0]):
                a = z[i * n1:(i + 1) * n1]
                blocks.append([a[A_b.offset(qi, e + s):A_b.offset(qi, e + s) + A_b.piece_dim(q, e + s)]
                               for qi, q in enumerate(A_b.pieces)])
            glue[(v, k)] = blocks

    def build(sheets: int):
        b = Builder(alg, lo, hi)
        where = {}  # (x, sheet, k) -> piece index
        for u in bottom:
            for i in range(sheets):
                for k, e in enumerate(shapes[u]):
                    where[(u, i, k)] = len(b.pieces)
                    b.add(specs[u].V, e, specs[u].level, None, None, None)
        for v in top:
            U, Binv = bases[v]
            for i in range(sheets):
                for k, e in enumerate(shapes[v]):
                    blocks = glue[(v, k)]
                    cocycle = None
                    if blocks is not None:
                        full = b.dim(e + s)
                        cocycle = []
                        for blk in blocks:
                            vec = la.zeros(full, 1)[:, 0]
                            qi = 0
                            for u in below[v]:
                                src = (i - voltage[(u, v)]) % sheets
                                for ku in range(len(shapes[u])):
                                    g = where[(u, src, ku)]
                                    off = b.offset(g, e + s)
                                    vec[off:off + len(blk[qi])] = blk[qi]
                                    qi += 1
                            cocycle.append(vec)
                    where[(v, i, k)] = len(b.pieces)
                    b.add(specs[v].V, e, specs[v].level, cocycle, Binv, U)
        return b, where

    bN, wN = build(1)
    bL, wL = build(m)
    N, L = bN.module(), bL.module()
    degs = list(range(lo, hi + 1))

    def cols(b, pcs, f):
        out = []
        for qi in pcs:
            off = b.offset(qi, f)
            out.extend(range(off, off + b.piece_dim(b.pieces[qi], f)))
        return out

    def pieces_of(where, x, i):
        return [where[(x, i, k)] for k in range(len(shapes[x]))]

    def region(where, x, i, sheets):
        """Pieces of F((x, i)): its own and those of the sheets below it."""
        out = pieces_of(where, x, i)
        if x in top:
            for u in below[x]:
                out += pieces_of(where, u, (i - voltage[(u, x)]) % sheets)
        return out

    Q_el = top + bottom
    corank = {x: specs[x].level for x in Q_el}
    Q = RankedPoset(Q_el, [(u, v) for u, v in covers], corank)
    P_el = [sheet_name(x, i) for x in Q_el for i in range(m)]
    P = RankedPoset(P_el, [(sheet_name(u, (i - voltage[(u, v)]) % m), sheet_name(v, i))
                           for u, v in covers for i in range(m)],
                    {sheet_name(x, i): corank[x] for x in Q_el for i in range(m)})
    pi = {sheet_name(x, i): x for x in Q_el for i in range(m)}

    def basis_cols(b, M, pcs, f):
        return la.eye(M.dim(f))[:, cols(b, pcs, f)]

    N_pf = PosetFiltration(Q, N, {x: {f: basis_cols(bN, N, region(wN, x, 0, 1), f) for f in degs} for x in Q_el})
    L_pf = PosetFiltration(P, L, {sheet_name(x, i): {f: basis_cols(bL, L, region(wL, x, i, m), f) for f in degs}
                                  for x in Q_el for i in range(m)})

    def shift_matrix(k: int, f: int) -> np.ndarray:
        """Sheet i -> sheet i - k on L."""
        S = la.zeros(L.dim(f), L.dim(f))
        for (x, i, kk), g in wL.items():
            h = wL[(x, (i - k) % m, kk)]
            o1, o2 = bL.offset(g, f), bL.offset(h, f)
            for c in range(bL.piece_dim(bL.pieces[g], f)):
                S[o2 + c, o1 + c] = 1
        return S

    S = {(k, f): shift_matrix(k, f) for k in range(m) for f in degs}
    perms = [{sheet_name(x, i): sheet_name(x, (i + k) % m) for x in Q_el for i in range(m)} for k in range(m)]
    maps = {(k, X): {f: la.matmul(S[(k, f)], L_pf.basis(perms[k][X], f), p) for f in degs}
            for k in range(m) for X in P_el}
    action = KAction(FiniteGroup.cyclic(m), perms, maps)

    def embed(x, i, f):
        """N columns of F(x) -> the matching L columns of sheet region (x, i)."""
        E = la.zeros(L.dim(f), N.dim(f))
        for key, g in wN.items():
            y, _, kk = key
            if y == x:
                h = wL[(x, i, kk)]
            elif x in top and y in below[x]:
                h = wL[(y, (i - voltage[(y, x)]) % m, kk)]
            else:
                continue
            o1, o2 = bN.offset(g, f), bL.offset(h, f)
            for c in range(bN.piece_dim(bN.pieces[g], f)):
                E[o2 + c, o1 + c] = 1
        return E

    eta = {sheet_name(x, i): {f: la.matmul(embed(x, i, f), N_pf.basis(x, f), p) for f in degs}
           for x in Q_el for i in range(m)}

    def frf(b, where, M, sheets):
        levels_present = sorted({specs[x].level for x in Q_el})
        top_lvl = max(levels_present) + 1
        levels = []
        for j in range(top_lvl + 1):
            keep = [g for (x, _, _), g in where.items() if specs[x].level >= j]
            levels.append({f: basis_cols(b, M, sorted(keep), f) for f in degs})
        summands = [[] for _ in range(top_lvl)]
        for x in Q_el:
            sp = specs[x]
            for i in range(sheets):
                iso = {f: basis_cols(b, M, pieces_of(where, x, i), f) for f in degs}
                summands[sp.level].append(JFreeSummand(sp.V, sp.shift, sp.factor, iso))
        return FreeRankFiltration(M, levels, summands)

    bundle = KBundle(PosetCovering(P, Q, pi), N_pf, L_pf, eta, action, frf(bN, wN, N, 1), frf(bL, wL, L, m))
    return bundle, nonsplit


def random_bundle(seed: int, m: int | None = None, p: int | None = None, w: int | None = None,
                  qlo: int = -3, budget: int = 60) -> BundleInstance:
    """A seeded ℤ/m-bundle over a random two-level poset."""
    rng = np.random.default_rng(seed)
    m = int(rng.choice([2, 3])) if m is None else m
    p = (m if rng.random() < 0.8 else int(rng.choice([2, 3]))) if p is None else p
    w = int(rng.integers(1, 3)) if w is None else w
    alg = PWAlgebra(p, w)
    for _ in range(100):
        b = int(rng.integers(0, w))
        nb, nt = int(rng.integers(1, 4)), int(rng.integers(1, 3))
        bottom = [f"u{i + 1}" for i in range(nb)]
        top = [f"v{i + 1}" for i in range(nt)]
        covers, voltage = [], {}
        for v in top:
            under = [u for u in bottom if rng.random() < 0.85] or [bottom[int(rng.integers(nb))]]
            for u in under:
                covers.append((u, v))
                voltage[(u, v)] = int(rng.integers(0, m))
        # tight instances put the bottom pieces one step above the top ones,
        # where the extension classes cannot be coboundaries
        tight = rng.random() < 0.6
        specs = {}
        base = int(rng.integers(0, 2))
        for v in top:
            specs[v] = SummandSpec(random_subspace(rng, w, b, p), base if tight else int(rng.integers(0, 3)),
                                   random_factor(rng, p, 1), b)
        for u in bottom:
            specs[u] = SummandSpec(random_subspace(rng, w, b + 1, p),
                                   base + alg.sigma if tight else int(rng.integers(0, 3)),
                                   random_factor(rng, p, 1), b + 1)
        sl = list(specs.values())
        degrees = list(range(qlo, max(sp.shift + sp.factor.top for sp in sl) + 2))
        hi = window_for(alg, sl, degrees)
        if m * top_dim(alg, sl, hi) <= budget:
            break
    else:
        raise RuntimeError("could not draw a bundle within the size budget")
    unit = bool(rng.random() < 0.5)
    bundle, nonsplit = voltage_bundle(alg, top, bottom, covers, voltage, m, specs, 0, hi, rng, unit_glue=unit)
    return BundleInstance(seed, bundle, degrees, nonsplit, voltage)


def circle_bundle(p: int = 2, m: int = 2, hi: int | None = None, seed: int = 0) -> BundleInstance:
    """The connected m-sheeted cover of the 4-cycle u1, u2 < v1, v2.

    Points on top are glued by y g = u1 + u2 onto Σ^σ P_W pieces below, so
    in degree 0 the Duflot differential is the incidence matrix of a
    4m-cycle and, for p = m, H(DL) is not K-free.
    """
    rng = np.random.default_rng(seed)
    alg = PWAlgebra(p, 1)
    specs = {
        "u1": SummandSpec(SubspaceV.full(1, p), alg.sigma, BoundedFactor.point(), 1),
        "u2": SummandSpec(SubspaceV.full(1, p), alg.sigma, BoundedFactor.point(), 1),
        "v1": SummandSpec(SubspaceV.zero(1, p), 0, BoundedFactor.point(), 0),
        "v2": SummandSpec(SubspaceV.zero(1, p), 0, BoundedFactor.point(), 0),
    }
    covers = [("u1", "v1"), ("u2", "v1"), ("u1", "v2"), ("u2", "v2")]
    voltage = {("u1", "v1"): 1, ("u2", "v1"): 0, ("u1", "v2"): 0, ("u2", "v2"): 0}
    degrees = [-2, -1, 0, 1]
    hi = window_for(alg, list(specs.values()), degrees) if hi is None else hi
    bundle, nonsplit = voltage_bundle(alg, ["v1", "v2"], ["u1", "u2"], covers, voltage, m, specs, 0, hi, rng,
                                      unit_glue=True)
    return BundleInstance(seed, bundle, degrees, nonsplit, voltage)
