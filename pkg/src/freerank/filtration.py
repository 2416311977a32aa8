"""Free rank filtrations and their Duflot complexes.

A free rank filtration of L is a chain L = F_0 ⊇ F_1 ⊇ ... ⊇ F_m = 0 of
submodules, with each F_j/F_{j+1} written explicitly as a direct sum of
j-free modules Σ^d(P_V ⊗ N), rank V = j.

The Duflot complex has terms DL^j = H^j_m(F_j/F_{j+1}), known in closed form
(a sum of shifted duals of P_V tensored with N), and differentials given by
the connecting maps of 0 -> F_{j+1}/F_{j+2} -> F_j/F_{j+2} -> F_j/F_{j+1} -> 0.
The differentials are computed on Koszul complexes at a level that is
provably stable for the closed-form pieces, using one fixed cocycle basis per
(j, degree) so that d∘d = 0 is an actual check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .graded import (
    BoundedFactor,
    GradedModule,
    SubspaceV,
    WindowTooSmall,
    is_submodule,
    jfree_build,
    monomials,
    poly_dim,
    pv_action,
    subquotient,
    subsets,
)
from .homology import CohomologyBasis, connecting_map as snake, induced_map
from .koszul import LocalCohomology, bound_level, cech_complex, fits


@dataclass(eq=False)
class JFreeSummand:
    """One summand Σ^shift(P_V ⊗ N) of F_j/F_{j+1}.

    ``iso[e]`` has shape (dim L_e, dim M_e): its columns are lifts to F_j of
    the images of the basis of M = jfree_build(V, shift, N).
    """

    V: SubspaceV
    shift: int
    factor: BoundedFactor
    iso: dict[int, np.ndarray]

    @property
    def rank(self) -> int:
        return self.V.rank

    @property
    def end(self) -> int:
        """Top degree of the summand's only local cohomology group."""
        return self.shift + self.factor.top

    def model(self, L: GradedModule) -> GradedModule:
        return jfree_build(L.alg, self.V, self.shift, self.factor, L.lo, L.hi)

    def structure_map(self, e: int, sigma: int) -> np.ndarray:
        """φ: (P_W)_e -> (P_V)_e, restriction of polynomials along V ⊆ W."""
        w, r = self.V.w, self.V.rank
        if e % sigma:
            return la.zeros(0, 0)
        src = monomials(w, e // sigma)
        out = la.zeros(poly_dim(r, e, sigma), len(src))
        one = la.zeros(1, 1)
        one[0, 0] = 1
        for c, m in enumerate(src):
            v, deg = one, 0
            for k, a in enumerate(m):
                for _ in range(a):
                    v = la.matmul(pv_action(self.V, k, deg, sigma), v, self.V.p)
                    deg += sigma
            out[:, c] = v[:, 0]
        return out


@dataclass(eq=False)
class FreeRankFiltration:
    L: GradedModule
    levels: list[dict[int, np.ndarray]]  # F_0 .. F_m, the last one zero
    summands: list[list[JFreeSummand]]  # one list per level j < m
    minimal: bool = False
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def top(self) -> int:
        """Index m of the final (zero) level."""
        return len(self.levels) - 1

    def level(self, j: int) -> dict[int, np.ndarray]:
        if j < len(self.levels):
            return self.levels[j]
        return {}

    def basis(self, j: int, e: int) -> np.ndarray:
        B = self.level(j).get(e)
        return B if B is not None else la.zeros(self.L.dim(e), 0)

    def level_dim(self, j: int, e: int) -> int:
        return self.basis(j, e).shape[1]

    def all_summands(self):
        for j, lst in enumerate(self.summands):
            for s in lst:
                yield j, s

    def complement(self, j: int) -> dict[int, np.ndarray]:
        """Columns of F_j complementing F_{j+1}, fixed once per filtration."""
        key = ("comp", j)
        if key not in self._cache:
            p = self.L.p
            self._cache[key] = {
                e: la.complement_in(self.basis(j + 1, e), self.basis(j, e), p)
                for e in self.L.degrees()
            }
        return self._cache[key]

    def graded_piece(self, j: int) -> GradedModule:
        """F_j/F_{j+1} on the basis ``complement(j)``."""
        key = ("gr", j)
        if key not in self._cache:
            self._cache[key] = subquotient(self.L, self.level(j), self.level(j + 1), self.complement(j))
        return self._cache[key]

    def two_step(self, j: int) -> GradedModule:
        """F_j/F_{j+2} on the basis [complement(j+1) | complement(j)]."""
        key = ("two", j)
        if key not in self._cache:
            c1, c0 = self.complement(j + 1), self.complement(j)
            reps = {e: np.hstack([c1[e], c0[e]]) for e in self.L.degrees()}
            self._cache[key] = subquotient(self.L, self.level(j), self.level(j + 2), reps)
        return self._cache[key]

    def end(self, j: int) -> float:
        """Top degree where H^j_m(F_j/F_{j+1}) can be nonzero."""
        sig = self.L.sigma
        ends = [s.end - sig * j for s in self.summands[j]] if j < len(self.summands) else []
        return max(ends) if ends else -np.inf


def closed_form_dim(s: JFreeSummand, j: int, d: int, sigma: int) -> int:
    """dim of Σ^{-σ_j} Σ^{shift}(P_V^* ⊗ N) in degree d."""
    return sum(
        s.factor.dim(k) * poly_dim(s.rank, k + s.shift - sigma * j - d, sigma)
        for k in range(s.factor.top + 1)
    )


def validate_filtration(F: FreeRankFiltration) -> list[str]:
    """All violated conditions, as messages naming level, degree and summand."""
    L, p, s = F.L, F.L.p, F.L.sigma
    out = []
    degs = list(L.degrees())
    if F.top < 1 and any(L.dims):
        out.append("filtration has no levels")
        return out
    for e in degs:
        if F.level_dim(0, e) != L.dim(e) or la.rank(F.basis(0, e), p) != L.dim(e):
            out.append(f"F_0 != L in degree {e}")
        if F.level_dim(F.top, e):
            out.append(f"last level F_{F.top} is nonzero in degree {e}")
    for j in range(F.top + 1):
        for e in degs:
            B = F.basis(j, e)
            if B.shape[0] != L.dim(e):
                out.append(f"F_{j} degree {e}: basis has wrong length")
            elif la.rank(B, p) != B.shape[1]:
                out.append(f"F_{j} degree {e}: basis not independent")
        for e in is_submodule(L, F.level(j)):
            out.append(f"F_{j} not closed under the action in degree {e}")
        if j < F.top:
            for e in degs:
                if la.rank(np.hstack([F.basis(j, e), F.basis(j + 1, e)]), p) != F.level_dim(j, e):
                    out.append(f"F_{j + 1} not contained in F_{j} in degree {e}")
    if out:
        return out
    if len(F.summands) != F.top:
        out.append(f"need summand lists for levels 0..{F.top - 1}")
        return out
    for j in range(F.top):
        isos = {e: [] for e in degs}
        for t, sm in enumerate(F.summands[j]):
            tag = f"level {j} summand {t}"
            if sm.V.w != L.w or sm.V.p != p:
                out.append(f"{tag}: V does not live in W")
                continue
            if sm.rank != j:
                out.append(f"{tag}: rank V = {sm.rank}, expected {j}")
            M = sm.model(L)
            for e in degs:
                A = sm.iso.get(e, la.zeros(L.dim(e), 0))
                if A.shape != (L.dim(e), M.dim(e)):
                    out.append(f"{tag}: iso in degree {e} has shape {A.shape}")
                    A = None
                elif not la.in_span(F.basis(j, e), A, p) if A.size else False:
                    out.append(f"{tag}: iso in degree {e} leaves F_{j}")
                isos[e].append(A)
            # module map modulo F_{j+1}
            for e in range(L.lo, L.hi - s + 1):
                A, A2 = sm.iso.get(e), sm.iso.get(e + s)
                if A is None or A2 is None or A.size == 0:
                    continue
                if A.shape != (L.dim(e), M.dim(e)) or A2.shape != (L.dim(e + s), M.dim(e + s)):
                    continue
                for k in range(L.w):
                    diff = (la.matmul(L.act(k, e), A, p) - la.matmul(A2, M.act(k, e), p)) % p
                    if np.any(diff) and not la.in_span(F.basis(j + 1, e + s), diff, p):
                        out.append(f"{tag}: iso does not commute with y{k + 1} in degree {e}")
            # structure map: y_k goes to the restriction of the k-th coordinate
            phi = sm.structure_map(s, s)
            if L.w and not np.array_equal(phi, sm.V.matrix.T % p):
                out.append(f"{tag}: structure map is not induced by V -> W")
        for e in degs:
            mats = [A for A in isos[e] if A is not None]
            total = sum(A.shape[1] for A in mats)
            want = F.level_dim(j, e) - F.level_dim(j + 1, e)
            if total != want:
                out.append(f"level {j} degree {e}: summands have total dim {total}, quotient has {want}")
                continue
            if total and la.rank(np.hstack([F.basis(j + 1, e)] + mats), p) != F.level_dim(j, e):
                out.append(f"level {j} degree {e}: summands are not independent modulo F_{j + 1}")
    if F.minimal:
        allv = [(j, t, sm) for j in range(F.top) for t, sm in enumerate(F.summands[j])]
        for (j1, t1, a), (j2, t2, b) in itertools.combinations(allv, 2):
            if a.V.same_subspace(b.V):
                out.append(
                    f"not minimal: level {j1} summand {t1} and level {j2} summand {t2} share V"
                )
    return out


# -- Duflot complex -------------------------------------------------------

@dataclass
class DuflotComplex:
    """Terms DL^j_d (closed form) and differentials d^j_d : DL^j_d -> DL^{j+1}_d."""

    frf: FreeRankFiltration
    terms: dict[tuple[int, int], int]
    diffs: dict[tuple[int, int], np.ndarray]
    certified: list[int]
    uncertified: list[int]
    levels: dict[int, int]
    bases: dict[tuple[int, int], CohomologyBasis] = field(default_factory=dict, repr=False)

    @property
    def top(self) -> int:
        return len(self.frf.summands) - 1

    def term(self, j: int, d: int) -> int:
        return self.terms.get((j, d), 0)

    def diff(self, j: int, d: int) -> np.ndarray:
        D = self.diffs.get((j, d))
        if D is None:
            return la.zeros(self.term(j + 1, d), self.term(j, d))
        return D

    def check_square_zero(self) -> list[tuple[int, int]]:
        p = self.frf.L.p
        bad = []
        for d in self.certified:
            for j in range(self.top):
                if np.any(la.matmul(self.diff(j + 1, d), self.diff(j, d), p)):
                    bad.append((j, d))
        return bad


def duflot_term_dims(F: FreeRankFiltration, d: int) -> dict[int, int]:
    sig = F.L.sigma
    return {j: sum(closed_form_dim(s, j, d, sig) for s in F.summands[j]) for j in range(len(F.summands))}


def duflot_level(F: FreeRankFiltration, d: int) -> int:
    """A Koszul level that is stable for every graded piece in degree d."""
    sig = F.L.sigma
    return max([bound_level(sig, d, F.end(j)) for j in range(len(F.summands))], default=1)


def duflot_complex(F: FreeRankFiltration, degrees=None, strict: bool = False,
                   min_levels: dict | None = None) -> DuflotComplex:
    """Build DL with differentials in the given internal degrees.

    ``min_levels`` raises the Koszul level used in a degree; two complexes
    built at equal levels can be compared by :func:`duflot_map`.
    """
    L = F.L
    degrees = list(L.degrees()) if degrees is None else list(degrees)
    J = len(F.summands)
    terms, diffs, bases, levels = {}, {}, {}, {}
    cert, unc = [], []
    for d in degrees:
        closed = duflot_term_dims(F, d)
        n = duflot_level(F, d)
        if min_levels:
            n = max(n, min_levels.get(d, 1))
        try:
            local = _duflot_degree(F, d, n, closed)
        except WindowTooSmall:
            if strict:
                raise
            unc.append(d)
            continue
        bs, ds = local
        cert.append(d)
        levels[d] = n
        for j in range(J):
            if closed[j]:
                terms[(j, d)] = closed[j]
            bases[(j, d)] = bs[j]
        for j, D in ds.items():
            diffs[(j, d)] = D
    return DuflotComplex(F, terms, diffs, cert, unc, levels, bases)


def _duflot_degree(F: FreeRankFiltration, d: int, n: int, closed: dict[int, int]):
    L, p, w = F.L, F.L.p, F.L.w
    J = len(F.summands)
    active = [j for j in range(J) if closed[j]]
    for j in active:
        top = min(w, j + 1)
        if not fits(F.graded_piece(j), d, n, top):
            raise WindowTooSmall(f"degree {d}")
    bases, cechs = {}, {}
    for j in range(J):
        if not closed[j]:
            bases[j] = CohomologyBasis(p, 0, la.zeros(0, 0), la.zeros(0, 0), la.zeros(0, 0))
            continue
        G = F.graded_piece(j)
        C = cech_complex(G, d, n, min(w, j + 1))
        b = C.complex.cohomology(j)
        if b.dim != closed[j]:
            raise RuntimeError(
                f"H^{j} of the level-{j} piece in degree {d} has dim {b.dim}, "
                f"closed form gives {closed[j]}"
            )
        bases[j], cechs[j] = b, C
    diffs = {}
    for j in range(J - 1):
        if not closed[j] or not closed[j + 1]:
            continue
        Q = F.two_step(j)
        if not fits(Q, d, n, min(w, j + 1)):
            raise WindowTooSmall(f"degree {d}")
        KQ = cech_complex(Q, d, n, min(w, j + 1))
        A, C = F.graded_piece(j + 1), F.graded_piece(j)
        e_i, e_n = d + n * L.sigma * j, d + n * L.sigma * (j + 1)
        a_i, a_n = len(KQ.subsets[j]), len(KQ.subsets[j + 1])
        # F_j/F_{j+2} has basis [gr_{j+1} | gr_j]
        ga, gc = A.dim(e_i), C.dim(e_i)
        g = np.hstack([la.zeros(gc, ga), la.eye(gc)])
        fa, fc = A.dim(e_n), C.dim(e_n)
        f = np.vstack([la.eye(fa), la.zeros(fc, fa)])
        G_big = np.kron(la.eye(a_i), g)
        F_big = np.kron(la.eye(a_n), f)
        diffs[j] = snake(KQ.complex.diff(j), F_big, G_big, bases[j], bases[j + 1], p)
    return bases, diffs


def common_levels(*filtrations: FreeRankFiltration, degrees) -> dict[int, int]:
    """Per degree, a Koszul level stable for every given filtration."""
    return {d: max(duflot_level(F, d) for F in filtrations) for d in degrees}


def graded_map(F1: FreeRankFiltration, F2: FreeRankFiltration, f: dict, j: int, e: int) -> np.ndarray:
    """gr_j(f) in degree e, in the complement bases of the two filtrations."""
    p = F1.L.p
    c1 = F1.complement(j).get(e, la.zeros(F1.L.dim(e), 0))
    c2 = F2.complement(j).get(e, la.zeros(F2.L.dim(e), 0))
    if c1.shape[1] == 0 or c2.shape[1] == 0:
        return la.zeros(c2.shape[1], c1.shape[1])
    img = la.matmul(f[e], c1, p)
    x = la.solve(np.hstack([c2, F2.basis(j + 1, e)]), img, p)
    if x is None:
        raise ValueError(f"map does not preserve the filtration at level {j}, degree {e}")
    return x[:c2.shape[1]]


def is_filtered(F1: FreeRankFiltration, F2: FreeRankFiltration, f: dict) -> list[tuple[int, int]]:
    """(level, degree) pairs where f(F_j L1) is not inside F_j L2."""
    p, bad = F1.L.p, []
    for j in range(F1.top + 1):
        for e in F1.L.degrees():
            B = F1.basis(j, e)
            if B.shape[1] and not la.in_span(F2.basis(j, e), la.matmul(f[e], B, p), p):
                bad.append((j, e))
    return bad


def duflot_map(D1: DuflotComplex, D2: DuflotComplex, f: dict) -> dict[tuple[int, int], np.ndarray]:
    """Chain map D(L1) -> D(L2) induced by a filtered module map f: L1 -> L2.

    Both complexes must have been built at the same Koszul level in each
    degree.  Entry (j, d) maps DL1^j_d -> DL2^j_d.
    """
    F1, F2 = D1.frf, D2.frf
    p, s, w = F1.L.p, F1.L.sigma, F1.L.w
    out = {}
    for d in D1.certified:
        if d not in D2.levels:
            continue
        n = D1.levels[d]
        if D2.levels[d] != n:
            raise ValueError(f"degree {d}: complexes built at levels {n} and {D2.levels[d]}")
        for j in range(max(D1.top, D2.top) + 1):
            a, b = D1.term(j, d), D2.term(j, d)
            if a == 0 or b == 0:
                out[(j, d)] = la.zeros(b, a)
                continue
            e = d + n * s * j
            g = graded_map(F1, F2, f, j, e)
            K = np.kron(la.eye(len(subsets(w, j))), g)
            out[(j, d)] = induced_map(K, D1.bases[(j, d)], D2.bases[(j, d)])
    return out


def chain_map_defects(D1: DuflotComplex, D2: DuflotComplex, phi: dict) -> list[tuple[int, int]]:
    """(j, d) where d2 ∘ phi^j != phi^{j+1} ∘ d1."""
    p, bad = D1.frf.L.p, []
    for (j, d), M in phi.items():
        nxt = phi.get((j + 1, d))
        if nxt is None:
            continue
        lhs = la.matmul(D2.diff(j, d), M, p)
        rhs = la.matmul(nxt, D1.diff(j, d), p)
        if not np.array_equal(lhs, rhs):
            bad.append((j, d))
    return bad


def duflot_cohomology(DC: DuflotComplex) -> LocalCohomology:
    p = DC.frf.L.p
    dims = {}
    for d in DC.certified:
        for j in range(DC.top + 1):
            n = DC.term(j, d)
            if n == 0:
                continue
            h = n - la.rank(DC.diff(j, d), p) - la.rank(DC.diff(j - 1, d), p)
            if h:
                dims[(j, d)] = h
    return LocalCohomology(DC.frf.L.w, dims, list(DC.certified), list(DC.uncertified),
                           dict(DC.levels), "duflot")


@dataclass
class DualComplex:
    """Termwise Matlis dual of DL: terms (j, e) = (DL^j_{-e})^*, maps transposed."""

    terms: dict[tuple[int, int], int]
    maps: dict[tuple[int, int], np.ndarray]  # (j, e): dual(DL^{j+1}) -> dual(DL^j) in degree e
    degrees: list[int]

    def homology(self, j: int, e: int, p: int) -> int:
        n = self.terms.get((j, e), 0)
        if n == 0:
            return 0
        out = self.maps.get((j - 1, e))
        inc = self.maps.get((j, e))
        r1 = la.rank(out, p) if out is not None else 0
        r2 = la.rank(inc, p) if inc is not None else 0
        return n - r1 - r2


def matlis_dual_complex(DC: DuflotComplex) -> DualComplex:
    terms = {(j, -d): n for (j, d), n in DC.terms.items()}
    maps = {(j, -d): D.T.copy() for (j, d), D in DC.diffs.items()}
    return DualComplex(terms, maps, [-d for d in DC.certified])


def dual_closed_form_dim(s: JFreeSummand, j: int, e: int, sigma: int) -> int:
    """dim of Σ^{σ_j}(Σ^{-shift} P_V ⊗ N^*) in degree e."""
    return sum(
        s.factor.dim(k) * poly_dim(s.rank, e - sigma * j + s.shift + k, sigma)
        for k in range(s.factor.top + 1)
    )


# -- bounds ---------------------------------------------------------------

def depth_dim_bounds(F: FreeRankFiltration, require_connected: bool = True) -> tuple[int | None, int]:
    """(depth lower bound, dimension) read off the filtration.

    depth_lb is the smallest k with F_{k+1} != F_k; dim the largest j with
    F_j != 0.  With ``require_connected`` the depth bound is only given for
    modules concentrated in nonnegative degrees.
    """
    L = F.L
    degs = list(L.degrees())

    def dims(j):
        return [F.level_dim(j, e) for e in degs]

    nonzero = [j for j in range(F.top + 1) if any(dims(j))]
    dim = max(nonzero) if nonzero else -1
    if require_connected and not (L.bounded_below and all(L.dim(e) == 0 for e in degs if e < 0)):
        raise ValueError("depth bound needs a connected (nonnegatively graded) module")
    depth = None
    for k in range(F.top):
        if dims(k + 1) != dims(k):
            depth = k
            break
    return depth, dim


@dataclass
class RegularityReport:
    bound: float
    computed: float
    ok: bool


def regularity_bound(F: FreeRankFiltration) -> float:
    p = F.L.p
    vals = [
        s.factor.top + s.shift - (0 if p == 2 else s.rank)
        for _, s in F.all_summands()
    ]
    return max(vals) if vals else -np.inf


def regularity_report(F: FreeRankFiltration, H: LocalCohomology) -> RegularityReport:
    b = regularity_bound(F)
    comp = max([H.a_inv(i) + i for i in range(F.L.w + 1)], default=-np.inf)
    return RegularityReport(b, comp, comp <= b)


# -- toral primes -----------------------------------------------------------

@dataclass(eq=False)
class ToralPrime:
    """The kernel of φ_V : P_W -> P_V, i.e. the ideal of polynomials vanishing on V."""

    V: SubspaceV
    summands: list[tuple[int, int]]  # (level, index) of summands carrying this V

    @property
    def rank(self) -> int:
        return self.V.rank


def toral_primes(F: FreeRankFiltration) -> list[ToralPrime]:
    out: list[ToralPrime] = []
    for j, lst in enumerate(F.summands):
        for t, s in enumerate(lst):
            for tp in out:
                if tp.V.same_subspace(s.V):
                    tp.summands.append((j, t))
                    break
            else:
                out.append(ToralPrime(s.V, [(j, t)]))
    return out


@dataclass
class AssociatedResult:
    found: bool
    degree: int | None = None
    witness: np.ndarray | None = None
    checked_degrees: tuple[int, int] | None = None
    note: str = ""


def annihilator_rank(L: GradedModule, x: np.ndarray, c: int, e: int) -> int:
    """rank of f -> f·x from (P_W)_e into L_{c+e}."""
    s = L.sigma
    if e % s:
        return 0
    cols = [la.matmul(L.act_monomial(m, c), x.reshape(-1, 1), L.p) for m in monomials(L.w, e // s)]
    if not cols:
        return 0
    return la.rank(np.hstack(cols), L.p)


def has_annihilator(L: GradedModule, x: np.ndarray, c: int, V: SubspaceV, upto: int) -> bool:
    """ann(x) = I(V) in every degree e with c + e <= upto (and ℓ·x = 0 for ℓ in I(V)_sigma)."""
    p, s = L.p, L.sigma
    forms = V.annihilating_forms()
    for row in forms:
        if np.any(la.matmul(L.act_form(row, c), x.reshape(-1, 1), p)):
            return False
    for e in range(0, upto - c + 1, s):
        if annihilator_rank(L, x, c, e) != poly_dim(V.rank, e, s):
            return False
    return True


def find_associated_witness(
    L: GradedModule,
    V: SubspaceV,
    margin: int | None = None,
    samples: int = 64,
    enum_limit: int = 512,
    seed: int = 0,
) -> AssociatedResult:
    """Search the window for x != 0 with ann(x) = I(V) in all visible degrees.

    A degree c is searched only if at least ``margin`` further degrees are
    visible above it.  Failure means "no witness in window", never a proof.
    """
    p, s = L.p, L.sigma
    margin = s * (L.w + 1) if margin is None else margin
    rng = np.random.default_rng(seed)
    forms = V.annihilating_forms()
    for c in range(L.lo, L.hi - margin + 1):
        n = L.dim(c)
        if n == 0:
            continue
        if forms.shape[0]:
            K = la.nullspace(np.vstack([L.act_form(r, c) for r in forms]), p)
        else:
            K = la.eye(n)
        k = K.shape[1]
        if k == 0:
            continue
        if p ** k <= enum_limit:
            coeffs = (np.array(v, dtype=np.int64) for v in itertools.product(range(p), repeat=k))
        else:
            basis = [la.eye(k)[:, i] for i in range(k)]
            coeffs = itertools.chain(basis, (rng.integers(0, p, k) for _ in range(samples)))
        seen = set()
        for a in coeffs:
            if not np.any(a):
                continue
            # normalize the leading coefficient so scalar multiples are skipped
            lead = a[np.flatnonzero(a)[0]]
            a = a * pow(int(lead), -1, p) % p
            key = a.tobytes()
            if key in seen:
                continue
            seen.add(key)
            x = la.matmul(K, a.reshape(-1, 1), p)[:, 0]
            if has_annihilator(L, x, c, V, L.hi):
                return AssociatedResult(True, c, x, (c, L.hi))
    return AssociatedResult(False, note="no witness in window")


def is_prime_associated(F: FreeRankFiltration, prime: ToralPrime, **kw) -> AssociatedResult:
    return find_associated_witness(F.L, prime.V, **kw)
