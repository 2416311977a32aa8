"""Poset-stratified filtrations and topological stratifications.

A ranked poset P comes with a corank r: P -> N that is order reversing.  A
filtration of L by P assigns a submodule F(X) to each element, monotone in
X; it induces the N-filtration F_j = Σ_{r(X) >= j} F(X).  In a topological
stratification every F(X) is the image of a pushforward i_*: Σ^{d_X} T_X -> L
from an embedded algebra T_X, and the Duflot variant splits each T_X as
P_V ⊗ T' so that the induced N-filtration is a free rank filtration.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .filtration import FreeRankFiltration, JFreeSummand, is_prime_associated, ToralPrime
from .graded import (
    BoundedFactor,
    GradedAlgebra,
    GradedModule,
    GradedVS,
    SubspaceV,
    is_submodule,
    monomials,
    submodule,
    zero_module,
)
from .koszul import local_cohomology


# -- posets ---------------------------------------------------------------

@dataclass
class RankedPoset:
    """Finite poset stored by covering pairs (lower, upper) with a corank."""

    elements: list[str]
    covers: list[tuple[str, str]]
    corank: dict[str, int]
    _closure: dict | None = field(default=None, repr=False)

    def index(self) -> dict[str, int]:
        return {x: i for i, x in enumerate(self.elements)}

    def closure(self) -> np.ndarray:
        """Boolean matrix with [a, b] true iff a <= b."""
        if self._closure is None:
            idx, n = self.index(), len(self.elements)
            C = np.eye(n, dtype=bool)
            for a, b in self.covers:
                if a in idx and b in idx:
                    C[idx[a], idx[b]] = True
            for k in range(n):
                C |= C[:, [k]] & C[[k], :]
            self._closure = C
        return self._closure

    def leq(self, a: str, b: str) -> bool:
        idx = self.index()
        return bool(self.closure()[idx[a], idx[b]])

    def below(self, y: str, strict: bool = False) -> list[str]:
        return [x for x in self.elements if self.leq(x, y) and not (strict and x == y)]

    def rank_of(self, j: int) -> list[str]:
        return [x for x in self.elements if self.corank[x] == j]

    def at_least(self, j: int) -> list[str]:
        return [x for x in self.elements if self.corank[x] >= j]

    @property
    def max_corank(self) -> int:
        return max(self.corank.values(), default=-1)

    def subposet(self, keep) -> "RankedPoset":
        keep = [x for x in self.elements if x in set(keep)]
        ks = set(keep)
        # covers of a convex subposet are the covers between kept elements
        covers = [(a, b) for a, b in self.covers if a in ks and b in ks]
        return RankedPoset(keep, covers, {x: self.corank[x] for x in keep})


def validate_ranked_poset(P: RankedPoset) -> list[str]:
    out = []
    names = set(P.elements)
    if len(names) != len(P.elements):
        out.append("duplicate element ids")
    for x in P.elements:
        if x not in P.corank:
            out.append(f"element {x!r} has no corank")
        elif P.corank[x] < 0:
            out.append(f"element {x!r} has negative corank")
    for a, b in P.covers:
        if a not in names or b not in names:
            out.append(f"cover ({a!r}, {b!r}) names an unknown element")
    if out:
        return out
    C = P.closure()
    n = len(P.elements)
    for i in range(n):
        for j in range(i + 1, n):
            if C[i, j] and C[j, i]:
                out.append(f"order is not antisymmetric: {P.elements[i]!r} and {P.elements[j]!r}")
    idx = P.index()
    for a, b in P.covers:
        if a == b:
            out.append(f"cover ({a!r}, {a!r}) is a loop")
            continue
        if P.corank[a] < P.corank[b]:
            out.append(f"corank increases along {a!r} < {b!r}")
        mids = [c for c in P.elements if c not in (a, b) and C[idx[a], idx[c]] and C[idx[c], idx[b]]]
        if mids:
            out.append(f"cover ({a!r}, {b!r}) is implied by transitivity through {mids[0]!r}")
    return out


# -- poset filtrations ----------------------------------------------------

def _span(mats: list[np.ndarray], n: int, p: int) -> np.ndarray:
    if not mats:
        return la.zeros(n, 0)
    return la.as_cols(la.colspace(np.hstack(mats), p), n)


@dataclass
class PosetFiltration:
    poset: RankedPoset
    L: GradedModule
    F: dict[str, dict[int, np.ndarray]]  # element -> degree -> basis columns

    def basis(self, x: str, e: int) -> np.ndarray:
        B = self.F[x].get(e)
        return B if B is not None else la.zeros(self.L.dim(e), 0)

    def sum_of(self, elems, e: int) -> np.ndarray:
        return _span([self.basis(x, e) for x in elems], self.L.dim(e), self.L.p)

    def level(self, j: int) -> dict[int, np.ndarray]:
        elems = self.poset.at_least(j)
        return {e: self.sum_of(elems, e) for e in self.L.degrees()}

    def levels(self) -> list[dict[int, np.ndarray]]:
        """F_0 ⊇ F_1 ⊇ ... ending with the first zero level."""
        return [self.level(j) for j in range(self.poset.max_corank + 2)]

    def restrict_to(self, y: str) -> "PosetFiltration":
        """F restricted to P_{<=y}, as a filtration of F(y) (ambient coordinates)."""
        sub = self.poset.subposet(self.poset.below(y))
        return PosetFiltration(sub, self.L, {x: self.F[x] for x in sub.elements})


def validate_poset_filtration(PF: PosetFiltration) -> list[str]:
    L, p, P = PF.L, PF.L.p, PF.poset
    out = [f"poset: {m}" for m in validate_ranked_poset(P)]
    for x in P.elements:
        bad = is_submodule(L, {e: PF.basis(x, e) for e in L.degrees()})
        if bad:
            out.append(f"F({x}) is not closed under the action in degree {bad[0]}")
    for a, b in P.covers:
        for e in L.degrees():
            if not la.in_span(PF.basis(b, e), PF.basis(a, e), p):
                out.append(f"F({a}) is not inside F({b}) in degree {e}")
                break
    for e in L.degrees():
        if PF.sum_of(P.elements, e).shape[1] != L.dim(e):
            out.append(f"the F(X) do not span L in degree {e}")
    return out


@dataclass
class GoodReport:
    good: bool
    bad: list[tuple[int, int, str]]  # (j, degree, detail)


def graded_piece_dim(PF: PosetFiltration, y: str, j: int, e: int) -> int:
    """dim of gr_j F(y) = F(y) / Σ_{x <= y, r(x) > j} F(x) in degree e."""
    P, p = PF.poset, PF.L.p
    low = [x for x in P.below(y) if P.corank[x] > j]
    return PF.basis(y, e).shape[1] - PF.sum_of(low, e).shape[1]


def check_good(PF: PosetFiltration) -> GoodReport:
    """Is ⊕_{r(Y)=j} gr_j F(Y) -> F_j/F_{j+1} an isomorphism for every j?"""
    P, L, p = PF.poset, PF.L, PF.L.p
    bad = []
    for j in range(P.max_corank + 1):
        top = P.rank_of(j)
        lower = P.at_least(j + 1)
        for e in L.degrees():
            below = PF.sum_of(lower, e)
            quot = PF.sum_of(P.at_least(j), e).shape[1] - below.shape[1]
            src = sum(graded_piece_dim(PF, y, j, e) for y in top)
            img = _span([below] + [PF.basis(y, e) for y in top], L.dim(e), p).shape[1] - below.shape[1]
            if img != quot:
                bad.append((j, e, f"image has dim {img}, F_j/F_j+1 has dim {quot}"))
            elif src != quot:
                bad.append((j, e, f"sum of graded pieces has dim {src}, F_j/F_j+1 has dim {quot}"))
    return GoodReport(not bad, bad)


# -- embedded algebras ----------------------------------------------------

@dataclass
class EmbeddedAlgebra:
    """T with pushforward Σ^codim T -> (ambient) and restriction (ambient) -> T.

    ``push[e]`` maps T_{e-codim} to the ambient degree e; ``restrict[e]``
    maps the ambient degree e to T_e.
    """

    T: GradedAlgebra
    codim: int
    push: dict[int, np.ndarray]
    restrict: dict[int, np.ndarray]

    def push_at(self, e: int, amb_dim: int) -> np.ndarray:
        M = self.push.get(e)
        return M if M is not None else la.zeros(amb_dim, self.T.module.dim(e - self.codim))

    def restrict_at(self, e: int, amb_dim: int) -> np.ndarray:
        M = self.restrict.get(e)
        return M if M is not None else la.zeros(self.T.module.dim(e), amb_dim)

    def euler(self, amb_dim: int) -> np.ndarray:
        """e_T = i^* i_* 1 in T_codim."""
        T = self.T
        if T.module.dim(0) == 0 or T.module.dim(self.codim) == 0:
            return la.zeros(T.module.dim(self.codim), 1)[:, 0]
        v = la.matmul(self.push_at(self.codim, amb_dim), T.unit.reshape(-1, 1), T.p)
        return la.matmul(self.restrict_at(self.codim, amb_dim), v, T.p)[:, 0]


def identity_embedding(R: GradedAlgebra) -> EmbeddedAlgebra:
    M = R.module
    I = {e: la.eye(M.dim(e)) for e in M.degrees()}
    return EmbeddedAlgebra(R, 0, I, dict(I))


@dataclass
class DuflotSplitting:
    """T ≅ P_V ⊗ T' with gr F(T) = Σ^codim P_V ⊗ N.

    ``gens[:, i]`` is the element of T_sigma playing the i-th coordinate of
    V; ``lifts[k]`` has columns in T_k lifting a basis of N_k.
    """

    V: SubspaceV
    factor: BoundedFactor
    gens: np.ndarray
    lifts: dict[int, np.ndarray]


@dataclass
class TopStratification:
    R: GradedAlgebra
    poset: RankedPoset
    strata: dict[str, EmbeddedAlgebra]
    nesting: dict[tuple[str, str], EmbeddedAlgebra]  # (U, T) for U < T: U inside T
    splittings: dict[str, DuflotSplitting] = field(default_factory=dict)
    L: GradedModule | None = None
    embed: dict[int, np.ndarray] | None = None  # L_e -> R_e, when L is an ideal
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def module(self) -> GradedModule:
        return self.R.module if self.L is None else self.L

    @property
    def p(self) -> int:
        return self.R.p

    @property
    def is_duflot(self) -> bool:
        return bool(self.poset.elements) and all(x in self.splittings for x in self.poset.elements)

    def image(self, x: str) -> dict[int, np.ndarray]:
        key = ("img", x)
        if key not in self._cache:
            M, emb = self.module, self.strata[x]
            self._cache[key] = {
                e: la.as_cols(la.colspace(emb.push_at(e, M.dim(e)), self.p), M.dim(e))
                for e in M.degrees()
            }
        return self._cache[key]

    def filtration(self) -> PosetFiltration:
        return PosetFiltration(self.poset, self.module, {x: self.image(x) for x in self.poset.elements})

    def l_mult(self, a: int, b: int) -> np.ndarray | None:
        """Tensor (dim L_{a+b}, dim R_a, dim L_b) of the R-action on L, if known."""
        R, p = self.R, self.p
        T = R.mult.get((a, b))
        if self.embed is None:
            return T if self.L is None else None
        if T is None or (a + b) not in self.embed or b not in self.embed:
            return None
        E1, E0 = self.embed[a + b], self.embed[b]
        out = la.zeros(E1.shape[1], T.shape[1] * E0.shape[1]).reshape(E1.shape[1], T.shape[1], E0.shape[1])
        for i in range(T.shape[1]):
            img = la.matmul(T[:, i, :], E0, p)
            x = la.solve(E1, img, p)
            if x is None:
                return None
            out[:, i, :] = x
        return out


def _mult(A: GradedAlgebra, a: int, b: int) -> np.ndarray | None:
    M = A.module
    if M.dim(a) == 0 or M.dim(b) == 0 or M.dim(a + b) == 0:
        return la.zeros(M.dim(a + b), M.dim(a) * M.dim(b)).reshape(M.dim(a + b), M.dim(a), M.dim(b))
    return A.mult.get((a, b))


def _check_embedding(amb: GradedAlgebra, amb_mult, amb_dim, emb: EmbeddedAlgebra, name: str,
                     report: "TopReport", embed: dict | None = None) -> None:
    """Linearity, algebra-map, Euler-class and fixedness checks for one embedding.

    ``amb_mult(a, b)`` is the action tensor of amb on the target of the
    pushforward and ``amb_dim(e)`` that target's dimension; ``embed`` maps
    that target into amb when it is a proper ideal.
    """
    T, p, d = emb.T, amb.p, emb.codim
    TM, AM = T.module, amb.module
    lo, hi = AM.lo, AM.hi
    degs = range(lo, hi + 1)
    # i^* is a unital algebra map
    if AM.dim(0) and TM.dim(0):
        u = la.matmul(emb.restrict_at(0, AM.dim(0)), amb.unit.reshape(-1, 1), p)[:, 0]
        if not np.array_equal(u, T.unit % p):
            report.problems.append(f"{name}: restriction does not preserve the unit")
    for a in degs:
        for b in degs:
            if not (lo <= a + b <= hi):
                continue
            mA, mT = _mult(amb, a, b), _mult(T, a, b)
            if mA is None or mT is None or 0 in mA.shape:
                continue
            lhs = np.tensordot(emb.restrict_at(a + b, AM.dim(a + b)), mA, axes=(1, 0)) % p
            X = np.tensordot(mT, emb.restrict_at(a, AM.dim(a)), axes=(1, 0)) % p
            rhs = np.tensordot(X, emb.restrict_at(b, AM.dim(b)), axes=(1, 0)) % p
            if not np.array_equal(lhs, rhs):
                report.problems.append(f"{name}: restriction is not multiplicative in degrees ({a}, {b})")
                return
    # i_* is linear over the ambient algebra: i_*(i^*(r) t) = r i_*(t)
    for a in degs:
        for b in degs:
            e = a + b + d
            if not (lo <= e <= hi) or not (lo <= b + d <= hi):
                continue
            mT, mL = _mult(T, a, b), amb_mult(a, b + d)
            if mT is None or mL is None or 0 in mT.shape or 0 in mL.shape:
                continue
            X = np.tensordot(mT, emb.restrict_at(a, AM.dim(a)), axes=(1, 0)) % p
            lhs = np.tensordot(emb.push_at(e, amb_dim(e)), X, axes=(1, 0)).transpose(0, 2, 1) % p
            rhs = np.tensordot(mL, emb.push_at(b + d, amb_dim(b + d)), axes=(2, 0)) % p
            if not np.array_equal(lhs, rhs):
                report.problems.append(f"{name}: pushforward is not linear in degrees ({a}, {b})")
                return
    def push_amb(e):
        P_ = emb.push_at(e, amb_dim(e))
        return P_ if embed is None else la.matmul(embed[e], P_, p)

    # i^* i_* = multiplication by e_T
    eT = la.zeros(TM.dim(d), 1)[:, 0]
    if lo <= d <= hi and TM.dim(0) and TM.dim(d):
        v = la.matmul(push_amb(d), T.unit.reshape(-1, 1), p)
        eT = la.matmul(emb.restrict_at(d, AM.dim(d)), v, p)[:, 0]
    report.euler[name] = eT
    for b in degs:
        if not (lo <= b + d <= hi) or TM.dim(b) == 0:
            continue
        comp = la.matmul(emb.restrict_at(b + d, AM.dim(b + d)), push_amb(b + d), p)
        if not np.array_equal(comp, T.left_mult(d, eT, b)):
            report.problems.append(f"{name}: i^* i_* differs from multiplication by e_T in degree {b}")
            break
    # fixed: e_T is a nonzerodivisor as far as the window can see
    fixed = True
    for b in degs:
        if b + d > hi or TM.dim(b) == 0:
            continue
        if la.rank(T.left_mult(d, eT, b), p) != TM.dim(b):
            fixed = False
            break
    report.fixed[name] = fixed
    report.fixed_upto[name] = hi - d


@dataclass
class TopReport:
    problems: list[str] = field(default_factory=list)
    euler: dict[str, np.ndarray] = field(default_factory=dict)
    fixed: dict[str, bool] = field(default_factory=dict)
    fixed_upto: dict[str, int] = field(default_factory=dict)
    good: GoodReport | None = None
    minimal: bool = True
    colimit: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems and all(self.fixed.values()) and (self.good is None or self.good.good) \
            and not self.colimit


def check_topological(TS: TopStratification, colimit: bool = True) -> TopReport:
    rep = TopReport()
    P, R, p = TS.poset, TS.R, TS.p
    L = TS.module
    rep.problems += [f"poset: {m}" for m in validate_ranked_poset(P)]
    if rep.problems:
        return rep
    for x in P.elements:
        if x not in TS.strata:
            rep.problems.append(f"element {x} has no embedded algebra")
    if rep.problems:
        return rep
    # R-action on L and the restriction from R
    l_mult = TS.l_mult
    if l_mult(0, 0) is None and L.dim(0):
        rep.problems.append("no R-action on L is available")
        return rep
    for x in P.elements:
        emb = TS.strata[x]
        _check_restriction_defined(emb, R, x, rep)
        _check_embedding(R, l_mult, L.dim, emb, x, rep, TS.embed)
    # nesting: U < T gives U embedded in T, coherent with the embeddings in R
    for x in P.elements:
        for y in P.elements:
            if x == y or not P.leq(x, y):
                continue
            nest = TS.nesting.get((x, y))
            if nest is None:
                rep.problems.append(f"missing nesting record for {x} < {y}")
                continue
            Ty = TS.strata[y].T

            def t_mult(a, b, Ty=Ty):
                return _mult(Ty, a, b)

            _check_embedding(Ty, t_mult, Ty.module.dim, nest, f"{x}<{y}", rep)
            ex, ey = TS.strata[x], TS.strata[y]
            if nest.codim + ey.codim != ex.codim:
                rep.problems.append(f"codimensions do not add along {x} < {y}")
            for e in L.degrees():
                comp = la.matmul(ey.push_at(e, L.dim(e)), nest.push_at(e - ey.codim, Ty.module.dim(e - ey.codim)), p)
                if not np.array_equal(comp, ex.push_at(e, L.dim(e))):
                    rep.problems.append(f"pushforwards do not compose along {x} < {y} in degree {e}")
                    break
            for e in R.module.degrees():
                comp = la.matmul(nest.restrict_at(e, Ty.module.dim(e)), ey.restrict_at(e, R.module.dim(e)), p)
                if not np.array_equal(comp, ex.restrict_at(e, R.module.dim(e))):
                    rep.problems.append(f"restrictions do not compose along {x} < {y} in degree {e}")
                    break
    PF = TS.filtration()
    rep.problems += [f"filtration: {m}" for m in validate_poset_filtration(PF)]
    rep.good = check_good(PF)
    # goodness is inherited by each F(X) filtered by P_{<=X}
    for y in P.elements:
        sub = check_good(PF.restrict_to(y))
        if not sub.good:
            j, e, why = sub.bad[0]
            rep.problems.append(f"F({y}) over P_<= {y} is not good at level {j}, degree {e}: {why}")
    if TS.splittings:
        rep.problems += [f"splitting: {m}" for m in check_splittings(TS)]
        vs = [(x, TS.splittings[x].V) for x in P.elements if x in TS.splittings]
        rep.minimal = all(not a[1].same_subspace(b[1]) for a, b in itertools.combinations(vs, 2))
    if colimit and rep.good.good:
        rep.colimit = colimit_defects(PF)
    return rep


def _check_restriction_defined(emb: EmbeddedAlgebra, R: GradedAlgebra, x: str, rep: TopReport) -> None:
    for e in R.module.degrees():
        M = emb.restrict_at(e, R.module.dim(e))
        if M.shape != (emb.T.module.dim(e), R.module.dim(e)):
            rep.problems.append(f"{x}: restriction has shape {M.shape} in degree {e}")
            return


def colimit_defects(PF: PosetFiltration) -> list[str]:
    """Check that F_j is the colimit of F over P_{>=j} and that pairwise
    intersections are generated by common lower elements."""
    P, L, p = PF.poset, PF.L, PF.L.p
    out = []
    for y, z in itertools.combinations(P.elements, 2):
        common = [x for x in P.elements if P.leq(x, y) and P.leq(x, z)]
        for e in L.degrees():
            cap = la.intersect(PF.basis(y, e), PF.basis(z, e), p)
            gen = PF.sum_of(common, e)
            if la.as_cols(cap, L.dim(e)).shape[1] != gen.shape[1]:
                out.append(f"F({y}) ∩ F({z}) is not generated by common lower strata in degree {e}")
                break
    for j in range(P.max_corank + 1):
        elems = P.at_least(j)
        covers = [(a, b) for a, b in P.covers if a in elems and b in elems]
        for e in L.degrees():
            dims = [PF.basis(x, e).shape[1] for x in elems]
            total = sum(dims)
            if total == 0:
                continue
            off = dict(zip(elems, np.cumsum([0] + dims[:-1])))
            rels = []
            for a, b in covers:
                Ba, Bb = PF.basis(a, e), PF.basis(b, e)
                if Ba.shape[1] == 0:
                    continue
                c = la.solve(Bb, Ba, p)
                Rm = la.zeros(total, Ba.shape[1])
                Rm[off[a]:off[a] + Ba.shape[1]] = la.eye(Ba.shape[1])
                Rm[off[b]:off[b] + Bb.shape[1]] = (-c) % p
                rels.append(Rm)
            rk = la.rank(np.hstack(rels), p) if rels else 0
            if total - rk != PF.sum_of(elems, e).shape[1]:
                out.append(f"F_{j} is not the colimit of F over corank >= {j} in degree {e}")
                break
    return out


# -- Duflot splittings and the free rank filtration -----------------------

def _pv_image(T: GradedAlgebra, gens: np.ndarray, mono, lift: np.ndarray, k: int) -> np.ndarray | None:
    """gens^mono * lift as an element of T."""
    p, s = T.p, T.module.sigma
    v, deg = lift % p, k
    for i, a in enumerate(mono):
        for _ in range(a):
            if not T.module.known(deg + s):
                return None
            v = T.product(s, gens[:, i], deg, v)
            deg += s
    return v


def splitting_iso(TS: TopStratification, x: str) -> JFreeSummand:
    """The summand Σ^{d_x} P_V ⊗ N of F_j/F_{j+1} carried by x."""
    sp, emb, L = TS.splittings[x], TS.strata[x], TS.module
    T, s, r = emb.T, L.sigma, sp.V.rank
    iso = {}
    for e in L.degrees():
        cols = []
        for k in range(sp.factor.top + 1):
            t = e - emb.codim - k
            if sp.factor.dim(k) == 0 or t < 0 or t % s:
                continue
            for idx in range(sp.factor.dim(k)):
                for m in monomials(r, t // s):
                    v = _pv_image(T, sp.gens, m, sp.lifts[k][:, idx], k)
                    if v is None:
                        cols.append(la.zeros(L.dim(e), 1)[:, 0])
                    else:
                        cols.append(la.matmul(emb.push_at(e, L.dim(e)), v.reshape(-1, 1), TS.p)[:, 0])
        # same order as jfree_build: N-degree, N-index, monomial
        iso[e] = np.array(cols, dtype=np.int64).T if cols else la.zeros(L.dim(e), 0)
    return JFreeSummand(sp.V, emb.codim, sp.factor, iso)


def to_free_rank(TS: TopStratification) -> FreeRankFiltration:
    """The N-filtration of a Duflot stratification with its j-free summands."""
    if not TS.is_duflot and TS.poset.elements:
        raise ValueError("every element needs a Duflot splitting")
    key = "frf"
    if key not in TS._cache:
        P = TS.poset
        levels = TS.filtration().levels()
        summands = [[splitting_iso(TS, x) for x in P.rank_of(j)] for j in range(P.max_corank + 1)]
        if not levels:
            levels = [{e: la.zeros(0, 0) for e in TS.module.degrees()}]
        TS._cache[key] = FreeRankFiltration(TS.module, levels, summands, minimal=True)
    return TS._cache[key]


def check_splittings(TS: TopStratification) -> list[str]:
    from .filtration import validate_filtration

    out = []
    for x, sp in TS.splittings.items():
        if sp.V.rank != TS.poset.corank[x]:
            out.append(f"{x}: rank V = {sp.V.rank} but corank is {TS.poset.corank[x]}")
    if out or not TS.is_duflot:
        return out
    F = to_free_rank(TS)
    F = FreeRankFiltration(F.L, F.levels, F.summands, minimal=False)
    return out + validate_filtration(F)


# -- truncation, detection, transfer --------------------------------------

def truncate(TS: TopStratification, i: int) -> TopStratification:
    """The stratification of F_i L by P_{>=i}."""
    if i <= 0:
        return TS
    P, L, p = TS.poset, TS.module, TS.p
    keep = P.at_least(i)
    sub = P.subposet(keep)
    lo, hi = L.lo, L.hi
    if not keep:
        Z = zero_module(L.alg, lo, hi)
        emb = {e: la.zeros(L.dim(e) if TS.embed is None else TS.R.module.dim(e), 0) for e in L.degrees()}
        return TopStratification(TS.R, sub, {}, {}, {}, Z, emb)
    Fi = TS.filtration().level(i)
    Li = submodule(L, Fi)
    strata = {}
    for x in keep:
        emb = TS.strata[x]
        push = {}
        for e in L.degrees():
            M = emb.push_at(e, L.dim(e))
            c = la.solve(Fi[e], M, p) if M.shape[1] else la.zeros(Fi[e].shape[1], 0)
            push[e] = c
        strata[x] = EmbeddedAlgebra(emb.T, emb.codim, push, emb.restrict)
    nesting = {k: v for k, v in TS.nesting.items() if k[0] in sub.corank and k[1] in sub.corank}
    splittings = {x: TS.splittings[x] for x in keep if x in TS.splittings}
    if TS.embed is None:
        embed = {e: Fi[e] for e in L.degrees()}
    else:
        embed = {e: la.matmul(TS.embed[e], Fi[e], p) for e in L.degrees()}
    return TopStratification(TS.R, sub, strata, nesting, splittings, Li, embed)


def inclusion_of_truncation(TS: TopStratification, i: int) -> dict[int, np.ndarray]:
    """F_i L -> L as matrices, in the bases used by :func:`truncate`."""
    L = TS.module
    if i <= 0:
        return {e: la.eye(L.dim(e)) for e in L.degrees()}
    Fi = TS.filtration().level(i)
    return {e: Fi[e] for e in L.degrees()}


def oracle_depth(M: GradedModule, degrees, end_bound: float | None = None) -> int | None:
    """Smallest i with H^i_m(M) nonzero in some certified degree, or None."""
    H = local_cohomology(M, degrees=list(degrees), end_bound=end_bound)
    ids = [i for (i, d), v in H.dims.items() if v]
    return min(ids) if ids else None


@dataclass
class DetectionResult:
    kernel: GradedVS
    bases: dict[int, np.ndarray]
    depth: int | None = None
    consistent: bool | None = None


def detection_kernel(TS: TopStratification, d: int, depth: int | None = None) -> DetectionResult:
    """Kernel of R -> ∏_{r(T) = d} T.  With ``depth`` = depth R supplied (or
    computed by the caller), a depth equal to d forces the kernel to vanish."""
    R, p = TS.R, TS.p
    M = R.module
    strata = TS.poset.rank_of(d)
    bases = {}
    for e in M.degrees():
        n = M.dim(e)
        if n == 0:
            bases[e] = la.zeros(0, 0)
            continue
        rows = [TS.strata[x].restrict_at(e, n) for x in strata]
        rows = [r for r in rows if r.shape[0]]
        bases[e] = la.nullspace(np.vstack(rows), p) if rows else la.eye(n)
    dims = tuple(bases[e].shape[1] for e in M.degrees())
    res = DetectionResult(GradedVS(M.lo, M.hi, dims), bases, depth)
    if depth is not None:
        injective = not any(dims)
        res.consistent = injective if depth == d else True
    return res


def induced_stratification(TS: TopStratification, x: str) -> TopStratification:
    """T_x stratified by P_{<=x} through the nesting records."""
    sub = TS.poset.subposet(TS.poset.below(x))
    T = TS.strata[x].T
    strata = {}
    for u in sub.elements:
        strata[u] = identity_embedding(T) if u == x else TS.nesting[(u, x)]
    nesting = {k: v for k, v in TS.nesting.items() if k[0] in sub.corank and k[1] in sub.corank}
    splittings = {u: TS.splittings[u] for u in sub.elements if u in TS.splittings}
    return TopStratification(T, sub, strata, nesting, splittings)


@dataclass
class TransferResult:
    in_L: bool | None  # True: witness found; False: no candidate in window; None: undecided
    in_T: bool | None
    depth_T: int | None
    rank_V: int
    consistent: bool
    notes: list[str] = field(default_factory=list)


def _tri_state(M: GradedModule, V: SubspaceV, res) -> bool | None:
    """True with a witness; False when no element in the checkable part of
    the window is killed by I(V); None otherwise."""
    if res.found:
        return True
    forms = V.annihilating_forms()
    p = M.p
    for c in range(M.lo, M.hi - M.sigma + 1):
        if M.dim(c) == 0:
            continue
        if forms.shape[0] == 0:
            return None
        K = la.nullspace(np.vstack([M.act_form(r, c) for r in forms]), p)
        if K.shape[1]:
            return None
    return False


def associated_prime_transfer(TS: TopStratification, x: str, depth_degrees=None, **kw) -> TransferResult:
    """Test whether ker(R -> P_V) at the stratum x is associated in L and in T_x."""
    rep = check_topological(TS, colimit=False)
    if not rep.minimal:
        raise ValueError("stratification is not minimal")
    if x not in TS.splittings:
        raise ValueError(f"element {x} has no Duflot splitting")
    V = TS.splittings[x].V
    FL = to_free_rank(TS)
    resL = is_prime_associated(FL, ToralPrime(V, []), **kw)
    TT = induced_stratification(TS, x)
    FT = to_free_rank(TT)
    resT = is_prime_associated(FT, ToralPrime(V, []), **kw)
    in_L = _tri_state(FL.L, V, resL)
    in_T = _tri_state(FT.L, V, resT)
    M = FT.L
    E = max([FT.end(j) for j in range(len(FT.summands))], default=0)
    if depth_degrees is None:
        first = min([e for e in M.degrees() if M.dim(e)], default=0)
        top = int(E) if E != -np.inf else first
        depth_degrees = range(first - M.sigma * (M.w + 1), top + 1)
    depth = oracle_depth(M, depth_degrees, end_bound=E if E != -np.inf else None)
    notes = []
    ok = True
    if in_L is not None and in_T is not None and in_L != in_T:
        ok = False
        notes.append("association differs between L and T")
    if in_T is True and depth is not None and depth != V.rank:
        ok = False
        notes.append(f"associated in T but depth T = {depth} != rank V = {V.rank}")
    if in_T is False and depth is not None and depth == V.rank:
        ok = False
        notes.append("depth T = rank V but no element of the window is killed by I(V)")
    if in_T is None and depth == V.rank:
        notes.append("depth T = rank V; witness search inconclusive in window")
    return TransferResult(in_L, in_T, depth, V.rank, ok, notes)
