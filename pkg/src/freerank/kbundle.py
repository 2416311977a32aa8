"""Finite group actions on filtered modules and their Duflot complexes.

Covers four layers:

* finite groups, their cohomology through explicit resolutions (periodic
  for cyclic groups, bar otherwise) and Tate cohomology of cyclic groups;
* complexes of K-modules, the total complex of Hom_K(resolution, C) and the
  complete (Tate) version, plus the two-row collapse analysis;
* poset coverings, K-actions on poset filtrations and the induced action on L;
* bundles N -> L with the map π*, and the comparison DN ≅ (DL)^K.

Group actions on modules are stored as left actions, one matrix per group
element.  Actions coming from posets are right actions (ρ_k ρ_h = ρ_{hk})
and are converted with k -> ρ_{k^{-1}}.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .filtration import (
    DuflotComplex,
    FreeRankFiltration,
    chain_map_defects,
    common_levels,
    duflot_complex,
    duflot_map,
    is_filtered,
)
from .homology import CohomologyBasis, Complex, connecting_map
from .poset import PosetFiltration, RankedPoset, validate_ranked_poset


class ResolutionTooShort(ValueError):
    """A requested total degree needs more of the resolution than is stored."""


# -- finite groups ----------------------------------------------------------

@dataclass
class FiniteGroup:
    """Multiplication table on 0..n-1 with 0 the identity."""

    table: np.ndarray

    @property
    def order(self) -> int:
        return self.table.shape[0]

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(np.flatnonzero(self.table[a] == 0)[0])

    @classmethod
    def cyclic(cls, m: int) -> "FiniteGroup":
        i = np.arange(m)
        return cls((i[:, None] + i[None, :]) % m)

    @classmethod
    def from_permutations(cls, perms: list[tuple[int, ...]]) -> "FiniteGroup":
        """Group table of a list of permutations closed under composition,
        (a b)(x) = a(b(x)), with the identity first."""
        index = {tuple(q): i for i, q in enumerate(perms)}
        if tuple(perms[0]) != tuple(range(len(perms[0]))):
            raise ValueError("the first permutation must be the identity")
        n = len(perms)
        T = np.zeros((n, n), dtype=np.int64)
        for i, a in enumerate(perms):
            for j, b in enumerate(perms):
                c = tuple(a[x] for x in b)
                if c not in index:
                    raise ValueError("permutations are not closed under composition")
                T[i, j] = index[c]
        return cls(T)

    def generator(self) -> int | None:
        """An element generating the group, if it is cyclic."""
        for g in range(self.order):
            x, seen = 0, set()
            while x not in seen:
                seen.add(x)
                x = self.mul(g, x)
            if len(seen) == self.order:
                return g
        return None

    def powers(self, g: int) -> list[int]:
        out, x = [], 0
        for _ in range(self.order):
            out.append(x)
            x = self.mul(g, x)
        return out


def regular_action(G: FiniteGroup, p: int) -> list[np.ndarray]:
    """Left regular representation: g e_h = e_{gh}."""
    n = G.order
    mats = []
    for g in range(n):
        M = la.zeros(n, n)
        for h in range(n):
            M[G.mul(g, h), h] = 1
        mats.append(M)
    return mats


def check_action(G: FiniteGroup, acts: list[np.ndarray], p: int) -> list[str]:
    out = []
    n = acts[0].shape[0] if acts else 0
    if not np.array_equal(acts[0] % p, la.eye(n)):
        out.append("identity does not act trivially")
    for a in range(G.order):
        for b in range(G.order):
            if not np.array_equal(la.matmul(acts[a], acts[b], p), acts[G.mul(a, b)] % p):
                out.append(f"action is not multiplicative at ({a}, {b})")
                return out
    return out


def group_ring_matrix(coef: np.ndarray, acts: list[np.ndarray], p: int) -> np.ndarray:
    """Σ_g coef[g] ρ(g)."""
    n = acts[0].shape[0]
    out = la.zeros(n, n)
    for g, c in enumerate(coef):
        if c % p:
            out = (out + (int(c) % p) * acts[g]) % p
    return out


# -- resolutions ------------------------------------------------------------

@dataclass
class Resolution:
    """Cochains Hom_K(P_a, M) = M^{ranks[a]} with δ_a given by group-ring
    coefficient arrays coeffs[a] of shape (ranks[a+1], ranks[a], |K|)."""

    group: FiniteGroup
    ranks: list[int]
    coeffs: list[np.ndarray]
    kind: str

    @property
    def length(self) -> int:
        return len(self.ranks) - 1

    def cochain_diff(self, a: int, acts: list[np.ndarray], p: int) -> np.ndarray:
        C = self.coeffs[a]
        n = acts[0].shape[0] if acts else 0
        out = la.zeros(C.shape[0] * n, C.shape[1] * n)
        if n == 0:
            return out
        for g in range(self.group.order):
            blk = C[:, :, g] % p
            if np.any(blk):
                out = (out + np.kron(blk, acts[g])) % p
        return out


def periodic_resolution(G: FiniteGroup, length: int) -> Resolution:
    """The 2-periodic free resolution of F_p over a cyclic group."""
    g = G.generator()
    if g is None:
        raise ValueError("group is not cyclic")
    n = G.order
    diff = np.zeros((1, 1, n), dtype=np.int64)
    diff[0, 0, g] += 1
    diff[0, 0, 0] -= 1
    norm = np.ones((1, 1, n), dtype=np.int64)
    coeffs = [diff if a % 2 == 0 else norm for a in range(length)]
    return Resolution(G, [1] * (length + 1), coeffs, "periodic")


def bar_resolution(G: FiniteGroup, length: int) -> Resolution:
    """Inhomogeneous bar cochains: f(g_1..g_a) with the standard coboundary."""
    n = G.order
    ranks = [n ** a for a in range(length + 1)]
    coeffs = []
    for a in range(length):
        C = np.zeros((ranks[a + 1], ranks[a], n), dtype=np.int64)
        for r, tup in enumerate(itertools.product(range(n), repeat=a + 1)):
            C[r, _tuple_index(tup[1:], n), tup[0]] += 1
            for i in range(a):
                merged = tup[:i] + (G.mul(tup[i], tup[i + 1]),) + tup[i + 2:]
                C[r, _tuple_index(merged, n), 0] += (-1) ** (i + 1)
            C[r, _tuple_index(tup[:a], n), 0] += (-1) ** (a + 1)
        coeffs.append(C)
    return Resolution(G, ranks, coeffs, "bar")


def _tuple_index(tup, n: int) -> int:
    i = 0
    for x in tup:
        i = i * n + x
    return i


def default_resolution(G: FiniteGroup, length: int) -> Resolution:
    return periodic_resolution(G, length) if G.generator() is not None else bar_resolution(G, length)


def group_cochains(res: Resolution, acts: list[np.ndarray], p: int) -> Complex:
    n = acts[0].shape[0] if acts else 0
    dims = [r * n for r in res.ranks]
    diffs = [res.cochain_diff(a, acts, p) for a in range(res.length)]
    return Complex(p, dims, diffs)


def group_cohomology(res: Resolution, acts: list[np.ndarray], p: int) -> list[int]:
    """dim H^a(K, M) for a = 0 .. length-1."""
    C = group_cochains(res, acts, p)
    return [C.betti(a) for a in range(res.length)]


# -- Tate cohomology of cyclic groups ---------------------------------------

def _cyclic_pair(g: np.ndarray, p: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    n = g.shape[0]
    I = la.eye(n)
    if not np.array_equal(_mat_power(g, order, p), I):
        raise ValueError(f"generator does not satisfy g^{order} = 1")
    N = la.zeros(n, n)
    x = I
    for _ in range(order):
        N = (N + x) % p
        x = la.matmul(g, x, p)
    return (g - I) % p, N


def _mat_power(g: np.ndarray, k: int, p: int) -> np.ndarray:
    out = la.eye(g.shape[0])
    for _ in range(k):
        out = la.matmul(g, out, p)
    return out


def tate_cohomology_cyclic(p: int, g: np.ndarray, i: int, order: int | None = None) -> CohomologyBasis:
    """Ĥ^i(ℤ/order, M) for M given by the matrix of a generator g.

    Even i: ker(g-1)/im N.  Odd i: ker N/im(g-1).
    """
    order = p if order is None else order
    g = la.mat(g, p)
    D, N = _cyclic_pair(g, p, order)
    n = g.shape[0]
    if i % 2 == 0:
        C = Complex(p, [n, n, n], [N, D])
    else:
        C = Complex(p, [n, n, n], [D, N])
    return C.cohomology(1)


# -- complexes of K-modules --------------------------------------------------

@dataclass
class KComplex:
    """Cochain complex of left K-modules, terms in degrees start..start+len-1."""

    group: FiniteGroup
    p: int
    dims: list[int]
    diffs: list[np.ndarray]
    actions: list[list[np.ndarray]]
    start: int = 0

    @property
    def stop(self) -> int:
        return self.start + len(self.dims) - 1

    def term(self, q: int) -> int:
        i = q - self.start
        return self.dims[i] if 0 <= i < len(self.dims) else 0

    def diff(self, q: int) -> np.ndarray:
        i = q - self.start
        if 0 <= i < len(self.diffs):
            return self.diffs[i]
        return la.zeros(self.term(q + 1), self.term(q))

    def acts(self, q: int) -> list[np.ndarray]:
        i = q - self.start
        if 0 <= i < len(self.actions):
            return self.actions[i]
        return [la.zeros(0, 0)] * self.group.order

    def complex(self) -> Complex:
        return Complex(self.p, list(self.dims), list(self.diffs), self.start)

    def defects(self) -> list[str]:
        out = []
        if not self.complex().is_complex():
            out.append("d∘d != 0")
        for q in range(self.start, self.stop + 1):
            out += [f"term {q}: {m}" for m in check_action(self.group, self.acts(q), self.p)]
            for g in range(self.group.order):
                if not np.array_equal(la.matmul(self.diff(q), self.acts(q)[g], self.p),
                                      la.matmul(self.acts(q + 1)[g], self.diff(q), self.p)):
                    out.append(f"differential at {q} is not equivariant")
                    break
        return out

    def cohomology_module(self, q: int) -> tuple[CohomologyBasis, list[np.ndarray]]:
        """H^q with the induced K-action."""
        b = self.complex().cohomology(q)
        if b.dim == 0:
            return b, [la.zeros(0, 0)] * self.group.order
        mats = [b.coords(la.matmul(A, b.reps, self.p)) for A in self.acts(q)]
        return b, mats

    def invariants(self) -> tuple[Complex, list[np.ndarray]]:
        """The subcomplex C^K, with the inclusion bases."""
        p, bases = self.p, []
        for q in range(self.start, self.stop + 1):
            n = self.term(q)
            if n == 0:
                bases.append(la.zeros(0, 0))
                continue
            rows = [(A - la.eye(n)) % p for A in self.acts(q)[1:]]
            bases.append(la.nullspace(np.vstack(rows), p) if rows else la.eye(n))
        diffs = []
        for i in range(len(self.dims) - 1):
            q = self.start + i
            img = la.matmul(self.diff(q), bases[i], p)
            x = la.solve(bases[i + 1], img, p) if bases[i + 1].shape[1] else la.zeros(0, bases[i].shape[1])
            diffs.append(x)
        return Complex(p, [B.shape[1] for B in bases], diffs, self.start), bases


def is_free_cyclic(acts: list[np.ndarray], G: FiniteGroup, p: int) -> bool:
    """Free over a cyclic p-group iff the norm has rank dim/|K|."""
    n = acts[0].shape[0]
    if n % G.order:
        return False
    g = G.generator()
    N = la.zeros(n, n)
    for h in G.powers(g):
        N = (N + acts[h]) % p
    return la.rank(N, p) == n // G.order


# -- total complexes ---------------------------------------------------------

@dataclass
class TotalComplex:
    complex: Complex
    comps: dict[int, list[tuple[int, int, int, int]]]  # m -> (a, q, offset, size)

    def block(self, m: int, a: int, q: int) -> slice | None:
        for a2, q2, off, size in self.comps.get(m, []):
            if (a2, q2) == (a, q):
                return slice(off, off + size)
        return None


def _total(kc: KComplex, m_lo: int, m_hi: int, columns, col_rank, hmap) -> TotalComplex:
    """Tot^m = ⊕_{a+q=m} C_a(C^q) for m in [m_lo, m_hi].

    ``columns(m)`` lists the allowed a for total degree m, ``col_rank(a)``
    is the number of copies of the module in column a and ``hmap(a, acts)``
    the horizontal map from column a to a+1.
    """
    p = kc.p
    comps, dims = {}, []
    for m in range(m_lo, m_hi + 1):
        off, lst = 0, []
        for a in columns(m):
            q = m - a
            size = col_rank(a) * kc.term(q)
            lst.append((a, q, off, size))
            off += size
        comps[m] = lst
        dims.append(off)
    diffs = []
    for m in range(m_lo, m_hi):
        D = la.zeros(dims[m + 1 - m_lo], dims[m - m_lo])
        tgt = {(a, q): (off, size) for a, q, off, size in comps[m + 1]}
        for a, q, off, size in comps[m]:
            if size == 0:
                continue
            if (a + 1, q) in tgt:
                o2, s2 = tgt[(a + 1, q)]
                if s2:
                    D[o2:o2 + s2, off:off + size] = hmap(a, kc.acts(q))
            if (a, q + 1) in tgt:
                o2, s2 = tgt[(a, q + 1)]
                if s2:
                    V = np.kron(la.eye(col_rank(a)), kc.diff(q))
                    D[o2:o2 + s2, off:off + size] = V if a % 2 == 0 else (-V) % p
        diffs.append(D)
    return TotalComplex(Complex(p, dims, diffs, m_lo), comps)


def hyper_total(kc: KComplex, res: Resolution, m_hi: int | None = None) -> tuple[TotalComplex, int]:
    """Tot of Hom_K(P, C) and the top total degree whose cohomology is exact
    for the truncated resolution."""
    A = res.length
    valid = A + kc.start - 1
    m_hi = valid if m_hi is None else m_hi
    if m_hi > valid:
        raise ResolutionTooShort(f"resolution range too short: total degree {m_hi} needs length {m_hi - kc.start + 1}")
    p = kc.p

    def columns(m):
        return [a for a in range(0, A + 1) if kc.start <= m - a <= kc.stop]

    T = _total(kc, kc.start, m_hi + 1, columns, lambda a: res.ranks[a],
               lambda a, acts: res.cochain_diff(a, acts, p))
    return T, valid


def tate_total(kc: KComplex, m_lo: int, m_hi: int) -> TotalComplex:
    """Tot^{m_lo..m_hi} of the complete cochains Ĉ^a(C^q) = C^q, a ∈ ℤ, cyclic K."""
    g = kc.group.generator()
    if g is None:
        raise ValueError("Tate cochains are implemented for cyclic groups")
    p = kc.p
    gpow = kc.group.powers(g)

    def columns(mm):
        return [mm - q for q in range(kc.start, kc.stop + 1)]

    def hmap(a, acts):
        n = acts[0].shape[0]
        if a % 2 == 0:
            return (acts[g] - la.eye(n)) % p
        N = la.zeros(n, n)
        for h in gpow:
            N = (N + acts[h]) % p
        return N

    return _total(kc, m_lo, m_hi, columns, lambda a: 1, hmap)


def hyper_tate(kc: KComplex) -> tuple[int, int]:
    """(dim Ĥ^0, dim Ĥ^1) of the complete hypercohomology; it is 2-periodic."""
    out = []
    T = tate_total(kc, -1, 2)
    for m in (0, 1):
        out.append(T.complex.betti(m))
    return out[0], out[1]


def _total_map(src: TotalComplex, dst: TotalComplex, maps: dict[int, np.ndarray],
               col_rank, m: int) -> np.ndarray:
    """Tot^m(src) -> Tot^m(dst) from termwise maps q -> maps[q]."""
    M = la.zeros(dst.complex.term(m), src.complex.term(m))
    for a, q, off, size in src.comps.get(m, []):
        blk = dst.block(m, a, q)
        if blk is None or size == 0 or blk.stop == blk.start:
            continue
        M[blk, off:off + size] = np.kron(la.eye(col_rank(a)), maps[q])
    return M


# -- truncation of a K-complex and the two-row analysis ----------------------

def truncation_pair(kc: KComplex, b: int):
    """τ<=b C -> C -> C/τ<=b C with termwise inclusion and projection maps."""
    p, G = kc.p, kc.group
    Z = la.nullspace(kc.diff(b), p) if kc.term(b) else la.zeros(0, 0)
    comp = la.complement_in(Z, la.eye(kc.term(b)), p) if kc.term(b) else la.zeros(0, 0)
    sub_dims, sub_diffs, sub_acts, quot_dims, quot_diffs, quot_acts = [], [], [], [], [], []
    incl, proj = {}, {}
    for q in range(kc.start, kc.stop + 1):
        n = kc.term(q)
        if q < b:
            sub_dims.append(n)
            sub_acts.append(kc.acts(q))
            quot_dims.append(0)
            quot_acts.append([la.zeros(0, 0)] * G.order)
            incl[q] = la.eye(n)
            proj[q] = la.zeros(0, n)
        elif q == b:
            z = Z.shape[1]
            sub_dims.append(z)
            sub_acts.append([la.solve(Z, la.matmul(A, Z, p), p) if z else la.zeros(0, 0) for A in kc.acts(q)])
            c = comp.shape[1]
            quot_dims.append(c)
            basis = np.hstack([comp, Z])

            def mod_z(x, c=c, basis=basis):
                return la.solve(basis, x, p)[:c]

            quot_acts.append([mod_z(la.matmul(A, comp, p)) if c else la.zeros(0, 0) for A in kc.acts(q)])
            incl[q] = Z
            proj[q] = mod_z(la.eye(n)) if c else la.zeros(0, n)
        else:
            sub_dims.append(0)
            sub_acts.append([la.zeros(0, 0)] * G.order)
            quot_dims.append(n)
            quot_acts.append(kc.acts(q))
            incl[q] = la.zeros(n, 0)
            proj[q] = la.eye(n)
    for q in range(kc.start, kc.stop):
        i = q - kc.start
        if q + 1 < b:
            sub_diffs.append(kc.diff(q))
        elif q + 1 == b:
            # the image of d lies in Z^b; write it in the basis Z
            sub_diffs.append(la.solve(Z, kc.diff(q), p) if Z.shape[1] else la.zeros(0, kc.term(q)))
        else:
            sub_diffs.append(la.zeros(sub_dims[i + 1], sub_dims[i]))
        if q < b:
            quot_diffs.append(la.zeros(quot_dims[i + 1], quot_dims[i]))
        elif q == b:
            quot_diffs.append(la.matmul(kc.diff(q), comp, p) if comp.shape[1] else la.zeros(quot_dims[i + 1], 0))
        else:
            quot_diffs.append(kc.diff(q))
    sub = KComplex(G, p, sub_dims, sub_diffs, sub_acts, kc.start)
    quot = KComplex(G, p, quot_dims, quot_diffs, quot_acts, kc.start)
    return sub, quot, incl, proj


def _connecting(sub_T: TotalComplex, tot_T: TotalComplex, quot_T: TotalComplex,
                incl, proj, col_rank, m: int, p: int) -> tuple[np.ndarray, CohomologyBasis, CohomologyBasis]:
    """H^m(Tot quot) -> H^{m+1}(Tot sub)."""
    src = quot_T.complex.cohomology(m)
    dst = sub_T.complex.cohomology(m + 1)
    g = _total_map(tot_T, quot_T, proj, col_rank, m)
    f_next = _total_map(sub_T, tot_T, incl, col_rank, m + 1)
    M = connecting_map(tot_T.complex.diff(m), f_next, g, src, dst, p)
    return M, src, dst


@dataclass
class TwoRowReport:
    rows: tuple[int, int]
    e2: dict[tuple[int, int], int]
    total: dict[int, int]  # H^m(Tot), from the full double complex
    invariants: dict[int, int]  # H^m(C^K), computed directly
    d_rank: dict[int, int]  # column a of row t -> rank of d: E^{a,t} -> E^{a+t-b+1,b}
    iso_positive: bool
    surjective_zero: bool
    abutment_ok: bool
    problems: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.iso_positive and self.surjective_zero and self.abutment_ok and not self.problems


def two_row_analysis(kc: KComplex, columns: int = 6) -> TwoRowReport:
    """Replay the collapse of the spectral sequence H^a(K, H^q C) => H(C^K)
    for a complex whose cohomology sits in two rows b < t."""
    p, G = kc.p, kc.group
    C = kc.complex()
    rows = [q for q in range(kc.start, kc.stop + 1) if C.betti(q)]
    problems = []
    if len(rows) != 2:
        raise ValueError(f"cohomology must occupy exactly two rows, found {rows}")
    b, t = rows
    r = t - b + 1
    length = columns + r + 2
    res = default_resolution(G, length)
    e2 = {}
    for q in (b, t):
        _, acts = kc.cohomology_module(q)
        dims = group_cohomology(res, acts, p)
        for a in range(length):
            e2[(a, q)] = dims[a]
    sub, quot, incl, proj = truncation_pair(kc, b)
    m_hi = t + columns + 1
    T, valid = hyper_total(kc, res, m_hi)
    Ts, _ = hyper_total(sub, res, m_hi)
    Tq, _ = hyper_total(quot, res, m_hi)
    for m in range(kc.start, m_hi + 1):
        if Ts.complex.betti(m) != e2.get((m - b, b), 0):
            problems.append(f"τ<=b hypercohomology differs from H(K, H^b) at {m}")
        if Tq.complex.betti(m) != e2.get((m - t, t), 0):
            problems.append(f"quotient hypercohomology differs from H(K, H^t) at {m}")
    d_rank = {}
    iso_pos, surj0 = True, True
    for a in range(columns + 1):
        m = a + t
        M, src, dst = _connecting(Ts, T, Tq, incl, proj, lambda x: res.ranks[x], m, p)
        rk = la.rank(M, p) if M.size else 0
        d_rank[a] = rk
        if a == 0:
            surj0 = rk == dst.dim
        elif not rk == src.dim == dst.dim:
            iso_pos = False
    total = {m: T.complex.betti(m) for m in range(kc.start, m_hi + 1)}
    inv, _ = kc.invariants()
    invariants = {m: inv.betti(m) for m in range(kc.start, m_hi + 1)}
    abut = total == invariants
    # the abutment also follows from E_2 and the ranks of d
    for m in range(kc.start, t + columns + 1):
        a_t = m - t
        expect = e2.get((m - b, b), 0) - (d_rank.get(m - b - r, 0) if m - b - r >= 0 else 0)
        if a_t >= 0:
            expect += e2.get((a_t, t), 0) - d_rank.get(a_t, 0)
        if expect != total[m]:
            abut = False
            problems.append(f"E_2 with d does not reproduce the abutment at {m}")
    return TwoRowReport((b, t), e2, total, invariants, d_rank, iso_pos, surj0, abut, problems)


@dataclass
class TateShiftReport:
    applicable: bool
    shift: int
    hyper_tate: tuple[int, int]
    pairs: dict[int, tuple[int, int, int]]  # i -> (dim Ĥ^i(H^t), dim Ĥ^{i+shift}(H^b), rank)
    ok: bool


def tate_shift_check(kc: KComplex, irange=range(-3, 4)) -> TateShiftReport:
    """Ĥ^i(K, H^t) ≅ Ĥ^{i+t-b+1}(K, H^b), through the complete hypercohomology
    connecting map, against Tate groups of the two rows computed directly."""
    p, G = kc.p, kc.group
    C = kc.complex()
    rows = [q for q in range(kc.start, kc.stop + 1) if C.betti(q)]
    if len(rows) != 2:
        raise ValueError(f"cohomology must occupy exactly two rows, found {rows}")
    b, t = rows
    shift = t - b + 1
    ht = hyper_tate(kc)
    applicable = ht == (0, 0)
    g = G.generator()
    _, acts_b = kc.cohomology_module(b)
    _, acts_t = kc.cohomology_module(t)
    sub, quot, incl, proj = truncation_pair(kc, b)
    pairs, ok = {}, applicable
    for i in irange:
        top = tate_cohomology_cyclic(p, acts_t[g], i, G.order).dim if acts_t[g].size else 0
        bot = tate_cohomology_cyclic(p, acts_b[g], i + shift, G.order).dim if acts_b[g].size else 0
        m = i + t
        T, Ts, Tq = (tate_total(c, m - 1, m + 2) for c in (kc, sub, quot))
        M, src, dst = _connecting(Ts, T, Tq, incl, proj, lambda a: 1, m, p)
        rk = la.rank(M, p) if M.size else 0
        if src.dim != top or dst.dim != bot:
            ok = False
        if applicable and not (rk == top == bot):
            ok = False
        pairs[i] = (top, bot, rk)
    return TateShiftReport(applicable, shift, ht, pairs, ok)


# -- seeded two-row instances -------------------------------------------------

@dataclass
class TwoRowInstance:
    seed: int
    kc: KComplex
    rows: tuple[int, int]


def random_two_row(seed: int, p: int | None = None, free: bool = True) -> TwoRowInstance:
    """Free ℤ/p-complex with cohomology in rows b < t.

    Built from truncated periodic complexes F[K] -x^s-> F[K] -x^{p-s}-> ...,
    x = g - 1, together with free classes in the two rows and contractible
    pairs, then conjugated by random equivariant automorphisms.  With
    ``free=False`` a trivial module is added in row b, which makes the
    complete hypercohomology nonzero.
    """
    rng = np.random.default_rng(seed)
    p = int(rng.choice([2, 3, 5])) if p is None else p
    G = FiniteGroup.cyclic(p)
    reg = regular_action(G, p)
    X = (reg[1] - la.eye(p)) % p
    b = int(rng.integers(0, 2))
    t = b + int(rng.integers(1, 4))
    blocks = []  # (start, list of exponents) ; each term a copy of F[K]
    for _ in range(int(rng.integers(1, 3))):
        s = int(rng.integers(1, p)) if p > 2 else 1
        exps = [s if (q - b) % 2 == 0 else p - s for q in range(b, t)]
        blocks.append((b, exps))
    for _ in range(int(rng.integers(0, 3))):
        blocks.append((int(rng.choice([b, t])), []))
    for _ in range(int(rng.integers(0, 3))):
        q = int(rng.integers(b, t))
        blocks.append((q, [0]))
    counts = {q: 0 for q in range(b, t + 1)}
    place = []
    for start, exps in blocks:
        pos = {}
        for i in range(len(exps) + 1):
            q = start + i
            pos[q] = counts[q]
            counts[q] += 1
        place.append(pos)
    dims = [p * counts[q] for q in range(b, t + 1)]
    diffs = []
    for q in range(b, t):
        D = la.zeros(dims[q + 1 - b], dims[q - b])
        for (start, exps), pos in zip(blocks, place):
            i = q - start
            if 0 <= i < len(exps):
                r0, c0 = pos[q + 1] * p, pos[q] * p
                D[r0:r0 + p, c0:c0 + p] = _mat_power(X, exps[i], p)
        diffs.append(D)
    acts = [[np.kron(la.eye(counts[q]), A) for A in reg] for q in range(b, t + 1)]
    if not free:
        # a trivial summand in row b, with zero maps
        dims[0] += 1
        acts[0] = [_block_diag(A, la.eye(1)) for A in acts[0]]
        if diffs:
            diffs[0] = np.hstack([diffs[0], la.zeros(dims[1], 1)])
    # random equivariant change of basis in every term
    Ps = []
    for qi, q in enumerate(range(b, t + 1)):
        n = counts[q]
        P = la.eye(dims[qi])
        if n:
            while True:
                A0 = rng.integers(0, p, size=(n, n))
                if la.rank(A0, p) == n:
                    break
            M = np.kron(A0 % p, la.eye(p))
            Xk = la.eye(p)
            for _ in range(1, p):
                Xk = la.matmul(X, Xk, p)
                M = (M + np.kron(rng.integers(0, p, size=(n, n)), Xk)) % p
            P[:n * p, :n * p] = M
        Ps.append(P)
    for i in range(len(diffs)):
        diffs[i] = la.matmul(la.matmul(Ps[i + 1], diffs[i], p), la.inverse(Ps[i], p), p)
    kc = KComplex(G, p, dims, diffs, acts, b)
    return TwoRowInstance(seed, kc, (b, t))


def _block_diag(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    out = la.zeros(A.shape[0] + B.shape[0], A.shape[1] + B.shape[1])
    out[:A.shape[0], :A.shape[1]] = A
    out[A.shape[0]:, A.shape[1]:] = B
    return out


# -- poset coverings and K-actions -------------------------------------------

@dataclass
class PosetCovering:
    P: RankedPoset
    Q: RankedPoset
    pi: dict[str, str]

    def fiber(self, y: str) -> list[str]:
        return [x for x in self.P.elements if self.pi[x] == y]


def maximal_chains(Q: RankedPoset) -> list[list[str]]:
    up = {x: [] for x in Q.elements}
    has_down = set()
    for a, b in Q.covers:
        up[a].append(b)
        has_down.add(b)
    out = []

    def walk(chain):
        nxt = up[chain[-1]]
        if not nxt:
            out.append(chain)
        for y in nxt:
            walk(chain + [y])

    for x in Q.elements:
        if x not in has_down:
            walk([x])
    return out


@dataclass
class CoveringReport:
    ok: bool
    sheets: int | None
    failing_chain: list[str] | None = None
    problems: list[str] = field(default_factory=list)


def check_covering(cov: PosetCovering) -> CoveringReport:
    P, Q, pi = cov.P, cov.Q, cov.pi
    problems = [f"source: {m}" for m in validate_ranked_poset(P)]
    problems += [f"target: {m}" for m in validate_ranked_poset(Q)]
    for x in P.elements:
        if x not in pi or pi[x] not in Q.corank:
            problems.append(f"{x} has no image")
        elif P.corank[x] != Q.corank[pi[x]]:
            problems.append(f"{x} and its image have different coranks")
    if problems:
        return CoveringReport(False, None, None, problems)
    for a, b in P.covers:
        if not Q.leq(pi[a], pi[b]):
            problems.append(f"π is not monotone on {a} < {b}")
    if problems:
        return CoveringReport(False, None, None, problems)
    sheets = None
    for chain in maximal_chains(Q):
        pre = [x for x in P.elements if pi[x] in chain]
        comps = _components(P, pre)
        for comp in comps:
            images = sorted(pi[x] for x in comp)
            total = all(P.leq(a, b) or P.leq(b, a) for a, b in itertools.combinations(comp, 2))
            if images != sorted(chain) or not total:
                return CoveringReport(False, sheets, chain, [f"preimage of {chain} is not a union of chain copies"])
        if sheets is None:
            sheets = len(comps)
        elif sheets != len(comps):
            return CoveringReport(False, sheets, chain, ["sheet count varies between chains"])
    return CoveringReport(True, sheets)


def _components(P: RankedPoset, elems: list[str]) -> list[list[str]]:
    left, out = set(elems), []
    while left:
        x = left.pop()
        comp, stack = [x], [x]
        while stack:
            y = stack.pop()
            for z in list(left):
                if P.leq(y, z) or P.leq(z, y):
                    left.remove(z)
                    comp.append(z)
                    stack.append(z)
        out.append(comp)
    return out


@dataclass
class KAction:
    """K acting on P by poset maps, with isomorphisms F(kX) -> F(X).

    ``perms[k]`` maps each element X to kX.  ``maps[(k, X)][e]`` holds the
    images in L of the basis of F(kX) in degree e.
    """

    group: FiniteGroup
    perms: list[dict[str, str]]
    maps: dict[tuple[int, str], dict[int, np.ndarray]]


def _solve_colimit(PF_src: PosetFiltration, images: dict[str, np.ndarray], e: int, n_out: int,
                   p: int) -> np.ndarray | None:
    """The unique map on Σ F(X) sending the basis of each F(X) to images[X]."""
    B = [PF_src.basis(x, e) for x in images]
    I = [images[x] for x in images]
    n_in = PF_src.L.dim(e)
    if n_in == 0:
        return la.zeros(n_out, 0)
    Bc, Ic = np.hstack(B), np.hstack(I)
    if Bc.shape[1] == 0:
        return la.zeros(n_out, n_in)
    Xt = la.solve(Bc.T.copy(), Ic.T.copy(), p)
    if Xt is None:
        return None
    return Xt.T.copy() % p


def induced_k_action(act: KAction, PF: PosetFiltration) -> list[dict[int, np.ndarray]]:
    """Matrices ρ_k on L (a right action: ρ_k ρ_h = ρ_{hk})."""
    P, L, p = PF.poset, PF.L, PF.L.p
    G = act.group
    out = []
    for k in range(G.order):
        mats = {}
        for e in L.degrees():
            images = {x: act.maps[(k, x)].get(e, la.zeros(L.dim(e), PF.basis(act.perms[k][x], e).shape[1]))
                      for x in P.elements}
            # the basis of F(kX) goes to images[X]
            M = _solve_colimit(PF, {act.perms[k][x]: images[x] for x in P.elements}, e, L.dim(e), p)
            if M is None:
                raise ValueError(f"the maps F(kX) -> F(X) do not glue in degree {e} for k = {k}")
            mats[e] = M
        out.append(mats)
    problems = check_k_action(act, PF, out)
    if problems:
        raise ValueError("; ".join(problems[:3]))
    return out


def check_k_action(act: KAction, PF: PosetFiltration, rho: list[dict[int, np.ndarray]]) -> list[str]:
    P, L, p, G = PF.poset, PF.L, PF.L.p, act.group
    out = []
    for k in range(G.order):
        perm = act.perms[k]
        for a, b in P.covers:
            if not P.leq(perm[a], perm[b]):
                out.append(f"k = {k} does not preserve the order on {a} < {b}")
        for x in P.elements:
            if P.corank[perm[x]] != P.corank[x]:
                out.append(f"k = {k} changes the corank of {x}")
    for e in L.degrees():
        if not np.array_equal(rho[0][e] % p, la.eye(L.dim(e))):
            out.append(f"identity acts nontrivially in degree {e}")
            break
    for k in range(G.order):
        for h in range(G.order):
            for e in L.degrees():
                if not np.array_equal(la.matmul(rho[k][e], rho[h][e], p), rho[G.mul(h, k)][e] % p):
                    out.append(f"ρ_{k} ρ_{h} != ρ_{G.mul(h, k)} in degree {e}")
                    break
    s = L.sigma
    for k in range(G.order):
        for e in L.degrees():
            if not L.known(e + s) or e + s > L.hi:
                continue
            for j in range(L.w):
                if not np.array_equal(la.matmul(L.act(j, e), rho[k][e], p),
                                      la.matmul(rho[k][e + s], L.act(j, e), p)):
                    out.append(f"ρ_{k} is not linear in degree {e}")
                    break
    return out


def left_action(G: FiniteGroup, rho: list[dict[int, np.ndarray]]) -> list[dict[int, np.ndarray]]:
    return [rho[G.inv(k)] for k in range(G.order)]


def free_on_elements(act: KAction, elems: list[str]) -> bool:
    """K acts freely on the given elements."""
    for k in range(1, act.group.order):
        if any(act.perms[k][x] == x for x in elems):
            return False
    return True


# -- bundles -----------------------------------------------------------------

@dataclass
class KBundle:
    """A morphism (Q, G, N) -> (P, F, L) over a covering, with K acting on P.

    ``eta[X][e]`` holds the images in L of the basis of G(πX) in degree e.
    """

    covering: PosetCovering
    N_pf: PosetFiltration
    L_pf: PosetFiltration
    eta: dict[str, dict[int, np.ndarray]]
    action: KAction
    N_frf: FreeRankFiltration
    L_frf: FreeRankFiltration


def induced_map(B: KBundle) -> dict[int, np.ndarray]:
    """π*: N -> L, determined on each G(Y) by Σ_{X over Y} η_X."""
    N, L = B.N_pf.L, B.L_pf.L
    if (N.lo, N.hi) != (L.lo, L.hi):
        raise ValueError("N and L live on different windows")
    p = L.p
    out = {}
    for e in N.degrees():
        images = {}
        for y in B.covering.Q.elements:
            acc = la.zeros(L.dim(e), B.N_pf.basis(y, e).shape[1])
            for x in B.covering.fiber(y):
                M = B.eta[x].get(e)
                if M is not None and M.size:
                    acc = (acc + M) % p
            images[y] = acc
        M = _solve_colimit(B.N_pf, images, e, L.dim(e), p)
        if M is None:
            raise ValueError(f"π* is not well defined in degree {e}")
        out[e] = M
    return out


@dataclass
class KBundleReport:
    problems: list[str] = field(default_factory=list)
    covering: CoveringReport | None = None
    free_fibers: bool = True
    eta_iso: bool = True
    injective: bool = True
    invariant: bool = True
    dl_free: bool = True
    dn_is_invariants: bool = True
    certified: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (not self.problems and self.covering is not None and self.covering.ok and self.free_fibers
                and self.injective and self.invariant and self.dl_free and self.dn_is_invariants)


@dataclass
class BundleDuflot:
    DN: DuflotComplex
    DL: DuflotComplex
    pi_star: dict[tuple[int, int], np.ndarray]
    rho: list[dict[tuple[int, int], np.ndarray]]  # left K-action on DL


def bundle_duflot(B: KBundle, degrees) -> BundleDuflot:
    """DN, DL at common levels, the chain map π* and the K-action on DL."""
    degrees = list(degrees)
    lv = common_levels(B.N_frf, B.L_frf, degrees=degrees)
    DN = duflot_complex(B.N_frf, degrees, min_levels=lv)
    DL = duflot_complex(B.L_frf, degrees, min_levels=lv)
    ps = duflot_map(DN, DL, induced_map(B))
    rho = induced_k_action(B.action, B.L_pf)
    G = B.action.group
    left = left_action(G, rho)
    acts = [duflot_map(DL, DL, left[k]) for k in range(G.order)]
    return BundleDuflot(DN, DL, ps, acts)


def k_complex_at(BD: BundleDuflot, G: FiniteGroup, d: int) -> KComplex:
    DL, p = BD.DL, BD.DL.frf.L.p
    J = DL.top + 1
    dims = [DL.term(j, d) for j in range(J)]
    diffs = [DL.diff(j, d) for j in range(J - 1)]
    acts = [[BD.rho[k].get((j, d), la.zeros(dims[j], dims[j])) for k in range(G.order)] for j in range(J)]
    return KComplex(G, p, dims, diffs, acts, 0)


def check_kbundle(B: KBundle, degrees=None) -> KBundleReport:
    rep = KBundleReport()
    cov, act, G = B.covering, B.action, B.action.group
    N, L = B.N_pf.L, B.L_pf.L
    p = L.p
    rep.covering = check_covering(cov)
    if not rep.covering.ok:
        rep.problems += rep.covering.problems or ["covering check failed"]
        return rep
    # K acts on fibers, freely and transitively, and trivially on Q
    for y in cov.Q.elements:
        fib = cov.fiber(y)
        for k in range(G.order):
            if any(cov.pi[act.perms[k][x]] != y for x in fib):
                rep.problems.append(f"K moves the fiber over {y}")
        if fib:
            orbit = {act.perms[k][fib[0]] for k in range(G.order)}
            if orbit != set(fib):
                rep.problems.append(f"K is not transitive on the fiber over {y}")
    rep.free_fibers = free_on_elements(act, cov.P.elements)
    # η_X: G(πX) -> F(X) are isomorphisms, and the equivariance squares commute
    rho = induced_k_action(act, B.L_pf)
    for x in cov.P.elements:
        for e in L.degrees():
            M = B.eta[x].get(e)
            if M is None or M.shape[1] == 0:
                continue
            if la.rank(M, p) != M.shape[1] or not la.in_span(B.L_pf.basis(x, e), M, p) \
                    or M.shape[1] != B.L_pf.basis(x, e).shape[1]:
                rep.eta_iso = False
            for k in range(G.order):
                kx = act.perms[k][x]
                lhs = la.matmul(rho[k][e], B.eta[kx][e], p)
                if not np.array_equal(lhs, M % p):
                    rep.problems.append(f"equivariance fails at {x}, k = {k}, degree {e}")
                    break
    bad = validate_frf_matches(B)
    rep.problems += bad
    pi = induced_map(B)
    s = L.sigma
    for e in N.degrees():
        if N.dim(e) and la.rank(pi[e], p) != N.dim(e):
            rep.injective = False
        for k in range(G.order):
            if not np.array_equal(la.matmul(rho[k][e], pi[e], p), pi[e] % p):
                rep.invariant = False
        if e + s <= N.hi:
            for j in range(N.w):
                if not np.array_equal(la.matmul(L.act(j, e), pi[e], p), la.matmul(pi[e + s], N.act(j, e), p)):
                    rep.problems.append(f"π* is not linear in degree {e}")
    if is_filtered(B.N_frf, B.L_frf, pi):
        rep.problems.append("π* does not preserve the filtrations")
        return rep
    if degrees is None:
        return rep
    BD = bundle_duflot(B, degrees)
    rep.certified = [d for d in BD.DN.certified if d in BD.DL.certified]
    if chain_map_defects(BD.DN, BD.DL, BD.pi_star):
        rep.problems.append("π* does not commute with the Duflot differentials")
    for k in range(G.order):
        if chain_map_defects(BD.DL, BD.DL, BD.rho[k]):
            rep.problems.append(f"K-action of {k} does not commute with the Duflot differentials")
    cyclic = G.generator() is not None
    for d in rep.certified:
        kc = k_complex_at(BD, G, d)
        for j in range(kc.start, kc.stop + 1):
            n = kc.term(j)
            if n == 0:
                continue
            if cyclic and not is_free_cyclic(kc.acts(j), G, p):
                rep.dl_free = False
            inv = kc.invariants()[1][j - kc.start]
            img = BD.pi_star[(j, d)]
            if la.rank(img, p) != img.shape[1] or inv.shape[1] != img.shape[1] or \
                    not la.in_span(inv, img, p):
                rep.dn_is_invariants = False
    if not rep.free_fibers:
        rep.dl_free = False
    return rep


def validate_frf_matches(B: KBundle) -> list[str]:
    """The N-filtrations induced by the poset filtrations match the free rank ones."""
    out = []
    for name, PF, F in (("N", B.N_pf, B.N_frf), ("L", B.L_pf, B.L_frf)):
        p = PF.L.p
        for j in range(F.top + 1):
            lev = PF.level(j)
            for e in PF.L.degrees():
                a, b = lev[e], F.basis(j, e)
                if a.shape[1] != b.shape[1] or not la.in_span(a, b, p):
                    out.append(f"{name}: level {j} differs from the poset filtration in degree {e}")
                    break
    return out


@dataclass
class SSReport:
    degree: int
    e2: dict[tuple[int, int], int]
    total: dict[int, int]
    dn: dict[int, int]
    valid_upto: int
    ok: bool


def hypercohomology_ss(B: KBundle, degrees, columns: int = 4,
                       BD: BundleDuflot | None = None, length: int | None = None,
                       m_hi: int | None = None) -> list[SSReport]:
    """E_2 = H^a(K, H^q(DL)) and H(Tot Hom_K(P, DL)) against H(DN), per degree.

    ``length`` truncates the stored resolution (default: long enough for
    every total degree of DL); asking for total degrees up to ``m_hi``
    beyond its reach raises ResolutionTooShort.
    """
    G = B.action.group
    p = B.L_pf.L.p
    BD = bundle_duflot(B, degrees) if BD is None else BD
    out = []
    for d in BD.DL.certified:
        if d not in BD.DN.certified:
            continue
        kc = k_complex_at(BD, G, d)
        res = default_resolution(G, columns + kc.stop + 2 if length is None else length)
        e2 = {}
        for q in range(kc.start, kc.stop + 1):
            _, acts = kc.cohomology_module(q)
            if acts[0].size == 0:
                continue
            for a, v in enumerate(group_cohomology(res, acts, p)[:columns + 1]):
                if v:
                    e2[(a, q)] = v
        T, valid = hyper_total(kc, res, m_hi)
        valid = valid if m_hi is None else m_hi
        total = {m: T.complex.betti(m) for m in range(kc.start, valid + 1)}
        DN = BD.DN
        dn = {}
        for m in range(kc.start, valid + 1):
            n = DN.term(m, d)
            dn[m] = 0 if n == 0 else n - la.rank(DN.diff(m, d), p) - la.rank(DN.diff(m - 1, d), p)
        out.append(SSReport(d, e2, total, dn, valid, total == dn))
    return out


def module_action_from_generator(g: np.ndarray, order: int, p: int) -> list[np.ndarray]:
    """Left action of ℤ/order where the element k acts as g^k."""
    out, x = [], la.eye(g.shape[0])
    for _ in range(order):
        out.append(x)
        x = la.matmul(g, x, p)
    return out
