"""Finite p-groups as permutation groups: wreath products, p-tori,
centralizers, i-triviality and the tower W(n) ⊇ E(n).

Permutations are tuples on {0..m-1}; files and printed output use 1-based
disjoint-cycle notation.  Every operation enumerates elements, so the order
of each group involved is capped (default 10^5, overridable through the
``FREERANK_CAP`` environment variable); exceeding the cap raises
:class:`CapExceeded` instead of approximating.
"""

from __future__ import annotations

import math
import os
import re
from collections import deque
from dataclasses import dataclass, field

Perm = tuple[int, ...]


class CapExceeded(Exception):
    pass


def default_cap() -> int:
    return int(os.environ.get("FREERANK_CAP", "100000"))


def mul(a: Perm, b: Perm) -> Perm:
    """(a b)(x) = a(b(x))."""
    return tuple(a[x] for x in b)


def inv(a: Perm) -> Perm:
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


def identity(m: int) -> Perm:
    return tuple(range(m))


def order_of(a: Perm) -> int:
    n, seen = 1, [False] * len(a)
    for i in range(len(a)):
        if seen[i]:
            continue
        k, j = 0, i
        while not seen[j]:
            seen[j] = True
            j = a[j]
            k += 1
        n = n * k // math.gcd(n, k)
    return n


def parse_cycles(text: str, m: int) -> Perm:
    """'(1,2)(3,4,5)' on {1..m}; '()' is the identity."""
    out = list(range(m))
    text = text.replace(" ", "")
    if not re.fullmatch(r"(\((\d+(,\d+)*)?\))*", text):
        raise ValueError(f"bad cycle notation {text!r}")
    seen = set()
    for cyc in re.findall(r"\(([^()]*)\)", text):
        if not cyc:
            continue
        pts = [int(x) - 1 for x in cyc.split(",")]
        for x in pts:
            if not 0 <= x < m:
                raise ValueError(f"point {x + 1} outside 1..{m}")
            if x in seen:
                raise ValueError(f"point {x + 1} repeated")
            seen.add(x)
        for a, b in zip(pts, pts[1:] + pts[:1]):
            out[a] = b
    return tuple(out)


def format_cycles(a: Perm) -> str:
    seen, parts = set(), []
    for i in range(len(a)):
        if i in seen or a[i] == i:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(str(j + 1))
            j = a[j]
        parts.append("(" + ",".join(cyc) + ")")
    return "".join(parts) or "()"


def closure(gens: list[Perm], m: int, cap: int) -> list[Perm]:
    """All products of the generators, breadth first from the identity."""
    e = identity(m)
    seen = {e}
    out = [e]
    queue = deque([e])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = mul(g, x)
            if y not in seen:
                seen.add(y)
                out.append(y)
                if len(out) > cap:
                    raise CapExceeded(f"group has more than {cap} elements")
                queue.append(y)
    return out


def is_p_power(n: int, p: int) -> bool:
    while n % p == 0 and n > 1:
        n //= p
    return n == 1


@dataclass
class PGroup:
    gens: list[Perm]
    p: int
    degree: int
    cap: int = field(default_factory=default_cap)
    _elements: list[Perm] | None = field(default=None, repr=False)

    def __post_init__(self):
        for g in self.gens:
            if len(g) != self.degree or sorted(g) != list(range(self.degree)):
                raise ValueError("generator is not a permutation of the right degree")

    def elements(self) -> list[Perm]:
        if self._elements is None:
            self._elements = closure(self.gens, self.degree, self.cap)
        return self._elements

    @property
    def order(self) -> int:
        return len(self.elements())

    def validate(self) -> list[str]:
        if not is_p_power(self.order, self.p):
            return [f"order {self.order} is not a power of {self.p}"]
        return []

    def whole(self) -> "Subgroup":
        return Subgroup(self, list(self.gens))

    def trivial(self) -> "Subgroup":
        return Subgroup(self, [])


@dataclass
class Subgroup:
    parent: PGroup
    gens: list[Perm]
    _elements: list[Perm] | None = field(default=None, repr=False)

    def elements(self) -> list[Perm]:
        if self._elements is None:
            self._elements = closure(self.gens, self.parent.degree, self.parent.cap)
        return self._elements

    @property
    def order(self) -> int:
        return len(self.elements())

    def key(self) -> frozenset:
        return frozenset(self.elements())

    def contains(self, g: Perm) -> bool:
        return g in self.key()

    def is_subset_of(self, other: "Subgroup") -> bool:
        return self.key() <= other.key()

    def is_normal(self) -> bool:
        S = self.key()
        for g in self.parent.gens:
            gi = inv(g)
            if any(mul(mul(g, s), gi) not in S for s in self.gens):
                return False
        return True

    def is_elementary_abelian(self) -> bool:
        p = self.parent.p
        gs = self.gens
        if any(order_of(g) not in (1, p) for g in gs):
            return False
        return all(mul(a, b) == mul(b, a) for a in gs for b in gs)

    @property
    def rank(self) -> int:
        """log_p of the order (meaningful for p-tori)."""
        return round(math.log(self.order, self.parent.p))


def subgroup_from_elements(G: PGroup, elems) -> Subgroup:
    """A subgroup with a small generating set chosen from ``elems``."""
    gens, have = [], {identity(G.degree)}
    for g in sorted(elems):
        if g not in have:
            gens.append(g)
            have = set(closure(gens, G.degree, G.cap))
    S = Subgroup(G, gens)
    S._elements = sorted(have)
    return S


# -- constructions -----------------------------------------------------------

def cyclic_group(p: int, cap: int | None = None) -> PGroup:
    cap = default_cap() if cap is None else cap
    return PGroup([tuple((i + 1) % p for i in range(p))], p, p, cap)


def trivial_group(p: int, degree: int = 1, cap: int | None = None) -> PGroup:
    cap = default_cap() if cap is None else cap
    return PGroup([], p, degree, cap)


def _check_order(n: int, cap: int) -> None:
    if n > cap:
        raise CapExceeded(f"group order {n} exceeds the cap {cap}")


def wreath(H: PGroup, p: int, cap: int | None = None) -> PGroup:
    """H ≀ ℤ/p on p blocks of H's points: copies of H on each block and the
    p-cycle permuting the blocks."""
    cap = H.cap if cap is None else cap
    m = H.degree
    _check_order(H.order ** p * p, cap)
    gens = []
    for b in range(p):
        for g in H.gens:
            x = list(range(m * p))
            for i in range(m):
                x[b * m + i] = b * m + g[i]
            gens.append(tuple(x))
    gens.append(tuple(((i // m + 1) % p) * m + i % m for i in range(m * p)))
    return PGroup(gens, p, m * p, cap)


def direct_power(G: PGroup, n: int, cap: int | None = None) -> PGroup:
    """G^n acting on n disjoint copies of G's points."""
    cap = G.cap if cap is None else cap
    _check_order(G.order ** n, cap)
    m = G.degree
    gens = []
    for b in range(n):
        for g in G.gens:
            x = list(range(m * n))
            for i in range(m):
                x[b * m + i] = b * m + g[i]
            gens.append(tuple(x))
    return PGroup(gens, G.p, m * n, cap)


def block_power(G: PGroup, S: Subgroup, n: int, big: PGroup) -> Subgroup:
    """S^n inside a group ``big`` whose points are n blocks of G's points."""
    m = G.degree
    gens = []
    for b in range(n):
        for g in S.gens:
            x = list(range(big.degree))
            for i in range(m):
                x[b * m + i] = b * m + g[i]
            gens.append(tuple(x))
    return Subgroup(big, gens)


# -- p-tori ----------------------------------------------------------------------

def order_p_elements(G: PGroup) -> list[Perm]:
    return [g for g in G.elements() if order_of(g) == G.p]


def p_tori(G: PGroup, min_rank: int = 0) -> list[Subgroup]:
    """Every elementary abelian p-subgroup of rank >= min_rank.

    Breadth-first: each torus of rank r is extended by the order-p elements
    commuting with it and outside it; subgroups are deduplicated by their
    element sets.
    """
    G.elements()
    p, m = G.p, G.degree
    e = identity(m)
    xs = order_p_elements(G)
    layer = {frozenset([e]): []}
    found = []
    while layer:
        nxt = {}
        for elems, gens in layer.items():
            S = Subgroup(G, gens)
            S._elements = sorted(elems)
            found.append(S)
            for x in xs:
                if x in elems or any(mul(x, g) != mul(g, x) for g in gens):
                    continue
                new = set(elems)
                y = e
                for _ in range(p - 1):
                    y = mul(x, y)
                    new |= {mul(y, t) for t in elems}
                key = frozenset(new)
                if key not in nxt:
                    nxt[key] = gens + [x]
        layer = nxt
    return [S for S in found if S.rank >= min_rank]


def max_torus_rank(G: PGroup) -> int:
    return max(S.rank for S in p_tori(G))


def conjugate_key(key: frozenset, g: Perm) -> frozenset:
    gi = inv(g)
    return frozenset(mul(mul(g, s), gi) for s in key)


def conjugacy_classes(G: PGroup, subgroups: list[Subgroup]) -> list[list[Subgroup]]:
    """Group subgroups into G-conjugacy classes (orbits under the generators)."""
    by_key = {S.key(): S for S in subgroups}
    classes, done = [], set()
    for S in subgroups:
        k0 = S.key()
        if k0 in done:
            continue
        orbit, queue = {k0}, deque([k0])
        while queue:
            k = queue.popleft()
            for g in G.gens:
                k2 = conjugate_key(k, g)
                if k2 not in orbit:
                    orbit.add(k2)
                    queue.append(k2)
        done |= orbit
        classes.append([by_key[k] for k in orbit if k in by_key])
    return classes


# -- centralizers and i-triviality -----------------------------------------------

def centralizer(G: PGroup, S: Subgroup) -> Subgroup:
    gens = S.gens
    elems = [g for g in G.elements() if all(mul(g, s) == mul(s, g) for s in gens)]
    return subgroup_from_elements(G, elems)


def center(G: PGroup) -> Subgroup:
    return centralizer(G, G.whole())


@dataclass
class ITrivialResult:
    value: bool
    witness: Subgroup | None = None


def is_i_trivial(G: PGroup, H: Subgroup, i: int, tori: list[Subgroup] | None = None) -> ITrivialResult:
    """Whether every p-torus of rank >= i has its centralizer inside H."""
    if not H.is_normal():
        raise ValueError("H is not normal in G")
    Hk = H.key()
    tori = p_tori(G, min_rank=i) if tori is None else [E for E in tori if E.rank >= i]
    bad = []
    for E in tori:
        C = centralizer(G, E)
        if not C.key() <= Hk:
            bad.append((E.rank, -C.order, sorted(E.elements()), E))
    if bad:
        # report the smallest violating torus with the largest centralizer
        return ITrivialResult(False, min(bad, key=lambda t: t[:3])[3])
    return ITrivialResult(True)


def triviality_index(G: PGroup, H: Subgroup, tori: list[Subgroup] | None = None) -> int:
    """The least i for which H is i-trivial in G."""
    tori = p_tori(G) if tori is None else tori
    top = max(E.rank for E in tori)
    i = top + 1
    while i > 0 and is_i_trivial(G, H, i - 1, tori).value:
        i -= 1
    return i


# -- the tower W(n) ⊇ E(n) ------------------------------------------------------

@dataclass
class TowerLevel:
    n: int
    W: PGroup
    E: Subgroup


def tower(n: int, p: int, cap: int | None = None) -> list[TowerLevel]:
    """W(1) = E(1) = ℤ/p;  W(k) = W(k-1) ≀ ℤ/p, E(k) = E(k-1)^p in the base."""
    cap = default_cap() if cap is None else cap
    W = cyclic_group(p, cap)
    out = [TowerLevel(1, W, W.whole())]
    for k in range(2, n + 1):
        prev = out[-1]
        W2 = wreath(prev.W, p, cap)
        E2 = block_power(prev.W, prev.E, p, W2)
        out.append(TowerLevel(k, W2, E2))
    return out


@dataclass
class TowerReport:
    n: int
    p: int
    order: int
    rank: int
    expected_rank: int
    normal: bool
    max_rank: int
    maximal: bool
    max_rank_count: int
    unique: bool
    quotient_ok: bool
    i_bound: int
    i_trivial: bool | None
    notes: list[str] = field(default_factory=list)
    W: PGroup | None = field(default=None, repr=False)
    E: Subgroup | None = field(default=None, repr=False)

    @property
    def certified(self) -> bool:
        ok = self.normal and self.maximal and self.rank == self.expected_rank and self.quotient_ok
        return ok and self.unique and self.i_trivial is not False


def en_tower(n: int, p: int, cap: int | None = None, check_triviality: bool = True) -> TowerReport:
    levels = tower(n, p, cap)
    W, E = levels[-1].W, levels[-1].E
    Wprev = levels[-2].W if n > 1 else trivial_group(p)
    tori = p_tori(W)
    top = max(S.rank for S in tori)
    tops = [S for S in tori if S.rank == top]
    expected = p ** (n - 1)
    i_bound = p ** (n - 1) - p + 3
    notes = []
    unique = len(tops) == 1 and tops[0].key() == E.key()
    if not unique:
        notes.append(f"{len(tops)} p-tori of maximal rank {top}: uniqueness fails for p = {p}"
                     + (" (outside the p >= 5 hypothesis)" if p < 5 else ""))
    normal = E.is_normal()
    i_triv = None
    if check_triviality and normal:
        i_triv = is_i_trivial(W, E, max(i_bound, 0), tori).value
    return TowerReport(
        n, p, W.order, E.rank, expected, normal, top, E.rank == top, len(tops), unique,
        W.order == E.order * Wprev.order, i_bound, i_triv, notes, W, E,
    )


@dataclass
class ProductCheck:
    i: int
    n: int
    rank_G: int
    rank_H: int
    index_power: int  # least i' with H^n i'-trivial in G^n
    bound_G: int  # (n-1) r(G) + i
    bound_H: int  # (n-1) r(H) + i

    @property
    def holds_G(self) -> bool:
        return self.index_power <= self.bound_G

    @property
    def holds_H(self) -> bool:
        return self.index_power <= self.bound_H


def product_triviality(G: PGroup, H: Subgroup, i: int, n: int = 2) -> ProductCheck:
    """Compare the triviality index of H^n in G^n with (n-1) r + i, where r is
    the p-rank of G or of H, given that H is i-trivial in G."""
    tori = p_tori(G)
    if not is_i_trivial(G, H, i, tori).value:
        raise ValueError(f"H is not {i}-trivial in G")
    rG = max(E.rank for E in tori)
    rH = max(E.rank for E in tori if E.key() <= H.key())
    Gn = direct_power(G, n)
    Hn = block_power(G, H, n, Gn)
    idx = triviality_index(Gn, Hn)
    return ProductCheck(i, n, rG, rH, idx, (n - 1) * rG + i, (n - 1) * rH + i)
