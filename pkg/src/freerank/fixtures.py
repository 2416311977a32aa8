"""Small hand-built instances: the standard examples used in tests, samples
and the README."""

from __future__ import annotations

import numpy as np

from . import linalg as la
from .filtration import FreeRankFiltration, JFreeSummand
from .generate import (
    BundleInstance,
    SummandSpec,
    face_ring_stratification,
    glue_filtration,
    voltage_bundle,
)
from .graded import BoundedFactor, PWAlgebra, SubspaceV, pv_module
from .kbundle import FiniteGroup, KAction, KBundle


def direct_sum_filtration(alg: PWAlgebra, specs: list[SummandSpec], lo: int, hi: int) -> FreeRankFiltration:
    """The split filtration of the direct sum of the given summands."""
    return glue_filtration(alg, specs, lo, hi, np.random.default_rng(0), glue=False)[0]


def free_module_filtration(p: int, w: int, hi: int) -> FreeRankFiltration:
    """P_W with its trivial filtration F_0 = ... = F_w = P_W."""
    alg = PWAlgebra(p, w)
    return direct_sum_filtration(alg, [SummandSpec(SubspaceV.full(w, p), 0, BoundedFactor.point(), w)], 0, hi)


def point_plus_line(p: int = 2, hi: int = 10) -> FreeRankFiltration:
    """L = F_p ⊕ P_W with w = 1 and F_1 = P_W."""
    alg = PWAlgebra(p, 1)
    specs = [SummandSpec(SubspaceV.zero(1, p), 0, BoundedFactor.point(), 0),
             SummandSpec(SubspaceV.full(1, p), 0, BoundedFactor.point(), 1)]
    return direct_sum_filtration(alg, specs, 0, hi)


def line_two_level(p: int = 2, hi: int = 10) -> FreeRankFiltration:
    """L = P_W with w = 1, F_1 = y P_W ≅ Σ^σ P_W and F_0/F_1 = F_p."""
    alg = PWAlgebra(p, 1)
    s = alg.sigma
    L = pv_module(alg, SubspaceV.full(1, p), 0, hi)
    degs = list(L.degrees())
    F0 = {e: la.eye(L.dim(e)) for e in degs}
    F1 = {e: la.eye(L.dim(e)) if e >= s else la.zeros(L.dim(e), 0) for e in degs}
    F2 = {e: la.zeros(L.dim(e), 0) for e in degs}
    iso0 = {e: la.eye(L.dim(e)) if e == 0 else la.zeros(L.dim(e), 0) for e in degs}
    s0 = JFreeSummand(SubspaceV.zero(1, p), 0, BoundedFactor.point(), iso0)
    s1 = JFreeSummand(SubspaceV.full(1, p), s, BoundedFactor.point(), dict(F1))
    return FreeRankFiltration(L, [F0, F1, F2], [[s0], [s1]], minimal=True)


def corrupt_iso(F: FreeRankFiltration, level: int, index: int, e: int) -> FreeRankFiltration:
    """A copy of F whose summand iso is zeroed in degree e."""
    summands = [list(lst) for lst in F.summands]
    s = summands[level][index]
    iso = dict(s.iso)
    iso[e] = la.zeros(*iso[e].shape)
    summands[level][index] = JFreeSummand(s.V, s.shift, s.factor, iso)
    return FreeRankFiltration(F.L, F.levels, summands, F.minimal)


def line_stratification(p: int = 2, hi: int = 10):
    """R = P_W (w = 1) stratified by R > T with T = P_W pushed in by y."""
    return face_ring_stratification(PWAlgebra(p, 1), [(), (0,)], ("point",), 0, hi)


def _cover_specs(alg: PWAlgebra, names, rank: int, shift: int):
    p, w = alg.p, alg.w
    V = SubspaceV.full(w, p) if rank == w else SubspaceV(la.eye(w)[:, :rank], p)
    return {x: SummandSpec(V, shift, BoundedFactor.point(), rank) for x in names}


def sheets_of_point(m: int, p: int = 2, w: int = 1, hi: int = 8) -> BundleInstance:
    """K = ℤ/m permuting m copies of P_W over a one-element base: L = N^m."""
    alg = PWAlgebra(p, w)
    specs = _cover_specs(alg, ["v"], w, 0)
    B, ns = voltage_bundle(alg, ["v"], [], [], {}, m, specs, 0, hi, np.random.default_rng(0))
    return BundleInstance(0, B, [-3, -2, -1, 0, 1], ns, {})


def fixed_point_bundle(p: int = 2, hi: int = 8) -> BundleInstance:
    """ℤ/2 acting trivially on a one-element poset: the fiber action is not free."""
    inst = sheets_of_point(1, p, 1, hi)
    B = inst.bundle
    G = FiniteGroup.cyclic(2)
    act = B.action
    perms = [dict(act.perms[0]), dict(act.perms[0])]
    maps = {}
    for (k, x), m in act.maps.items():
        maps[(0, x)] = m
        maps[(1, x)] = m
    bad = KBundle(B.covering, B.N_pf, B.L_pf, B.eta, KAction(G, perms, maps), B.N_frf, B.L_frf)
    return BundleInstance(0, bad, inst.degrees, False, {})
