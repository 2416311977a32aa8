import numpy as np
from hypothesis import given, strategies as st

from freerank import linalg as la
from freerank.fixtures import line_stratification
from freerank.generate import face_ring_stratification, random_stratification, socle_stratification
from freerank.graded import PWAlgebra, SubspaceV, pv_module
from freerank.poset import (
    EmbeddedAlgebra,
    PosetFiltration,
    RankedPoset,
    TopStratification,
    associated_prime_transfer,
    check_good,
    check_topological,
    detection_kernel,
    identity_embedding,
    oracle_depth,
    to_free_rank,
    truncate,
    validate_ranked_poset,
)
from freerank.filtration import validate_filtration
import pytest


def test_ranked_poset_examples():
    assert validate_ranked_poset(RankedPoset(["X", "Y"], [("X", "Y")], {"X": 1, "Y": 0})) == []
    bad = validate_ranked_poset(RankedPoset(["X", "Y"], [("X", "Y")], {"X": 0, "Y": 1}))
    assert bad and "corank" in bad[0]
    assert validate_ranked_poset(RankedPoset(["a", "b", "c"], [], {"a": 3, "b": 0, "c": 1})) == []


def test_ranked_poset_cycle():
    P = RankedPoset(["a", "b"], [("a", "b"), ("b", "a")], {"a": 0, "b": 0})
    assert any("antisymmetric" in m for m in validate_ranked_poset(P))


def _line(hi=8):
    return pv_module(PWAlgebra(2, 1), SubspaceV.full(1, 2), 0, hi)


def test_good_single_element():
    L = _line()
    PF = PosetFiltration(RankedPoset(["X"], [], {"X": 0}), L, {"X": {e: la.eye(1) for e in L.degrees()}})
    assert check_good(PF).good


def test_not_good_when_equal_rank_pieces_overlap():
    L = _line()
    full = {e: la.eye(1) for e in L.degrees()}
    PF = PosetFiltration(RankedPoset(["X", "Y"], [], {"X": 0, "Y": 0}), L, {"X": full, "Y": full})
    rep = check_good(PF)
    assert not rep.good and {j for j, _, _ in rep.bad} == {0}


def test_good_chain():
    L = _line()
    full = {e: la.eye(1) for e in L.degrees()}
    yL = {e: la.eye(1) if e >= 1 else la.zeros(1, 0) for e in L.degrees()}
    P = RankedPoset(["X", "Y"], [("X", "Y")], {"X": 1, "Y": 0})
    assert check_good(PosetFiltration(P, L, {"X": yL, "Y": full})).good
    # if F(X) is all of L, gr_0 F(Y) vanishes and misses nothing: still good,
    # but a Y-piece that misses L/F_1 is not
    zero = {e: la.zeros(1, 0) for e in L.degrees()}
    rep = check_good(PosetFiltration(P, L, {"X": yL, "Y": zero}))
    assert not rep.good


def _one_element(TS):
    R = TS.R
    return TopStratification(R, RankedPoset(["R"], [], {"R": 0}), {"R": identity_embedding(R)}, {})


def test_topological_one_element():
    rep = check_topological(_one_element(line_stratification()))
    assert rep.ok
    assert np.array_equal(rep.euler["R"], [1])


def test_topological_line():
    TS = line_stratification(2, 10)
    rep = check_topological(TS)
    assert rep.ok and rep.minimal
    T = "[1]"
    # e_T = y: the unique basis vector in degree 1
    assert np.array_equal(rep.euler[T], [1]) and TS.strata[T].codim == 1
    assert rep.fixed[T]


def test_topological_rejects_augmentation_restriction():
    TS = line_stratification(2, 10)
    T = "[1]"
    emb = TS.strata[T]
    aug = {e: (m if e == 0 else la.zeros(*m.shape)) for e, m in emb.restrict.items()}
    strata = dict(TS.strata)
    strata[T] = EmbeddedAlgebra(emb.T, emb.codim, emb.push, aug)
    bad = TopStratification(TS.R, TS.poset, strata, TS.nesting, TS.splittings)
    rep = check_topological(bad)
    assert not rep.ok and rep.problems


def test_truncate_examples():
    TS = line_stratification(2, 10)
    assert truncate(TS, 0) is TS
    Z = truncate(TS, 5)
    assert not any(Z.module.dims) and Z.poset.elements == []
    T1 = truncate(TS, 1)
    assert T1.poset.elements == ["[1]"]
    assert T1.module.dim(0) == 0 and all(T1.module.dim(e) == 1 for e in range(1, 11))
    assert check_topological(T1).ok


def test_detection_examples():
    TS = line_stratification(2, 10)
    R = TS.R
    full = TopStratification(R, RankedPoset(["R"], [], {"R": 1}), {"R": identity_embedding(R)}, {})
    res = detection_kernel(full, 1, depth=1)
    assert not any(res.kernel.dims) and res.consistent
    S = socle_stratification(2, 10)
    depth = oracle_depth(S.R.module, range(-3, 3))
    assert depth == 0
    res = detection_kernel(S, 1, depth)
    assert res.kernel.dim(1) == 1 and res.consistent
    res = detection_kernel(S, 4)
    assert res.kernel.dims == S.R.module.dims


def test_transfer_socle_stratum():
    r = associated_prime_transfer(socle_stratification(2, 10), "T")
    assert r.in_T is True and r.in_L is True and r.depth_T == r.rank_V == 1 and r.consistent


def test_transfer_extra_polynomial_factor():
    TS = face_ring_stratification(PWAlgebra(2, 2), [(), (0,), (1,), (0, 1)], ("point",), 0, 12)
    r = associated_prime_transfer(TS, "[1]")
    assert r.in_T is False and r.depth_T == 2 > r.rank_V == 1 and r.consistent


def test_transfer_point_stratum():
    TS = face_ring_stratification(PWAlgebra(2, 1), [()], ("point",), 0, 8)
    r = associated_prime_transfer(TS, "[]")
    assert r.in_T is True and r.rank_V == 0 and r.depth_T == 0 and r.consistent


def test_transfer_rejects_non_minimal():
    TS = line_stratification(2, 10)
    sp = dict(TS.splittings)
    sp["[]"] = sp["[1]"]
    bad = TopStratification(TS.R, TS.poset, TS.strata, TS.nesting, sp)
    with pytest.raises(ValueError):
        associated_prime_transfer(bad, "[1]")


@given(st.integers(0, 10_000))
def test_random_stratifications_are_topological(seed):
    inst = random_stratification(seed, budget=40)
    TS = inst.strat
    rep = check_topological(TS)
    assert rep.ok, rep.problems[:3]
    P = TS.poset
    for (u, t), nest in TS.nesting.items():
        assert nest.codim + TS.strata[t].codim == TS.strata[u].codim
    assert validate_filtration(to_free_rank(TS)) == []
    for i in range(P.max_corank + 2):
        assert check_topological(truncate(TS, i), colimit=False).ok
