import numpy as np
import pytest
from hypothesis import given, strategies as st

from freerank import linalg as la
from freerank.generate import random_filtration
from freerank.graded import (
    BoundedFactor,
    PWAlgebra,
    SubspaceV,
    WindowTooSmall,
    direct_sum,
    jfree_build,
    make_module,
    pv_module,
    suspend,
)
from freerank.koszul import cech_complex, connecting_map, local_cohomology, localize
from helpers import count_monomials


def point(alg, lo=0, hi=0):
    return make_module(alg, lo, hi, {0: 1}, None, bounded_above=True)


def line(p=2, hi=12, shift=0, lo=0):
    return pv_module(PWAlgebra(p, 1), SubspaceV.full(1, p), lo, hi, shift)


# -- localization ---------------------------------------------------------------

def test_localize_domain_is_injective():
    loc = localize(line(), [0], 0)
    assert loc.dim == 1
    assert la.rank(loc.canonical, 2) == 1


def test_localize_kills_torsion():
    assert localize(point(PWAlgebra(2, 1), 0, 8), [0], 0).dim == 0


def test_localize_kills_point_summand():
    alg = PWAlgebra(2, 1)
    M = direct_sum(line(hi=12), point(alg, 0, 12))
    assert M.dim(0) == 2
    assert localize(M, [0], 0).dim == 1


def test_localize_window_too_small():
    with pytest.raises(WindowTooSmall):
        localize(line(hi=2), [0], 0)


# -- local cohomology -------------------------------------------------------------

def test_local_cohomology_line():
    H = local_cohomology(line(hi=14), range(-6, 4))
    assert not H.uncertified
    for d in range(-6, 4):
        assert H.dim(0, d) == 0
        assert H.dim(1, d) == (1 if d <= -1 else 0)


def test_local_cohomology_point():
    alg = PWAlgebra(2, 2)
    H = local_cohomology(point(alg, -4, 8), range(-3, 3))
    for d in range(-3, 3):
        for i in range(3):
            assert H.dim(i, d) == (1 if (i, d) == (0, 0) else 0)


def test_local_cohomology_plane():
    M = pv_module(PWAlgebra(2, 2), SubspaceV.full(2, 2), 0, 20)
    H = local_cohomology(M, [-2, -3, -4])
    assert [H.dim(2, d) for d in (-2, -3, -4)] == [1, 2, 3]
    assert all(H.dim(i, d) == 0 for i in (0, 1) for d in (-2, -3, -4))


def test_uncertified_degrees_are_reported():
    H = local_cohomology(line(hi=1), [-8])
    assert H.uncertified == [-8]
    with pytest.raises(WindowTooSmall):
        H.dim(1, -8)
    with pytest.raises(WindowTooSmall):
        local_cohomology(line(hi=1), [-8], strict=True)


def test_cech_square_zero():
    M = pv_module(PWAlgebra(3, 2), SubspaceV.full(2, 3), 0, 30)
    C = cech_complex(M, -4, 3)
    for i in range(2):
        assert not np.any(la.matmul(C.complex.diff(i + 1), C.complex.diff(i), 3))


# -- connecting maps ------------------------------------------------------------------

def _incl(A, B, offset=0):
    return {e: la.eye(B.dim(e))[:, offset:offset + A.dim(e)] for e in B.degrees()}


def test_connecting_split_is_zero():
    alg = PWAlgebra(2, 1)
    A, C = line(hi=12), point(alg, 0, 12)
    B = direct_sum(A, C)
    f = _incl(A, B)
    g = {e: la.eye(B.dim(e))[A.dim(e):, :] for e in B.degrees()}
    cm = connecting_map(A, B, C, f, g, 0, degrees=range(-2, 2))
    assert all(not np.any(M) for M in cm.matrices.values())


def test_connecting_multiplication_by_y():
    alg = PWAlgebra(2, 1)
    A = line(hi=12, shift=1)
    B = line(hi=12)
    C = point(alg, 0, 12)
    f = {e: la.eye(1) if e >= 1 else la.zeros(B.dim(e), 0) for e in B.degrees()}
    g = {e: la.eye(1) if e == 0 else la.zeros(0, B.dim(e)) for e in B.degrees()}
    cm = connecting_map(A, B, C, f, g, 0, degrees=[0])
    M = cm.matrices[0]
    assert M.shape == (1, 1) and la.rank(M, 2) == 1


def test_connecting_with_zero_quotient():
    A = line(hi=12)
    C = make_module(A.alg, 0, 12, {}, None)
    f = {e: la.eye(A.dim(e)) for e in A.degrees()}
    g = {e: la.zeros(0, A.dim(e)) for e in A.degrees()}
    cm = connecting_map(A, A, C, f, g, 0, degrees=[-2, -1, 0])
    assert all(M.size == 0 or not np.any(M) for M in cm.matrices.values())


def test_connecting_rejects_non_exact():
    A = line(hi=8)
    f = {e: la.zeros(1, 1) for e in A.degrees()}
    with pytest.raises(ValueError):
        connecting_map(A, A, A, f, f, 0)


# -- properties -------------------------------------------------------------------------

@st.composite
def pv_data(draw):
    p = draw(st.sampled_from([2, 3]))
    w = draw(st.integers(1, 2))
    r = draw(st.integers(0, w))
    return p, w, r, draw(st.integers(-2, 2))


@given(pv_data())
def test_grothendieck_vanishing_and_suspension(data):
    p, w, r, shift = data
    alg = PWAlgebra(p, w)
    V = SubspaceV(la.eye(w)[:, :r], p)
    M = pv_module(alg, V, shift, shift + 16 * alg.sigma)
    degs = list(range(-4, 2))
    H = local_cohomology(M, degs)
    assert all(i <= w for (i, d) in H.dims)
    S = suspend(M, 3)
    HS = local_cohomology(S, [d + 3 for d in degs])
    for d in H.certified:
        if d + 3 in HS.certified:
            for i in range(w + 1):
                assert HS.dim(i, d + 3) == H.dim(i, d)


@given(st.sampled_from([2, 3]), st.integers(0, 1), st.lists(st.integers(0, 2), min_size=1, max_size=2))
def test_kunneth_for_bounded_factor(p, r, tail):
    alg = PWAlgebra(p, 1)
    V = SubspaceV(la.eye(1)[:, :r], p)
    dims = (1, *tail)
    while len(dims) > 1 and dims[-1] == 0:
        dims = dims[:-1]
    N = BoundedFactor(dims)
    M = jfree_build(alg, V, 0, N, 0, 24)
    degs = list(range(-5, 3))
    H = local_cohomology(M, degs)
    s = alg.sigma
    for d in H.certified:
        for i in range(2):
            # H^r(P_V) = Σ^{-σ r} P_V^*, shifted by each N_k
            want = sum(N.dim(k) * count_monomials(r, -(d - k + s * r), s) for k in range(N.top + 1)) if i == r else 0
            assert H.dim(i, d) == want


@given(st.integers(0, 200))
def test_long_exact_sequence_alternating_sum(seed):
    inst = random_filtration(seed, w=int(seed % 2) + 1, max_levels=2, budget=40)
    F = inst.frf
    if F.top < 2:
        return
    A, B, C = F.graded_piece(1), F.two_step(0), F.graded_piece(0)
    degs = inst.degrees
    HA, HB, HC = (local_cohomology(M, degs) for M in (A, B, C))
    common = set(HA.certified) & set(HB.certified) & set(HC.certified)
    for d in common:
        total = sum((-1) ** i * (HA.dim(i, d) - HB.dim(i, d) + HC.dim(i, d)) for i in range(B.w + 1))
        assert total == 0
