import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from freerank import linalg as la
from freerank.fixtures import fixed_point_bundle, sheets_of_point
from freerank.generate import circle_bundle, random_bundle
from freerank.kbundle import (
    FiniteGroup,
    KComplex,
    PosetCovering,
    ResolutionTooShort,
    check_covering,
    check_kbundle,
    default_resolution,
    group_cohomology,
    hyper_tate,
    hypercohomology_ss,
    induced_k_action,
    induced_map,
    random_two_row,
    regular_action,
    tate_cohomology_cyclic,
    tate_shift_check,
    two_row_analysis,
)
from freerank.poset import RankedPoset


def _chain(names):
    n = len(names)
    return RankedPoset(list(names), list(zip(names, names[1:])), {x: n - 1 - i for i, x in enumerate(names)})


# -- coverings ---------------------------------------------------------------

def test_identity_covering_has_one_sheet():
    Q = _chain(["a", "b"])
    rep = check_covering(PosetCovering(Q, Q, {"a": "a", "b": "b"}))
    assert rep.ok and rep.sheets == 1


def test_two_copies_cover_with_two_sheets():
    Q = _chain(["a", "b"])
    P = RankedPoset(["a0", "b0", "a1", "b1"], [("a0", "b0"), ("a1", "b1")],
                    {"a0": 1, "b0": 0, "a1": 1, "b1": 0})
    rep = check_covering(PosetCovering(P, Q, {"a0": "a", "a1": "a", "b0": "b", "b1": "b"}))
    assert rep.ok and rep.sheets == 2


def test_v_shape_is_not_a_covering_of_a_chain():
    Q = _chain(["a", "b"])
    P = RankedPoset(["a0", "b0", "b1"], [("a0", "b0"), ("a0", "b1")], {"a0": 1, "b0": 0, "b1": 0})
    rep = check_covering(PosetCovering(P, Q, {"a0": "a", "b0": "b", "b1": "b"}))
    assert not rep.ok
    assert rep.failing_chain == ["a", "b"]


def test_covering_rejects_corank_mismatch():
    Q = _chain(["a", "b"])
    P = RankedPoset(["a0", "b0"], [("a0", "b0")], {"a0": 2, "b0": 0})
    assert not check_covering(PosetCovering(P, Q, {"a0": "a", "b0": "b"})).ok


# -- induced maps and actions ----------------------------------------------

def test_induced_map_of_identity_bundle_is_identity():
    B = sheets_of_point(1).bundle
    pi = induced_map(B)
    for e, M in pi.items():
        assert np.array_equal(M, la.eye(M.shape[0]))


def test_induced_map_of_two_copies_is_diagonal():
    B = sheets_of_point(2).bundle
    pi = induced_map(B)
    for e in B.N_pf.L.degrees():
        n = B.N_pf.L.dim(e)
        assert np.array_equal(pi[e], np.vstack([la.eye(n), la.eye(n)]))


def test_trivial_group_acts_by_identity():
    B = sheets_of_point(1).bundle
    (rho,) = induced_k_action(B.action, B.L_pf)
    for M in rho.values():
        assert np.array_equal(M, la.eye(M.shape[0]))


def test_swap_action_has_order_two_with_diagonal_invariants():
    B = sheets_of_point(2).bundle
    rho = induced_k_action(B.action, B.L_pf)
    p = B.L_pf.L.p
    for e in B.L_pf.L.degrees():
        S = rho[1][e]
        n = S.shape[0] // 2
        swap = np.block([[la.zeros(n, n), la.eye(n)], [la.eye(n), la.zeros(n, n)]])
        assert np.array_equal(S, swap)
        assert np.array_equal(la.matmul(S, S, p), la.eye(2 * n))
        inv = la.nullspace((S - la.eye(2 * n)) % p, p)
        assert inv.shape[1] == n
        assert la.in_span(inv, np.vstack([la.eye(n), la.eye(n)]), p)


# -- bundle checks ---------------------------------------------------------

@pytest.mark.parametrize("m", [1, 2])
def test_sheets_of_point_are_bundles(m):
    inst = sheets_of_point(m)
    rep = check_kbundle(inst.bundle, inst.degrees)
    assert rep.ok, rep.problems
    assert rep.covering.sheets == m
    assert rep.certified == inst.degrees


def test_trivial_action_fails_freeness():
    inst = fixed_point_bundle()
    rep = check_kbundle(inst.bundle, inst.degrees)
    assert not rep.ok
    assert not rep.free_fibers and not rep.dl_free


def test_circle_bundle_passes():
    inst = circle_bundle()
    rep = check_kbundle(inst.bundle, inst.degrees)
    assert rep.ok, rep.problems


@given(st.integers(0, 10_000))
@settings(max_examples=6)
def test_pullback_is_invariant_and_injective(seed):
    inst = random_bundle(seed)
    rep = check_kbundle(inst.bundle)
    assert rep.ok, rep.problems
    assert rep.injective and rep.invariant and rep.eta_iso


# -- the hypercohomology spectral sequence ---------------------------------

def test_ss_for_trivial_group_is_cohomology_of_dl():
    inst = sheets_of_point(1)
    for r in hypercohomology_ss(inst.bundle, inst.degrees):
        assert r.ok
        # only the a = 0 column survives and it equals H(DN) = H(DL)
        assert all(a == 0 for a, _ in r.e2)
        assert {q: v for (_, q), v in r.e2.items()} == {m: v for m, v in r.dn.items() if v}


def test_ss_with_free_coefficients_is_concentrated_in_column_zero():
    inst = sheets_of_point(2)
    for r in hypercohomology_ss(inst.bundle, inst.degrees):
        assert r.ok
        assert all(a == 0 for a, _ in r.e2)


def test_ss_with_short_resolution_raises():
    inst = sheets_of_point(2)
    with pytest.raises(ResolutionTooShort):
        hypercohomology_ss(inst.bundle, inst.degrees, length=2, m_hi=4)


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_two_row_collapse(seed):
    inst = random_two_row(seed)
    rep = two_row_analysis(inst.kc)
    assert rep.rows == inst.rows
    assert rep.ok, rep.problems
    assert rep.total == rep.invariants


# -- Tate cohomology ---------------------------------------------------------

def _gen(G, acts):
    return acts[G.generator()]


@pytest.mark.parametrize("p", [2, 3, 5])
def test_tate_of_regular_module_vanishes(p):
    G = FiniteGroup.cyclic(p)
    g = _gen(G, regular_action(G, p))
    assert all(tate_cohomology_cyclic(p, g, i).dim == 0 for i in range(-4, 5))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_tate_of_trivial_module_is_one(p):
    assert all(tate_cohomology_cyclic(p, la.eye(1), i).dim == 1 for i in range(-4, 5))


def test_tate_of_trivial_plus_regular_is_one():
    p = 3
    G = FiniteGroup.cyclic(p)
    g = _gen(G, regular_action(G, p))
    M = la.zeros(p + 1, p + 1)
    M[0, 0] = 1
    M[1:, 1:] = g
    assert all(tate_cohomology_cyclic(p, M, i).dim == 1 for i in range(-4, 5))


def test_tate_rejects_wrong_order():
    with pytest.raises(ValueError):
        tate_cohomology_cyclic(3, np.array([[0, 1], [1, 0]]), 0)


def test_tate_agrees_with_group_cohomology_in_positive_degrees():
    # for i > 0 Tate and ordinary cohomology coincide
    p = 3
    G = FiniteGroup.cyclic(p)
    rng = np.random.default_rng(5)
    g = _random_module(rng, p, 4)
    acts = [la.eye(4)]
    for _ in range(p - 1):
        acts.append(la.matmul(g, acts[-1], p))
    dims = group_cohomology(default_resolution(G, 6), acts, p)
    for i in range(1, 5):
        assert tate_cohomology_cyclic(p, g, i).dim == dims[i]


def _random_module(rng, p, n):
    """A ℤ/p-module of dimension n: a random conjugate of a sum of Jordan blocks."""
    sizes = []
    left = n
    while left:
        s = int(rng.integers(1, min(p, left) + 1))
        sizes.append(s)
        left -= s
    J = la.zeros(n, n)
    pos = 0
    for s in sizes:
        for i in range(s):
            J[pos + i, pos + i] = 1
            if i + 1 < s:
                J[pos + i, pos + i + 1] = 1
        pos += s
    while True:
        P = rng.integers(0, p, size=(n, n))
        if la.rank(P, p) == n:
            break
    return la.matmul(la.matmul(P, J, p), la.inverse(P, p), p)


@given(st.sampled_from([2, 3, 5]), st.integers(1, 6), st.integers(0, 2**31))
def test_tate_is_two_periodic(p, n, seed):
    g = _random_module(np.random.default_rng(seed), p, n)
    for i in range(-3, 3):
        assert tate_cohomology_cyclic(p, g, i).dim == tate_cohomology_cyclic(p, g, i + 2).dim


@given(st.sampled_from([2, 3, 5]), st.integers(1, 5), st.integers(0, 2**31))
def test_free_summands_do_not_change_tate(p, n, seed):
    g = _random_module(np.random.default_rng(seed), p, n)
    G = FiniteGroup.cyclic(p)
    r = _gen(G, regular_action(G, p))
    M = la.zeros(n + p, n + p)
    M[:n, :n] = g
    M[n:, n:] = r
    for i in (-1, 0, 1, 2):
        assert tate_cohomology_cyclic(p, M, i).dim == tate_cohomology_cyclic(p, g, i).dim


@given(st.sampled_from([2, 3, 5]), st.integers(1, 5), st.integers(0, 2**31))
def test_tate_even_and_odd_agree_for_cyclic_groups(p, n, seed):
    # the Herbrand quotient of a finite module is 1
    g = _random_module(np.random.default_rng(seed), p, n)
    assert tate_cohomology_cyclic(p, g, 0).dim == tate_cohomology_cyclic(p, g, 1).dim


# -- the Tate shift between two rows ------------------------------------------

def test_tate_shift_with_free_rows_is_zero():
    p = 3
    G = FiniteGroup.cyclic(p)
    reg = regular_action(G, p)
    kc = KComplex(G, p, [p, 0, p], [la.zeros(0, p), la.zeros(p, 0)], [reg, [la.zeros(0, 0)] * p, reg], 0)
    rep = tate_shift_check(kc)
    assert rep.applicable and rep.ok
    assert rep.shift == 3
    assert all(v == (0, 0, 0) for v in rep.pairs.values())


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
def test_tate_shift_on_random_instances(seed):
    inst = random_two_row(seed)
    rep = tate_shift_check(inst.kc)
    assert hyper_tate(inst.kc) == (0, 0)
    assert rep.applicable and rep.ok
    b, t = inst.rows
    assert rep.shift == t - b + 1
    assert any(top > 0 for top, _, _ in rep.pairs.values())


def test_tate_shift_flags_non_free_complex():
    for seed in range(5):
        rep = tate_shift_check(random_two_row(seed, free=False).kc)
        assert not rep.applicable and not rep.ok
        assert rep.hyper_tate != (0, 0)
