import itertools

import pytest
from hypothesis import given, settings, strategies as st

from conftest import SAMPLES
from freerank.io import group_from_json, load
from freerank.pgroups import (
    CapExceeded,
    PGroup,
    Subgroup,
    center,
    centralizer,
    conjugacy_classes,
    cyclic_group,
    en_tower,
    format_cycles,
    identity,
    is_i_trivial,
    mul,
    order_of,
    p_tori,
    parse_cycles,
    product_triviality,
    subgroup_from_elements,
    tower,
    triviality_index,
    trivial_group,
    wreath,
)


def _d8():
    G = PGroup([parse_cycles("(1,2)", 4), parse_cycles("(1,3)(2,4)", 4)], 2, 4)
    return G


def _brute_tori_counts(G):
    """Count elementary abelian subgroups by rank from all generating tuples."""
    p = G.p
    xs = [g for g in G.elements() if order_of(g) == p]
    seen = {frozenset([identity(G.degree)])}
    counts = {0: 1}
    for r in (1, 2, 3):
        for gens in itertools.combinations(xs, r):
            if any(mul(a, b) != mul(b, a) for a, b in itertools.combinations(gens, 2)):
                continue
            S = Subgroup(G, list(gens))
            k = S.key()
            if k in seen or S.order != p ** r:
                continue
            seen.add(k)
            counts[r] = counts.get(r, 0) + 1
    return counts


# -- cycle notation ------------------------------------------------------------

def test_cycle_round_trip():
    g = parse_cycles("(1,3,2)(4,5)", 5)
    assert g == (2, 0, 1, 4, 3)
    assert format_cycles(g) == "(1,3,2)(4,5)"
    assert format_cycles(identity(3)) == "()"
    assert parse_cycles("()", 3) == identity(3)


@pytest.mark.parametrize("text", ["(1,2", "(1,1)", "(0,1)", "(1,9)", "1,2"])
def test_bad_cycles_rejected(text):
    with pytest.raises(ValueError):
        parse_cycles(text, 4)


# -- wreath products -----------------------------------------------------------

def test_wreath_of_trivial_group_is_cyclic():
    W = wreath(trivial_group(3), 3)
    assert W.order == 3


def test_wreath_of_z2_is_d8():
    W = wreath(cyclic_group(2), 2)
    assert W.order == 8
    orders = sorted(order_of(g) for g in W.elements())
    assert orders == sorted(order_of(g) for g in _d8().elements()) == [1, 2, 2, 2, 2, 2, 4, 4]


def test_wreath_of_z3_has_order_81():
    assert wreath(cyclic_group(3), 3).order == 81


@given(st.sampled_from([(2, 1), (2, 2), (2, 3), (3, 1), (5, 1)]))
def test_wreath_order_formula(pn):
    p, n = pn
    H = tower(n, p)[-1].W
    assert wreath(H, p).order == H.order ** p * p


def test_cap_exceeded():
    with pytest.raises(CapExceeded):
        wreath(cyclic_group(3, cap=50), 3)
    with pytest.raises(CapExceeded):
        en_tower(3, 3, cap=1000)


# -- p-tori ----------------------------------------------------------------------

def test_d8_tori():
    G = _d8()
    tori = p_tori(G)
    assert {r: sum(S.rank == r for S in tori) for r in range(3)} == _brute_tori_counts(G) == {0: 1, 1: 5, 2: 2}
    top = [S for S in tori if S.rank == 2]
    assert len(conjugacy_classes(G, top)) == 2


def test_w2_at_three_tori():
    W = tower(2, 3)[-1].W
    tori = p_tori(W)
    assert max(S.rank for S in tori) == 3
    brute = _brute_tori_counts(W)
    assert {r: sum(S.rank == r for S in tori) for r in range(4)} == brute
    assert brute[3] == 1


@pytest.mark.parametrize("p", [2, 3, 5])
def test_cyclic_group_tori(p):
    tori = p_tori(cyclic_group(p))
    assert sorted(S.rank for S in tori) == [0, 1]


def test_tori_are_elementary_abelian():
    for S in p_tori(tower(3, 2)[-1].W):
        assert S.is_elementary_abelian()
        assert S.order == 2 ** S.rank


# -- centralizers and i-triviality ---------------------------------------------

def test_centralizers_in_d8():
    G = _d8()
    Z = center(G)
    assert [format_cycles(g) for g in Z.elements() if g != identity(4)] == ["(1,2)(3,4)"]
    assert centralizer(G, G.trivial()).order == 8
    K = subgroup_from_elements(G, [parse_cycles("(1,2)", 4), parse_cycles("(3,4)", 4)])
    assert centralizer(G, K).key() == K.key()


@st.composite
def group_and_subset(draw):
    G = draw(st.sampled_from([_d8(), tower(2, 3)[-1].W, tower(3, 2)[-1].W]))
    els = G.elements()
    idx = draw(st.lists(st.integers(0, len(els) - 1), max_size=3))
    return G, subgroup_from_elements(G, [els[i] for i in idx])


@given(group_and_subset())
def test_centralizer_properties(gs):
    G, S = gs
    C = centralizer(G, S)
    assert all(mul(c, s) == mul(s, c) for c in C.elements() for s in S.elements())
    assert center(G).is_subset_of(C)


@given(st.sampled_from([0, 1, 2]))
@settings(max_examples=3)
def test_torus_lies_in_its_centralizer(k):
    G = [_d8(), tower(2, 3)[-1].W, tower(3, 2)[-1].W][k]
    for E in p_tori(G):
        assert E.is_subset_of(centralizer(G, E))


def test_i_trivial_examples():
    G = _d8()
    assert is_i_trivial(G, G.whole(), 0).value
    Z = center(G)
    res = is_i_trivial(G, Z, 1)
    assert not res.value and res.witness.rank == 1
    # above the p-rank the condition is vacuous
    assert is_i_trivial(G, Z, 3).value
    assert triviality_index(G, Z) == 3


def test_i_trivial_requires_normal_subgroup():
    G = _d8()
    S = subgroup_from_elements(G, [parse_cycles("(1,3)(2,4)", 4)])
    with pytest.raises(ValueError):
        is_i_trivial(G, S, 1)


def test_sample_group_file():
    G, subs = group_from_json(*load(SAMPLES / "w2p3.grp"))
    assert G.order == 81
    assert is_i_trivial(G, subs["base"], 3).value
    res = is_i_trivial(G, subs["base"], 1)
    assert not res.value
    assert res.witness.key() == center(G).key() == subs["center"].key()
    assert centralizer(G, res.witness).order == G.order


def test_base_torus_is_self_centralizing():
    lv = tower(2, 3)[-1]
    assert centralizer(lv.W, lv.E).key() == lv.E.key()
    assert centralizer(lv.W, center(lv.W)).order == lv.W.order


@given(st.sampled_from([0, 1]), st.integers(0, 4))
@settings(max_examples=8)
def test_i_triviality_is_monotone(k, i):
    G = [_d8(), tower(2, 3)[-1].W][k]
    tori = p_tori(G)
    for H in (G.whole(), center(G), tower(2, G.p)[-1].E if k else subgroup_from_elements(
            G, [parse_cycles("(1,2)", 4), parse_cycles("(3,4)", 4)])):
        if is_i_trivial(G, H, i, tori).value:
            assert is_i_trivial(G, H, i + 1, tori).value


# -- product lemma ---------------------------------------------------------------

def test_product_bound_with_rank_of_g():
    lv = tower(2, 2)[-1]
    G = lv.W
    for H in (G.whole(), lv.E, center(G)):
        i = triviality_index(G, H)
        r = product_triviality(G, H, i)
        assert r.holds_G


def test_product_bound_with_rank_of_h_can_fail():
    G = _d8()
    r = product_triviality(G, center(G), 3)
    assert (r.index_power, r.bound_H, r.bound_G) == (5, 4, 5)
    assert r.holds_G and not r.holds_H


# -- the tower -----------------------------------------------------------------------

@pytest.mark.parametrize("p", [2, 3, 5])
def test_tower_first_level(p):
    rep = en_tower(1, p)
    assert rep.order == p and rep.rank == 1 and rep.certified


def test_tower_three_two_certified():
    rep = en_tower(2, 3)
    assert rep.order == 81
    assert rep.rank == rep.expected_rank == 3
    assert rep.normal and rep.maximal and rep.unique and rep.quotient_ok
    assert rep.i_bound == 3 and rep.i_trivial
    assert rep.certified


def test_tower_two_two_uniqueness_fails():
    rep = en_tower(2, 2)
    assert rep.rank == rep.max_rank == 2
    assert rep.max_rank_count == 2 and not rep.unique
    assert not rep.certified
    assert rep.notes and "uniqueness fails" in rep.notes[0]
