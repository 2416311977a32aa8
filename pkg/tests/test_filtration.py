import numpy as np
import pytest
from hypothesis import given, strategies as st

from freerank import linalg as la
from freerank.filtration import (
    FreeRankFiltration,
    ToralPrime,
    closed_form_dim,
    depth_dim_bounds,
    dual_closed_form_dim,
    duflot_cohomology,
    duflot_complex,
    is_prime_associated,
    matlis_dual_complex,
    regularity_bound,
    regularity_report,
    toral_primes,
    validate_filtration,
)
from freerank.fixtures import (
    corrupt_iso,
    direct_sum_filtration,
    free_module_filtration,
    line_two_level,
    point_plus_line,
)
from freerank.generate import SummandSpec, random_filtration
from freerank.graded import BoundedFactor, PWAlgebra, SubspaceV, zero_module
from freerank.koszul import local_cohomology
from freerank.poset import oracle_depth


def test_validate_examples():
    assert validate_filtration(free_module_filtration(2, 1, 8)) == []
    F = line_two_level()
    assert validate_filtration(F) == [] and F.minimal


def test_validate_reports_corrupted_iso():
    rep = validate_filtration(corrupt_iso(line_two_level(), 1, 0, 3))
    assert rep
    assert any("level 1 summand 0" in r and "degree" in r for r in rep)


def test_duflot_split_example():
    F = point_plus_line(2, 12)
    DC = duflot_complex(F, range(-4, 2))
    assert DC.term(0, 0) == 1 and all(DC.term(0, d) == 0 for d in (-4, -3, -2, -1, 1))
    assert all(DC.term(1, d) == (1 if d <= -1 else 0) for d in range(-4, 2))
    assert all(not np.any(DC.diff(0, d)) for d in range(-4, 2))
    H = duflot_cohomology(DC)
    assert H.dim(0, 0) == 1
    assert all(H.dim(1, d) == (1 if d <= -1 else 0) for d in range(-4, 2))


def test_duflot_line_two_level():
    F = line_two_level(2, 12)
    DC = duflot_complex(F, range(-4, 2))
    assert DC.term(0, 0) == 1
    assert all(DC.term(1, d) == (1 if d <= 0 else 0) for d in range(-4, 2))
    assert la.rank(DC.diff(0, 0), 2) == 1
    H = duflot_cohomology(DC)
    assert all(H.dim(0, d) == 0 for d in range(-4, 2))
    assert all(H.dim(1, d) == (1 if d <= -1 else 0) for d in range(-4, 2))


def test_duflot_one_level():
    F = free_module_filtration(3, 1, 20)
    DC = duflot_complex(F, range(-6, 1))
    assert all(DC.term(0, d) == 0 for d in range(-6, 1))
    H = duflot_cohomology(DC)
    for d in range(-6, 1):
        assert H.dim(1, d) == DC.term(1, d) == (1 if d <= -2 and d % 2 == 0 else 0)


def test_duflot_zero_module():
    Z = zero_module(PWAlgebra(2, 1), 0, 6)
    degs = list(Z.degrees())
    F = FreeRankFiltration(Z, [{e: la.zeros(0, 0) for e in degs}] * 2, [[]])
    H = duflot_cohomology(duflot_complex(F))
    assert not H.nonzero()


def test_depth_dim_examples():
    assert depth_dim_bounds(free_module_filtration(2, 2, 6)) == (2, 2)
    assert depth_dim_bounds(point_plus_line()) == (0, 1)
    F = line_two_level(2, 14)
    assert depth_dim_bounds(F) == (0, 1)
    # the bound is not sharp: the oracle sees depth 1
    assert oracle_depth(F.L, range(-4, 2)) == 1


def test_depth_rejects_non_connected():
    alg = PWAlgebra(2, 1)
    F = direct_sum_filtration(alg, [SummandSpec(SubspaceV.full(1, 2), -2, BoundedFactor.point(), 1)], -2, 8)
    with pytest.raises(ValueError):
        depth_dim_bounds(F)
    assert depth_dim_bounds(F, require_connected=False)[1] == 1


def _reg(F, degs):
    return regularity_report(F, duflot_cohomology(duflot_complex(F, degs)))


def test_regularity_examples():
    r = _reg(free_module_filtration(2, 1, 14), range(-5, 3))
    assert (r.bound, r.computed, r.ok) == (0, 0, True)
    r = _reg(line_two_level(2, 14), range(-5, 3))
    assert (r.bound, r.computed, r.ok) == (1, 0, True)
    alg = PWAlgebra(3, 1)
    F = direct_sum_filtration(alg, [SummandSpec(SubspaceV.full(1, 3), 0, BoundedFactor((1, 1)), 1)], 0, 24)
    assert regularity_bound(F) == 0
    r = _reg(F, range(-6, 3))
    assert r.computed == 0 and r.ok


def test_toral_primes_examples():
    tp = toral_primes(free_module_filtration(2, 1, 6))
    assert len(tp) == 1 and tp[0].rank == 1
    tp = toral_primes(point_plus_line())
    assert sorted(t.rank for t in tp) == [0, 1]
    alg = PWAlgebra(2, 1)
    spec = SummandSpec(SubspaceV.full(1, 2), 0, BoundedFactor.point(), 1)
    tp = toral_primes(direct_sum_filtration(alg, [spec, spec], 0, 6))
    assert len(tp) == 1 and tp[0].summands == [(1, 0), (1, 1)]


def test_associated_examples():
    F = point_plus_line(2, 12)
    res = is_prime_associated(F, ToralPrime(SubspaceV.zero(1, 2), []))
    assert res.found and res.degree == 0
    # the witness is the F_p generator: killed by y
    assert not np.any(la.matmul(F.L.act(0, 0), res.witness.reshape(-1, 1), 2))
    P = free_module_filtration(2, 1, 12)
    res = is_prime_associated(P, ToralPrime(SubspaceV.full(1, 2), []))
    assert res.found and res.degree == 0 and list(res.witness) == [1]
    res = is_prime_associated(P, ToralPrime(SubspaceV.zero(1, 2), []))
    assert not res.found and res.note == "no witness in window"


# -- properties on seeded random filtrations -------------------------------------------

@given(st.integers(0, 10_000))
def test_random_filtration_oracle_and_dual(seed):
    inst = random_filtration(seed, budget=60)
    F = inst.frf
    assert validate_filtration(F) == []
    DC = duflot_complex(F, inst.degrees)
    assert DC.check_square_zero() == []
    sig = F.L.sigma
    for d in DC.certified:
        for j in range(DC.top + 1):
            assert DC.term(j, d) == sum(closed_form_dim(s, j, d, sig) for s in F.summands[j])
    HD = duflot_cohomology(DC)
    HO = local_cohomology(F.L, inst.degrees)
    for d in set(HD.certified) & set(HO.certified):
        for i in range(F.L.w + 1):
            assert HD.dim(i, d) == HO.dim(i, d)
    # Matlis dual of DL: closed-form terms and dual homology
    dual = matlis_dual_complex(DC)
    p = F.L.p
    for e in dual.degrees:
        for j in range(DC.top + 1):
            assert dual.terms.get((j, e), 0) == sum(dual_closed_form_dim(s, j, e, sig) for s in F.summands[j])
            assert dual.homology(j, e, p) == HD.dim(j, -e)
