from __future__ import annotations

import pytest

from qgcb import tensorcb, wmod
from qgcb.scalars import ONE, ZERO, LaurentPoly
from qgcb.tensorcb import (
    InadmissibleError, associativity_check, brute_force_fixed_point, chi_embedding,
    diamond_recursion, multi_diamond, operational_order, oracle_check, positivity_scan,
    psi_fixed_check, reduction_check, tensor_based, triangularity_check,
)
from qgcb.wmod import InvariantError, TruncationError

q = LaurentPoly.monomial


def all_checks(db):
    return triangularity_check(db) + reduction_check(db) + psi_fixed_check(db)


def test_rank1_two_fold_example(a1):
    db = multi_diamond(a1, [(1,), (1,)], 0)
    T = db.module
    names = T.names[(-1,)]
    d = db.as_dicts((-1,))
    by_name = {tuple(tensorcb.label_names(tensorcb.leaf_modules(T), lab)): vec for lab, vec in d.items()}
    labs = {tuple(tensorcb.label_names(tensorcb.leaf_modules(T), lab)): lab for lab in d}
    # eta (x) F eta + q^-1 F eta (x) eta, and F eta (x) eta alone
    v = by_name[("1", "t0")]
    assert v == {labs[("1", "t0")]: ONE, labs[("t0", "1")]: q(-1)}
    assert by_name[("t0", "1")] == {labs[("t0", "1")]: ONE}
    assert len(names) == 2 and len(db) == 4


def test_rank1_lowest_highest(a1):
    db = multi_diamond(a1, [(1,), (1,)], 1)
    assert all_checks(db) == []
    assert oracle_check(db.module) == []
    assert len(db) == 4


@pytest.mark.parametrize("l1", range(5))
@pytest.mark.parametrize("l2", range(5))
@pytest.mark.parametrize("r", [0, 1])
def test_rank1_grid(a1, l1, l2, r):
    db = multi_diamond(a1, [(l1,), (l2,)], r)
    assert len(db) == (l1 + 1) * (l2 + 1)
    assert all_checks(db) == []
    assert oracle_check(db.module) == []
    assert positivity_scan(db, r).ok


def test_a2_oracle(a2):
    db = multi_diamond(a2, [(1, 0), (0, 1)], 0)
    assert len(db) == 9
    assert all_checks(db) == [] and oracle_check(db.module) == []
    db = multi_diamond(a2, [(1, 0), (1, 1)], 1)
    assert len(db) == 24
    assert all_checks(db) == [] and oracle_check(db.module) == []


def test_b2_two_fold(b2):
    db = multi_diamond(b2, [(1, 0), (0, 1)], 0)
    assert len(db) == 20
    assert all_checks(db) == [] and oracle_check(db.module) == []
    rep = positivity_scan(db, 0)
    assert rep.mode == "observational"


def test_three_fold_rank1(a1):
    for r in range(4):
        db = multi_diamond(a1, [(1,), (1,), (1,)], r)
        assert len(db) == 8
        assert all_checks(db) == []
        assert oracle_check(db.module) == []


def test_associativity(a1, a2):
    L = a1.simple((1,))
    W = a1.lowest((1,))
    assert associativity_check(a1.theta, L, L, L) == []
    assert associativity_check(a1.theta, W, L, L) == []
    A, B = a2.simple((1, 0)), a2.simple((0, 1))
    assert associativity_check(a2.theta, A, A, B) == []


def test_chi_embedding(a1, a2):
    for lams in ([(1,), (1,)], [(2,), (1,)], [(1,), (1,), (1,)]):
        rep = chi_embedding(a1, lams)
        assert rep.ok, rep.failures
        assert rep.matched == sum(l[0] for l in lams) + 1
    rep = chi_embedding(a2, [(1, 0), (1, 0)])
    assert rep.ok and rep.matched == 6 and rep.vanished > 0


def test_affine_truncated(aff):
    db = multi_diamond(aff, [(1, 0), (1, 0)], 0, ht_bound=3)
    assert all_checks(db) == []
    assert oracle_check(db.module) == []
    assert positivity_scan(db, 0).ok
    assert chi_embedding(aff, [(1, 0), (1, 0)], 3).ok
    with pytest.raises(TruncationError):
        multi_diamond(aff, [(1, 0), (1, 0)], 0)


def test_affine_lowest_must_be_complete(aff):
    with pytest.raises(TruncationError):
        multi_diamond(aff, [(1, 0), (1, 0)], 1, ht_bound=2)


def test_inadmissible_refused(aff):
    La = aff.simple((1, 0), 2)
    with pytest.raises(InadmissibleError):
        tensor_based(aff.theta, La, wmod.omega_twist(La))


def test_degenerate_shapes(a1, a2):
    db = multi_diamond(a2, [], 0)
    assert len(db) == 1
    db = multi_diamond(a2, [(1, 1)], 0)
    assert len(db) == 8 and db.module.kind == "highest"
    db = multi_diamond(a2, [(1, 1)], 1)
    assert db.module.kind == "lowest"
    db = multi_diamond(a1, [(0,), (2,)], 0)
    assert len(db) == 3 and all_checks(db) == []
    db = multi_diamond(a1, [(2,), (2,)], 0)
    assert all_checks(db) == [] and oracle_check(db.module) == []
    with pytest.raises(ValueError):
        multi_diamond(a1, [(1,)], 2)


def test_operational_order_rejects_cycles():
    p = [[ONE, q(-1)], [q(1), ONE]]
    with pytest.raises(InvariantError):
        operational_order(p)


def test_recursion_on_small_matrix():
    # P = [[1, q - q^-1], [0, 1]] is an involution: P bar(P) = 1
    # the fixed lift of e_1 is e_1 - q^-1 e_0 since q - q^-1 + bar(-q^-1) = -q^-1
    p = [[ONE, q(1) - q(-1)], [ZERO, ONE]]
    order = operational_order(p)
    d = diamond_recursion(p, order)
    assert d[0][1] == -q(-1) and d[1][1] == ONE
    assert brute_force_fixed_point(p, 1) == [-q(-1), ONE]
