"""Acceptance criteria 1-8.

Each criterion is one function returning a list of failure messages; the
pytest wrappers print "criterion N: PASS/FAIL" and the module can also be run
directly with ``python tests/test_acceptance.py``.
"""
from __future__ import annotations

import sys
import time
from functools import lru_cache

import pytest

from qgcb import linalg, quasir, wmod
from qgcb.rootdata import load_datum, positive_root_partitions
from qgcb.scalars import ONE, ZERO
from qgcb.tensorcb import (
    Context, associativity_check, chi_embedding, leaf_modules, multi_diamond, oracle_check,
    positivity_scan, psi_fixed_check, reduction_check, triangularity_check,
)

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script from elsewhere
    ACCEPTANCE_LINES = []

RANK1 = [((l1,), (l2,), r) for l1 in range(5) for l2 in range(5) for r in (0, 1)]
A2_DESK = [((1, 0), (0, 1), 0), ((1, 0), (1, 0), 0), ((0, 1), (1, 0), 0),
           ((1, 0), (1, 0), 1), ((0, 1), (1, 1), 1), ((1, 1), (1, 0), 0)]
B2_DESK = [((1, 0), (0, 1), 0), ((0, 1), (1, 0), 1), ((1, 0), (1, 0), 0)]
AFF_DESK = [((1, 0), (1, 0), 0), ((1, 0), (0, 1), 0)]
AFF_HT = 3


@lru_cache(maxsize=None)
def ctx(name: str) -> Context:
    return Context.build(load_datum(name))


@lru_cache(maxsize=None)
def desk(name: str, l1, l2, r: int):
    h = AFF_HT if name == "A1^(1)" else None
    return multi_diamond(ctx(name), [l1, l2], r, h)


def desk_cases():
    yield from (("A1",) + c for c in RANK1)
    yield from (("A2",) + c for c in A2_DESK)
    yield from (("B2",) + c for c in B2_DESK)
    yield from (("A1^(1)",) + c for c in AFF_DESK)


def _tag(name, l1, l2, r):
    return f"{name} {l1},{l2};r={r}"


def _tensor_steps(T):
    if T.kind != "tensor":
        return []
    return _tensor_steps(T.factors[0]) + _tensor_steps(T.factors[1]) + [T]


# ---------------------------------------------------------------------------


def criterion_1() -> list[str]:
    """Rank one: every diamond element is Psi-fixed, in the lattice, and triangular."""
    fails = []
    for l1, l2, r in RANK1:
        t0 = time.perf_counter()
        db = desk("A1", l1, l2, r)
        tag = _tag("A1", l1, l2, r)
        fails += [f"{tag}: {m}" for m in psi_fixed_check(db) + triangularity_check(db)]
        for beta, k, col in db.elements():
            # ambient coordinates are the standard tensor basis here (leaf bases are standard)
            if not all(x.in_Z_qinv() for x in col):
                fails.append(f"{tag}: element {k} at {beta} leaves the lattice")
        if time.perf_counter() - t0 > 60:
            fails.append(f"{tag}: took longer than a minute")
    return fails


def criterion_2() -> list[str]:
    """Brute-force fixed points agree with the recursion; Psi via Theta = Psi via generation."""
    fails = []
    for name, l1, l2, r in desk_cases():
        db = desk(name, l1, l2, r)
        tag = _tag(name, l1, l2, r)
        if name in ("A1", "A2"):
            fails += [f"{tag}: {m}" for m in oracle_check(db.module)]
        th = ctx(name).theta
        for S in _tensor_steps(db.module):
            for beta in S.weights():
                gen = quasir.psi_generation_ambient(S, beta)
                for k in range(S.dim(beta)):
                    v = S.basis_vector(beta, k)
                    a = quasir.psi_apply(th, S, v)
                    b = quasir.psi_via_generation(S, v)
                    if a != b:
                        fails.append(f"{tag}: Psi differs on basis vector {k} at {beta}")
                assert len(gen) == S.dim(beta)
    return fails


THETA_RECORD: dict = {}


def criterion_3() -> list[str]:
    """Theta preserves the A-span of standard tensors; affine expansion integrality is recorded."""
    fails = []
    for name, l1, l2, r in desk_cases():
        db = desk(name, l1, l2, r)
        for S in _tensor_steps(db.module):
            rep = quasir.check_lattice_preservation(ctx(name).theta, S)
            fails += [f"{_tag(name, l1, l2, r)}: {v}" for v in rep.violations]
            if name == "A1^(1)":
                THETA_RECORD.update(rep.theta_integral)
    if not THETA_RECORD:
        fails.append("affine Theta expansion was not recorded")
    return fails


def criterion_4() -> list[str]:
    """Both bracketings of a triple product give the same diamond vectors."""
    fails = []
    a1, a2 = ctx("A1"), ctx("A2")
    L, W = a1.simple((1,)), a1.lowest((1,))
    fails += [f"A1 (1,1,1;0): {m}" for m in associativity_check(a1.theta, L, L, L)]
    fails += [f"A1 (1,1,1;1): {m}" for m in associativity_check(a1.theta, W, L, L)]
    p1, p2 = a2.simple((1, 0)), a2.simple((0, 1))
    fails += [f"A2 (w1,w1,w2;0): {m}" for m in associativity_check(a2.theta, p1, p1, p2)]
    return fails


def criterion_5() -> list[str]:
    """chi sends the canonical basis of L(sum) onto diamond elements."""
    fails = []
    for name, lams in (("A1", [(1,), (1,)]), ("A1", [(2,), (1,)]), ("A2", [(1, 0), (1, 0)])):
        rep = chi_embedding(ctx(name), lams)
        if rep.matched == 0:
            fails.append(f"{name} {lams}: nothing compared")
        fails += [f"{name} {lams}: {m}" for m in rep.failures]
    return fails


def criterion_6() -> list[str]:
    """Symmetric type, r = 0: corrections have nonnegative coefficients."""
    fails = []
    observed = 0
    for name, l1, l2, r in desk_cases():
        db = desk(name, l1, l2, r)
        rep = positivity_scan(db, r)
        if rep.mode == "strict":
            fails += [f"{_tag(name, l1, l2, r)}: {v}" for v in rep.violations]
        else:
            observed += len(rep.violations)
    if observed:
        print(f"  (positivity: {observed} negative coefficients observed in non-strict cases)")
    return fails


def criterion_7() -> list[str]:
    """Relations, dim f_nu by root partitions, bar^2 = id, Psi^2 = id."""
    fails = []
    for name in ("A1", "A2", "B2"):
        c = ctx(name)
        for nu in c.datum.nu_weights_up_to(6):
            want = positive_root_partitions(c.datum.cartan, nu)
            if c.alg.space(nu).dim != want:
                fails.append(f"{name}: dim f_{nu} = {c.alg.space(nu).dim}, want {want}")
    seen = set()
    for name, l1, l2, r in desk_cases():
        db = desk(name, l1, l2, r)
        T = db.module
        for M in leaf_modules(T) + _tensor_steps(T):
            if id(M) in seen:
                continue
            seen.add(id(M))
            fails += [f"{name} relations: {m}" for m in wmod.check_relations(M)]
            for beta in M.weights():
                b = M.bar_matrix(beta)
                sq = linalg.mat_mul(b, linalg.mat_bar(b))
                n = len(sq)
                if sq != [[ONE if j == k else ZERO for k in range(n)] for j in range(n)]:
                    fails.append(f"{_tag(name, l1, l2, r)}: involution squares to {sq} at {beta}")
    return fails


def criterion_8() -> list[str]:
    """Diamond-to-standard change of basis is the identity mod q^-1."""
    fails = []
    for name, l1, l2, r in desk_cases():
        fails += [f"{_tag(name, l1, l2, r)}: {m}" for m in reduction_check(desk(name, l1, l2, r))]
    return fails


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
            5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8}


def run_criterion(n: int) -> list[str]:
    try:
        fails = CRITERIA[n]()
    except Exception as exc:  # a crash counts as a failure of that criterion
        fails = [f"{type(exc).__name__}: {exc}"]
    line = f"criterion {n}: {'PASS' if not fails else 'FAIL'}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return fails


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n):
    fails = run_criterion(n)
    assert not fails, "\n".join(fails[:20])


def test_affine_theta_recorded_not_asserted():
    if not THETA_RECORD:
        criterion_3()
    # the record exists; whether each entry is integral is data
    assert all(set(v) == {"word_basis", "canonical_basis"} for v in THETA_RECORD.values())


if __name__ == "__main__":
    bad = [n for n in sorted(CRITERIA) if run_criterion(n)]
    sys.exit(1 if bad else 0)
