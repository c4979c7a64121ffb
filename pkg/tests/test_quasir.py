from __future__ import annotations

import random

import pytest

from qgcb import linalg, quasir, wmod
from qgcb.scalars import ONE, LaurentPoly, RatFunc
from qgcb.tensorcb import InadmissibleError, tensor_based
from qgcb.wmod import TruncationError

q = LaurentPoly.monomial


def rat(p):
    return RatFunc.coerce(p)


def test_theta_low_degrees_rank1(a1):
    th = quasir.compute_theta(a1.alg, a1.provider, 2)
    c0 = th.component((0,))
    assert c0.coeffs == [[rat(ONE)]]
    c1 = th.component((1,))
    assert c1.coeffs == [[rat(q(-1) - q(1))]]
    c2 = th.component((2,))
    # Theta_2 = (q - 2q^-1 + q^-3) theta^(2) (x) theta theta
    assert c2.coeffs == [[rat(q(1) - 2 * q(-1) + q(-3))]]
    assert all(c.is_integral() for c in th.components.values())


def test_theta_rank1_closed_form(a1):
    """Theta_n = (-1)^n q^{-n(n-1)/2} (q - q^-1)^n / [n]! theta^(n) (x) theta^n."""
    from qgcb.scalars import quantum_factorial
    th = quasir.compute_theta(a1.alg, a1.provider, 4)
    for n in range(5):
        (cb,) = th.component((n,)).cb_expansion(a1.alg)
        want = RatFunc((-1) ** n * q(-n * (n - 1) // 2) * (q(1) - q(-1)) ** n, ONE)
        # y is expressed on theta^(n); theta^n = [n]! theta^(n)
        assert cb[0] == want * rat(quantum_factorial(n))


def test_theta_truncation(a1):
    th = quasir.ThetaExpansion(a1.alg, a1.provider).extend(1)
    with pytest.raises(TruncationError):
        th.component((2,))
    L = a1.simple((2,))
    T = wmod.tensor_modules(L, L)
    beta = (-2,)
    with pytest.raises(TruncationError):
        quasir.theta_block(th, T, beta)
    quasir.theta_block(th, T, beta, auto_extend=True)
    assert th.bound == 2


def test_theta_json_roundtrip(a2):
    th = quasir.compute_theta(a2.alg, a2.provider, 2)
    import json
    obj = json.loads(th.dumps())
    back = quasir.theta_from_json(a2.alg, obj)
    for nu, comp in th.components.items():
        assert back[nu]["coeffs"] == comp.coeffs


def test_theta_apply_example(a1):
    L = a1.simple((1,))
    T = wmod.tensor_modules(L, L)
    th = quasir.compute_theta(a1.alg, a1.provider, 2)
    beta = (-1,)
    idx = {n: k for k, n in enumerate(T.names[beta])}
    v = T.basis_vector(beta, idx["1 (x) t0"])
    w = quasir.theta_apply(th, T, v)
    # Theta(eta (x) F eta) = eta (x) F eta - (q - q^-1) F eta (x) eta
    assert w.coords[idx["1 (x) t0"]] == ONE
    assert w.coords[idx["t0 (x) 1"]] == q(-1) - q(1)
    u = T.basis_vector(beta, idx["t0 (x) 1"])
    assert quasir.theta_apply(th, T, u) == u


def _random_coords(rng, n):
    return [LaurentPoly({rng.randint(-3, 3): rng.randint(-5, 5), rng.randint(-3, 3): rng.randint(-5, 5)})
            for _ in range(n)]


@pytest.mark.parametrize("name,shape", [
    ("A1", ((1,), (1,), "hh")), ("A1", ((2,), (1,), "lh")), ("A2", ((1, 0), (0, 1), "hh")),
    ("B2", ((1, 0), (0, 1), "lh")),
])
def test_psi_involutive_and_antilinear(request, name, shape):
    ctx = request.getfixturevalue({"A1": "a1", "A2": "a2", "B2": "b2"}[name])
    l1, l2, kinds = shape
    M = ctx.lowest(l1) if kinds[0] == "l" else ctx.simple(l1)
    T = wmod.tensor_modules(M, ctx.simple(l2))
    rng = random.Random(7)
    for beta in T.weights():
        n = T.dim(beta)
        v = T.vector(beta, _random_coords(rng, n))
        w = T.vector(beta, _random_coords(rng, n))
        a = LaurentPoly({rng.randint(-2, 2): rng.randint(1, 3)})
        s = quasir.psi_ambient(ctx.theta, T, beta, auto_extend=True)
        ps = lambda x: T.vector(beta, linalg.mat_vec(s, [c.bar() for c in x.coords]))
        assert ps(ps(v)) == v
        assert ps(v + w.scale(a)) == ps(v) + ps(w).scale(a.bar())


def test_psi_rank1_unitriangular(a1):
    L = a1.simple((3,))
    T = wmod.tensor_modules(L, L)
    beta = (-3,)
    a1.theta.extend(3)
    p = quasir.psi_standard(a1.theta, T, beta)
    assert len(p) == 4
    for j in range(4):
        assert p[j][j] == rat(ONE)
    nonzero_off = [(j, k) for j in range(4) for k in range(4) if j != k and p[j][k]]
    # strictly triangular for a suitable order: no two-cycles
    assert all((k, j) not in nonzero_off for j, k in nonzero_off)
    assert all(isinstance(p[j][k], LaurentPoly) for j, k in nonzero_off)


def test_psi_fixes_highest_tensor(a2):
    L1, L2 = a2.simple((1, 0)), a2.simple((0, 1))
    T = wmod.tensor_modules(L1, L2)
    v = T.basis_vector((0, 0), 0)
    assert quasir.psi_apply(a2.theta, T, v) == v


@pytest.mark.parametrize("name,l1,l2,low", [
    ("A1", (1,), (1,), False), ("A1", (1,), (2,), True), ("A2", (1, 0), (0, 1), False),
    ("A2", (1, 0), (1, 0), True), ("B2", (1, 0), (0, 1), False),
])
def test_psi_generation_equals_theta(request, name, l1, l2, low):
    ctx = request.getfixturevalue({"A1": "a1", "A2": "a2", "B2": "b2"}[name])
    M = ctx.lowest(l1) if low else ctx.simple(l1)
    T = wmod.tensor_modules(M, ctx.simple(l2))
    for beta in T.weights():
        assert quasir.generation_certificate(T, beta).is_monomial_unit()
        assert quasir.psi_generation_ambient(T, beta) == quasir.psi_ambient(
            ctx.theta, T, beta, auto_extend=True)


@pytest.mark.parametrize("name,l1,l2,low,h", [
    ("A1", (1,), (1,), False, None), ("A1", (1,), (1,), True, None),
    ("A2", (1, 1), (1, 0), False, None), ("B2", (0, 1), (1, 0), True, None),
    ("A1^(1)", (1, 0), (1, 0), False, 3), ("A1^(1)", (1, 0), (0, 1), False, 3),
])
def test_lattice_preservation(request, name, l1, l2, low, h):
    ctx = request.getfixturevalue({"A1": "a1", "A2": "a2", "B2": "b2", "A1^(1)": "aff"}[name])
    M = ctx.lowest(l1, h) if low else ctx.simple(l1, h)
    T = wmod.tensor_modules(M, ctx.simple(l2, h))
    rep = quasir.check_lattice_preservation(ctx.theta, T)
    assert rep.ok, rep.violations[:3]
    assert rep.weights_checked == len(T.weights())
    assert rep.to_json()["ok"]


def test_affine_theta_integrality_recorded(aff):
    L = aff.simple((1, 0), 3)
    T = wmod.tensor_modules(L, L)
    rep = quasir.check_lattice_preservation(aff.theta, T)
    assert rep.ok
    assert rep.theta_integral[(1, 0)]["word_basis"]
    # integrality of the raw expansion is data, not a requirement
    assert set(rep.theta_integral) >= {(1, 1)}


def test_star_certificates(a1, aff):
    L = a1.simple((1,))
    W = a1.lowest((1,))
    assert "highest" in quasir.star_certificate(W, L)
    assert "lowest" in quasir.star_certificate(W, W)
    assert "finite" in quasir.star_certificate(L, W)
    La = aff.simple((1, 0), 2)
    Wa = wmod.omega_twist(La)
    with pytest.raises(ValueError):
        quasir.star_certificate(La, Wa)
    with pytest.raises(InadmissibleError):
        tensor_based(aff.theta, La, Wa)
