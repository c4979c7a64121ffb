"""The quasi-R-matrix and the bar involution of a tensor product.

Theta = sum_nu Theta_nu with Theta_nu = sum_a b_a^- (x) y_a^+, where b_a runs
over the canonical basis B_nu and y_a is in f_nu.  Theta_nu is pinned down,
degree by degree, by

    (1 (x) _i r) Theta_nu = -(q_i - q_i^-1) (theta_i . (x) 1) Theta_{nu - i}

and the companion identity with r_i and right multiplication is checked
afterwards.  These are the generator intertwining equations for F_i and E_i
written in terms of f.
"""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field

from . import linalg
from .falgebra import CanonicalBasisProvider, CBElement, FAlgebra, FElement, basis_to_json
from .rootdata import NuWeight
from .scalars import LaurentPoly, ONE, RAT_ZERO, RatFunc, ZERO
from .wmod import (
    Beta, BasedModule, InvariantError, TruncationError, WeightVector, beta_add, zero_mat,
)


@dataclass
class ThetaComponent:
    nu: NuWeight
    basis: list[CBElement]
    # coeffs[a][k]: coefficient of b_a (x) (basis word k of f_nu)
    coeffs: list[list[RatFunc]]
    y: list[FElement]

    def is_integral(self) -> bool:
        return all(c.is_laurent() for row in self.coeffs for c in row)

    def cb_expansion(self, alg: FAlgebra) -> list[list[RatFunc]]:
        """Coefficients of Theta_nu on B_nu (x) B_nu."""
        els = [b.element for b in self.basis]
        return [alg.coefficients_in(els, y) for y in self.y]


class ThetaExpansion:
    """Theta_nu for every nu of height <= bound; extendable in place."""

    def __init__(self, alg: FAlgebra, provider: CanonicalBasisProvider):
        self.alg = alg
        self.provider = provider
        self.datum = alg.datum
        self.components: dict[NuWeight, ThetaComponent] = {}
        self.bound = -1
        self._lock = threading.RLock()

    def component(self, nu: NuWeight) -> ThetaComponent:
        h = sum(nu)
        if h > self.bound:
            raise TruncationError(f"Theta computed only up to height {self.bound}, need {h}")
        return self.components[tuple(nu)]

    def extend(self, bound: int) -> "ThetaExpansion":
        with self._lock:
            for h in range(self.bound + 1, bound + 1):
                for nu in self.datum.nu_weights_of_height(h):
                    self.components[nu] = self._solve(nu)
                self.bound = h
        return self

    # -- the degree-nu linear system ----------------------------------------
    def _ir_matrix(self, i: int, nu: NuWeight):
        alg = self.alg
        sp = alg.space(nu)
        cols = []
        for w in sp.basis_words:
            _, ir = alg.kashiwara_maps(i, sp.word_element(w))
            cols.append(list(ir.coords))
        return linalg.transpose(cols)

    def _qi(self, i: int) -> LaurentPoly:
        d = self.datum.d[i]
        return LaurentPoly.monomial(d) - LaurentPoly.monomial(-d)

    def _solve(self, nu: NuWeight) -> ThetaComponent:
        alg = self.alg
        n = self.datum.n
        basis = self.provider.basis(nu)
        sp = alg.space(nu)
        if not any(nu):
            return ThetaComponent(nu, basis, [[RatFunc.coerce(1)]], [alg.one()])
        els = [b.element for b in basis]
        rows, rhs = [], [[] for _ in basis]
        for i in range(n):
            if nu[i] == 0:
                continue
            prev = tuple(x - int(k == i) for k, x in enumerate(nu))
            pc = self.components[prev]
            rows.extend(self._ir_matrix(i, nu))
            # theta_i b'_{a'} = sum_a C[a][a'] b_a
            cmat = [alg.coefficients_in(els, alg.free_mult(alg.theta(i), bp.element))
                    for bp in pc.basis]
            scale = RatFunc.coerce(-self._qi(i))
            for a in range(len(basis)):
                acc = [RAT_ZERO] * alg.space(prev).dim
                for ap, ya in enumerate(pc.y):
                    c = cmat[ap][a]
                    if c:
                        acc = [s + c * x for s, x in zip(acc, ya.coords)]
                rhs[a].extend(scale * x for x in acc)
        try:
            sol = linalg.solve(rows, linalg.transpose(rhs))
        except linalg.SingularSystemError as exc:
            raise InvariantError(f"Theta_{nu}: {exc}") from None
        y = [sp.element([sol[k][a] for k in range(sp.dim)]) for a in range(len(basis))]
        comp = ThetaComponent(nu, basis, [list(v.coords) for v in y], y)
        self._check_right(comp)
        return comp

    def _check_right(self, comp: ThetaComponent) -> None:
        """(1 (x) r_i) Theta_nu = -(q_i - q_i^-1) (. theta_i (x) 1) Theta_{nu - i}."""
        alg = self.alg
        nu = comp.nu
        els = [b.element for b in comp.basis]
        for i in range(self.datum.n):
            if nu[i] == 0:
                continue
            prev = tuple(x - int(k == i) for k, x in enumerate(nu))
            pc = self.components[prev]
            dmat = [alg.coefficients_in(els, alg.free_mult(bp.element, alg.theta(i)))
                    for bp in pc.basis]
            scale = RatFunc.coerce(-self._qi(i))
            for a, ya in enumerate(comp.y):
                ri, _ = alg.kashiwara_maps(i, ya)
                acc = alg.space(prev).zero()
                for ap, yp in enumerate(pc.y):
                    if dmat[ap][a]:
                        acc = acc + yp.scale(dmat[ap][a])
                if ri != acc.scale(scale):
                    raise InvariantError(f"Theta_{nu} fails the r_{i} consistency identity")

    # -- export -------------------------------------------------------------
    def to_json(self) -> dict:
        comps = []
        for nu in sorted(self.components, key=lambda v: (sum(v), v)):
            c = self.components[nu]
            words = self.alg.space(nu).basis_words
            comps.append({
                "nu": list(nu),
                "first": basis_to_json(nu, c.basis),
                "second_words": [list(w) for w in words],
                "coeffs": [[x.to_json() for x in row] for row in c.coeffs],
                "integral": c.is_integral(),
                "integral_on_canonical_basis": all(
                    x.is_laurent() for row in c.cb_expansion(self.alg) for x in row),
            })
        return {"datum": self.datum.cartan.to_json(), "ht_bound": self.bound,
                "components": comps}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


def compute_theta(alg: FAlgebra, provider: CanonicalBasisProvider, ht_bound: int) -> ThetaExpansion:
    if ht_bound < 0:
        raise ValueError("ht_bound must be >= 0")
    return ThetaExpansion(alg, provider).extend(ht_bound)


def theta_from_json(alg: FAlgebra, obj) -> dict:
    """Re-import an exported expansion as {nu: coefficient matrix}."""
    from .falgebra import basis_from_json
    out = {}
    for comp in obj["components"]:
        nu = tuple(comp["nu"])
        out[nu] = {
            "first": basis_from_json(alg, comp["first"]),
            "coeffs": [[RatFunc.from_json(x) for x in row] for row in comp["coeffs"]],
        }
    return out


# ---------------------------------------------------------------------------
# action on tensor products
# ---------------------------------------------------------------------------


def star_certificate(M: BasedModule, N: BasedModule) -> str:
    """Why condition (*) holds for M (x) N, or raise if it cannot be certified."""
    if N.kind == "highest":
        return "second factor is a highest weight simple module"
    if N.kind == "verma":
        return "second factor is a Verma module (E acts locally nilpotently)"
    if M.kind == "lowest":
        return "first factor is a lowest weight simple module"
    if M.is_complete and N.is_complete and M.datum.cartan.is_finite_type:
        return "both factors finite-dimensional"
    raise ValueError(
        "inadmissible tensor shape: need a lowest weight simple first factor or a highest "
        "weight simple last factor (no opposite quasi-R-matrix exists for other orders)")


def _block_pairs(T: BasedModule, beta: Beta):
    blocks: dict[tuple[Beta, Beta], list[int]] = {}
    for col, (b1, k1, b2, k2) in enumerate(T._pairs[beta]):
        blocks.setdefault((b1, b2), []).append(col)
    return blocks


def theta_block(theta: ThetaExpansion, T: BasedModule, beta: Beta, auto_extend: bool = False):
    """Matrix of Theta on T_beta in ambient coordinates (RatFunc entries)."""
    M, N = T.factors
    n = T.n
    T.check_computed(beta)
    dim = T.dim(beta)
    out = [[RAT_ZERO] * dim for _ in range(dim)]
    for c in range(dim):
        out[c][c] = RatFunc.coerce(1)
    index = T._index[beta]
    rd = theta.datum
    for (b1, b2), cols in _block_pairs(T, beta).items():
        h = 1
        while True:
            nus = rd.nu_weights_of_height(h)
            # condition (*): stop once either side acts by zero in height h
            e_zero = True
            f_zero = True
            for nu in nus:
                t2 = beta_add(b2, nu)
                if N.dim(t2):
                    for w in theta.alg.space(nu).words:
                        _, m = N.word_operator("E", w, b2)
                        if any(x for row in m for x in row):
                            e_zero = False
                            break
                if not e_zero:
                    break
            if not e_zero:
                for nu in nus:
                    t1 = beta_add(b1, tuple(-x for x in nu))
                    if M.dim(t1):
                        for w in theta.alg.space(nu).words:
                            _, m = M.word_operator("F", w, b1)
                            if any(x for row in m for x in row):
                                f_zero = False
                                break
                    if not f_zero:
                        break
            if e_zero or f_zero:
                break
            if h > theta.bound:
                if auto_extend:
                    theta.extend(h)
                else:
                    raise TruncationError(
                        f"Theta needed at height {h}, computed to {theta.bound}")
            for nu in nus:
                t1 = beta_add(b1, tuple(-x for x in nu))
                t2 = beta_add(b2, nu)
                if not (M.dim(t1) and N.dim(t2)):
                    continue
                comp = theta.component(nu)
                for b, y in zip(comp.basis, comp.y):
                    _, fb = M.cb_operator("F", b, b1)
                    _, ey = N.felement_operator("E", y, b2)
                    for col in cols:
                        _, k1, _, k2 = T._pairs[beta][col]
                        for r1 in range(M.dim(t1)):
                            x = fb[r1][k1]
                            if not x:
                                continue
                            for r2 in range(N.dim(t2)):
                                z = ey[r2][k2]
                                if z:
                                    row = index[(t1, r1, t2, r2)]
                                    out[row][col] = out[row][col] + z * x
            h += 1
    return out


def _kron_blocks(T: BasedModule, beta: Beta, fm, fn):
    """Block-diagonal matrix of fm(M, b1) (x) fn(N, b2) over the pairs of T_beta."""
    M, N = T.factors
    dim = T.dim(beta)
    out = zero_mat(dim, dim)
    index = T._index[beta]
    for (b1, b2), cols in _block_pairs(T, beta).items():
        m1 = fm(M, b1)
        m2 = fn(N, b2)
        for col in cols:
            _, k1, _, k2 = T._pairs[beta][col]
            for r1 in range(M.dim(b1)):
                x = m1[r1][k1]
                if not x:
                    continue
                for r2 in range(N.dim(b2)):
                    y = m2[r2][k2]
                    if y:
                        out[index[(b1, r1, b2, r2)]][col] = x * y
    return out


def cb_inverse(M: BasedModule, beta: Beta):
    key = ("cbinv", beta)
    got = M._opcache.get(key)
    if got is None:
        c = M.cb_matrix(beta)
        if M.cb is None or beta not in M.cb:
            got = c
        else:
            got = [[x.to_laurent() for x in row] for row in linalg.inverse(c)]
        M._opcache[key] = got
    return got


def standard_basis_matrix(T: BasedModule, beta: Beta):
    """G: columns are the standard tensors b (x) b' in ambient coordinates."""
    return _kron_blocks(T, beta, lambda X, b: X.cb_matrix(b), lambda X, b: X.cb_matrix(b))


def standard_basis_inverse(T: BasedModule, beta: Beta):
    return _kron_blocks(T, beta, cb_inverse, cb_inverse)


def factor_bar_matrix(T: BasedModule, beta: Beta):
    """bar (x) bar on T_beta in ambient coordinates (antilinear: applied to conj(v))."""
    return _kron_blocks(T, beta, lambda X, b: X.bar_matrix(b), lambda X, b: X.bar_matrix(b))


def theta_matrix(theta: ThetaExpansion, T: BasedModule, beta: Beta, auto_extend: bool = False):
    """Theta on T_beta (ambient coordinates); asserts entries in A."""
    blk = theta_block(theta, T, beta, auto_extend)
    try:
        return [[x.to_laurent() for x in row] for row in blk]
    except ArithmeticError:
        raise InvariantError(f"Theta has a non-A entry on the ambient basis at {beta}") from None


def psi_ambient(theta: ThetaExpansion, T: BasedModule, beta: Beta, auto_extend: bool = False):
    """S with Psi(v) = S . conj(v), ambient coordinates."""
    key = ("psi_amb", beta)
    got = T._opcache.get(key)
    if got is None:
        got = linalg.mat_mul(theta_matrix(theta, T, beta, auto_extend), factor_bar_matrix(T, beta))
        T._opcache[key] = got
    return got


def theta_apply(theta: ThetaExpansion, T: BasedModule, v: WeightVector) -> WeightVector:
    m = theta_block(theta, T, v.beta)
    coords = linalg.mat_vec(m, [RatFunc.coerce(x) for x in v.coords], RAT_ZERO)
    return WeightVector(T, v.beta, tuple(_maybe_laurent(c) for c in coords))


def psi_apply(theta: ThetaExpansion, T: BasedModule, v: WeightVector) -> WeightVector:
    s = psi_ambient(theta, T, v.beta)
    conj = [x.bar() for x in v.coords]
    if all(isinstance(x, LaurentPoly) for x in conj):
        return WeightVector(T, v.beta, tuple(linalg.mat_vec(s, conj)))
    coords = linalg.mat_vec(s, [RatFunc.coerce(x) for x in conj], RAT_ZERO)
    return WeightVector(T, v.beta, tuple(_maybe_laurent(c) for c in coords))


def _maybe_laurent(c: RatFunc):
    return c.num if c.is_laurent() else c


def psi_standard(theta: ThetaExpansion, T: BasedModule, beta: Beta, auto_extend: bool = False):
    """P with Psi(sum x_k e_k) = sum_j (P bar(x))_j e_j on the standard tensor basis."""
    s = psi_ambient(theta, T, beta, auto_extend)
    g = standard_basis_matrix(T, beta)
    ginv = standard_basis_inverse(T, beta)
    return linalg.mat_mul(ginv, linalg.mat_mul(s, linalg.mat_bar(g)))


# ---------------------------------------------------------------------------
# Psi without Theta
# ---------------------------------------------------------------------------


def generation_vectors(T: BasedModule, beta: Beta):
    """Spanning vectors u(b (x) eta) or u(eta^w (x) b) at T_beta, u canonical basis elements.

    Returns (columns in ambient coordinates, labels, side).
    """
    from .wmod import tensor_vector
    M, N = T.factors
    n = T.n
    cols, labels = [], []
    if N.kind in ("highest", "verma"):
        side = "right"
        for beta1 in M.weights():
            nu = tuple(b1 - b for b1, b in zip(beta1, beta))
            if any(x < 0 for x in nu) or not N.dim(tuple(-x for x in nu)):
                continue
            eta = N.basis_vector((0,) * n, 0)
            for k in range(M.dim(beta1)):
                b = WeightVector(M, beta1, tuple(r[k] for r in M.cb_matrix(beta1)))
                v = tensor_vector(T, b, eta)
                for j, bp in enumerate(N.cb_elements[tuple(-x for x in nu)]):
                    tgt, m = T.cb_operator("F", bp, v.beta)
                    assert tgt == beta
                    cols.append(linalg.mat_vec(m, v.coords))
                    labels.append((beta1, k, j))
    elif M.kind == "lowest":
        side = "left"
        for beta2 in N.weights():
            nu = tuple(b - b2 for b2, b in zip(beta2, beta))
            if any(x < 0 for x in nu) or not M.dim(nu):
                continue
            eta = M.basis_vector((0,) * n, 0)
            for k in range(N.dim(beta2)):
                b = WeightVector(N, beta2, tuple(r[k] for r in N.cb_matrix(beta2)))
                v = tensor_vector(T, eta, b)
                for j, bp in enumerate(M.cb_elements[nu]):
                    tgt, m = T.cb_operator("E", bp, v.beta)
                    assert tgt == beta
                    cols.append(linalg.mat_vec(m, v.coords))
                    labels.append((beta2, k, j))
    else:
        raise ValueError("Psi via generation needs M (x) L(lam) or wL(lam) (x) M")
    return cols, labels, side


def generation_certificate(T: BasedModule, beta: Beta) -> LaurentPoly:
    """Determinant of the spanning vectors on the standard basis; must be a unit of A."""
    cols, _, _ = generation_vectors(T, beta)
    dim = T.dim(beta)
    if len(cols) != dim:
        raise InvariantError(f"{len(cols)} spanning vectors for a {dim}-dimensional space at {beta}")
    if not dim:
        return ONE
    ginv = standard_basis_inverse(T, beta)
    std = linalg.mat_mul(ginv, linalg.transpose(cols))
    det = linalg.determinant(std)
    if not (det.is_laurent() and det.num.is_monomial_unit()):
        raise InvariantError(f"spanning vectors do not span the A-form at {beta} (det {det})")
    return det.num


def psi_generation_ambient(T: BasedModule, beta: Beta):
    """S_gen with Psi(v) = S_gen . conj(v), computed from Psi-fixed spanning vectors."""
    cols, _, _ = generation_vectors(T, beta)
    dim = T.dim(beta)
    if not dim:
        return []
    smat = linalg.transpose(cols)
    piv = linalg.independent_columns(smat)
    if len(piv) != dim:
        raise InvariantError(f"spanning set deficient at {beta}: rank {len(piv)} < {dim}")
    sq = [[row[p] for p in piv] for row in smat]
    inv = linalg.inverse(sq)
    out = linalg.mat_mul(linalg.to_rat(sq), linalg.mat_bar(inv), RAT_ZERO)
    try:
        return [[x.to_laurent() for x in row] for row in out]
    except ArithmeticError:
        raise InvariantError(f"Psi via generation leaves A at {beta}") from None


def psi_via_generation(T: BasedModule, v: WeightVector) -> WeightVector:
    s = psi_generation_ambient(T, v.beta)
    return WeightVector(T, v.beta, tuple(linalg.mat_vec(s, [x.bar() for x in v.coords])))


# ---------------------------------------------------------------------------
# lattice checks
# ---------------------------------------------------------------------------


@dataclass
class LatticeReport:
    violations: list[dict] = field(default_factory=list)
    weights_checked: int = 0
    theta_integral: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"ok": self.ok, "weights_checked": self.weights_checked,
                "violations": self.violations,
                "theta_integral": {",".join(map(str, k)): v for k, v in self.theta_integral.items()}}


def check_lattice_preservation(theta: ThetaExpansion, T: BasedModule,
                               auto_extend: bool = True) -> LatticeReport:
    """Theta maps every standard tensor into the A-span of standard tensors.

    The integrality of Theta's own expansion coefficients is recorded, not asserted.
    """
    rep = LatticeReport()
    for beta in T.weights():
        blk = theta_block(theta, T, beta, auto_extend)
        g = standard_basis_matrix(T, beta)
        ginv = standard_basis_inverse(T, beta)
        std = linalg.mat_mul(linalg.to_rat(ginv), linalg.mat_mul(blk, linalg.to_rat(g), RAT_ZERO),
                             RAT_ZERO)
        for r, row in enumerate(std):
            for c, x in enumerate(row):
                if not x.is_laurent():
                    rep.violations.append({"weight": list(beta), "column": T.names[beta][c],
                                           "row": T.names[beta][r], "entry": str(x)})
        rep.weights_checked += 1
    for nu, comp in theta.components.items():
        cb = comp.cb_expansion(theta.alg)
        rep.theta_integral[nu] = {
            "word_basis": comp.is_integral(),
            "canonical_basis": all(x.is_laurent() for row in cb for x in row),
        }
    return rep
