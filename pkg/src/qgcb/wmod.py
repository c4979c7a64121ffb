"""Weight modules with distinguished bases.

Weight spaces are indexed by a refined grading ``beta`` in Z^I: a vector of
X-weight ``base + sum_i beta_i i'``.  For a highest weight module beta is
minus the depth nu; for a lowest weight module it is plus nu.  In affine
type the simple roots are dependent in X, and the refined grading keeps
weight spaces finite-dimensional without modelling an extra coordinate.

Every module stores its action matrices in "ambient" coordinates.  Simple
modules use their canonical basis as ambient basis; a tensor product uses the
product of its factors' ambient bases.  Alongside it keeps its bar involution
as an antilinear matrix (bar(v) = S . conj(v)) and its distinguished basis as
columns in ambient coordinates.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from . import linalg
from .falgebra import (
    CanonicalBasisProvider, CBElement, DividedMonomial, FAlgebra, FElement,
)
from .rootdata import NuWeight, RootDatum, Weight, dominant_test
from .scalars import (
    LaurentPoly, ONE, RAT_ZERO, RatFunc, ZERO, quantum_factorial, quantum_integer,
)

Beta = tuple[int, ...]
Matrix = list[list]


class TruncationError(RuntimeError):
    """A computation left the computed part of a truncated module."""


class InvariantError(AssertionError):
    """A property guaranteed by the theory failed at runtime."""


def qint(m: int, d: int = 1) -> LaurentPoly:
    """[m]_d for any integer m, with [-m] = -[m]."""
    if m >= 0:
        return quantum_integer(m, d)
    return -quantum_integer(-m, d)


def zero_mat(rows: int, cols: int) -> Matrix:
    return [[ZERO] * cols for _ in range(rows)]


def beta_add(a: Beta, b: Beta) -> Beta:
    return tuple(x + y for x, y in zip(a, b))


def beta_unit(n: int, i: int, sign: int = 1) -> Beta:
    return tuple(sign if k == i else 0 for k in range(n))


@dataclass(eq=False)
class BasedModule:
    """A truncated weight module with distinguished basis and bar involution."""

    datum: RootDatum
    kind: str  # "highest" | "lowest" | "tensor" | "verma" | "trivial"
    base: Weight
    labels: dict[Beta, list[tuple]]
    E: dict[tuple[int, Beta], Matrix]
    F: dict[tuple[int, Beta], Matrix]
    bound: int | None = None
    lift: int = 0
    bar: dict[Beta, Matrix] | None = None
    cb: dict[Beta, Matrix] | None = None
    names: dict[Beta, list[str]] = field(default_factory=dict)
    factors: tuple = ()
    cb_elements: dict[Beta, list[CBElement]] = field(default_factory=dict)
    highest: Weight | None = None
    _opcache: dict = field(default_factory=dict, repr=False)

    # -- grading ----------------------------------------------------------
    @property
    def n(self) -> int:
        return self.datum.n

    def computed(self, beta: Beta) -> bool:
        if self.bound is None:
            return True
        return -sum(beta) + self.lift <= self.bound

    def check_computed(self, beta: Beta) -> None:
        if not self.computed(beta):
            raise TruncationError(f"weight {beta} lies beyond the truncation (bound {self.bound})")

    def weights(self) -> list[Beta]:
        return sorted(self.labels, key=lambda b: (-sum(b), b))

    def dim(self, beta: Beta) -> int:
        return len(self.labels.get(beta, ()))

    def total_dim(self) -> int:
        return sum(len(v) for v in self.labels.values())

    def xweight(self, beta: Beta) -> Weight:
        out = list(self.base)
        for i, b in enumerate(beta):
            if b:
                r = self.datum.simple_roots[i]
                for j in range(self.n):
                    out[j] += b * r[j]
        return tuple(out)

    def k_exp(self, i: int, beta: Beta) -> int:
        """K~_i acts on the beta-space by q^{k_exp}."""
        return self.datum.d[i] * self.xweight(beta)[i]

    @property
    def is_complete(self) -> bool:
        return self.bound is None

    # -- matrices ----------------------------------------------------------
    def e_matrix(self, i: int, beta: Beta) -> Matrix:
        tgt = beta_add(beta, beta_unit(self.n, i))
        got = self.E.get((i, beta))
        if got is not None:
            return got
        self.check_computed(tgt)
        self.check_computed(beta)
        return zero_mat(self.dim(tgt), self.dim(beta))

    def f_matrix(self, i: int, beta: Beta) -> Matrix:
        tgt = beta_add(beta, beta_unit(self.n, i, -1))
        got = self.F.get((i, beta))
        if got is not None:
            return got
        self.check_computed(tgt)
        self.check_computed(beta)
        return zero_mat(self.dim(tgt), self.dim(beta))

    def bar_matrix(self, beta: Beta) -> Matrix:
        if self.bar is None or beta not in self.bar:
            return linalg.identity(self.dim(beta))
        return self.bar[beta]

    def cb_matrix(self, beta: Beta) -> Matrix:
        if self.cb is None or beta not in self.cb:
            return linalg.identity(self.dim(beta))
        return self.cb[beta]

    def word_operator(self, side: str, word: tuple[int, ...], beta: Beta) -> tuple[Beta, Matrix]:
        """Matrix of E_{w1}...E_{wn} (side "E") or F_{w1}...F_{wn} on the beta-space.

        The rightmost letter acts first.  Returns (target beta, matrix).
        """
        key = (side, word, beta)
        got = self._opcache.get(key)
        if got is not None:
            return got
        if not word:
            res = (beta, linalg.identity(self.dim(beta)))
        else:
            mid, m1 = self.word_operator(side, word[1:], beta)
            i = word[0]
            if side == "E":
                m0 = self.e_matrix(i, mid)
                tgt = beta_add(mid, beta_unit(self.n, i))
            else:
                m0 = self.f_matrix(i, mid)
                tgt = beta_add(mid, beta_unit(self.n, i, -1))
            res = (tgt, linalg.mat_mul(m0, m1) if m0 and m1 and m1[0] else
                   zero_mat(self.dim(tgt), self.dim(beta)))
        self._opcache[key] = res
        return res

    def divided_operator(self, side: str, mono: DividedMonomial, beta: Beta) -> tuple[Beta, Matrix]:
        """Matrix of a divided-power monomial in the E's or F's; exact over A."""
        key = (side + "div", mono, beta)
        got = self._opcache.get(key)
        if got is not None:
            return got
        tgt, m = self.word_operator(side, mono.word, beta)
        den = mono.denominator(self.datum.d)
        if den != ONE:
            try:
                m = [[x.exact_div(den) for x in row] for row in m]
            except ArithmeticError:
                raise InvariantError(f"divided power {mono} does not preserve the A-form") from None
        self._opcache[key] = (tgt, m)
        return tgt, m

    def cb_operator(self, side: str, b: CBElement, beta: Beta) -> tuple[Beta, Matrix]:
        """b^- (side "F") or b^+ (side "E") for a canonical basis element b."""
        tgt = None
        acc = None
        for mono, c in b.monomials:
            t, m = self.divided_operator(side, mono, beta)
            tgt = t
            term = [[c * x for x in row] for row in m]
            acc = term if acc is None else [[x + y for x, y in zip(r1, r2)]
                                            for r1, r2 in zip(acc, term)]
        return tgt, acc

    def felement_operator(self, side: str, x: FElement, beta: Beta) -> tuple[Beta, Matrix]:
        """x^- or x^+ for a general element of f (RatFunc entries)."""
        tgt = None
        acc = None
        for w, c in x.as_word_combination().items():
            t, m = self.word_operator(side, w, beta)
            tgt = t
            term = [[c * e for e in row] for row in m]
            acc = term if acc is None else [[a + b for a, b in zip(r1, r2)]
                                            for r1, r2 in zip(acc, term)]
        if acc is None:
            sign = 1 if side == "E" else -1
            tgt = tuple(b + sign * v for b, v in zip(beta, x.weight))
            acc = zero_mat(self.dim(tgt), self.dim(beta))
        return tgt, acc

    # -- vectors -------------------------------------------------------------
    def vector(self, beta: Beta, coords) -> "WeightVector":
        return WeightVector(self, beta, tuple(coords))

    def basis_vector(self, beta: Beta, k: int) -> "WeightVector":
        d = self.dim(beta)
        return WeightVector(self, beta, tuple(ONE if j == k else ZERO for j in range(d)))

    def apply_E(self, i: int, v: "WeightVector") -> "WeightVector":
        tgt = beta_add(v.beta, beta_unit(self.n, i))
        return WeightVector(self, tgt, tuple(linalg.mat_vec(self.e_matrix(i, v.beta), v.coords)))

    def apply_F(self, i: int, v: "WeightVector") -> "WeightVector":
        tgt = beta_add(v.beta, beta_unit(self.n, i, -1))
        return WeightVector(self, tgt, tuple(linalg.mat_vec(self.f_matrix(i, v.beta), v.coords)))

    def apply_K(self, i: int, v: "WeightVector") -> "WeightVector":
        c = LaurentPoly.monomial(self.k_exp(i, v.beta))
        return WeightVector(self, v.beta, tuple(c * x for x in v.coords))

    def apply_bar(self, v: "WeightVector") -> "WeightVector":
        s = self.bar_matrix(v.beta)
        return WeightVector(self, v.beta, tuple(linalg.mat_vec(s, [x.bar() for x in v.coords])))


@dataclass(frozen=True, eq=False)
class WeightVector:
    module: BasedModule
    beta: Beta
    coords: tuple

    @property
    def weight(self) -> Weight:
        return self.module.xweight(self.beta)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __add__(self, other: "WeightVector") -> "WeightVector":
        assert other.beta == self.beta
        return WeightVector(self.module, self.beta,
                            tuple(a + b for a, b in zip(self.coords, other.coords)))

    def scale(self, c) -> "WeightVector":
        return WeightVector(self.module, self.beta, tuple(c * x for x in self.coords))

    def __eq__(self, other):
        if not isinstance(other, WeightVector):
            return NotImplemented
        return self.beta == other.beta and all(
            RatFunc.coerce(a) == RatFunc.coerce(b) for a, b in zip(self.coords, other.coords))

    def __hash__(self):
        return hash(self.beta)


# ---------------------------------------------------------------------------
# Shapovalov data and simple modules
# ---------------------------------------------------------------------------


class ShapovalovTable:
    """S(u, w): the eta-coefficient of E_{u1}..E_{un} F_{w1}..F_{wn} eta_lam in M(lam).

    Computed from E_i F_w eta = sum_p [<i,lam> - <i, |tail_p|>]_i F_{w-p} eta,
    a direct consequence of the defining relations.
    """

    def __init__(self, datum: RootDatum, lam: Weight):
        self.datum = datum
        self.lam = tuple(lam)
        self._memo: dict[tuple, LaurentPoly] = {}

    def e_on_word(self, i: int, w: tuple[int, ...]) -> dict[tuple, LaurentPoly]:
        a = self.datum.a
        d = self.datum.d[i]
        out: dict[tuple, LaurentPoly] = {}
        tail = 0
        for p in range(len(w) - 1, -1, -1):
            j = w[p]
            if j == i:
                key = w[:p] + w[p + 1:]
                out[key] = out.get(key, ZERO) + qint(self.lam[i] - tail, d)
            tail += a[i][j]
        return {k: v for k, v in out.items() if v}

    def value(self, u: tuple[int, ...], w: tuple[int, ...]) -> LaurentPoly:
        if len(u) != len(w):
            return ZERO
        if not u:
            return ONE
        key = (u, w)
        got = self._memo.get(key)
        if got is not None:
            return got
        total = ZERO
        for w2, c in self.e_on_word(u[-1], w).items():
            s = self.value(u[:-1], w2)
            if s:
                total = total + c * s
        self._memo[key] = total
        return total

    def vector(self, words: list[tuple], combo: list[tuple[tuple, LaurentPoly, LaurentPoly]]):
        """Shapovalov vector over ``words`` of sum c * word / den."""
        out = []
        for u in words:
            s = ZERO
            for w, c, den in combo:
                v = self.value(u, w)
                if v:
                    if den != ONE:
                        v = v.exact_div(den)
                    s = s + c * v
            out.append(s)
        return out


def _cb_combo(b: CBElement, d, prefix=()):
    return [(prefix + m.word, c, m.denominator(d)) for m, c in b.monomials]


class _Level:
    """Coordinates on a basis given by independent Shapovalov vectors."""

    def __init__(self, vectors: list[list[LaurentPoly]]):
        self.vectors = vectors
        self.k = len(vectors)
        if self.k:
            cols = linalg.transpose(vectors)  # rows = words
            rows, piv = linalg.rref(linalg.transpose(cols))  # pivots = word indices
            self.rows = piv
            if len(piv) != self.k:
                raise InvariantError("distinguished basis vectors are linearly dependent")
            square = [[cols[r][c] for c in range(self.k)] for r in self.rows]
            self.inv = linalg.inverse(square)
            self.cols = cols
        else:
            self.rows = []

    def coords(self, svec: list[LaurentPoly]) -> list[LaurentPoly]:
        if not self.k:
            if any(svec):
                raise InvariantError("nonzero vector in a zero weight space")
            return []
        rhs = [RatFunc.coerce(svec[r]) for r in self.rows]
        c = linalg.mat_vec(self.inv, rhs, RAT_ZERO)
        # full consistency on every word
        for r, row in enumerate(self.cols):
            s = RAT_ZERO
            for x, y in zip(row, c):
                if x and y:
                    s = s + y * x
            if s != RatFunc.coerce(svec[r]):
                raise InvariantError("vector not in the span of the distinguished basis")
        try:
            return [x.to_laurent() for x in c]
        except ArithmeticError:
            raise InvariantError("coordinates on the distinguished basis leave A") from None


def simple_quotient(alg: FAlgebra, provider: CanonicalBasisProvider, lam: Weight,
                    ht_bound: int | None = None) -> BasedModule:
    """L(lam) with its canonical basis, computed as M(lam) modulo the Shapovalov radical.

    Without ``ht_bound`` the module must be finite-dimensional; the build
    stops at the first depth where every weight space vanishes.
    """
    rd = alg.datum
    lam = tuple(lam)
    if not dominant_test(lam):
        raise ValueError(f"{lam} is not dominant")
    if ht_bound is None and not rd.cartan.is_finite_type:
        raise TruncationError("infinite type needs an explicit ht_bound")
    shap = ShapovalovTable(rd, lam)
    d = rd.d
    n = rd.n
    labels: dict[Beta, list[tuple]] = {}
    names: dict[Beta, list[str]] = {}
    cbs: dict[Beta, list[CBElement]] = {}
    levels: dict[Beta, _Level] = {}
    svecs: dict[Beta, list] = {}
    complete = False
    h = 0
    while True:
        if ht_bound is not None and h > ht_bound:
            break
        nonzero = False
        for nu in rd.nu_weights_of_height(h):
            words = alg.space(nu).words
            keep, vecs = [], []
            for b in provider.basis(nu):
                v = shap.vector(words, _cb_combo(b, d))
                if any(v):
                    keep.append(b)
                    vecs.append(v)
            if keep:
                beta = tuple(-x for x in nu)
                nonzero = True
                cbs[beta] = keep
                levels[beta] = _Level(vecs)
                svecs[beta] = vecs
                labels[beta] = [((beta, k),) for k in range(len(keep))]
                names[beta] = [str(b) if any(nu) else "1" for b in keep]
        if not nonzero:
            complete = True
            break
        h += 1
    E: dict = {}
    F: dict = {}
    for beta, bs in cbs.items():
        nu = tuple(-x for x in beta)
        for i in range(n):
            # F_i: beta -> beta - e_i
            tgt = beta_add(beta, beta_unit(n, i, -1))
            tnu = tuple(-x for x in tgt)
            if complete or sum(tnu) <= ht_bound:
                if tgt in levels:
                    words = alg.space(tnu).words
                    cols = [levels[tgt].coords(shap.vector(words, _cb_combo(b, d, (i,))))
                            for b in bs]
                    F[(i, beta)] = linalg.transpose(cols)
            # E_i: beta -> beta + e_i
            if nu[i] > 0:
                tgt = beta_add(beta, beta_unit(n, i))
                if tgt in levels:
                    tnu = tuple(-x for x in tgt)
                    words = alg.space(tnu).words
                    cols = []
                    for v in svecs[beta]:
                        full = dict(zip(alg.space(nu).words, v))
                        cols.append(levels[tgt].coords([full[u + (i,)] for u in words]))
                    E[(i, beta)] = linalg.transpose(cols)
    return BasedModule(
        datum=rd, kind="highest", base=lam, labels=labels, E=E, F=F,
        bound=None if complete else ht_bound, names=names, cb_elements=cbs,
        highest=lam,
    )


def verma_module(alg: FAlgebra, provider: CanonicalBasisProvider, lam: Weight,
                 ht_bound: int) -> BasedModule:
    """M(lam) truncated at depth ht_bound, on the carrier f with basis B.

    F_i acts by left multiplication by theta_i.  E_i acts through
    E_i x^- eta = (q_i^{<i,lam - nu + i'>} _i r(x) - q_i^{-<i,lam>} r_i(x)) / (q_i - q_i^-1) eta.
    """
    if ht_bound < 0:
        raise ValueError("ht_bound must be >= 0")
    rd = alg.datum
    lam = tuple(lam)
    n = rd.n
    labels, names, cbs = {}, {}, {}
    for nu in rd.nu_weights_up_to(ht_bound):
        beta = tuple(-x for x in nu)
        bs = provider.basis(nu)
        cbs[beta] = bs
        labels[beta] = [((beta, k),) for k in range(len(bs))]
        names[beta] = [str(b) if any(nu) else "1" for b in bs]
    E, F = {}, {}
    for beta, bs in cbs.items():
        nu = tuple(-x for x in beta)
        for i in range(n):
            tnu = tuple(x + int(k == i) for k, x in enumerate(nu))
            if sum(tnu) <= ht_bound:
                tb = provider.basis(tnu)
                basis = [b.element for b in tb]
                cols = []
                for b in bs:
                    y = alg.free_mult(alg.theta(i), b.element)
                    cols.append(_laurent(alg.coefficients_in(basis, y)))
                F[(i, beta)] = linalg.transpose(cols)
            if nu[i] > 0:
                tnu = tuple(x - int(k == i) for k, x in enumerate(nu))
                tb = provider.basis(tnu)
                basis = [b.element for b in tb]
                di = rd.d[i]
                qi = LaurentPoly.monomial(di) - LaurentPoly.monomial(-di)
                c_ir = LaurentPoly.monomial(di * (lam[i] - rd.nu_pairing(i, nu) + 2))
                c_ri = LaurentPoly.monomial(-di * lam[i])
                cols = []
                for b in bs:
                    ri, ir = alg.kashiwara_maps(i, b.element)
                    y = ir.scale(c_ir) - ri.scale(c_ri)
                    y = y.scale(RatFunc(ONE, qi))
                    cols.append(_laurent(alg.coefficients_in(basis, y)))
                E[(i, beta)] = linalg.transpose(cols)
    return BasedModule(datum=rd, kind="verma", base=lam, labels=labels, E=E, F=F,
                       bound=ht_bound, names=names, cb_elements=cbs, highest=lam)


def _laurent(v):
    try:
        return [RatFunc.coerce(x).to_laurent() for x in v]
    except ArithmeticError:
        raise InvariantError("action leaves the A-form") from None


def omega_twist(M: BasedModule) -> BasedModule:
    """Twist by omega: E_i <-> F_i, K_mu -> K_-mu; weights are negated."""
    neg = lambda b: tuple(-x for x in b)  # noqa: E731
    kind = {"highest": "lowest", "lowest": "highest"}.get(M.kind, M.kind)
    if M.kind == "tensor":
        raise ValueError("omega twist of a tensor product is not a based module here")
    return BasedModule(
        datum=M.datum, kind=kind, base=neg(M.base),
        labels={neg(b): [tuple((neg(c), k) for c, k in lab) for lab in v]
                for b, v in M.labels.items()},
        E={(i, neg(b)): m for (i, b), m in M.F.items()},
        F={(i, neg(b)): m for (i, b), m in M.E.items()},
        bound=M.bound, lift=M.lift,
        bar=None if M.bar is None else {neg(b): m for b, m in M.bar.items()},
        cb=None if M.cb is None else {neg(b): m for b, m in M.cb.items()},
        names={neg(b): v for b, v in M.names.items()},
        cb_elements={neg(b): v for b, v in M.cb_elements.items()},
        highest=M.highest,
    )


def trivial_module(datum: RootDatum) -> BasedModule:
    z = (0,) * datum.n
    return BasedModule(datum=datum, kind="trivial", base=z, labels={z: [()]},
                       E={}, F={}, names={z: ["1"]})


# ---------------------------------------------------------------------------
# tensor products (action via the coproduct)
# ---------------------------------------------------------------------------


def _trunc_params(M: BasedModule) -> tuple[int | None, int, bool]:
    """(bound on highest-type depth, lift, has lowest-type incomplete part)."""
    return M.bound, M.lift, M.kind == "lowest" and M.bound is not None


def tensor_modules(M: BasedModule, N: BasedModule) -> BasedModule:
    """M (x) N with E_i -> E_i (x) 1 + K~_i (x) E_i and F_i -> F_i (x) K~_-i + 1 (x) F_i.

    The distinguished basis and bar involution are left unset; the
    tensorcb layer supplies them.
    """
    if M.datum is not N.datum and M.datum.cartan != N.datum.cartan:
        raise ValueError("factors over different root data")
    rd = M.datum
    n = rd.n
    for X in (M, N):
        if X.kind == "lowest" and X.bound is not None:
            raise TruncationError("lowest weight factors must be complete (finite-dimensional)")
    bounds = [b for b in (M.bound, N.bound) if b is not None]
    bound = min(bounds) if bounds else None
    lift = 0
    if bound is not None:
        for X in (M, N):
            if X.bound is None:
                lift += max((sum(b) for b in X.labels), default=0)
            else:
                lift += X.lift
    base = tuple(x + y for x, y in zip(M.base, N.base))
    pairs: dict[Beta, list[tuple[Beta, int, Beta, int]]] = {}
    for b1 in M.weights():
        for b2 in N.weights():
            beta = beta_add(b1, b2)
            if bound is not None and -sum(beta) + lift > bound:
                continue
            lst = pairs.setdefault(beta, [])
            for k1 in range(M.dim(b1)):
                for k2 in range(N.dim(b2)):
                    lst.append((b1, k1, b2, k2))
    labels = {beta: [M.labels[b1][k1] + N.labels[b2][k2] for b1, k1, b2, k2 in lst]
              for beta, lst in pairs.items()}
    names = {beta: [f"{M.names[b1][k1]} (x) {N.names[b2][k2]}" for b1, k1, b2, k2 in lst]
             for beta, lst in pairs.items()}
    index = {beta: {(b1, k1, b2, k2): t for t, (b1, k1, b2, k2) in enumerate(lst)}
             for beta, lst in pairs.items()}
    T = BasedModule(datum=rd, kind="tensor", base=base, labels=labels, E={}, F={},
                    bound=bound, lift=lift, names=names, factors=(M, N))
    T._pairs = pairs
    T._index = index
    for beta, lst in pairs.items():
        for i in range(n):
            for side in ("E", "F"):
                sgn = 1 if side == "E" else -1
                tgt = beta_add(beta, beta_unit(n, i, sgn))
                if not T.computed(tgt):
                    continue
                tindex = index.get(tgt, {})
                mat = zero_mat(len(tindex), len(lst))
                blocks: dict[tuple[Beta, Beta], list[int]] = {}
                for col, (b1, k1, b2, k2) in enumerate(lst):
                    blocks.setdefault((b1, b2), []).append(col)
                for (b1, b2), cols in blocks.items():
                    u = beta_unit(n, i, sgn)
                    t1 = beta_add(b1, u)
                    t2 = beta_add(b2, u)
                    if side == "E":
                        m1 = M.e_matrix(i, b1) if M.dim(t1) else None
                        m2 = N.e_matrix(i, b2) if N.dim(t2) else None
                        c1 = ONE
                        c2 = LaurentPoly.monomial(M.k_exp(i, b1))
                    else:
                        m1 = M.f_matrix(i, b1) if M.dim(t1) else None
                        m2 = N.f_matrix(i, b2) if N.dim(t2) else None
                        c1 = LaurentPoly.monomial(-N.k_exp(i, b2))
                        c2 = ONE
                    for col in cols:
                        _, k1, _, k2 = lst[col]
                        if m1 is not None:
                            for r1 in range(M.dim(t1)):
                                x = m1[r1][k1]
                                if x:
                                    row = tindex[(t1, r1, b2, k2)]
                                    mat[row][col] = mat[row][col] + c1 * x
                        if m2 is not None:
                            for r2 in range(N.dim(t2)):
                                x = m2[r2][k2]
                                if x:
                                    row = tindex[(b1, k1, t2, r2)]
                                    mat[row][col] = mat[row][col] + c2 * x
                (T.E if side == "E" else T.F)[(i, beta)] = mat
    return T


def tensor_vector(T: BasedModule, x: WeightVector, y: WeightVector) -> WeightVector:
    """x (x) y as a vector of T = M (x) N (ambient coordinates)."""
    beta = beta_add(x.beta, y.beta)
    T.check_computed(beta)
    coords = [ZERO] * T.dim(beta)
    idx = T._index[beta]
    for k1, a in enumerate(x.coords):
        if not a:
            continue
        for k2, b in enumerate(y.coords):
            if b:
                coords[idx[(x.beta, k1, y.beta, k2)]] = a * b
    return WeightVector(T, beta, tuple(coords))


def highest_vector(M: BasedModule) -> WeightVector:
    z = (0,) * M.n
    return M.basis_vector(z, 0)


def pi_b_apply(T: BasedModule, b: WeightVector, eta: WeightVector, u) -> WeightVector:
    """u (b (x) eta) in T = M (x) M(lam) or M (x) L(lam); u acts through Delta.

    ``u`` is a DividedMonomial, a CBElement or an FElement of f viewed in U^-.
    """
    v = tensor_vector(T, b, eta)
    return apply_minus(T, u, v)


def apply_minus(T: BasedModule, u, v: WeightVector) -> WeightVector:
    return _apply_side(T, "F", u, v)


def apply_plus(T: BasedModule, u, v: WeightVector) -> WeightVector:
    return _apply_side(T, "E", u, v)


def _apply_side(T, side, u, v):
    if isinstance(u, DividedMonomial):
        tgt, m = T.divided_operator(side, u, v.beta)
    elif isinstance(u, CBElement):
        tgt, m = T.cb_operator(side, u, v.beta)
    elif isinstance(u, FElement):
        tgt, m = T.felement_operator(side, u, v.beta)
        return WeightVector(T, tgt, tuple(linalg.mat_vec(m, [RatFunc.coerce(c) for c in v.coords],
                                                         RAT_ZERO)))
    else:
        raise TypeError(f"cannot act by {type(u).__name__}")
    return WeightVector(T, tgt, tuple(linalg.mat_vec(m, v.coords)))


def module_to_json(M: BasedModule) -> dict:
    """Weights, basis labels and action matrices, in the scalars JSON schema."""
    def mat(m):
        return [[x.to_json() for x in row] for row in m]

    spaces = []
    for beta in M.weights():
        entry = {"beta": list(beta), "weight": list(M.xweight(beta)), "labels": M.names[beta]}
        if M.bar is not None and beta in M.bar:
            entry["bar"] = mat(M.bar[beta])
        if M.cb is not None and beta in M.cb:
            entry["basis"] = mat(M.cb[beta])
        spaces.append(entry)
    actions = []
    for side, table in (("E", M.E), ("F", M.F)):
        for (i, beta), m in sorted(table.items()):
            actions.append({"generator": f"{side}{i}", "source": list(beta), "matrix": mat(m)})
    return {"kind": M.kind, "datum": M.datum.cartan.to_json(), "base": list(M.base),
            "truncation": M.bound, "spaces": spaces, "actions": actions}


# ---------------------------------------------------------------------------
# self-checks
# ---------------------------------------------------------------------------


def _comm_ok(M: BasedModule, beta: Beta, i: int, j: int) -> bool:
    n = M.n
    up_i, dn_j = beta_unit(n, i), beta_unit(n, j, -1)
    mid1 = beta_add(beta, dn_j)
    mid2 = beta_add(beta, up_i)
    tgt = beta_add(mid1, up_i)
    for b in (mid1, mid2, tgt):
        if not M.computed(b):
            return True
    ef = linalg.mat_mul(M.e_matrix(i, mid1), M.f_matrix(j, beta)) if M.dim(mid1) else \
        zero_mat(M.dim(tgt), M.dim(beta))
    fe = linalg.mat_mul(M.f_matrix(j, mid2), M.e_matrix(i, beta)) if M.dim(mid2) else \
        zero_mat(M.dim(tgt), M.dim(beta))
    dim = M.dim(beta)
    for r in range(M.dim(tgt)):
        for c in range(dim):
            lhs = (ef[r][c] if ef else ZERO) - (fe[r][c] if fe else ZERO)
            rhs = ZERO
            if i == j and r == c:
                rhs = qint(M.xweight(beta)[i], M.datum.d[i])
            if lhs != rhs:
                return False
    return True


def _serre_ok(M: BasedModule, beta: Beta, i: int, j: int, side: str) -> bool:
    rd = M.datum
    m = 1 - rd.a[i][j]
    total = None
    tgt = None
    for p in range(m + 1):
        mono = [(i, p), (j, 1), (i, m - p)]
        try:
            dm = DividedMonomial.normalized(mono)
            t, mat = M.divided_operator(side, dm, beta)
        except TruncationError:
            return True
        tgt = t
        sign = -1 if (m - p) % 2 else 1
        term = [[sign * x for x in row] for row in mat]
        total = term if total is None else [[a + b for a, b in zip(r1, r2)]
                                            for r1, r2 in zip(total, term)]
    return all(not x for row in total for x in row)


def check_relations(M: BasedModule) -> list[str]:
    """Defining relations of U as operator identities on every computed weight space."""
    failures = []
    n = M.n
    for beta in M.weights():
        for i in range(n):
            for j in range(n):
                try:
                    if not _comm_ok(M, beta, i, j):
                        failures.append(f"[E_{i}, F_{j}] fails at {beta}")
                except TruncationError:
                    pass
                if i != j:
                    for side in ("E", "F"):
                        if not _serre_ok(M, beta, i, j, side):
                            failures.append(f"Serre({side}, {i}, {j}) fails at {beta}")
    return failures


def check_integrability(M: BasedModule) -> list[str]:
    """E_i and F_i act nilpotently on every basis vector, for complete modules."""
    if not M.is_complete:
        return []
    failures = []
    depth = max(abs(sum(b)) for b in M.labels) + 2 if M.labels else 1
    for beta in M.weights():
        for k in range(M.dim(beta)):
            for i in range(M.n):
                for side in ("E", "F"):
                    v = M.basis_vector(beta, k)
                    for _ in range(2 * depth + 2):
                        if v.is_zero() or not M.dim(v.beta):
                            break
                        v = M.apply_E(i, v) if side == "E" else M.apply_F(i, v)
                    if not (v.is_zero() or not M.dim(v.beta)):
                        failures.append(f"{side}_{i} not nilpotent on {beta}:{k}")
    return failures


def check_bar_fixes_basis(M: BasedModule) -> list[str]:
    failures = []
    for beta in M.weights():
        s = M.bar_matrix(beta)
        c = M.cb_matrix(beta)
        if linalg.mat_mul(s, linalg.mat_bar(c)) != c:
            failures.append(f"bar does not fix the distinguished basis at {beta}")
        # bar^2 = id
        if linalg.mat_mul(s, linalg.mat_bar(s)) != linalg.identity(M.dim(beta)):
            failures.append(f"bar is not an involution at {beta}")
    return failures
