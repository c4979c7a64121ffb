"""Canonical (diamond) bases of tensor products of based modules.

At each step M (x) N we compute the matrix P of Psi on the standard basis
e_k = b (x) b', read off the order generated by its support, and build

    d_k = e_k + sum_j p_jk d_j,     p_jk = negative part of r_jk,

where Psi(e_k) = e_k + sum_j r_jk d_j.  The result is Psi-fixed and congruent
to e_k modulo q^-1 L.  Multi-factor products are built one factor at a time.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import flint

from . import linalg
from .falgebra import CanonicalBasisProvider, FAlgebra
from .quasir import (
    ThetaExpansion, psi_ambient, psi_standard, standard_basis_matrix, star_certificate,
)
from .rootdata import Weight
from .scalars import LaurentPoly, ONE, ZERO, bar_split
from .wmod import (
    Beta, BasedModule, InvariantError, TruncationError, omega_twist, simple_quotient,
    tensor_modules, trivial_module,
)


class InadmissibleError(ValueError):
    pass


@dataclass
class WeightDiamond:
    beta: Beta
    psi: list[list[LaurentPoly]]      # P on the standard basis of this step
    order: list[int]                  # linear extension of the operational order
    change: list[list[LaurentPoly]]   # column k = d_k on the standard basis of this step


@dataclass
class DiamondBasis:
    """The diamond basis of a (possibly iterated) tensor product, in ambient coordinates."""

    module: BasedModule
    steps: dict[Beta, WeightDiamond] = field(default_factory=dict)

    def weights(self) -> list[Beta]:
        return self.module.weights()

    def matrix(self, beta: Beta) -> list[list[LaurentPoly]]:
        return self.module.cb_matrix(beta)

    def elements(self):
        """Yield (beta, k, column) for every diamond element."""
        for beta in self.weights():
            m = self.matrix(beta)
            for k in range(self.module.dim(beta)):
                yield beta, k, [row[k] for row in m]

    def __len__(self):
        return self.module.total_dim()

    def as_dicts(self, beta: Beta) -> dict[tuple, dict[tuple, LaurentPoly]]:
        """{index label: {label: coefficient}} at one weight."""
        labels = self.module.labels[beta]
        m = self.matrix(beta)
        out = {}
        for k, lab in enumerate(labels):
            out[lab] = {labels[j]: m[j][k] for j in range(len(labels)) if m[j][k]}
        return out

    def to_json(self) -> dict:
        T = self.module
        leaves = leaf_modules(T)
        out = []
        for beta in self.weights():
            labels = T.labels[beta]
            m = self.matrix(beta)
            for k, lab in enumerate(labels):
                out.append({
                    "weight": list(T.xweight(beta)),
                    "index": label_names(leaves, lab),
                    "vector": [[label_names(leaves, labels[j]), m[j][k].to_json()]
                               for j in range(len(labels)) if m[j][k]],
                })
        return {"factors": [{"kind": x.kind, "highest": list(x.highest or ())} for x in leaves],
                "truncation": T.bound, "elements": out}


def leaf_modules(T: BasedModule) -> list[BasedModule]:
    if T.kind == "tensor":
        return leaf_modules(T.factors[0]) + leaf_modules(T.factors[1])
    if T.kind == "trivial":
        return []
    return [T]


def label_names(leaves, label) -> list[str]:
    return [leaves[f].names[beta][k] for f, (beta, k) in enumerate(label)]


# ---------------------------------------------------------------------------
# one tensor step
# ---------------------------------------------------------------------------


def operational_order(psi: list[list[LaurentPoly]]) -> list[int]:
    """Linear extension of the order generated by j < k when P[j][k] != 0."""
    n = len(psi)
    for k in range(n):
        if psi[k][k] != ONE:
            raise InvariantError(f"Psi matrix has diagonal entry {psi[k][k]} at {k}")
    succ = {j: [k for k in range(n) if k != j and psi[j][k]] for j in range(n)}
    indeg = [sum(1 for j in range(n) if j != k and psi[j][k]) for k in range(n)]
    ready = sorted(k for k in range(n) if indeg[k] == 0)
    order = []
    while ready:
        j = ready.pop(0)
        order.append(j)
        for k in succ[j]:
            indeg[k] -= 1
            if indeg[k] == 0:
                ready.append(k)
        ready.sort()
    if len(order) != n:
        raise InvariantError("the support of Psi contains a cycle; no triangular order exists")
    return order


def psi_matrix(theta: ThetaExpansion, T: BasedModule, beta: Beta):
    """(P, order): Psi on the standard basis of T_beta and its operational order."""
    p = psi_standard(theta, T, beta, auto_extend=True)
    for row in p:
        for x in row:
            if not isinstance(x, LaurentPoly):
                raise InvariantError(f"Psi matrix entry outside A at {beta}")
    if linalg.mat_mul(p, linalg.mat_bar(p)) != linalg.identity(len(p)):
        raise InvariantError(f"Psi is not an involution at {beta}")
    return p, operational_order(p)


def diamond_recursion(p: list[list[LaurentPoly]], order: list[int]) -> list[list[LaurentPoly]]:
    """Columns d_k (standard coordinates) from the triangular recursion."""
    n = len(p)
    pos = {k: t for t, k in enumerate(order)}
    d = [[ZERO] * n for _ in range(n)]
    for k in order:
        done = order[: pos[k]]
        w = {j: p[j][k] for j in range(n) if j != k and p[j][k]}
        for j in w:
            if pos[j] > pos[k]:
                raise InvariantError("Psi(e_k) has a term above e_k")
        # Psi(e_k) - e_k = sum_j r_j d_j, solved top-down
        r = {}
        for j in reversed(done):
            s = w.get(j, ZERO)
            for l, rl in r.items():
                if d[j][l]:
                    s = s - rl * d[j][l]
            if s:
                r[j] = s
        col = [ZERO] * n
        col[k] = ONE
        for j, rj in r.items():
            try:
                pj = bar_split(rj)
            except ValueError:
                raise InvariantError(f"coefficient {rj} is not bar-antisymmetric") from None
            if pj:
                for t in range(n):
                    if d[t][j]:
                        col[t] = col[t] + pj * d[t][j]
        for t in range(n):
            d[t][k] = col[t]
            if t != k and col[t] and not col[t].in_qinv_Z_qinv():
                raise InvariantError(f"correction {col[t]} not in q^-1 Z[q^-1]")
    # Psi-fixedness
    if linalg.mat_mul(p, linalg.mat_bar(d)) != d:
        raise InvariantError("diamond elements are not Psi-fixed")
    return d


def tensor_based(theta: ThetaExpansion, M: BasedModule, N: BasedModule,
                 build_basis: bool = True) -> BasedModule:
    """M (x) N as a based module: coproduct action, Psi, and the diamond basis."""
    try:
        cert = star_certificate(M, N)
    except ValueError as exc:
        raise InadmissibleError(str(exc)) from None
    T = tensor_modules(M, N)
    T.certificate = cert
    if build_basis:
        build_diamond(theta, T)
    return T


def build_diamond(theta: ThetaExpansion, T: BasedModule) -> DiamondBasis:
    db = DiamondBasis(T)
    T.bar, T.cb = {}, {}
    for beta in T.weights():
        p, order = psi_matrix(theta, T, beta)
        d = diamond_recursion(p, order)
        db.steps[beta] = WeightDiamond(beta, p, order, d)
        T.bar[beta] = psi_ambient(theta, T, beta, auto_extend=True)
        T.cb[beta] = linalg.mat_mul(standard_basis_matrix(T, beta), d)
    T.diamond = db
    return db


def diamond_basis(theta: ThetaExpansion, T: BasedModule) -> DiamondBasis:
    got = getattr(T, "diamond", None)
    if got is None:
        got = build_diamond(theta, T)
    return got


# ---------------------------------------------------------------------------
# brute-force oracle
# ---------------------------------------------------------------------------


def brute_force_fixed_point(s: list[list[LaurentPoly]], k: int, max_deg: int | None = None,
                            cap: int = 512) -> list[LaurentPoly]:
    """Solve S . conj(x) = x with x in e_k + q^-1 Z[q^-1]^n as one integer linear system.

    No order is used: every coordinate other than k is an unknown.
    """
    n = len(s)
    spread = max((max(abs(x.min_exp), abs(x.max_exp)) for row in s for x in row if x), default=0)
    deg = max_deg or max(1, spread) * max(1, n)
    while True:
        sol = _bounded_fixed_point(s, k, deg)
        if sol is not None:
            return sol
        if deg >= cap:
            raise InvariantError(f"no Psi-fixed lattice lift of e_{k} up to degree {deg}")
        deg *= 2


def _bounded_fixed_point(s, k, deg):
    n = len(s)
    unknowns = [(j, t) for j in range(n) if j != k for t in range(1, deg + 1)]
    col = {u: c for c, u in enumerate(unknowns)}
    eqs: dict[tuple[int, int], dict[int, int]] = {}
    rhs: dict[tuple[int, int], int] = {}

    def add(i, e, c, val):
        row = eqs.setdefault((i, e), {})
        row[c] = row.get(c, 0) + val

    for i in range(n):
        # S conj(x) - x = 0; conj(y q^-t e_j) = y q^t e_j
        for e, v in s[i][k].items():
            rhs[(i, e)] = rhs.get((i, e), 0) - v
            eqs.setdefault((i, e), {})
        if i == k:
            rhs[(i, 0)] = rhs.get((i, 0), 0) + 1
            eqs.setdefault((i, 0), {})
        for j in range(n):
            if j == k or not s[i][j]:
                continue
            for t in range(1, deg + 1):
                for e, v in s[i][j].items():
                    add(i, e + t, col[(j, t)], v)
        if i != k:
            for t in range(1, deg + 1):
                add(i, -t, col[(i, t)], -1)
    keys = sorted(eqs)
    nu = len(unknowns)
    if not nu:
        ok = all(rhs.get(key, 0) == 0 for key in keys)
        return [ONE if j == k else ZERO for j in range(n)] if ok else None
    entries = []
    for key in keys:
        row = [0] * (nu + 1)
        for c, v in eqs[key].items():
            row[c] += v
        row[nu] = rhs.get(key, 0)
        entries.extend(row)
    mat = flint.fmpq_mat(len(keys), nu + 1, entries)
    red, rank = mat.rref()
    pivots = []
    for r in range(rank):
        c = next(c for c in range(nu + 1) if red[r, c] != 0)
        pivots.append(c)
    if nu in pivots:
        return None  # inconsistent at this degree bound
    if rank != nu:
        raise InvariantError(f"Psi-fixed lattice lift of e_{k} is not unique")
    vals = [red[r, nu] for r in range(rank)]
    x = [ZERO] * n
    x[k] = ONE
    terms: dict[int, dict[int, int]] = {}
    for (j, t), v in zip(unknowns, vals):
        if v.q != 1:
            raise InvariantError("brute-force solution is not integral")
        if v != 0:
            terms.setdefault(j, {})[-t] = int(v.p)
    for j, tm in terms.items():
        x[j] = LaurentPoly(tm)
    return x


def oracle_check(T: BasedModule) -> list[str]:
    """Compare each diamond element to the brute-force Psi-fixed lattice lift."""
    failures = []
    for beta in T.weights():
        s = T.bar_matrix(beta)
        c = T.cb_matrix(beta)
        for k in range(T.dim(beta)):
            x = brute_force_fixed_point(s, k)
            if x != [row[k] for row in c]:
                failures.append(f"oracle mismatch at {beta}, index {T.names[beta][k]}")
    return failures


# ---------------------------------------------------------------------------
# multi-factor products
# ---------------------------------------------------------------------------


@dataclass
class Context:
    """Shared algebraic data for one root datum."""

    alg: FAlgebra
    provider: CanonicalBasisProvider
    theta: ThetaExpansion
    _simple: dict = field(default_factory=dict)

    @classmethod
    def build(cls, datum, method: str = "engine", cache_dir: str | None = None) -> "Context":
        from .rootdata import RootDatum
        rd = datum if isinstance(datum, RootDatum) else RootDatum(datum)
        alg = FAlgebra(rd)
        provider = CanonicalBasisProvider(alg, method, cache_dir)
        return cls(alg, provider, ThetaExpansion(alg, provider))

    @property
    def datum(self):
        return self.alg.datum

    def simple(self, lam: Weight, ht_bound: int | None = None) -> BasedModule:
        key = (tuple(lam), ht_bound)
        got = self._simple.get(key)
        if got is None:
            if ht_bound is None and not self.datum.cartan.is_finite_type:
                raise TruncationError("infinite type requires a height bound")
            got = simple_quotient(self.alg, self.provider, lam, ht_bound)
            self._simple[key] = got
        return got

    def lowest(self, lam: Weight, ht_bound: int | None = None) -> BasedModule:
        key = ("w", tuple(lam), ht_bound)
        got = self._simple.get(key)
        if got is None:
            got = omega_twist(self.simple(lam, ht_bound))
            self._simple[key] = got
        return got


def _leaf(ctx: Context, lam, lowest: bool, ht_bound):
    bound = None if ctx.datum.cartan.is_finite_type and ht_bound is None else ht_bound
    if lowest:
        M = ctx.lowest(lam, bound)
        if not M.is_complete:
            raise TruncationError(f"wL{tuple(lam)} is not finite-dimensional within ht {ht_bound}")
        return M
    return ctx.simple(lam, bound)


def multi_diamond(ctx: Context, lams: list[Weight], r: int, ht_bound: int | None = None) -> DiamondBasis:
    """Diamond basis of wL(l_1) (x) ... (x) wL(l_r) (x) L(l_{r+1}) (x) ... (x) L(l_ell).

    Highest weight factors are combined left to right, then the lowest weight
    factors are put in front one at a time, right to left.
    """
    ell = len(lams)
    if not 0 <= r <= ell:
        raise ValueError(f"need 0 <= r <= {ell}, got r = {r}")
    if ell == 0:
        T = trivial_module(ctx.datum)
        return DiamondBasis(T)
    highs = [_leaf(ctx, lam, False, ht_bound) for lam in lams[r:]]
    lows = [_leaf(ctx, lam, True, ht_bound) for lam in lams[:r]]
    if highs:
        cur = highs[0]
        for N in highs[1:]:
            cur = tensor_based(ctx.theta, cur, N)
    else:
        cur = lows.pop()
    for M in reversed(lows):
        cur = tensor_based(ctx.theta, M, cur)
    if cur.kind != "tensor":
        return DiamondBasis(cur)
    return cur.diamond


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------


def triangularity_check(db: DiamondBasis) -> list[str]:
    """Unit diagonal, q^-1 Z[q^-1] corrections, acyclic support (ambient coordinates)."""
    failures = []
    T = db.module
    for beta in db.weights():
        m = db.matrix(beta)
        n = len(m)
        for k in range(n):
            if m[k][k] != ONE:
                failures.append(f"diagonal entry {m[k][k]} at {beta}:{k}")
            for j in range(n):
                if j != k and m[j][k] and not m[j][k].in_qinv_Z_qinv():
                    failures.append(f"correction {m[j][k]} outside q^-1 Z[q^-1] at {beta}")
        try:
            operational_order([[m[j][k] if j != k else ONE for k in range(n)] for j in range(n)])
        except InvariantError as exc:
            failures.append(f"{beta}: {exc}")
    return failures


def reduction_check(db: DiamondBasis) -> list[str]:
    """Change of basis is the identity modulo q^-1."""
    failures = []
    for beta in db.weights():
        m = db.matrix(beta)
        for j, row in enumerate(m):
            for k, x in enumerate(row):
                want = 1 if j == k else 0
                if not x.in_Z_qinv() or x.coeff(0) != want:
                    failures.append(f"entry ({j},{k}) at {beta} is {x} mod q^-1")
    return failures


def psi_fixed_check(db: DiamondBasis) -> list[str]:
    from .wmod import check_bar_fixes_basis
    return check_bar_fixes_basis(db.module)


def associativity_check(theta: ThetaExpansion, M: BasedModule, N: BasedModule,
                        P: BasedModule) -> list[str]:
    """(M (x) N) (x) P against M (x) (N (x) P): identical diamond vectors."""
    left = tensor_based(theta, tensor_based(theta, M, N), P)
    right = tensor_based(theta, M, tensor_based(theta, N, P))
    failures = []
    wl, wr = set(left.weights()), set(right.weights())
    if wl != wr:
        failures.append("the two bracketings have different computed weights")
    for beta in sorted(wl & wr):
        a = left.diamond.as_dicts(beta)
        b = right.diamond.as_dicts(beta)
        if a != b:
            failures.append(f"bracketings disagree at {beta}")
    return failures


@dataclass
class ChiReport:
    matched: int = 0
    vanished: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self):
        return {"ok": self.ok, "matched": self.matched, "vanished_outside_B": self.vanished,
                "failures": self.failures}


def chi_embedding(ctx: Context, lams: list[Weight], ht_bound: int | None = None) -> ChiReport:
    """L(sum l_k) -> L(l_1) (x) ... (x) L(l_ell), eta -> eta_1 (x) ... (x) eta_ell.

    Each canonical basis element b eta must map to a diamond element; elements of B
    that vanish on eta must map to zero (well-definedness).
    """
    db = multi_diamond(ctx, lams, 0, ht_bound)
    T = db.module
    n = ctx.datum.n
    total = tuple(sum(c) for c in zip(*lams))
    bound = None if ctx.datum.cartan.is_finite_type and ht_bound is None else ht_bound
    L = ctx.simple(total, bound)
    rep = ChiReport()
    zero = (0,) * n
    top = [row[0] for row in T.cb_matrix(zero)]
    for beta in L.weights():
        if not T.computed(beta):
            continue
        nu = tuple(-x for x in beta)
        cols = db.matrix(beta)
        diamonds = [[row[k] for row in cols] for k in range(T.dim(beta))]
        in_L = {id(b) for b in L.cb_elements[beta]}
        for b in ctx.provider.basis(nu):
            _, op = T.cb_operator("F", b, zero)
            img = linalg.mat_vec(op, top)
            if id(b) in in_L:
                if img in diamonds:
                    rep.matched += 1
                else:
                    rep.failures.append(f"chi({b} eta) is not a diamond element")
            else:
                if any(img):
                    rep.failures.append(f"{b} kills eta but not eta_1 (x) ... (x) eta_ell")
                rep.vanished += 1
    return rep


@dataclass
class PositivityReport:
    mode: str
    violations: list[str] = field(default_factory=list)
    scanned: int = 0

    @property
    def ok(self) -> bool:
        return self.mode != "strict" or not self.violations

    def to_json(self):
        return {"mode": self.mode, "ok": self.ok, "scanned": self.scanned,
                "violations": self.violations}


def positivity_scan(db: DiamondBasis, r: int = 0) -> PositivityReport:
    """Correction coefficients in q^-1 Z>=0[q^-1]; strict only for symmetric type and r = 0."""
    T = db.module
    strict = T.datum.cartan.is_symmetric and r == 0
    rep = PositivityReport("strict" if strict else "observational")
    for beta in db.weights():
        m = db.matrix(beta)
        for j, row in enumerate(m):
            for k, x in enumerate(row):
                if j == k or not x:
                    continue
                rep.scanned += 1
                if any(c < 0 for _, c in x.items()):
                    rep.violations.append(f"{x} at {beta} ({T.names[beta][j]} in {T.names[beta][k]})")
    return rep
