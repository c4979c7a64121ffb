"""The algebra f, weight space by weight space.

f_nu is realised as the span of words theta_{i1}...theta_{in} of weight nu
modulo the radical of the bilinear form (.,.).  The form is computed through
the recursion (theta_i x, y) = (theta_i, theta_i) (x, _i r(y)), with
(theta_i, theta_i) = 1 / (1 - q_i^-2).  Multiplying by
D_nu = prod_i (1 - q_i^-2)^{nu_i} makes every pairing of two words a Laurent
polynomial, which is what is cached.

Elements of f_nu carry RatFunc coordinates on a chosen basis of words.
Canonical bases come from one of three providers: a rank-one closed form,
the closed form for type A2, or a Gram-Schmidt engine driven by almost
orthonormality.
"""
from __future__ import annotations

import itertools
import json
import os
import threading
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

from . import linalg
from .rootdata import NuWeight, RootDatum, height, nu_add, nu_sub
from .scalars import (
    LaurentPoly, ONE, ONE_RAT, RAT_ZERO, RatFunc, ZERO,
    quantum_factorial, quantum_integer,
)

Word = tuple[int, ...]


class EngineError(RuntimeError):
    """The canonical-basis engine could not certify its output."""


def word_weight(word: Word, n: int) -> NuWeight:
    w = [0] * n
    for i in word:
        w[i] += 1
    return tuple(w)


@dataclass(frozen=True, order=True)
class DividedMonomial:
    """theta_{i1}^{(a1)} ... theta_{ik}^{(ak)}, adjacent indices distinct."""

    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for (i, a), (j, _) in zip(self.factors, self.factors[1:]):
            if i == j:
                raise ValueError("adjacent factors of a divided monomial must differ")
        if any(a < 1 for _, a in self.factors):
            raise ValueError("divided powers must be >= 1")

    @classmethod
    def normalized(cls, factors) -> "DividedMonomial":
        """Drop zero exponents; refuse merges that would need a binomial."""
        out: list[tuple[int, int]] = []
        for i, a in factors:
            if a == 0:
                continue
            if out and out[-1][0] == i:
                raise ValueError("normalisation would merge two divided powers")
            out.append((i, a))
        return cls(tuple(out))

    def weight(self, n: int) -> NuWeight:
        w = [0] * n
        for i, a in self.factors:
            w[i] += a
        return tuple(w)

    @property
    def word(self) -> Word:
        return tuple(i for i, a in self.factors for _ in range(a))

    @property
    def filtration_degree(self) -> int:
        return sum(a for _, a in self.factors)

    def denominator(self, d) -> LaurentPoly:
        out = ONE
        for i, a in self.factors:
            out = out * quantum_factorial(a, d[i])
        return out

    def __str__(self):
        if not self.factors:
            return "1"
        return "".join(f"t{i}" if a == 1 else f"t{i}^({a})" for i, a in self.factors)

    def to_json(self):
        return [[i, a] for i, a in self.factors]


def divided_monomials(nu: NuWeight) -> list[DividedMonomial]:
    """All divided monomials of weight nu, fewest factors first, then lex."""
    n = len(nu)
    out: list[DividedMonomial] = []

    def rec(remaining, last, acc):
        if not any(remaining):
            out.append(DividedMonomial(tuple(acc)))
            return
        for i in range(n):
            if i == last or remaining[i] == 0:
                continue
            for a in range(remaining[i], 0, -1):
                rem = list(remaining)
                rem[i] -= a
                rec(tuple(rem), i, acc + [(i, a)])

    rec(tuple(nu), -1, [])
    out.sort(key=lambda m: (len(m.factors), m.factors))
    return out


def words_of_weight(nu: NuWeight) -> list[Word]:
    letters = [i for i, m in enumerate(nu) for _ in range(m)]
    return sorted(set(itertools.permutations(letters)))


class FSpace:
    """f_nu: words, the chosen basis, and coordinates of every word."""

    def __init__(self, alg: "FAlgebra", nu: NuWeight):
        self.alg = alg
        self.nu = tuple(nu)
        self.words = words_of_weight(self.nu)
        self.word_index = {w: k for k, w in enumerate(self.words)}

    @cached_property
    def pairing_matrix(self) -> list[list[LaurentPoly]]:
        p = self.alg.word_pairing
        ws = self.words
        return [[p(u, w) for w in ws] for u in ws]

    @cached_property
    def basis_indices(self) -> list[int]:
        if not any(self.nu):
            return [0]
        return linalg.independent_columns(self.pairing_matrix)

    @property
    def basis_words(self) -> list[Word]:
        return [self.words[k] for k in self.basis_indices]

    @property
    def dim(self) -> int:
        return len(self.basis_indices)

    @cached_property
    def gram_basis(self) -> list[list[LaurentPoly]]:
        idx = self.basis_indices
        pm = self.pairing_matrix
        return [[pm[a][b] for b in idx] for a in idx]

    @cached_property
    def word_coords(self) -> list[list[RatFunc]]:
        """Column k = coordinates of word k on the basis words."""
        idx = self.basis_indices
        pm = self.pairing_matrix
        rhs = [pm[a] for a in idx]
        return linalg.solve(self.gram_basis, rhs)

    def coords_of_word(self, w: Word) -> list[RatFunc]:
        k = self.word_index[w]
        return [row[k] for row in self.word_coords]

    def coords_of_combination(self, combo: dict) -> list[RatFunc]:
        """Coordinates of a {word: scalar} combination."""
        out = [RAT_ZERO] * self.dim
        wc = self.word_coords
        for w, c in combo.items():
            if not c:
                continue
            k = self.word_index[w]
            c = RatFunc.coerce(c)
            for a in range(self.dim):
                x = wc[a][k]
                if x:
                    out[a] = out[a] + c * x
        return out

    def element(self, coords) -> "FElement":
        return FElement(self, tuple(RatFunc.coerce(c) for c in coords))

    def word_element(self, w: Word) -> "FElement":
        return self.element(self.coords_of_word(w))

    def zero(self) -> "FElement":
        return self.element([RAT_ZERO] * self.dim)


@dataclass(frozen=True, eq=False)
class FElement:
    space: FSpace
    coords: tuple[RatFunc, ...]

    @property
    def weight(self) -> NuWeight:
        return self.space.nu

    def __add__(self, other: "FElement") -> "FElement":
        if other.space is not self.space:
            raise ValueError("adding elements of different weight spaces")
        return FElement(self.space, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "FElement") -> "FElement":
        return self + other.scale(-1)

    def scale(self, c) -> "FElement":
        c = RatFunc.coerce(c)
        return FElement(self.space, tuple(c * x for x in self.coords))

    def __mul__(self, other):
        if isinstance(other, FElement):
            return self.space.alg.free_mult(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __eq__(self, other):
        if not isinstance(other, FElement):
            return NotImplemented
        return self.space.nu == other.space.nu and self.coords == other.coords

    def __hash__(self):
        return hash((self.space.nu, self.coords))

    def as_word_combination(self) -> dict[Word, RatFunc]:
        return {w: c for w, c in zip(self.space.basis_words, self.coords) if c}

    def __repr__(self):
        terms = [f"({c})*{''.join(f't{i}' for i in w) or '1'}"
                 for w, c in self.as_word_combination().items()]
        return " + ".join(terms) or "0"


class FAlgebra:
    """The algebra f of a root datum, with cached weight spaces."""

    def __init__(self, datum: RootDatum):
        self.datum = datum
        self.n = datum.n
        self._spaces: dict[NuWeight, FSpace] = {}
        self._lock = threading.RLock()
        self._pair_memo: dict[tuple[Word, Word], LaurentPoly] = {}

    def space(self, nu: NuWeight) -> FSpace:
        nu = tuple(nu)
        with self._lock:
            sp = self._spaces.get(nu)
            if sp is None:
                sp = FSpace(self, nu)
                self._spaces[nu] = sp
            return sp

    def f_weight_space(self, nu: NuWeight) -> FSpace:
        return self.space(nu)

    # -- words ----------------------------------------------------------
    def _qpow_dot(self, i: int, word: Word) -> int:
        """Exponent i . |word|."""
        dot = self.datum.dot
        return sum(dot(i, j) for j in word)

    def ir_word(self, i: int, w: Word) -> dict[Word, LaurentPoly]:
        """_i r on a word: sum_p q^{|head_p| . i} (w without position p)."""
        out: dict[Word, LaurentPoly] = {}
        for p, j in enumerate(w):
            if j == i:
                key = w[:p] + w[p + 1:]
                out[key] = out.get(key, ZERO) + LaurentPoly.monomial(self._qpow_dot(i, w[:p]))
        return out

    def ri_word(self, i: int, w: Word) -> dict[Word, LaurentPoly]:
        """r_i on a word: sum_p q^{|tail_p| . i} (w without position p)."""
        out: dict[Word, LaurentPoly] = {}
        for p, j in enumerate(w):
            if j == i:
                key = w[:p] + w[p + 1:]
                out[key] = out.get(key, ZERO) + LaurentPoly.monomial(self._qpow_dot(i, w[p + 1:]))
        return out

    def word_pairing(self, u: Word, w: Word) -> LaurentPoly:
        """D_nu * (u, w) for words u, w."""
        if len(u) != len(w):
            return ZERO
        if not u:
            return ONE
        key = (u, w)
        memo = self._pair_memo
        val = memo.get(key)
        if val is not None:
            return val
        i = u[0]
        rest = u[1:]
        total = ZERO
        for w2, c in self.ir_word(i, w).items():
            sub = self.word_pairing(rest, w2)
            if sub:
                total = total + c * sub
        memo[key] = total
        return total

    def form_denominator(self, nu: NuWeight) -> LaurentPoly:
        """D_nu = prod_i (1 - q_i^-2)^{nu_i}."""
        out = ONE
        d = self.datum.d
        for i, m in enumerate(nu):
            out = out * (ONE - LaurentPoly.monomial(-2 * d[i])) ** m
        return out

    def theta_norm(self, i: int) -> RatFunc:
        return RatFunc(ONE, ONE - LaurentPoly.monomial(-2 * self.datum.d[i]))

    def word_r(self, w: Word) -> dict[tuple[Word, Word], LaurentPoly]:
        """The twisted coproduct r on a word, as {(w', w''): coefficient}."""
        dot = self.datum.dot
        out: dict[tuple[Word, Word], LaurentPoly] = {}
        for mask in range(1 << len(w)):
            first = []
            second = []
            exp = 0
            for p, j in enumerate(w):
                if mask >> p & 1:
                    exp += sum(dot(k, j) for k in second)
                    first.append(j)
                else:
                    second.append(j)
            key = (tuple(first), tuple(second))
            out[key] = out.get(key, ZERO) + LaurentPoly.monomial(exp)
        return out

    # -- element-level operations ----------------------------------------
    def one(self) -> FElement:
        return self.space(self.datum.zero_nu()).element([ONE_RAT])

    def theta(self, i: int) -> FElement:
        return self.space(self.datum.unit(i)).word_element((i,))

    def monomial_element(self, m: DividedMonomial) -> FElement:
        sp = self.space(m.weight(self.n))
        den = m.denominator(self.datum.d)
        return sp.element([c / den for c in sp.coords_of_word(m.word)])

    def free_mult(self, x: FElement, y: FElement) -> FElement:
        nu = nu_add(x.weight, y.weight)
        target = self.space(nu)
        combo: dict[Word, RatFunc] = {}
        for u, a in x.as_word_combination().items():
            for w, b in y.as_word_combination().items():
                key = u + w
                combo[key] = combo.get(key, RAT_ZERO) + a * b
        return target.element(target.coords_of_combination(combo))

    def inner_product(self, x: FElement, y: FElement) -> RatFunc:
        if x.weight != y.weight:
            return RAT_ZERO
        sp = x.space
        gram = sp.gram_basis
        total = RAT_ZERO
        for a, ca in enumerate(x.coords):
            if not ca:
                continue
            for b, cb in enumerate(y.coords):
                if cb and gram[a][b]:
                    total = total + ca * cb * gram[a][b]
        return total / self.form_denominator(x.weight)

    def f_bar(self, x: FElement) -> FElement:
        # basis words are bar-invariant, so bar acts on coordinates only
        return FElement(x.space, tuple(c.bar() for c in x.coords))

    def _apply_word_map(self, x: FElement, fn, target_nu) -> FElement:
        target = self.space(target_nu)
        combo: dict[Word, RatFunc] = {}
        for w, c in x.as_word_combination().items():
            for w2, e in fn(w).items():
                combo[w2] = combo.get(w2, RAT_ZERO) + c * e
        return target.element(target.coords_of_combination(combo))

    def kashiwara_maps(self, i: int, x: FElement) -> tuple[FElement, FElement]:
        """(r_i(x), _i r(x)); both zero when nu_i = 0."""
        nu = x.weight
        if nu[i] == 0:
            return None, None
        tgt = nu_sub(nu, self.datum.unit(i))
        return (self._apply_word_map(x, lambda w: self.ri_word(i, w), tgt),
                self._apply_word_map(x, lambda w: self.ir_word(i, w), tgt))

    def twisted_coproduct_r(self, x: FElement) -> dict[tuple[NuWeight, NuWeight], list[list[RatFunc]]]:
        """r(x) as {(nu', nu''): T} with r(x)_{nu',nu''} = sum T[a][b] e'_a (x) e''_b."""
        out: dict[tuple[NuWeight, NuWeight], list[list[RatFunc]]] = {}
        n = self.n
        for w, c in x.as_word_combination().items():
            for (w1, w2), e in self.word_r(w).items():
                nu1, nu2 = word_weight(w1, n), word_weight(w2, n)
                s1, s2 = self.space(nu1), self.space(nu2)
                key = (nu1, nu2)
                if key not in out:
                    out[key] = [[RAT_ZERO] * s2.dim for _ in range(s1.dim)]
                t = out[key]
                c1 = s1.coords_of_word(w1)
                c2 = s2.coords_of_word(w2)
                ce = c * e
                for a, xa in enumerate(c1):
                    if xa:
                        for b, xb in enumerate(c2):
                            if xb:
                                t[a][b] = t[a][b] + ce * xa * xb
        return out

    def tensor_pairing(self, r_x, y1: FElement, y2: FElement) -> RatFunc:
        """(r(x), y1 (x) y2) with the product form on f (x) f."""
        t = r_x.get((y1.weight, y2.weight))
        if t is None:
            return RAT_ZERO
        s1, s2 = y1.space, y2.space
        e1 = [self.inner_product(s1.element(_unit(s1.dim, a)), y1) for a in range(s1.dim)]
        e2 = [self.inner_product(s2.element(_unit(s2.dim, b)), y2) for b in range(s2.dim)]
        total = RAT_ZERO
        for a in range(s1.dim):
            for b in range(s2.dim):
                if t[a][b]:
                    total = total + t[a][b] * e1[a] * e2[b]
        return total

    # -- expressing elements in a basis ---------------------------------
    def coefficients_in(self, basis: list[FElement], x: FElement) -> list[RatFunc]:
        """Coordinates of x on a basis of its weight space."""
        if not basis:
            if not x.is_zero():
                raise linalg.SingularSystemError("nonzero element of an empty space")
            return []
        m = [[b.coords[a] for b in basis] for a in range(x.space.dim)]
        return linalg.solve_vec(m, list(x.coords))


def _unit(n, k):
    return [ONE_RAT if j == k else RAT_ZERO for j in range(n)]


# ---------------------------------------------------------------------------
# canonical bases
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CBElement:
    """A canonical basis element: an A-combination of divided monomials."""

    monomials: tuple[tuple[DividedMonomial, LaurentPoly], ...]
    element: FElement

    @property
    def weight(self) -> NuWeight:
        return self.element.weight

    @property
    def leading(self) -> DividedMonomial:
        return self.monomials[0][0]

    def __str__(self):
        parts = []
        for m, c in self.monomials:
            parts.append(str(m) if c == ONE else f"({c}){m}")
        return " + ".join(parts)


def series_leq(x: RatFunc, min_exp: int = 0) -> dict[int, int]:
    return x.expand_at_infinity(min_exp)


def is_almost_delta(x: RatFunc, diag: bool) -> bool:
    """x in delta + q^-1 Z[[q^-1]]."""
    s = x.expand_at_infinity(0)
    return s == ({0: 1} if diag else {})


class CanonicalBasisProvider:
    """Supplies B_nu, cached per weight."""

    METHODS = ("rank1", "A2", "engine")

    def __init__(self, alg: FAlgebra, method: str = "engine", cache_dir: str | None = None):
        if method not in self.METHODS:
            raise ValueError(f"unknown canonical basis method {method!r}")
        dt = alg.datum.cartan
        if method == "rank1" and dt.rank != 1:
            raise ValueError("rank-1 closed form needs a rank-1 datum")
        if method == "A2" and (dt.cartan != ((2, -1), (-1, 2))):
            raise ValueError("A2 closed form needs the A2 Cartan matrix")
        if method == "engine" and not (dt.is_symmetric or dt.is_finite_type):
            raise ValueError("the engine only handles symmetric or finite type data")
        self.alg = alg
        self.method = method
        self._cache: dict[NuWeight, list[CBElement]] = {}
        self._lock = threading.RLock()
        if cache_dir is None:
            cache_dir = os.environ.get("QGCB_CACHE_DIR")
        self.cache_dir = Path(cache_dir) if cache_dir else None

    def basis(self, nu: NuWeight) -> list[CBElement]:
        nu = tuple(nu)
        with self._lock:
            got = self._cache.get(nu)
            if got is None:
                got = self._load(nu)
                if got is None:
                    got = self._compute(nu)
                    self._store(nu, got)
                self._cache[nu] = got
            return got

    def _compute(self, nu):
        if not any(nu):
            return [CBElement(((DividedMonomial(()), ONE),), self.alg.one())]
        if self.method == "rank1":
            m = DividedMonomial(((0, nu[0]),))
            return [CBElement(((m, ONE),), self.alg.monomial_element(m))]
        if self.method == "A2":
            closed = a2_closed_form(self.alg, nu)
            engine = almost_orthonormal_engine(self.alg, nu)
            if len(closed) != len(engine) or any(
                    not any(b.element == e.element for e in engine) for b in closed):
                raise EngineError(f"A2 closed form disagrees with the engine at nu={nu}")
            return closed
        return almost_orthonormal_engine(self.alg, nu)

    # -- optional disk cache ---------------------------------------------
    def _path(self, nu):
        if self.cache_dir is None:
            return None
        dt = self.alg.datum.cartan
        tag = "_".join(str(x) for row in dt.cartan for x in row) + "__" + \
            "_".join(map(str, dt.symmetrizers))
        return self.cache_dir / f"B_{self.method}_{tag}_{'_'.join(map(str, nu))}.json"

    def _load(self, nu):
        path = self._path(nu)
        if path is None or not path.exists():
            return None
        obj = json.loads(path.read_text())
        return basis_from_json(self.alg, obj)

    def _store(self, nu, basis):
        path = self._path(nu)
        if path is None:
            return
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(basis_to_json(nu, basis), sort_keys=True))
        os.replace(tmp, path)


def canonical_basis_f(nu: NuWeight, provider: CanonicalBasisProvider) -> list[CBElement]:
    return provider.basis(nu)


def basis_to_json(nu, basis: list[CBElement]) -> dict:
    monos = sorted({m for b in basis for m, _ in b.monomials})
    index = {m: k for k, m in enumerate(monos)}
    rows = []
    for b in basis:
        row = [ZERO] * len(monos)
        for m, c in b.monomials:
            row[index[m]] = c
        rows.append([c.to_json() for c in row])
    return {"nu": list(nu), "monomials": [m.to_json() for m in monos], "basis": rows}


def basis_from_json(alg: FAlgebra, obj) -> list[CBElement]:
    monos = [DividedMonomial(tuple((int(i), int(a)) for i, a in m)) for m in obj["monomials"]]
    out = []
    for row in obj["basis"]:
        terms = [(m, LaurentPoly.from_json(c)) for m, c in zip(monos, row)]
        terms = [(m, c) for m, c in terms if c]
        out.append(_make_cb(alg, terms, tuple(obj["nu"])))
    return out


def _make_cb(alg: FAlgebra, terms, nu) -> CBElement:
    sp = alg.space(nu)
    el = sp.zero()
    for m, c in terms:
        el = el + alg.monomial_element(m).scale(c)
    return CBElement(tuple(terms), el)


def a2_closed_form(alg: FAlgebra, nu: NuWeight) -> list[CBElement]:
    """t1^(a) t2^(b) t1^(c) and t2^(a) t1^(b) t2^(c) with b >= a + c."""
    n1, n2 = nu
    cands = []
    for a in range(n1 + 1):
        c = n1 - a
        if n2 >= a + c:
            cands.append(((0, a), (1, n2), (0, c)))
    for a in range(n2 + 1):
        c = n2 - a
        if n1 >= a + c:
            cands.append(((1, a), (0, n1), (1, c)))
    out: list[CBElement] = []
    seen: list[FElement] = []
    for f in cands:
        m = DividedMonomial.normalized(f)
        el = alg.monomial_element(m)
        if any(el == s for s in seen):
            continue
        seen.append(el)
        out.append(CBElement(((m, ONE),), el))
    return out


def almost_orthonormal_engine(alg: FAlgebra, nu: NuWeight) -> list[CBElement]:
    """Gram-Schmidt against almost orthonormality.

    Divided monomials (bar-invariant, integral) are processed fewest factors
    first.  Each candidate m is corrected to x = m - sum c_j b_j with
    bar-invariant c_j chosen so that (x, b_j) lies in q^-1 Z[[q^-1]]; x is
    accepted when (x, x) lies in 1 + q^-1 Z[[q^-1]].  Candidates whose
    correction has (x, x) with a larger constant term are retried after the
    others; if none can be placed the engine gives up.
    """
    sp = alg.space(nu)
    dim = sp.dim
    monos = divided_monomials(nu)
    d = alg.datum.d
    den_nu = alg.form_denominator(nu)
    words = [m.word for m in monos]
    mden = [m.denominator(d) for m in monos]
    pair = alg.word_pairing

    gram_cache: dict[tuple[int, int], RatFunc] = {}

    def mgram(a, b):
        key = (a, b) if a <= b else (b, a)
        v = gram_cache.get(key)
        if v is None:
            v = RatFunc(pair(words[a], words[b]), den_nu * mden[a] * mden[b])
            gram_cache[key] = v
        return v

    def form(x: dict[int, LaurentPoly], y: dict[int, LaurentPoly]) -> RatFunc:
        tot = RAT_ZERO
        for a, ca in x.items():
            for b, cb in y.items():
                g = mgram(a, b)
                if g:
                    tot = tot + g * (ca * cb)
        return tot

    found: list[dict[int, LaurentPoly]] = []
    found_gram: list[list[RatFunc]] = []
    pending = list(range(len(monos)))
    while len(found) < dim:
        progress = False
        still = []
        for k in pending:
            if len(found) == dim:
                break
            x = {k: ONE}
            if found:
                y = [form(x, b) for b in found]
                z = linalg.solve_vec(found_gram, y)
                for j, zj in enumerate(z):
                    s = zj.expand_at_infinity(0)
                    c = LaurentPoly({e: v for e, v in s.items()})
                    c = c + c.bar() - LaurentPoly.const(s.get(0, 0))
                    if c:
                        for a, v in found[j].items():
                            x[a] = x.get(a, ZERO) - c * v
                x = {a: v for a, v in x.items() if v}
            norm = form(x, x)
            lead = norm.expand_at_infinity(0) if norm else {}
            if not lead:
                # x = 0 in f_nu: the candidate is already spanned
                continue
            if lead == {0: 1}:
                for j, b in enumerate(found):
                    if not is_almost_delta(form(x, b), False):
                        raise EngineError(f"correction failed to orthogonalise at nu={nu}")
                row = [form(x, b) for b in found]
                for j in range(len(found)):
                    found_gram[j].append(row[j])
                found_gram.append(row + [norm])
                found.append(x)
                progress = True
            else:
                still.append(k)
        pending = still
        if len(found) < dim and not progress:
            raise EngineError(f"cannot certify the canonical basis at nu={nu}: "
                              f"{len(found)} of {dim} elements placed")
    out = []
    for x in found:
        terms = sorted(((monos[a], c) for a, c in x.items()),
                       key=lambda t: (len(t[0].factors), t[0].factors))
        out.append(_make_cb(alg, terms, nu))
    _certify(alg, out, nu)
    return out


def _certify(alg: FAlgebra, basis: list[CBElement], nu) -> None:
    sp = alg.space(nu)
    if len(basis) != sp.dim:
        raise EngineError(f"basis size {len(basis)} != dim f_nu {sp.dim}")
    m = [[b.element.coords[a] for b in basis] for a in range(sp.dim)]
    if linalg.rank(m) != sp.dim:
        raise EngineError("canonical basis candidates are dependent")
    for b in basis:
        if alg.f_bar(b.element) != b.element:
            raise EngineError(f"{b} is not bar-invariant")
