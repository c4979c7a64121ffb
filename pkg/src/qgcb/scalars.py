"""Exact scalars: Laurent polynomials in q over Z and rational functions in q.

``LaurentPoly`` is a sparse exponent -> coefficient map with arbitrary-precision
integer coefficients.  ``RatFunc`` is a canonicalised quotient of two Laurent
polynomials; gcds are delegated to FLINT.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

import flint


class LaurentPoly:
    """An element of Z[q, q^-1].

    Instances are immutable and hashable.  No zero coefficient is ever stored,
    so two polynomials are equal exactly when their term maps are equal.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, int] | None = None):
        if terms:
            self._terms = {int(e): int(c) for e, c in terms.items() if c}
        else:
            self._terms = {}
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "LaurentPoly":
        p = object.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def monomial(cls, exp: int, coeff: int = 1) -> "LaurentPoly":
        return cls._raw({exp: coeff} if coeff else {})

    @classmethod
    def const(cls, c: int) -> "LaurentPoly":
        return cls._raw({0: c} if c else {})

    @classmethod
    def coerce(cls, x) -> "LaurentPoly":
        if isinstance(x, LaurentPoly):
            return x
        if isinstance(x, int):
            return cls.const(x)
        if isinstance(x, RatFunc):
            return x.to_laurent()
        raise TypeError(f"cannot coerce {type(x).__name__} to LaurentPoly")

    # -- inspection -----------------------------------------------------
    @property
    def terms(self) -> dict[int, int]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coeff(self, exp: int) -> int:
        return self._terms.get(exp, 0)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    @property
    def min_exp(self) -> int:
        return min(self._terms)

    @property
    def max_exp(self) -> int:
        return max(self._terms)

    def is_monomial_unit(self) -> bool:
        """True for +-q^k, the units of Z[q, q^-1]."""
        return len(self._terms) == 1 and abs(next(iter(self._terms.values()))) == 1

    def is_bar_invariant(self) -> bool:
        return all(self._terms.get(-e) == c for e, c in self._terms.items())

    def in_qinv_Z_qinv(self) -> bool:
        """Membership in q^-1 Z[q^-1]."""
        return all(e < 0 for e in self._terms)

    def in_Z_qinv(self) -> bool:
        return all(e <= 0 for e in self._terms)

    def evaluate(self, q):
        return sum(c * q ** e for e, c in self._terms.items())

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.const(other)
        elif not isinstance(other, LaurentPoly):
            return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        t = dict(self._terms)
        for e, c in other._terms.items():
            s = t.get(e, 0) + c
            if s:
                t[e] = s
            else:
                t.pop(e, None)
        return LaurentPoly._raw(t)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.const(other)
        elif not isinstance(other, LaurentPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            if not other:
                return ZERO
            return LaurentPoly._raw({e: c * other for e, c in self._terms.items()})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        a, b = self._terms, other._terms
        if not a or not b:
            return ZERO
        if len(a) > len(b):
            a, b = b, a
        if len(a) == 1:
            (ea, ca), = a.items()
            return LaurentPoly._raw({ea + e: ca * c for e, c in b.items()})
        if len(a) * len(b) > 400:
            return _flint_mul(self, other)
        t: dict[int, int] = {}
        get = t.get
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = ea + eb
                t[e] = get(e, 0) + ca * cb
        return LaurentPoly._raw({e: c for e, c in t.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if self.is_monomial_unit():
                (e, c), = self._terms.items()
                return LaurentPoly.monomial(e * n, c ** n)
            raise ValueError("negative power of a non-unit Laurent polynomial")
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by q^k."""
        if not k:
            return self
        return LaurentPoly._raw({e + k: c for e, c in self._terms.items()})

    def bar(self) -> "LaurentPoly":
        return LaurentPoly._raw({-e: c for e, c in self._terms.items()})

    def exact_div(self, other: "LaurentPoly | int") -> "LaurentPoly":
        """Quotient ``self / other``; raises ``ArithmeticError`` unless it lies in A."""
        other = LaurentPoly.coerce(other)
        if not other:
            raise ZeroDivisionError("division by the zero Laurent polynomial")
        if not self._terms:
            return ZERO
        if len(other._terms) == 1:
            (e0, c0), = other._terms.items()
            t = {}
            for e, c in self._terms.items():
                qt, r = divmod(c, c0)
                if r:
                    raise ArithmeticError(f"{self} is not divisible by {other}")
                t[e - e0] = qt
            return LaurentPoly._raw(t)
        sa, pa = _to_flint(self)
        sb, pb = _to_flint(other)
        quo, rem = divmod(pa, pb)
        if rem != 0:
            raise ArithmeticError(f"{self} is not divisible by {other}")
        return _from_flint(quo, sa - sb)

    def negative_part(self) -> "LaurentPoly":
        return LaurentPoly._raw({e: c for e, c in self._terms.items() if e < 0})

    def nonnegative_part(self) -> "LaurentPoly":
        return LaurentPoly._raw({e: c for e, c in self._terms.items() if e >= 0})

    # -- protocol -------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self._terms == other._terms
        if isinstance(other, int):
            return self._terms == ({0: other} if other else {})
        if isinstance(other, RatFunc):
            return other == self
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def sorted_terms(self) -> list[tuple[int, int]]:
        return sorted(self._terms.items())

    def __repr__(self):
        return f"LaurentPoly({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        out = []
        for e, c in sorted(self._terms.items(), reverse=True):
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if e == 0:
                body = str(a)
            else:
                mono = "q" if e == 1 else f"q^{e}"
                body = mono if a == 1 else f"{a}*{mono}"
            out.append((sign, body))
        s = ("-" if out[0][0] == "-" else "") + out[0][1]
        for sign, body in out[1:]:
            s += f" {sign} {body}"
        return s

    # -- interchange ----------------------------------------------------
    def to_json(self) -> dict:
        return {"terms": [[e, str(c)] for e, c in sorted(self._terms.items())]}

    @classmethod
    def from_json(cls, obj) -> "LaurentPoly":
        return cls({int(e): int(c) for e, c in obj["terms"]})


ZERO = LaurentPoly._raw({})
ONE = LaurentPoly._raw({0: 1})
Q = LaurentPoly._raw({1: 1})
QINV = LaurentPoly._raw({-1: 1})


def _to_flint(p: LaurentPoly) -> tuple[int, flint.fmpz_poly]:
    lo = p.min_exp
    hi = p.max_exp
    coeffs = [0] * (hi - lo + 1)
    for e, c in p.items():
        coeffs[e - lo] = c
    return lo, flint.fmpz_poly(coeffs)


def _from_flint(poly: flint.fmpz_poly, shift: int) -> LaurentPoly:
    return LaurentPoly._raw({i + shift: int(c) for i, c in enumerate(poly.coeffs()) if c != 0})


def _flint_mul(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    sa, pa = _to_flint(a)
    sb, pb = _to_flint(b)
    return _from_flint(pa * pb, sa + sb)


def bar_involute(p: LaurentPoly) -> LaurentPoly:
    return p.bar()


@lru_cache(maxsize=None)
def quantum_integer(n: int, d: int = 1) -> LaurentPoly:
    """[n]_d = (q^{dn} - q^{-dn}) / (q^d - q^{-d})."""
    if n < 0:
        raise ValueError(f"quantum integer needs n >= 0, got {n}")
    if d < 1:
        raise ValueError("symmetrizer must be positive")
    return LaurentPoly._raw({d * (n - 1 - 2 * k): 1 for k in range(n)})


@lru_cache(maxsize=None)
def quantum_factorial(n: int, d: int = 1) -> LaurentPoly:
    if n < 0:
        raise ValueError(f"quantum factorial needs n >= 0, got {n}")
    out = ONE
    for k in range(2, n + 1):
        out = out * quantum_integer(k, d)
    return out


@lru_cache(maxsize=None)
def quantum_binomial(m: int, t: int, d: int = 1) -> LaurentPoly:
    if not 0 <= t <= m:
        raise ValueError(f"quantum binomial needs 0 <= t <= m, got m={m}, t={t}")
    return quantum_factorial(m, d).exact_div(
        quantum_factorial(t, d) * quantum_factorial(m - t, d))


def bar_split(gamma: LaurentPoly) -> LaurentPoly:
    """Return the unique c in q^-1 Z[q^-1] with c - bar(c) = gamma.

    ``gamma`` must satisfy bar(gamma) = -gamma; anything else means the
    triangular recursion upstream has lost unitriangularity.
    """
    if gamma.bar() != -gamma:
        raise ValueError(f"bar_split needs an antisymmetric input, got {gamma}")
    return gamma.negative_part()


class RatFunc:
    """An element of Q(q) stored as num/den with both in Z[q, q^-1].

    Canonical form: ``den`` has minimal exponent 0 and positive leading
    coefficient, and num/den are coprime in Z[q] once q-powers are cleared.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=None, *, _canonical=False):
        num = LaurentPoly.coerce(num)
        den = ONE if den is None else LaurentPoly.coerce(den)
        if not den:
            raise ZeroDivisionError("RatFunc with zero denominator")
        if not _canonical:
            num, den = _canonicalize(num, den)
        self.num = num
        self.den = den
        self._hash = None

    @classmethod
    def coerce(cls, x) -> "RatFunc":
        if isinstance(x, RatFunc):
            return x
        if isinstance(x, (int, LaurentPoly)):
            return cls(LaurentPoly.coerce(x), ONE, _canonical=True)
        raise TypeError(f"cannot coerce {type(x).__name__} to RatFunc")

    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def is_laurent(self) -> bool:
        return self.den == ONE

    def to_laurent(self) -> LaurentPoly:
        if self.den != ONE:
            raise ArithmeticError(f"{self} does not lie in Z[q, q^-1]")
        return self.num

    def bar(self) -> "RatFunc":
        return RatFunc(self.num.bar(), self.den.bar())

    def __add__(self, other):
        if isinstance(other, (int, LaurentPoly)):
            other = RatFunc.coerce(other)
        elif not isinstance(other, RatFunc):
            return NotImplemented
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, _canonical=True)

    def __sub__(self, other):
        if isinstance(other, (int, LaurentPoly)):
            other = RatFunc.coerce(other)
        elif not isinstance(other, RatFunc):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, LaurentPoly)):
            other = RatFunc.coerce(other)
        elif not isinstance(other, RatFunc):
            return NotImplemented
        if not self.num or not other.num:
            return RAT_ZERO
        if self.den == ONE and other.den == ONE:
            return RatFunc(self.num * other.num, ONE, _canonical=True)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, LaurentPoly)):
            other = RatFunc.coerce(other)
        elif not isinstance(other, RatFunc):
            return NotImplemented
        if not other.num:
            raise ZeroDivisionError("RatFunc division by zero")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return RatFunc.coerce(other) / self

    def inverse(self) -> "RatFunc":
        return ONE_RAT / self

    def __eq__(self, other):
        if isinstance(other, (int, LaurentPoly)):
            other = RatFunc.coerce(other)
        elif not isinstance(other, RatFunc):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __repr__(self):
        return f"RatFunc({self})"

    def __str__(self):
        if self.den == ONE:
            return str(self.num)
        return f"({self.num})/({self.den})"

    def expand_at_infinity(self, min_exp: int) -> dict[int, int]:
        """Coefficients of the Laurent expansion in q^-1 down to ``q^min_exp``.

        Raises if a coefficient is not an integer.
        """
        if not self.num:
            return {}
        top = self.den.max_exp
        lead = self.den.coeff(top)
        rem = {e: Fraction(c) for e, c in self.num.items()}
        out: dict[int, int] = {}
        e = max(rem) - top
        den_items = list(self.den.items())
        while rem and e >= min_exp:
            c = rem.get(e + top, 0)
            if c:
                c = c / lead
                if c.denominator != 1:
                    raise ArithmeticError(f"non-integral expansion of {self}")
                out[e] = int(c)
                for de, dc in den_items:
                    k = e + de
                    v = rem.get(k, 0) - c * dc
                    if v:
                        rem[k] = v
                    else:
                        rem.pop(k, None)
            e -= 1
        return out

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, obj) -> "RatFunc":
        return cls(LaurentPoly.from_json(obj["num"]), LaurentPoly.from_json(obj["den"]))


def _canonicalize(num: LaurentPoly, den: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    if not num:
        return ZERO, ONE
    if len(den) == 1:
        (e, c), = den.items()
        if c == 1:
            return num.shift(-e), ONE
        if c == -1:
            return (-num).shift(-e), ONE
    sn, pn = _to_flint(num)
    sd, pd = _to_flint(den)
    g = pn.gcd(pd)
    if g.degree() > 0 or abs(int(g.coeffs()[0])) != 1:
        pn = pn // g
        pd = pd // g
    if int(pd.coeffs()[-1]) < 0:
        pn, pd = -pn, -pd
    return _from_flint(pn, sn - sd), _from_flint(pd, 0)


RAT_ZERO = RatFunc(ZERO, ONE, _canonical=True)
ONE_RAT = RatFunc(ONE, ONE, _canonical=True)


def ratfunc_arith(a: RatFunc, b: RatFunc, op: str) -> RatFunc:
    ops = {"+": RatFunc.__add__, "-": RatFunc.__sub__, "*": RatFunc.__mul__,
           "/": RatFunc.__truediv__}
    ops["×"] = ops["*"]
    ops["÷"] = ops["/"]
    ops["−"] = ops["-"]
    try:
        fn = ops[op]
    except KeyError:
        raise ValueError(f"unknown operation {op!r}") from None
    return fn(RatFunc.coerce(a), RatFunc.coerce(b))


def laurent_sum(items: Iterable[LaurentPoly]) -> LaurentPoly:
    t: dict[int, int] = {}
    for p in items:
        for e, c in p._terms.items():
            t[e] = t.get(e, 0) + c
    return LaurentPoly._raw({e: c for e, c in t.items() if c})
