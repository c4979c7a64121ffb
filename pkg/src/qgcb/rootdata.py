"""Symmetrizable Cartan data and their simply-connected root data.

Weights in X are integer tuples of fundamental-weight coordinates, so
``<i, lam> = lam[i]``.  Elements of N[I] ("nu weights") are nonnegative
integer tuples of simple-root multiplicities.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from pathlib import Path

Weight = tuple[int, ...]
NuWeight = tuple[int, ...]


class DatumError(ValueError):
    pass


PRESETS = {
    "A1": ([[2]], [1]),
    "A2": ([[2, -1], [-1, 2]], [1, 1]),
    # index 0 short, index 1 long
    "B2": ([[2, -2], [-1, 2]], [1, 2]),
    "A1^(1)": ([[2, -2], [-2, 2]], [1, 1]),
}


@dataclass(frozen=True)
class CartanDatum:
    cartan: tuple[tuple[int, ...], ...]
    symmetrizers: tuple[int, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        a, d = self.cartan, self.symmetrizers
        n = len(a)
        if n == 0 or any(len(row) != n for row in a):
            raise DatumError("Cartan matrix must be square and nonempty")
        if len(d) != n or any(x < 1 for x in d):
            raise DatumError("symmetrizers must be positive, one per node")
        for i in range(n):
            if a[i][i] != 2:
                raise DatumError(f"a[{i}][{i}] must be 2")
            for j in range(n):
                if i == j:
                    continue
                if a[i][j] > 0:
                    raise DatumError(f"a[{i}][{j}] must be <= 0")
                if (a[i][j] == 0) != (a[j][i] == 0):
                    raise DatumError(f"a[{i}][{j}] = 0 iff a[{j}][{i}] = 0 violated")
                if d[i] * a[i][j] != d[j] * a[j][i]:
                    raise DatumError("Cartan matrix is not symmetrized by the given d")

    @classmethod
    def from_lists(cls, cartan, symmetrizers, name: str = "") -> "CartanDatum":
        return cls(tuple(tuple(int(x) for x in row) for row in cartan),
                   tuple(int(x) for x in symmetrizers), name)

    @property
    def rank(self) -> int:
        return len(self.cartan)

    @cached_property
    def is_symmetric(self) -> bool:
        n = self.rank
        return all(self.cartan[i][j] == self.cartan[j][i] for i in range(n) for j in range(n))

    @cached_property
    def is_finite_type(self) -> bool:
        """Positive definiteness of (d_i a_ij), by exact elimination."""
        n = self.rank
        m = [[Fraction(self.symmetrizers[i] * self.cartan[i][j]) for j in range(n)]
             for i in range(n)]
        for c in range(n):
            if m[c][c] <= 0:
                return False
            for r in range(c + 1, n):
                f = m[r][c] / m[c][c]
                for k in range(c, n):
                    m[r][k] -= f * m[c][k]
        return True

    def to_json(self) -> dict:
        return {"cartan": [list(r) for r in self.cartan],
                "symmetrizers": list(self.symmetrizers)}


def load_datum(source: str) -> CartanDatum:
    """A preset name, or a path to a JSON/TOML file with ``cartan``/``symmetrizers``."""
    if source in PRESETS:
        a, d = PRESETS[source]
        return CartanDatum.from_lists(a, d, source)
    path = Path(source)
    if not path.exists():
        raise DatumError(f"unknown preset or missing file: {source}")
    text = path.read_text()
    if path.suffix == ".toml":
        obj = _load_toml(text)
    else:
        obj = json.loads(text)
    try:
        return CartanDatum.from_lists(obj["cartan"], obj["symmetrizers"], path.stem)
    except KeyError as exc:
        raise DatumError(f"datum file lacks {exc}") from None


def _load_toml(text: str) -> dict:
    try:
        import tomllib
    except ModuleNotFoundError:  # Python < 3.11
        import tomli as tomllib
    return tomllib.loads(text)


class RootDatum:
    """Simply-connected root datum: X = Z^I, <i, lam> = lam_i."""

    def __init__(self, cartan: CartanDatum):
        self.cartan = cartan
        self.n = cartan.rank
        a = cartan.cartan
        # image of simple root i in X: <j, i'> = a[j][i]
        self.simple_roots: tuple[Weight, ...] = tuple(
            tuple(a[j][i] for j in range(self.n)) for i in range(self.n))
        # Y-regularity: the coroots i in Y are the coordinate functionals,
        # linearly independent by construction.
        functionals = {tuple(int(k == i) for k in range(self.n)) for i in range(self.n)}
        assert len(functionals) == self.n

    @property
    def d(self) -> tuple[int, ...]:
        return self.cartan.symmetrizers

    @property
    def a(self):
        return self.cartan.cartan

    def pairing(self, i: int, lam: Weight) -> int:
        return lam[i]

    def dot(self, i: int, j: int) -> int:
        """The symmetric form i . j = d_i a_ij."""
        return self.cartan.symmetrizers[i] * self.cartan.cartan[i][j]

    def dot_nu(self, i: int, nu: NuWeight) -> int:
        a_i = self.cartan.cartan[i]
        return self.cartan.symmetrizers[i] * sum(a_i[j] * nu[j] for j in range(self.n))

    def nu_pairing(self, i: int, nu: NuWeight) -> int:
        """<i, nu'> for nu viewed in X through the simple roots."""
        a_i = self.cartan.cartan[i]
        return sum(a_i[j] * nu[j] for j in range(self.n))

    def nu_to_weight(self, nu: NuWeight) -> Weight:
        return tuple(self.nu_pairing(i, nu) for i in range(self.n))

    def add_root(self, lam: Weight, i: int, k: int = 1) -> Weight:
        r = self.simple_roots[i]
        return tuple(x + k * y for x, y in zip(lam, r))

    def sub_nu(self, lam: Weight, nu: NuWeight) -> Weight:
        w = self.nu_to_weight(nu)
        return tuple(x - y for x, y in zip(lam, w))

    def add_nu(self, lam: Weight, nu: NuWeight) -> Weight:
        w = self.nu_to_weight(nu)
        return tuple(x + y for x, y in zip(lam, w))

    def unit(self, i: int) -> NuWeight:
        return tuple(int(k == i) for k in range(self.n))

    def zero_nu(self) -> NuWeight:
        return (0,) * self.n

    def nu_weights_of_height(self, h: int) -> list[NuWeight]:
        return _compositions(h, self.n)

    def nu_weights_up_to(self, h: int) -> list[NuWeight]:
        return [nu for k in range(h + 1) for nu in _compositions(k, self.n)]


def build_root_datum(cartan: CartanDatum) -> RootDatum:
    return RootDatum(cartan)


def height(nu: NuWeight) -> int:
    return sum(nu)


def dominance_height(nu: NuWeight) -> int:
    if any(x < 0 for x in nu):
        raise ValueError(f"{nu} is not in N[I]")
    return sum(nu)


def dominant_test(lam: Weight) -> bool:
    return all(x >= 0 for x in lam)


def nu_sub(a: NuWeight, b: NuWeight) -> NuWeight:
    out = tuple(x - y for x, y in zip(a, b))
    if any(x < 0 for x in out):
        raise ValueError(f"{a} - {b} leaves N[I]")
    return out


def nu_add(a: NuWeight, b: NuWeight) -> NuWeight:
    return tuple(x + y for x, y in zip(a, b))


@lru_cache(maxsize=None)
def _compositions(h: int, n: int) -> list[NuWeight]:
    if n == 1:
        return [(h,)]
    out = []
    for first in range(h, -1, -1):
        for rest in _compositions(h - first, n - 1):
            out.append((first,) + rest)
    return out


@lru_cache(maxsize=None)
def positive_roots(cartan: CartanDatum) -> tuple[NuWeight, ...]:
    """Positive roots of a finite-type datum via root strings."""
    if not cartan.is_finite_type:
        raise DatumError("positive roots are only enumerated for finite type")
    rd = RootDatum(cartan)
    n = rd.n
    simple = [rd.unit(i) for i in range(n)]
    roots = set(simple)
    layer = list(simple)
    while layer:
        nxt = []
        for beta in layer:
            for i in range(n):
                p = 0
                while True:
                    cand = tuple(b - (p + 1) * int(k == i) for k, b in enumerate(beta))
                    if cand in roots:
                        p += 1
                    else:
                        break
                q = p - rd.nu_pairing(i, beta)
                if q > 0:
                    up = tuple(b + int(k == i) for k, b in enumerate(beta))
                    if up not in roots:
                        roots.add(up)
                        nxt.append(up)
        layer = nxt
    return tuple(sorted(roots, key=lambda r: (sum(r), r)))


def positive_root_partitions(cartan: CartanDatum, nu: NuWeight) -> int:
    """Number of multisets of positive roots summing to nu (= dim f_nu)."""
    roots = positive_roots(cartan)
    nu = tuple(nu)
    # coin-change count over the box below nu
    ways = {cartan_zero: 1 for cartan_zero in [(0,) * len(nu)]}
    for r in roots:
        if any(x > y for x, y in zip(r, nu)):
            continue
        new = dict(ways)
        # unbounded multiplicity of r: iterate points in increasing order
        for pt in sorted(_box(nu), key=sum):
            prev = tuple(x - y for x, y in zip(pt, r))
            if all(x >= 0 for x in prev) and prev in new:
                new[pt] = new.get(pt, 0) + new[prev]
        ways = new
    return ways.get(nu, 0)


def _box(nu: NuWeight):
    pts = [()]
    for m in nu:
        pts = [p + (k,) for p in pts for k in range(m + 1)]
    return pts
