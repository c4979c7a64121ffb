"""Dense exact linear algebra over Q(q) and Z[q, q^-1] for small matrices.

Matrices are plain lists of rows.  Entries may be ints, ``LaurentPoly`` or
``RatFunc``; results of elimination are ``RatFunc``.
"""
from __future__ import annotations

from .scalars import LaurentPoly, RatFunc, RAT_ZERO, ONE_RAT, ZERO


class SingularSystemError(ArithmeticError):
    """A linear system expected to have a unique solution does not."""


def _size(x: RatFunc) -> int:
    return len(x.num) + len(x.den)


def to_rat(m) -> list[list[RatFunc]]:
    return [[RatFunc.coerce(x) for x in row] for row in m]


def to_laurent(m) -> list[list[LaurentPoly]]:
    return [[LaurentPoly.coerce(x) for x in row] for row in m]


def zeros(n: int, k: int, zero=ZERO):
    return [[zero] * k for _ in range(n)]


def identity(n: int, zero=ZERO, one=None):
    one = LaurentPoly.const(1) if one is None else one
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def transpose(m):
    return [list(col) for col in zip(*m)] if m else []


def mat_mul(a, b, zero=ZERO):
    if not a:
        return []
    inner = len(b)
    ncols = len(b[0]) if b else 0
    out = []
    for row in a:
        nz = [(k, x) for k, x in enumerate(row) if x]
        out_row = []
        for j in range(ncols):
            s = zero
            for k, x in nz:
                y = b[k][j]
                if y:
                    s = s + x * y
            out_row.append(s)
        out.append(out_row)
    assert all(len(r) == inner for r in a)
    return out


def mat_vec(a, v, zero=ZERO):
    out = []
    for row in a:
        s = zero
        for x, y in zip(row, v):
            if x and y:
                s = s + x * y
        out.append(s)
    return out


def mat_bar(m):
    return [[x.bar() for x in row] for row in m]


def kron(a, b):
    """Kronecker product, rows/cols ordered (i, j) -> i * len(b) + j."""
    out = []
    for ra in a:
        for rb in b:
            out.append([x * y for x in ra for y in rb])
    return out


def rref(m, ncols: int | None = None):
    """Reduced row echelon form over Q(q).

    Only the first ``ncols`` columns are used for pivoting (the rest ride
    along, e.g. an augmented right-hand side).  Returns (rows, pivots).
    """
    rows = [list(r) for r in to_rat(m)]
    if not rows:
        return rows, []
    width = len(rows[0])
    ncols = width if ncols is None else ncols
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        best = None
        for i in range(r, len(rows)):
            x = rows[i][c]
            if x and (best is None or _size(x) < _size(rows[best][c])):
                best = i
        if best is None:
            continue
        rows[r], rows[best] = rows[best], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [x * inv if x else x for x in rows[r]]
        piv = rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y if y else x for x, y in zip(rows[i], piv)]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(m) -> int:
    if not m or not m[0]:
        return 0
    return len(rref(m)[1])


def solve(a, b, *, unique: bool = True):
    """Solve ``a x = b`` exactly; ``b`` is a matrix (list of rows).

    Raises ``SingularSystemError`` when the system is inconsistent, or when
    ``unique`` is requested and the solution is not unique.  For a
    non-unique system free variables are set to zero.
    """
    n = len(a[0]) if a else 0
    k = len(b[0]) if b else 0
    aug = [list(ra) + list(rb) for ra, rb in zip(a, b)]
    rows, pivots = rref(aug, n)
    for row in rows[len(pivots):]:
        if any(row[n:]):
            raise SingularSystemError("inconsistent linear system")
    if unique and len(pivots) < n:
        raise SingularSystemError(f"rank {len(pivots)} < {n}: solution not unique")
    x = [[RAT_ZERO] * k for _ in range(n)]
    for r, c in enumerate(pivots):
        x[c] = rows[r][n:]
    return x


def solve_vec(a, v, *, unique: bool = True):
    return [row[0] for row in solve(a, [[x] for x in v], unique=unique)]


def inverse(a):
    n = len(a)
    return solve(a, identity(n, RAT_ZERO, ONE_RAT))


def nullspace(m):
    """Basis of the right kernel of ``m`` over Q(q)."""
    if not m:
        return []
    n = len(m[0])
    rows, pivots = rref(m)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [RAT_ZERO] * n
        v[f] = ONE_RAT
        for r, c in enumerate(pivots):
            v[c] = -rows[r][f]
        basis.append(v)
    return basis


def independent_columns(m) -> list[int]:
    """Indices of a maximal set of independent columns, greedily left to right."""
    if not m:
        return []
    return rref(m)[1]


def unitriangular_inverse(m, order: list[int]):
    """Inverse of a matrix that is unitriangular once rows/cols follow ``order``.

    ``order`` lists indices from smallest to largest; entry (j, k) may be
    nonzero only when j precedes k.  Works over any ring of entries.
    """
    n = len(m)
    pos = {k: t for t, k in enumerate(order)}
    inv = [[ZERO] * n for _ in range(n)]
    for k in order:
        # column k of inverse: x with m x = e_k
        x = [ZERO] * n
        x[k] = LaurentPoly.const(1)
        for j in reversed(order[: pos[k]]):
            s = ZERO
            for t in order[pos[j] + 1: pos[k] + 1]:
                if m[j][t] and x[t]:
                    s = s + m[j][t] * x[t]
            x[j] = -s
        for j in range(n):
            inv[j][k] = x[j]
    return inv


def determinant(m):
    """Determinant over Q(q) by elimination."""
    rows = [list(r) for r in to_rat(m)]
    n = len(rows)
    det = ONE_RAT
    for c in range(n):
        piv = next((i for i in range(c, n) if rows[i][c]), None)
        if piv is None:
            return RAT_ZERO
        if piv != c:
            rows[c], rows[piv] = rows[piv], rows[c]
            det = -det
        p = rows[c][c]
        det = det * p
        inv = p.inverse()
        for i in range(c + 1, n):
            if rows[i][c]:
                f = rows[i][c] * inv
                rows[i] = [x - f * y if y else x for x, y in zip(rows[i], rows[c])]
    return det
