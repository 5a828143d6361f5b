"""Dense exact linear algebra over a rational function field.

Matrices are plain lists of lists of ``RatFun``; all routines are pure and
use Gaussian elimination with first-nonzero pivoting in the given row
order, so results are deterministic.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ShapeMismatch
from .field import FieldSpec, RatFun

Matrix = list


def zeros(spec: FieldSpec, rows: int, cols: int) -> Matrix:
    z = RatFun.zero(spec)
    return [[z for _ in range(cols)] for _ in range(rows)]


def identity(spec: FieldSpec, n: int) -> Matrix:
    o = RatFun.one(spec)
    z = RatFun.zero(spec)
    return [[o if i == j else z for j in range(n)] for i in range(n)]


def shape(a: Matrix) -> tuple[int, int]:
    return len(a), len(a[0]) if a else 0


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    if shape(a) != shape(b):
        raise ShapeMismatch("matrix addition shape mismatch")
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    if shape(a) != shape(b):
        raise ShapeMismatch("matrix subtraction shape mismatch")
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_neg(a: Matrix) -> Matrix:
    return [[-x for x in row] for row in a]


def mat_scale(c: RatFun, a: Matrix) -> Matrix:
    return [[c * x for x in row] for row in a]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    m, n = shape(a)
    n2, k = shape(b)
    if n != n2:
        raise ShapeMismatch("matrix product shape mismatch")
    out = []
    for i in range(m):
        row = []
        for j in range(k):
            acc = None
            for s in range(n):
                x = a[i][s]
                y = b[s][j]
                if x.is_zero() or y.is_zero():
                    continue
                term = x * y
                acc = term if acc is None else acc + term
            row.append(acc if acc is not None else RatFun.zero(a[i][0].spec))
        out.append(row)
    return out


def mat_vec(a: Matrix, v: list) -> list:
    return [row_col for [row_col] in mat_mul(a, [[x] for x in v])]


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)]


def kron(a: Matrix, b: Matrix) -> Matrix:
    ma, na = shape(a)
    mb, nb = shape(b)
    out = []
    for i in range(ma):
        for k in range(mb):
            row = []
            for j in range(na):
                for l in range(nb):
                    row.append(a[i][j] * b[k][l])
            out.append(row)
    return out


def block(blocks: list[list[Matrix]]) -> Matrix:
    out = []
    for brow in blocks:
        height = len(brow[0])
        for r in range(height):
            row = []
            for b in brow:
                row.extend(b[r])
            out.append(row)
    return out


def entrywise(fn, a: Matrix) -> Matrix:
    return [[fn(x) for x in row] for row in a]


def is_zero_matrix(a: Matrix) -> bool:
    return all(x.is_zero() for row in a for x in row)


def mat_eq(a: Matrix, b: Matrix) -> bool:
    return shape(a) == shape(b) and all(
        x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb)
    )


def _eliminate(a: Matrix) -> tuple[Matrix, list[int]]:
    """Row echelon form with first-nonzero pivoting; returns (rows, pivot cols)."""
    rows = [list(r) for r in a]
    m, n = shape(rows)
    pivots = []
    r = 0
    for c in range(n):
        pivot = None
        for i in range(r, m):
            if not rows[i][c].is_zero():
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [inv * x for x in rows[r]]
        for i in range(m):
            if i != r and not rows[i][c].is_zero():
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return rows, pivots


def rank(a: Matrix) -> int:
    if not a or not a[0]:
        return 0
    _, pivots = _eliminate(a)
    return len(pivots)


def solve(a: Matrix, b: list) -> list | None:
    """One solution of a x = b (free variables set to zero), or None."""
    m, n = shape(a)
    if len(b) != m:
        raise ShapeMismatch("rhs length mismatch")
    aug = [list(ra) + [bv] for ra, bv in zip(a, b)]
    rows, pivots = _eliminate(aug)
    spec = b[0].spec if b else a[0][0].spec
    for r, c in enumerate(pivots):
        if c == n:
            return None
    x = [RatFun.zero(spec) for _ in range(n)]
    for r, c in enumerate(pivots):
        if c < n:
            x[c] = rows[r][n]
    # rows beyond pivots are zero rows in echelon form
    return x


def solve_or_residual(a: Matrix, b: list) -> tuple[list, list]:
    """Best-effort solution of a x = b plus the residual b - a x.

    The solution is obtained from the consistent pivot rows with free
    variables zero, so the residual is zero exactly when the system is
    solvable.
    """
    m, n = shape(a)
    aug = [list(ra) + [bv] for ra, bv in zip(a, b)]
    rows, pivots = _eliminate(aug)
    spec = b[0].spec if b else a[0][0].spec
    x = [RatFun.zero(spec) for _ in range(n)]
    for r, c in enumerate(pivots):
        if c < n:
            x[c] = rows[r][n]
    ax = mat_vec(a, x)
    residual = [bv - av for bv, av in zip(b, ax)]
    return x, residual


def solve_matrix(a: Matrix, b: Matrix) -> Matrix | None:
    """Solve a X = b column by column; None if any column is inconsistent."""
    cols = []
    bt = transpose(b)
    for col in bt:
        x = solve(a, list(col))
        if x is None:
            return None
        cols.append(x)
    return transpose(cols)


def inverse(a: Matrix) -> Matrix:
    m, n = shape(a)
    if m != n:
        raise ShapeMismatch("only square matrices invert")
    spec = a[0][0].spec
    aug = [list(ra) + list(ri) for ra, ri in zip(a, identity(spec, n))]
    rows, pivots = _eliminate(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in rows]


def nullspace(a: Matrix) -> list[list]:
    """Basis of the right kernel."""
    m, n = shape(a)
    spec = a[0][0].spec
    rows, pivots = _eliminate(a)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [RatFun.zero(spec) for _ in range(n)]
        v[f] = RatFun.one(spec)
        for r, c in enumerate(pivots):
            v[c] = -rows[r][f]
        basis.append(v)
    return basis


# --- rational (constant) elimination for the horizontal solver ---------------


def fraction_nullspace(rows: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    """Basis of the kernel of a matrix over Q, first-nonzero pivoting."""
    mat = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, len(mat)):
            if mat[i][c]:
                pivot = i
                break
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [inv * x for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for rr, c in enumerate(pivots):
            v[c] = -mat[rr][f]
        basis.append(v)
    return basis
