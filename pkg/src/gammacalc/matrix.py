"""Exact linear algebra over the rational-function field.

Matrices are tuples of tuples of :class:`RationalFn`.  Determinants are
computed fraction-free: each row's denominators are cleared to obtain a
Laurent-polynomial matrix, which is reduced by Bareiss elimination (exact
single-step divisions, no gcd growth), and the tracked row factors are
divided back out.  Inverses for the small blocks the engine needs go
through the adjugate/determinant route; larger matrices fall back to
exact Gauss-Jordan elimination.
"""

from __future__ import annotations

from .polyalg import (
    AlgebraError,
    LaurentPoly,
    RationalFn,
    RF_ONE,
    RF_ZERO,
    poly_gcd,
)

Matrix = tuple[tuple[RationalFn, ...], ...]


class SingularMatrix(AlgebraError):
    """Matrix inverse requested for a singular matrix."""


def identity(n: int) -> Matrix:
    return tuple(
        tuple(RF_ONE if i == j else RF_ZERO for j in range(n)) for i in range(n)
    )


def from_rows(rows) -> Matrix:
    return tuple(tuple(row) for row in rows)


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_neg(a: Matrix) -> Matrix:
    return tuple(tuple(-x for x in row) for row in a)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if a and b and len(a[0]) != len(b):
        raise AlgebraError("matrix dimension mismatch")
    out = []
    for row in a:
        new_row = []
        for j in range(len(b[0]) if b else 0):
            acc = RF_ZERO
            for k, x in enumerate(row):
                if x.is_zero() or b[k][j].is_zero():
                    continue
                acc = acc + x * b[k][j]
            new_row.append(acc)
        out.append(tuple(new_row))
    return tuple(out)


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a)) if a else ()


def conj_transpose(a: Matrix) -> Matrix:
    """Transpose with every entry's variables sent to their inverses."""
    return tuple(
        tuple(a[j][i].conjugate() for j in range(len(a)))
        for i in range(len(a[0]) if a else 0)
    )


def mat_eq(a: Matrix, b: Matrix) -> bool:
    return a == b


def _row_cleared(row) -> tuple[list[LaurentPoly], LaurentPoly]:
    """Multiply a RationalFn row by the lcm of its denominators; return the
    Laurent-polynomial row and the factor used."""
    lcm = LaurentPoly.one()
    for x in row:
        if x.den.is_one():
            continue
        g = poly_gcd(lcm, x.den)
        lcm = lcm * (x.den.divide_exact(g) if not g.is_one() else x.den)
    cleared = [x.num * lcm.divide_exact(x.den) for x in row]
    return cleared, lcm


def det(a: Matrix) -> RationalFn:
    """Determinant by fraction-free Bareiss elimination."""
    n = len(a)
    if n == 0:
        return RF_ONE
    if n == 1:
        return a[0][0]
    rows = []
    factor = RF_ONE
    for row in a:
        cleared, lcm = _row_cleared(row)
        rows.append(cleared)
        if not lcm.is_one():
            factor = factor * RationalFn.make(LaurentPoly.one(), lcm)
    sign = 1
    prev = LaurentPoly.one()
    for k in range(n - 1):
        if rows[k][k].is_zero():
            for i in range(k + 1, n):
                if not rows[i][k].is_zero():
                    rows[k], rows[i] = rows[i], rows[k]
                    sign = -sign
                    break
            else:
                return RF_ZERO
        pivot = rows[k][k]
        for i in range(k + 1, n):
            rik = rows[i][k]
            for j in range(k + 1, n):
                num = pivot * rows[i][j] - rik * rows[k][j]
                rows[i][j] = num.divide_exact(prev)
            rows[i][k] = LaurentPoly.zero()
        prev = pivot
    d = RationalFn.make(rows[n - 1][n - 1])
    if sign < 0:
        d = -d
    return d * factor


def solve(a: Matrix, b: Matrix) -> Matrix:
    """Solve A X = B exactly (A square, invertible): fraction-free forward
    elimination on the augmented matrix, then back substitution in the
    fraction field.  Raises SingularMatrix when A is singular."""
    n = len(a)
    if n == 0:
        return ()
    m = len(b[0]) if b else 0
    rows = []
    for ra, rb in zip(a, b):
        cleared, _ = _row_cleared(tuple(ra) + tuple(rb))
        rows.append(cleared)
    prev = LaurentPoly.one()
    for k in range(n - 1):
        if rows[k][k].is_zero():
            for i in range(k + 1, n):
                if not rows[i][k].is_zero():
                    rows[k], rows[i] = rows[i], rows[k]
                    break
            else:
                raise SingularMatrix("matrix is singular")
        pivot = rows[k][k]
        for i in range(k + 1, n):
            rik = rows[i][k]
            for j in range(k + 1, n + m):
                if rik.is_zero():
                    num = pivot * rows[i][j]
                else:
                    num = pivot * rows[i][j] - rik * rows[k][j]
                rows[i][j] = num.divide_exact(prev)
            rows[i][k] = LaurentPoly.zero()
        prev = pivot
    if rows[n - 1][n - 1].is_zero():
        raise SingularMatrix("matrix is singular")
    x: list[list[RationalFn]] = [[RF_ZERO] * m for _ in range(n)]
    for i in range(n - 1, -1, -1):
        piv = RationalFn.make(rows[i][i])
        for j in range(m):
            acc = RationalFn.make(rows[i][n + j])
            for k in range(i + 1, n):
                if rows[i][k].is_zero() or x[k][j].is_zero():
                    continue
                acc = acc - RationalFn.make(rows[i][k]) * x[k][j]
            x[i][j] = acc / piv
    return tuple(tuple(row) for row in x)


def _minor(a: Matrix, i: int, j: int) -> Matrix:
    return tuple(
        tuple(x for cj, x in enumerate(row) if cj != j)
        for ri, row in enumerate(a)
        if ri != i
    )


def inverse(a: Matrix) -> Matrix:
    """Exact inverse; raises SingularMatrix when det == 0."""
    n = len(a)
    if n == 0:
        return ()
    if n == 1:
        if a[0][0].is_zero():
            raise SingularMatrix("matrix is singular")
        return ((a[0][0].inverse(),),)
    return solve(a, identity(n))


def _gauss_jordan(a: Matrix) -> Matrix:
    n = len(a)
    work = [list(row) + [RF_ONE if i == j else RF_ZERO for j in range(n)]
            for i, row in enumerate(a)]
    for col in range(n):
        pivot_row = None
        for i in range(col, n):
            if not work[i][col].is_zero():
                pivot_row = i
                break
        if pivot_row is None:
            raise SingularMatrix("matrix is singular")
        work[col], work[pivot_row] = work[pivot_row], work[col]
        inv_p = work[col][col].inverse()
        work[col] = [x * inv_p for x in work[col]]
        for i in range(n):
            if i == col or work[i][col].is_zero():
                continue
            f = work[i][col]
            work[i] = [x - f * y for x, y in zip(work[i], work[col])]
    return tuple(tuple(row[n:]) for row in work)
