"""Exact linear algebra over K: dense matrices of field elements."""
from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence

from .field import FieldElement, FieldSpec


class Matrix:
    def __init__(self, spec: FieldSpec, rows):
        self.spec = spec
        coerced = []
        for row in rows:
            r = []
            for x in row:
                if isinstance(x, FieldElement):
                    r.append(x)
                else:
                    r.append(spec.from_rational(Fraction(x)))
            coerced.append(tuple(r))
        self.rows = tuple(coerced)
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else 0
        for r in self.rows:
            assert len(r) == self.ncols

    @classmethod
    def identity(cls, spec: FieldSpec, n: int) -> "Matrix":
        return cls(spec, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, spec: FieldSpec, nrows: int, ncols: int) -> "Matrix":
        return cls(spec, [[0] * ncols for _ in range(nrows)])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.spec == other.spec and self.rows == other.rows

    def __add__(self, other):
        assert self.nrows == other.nrows and self.ncols == other.ncols
        return Matrix(self.spec, [[a + b for a, b in zip(r1, r2)]
                                  for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Matrix(self.spec, [[-a for a in r] for r in self.rows])

    def __mul__(self, other):
        if isinstance(other, Matrix):
            assert self.ncols == other.nrows
            cols = list(zip(*other.rows))
            out = []
            for r in self.rows:
                out.append([_dot(self.spec, r, c) for c in cols])
            return Matrix(self.spec, out)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c) -> "Matrix":
        if not isinstance(c, FieldElement):
            c = self.spec.from_rational(Fraction(c))
        return Matrix(self.spec, [[a * c for a in r] for r in self.rows])

    def transpose(self) -> "Matrix":
        return Matrix(self.spec, [list(col) for col in zip(*self.rows)])

    def apply(self, vec: Sequence[FieldElement]) -> List[FieldElement]:
        assert len(vec) == self.ncols
        return [_dot(self.spec, r, vec) for r in self.rows]

    def is_zero(self) -> bool:
        return all(a.is_zero() for r in self.rows for a in r)

    def trace(self) -> FieldElement:
        assert self.nrows == self.ncols
        t = self.spec.zero()
        for i in range(self.nrows):
            t = t + self.rows[i][i]
        return t

    def rref(self):
        """Row-reduced echelon form; returns (matrix, pivot column list)."""
        rows = [list(r) for r in self.rows]
        pivots = []
        pr = 0
        for pc in range(self.ncols):
            pivot_row = None
            for i in range(pr, len(rows)):
                if not rows[i][pc].is_zero():
                    pivot_row = i
                    break
            if pivot_row is None:
                continue
            rows[pr], rows[pivot_row] = rows[pivot_row], rows[pr]
            inv = rows[pr][pc].invert()
            rows[pr] = [a * inv for a in rows[pr]]
            for i in range(len(rows)):
                if i != pr and not rows[i][pc].is_zero():
                    f = rows[i][pc]
                    rows[i] = [a - f * b for a, b in zip(rows[i], rows[pr])]
            pivots.append(pc)
            pr += 1
            if pr == len(rows):
                break
        return Matrix(self.spec, rows), pivots

    def rank(self) -> int:
        _, pivots = self.rref()
        return len(pivots)

    def kernel_basis(self) -> List[List[FieldElement]]:
        """Basis of the null space, one vector per free column."""
        R, pivots = self.rref()
        free = [j for j in range(self.ncols) if j not in pivots]
        basis = []
        for f in free:
            v = [self.spec.zero()] * self.ncols
            v[f] = self.spec.one()
            for r, pc in enumerate(pivots):
                v[pc] = -R.rows[r][f]
            basis.append(v)
        return basis

    def column_pivots(self) -> List[int]:
        """Leading coordinate indices of the column space (echelonized)."""
        _, pivots = self.transpose().rref()
        return pivots

    def charpoly(self) -> List[FieldElement]:
        """Coefficients of det(x*I - A), low-to-high, leading 1."""
        assert self.nrows == self.ncols
        n = self.nrows
        spec = self.spec
        coeffs = [spec.zero()] * n + [spec.one()]
        M = Matrix.identity(spec, n)
        for k in range(1, n + 1):
            M = self * M
            c = -(M.trace() * Fraction(1, k))
            coeffs[n - k] = c
            M = M + Matrix.identity(spec, n).scale(c)
        return coeffs

    def __repr__(self):
        return f"Matrix({self.nrows}x{self.ncols})"


def _dot(spec, xs, ys):
    acc = spec.zero()
    for x, y in zip(xs, ys):
        acc = acc + x * y
    return acc


def eval_poly(coeffs: Sequence[FieldElement], x: FieldElement) -> FieldElement:
    acc = x.spec.zero()
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def poly_deflate(coeffs: Sequence[FieldElement], root: FieldElement):
    """Divide a monic polynomial by (x - root); returns monic quotient.

    Caller must ensure root is an exact root.
    """
    n = len(coeffs) - 1
    out = [None] * n
    acc = coeffs[n]
    for k in range(n - 1, -1, -1):
        out[k] = acc
        acc = coeffs[k] + acc * root
    assert acc.is_zero()
    return out
