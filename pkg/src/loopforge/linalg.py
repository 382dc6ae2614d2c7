"""Dense square matrices and Gaussian elimination over any Field.

Exact fields use first-nonzero pivoting (pivot magnitude is irrelevant when
arithmetic is exact); float fields use partial pivoting by magnitude.
"""

from __future__ import annotations

from itertools import product
from typing import Iterable, List, Sequence, Tuple

from .errors import DimensionMismatch, FieldMismatch, SingularMatrix
from .fields import Field, FieldElement

Vector = Tuple[FieldElement, ...]

EIG_ONE_EPS = 1e-9  # float-field tolerance for |det(S - I)| after equilibration


class SquareMatrix:
    """Immutable n x n matrix with entries in a single field."""

    __slots__ = ("field", "n", "rows")

    def __init__(self, field: Field, rows):
        self.field = field
        self.rows = tuple(
            tuple(field.element(x) for x in row) for row in rows
        )
        self.n = len(self.rows)
        for row in self.rows:
            if len(row) != self.n:
                raise DimensionMismatch("matrix is not square")

    @classmethod
    def identity(cls, field: Field, n: int) -> "SquareMatrix":
        one, zero = field.one(), field.zero()
        return cls(field, [[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def scalar(cls, field: Field, n: int, value) -> "SquareMatrix":
        v, zero = field.element(value), field.zero()
        return cls(field, [[v if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, field: Field, values) -> "SquareMatrix":
        vals = [field.element(v) for v in values]
        zero = field.zero()
        n = len(vals)
        return cls(field, [[vals[i] if i == j else zero for j in range(n)] for i in range(n)])

    def _check(self, other):
        if not isinstance(other, SquareMatrix):
            raise TypeError("expected a SquareMatrix")
        if other.field != self.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")
        if other.n != self.n:
            raise DimensionMismatch(f"{self.n} vs {other.n}")

    def __mul__(self, other):
        self._check(other)
        n = self.n
        brows = other.rows
        out = []
        for i in range(n):
            arow = self.rows[i]
            orow = []
            for j in range(n):
                acc = arow[0] * brows[0][j]
                for k in range(1, n):
                    acc = acc + arow[k] * brows[k][j]
                orow.append(acc)
            out.append(orow)
        return SquareMatrix(self.field, out)

    def __add__(self, other):
        self._check(other)
        return SquareMatrix(
            self.field,
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)],
        )

    def __sub__(self, other):
        self._check(other)
        return SquareMatrix(
            self.field,
            [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)],
        )

    def __neg__(self):
        return SquareMatrix(self.field, [[-a for a in row] for row in self.rows])

    def apply(self, vec: Sequence[FieldElement]) -> Vector:
        """Matrix-vector product."""
        if len(vec) != self.n:
            raise DimensionMismatch(f"vector length {len(vec)} vs n={self.n}")
        out = []
        for row in self.rows:
            acc = row[0] * vec[0]
            for k in range(1, self.n):
                acc = acc + row[k] * vec[k]
            out.append(acc)
        return tuple(out)

    def transpose(self) -> "SquareMatrix":
        return SquareMatrix(
            self.field, [[self.rows[j][i] for j in range(self.n)] for i in range(self.n)]
        )

    def inv(self) -> "SquareMatrix":
        return mat_inv(self)

    def det(self) -> FieldElement:
        return det(self)

    def is_identity(self) -> bool:
        one, zero = self.field.one(), self.field.zero()
        return all(
            self.rows[i][j] == (one if i == j else zero)
            for i in range(self.n)
            for j in range(self.n)
        )

    def key(self) -> tuple:
        """Row-major tuple of canonical entry encodings; dedup/hash key."""
        enc = self.field.enc
        return tuple(enc(x.val) for row in self.rows for x in row)

    def __eq__(self, other):
        if not isinstance(other, SquareMatrix):
            return NotImplemented
        return self.field == other.field and self.n == other.n and self.key() == other.key()

    def __hash__(self):
        return hash((self.n, self.key()))

    def __repr__(self):
        body = "; ".join(
            " ".join(self.field.format(x.val) for x in row) for row in self.rows
        )
        return f"[{body}]"


def mat_mul(a: SquareMatrix, b: SquareMatrix) -> SquareMatrix:
    return a * b


def _pivot_row(rows, col, start, field):
    """Index of the pivot row for `col`, or None if the column is dead."""
    if field.is_exact:
        for i in range(start, len(rows)):
            if not rows[i][col].is_zero():
                return i
        return None
    best, best_mag = None, 0.0
    for i in range(start, len(rows)):
        m = field.mag(rows[i][col].val)
        if m > best_mag:
            best, best_mag = i, m
    return best


def _float_singular(field, rows, piv_val, col_start):
    # Relative test keeps near-singular float systems from sneaking through.
    scale = max(
        (field.mag(x.val) for row in rows for x in row[col_start:]), default=0.0
    )
    return field.mag(piv_val.val) <= 1e-13 * max(scale, 1.0)


def mat_inv(m: SquareMatrix) -> SquareMatrix:
    """Exact inverse by Gauss-Jordan on [M | I]."""
    field, n = m.field, m.n
    aug = [list(row) + list(ident_row) for row, ident_row in
           zip(m.rows, SquareMatrix.identity(field, n).rows)]
    for col in range(n):
        piv = _pivot_row(aug, col, col, field)
        if piv is None or aug[piv][col].is_zero():
            raise SingularMatrix(f"matrix is singular at column {col}")
        if not field.is_exact and _float_singular(field, aug, aug[piv][col], col):
            raise SingularMatrix(f"matrix is numerically singular at column {col}")
        aug[col], aug[piv] = aug[piv], aug[col]
        pinv = aug[col][col].inv()
        aug[col] = [x * pinv for x in aug[col]]
        for r in range(n):
            if r == col:
                continue
            f = aug[r][col]
            if f.is_zero():
                continue
            aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return SquareMatrix(field, [row[n:] for row in aug])


def det(m: SquareMatrix) -> FieldElement:
    """Determinant via row reduction with swap-sign tracking."""
    field, n = m.field, m.n
    rows = [list(r) for r in m.rows]
    sign_flip = False
    acc = field.one()
    for col in range(n):
        piv = _pivot_row(rows, col, col, field)
        if piv is None or rows[piv][col].is_zero():
            return field.zero()
        if piv != col:
            rows[col], rows[piv] = rows[piv], rows[col]
            sign_flip = not sign_flip
        pval = rows[col][col]
        acc = acc * pval
        pinv = pval.inv()
        for r in range(col + 1, n):
            f = rows[r][col] * pinv
            if f.is_zero():
                continue
            rows[r] = [x - f * y for x, y in zip(rows[r], rows[col])]
    return -acc if sign_flip else acc


def rref(rows: List[List[FieldElement]], field: Field):
    """In-place reduced row echelon form; returns pivot column list."""
    if not rows:
        return []
    width = len(rows[0])
    pivots = []
    r = 0
    for col in range(width):
        if r >= len(rows):
            break
        piv = _pivot_row(rows, col, r, field)
        if piv is None or rows[piv][col].is_zero():
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pinv = rows[r][col].inv()
        rows[r] = [x * pinv for x in rows[r]]
        for i in range(len(rows)):
            if i == r:
                continue
            f = rows[i][col]
            if f.is_zero():
                continue
            rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    return pivots


def kernel_basis(rows_or_matrix, field: Field = None, width: int = None) -> List[Vector]:
    """Basis of the right nullspace of a (possibly rectangular) row stack.

    Accepts a SquareMatrix or an iterable of row vectors.  An empty row
    stack (with explicit width) has the full space as kernel.  Returns []
    for a trivial kernel; basis vectors have a 1 in their free coordinate.
    """
    if isinstance(rows_or_matrix, SquareMatrix):
        field = rows_or_matrix.field
        width = rows_or_matrix.n
        rows = [list(r) for r in rows_or_matrix.rows]
    else:
        rows = [list(r) for r in rows_or_matrix]
        if field is None:
            raise ValueError("field required for a raw row stack")
        if rows:
            width = len(rows[0])
        elif width is None:
            raise ValueError("width required for an empty row stack")
    pivots = rref(rows, field)
    pivot_set = set(pivots)
    free = [c for c in range(width) if c not in pivot_set]
    one, zero = field.one(), field.zero()
    basis = []
    for fc in free:
        vec = [zero] * width
        vec[fc] = one
        for r, pc in enumerate(pivots):
            vec[pc] = -rows[r][fc]
        basis.append(tuple(vec))
    return basis


def rank_of_rows(rows: Iterable[Sequence[FieldElement]], field: Field) -> int:
    rows = [list(r) for r in rows]
    return len(rref(rows, field))


def has_eigenvalue_one(s: SquareMatrix, eps: float = EIG_ONE_EPS) -> bool:
    """Whether det(S - I) vanishes; float fields use |det| <= eps after
    scaling each row of S - I by its largest entry."""
    field = s.field
    diff = s - SquareMatrix.identity(field, s.n)
    if field.is_exact:
        return det(diff).is_zero()
    rows = []
    for row in diff.rows:
        scale = max(field.mag(x.val) for x in row)
        if scale == 0.0:
            return True  # a zero row: singular
        inv = field.element(1.0 / scale) if field.kind == "real" else field.element(complex(1.0 / scale))
        rows.append([x * inv for x in row])
    d = det(SquareMatrix(field, rows))
    return field.mag(d.val) <= eps


# -- vector helpers ------------------------------------------------------

def zero_vector(field: Field, n: int) -> Vector:
    z = field.zero()
    return tuple(z for _ in range(n))

def unit_vector(field: Field, n: int, i: int, scale=None) -> Vector:
    z = field.zero()
    s = field.one() if scale is None else field.element(scale)
    return tuple(s if j == i else z for j in range(n))

def vector(field: Field, values) -> Vector:
    return tuple(field.element(v) for v in values)

def vec_add(a: Vector, b: Vector) -> Vector:
    return tuple(x + y for x, y in zip(a, b))

def vec_sub(a: Vector, b: Vector) -> Vector:
    return tuple(x - y for x, y in zip(a, b))

def vec_neg(a: Vector) -> Vector:
    return tuple(-x for x in a)

def vec_scale(c: FieldElement, a: Vector) -> Vector:
    return tuple(c * x for x in a)

def vec_is_zero(a: Vector) -> bool:
    return all(x.is_zero() for x in a)

def vec_key(a: Vector) -> tuple:
    return tuple(x.field.enc(x.val) for x in a)

def vec_sort_key(a: Vector) -> tuple:
    return tuple(x.field.sort_key(x.val) for x in a)

def format_vector(a: Vector) -> str:
    return ";".join(x.field.format(x.val) for x in a)

def iter_vectors(field: Field, n: int):
    """All vectors of K^n in lexicographic canonical order (finite K)."""
    elems = field.elements()
    for combo in product(elems, repeat=n):
        yield tuple(combo)
