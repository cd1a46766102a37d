"""
Dense matrices over a scalar field

Matrices are immutable; every operation returns a new value. Entries are
stored row-major and share one ScalarField.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, List, Sequence, Tuple

from core.errors import ScalarModeError, ShapeMismatchError
from core.scalars import EXACT, ScalarField


@dataclass(frozen=True)
class Matrix:
    rows: int
    cols: int
    entries: Tuple[Any, ...]
    field: ScalarField = EXACT

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ShapeMismatchError(f"Matrix shape must be positive, got {self.rows}x{self.cols}")
        if len(self.entries) != self.rows * self.cols:
            raise ShapeMismatchError(
                f"Expected {self.rows * self.cols} entries, got {len(self.entries)}"
            )

    # construction

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Any]], field: ScalarField = EXACT) -> 'Matrix':
        if not rows:
            raise ShapeMismatchError("Matrix needs at least one row")
        width = len(rows[0])
        if any(len(row) != width for row in rows):
            raise ShapeMismatchError("Ragged rows")
        return cls(len(rows), width, tuple(field.coerce(x) for row in rows for x in row), field)

    @classmethod
    def zeros(cls, rows: int, cols: int = None, field: ScalarField = EXACT) -> 'Matrix':
        cols = rows if cols is None else cols
        return cls(rows, cols, (field.zero,) * (rows * cols), field)

    @classmethod
    def identity(cls, n: int, field: ScalarField = EXACT) -> 'Matrix':
        entries = [field.zero] * (n * n)
        for i in range(n):
            entries[i * n + i] = field.one
        return cls(n, n, tuple(entries), field)

    @classmethod
    def unit(cls, n: int, i: int, j: int, field: ScalarField = EXACT) -> 'Matrix':
        """Matrix unit E_ij in M_n"""
        entries = [field.zero] * (n * n)
        entries[i * n + j] = field.one
        return cls(n, n, tuple(entries), field)

    @classmethod
    def diagonal(cls, values: Sequence[Any], field: ScalarField = EXACT) -> 'Matrix':
        n = len(values)
        entries = [field.zero] * (n * n)
        for i, value in enumerate(values):
            entries[i * n + i] = field.coerce(value)
        return cls(n, n, tuple(entries), field)

    @classmethod
    def from_vector(cls, vector: Sequence[Any], rows: int, cols: int,
                    field: ScalarField = EXACT) -> 'Matrix':
        return cls(rows, cols, tuple(vector), field)

    @classmethod
    def column(cls, vector: Sequence[Any], field: ScalarField = EXACT) -> 'Matrix':
        return cls(len(vector), 1, tuple(vector), field)

    # access

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, index: Tuple[int, int]) -> Any:
        i, j = index
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Tuple[Any, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> List[List[Any]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def vec(self) -> Tuple[Any, ...]:
        """Row-major vectorization"""
        return self.entries

    def support(self) -> List[Tuple[int, int]]:
        return [(k // self.cols, k % self.cols)
                for k, x in enumerate(self.entries) if not self.field.is_zero(x)]

    def is_zero(self) -> bool:
        return all(self.field.is_zero(x) for x in self.entries)

    def equals(self, other: 'Matrix') -> bool:
        """Equality up to the field's zero test"""
        self._check_same_shape(other)
        return all(self.field.is_zero(a - b) for a, b in zip(self.entries, other.entries))

    # arithmetic

    def _check_field(self, other: 'Matrix'):
        if self.field.mode != other.field.mode:
            raise ScalarModeError(f"Cannot mix {self.field.mode} and {other.field.mode} matrices")

    def _check_same_shape(self, other: 'Matrix'):
        self._check_field(other)
        if self.shape != other.shape:
            raise ShapeMismatchError(f"Shapes differ: {self.shape} vs {other.shape}")

    def __add__(self, other: 'Matrix') -> 'Matrix':
        self._check_same_shape(other)
        return Matrix(self.rows, self.cols,
                      tuple(a + b for a, b in zip(self.entries, other.entries)), self.field)

    def __sub__(self, other: 'Matrix') -> 'Matrix':
        self._check_same_shape(other)
        return Matrix(self.rows, self.cols,
                      tuple(a - b for a, b in zip(self.entries, other.entries)), self.field)

    def __neg__(self) -> 'Matrix':
        return Matrix(self.rows, self.cols, tuple(-a for a in self.entries), self.field)

    def scale(self, scalar: Any) -> 'Matrix':
        scalar = self.field.coerce(scalar)
        return Matrix(self.rows, self.cols, tuple(scalar * a for a in self.entries), self.field)

    def __matmul__(self, other: 'Matrix') -> 'Matrix':
        self._check_field(other)
        if self.cols != other.rows:
            raise ShapeMismatchError(f"Cannot multiply {self.shape} by {other.shape}")
        field = self.field
        out = [field.zero] * (self.rows * other.cols)
        p = other.cols
        for i in range(self.rows):
            base = i * self.cols
            for k in range(self.cols):
                a = self.entries[base + k]
                if field.is_zero(a):
                    continue
                other_base = k * p
                for j in range(p):
                    b = other.entries[other_base + j]
                    if not field.is_zero(b):
                        out[i * p + j] = out[i * p + j] + a * b
        return Matrix(self.rows, p, tuple(out), field)

    def adjoint(self) -> 'Matrix':
        conj = self.field.conjugate
        return Matrix(self.cols, self.rows,
                      tuple(conj(self.entries[i * self.cols + j])
                            for j in range(self.cols) for i in range(self.rows)),
                      self.field)

    def transpose(self) -> 'Matrix':
        return Matrix(self.cols, self.rows,
                      tuple(self.entries[i * self.cols + j]
                            for j in range(self.cols) for i in range(self.rows)),
                      self.field)

    def conjugate(self) -> 'Matrix':
        conj = self.field.conjugate
        return Matrix(self.rows, self.cols, tuple(conj(a) for a in self.entries), self.field)

    def kron(self, other: 'Matrix') -> 'Matrix':
        """Kronecker product; index (i, k) maps to i * other.rows + k"""
        self._check_field(other)
        rows, cols = self.rows * other.rows, self.cols * other.cols
        out = [self.field.zero] * (rows * cols)
        for i in range(self.rows):
            for j in range(self.cols):
                a = self.entries[i * self.cols + j]
                if self.field.is_zero(a):
                    continue
                for k in range(other.rows):
                    for l in range(other.cols):
                        out[(i * other.rows + k) * cols + j * other.cols + l] = \
                            a * other.entries[k * other.cols + l]
        return Matrix(rows, cols, tuple(out), self.field)

    def direct_sum(self, other: 'Matrix') -> 'Matrix':
        """Block diagonal self ⊕ other"""
        self._check_field(other)
        rows, cols = self.rows + other.rows, self.cols + other.cols
        out = [self.field.zero] * (rows * cols)
        for i in range(self.rows):
            for j in range(self.cols):
                out[i * cols + j] = self.entries[i * self.cols + j]
        for i in range(other.rows):
            for j in range(other.cols):
                out[(self.rows + i) * cols + self.cols + j] = other.entries[i * other.cols + j]
        return Matrix(rows, cols, tuple(out), self.field)

    def block(self, row_start: int, row_stop: int, col_start: int, col_stop: int) -> 'Matrix':
        return Matrix(row_stop - row_start, col_stop - col_start,
                      tuple(self.entries[i * self.cols + j]
                            for i in range(row_start, row_stop)
                            for j in range(col_start, col_stop)),
                      self.field)

    def embed(self, size: int, row_offset: int, col_offset: int) -> 'Matrix':
        """Place this matrix into a zero size x size matrix at the given offset"""
        out = [self.field.zero] * (size * size)
        for i in range(self.rows):
            for j in range(self.cols):
                out[(row_offset + i) * size + col_offset + j] = self.entries[i * self.cols + j]
        return Matrix(size, size, tuple(out), self.field)

    def trace(self) -> Any:
        total = self.field.zero
        for i in range(min(self.rows, self.cols)):
            total = total + self.entries[i * self.cols + i]
        return total

    def with_field(self, field: ScalarField) -> 'Matrix':
        return Matrix(self.rows, self.cols, tuple(field.coerce(a) for a in self.entries), field)

    def __repr__(self) -> str:
        return f"Matrix({self.rows}x{self.cols}, {self.to_rows()!r})"


def check_uniform(matrices: Iterable[Matrix]) -> Tuple[int, int, ScalarField]:
    """Shape and field shared by a nonempty family, or raise"""
    matrices = list(matrices)
    first = matrices[0]
    for m in matrices[1:]:
        if m.field.mode != first.field.mode:
            raise ScalarModeError("Mixed scalar modes in one family")
        if m.shape != first.shape:
            raise ShapeMismatchError(f"Shapes differ: {first.shape} vs {m.shape}")
    return first.rows, first.cols, first.field


def matrix_units(n: int, field: ScalarField = EXACT) -> List[Matrix]:
    return [Matrix.unit(n, i, j, field) for i in range(n) for j in range(n)]
