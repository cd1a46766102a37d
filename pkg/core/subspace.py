"""
Canonical subspaces of F^N and of the matrix space M_n

Bases are kept in reduced row echelon form over sparse rows, so two spans are
equal exactly when their stored rows are equal (exact mode). Matrices are
vectorized row-major. Every subspace of a finite-dimensional space is closed,
so no closure step is ever needed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from core.errors import DimensionMismatchError, ScalarModeError, ShapeMismatchError
from core.matrix import Matrix, check_uniform
from core.scalars import EXACT, ScalarField

logger = logging.getLogger(__name__)

SparseRow = Dict[int, Any]
FrozenRow = Tuple[Tuple[int, Any], ...]


class _Echelon:
    """Mutable reduced echelon builder used while a span is assembled"""

    def __init__(self, field: ScalarField):
        self.field = field
        self.rows: Dict[int, SparseRow] = {}

    def _prune(self, row: SparseRow) -> SparseRow:
        is_zero = self.field.is_zero
        return {k: v for k, v in row.items() if not is_zero(v)}

    def reduce(self, vector: SparseRow) -> SparseRow:
        """Remainder of vector after eliminating every pivot column"""
        v = dict(vector)
        for pivot, row in self.rows.items():
            coeff = v.get(pivot)
            if coeff is None or self.field.is_zero(coeff):
                continue
            for k, x in row.items():
                v[k] = v.get(k, self.field.zero) - coeff * x
            v.pop(pivot, None)
        return self._prune(v)

    def insert(self, vector: SparseRow) -> bool:
        """Add a vector; return True when the span grew"""
        v = self.reduce(vector)
        if not v:
            return False
        pivot = min(v)
        lead = v[pivot]
        v = {k: x / lead for k, x in v.items()}
        v[pivot] = self.field.one
        for key, row in list(self.rows.items()):
            coeff = row.get(pivot)
            if coeff is None:
                continue
            updated = dict(row)
            for k, x in v.items():
                updated[k] = updated.get(k, self.field.zero) - coeff * x
            updated.pop(pivot, None)
            updated[key] = self.field.one
            self.rows[key] = self._prune(updated)
        self.rows[pivot] = v
        return True

    def freeze(self) -> Tuple[FrozenRow, ...]:
        return tuple(tuple(sorted(self.rows[p].items())) for p in sorted(self.rows))


def _sparse(vector: Sequence[Any], field: ScalarField) -> SparseRow:
    coerce = field.coerce
    return {k: coerce(x) for k, x in enumerate(vector) if not field.is_zero(coerce(x))}


@dataclass(frozen=True)
class VectorSpan:
    """Subspace of F^length with a canonical reduced echelon basis"""

    length: int
    rows: Tuple[FrozenRow, ...] = ()
    field: ScalarField = EXACT

    @classmethod
    def from_sparse(cls, length: int, vectors: Iterable[SparseRow],
                    field: ScalarField = EXACT) -> 'VectorSpan':
        builder = _Echelon(field)
        for vector in vectors:
            if any(k < 0 or k >= length for k in vector):
                raise ShapeMismatchError(f"Vector index outside 0..{length - 1}")
            builder.insert(vector)
            if len(builder.rows) == length:
                break
        return cls(length, builder.freeze(), field)

    @classmethod
    def from_vectors(cls, length: int, vectors: Iterable[Sequence[Any]],
                     field: ScalarField = EXACT) -> 'VectorSpan':
        sparse_vectors = []
        for vector in vectors:
            if len(vector) != length:
                raise ShapeMismatchError(f"Expected vectors of length {length}, got {len(vector)}")
            sparse_vectors.append(_sparse(vector, field))
        return cls.from_sparse(length, sparse_vectors, field)

    @classmethod
    def zero(cls, length: int, field: ScalarField = EXACT) -> 'VectorSpan':
        return cls(length, (), field)

    @classmethod
    def full(cls, length: int, field: ScalarField = EXACT) -> 'VectorSpan':
        return cls(length, tuple(((k, field.one),) for k in range(length)), field)

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def pivots(self) -> Tuple[int, ...]:
        return tuple(row[0][0] for row in self.rows)

    def sparse_rows(self) -> List[SparseRow]:
        return [dict(row) for row in self.rows]

    def dense_rows(self) -> List[List[Any]]:
        out = []
        for row in self.rows:
            dense = [self.field.zero] * self.length
            for k, x in row:
                dense[k] = x
            out.append(dense)
        return out

    def _builder(self) -> _Echelon:
        builder = _Echelon(self.field)
        for row in self.rows:
            builder.rows[row[0][0]] = dict(row)
        return builder

    def _check(self, other: 'VectorSpan'):
        if self.length != other.length:
            raise DimensionMismatchError(f"Ambient lengths differ: {self.length} vs {other.length}")
        if self.field.mode != other.field.mode:
            raise ScalarModeError("Mixed scalar modes")

    def contains_sparse(self, vector: SparseRow) -> bool:
        return not self._builder().reduce(vector)

    def contains(self, vector: Sequence[Any]) -> bool:
        return self.contains_sparse(_sparse(vector, self.field))

    def coordinates(self, vector: Sequence[Any]) -> Optional[List[Any]]:
        """Coefficients on the canonical basis, or None when vector is outside"""
        if not self.contains(vector):
            return None
        return [vector[p] for p in self.pivots]

    def extend(self, vectors: Iterable[SparseRow]) -> 'VectorSpan':
        builder = self._builder()
        for vector in vectors:
            builder.insert(vector)
            if len(builder.rows) == self.length:
                break
        return VectorSpan(self.length, builder.freeze(), self.field)

    def is_subspace_of(self, other: 'VectorSpan') -> bool:
        self._check(other)
        if self.dim > other.dim:
            return False
        builder = other._builder()
        return all(not builder.reduce(dict(row)) for row in self.rows)

    def equals(self, other: 'VectorSpan') -> bool:
        self._check(other)
        if self.field.is_exact():
            return self.rows == other.rows
        return self.dim == other.dim and self.is_subspace_of(other)

    def sum(self, other: 'VectorSpan') -> 'VectorSpan':
        self._check(other)
        return self.extend(dict(row) for row in other.rows)

    def intersect(self, other: 'VectorSpan') -> 'VectorSpan':
        """Kernel of the stacked coordinate systems [V | -W]"""
        self._check(other)
        if self.dim == 0 or other.dim == 0:
            return VectorSpan.zero(self.length, self.field)
        p = self.dim
        equations: Dict[int, SparseRow] = {}
        for i, row in enumerate(self.rows):
            for k, x in row:
                equations.setdefault(k, {})[i] = x
        for j, row in enumerate(other.rows):
            for k, x in row:
                equations.setdefault(k, {})[p + j] = -x
        solutions = kernel(equations.values(), p + other.dim, self.field)
        members = []
        for solution in solutions:
            vector: SparseRow = {}
            for i, coeff in solution.items():
                if i >= p:
                    continue
                for k, x in self.rows[i]:
                    vector[k] = vector.get(k, self.field.zero) + coeff * x
            members.append(vector)
        return VectorSpan.from_sparse(self.length, members, self.field)

    def annihilator(self) -> 'VectorSpan':
        """All u with sum_k u_k v_k = 0 for every v in the span (bilinear pairing)"""
        return VectorSpan.from_sparse(
            self.length, kernel([dict(row) for row in self.rows], self.length, self.field),
            self.field
        )


def kernel(equations: Iterable[SparseRow], unknowns: int,
           field: ScalarField = EXACT) -> List[SparseRow]:
    """Basis of solutions x in F^unknowns of sum_k row[k] x_k = 0 for every row"""
    builder = _Echelon(field)
    for equation in equations:
        builder.insert(equation)
        if len(builder.rows) == unknowns:
            return []
    pivots = set(builder.rows)
    solutions = []
    for free in range(unknowns):
        if free in pivots:
            continue
        solution = {free: field.one}
        for pivot, row in builder.rows.items():
            coeff = row.get(free)
            if coeff is not None:
                solution[pivot] = -coeff
        solutions.append(solution)
    return solutions


def express(vectors: Sequence[Sequence[Any]], target: Sequence[Any],
            field: ScalarField = EXACT) -> Optional[List[Any]]:
    """Coefficients c with sum_i c_i vectors[i] = target, or None"""
    length = len(target)
    count = len(vectors)
    builder = _Echelon(field)
    for i, vector in enumerate(vectors):
        row = _sparse(vector, field)
        row[length + i] = field.one
        builder.insert(row)
    remainder = builder.reduce(_sparse(target, field))
    if any(k < length for k in remainder):
        return None
    return [-remainder.get(length + i, field.zero) for i in range(count)]


def inverse(matrix: Matrix) -> Matrix:
    """Gauss-Jordan inverse of a square matrix"""
    if not matrix.is_square:
        raise ShapeMismatchError("Only square matrices can be inverted")
    n = matrix.rows
    field = matrix.field
    builder = _Echelon(field)
    for i in range(n):
        row = _sparse(matrix.row(i), field)
        row[n + i] = field.one
        builder.insert(row)
    if any(p not in builder.rows for p in range(n)):
        raise ValueError("Matrix is singular")
    entries = []
    for i in range(n):
        row = builder.rows[i]
        entries.extend(row.get(n + j, field.zero) for j in range(n))
    return Matrix(n, n, tuple(entries), field)


def null_space(matrix: Matrix) -> VectorSpan:
    """Right kernel {x : matrix x = 0}"""
    rows = (_sparse(matrix.row(i), matrix.field) for i in range(matrix.rows))
    return VectorSpan.from_sparse(matrix.cols, kernel(rows, matrix.cols, matrix.field),
                                  matrix.field)


def orthogonal_projection(span: VectorSpan) -> Matrix:
    """Orthogonal projection of F^length onto span, computed as B (B* B)^-1 B*"""
    n = span.length
    field = span.field
    if span.dim == 0:
        return Matrix.zeros(n, n, field)
    basis = Matrix(n, span.dim,
                   tuple(x for row in zip(*span.dense_rows()) for x in row), field)
    gram = basis.adjoint() @ basis
    return basis @ inverse(gram) @ basis.adjoint()


def rank_factorization(matrix: Matrix) -> Tuple[Matrix, Matrix]:
    """Factor matrix = C @ R with C the pivot columns and R the nonzero echelon rows"""
    row_span = VectorSpan.from_vectors(
        matrix.cols, (matrix.row(i) for i in range(matrix.rows)), matrix.field
    )
    pivots = row_span.pivots
    rank = len(pivots)
    if rank == 0:
        raise ValueError("Zero matrix has no rank factorization")
    c = Matrix(matrix.rows, rank,
               tuple(matrix[i, p] for i in range(matrix.rows) for p in pivots), matrix.field)
    r = Matrix(rank, matrix.cols,
               tuple(x for row in row_span.dense_rows() for x in row), matrix.field)
    return c, r


@dataclass(frozen=True)
class OperatorSubspace:
    """Linear subspace of M_n stored as a canonical span of vectorized matrices"""

    n: int
    span: VectorSpan

    @classmethod
    def canonicalize(cls, matrices: Sequence[Matrix], n: Optional[int] = None,
                     field: Optional[ScalarField] = None) -> 'OperatorSubspace':
        matrices = list(matrices)
        if not matrices:
            if n is None:
                raise ShapeMismatchError("Empty family needs an explicit ambient size")
            return cls.zero(n, field or EXACT)
        rows, cols, family_field = check_uniform(matrices)
        if rows != cols:
            raise ShapeMismatchError(f"Operators must be square, got {rows}x{cols}")
        if n is not None and n != rows:
            raise ShapeMismatchError(f"Expected {n}x{n} operators, got {rows}x{rows}")
        if field is not None and field.mode != family_field.mode:
            raise ScalarModeError("Family does not match the requested scalar mode")
        span = VectorSpan.from_sparse(
            rows * rows, (_sparse(m.entries, family_field) for m in matrices), family_field
        )
        return cls(rows, span)

    @classmethod
    def zero(cls, n: int, field: ScalarField = EXACT) -> 'OperatorSubspace':
        return cls(n, VectorSpan.zero(n * n, field))

    @classmethod
    def full(cls, n: int, field: ScalarField = EXACT) -> 'OperatorSubspace':
        return cls(n, VectorSpan.full(n * n, field))

    @classmethod
    def scalars(cls, n: int, field: ScalarField = EXACT) -> 'OperatorSubspace':
        return cls.canonicalize([Matrix.identity(n, field)])

    @property
    def field(self) -> ScalarField:
        return self.span.field

    @property
    def dim(self) -> int:
        return self.span.dim

    def basis(self) -> List[Matrix]:
        return [Matrix(self.n, self.n, tuple(row), self.field) for row in self.span.dense_rows()]

    def _check(self, other: 'OperatorSubspace'):
        if self.n != other.n:
            raise DimensionMismatchError(f"Ambient sizes differ: {self.n} vs {other.n}")

    def contains(self, matrix: Matrix) -> bool:
        if matrix.shape != (self.n, self.n):
            raise ShapeMismatchError(f"Expected {self.n}x{self.n}, got {matrix.shape}")
        return self.span.contains(matrix.entries)

    def is_subspace_of(self, other: 'OperatorSubspace') -> bool:
        self._check(other)
        return self.span.is_subspace_of(other.span)

    def equals(self, other: 'OperatorSubspace') -> bool:
        self._check(other)
        return self.span.equals(other.span)

    def sum(self, other: 'OperatorSubspace') -> 'OperatorSubspace':
        self._check(other)
        return OperatorSubspace(self.n, self.span.sum(other.span))

    def intersect(self, other: 'OperatorSubspace') -> 'OperatorSubspace':
        self._check(other)
        return OperatorSubspace(self.n, self.span.intersect(other.span))

    def multiply(self, other: 'OperatorSubspace') -> 'OperatorSubspace':
        """Span of all products AB with A here and B in other"""
        self._check(other)
        builder = _Echelon(self.field)
        limit = self.n * self.n
        for a in self.basis():
            for b in other.basis():
                builder.insert(_sparse((a @ b).entries, self.field))
                if len(builder.rows) == limit:
                    return OperatorSubspace(self.n, VectorSpan(limit, builder.freeze(), self.field))
        return OperatorSubspace(self.n, VectorSpan(limit, builder.freeze(), self.field))

    def adjoint(self) -> 'OperatorSubspace':
        return OperatorSubspace.canonicalize([m.adjoint() for m in self.basis()],
                                             self.n, self.field)

    def transpose(self) -> 'OperatorSubspace':
        return OperatorSubspace.canonicalize([m.transpose() for m in self.basis()],
                                             self.n, self.field)

    def first_outside(self, other: 'OperatorSubspace') -> Optional[Matrix]:
        """A basis element of this space that other does not contain"""
        for m in self.basis():
            if not other.contains(m):
                return m
        return None


def canonicalize(vectors: Sequence[Matrix], n: Optional[int] = None) -> OperatorSubspace:
    return OperatorSubspace.canonicalize(vectors, n)


def sum_spaces(v: OperatorSubspace, w: OperatorSubspace) -> OperatorSubspace:
    return v.sum(w)


def intersect(v: OperatorSubspace, w: OperatorSubspace) -> OperatorSubspace:
    return v.intersect(w)


def contains(v: OperatorSubspace, a: Matrix) -> bool:
    return v.contains(a)


def equal(v: OperatorSubspace, w: OperatorSubspace) -> bool:
    return v.equals(w)


def multiply_spans(v: OperatorSubspace, w: OperatorSubspace) -> OperatorSubspace:
    return v.multiply(w)


def adjoint_space(v: OperatorSubspace) -> OperatorSubspace:
    return v.adjoint()


def solve_commutation(constraints: Sequence[Tuple[Matrix, Matrix]], n: int,
                      field: ScalarField = EXACT) -> OperatorSubspace:
    """All X in M_n with L X = X R for every constraint pair (L, R)"""
    zero = field.zero
    equations: List[SparseRow] = []
    for left, right in constraints:
        if left.shape != (n, n) or right.shape != (n, n):
            raise ShapeMismatchError(f"Constraint matrices must be {n}x{n}")
        for i in range(n):
            for j in range(n):
                row: SparseRow = {}
                for k in range(n):
                    a = left[i, k]
                    if not field.is_zero(a):
                        row[k * n + j] = row.get(k * n + j, zero) + a
                    b = right[k, j]
                    if not field.is_zero(b):
                        row[i * n + k] = row.get(i * n + k, zero) - b
                row = {k: x for k, x in row.items() if not field.is_zero(x)}
                if row:
                    equations.append(row)
    solutions = kernel(equations, n * n, field)
    logger.debug("commutation system: %d equations, %d-dimensional solution",
                 len(equations), len(solutions))
    return OperatorSubspace(n, VectorSpan.from_sparse(n * n, solutions, field))
