"""
Finite-dimensional von Neumann algebras inside M_n

In finite dimensions a unital *-closed matrix algebra is automatically equal
to its double commutant, so generation is a plain fixed-point iteration.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from core.errors import ShapeMismatchError, ValidationError
from core.matrix import Matrix, check_uniform
from core.scalars import EXACT, ScalarField
from core.subspace import OperatorSubspace, solve_commutation

logger = logging.getLogger(__name__)


def _rows(matrix: Optional[Matrix]):
    return None if matrix is None else [[str(x) for x in row] for row in matrix.to_rows()]


@dataclass(frozen=True)
class VonNeumannAlgebra:
    """Unital *-closed subalgebra of M_n with its commutant computed up front"""

    space: OperatorSubspace
    commutant_space: OperatorSubspace = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        space = self.space
        identity = Matrix.identity(space.n, space.field)
        if not space.contains(identity):
            raise ValidationError("Algebra must contain the identity")
        outside = space.adjoint().first_outside(space)
        if outside is not None:
            raise ValidationError("Algebra is not closed under adjoints",
                                  witness={'adjoint': _rows(outside)})
        outside = space.multiply(space).first_outside(space)
        if outside is not None:
            raise ValidationError("Algebra is not closed under products",
                                  witness={'product': _rows(outside)})
        if self.commutant_space is None:
            constraints = [(a, a) for a in space.basis()]
            object.__setattr__(self, 'commutant_space',
                               solve_commutation(constraints, space.n, space.field))

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def field(self) -> ScalarField:
        return self.space.field

    def basis(self) -> List[Matrix]:
        return self.space.basis()

    def contains(self, matrix: Matrix) -> bool:
        return self.space.contains(matrix)

    def commutant(self) -> 'VonNeumannAlgebra':
        return VonNeumannAlgebra(self.commutant_space)

    def equals(self, other: 'VonNeumannAlgebra') -> bool:
        return self.space.equals(other.space)

    def is_subalgebra_of(self, other: 'VonNeumannAlgebra') -> bool:
        return self.space.is_subspace_of(other.space)


def generate_algebra(generators: Sequence[Matrix], n: Optional[int] = None,
                     field: ScalarField = EXACT) -> VonNeumannAlgebra:
    """Smallest unital *-algebra containing the generators"""
    generators = list(generators)
    if generators:
        rows, cols, field = check_uniform(generators)
        if rows != cols:
            raise ShapeMismatchError(f"Generators must be square, got {rows}x{cols}")
        if n is not None and n != rows:
            raise ShapeMismatchError(f"Expected {n}x{n} generators, got {rows}x{rows}")
        n = rows
    elif n is None:
        raise ShapeMismatchError("An empty generator list needs an explicit size")
    seed = [Matrix.identity(n, field)] + generators + [g.adjoint() for g in generators]
    space = OperatorSubspace.canonicalize(seed, n, field)
    rounds = 0
    while True:
        grown = space.sum(space.multiply(space))
        rounds += 1
        if grown.dim == space.dim:
            break
        space = grown
    logger.debug("generated algebra of dimension %d in M_%d after %d rounds",
                 space.dim, n, rounds)
    return VonNeumannAlgebra(space)


def commutant(algebra: VonNeumannAlgebra) -> OperatorSubspace:
    return algebra.commutant_space


def scalar_algebra(n: int, field: ScalarField = EXACT) -> VonNeumannAlgebra:
    return VonNeumannAlgebra(OperatorSubspace.scalars(n, field),
                             OperatorSubspace.full(n, field))


def full_algebra(n: int, field: ScalarField = EXACT) -> VonNeumannAlgebra:
    return VonNeumannAlgebra(OperatorSubspace.full(n, field),
                             OperatorSubspace.scalars(n, field))


def diagonal_masa(n: int, field: ScalarField = EXACT) -> VonNeumannAlgebra:
    diagonal = OperatorSubspace.canonicalize([Matrix.unit(n, i, i, field) for i in range(n)],
                                             n, field)
    return VonNeumannAlgebra(diagonal, diagonal)


def block_algebra(sizes: Sequence[int], field: ScalarField = EXACT) -> VonNeumannAlgebra:
    """Block diagonal algebra M_{n_1} + ... + M_{n_k} with multiplicity one"""
    if not sizes or any(size < 1 for size in sizes):
        raise ValidationError("Block sizes must be positive", witness=list(sizes))
    n = sum(sizes)
    units = []
    offset = 0
    for size in sizes:
        for i in range(size):
            for j in range(size):
                units.append(Matrix.unit(n, offset + i, offset + j, field))
        offset += size
    return VonNeumannAlgebra(OperatorSubspace.canonicalize(units, n, field))


def is_diagonal_masa(algebra: VonNeumannAlgebra) -> bool:
    return algebra.space.equals(diagonal_masa(algebra.n, algebra.field).space)


def is_masa(algebra: VonNeumannAlgebra) -> bool:
    """Maximal abelian: the algebra equals its own commutant"""
    return algebra.space.equals(algebra.commutant_space)


def center(algebra: VonNeumannAlgebra) -> VonNeumannAlgebra:
    return VonNeumannAlgebra(algebra.space.intersect(algebra.commutant_space))


def amplify(algebra: VonNeumannAlgebra, d: int) -> VonNeumannAlgebra:
    """I_d (x) M inside M_{d n}, i.e. d equal diagonal blocks"""
    if d < 1:
        raise ValidationError("Amplification degree must be at least 1", witness=d)
    if d == 1:
        return algebra
    identity = Matrix.identity(d, algebra.field)
    return VonNeumannAlgebra(OperatorSubspace.canonicalize(
        [identity.kron(a) for a in algebra.basis()], d * algebra.n, algebra.field))


def direct_sum(left: VonNeumannAlgebra, right: VonNeumannAlgebra) -> VonNeumannAlgebra:
    """Block diagonal algebra M + N acting on the direct sum of the two spaces"""
    zero_left = Matrix.zeros(left.n, left.n, left.field)
    zero_right = Matrix.zeros(right.n, right.n, right.field)
    size = left.n + right.n
    basis = [a.direct_sum(zero_right) for a in left.basis()]
    basis += [zero_left.direct_sum(b) for b in right.basis()]
    commutant_basis = [a.direct_sum(zero_right) for a in left.commutant_space.basis()]
    commutant_basis += [zero_left.direct_sum(b) for b in right.commutant_space.basis()]
    return VonNeumannAlgebra(
        OperatorSubspace.canonicalize(basis, size, left.field),
        OperatorSubspace.canonicalize(commutant_basis, size, left.field)
    )
