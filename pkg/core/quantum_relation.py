"""
Quantum relations: bimodules over the commutant of a von Neumann algebra

A quantum relation on M is a subspace V of M_n with M'VM' contained in V.
On the diagonal masa these are exactly the spans of matrix units, which is
the bridge to classical relations.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from core.errors import AmbientMismatchError, ShapeMismatchError, ValidationError
from core.finite_relations import FinSet, FiniteRelation, RelationKind, classify_flags
from core.matrix import Matrix
from core.subspace import OperatorSubspace
from core.vn_algebra import (VonNeumannAlgebra, amplify, direct_sum,
                             is_diagonal_masa)

logger = logging.getLogger(__name__)


def _rows(matrix: Matrix) -> List[List[str]]:
    return [[str(x) for x in row] for row in matrix.to_rows()]


@dataclass(frozen=True)
class QuantumRelation:
    """Subspace V of M_n with M' V M' contained in V"""

    ambient: VonNeumannAlgebra
    space: OperatorSubspace

    def __post_init__(self):
        if self.space.n != self.ambient.n:
            raise ShapeMismatchError(
                f"Relation lives in M_{self.space.n} but the algebra in M_{self.ambient.n}")
        if self.space.field.mode != self.ambient.field.mode:
            raise ValidationError("Relation and algebra use different scalar modes")
        commutant = self.ambient.commutant_space
        outside = commutant.multiply(self.space.multiply(commutant)).first_outside(self.space)
        if outside is not None:
            raise ValidationError("Subspace is not a bimodule over the commutant",
                                  witness={'product': _rows(outside)})

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def dim(self) -> int:
        return self.space.dim

    def basis(self) -> List[Matrix]:
        return self.space.basis()

    def contains(self, matrix: Matrix) -> bool:
        return self.space.contains(matrix)

    def equals(self, other: 'QuantumRelation') -> bool:
        _check_ambient(self, other)
        return self.space.equals(other.space)


def _check_ambient(*relations: QuantumRelation):
    first = relations[0].ambient
    for other in relations[1:]:
        if other.ambient.n != first.n or not other.ambient.space.equals(first.space):
            raise AmbientMismatchError("Relations live over different algebras")


def generate_relation(algebra: VonNeumannAlgebra, generators: Sequence[Matrix]) -> QuantumRelation:
    """Smallest bimodule over M' containing the generators"""
    generators = list(generators)
    for g in generators:
        if g.shape != (algebra.n, algebra.n):
            raise ShapeMismatchError(f"Generators must be {algebra.n}x{algebra.n}, got {g.shape}")
    seed = OperatorSubspace.canonicalize(generators, algebra.n, algebra.field)
    commutant = algebra.commutant_space
    space = commutant.multiply(seed).multiply(commutant)
    logger.debug("generated relation of dimension %d from %d generators", space.dim, len(generators))
    return QuantumRelation(algebra, space)


def diagonal(algebra: VonNeumannAlgebra) -> QuantumRelation:
    return QuantumRelation(algebra, algebra.commutant_space)


def zero_relation(algebra: VonNeumannAlgebra) -> QuantumRelation:
    return QuantumRelation(algebra, OperatorSubspace.zero(algebra.n, algebra.field))


def full_relation(algebra: VonNeumannAlgebra) -> QuantumRelation:
    return QuantumRelation(algebra, OperatorSubspace.full(algebra.n, algebra.field))


def transpose(relation: QuantumRelation) -> QuantumRelation:
    return QuantumRelation(relation.ambient, relation.space.adjoint())


def product(left: QuantumRelation, right: QuantumRelation) -> QuantumRelation:
    _check_ambient(left, right)
    return QuantumRelation(left.ambient, left.space.multiply(right.space))


def intersect(left: QuantumRelation, right: QuantumRelation) -> QuantumRelation:
    _check_ambient(left, right)
    return QuantumRelation(left.ambient, left.space.intersect(right.space))


def join(left: QuantumRelation, right: QuantumRelation) -> QuantumRelation:
    _check_ambient(left, right)
    return QuantumRelation(left.ambient, left.space.sum(right.space))


def is_subrelation(left: QuantumRelation, right: QuantumRelation) -> bool:
    _check_ambient(left, right)
    return left.space.is_subspace_of(right.space)


def is_reflexive(relation: QuantumRelation) -> bool:
    return relation.ambient.commutant_space.is_subspace_of(relation.space)


def is_symmetric(relation: QuantumRelation) -> bool:
    return relation.space.adjoint().equals(relation.space)


def is_antisymmetric(relation: QuantumRelation) -> bool:
    return symmetric_part(relation).space.is_subspace_of(relation.ambient.commutant_space)


def is_transitive(relation: QuantumRelation) -> bool:
    return relation.space.multiply(relation.space).is_subspace_of(relation.space)


def classify(relation: QuantumRelation) -> RelationKind:
    return classify_flags(is_reflexive(relation), is_symmetric(relation),
                          is_antisymmetric(relation), is_transitive(relation))


def properties(relation: QuantumRelation) -> Dict[str, bool]:
    return {
        'reflexive': is_reflexive(relation),
        'symmetric': is_symmetric(relation),
        'antisymmetric': is_antisymmetric(relation),
        'transitive': is_transitive(relation)
    }


def symmetric_part(relation: QuantumRelation) -> QuantumRelation:
    """V intersected with V*"""
    return QuantumRelation(relation.ambient, relation.space.intersect(relation.space.adjoint()))


def preorder_quotient(relation: QuantumRelation) -> Tuple[VonNeumannAlgebra, QuantumRelation]:
    """Reread a quantum preorder as a quantum partial order over M0 = (V and V*)'.

    V and V* is a von Neumann algebra when V is a preorder; it becomes the
    commutant of the new ambient algebra, in the same representation.
    """
    if not (is_reflexive(relation) and is_transitive(relation)):
        raise ValidationError("Only quantum preorders have a partial order quotient",
                              witness=properties(relation))
    symmetric = VonNeumannAlgebra(symmetric_part(relation).space)
    reduced = VonNeumannAlgebra(symmetric.commutant_space, symmetric.space)
    return reduced, QuantumRelation(reduced, relation.space)


def linking_algebra(relation: QuantumRelation) -> OperatorSubspace:
    """Upper triangular algebra [[M', V], [0, M']] in M_{2n}"""
    n = relation.n
    field = relation.space.field
    zero = Matrix.zeros(n, n, field)
    basis = []
    for c in relation.ambient.commutant_space.basis():
        basis.append(c.direct_sum(zero))
        basis.append(zero.direct_sum(c))
    for v in relation.basis():
        basis.append(v.embed(2 * n, 0, n))
    return OperatorSubspace.canonicalize(basis, 2 * n, field)


def from_classical(algebra: VonNeumannAlgebra, relation: FiniteRelation) -> QuantumRelation:
    """span{E_xy : (x, y) in R} over the diagonal masa"""
    if algebra.n != relation.base.size or not is_diagonal_masa(algebra):
        raise ValidationError("Classical relations embed only over the diagonal masa of M_|X|")
    units = [Matrix.unit(algebra.n, x, y, algebra.field) for x, y in sorted(relation.pairs)]
    return QuantumRelation(algebra, OperatorSubspace.canonicalize(units, algebra.n, algebra.field))


def to_classical(relation: QuantumRelation, base: FinSet = None) -> FiniteRelation:
    """Pairs (x, y) where some element of V has a nonzero (x, y) entry"""
    if not is_diagonal_masa(relation.ambient):
        raise ValidationError("Only relations over the diagonal masa have a classical form")
    base = base or FinSet.of_size(relation.n)
    if base.size != relation.n:
        raise ValidationError("Base set size does not match the ambient dimension")
    pairs = set()
    for matrix in relation.basis():
        pairs.update(matrix.support())
    return FiniteRelation(base, frozenset(pairs))


def amplify_relation(relation: QuantumRelation, d: int) -> QuantumRelation:
    """span{E_ij (x) B : B in V}, a bimodule over M_d (x) M'"""
    algebra = amplify(relation.ambient, d)
    field = relation.space.field
    basis = [Matrix.unit(d, i, j, field).kron(b)
             for i in range(d) for j in range(d) for b in relation.basis()]
    return QuantumRelation(algebra, OperatorSubspace.canonicalize(basis, d * relation.n, field))


def compress_relation(relation: QuantumRelation, base: VonNeumannAlgebra) -> QuantumRelation:
    """Inverse of amplify_relation: cut down by P = E_00 (x) I and read off the corner"""
    n = base.n
    if relation.n % n:
        raise ShapeMismatchError(f"M_{relation.n} is not an amplification of M_{n}")
    d = relation.n // n
    if not relation.ambient.space.equals(amplify(base, d).space):
        raise AmbientMismatchError("Relation does not live over the amplified algebra")
    blocks = [m.block(0, n, 0, n) for m in relation.basis()]
    return QuantumRelation(base, OperatorSubspace.canonicalize(blocks, n, base.field))


def corner_relation(left: VonNeumannAlgebra, right: VonNeumannAlgebra,
                    generators: Sequence[Matrix]) -> QuantumRelation:
    """Quantum relation from M to N, living in the (H, K) corner of M + N.

    Generators are |H| x |K| matrices; the result is the bimodule they generate
    over the commutant of the direct sum.
    """
    algebra = direct_sum(left, right)
    size = algebra.n
    placed = []
    for g in generators:
        if g.shape != (left.n, right.n):
            raise ShapeMismatchError(f"Corner generators must be {left.n}x{right.n}, got {g.shape}")
        placed.append(g.embed(size, 0, left.n))
    return generate_relation(algebra, placed)


def corner_blocks(relation: QuantumRelation, left_size: int) -> List[Matrix]:
    """The (H, K) blocks of a corner relation; raises if anything leaks outside"""
    blocks = []
    for m in relation.basis():
        block = m.block(0, left_size, left_size, m.cols)
        if not block.embed(m.rows, 0, left_size).equals(m):
            raise ValidationError("Relation is not supported in the (H, K) corner",
                                  witness={'element': _rows(m)})
        blocks.append(block)
    return blocks
