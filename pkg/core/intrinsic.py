"""
Finite-dimensional intrinsic description of quantum relations

M (x) M^op acts on B(H) by (A (x) C) . B = A B C. Quantum relations on M
correspond to left ideals of M (x) M^op (annihilators), and every left ideal
is generated by a projection. Elements are stored as sums of (A, C) pairs;
for linear algebra they are realized faithfully as A (x) C^T acting on the
row-major vectorization of B.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from core.errors import ExactModeRequiredError, ShapeMismatchError, ValidationError
from core.matrix import Matrix
from core.quantum_relation import QuantumRelation
from core.subspace import (OperatorSubspace, VectorSpan, express, kernel, null_space,
                           orthogonal_projection, rank_factorization)
from core.vn_algebra import VonNeumannAlgebra

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TensorElement:
    """Element sum_k A_k (x) C_k of M (x) M^op"""

    terms: Tuple[Tuple[Matrix, Matrix], ...]

    def is_zero(self) -> bool:
        return not self.terms


class BimoduleAction:
    """The action of M (x) M^op on B(H) for a fixed algebra M"""

    def __init__(self, algebra: VonNeumannAlgebra):
        self.algebra = algebra
        self.n = algebra.n
        self.field = algebra.field
        self.algebra_basis = algebra.basis()
        self.basis_pairs = [(a, c) for a in self.algebra_basis for c in self.algebra_basis]
        self._represented_basis = [self._represent_pair(a, c) for a, c in self.basis_pairs]
        self.space = OperatorSubspace.canonicalize(self._represented_basis, self.n * self.n,
                                                   self.field)
        identity = Matrix.identity(self.n, self.field)
        # a (x) 1 and 1 (x) c generate M (x) M^op as an algebra
        self.generators = ([self._represent_pair(a, identity) for a in self.algebra_basis]
                           + [self._represent_pair(identity, c) for c in self.algebra_basis])

    def _represent_pair(self, a: Matrix, c: Matrix) -> Matrix:
        return a.kron(c.transpose())

    @property
    def unit(self) -> TensorElement:
        identity = Matrix.identity(self.n, self.field)
        return TensorElement(((identity, identity),))

    def apply(self, element: TensorElement, operator: Matrix) -> Matrix:
        """sum_k A_k B C_k"""
        result = Matrix.zeros(self.n, self.n, self.field)
        for a, c in element.terms:
            result = result + a @ operator @ c
        return result

    def represent(self, element: TensorElement) -> Matrix:
        size = self.n * self.n
        result = Matrix.zeros(size, size, self.field)
        for a, c in element.terms:
            result = result + self._represent_pair(a, c)
        return result

    def element_of(self, matrix: Matrix) -> TensorElement:
        """Read a represented matrix back as grouped pairs (sum_i x_ij b_i, b_j)"""
        coefficients = express([m.entries for m in self._represented_basis], matrix.entries,
                               self.field)
        if coefficients is None:
            raise ValidationError("Matrix does not represent an element of M (x) M^op")
        m = len(self.algebra_basis)
        terms = []
        for j, right in enumerate(self.algebra_basis):
            left = Matrix.zeros(self.n, self.n, self.field)
            for i, a in enumerate(self.algebra_basis):
                x = coefficients[i * m + j]
                if not self.field.is_zero(x):
                    left = left + a.scale(x)
            if not left.is_zero():
                terms.append((left, right))
        return TensorElement(tuple(terms))

    def element_of_safe(self, matrix: Matrix) -> Optional[TensorElement]:
        try:
            return self.element_of(matrix)
        except ValidationError:
            return None

    def contains(self, matrix: Matrix) -> bool:
        return self.space.contains(matrix)


def _unvec(vector: Sequence[Any], n: int, field) -> Matrix:
    return Matrix(n, n, tuple(vector), field)


@dataclass(frozen=True)
class LeftIdeal:
    """Left ideal of M (x) M^op, held through its faithful representation"""

    action: BimoduleAction = field(compare=False)
    space: OperatorSubspace

    def __post_init__(self):
        if self.space.n != self.action.n * self.action.n:
            raise ShapeMismatchError("Ideal elements must act on vectorized n x n matrices")
        outside = self.space.first_outside(self.action.space)
        if outside is not None:
            raise ValidationError("Ideal contains an element outside M (x) M^op",
                                  witness=_pairs_json(self.action.element_of_safe(outside)))
        members = self.space.basis()
        for generator in self.action.generators:
            for member in members:
                product = generator @ member
                if not self.space.contains(product):
                    raise ValidationError("Subspace is not a left ideal",
                                          witness=_pairs_json(self.action.element_of(product)))

    @property
    def dim(self) -> int:
        return self.space.dim

    def elements(self) -> List[TensorElement]:
        return [self.action.element_of(m) for m in self.space.basis()]

    def joint_kernel(self) -> VectorSpan:
        size = self.space.n
        rows = []
        for m in self.space.basis():
            rows.extend({k: x for k, x in enumerate(m.row(i)) if not m.field.is_zero(x)}
                        for i in range(size))
        return VectorSpan.from_sparse(size, kernel(rows, size, self.space.field), self.space.field)


def _pairs_json(element: Optional[TensorElement]) -> Any:
    if element is None:
        return None
    return [[[str(x) for x in a.entries], [str(x) for x in c.entries]] for a, c in element.terms]


def is_left_ideal(action: BimoduleAction, space: OperatorSubspace) -> Tuple[bool, Any]:
    """(verdict, witness) for a subspace of represented operators"""
    try:
        LeftIdeal(action, space)
    except ValidationError as exc:
        return False, exc.witness
    return True, None


def ideal_from_elements(action: BimoduleAction, elements: Sequence[TensorElement]) -> LeftIdeal:
    size = action.n * action.n
    space = OperatorSubspace.canonicalize([action.represent(e) for e in elements], size,
                                          action.field)
    return LeftIdeal(action, space)


def ideal_of_relation(relation: QuantumRelation) -> LeftIdeal:
    """Annihilator ideal {X : X . B = 0 for all B in V}"""
    action = BimoduleAction(relation.ambient)
    n = action.n
    field = action.field
    count = len(action.basis_pairs)
    equations: List[Dict[int, Any]] = []
    images = [[action.apply(TensorElement((pair,)), b) for b in relation.basis()]
              for pair in action.basis_pairs]
    for k in range(relation.dim):
        for position in range(n * n):
            row = {}
            for index in range(count):
                x = images[index][k].entries[position]
                if not field.is_zero(x):
                    row[index] = x
            if row:
                equations.append(row)
    solutions = kernel(equations, count, field)
    size = n * n
    members = []
    for solution in solutions:
        total = Matrix.zeros(size, size, field)
        for index, coeff in solution.items():
            total = total + action._represented_basis[index].scale(coeff)
        members.append(total)
    ideal = LeftIdeal(action, OperatorSubspace.canonicalize(members, size, field))
    logger.debug("annihilator ideal of a %d-dimensional relation has dimension %d",
                 relation.dim, ideal.dim)
    return ideal


def relation_of_ideal(ideal: LeftIdeal) -> QuantumRelation:
    """Joint kernel of the action of the ideal"""
    action = ideal.action
    kernel_span = ideal.joint_kernel()
    matrices = [_unvec(row, action.n, action.field) for row in kernel_span.dense_rows()]
    return QuantumRelation(action.algebra,
                           OperatorSubspace.canonicalize(matrices, action.n, action.field))


@dataclass(frozen=True)
class ProjectionForm:
    """Projection P with ideal = (M (x) M^op) P"""

    matrix: Matrix
    element: TensorElement


def projection_form(ideal: LeftIdeal) -> ProjectionForm:
    """Right support of the ideal: the projection onto the complement of its joint kernel"""
    action = ideal.action
    size = action.n * action.n
    identity = Matrix.identity(size, action.field)
    projection = identity - orthogonal_projection(ideal.joint_kernel())
    if not ideal.space.contains(projection):
        raise ValidationError("Right support projection is not in the ideal")
    generated = action.space.multiply(OperatorSubspace.canonicalize([projection], size,
                                                                   action.field))
    if not generated.equals(ideal.space):
        raise ValidationError("Ideal is not generated by its right support")
    return ProjectionForm(projection, action.element_of(projection))


def _check_projection(action: BimoduleAction, projection: Matrix):
    size = action.n * action.n
    if projection.shape != (size, size):
        raise ShapeMismatchError(f"Projection must be {size}x{size}")
    if not action.contains(projection):
        raise ValidationError("Operator is not in M (x) M^op")
    if not (projection @ projection).equals(projection) or not projection.adjoint().equals(projection):
        raise ValidationError("Operator is not a projection")


def relation_of_projection(action: BimoduleAction, projection: Any) -> QuantumRelation:
    """V annihilated by the ideal (M (x) M^op) P, i.e. the kernel of P"""
    if isinstance(projection, TensorElement):
        projection = action.represent(projection)
    _check_projection(action, projection)
    matrices = [_unvec(row, action.n, action.field)
                for row in null_space(projection).dense_rows()]
    return QuantumRelation(action.algebra,
                           OperatorSubspace.canonicalize(matrices, action.n, action.field))


def relation_of_complement(action: BimoduleAction, projection: Any) -> QuantumRelation:
    """Order-preserving form P -> V annihilated by (M (x) M^op)(1 - P)"""
    if isinstance(projection, TensorElement):
        projection = action.represent(projection)
    size = action.n * action.n
    return relation_of_projection(action, Matrix.identity(size, action.field) - projection)


@dataclass(frozen=True)
class SeparationWitness:
    """Projections P, Q in M (x) M_d with P(A (x) I)Q != 0 and P(B (x) I)Q = 0 on V"""

    degree: int
    left: Matrix
    right: Matrix
    operator: Matrix
    functional: Matrix
    left_vector: Tuple[Any, ...]
    right_vector: Tuple[Any, ...]


def invariant_span(operators: Sequence[Matrix], vectors: Sequence[Sequence[Any]],
                   field) -> VectorSpan:
    """Smallest subspace containing the vectors and invariant under the operators"""
    length = len(vectors[0])
    span = VectorSpan.from_vectors(length, vectors, field)
    frontier = [list(v) for v in vectors]
    rounds = 0
    while frontier:
        rounds += 1
        images = []
        for vector in frontier:
            column = Matrix.column(vector, field)
            for op in operators:
                images.append(list((op @ column).entries))
        grown = VectorSpan.from_vectors(length, images, field).sum(span)
        if grown.dim == span.dim:
            break
        frontier = [row for row in grown.dense_rows()]
        span = grown
    logger.debug("orbit span of dimension %d after %d rounds", span.dim, rounds)
    return span


def separate(relation: QuantumRelation, operator: Matrix) -> Optional[SeparationWitness]:
    """Separate an operator from a quantum relation by a pair of orbit projections.

    Returns None when the operator already belongs to the relation.
    """
    field = relation.space.field
    if not field.is_exact():
        raise ExactModeRequiredError("Separation is only decided over exact scalars")
    n = relation.n
    if operator.shape != (n, n):
        raise ShapeMismatchError(f"Operator must be {n}x{n}")
    if relation.contains(operator):
        return None
    # tr(B T) = sum_ij B_ij T_ji, so T is indexed transposed
    equations = []
    for b in relation.basis():
        equations.append({j * n + i: b[i, j] for i in range(n) for j in range(n)
                          if not field.is_zero(b[i, j])})
    functional = None
    for candidate in kernel(equations, n * n, field):
        t = Matrix(n, n, tuple(candidate.get(k, field.zero) for k in range(n * n)), field)
        if not field.is_zero((operator @ t).trace()):
            functional = t
            break
    if functional is None:
        raise ValidationError("No annihilating functional separates the operator")
    c, r = rank_factorization(functional)
    d = c.cols
    left_vector = [field.zero] * (n * d)
    right_vector = [field.zero] * (n * d)
    for k in range(d):
        for i in range(n):
            right_vector[i * d + k] = c[i, k]
            left_vector[i * d + k] = field.conjugate(r[k, i])
    identity = Matrix.identity(d, field)
    orbit_ops = [m.kron(identity) for m in relation.ambient.commutant_space.basis()]
    left = orthogonal_projection(invariant_span(orbit_ops, [left_vector], field))
    right = orthogonal_projection(invariant_span(orbit_ops, [right_vector], field))
    if (left @ operator.kron(identity) @ right).is_zero():
        raise ValidationError("Orbit projections fail to detect the operator")
    for b in relation.basis():
        if not (left @ b.kron(identity) @ right).is_zero():
            raise ValidationError("Orbit projections do not annihilate the relation")
    logger.debug("separated operator at amplification degree %d", d)
    return SeparationWitness(d, left, right, operator, functional,
                             tuple(left_vector), tuple(right_vector))
