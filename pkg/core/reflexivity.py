"""
Operator reflexivity of subspaces of M_n

The reflexive closure of V is the set of B with Bv in Vv for every vector v.
It is computed here by intersecting the constraint sets of sampled vectors:
each sampled constraint is sound, so the result never drops below the true
closure, and sampling stops once the intersection has been stable for 2n
consecutive random vectors.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from core.errors import GuardExceededError, ShapeMismatchError, ValidationError
from core.matrix import Matrix
from core.scalars import ScalarField
from core.subspace import OperatorSubspace, VectorSpan, kernel

logger = logging.getLogger(__name__)

RANDOM_RANGE = 3


@dataclass(frozen=True)
class ReflexivityReport:
    space: OperatorSubspace
    closure: OperatorSubspace
    is_reflexive: bool
    certificate: Optional[Matrix]
    samples_used: int
    stabilized: bool
    validated: bool
    seed: int


def structured_vectors(n: int, field: ScalarField) -> Iterator[List[Any]]:
    """Standard basis vectors, pairwise sums e_i + e_j and e_i + i e_j"""
    zero, one, imag = field.zero, field.one, field.imaginary_unit()
    for i in range(n):
        v = [zero] * n
        v[i] = one
        yield v
    for i in range(n):
        for j in range(i + 1, n):
            v = [zero] * n
            v[i] = one
            v[j] = one
            yield v
            w = [zero] * n
            w[i] = one
            w[j] = imag
            yield w


def random_vectors(n: int, field: ScalarField, rng: np.random.Generator) -> Iterator[List[Any]]:
    """Gaussian-integer vectors with small coordinates, never zero"""
    while True:
        parts = rng.integers(-RANDOM_RANGE, RANDOM_RANGE + 1, size=(n, 2))
        if not parts.any():
            continue
        yield [field.coerce_complex(int(re), int(im)) for re, im in parts]


class _ConstraintSet:
    """Linear conditions on vec(B) collected from sampled vectors"""

    def __init__(self, space: OperatorSubspace):
        self.space = space
        self.n = space.n
        self.field = space.field
        self.basis = space.basis()
        self.rows = VectorSpan.zero(self.n * self.n, self.field)

    def constraints_for(self, vector: Sequence[Any]) -> List[Dict[int, Any]]:
        """u^T B v = 0 for every u annihilating Vv"""
        field = self.field
        column = Matrix.column(list(vector), field)
        orbit = VectorSpan.from_vectors(self.n, [(a @ column).entries for a in self.basis], field)
        equations = []
        for u in orbit.annihilator().sparse_rows():
            row = {}
            for i, ui in u.items():
                for j, vj in enumerate(vector):
                    if not field.is_zero(vj):
                        row[i * self.n + j] = ui * vj
            equations.append(row)
        return equations

    def absorb(self, vector: Sequence[Any]) -> bool:
        before = self.rows.dim
        equations = self.constraints_for(vector)
        if equations:
            self.rows = self.rows.extend(equations)
        return self.rows.dim > before

    def closure(self) -> OperatorSubspace:
        size = self.n * self.n
        solutions = kernel(self.rows.sparse_rows(), size, self.field)
        return OperatorSubspace(self.n, VectorSpan.from_sparse(size, solutions, self.field))


def reflexive_closure(space: OperatorSubspace, samples: int = 200, seed: int = 0) -> ReflexivityReport:
    """Sampled reflexive closure {B : Bv in Vv} of a subspace"""
    if samples < 1:
        raise ValidationError("At least one random sample is required", witness=samples)
    n = space.n
    field = space.field
    constraints = _ConstraintSet(space)
    used = 0
    for vector in structured_vectors(n, field):
        constraints.absorb(vector)
        used += 1
    rng = np.random.default_rng(seed)
    stream = random_vectors(n, field, rng)
    window = 2 * n
    quiet = 0
    for _ in range(samples):
        if quiet >= window:
            break
        grew = constraints.absorb(next(stream))
        used += 1
        quiet = 0 if grew else quiet + 1
    stabilized = quiet >= window
    if not stabilized:
        logger.warning("reflexive closure did not stabilize within %d samples", samples)
    validated = True
    for _ in range(window):
        if constraints.absorb(next(stream)):
            validated = False
        used += 1
    closure = constraints.closure()
    certificate = closure.first_outside(space)
    logger.debug("closure of a %d-dimensional subspace of M_%d has dimension %d (%d vectors)",
                 space.dim, n, closure.dim, used)
    return ReflexivityReport(space, closure, certificate is None, certificate,
                             used, stabilized, validated, seed)


def is_operator_reflexive(space: OperatorSubspace, samples: int = 200, seed: int = 0) -> bool:
    return reflexive_closure(space, samples, seed).is_reflexive


def masa_relative_closure(space: OperatorSubspace, guard: int = 12) -> OperatorSubspace:
    """{B : P V Q = 0 implies P B Q = 0} over diagonal projections P, Q.

    For each P only the largest Q with P V Q = 0 matters, since smaller Q
    impose weaker conditions.
    """
    n = space.n
    if n > guard:
        raise GuardExceededError(f"Masa projection sweep limited to n <= {guard}",
                                 witness={'n': n, 'guard': guard})
    support = set()
    for m in space.basis():
        support.update(m.support())
    forbidden = set()
    for mask in range(1, 1 << n):
        rows = [x for x in range(n) if mask >> x & 1]
        cols = [y for y in range(n) if all((x, y) not in support for x in rows)]
        forbidden.update((x, y) for x in rows for y in cols)
    allowed = [Matrix.unit(n, x, y, space.field)
               for x in range(n) for y in range(n) if (x, y) not in forbidden]
    return OperatorSubspace.canonicalize(allowed, n, space.field)


def is_relatively_reflexive(space: OperatorSubspace, guard: int = 12) -> bool:
    return masa_relative_closure(space, guard).equals(space)


def tensor_identity(space: OperatorSubspace, d: int) -> OperatorSubspace:
    """V (x) I_d inside M_{n d}"""
    identity = Matrix.identity(d, space.field)
    return OperatorSubspace.canonicalize([b.kron(identity) for b in space.basis()],
                                         space.n * d, space.field)


def tensor_identity_report(space: OperatorSubspace, d: int = 2, samples: int = 200,
                           seed: int = 0) -> Tuple[int, ReflexivityReport]:
    """Closure report for V (x) I_k with k = max(d, n), and the k used.

    A separating functional can have rank n, so multiplicity below n may leave
    V (x) I_d non-reflexive (trace-zero matrices in M_3 with d = 2).
    """
    if d < 2:
        raise ShapeMismatchError("Tensor multiplicity must be at least 2")
    degree = max(d, space.n)
    if degree != d:
        logger.info("raising tensor multiplicity from %d to %d", d, degree)
    return degree, reflexive_closure(tensor_identity(space, degree), samples, seed)


def tensor_identity_reflexive_check(space: OperatorSubspace, d: int = 2, samples: int = 200,
                                    seed: int = 0) -> bool:
    return tensor_identity_report(space, d, samples, seed)[1].is_reflexive
