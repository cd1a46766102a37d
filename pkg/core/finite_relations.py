"""
Classical and measurable relations on finite atomic spaces

Subsets of a finite set X stand for the projections of l^inf(X). A measurable
relation is stored through its underlying classical relation, but the public
interface is the subset-pair predicate member(S, T), true exactly when
(S x T) meets the relation.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import chain, combinations
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from core.errors import EmptySubsetError, ValidationError
from core.scalars import GaussianRational

logger = logging.getLogger(__name__)

Subset = FrozenSet[int]
Pair = Tuple[int, int]
Distance = Union[Fraction, float]

INF = math.inf

# Brute-force cross checks of the product conditions run up to this size
PRODUCT_CHECK_LIMIT = 5


class RelationKind(str, Enum):
    """Most specific classification label of a relation"""

    EQUIVALENCE = 'equivalence'
    PARTIAL_ORDER = 'partial_order'
    PREORDER = 'preorder'
    GRAPH = 'graph'
    PLAIN = 'plain'


def classify_flags(reflexive: bool, symmetric: bool, antisymmetric: bool,
                   transitive: bool) -> RelationKind:
    if reflexive and symmetric and transitive:
        return RelationKind.EQUIVALENCE
    if reflexive and transitive and antisymmetric:
        return RelationKind.PARTIAL_ORDER
    if reflexive and transitive:
        return RelationKind.PREORDER
    if reflexive and symmetric:
        return RelationKind.GRAPH
    return RelationKind.PLAIN


def subsets(size: int, nonempty: bool = False) -> List[Subset]:
    """All subsets of range(size), ordered by size then lexicographically"""
    start = 1 if nonempty else 0
    return [frozenset(c) for c in chain.from_iterable(
        combinations(range(size), r) for r in range(start, size + 1))]


def _show(subset: Iterable[int]) -> List[int]:
    return sorted(subset)


@dataclass(frozen=True)
class FinSet:
    """Finite atomic measure space: labelled atoms with positive weights"""

    labels: Tuple[str, ...]
    weights: Tuple[Fraction, ...] = ()

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise ValidationError("Atom labels must be distinct", witness=list(self.labels))
        if not self.weights:
            object.__setattr__(self, 'weights', tuple(Fraction(1) for _ in self.labels))
        else:
            object.__setattr__(self, 'weights', tuple(Fraction(w) for w in self.weights))
        object.__setattr__(self, 'labels', tuple(str(label) for label in self.labels))
        if len(self.weights) != len(self.labels):
            raise ValidationError("One weight per atom is required")
        for label, weight in zip(self.labels, self.weights):
            if weight <= 0:
                raise ValidationError("Atom weights must be positive", witness=label)

    @classmethod
    def of_size(cls, size: int) -> 'FinSet':
        return cls(tuple(str(i) for i in range(size)))

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def everything(self) -> Subset:
        return frozenset(range(self.size))

    def complement(self, subset: Subset) -> Subset:
        return self.everything - subset

    def subsets(self, nonempty: bool = False) -> List[Subset]:
        return subsets(self.size, nonempty)

    def check_subset(self, subset: Iterable[int]) -> Subset:
        subset = frozenset(subset)
        if any(x < 0 or x >= self.size for x in subset):
            raise ValidationError("Subset index out of range", witness=_show(subset))
        return subset


@dataclass(frozen=True)
class FiniteRelation:
    """A subset R of X x X"""

    base: FinSet
    pairs: FrozenSet[Pair] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, 'pairs', frozenset((int(x), int(y)) for x, y in self.pairs))
        n = self.base.size
        for x, y in self.pairs:
            if not (0 <= x < n and 0 <= y < n):
                raise ValidationError("Pair outside X x X", witness=[x, y])

    def __contains__(self, pair: Pair) -> bool:
        return pair in self.pairs

    def sorted_pairs(self) -> List[List[int]]:
        return [list(p) for p in sorted(self.pairs)]


def _check_base(*relations: Any):
    first = relations[0].base
    for other in relations[1:]:
        if other.base != first:
            raise ValidationError("Relations live on different base sets")


@dataclass(frozen=True)
class MeasurableRelationFin:
    """Measurable relation on a finite atomic space, read through member(S, T)"""

    base: FinSet
    underlying: FiniteRelation

    def __post_init__(self):
        if self.underlying.base != self.base:
            raise ValidationError("Underlying relation lives on a different base set")

    def member(self, s: Iterable[int], t: Iterable[int]) -> bool:
        """(S, T) belongs to the relation iff (S x T) meets the underlying pairs"""
        s = self.base.check_subset(s)
        t = self.base.check_subset(t)
        if not s or not t:
            raise EmptySubsetError("Relation pairs are pairs of nonempty subsets",
                                   witness=[_show(s), _show(t)])
        return self._meets(s, t)

    def _meets(self, s: Subset, t: Subset) -> bool:
        return any((x, y) in self.underlying.pairs for x in s for y in t)

    def holds(self, s: Subset, t: Subset) -> bool:
        """member with the convention that pairs involving the empty set never hold"""
        return bool(s) and bool(t) and self._meets(s, t)

    @property
    def pairs(self) -> FrozenSet[Pair]:
        return self.underlying.pairs


def from_relation(relation: FiniteRelation) -> MeasurableRelationFin:
    return MeasurableRelationFin(relation.base, relation)


def to_relation(measurable: MeasurableRelationFin) -> FiniteRelation:
    """Recover the classical relation from atom pairs"""
    n = measurable.base.size
    pairs = {(x, y) for x in range(n) for y in range(n)
             if measurable.member({x}, {y})}
    return FiniteRelation(measurable.base, frozenset(pairs))


def measurable_axiom_violation(base: FinSet,
                               predicate: Callable[[Subset, Subset], bool]) -> Optional[Dict[str, Any]]:
    """First failure of upward closure or join splitting, or None.

    Together the two conditions are equivalent to the join axiom on pairs of
    families of nonzero projections.
    """
    nonempty = base.subsets(nonempty=True)
    for s in nonempty:
        for t in nonempty:
            if predicate(s, t):
                for s2 in nonempty:
                    if s <= s2:
                        for t2 in nonempty:
                            if t <= t2 and not predicate(s2, t2):
                                return {'rule': 'upward_closure', 'pair': [_show(s), _show(t)],
                                        'larger': [_show(s2), _show(t2)]}
    for s in nonempty:
        for t in nonempty:
            if not predicate(s, t):
                continue
            for a in nonempty:
                if not a < s:
                    continue
                b = s - a
                if b and not predicate(a, t) and not predicate(b, t):
                    return {'rule': 'join_split_left', 'pair': [_show(s), _show(t)],
                            'parts': [_show(a), _show(b)]}
            for a in nonempty:
                if not a < t:
                    continue
                b = t - a
                if b and not predicate(s, a) and not predicate(s, b):
                    return {'rule': 'join_split_right', 'pair': [_show(s), _show(t)],
                            'parts': [_show(a), _show(b)]}
    return None


def measurable_from_predicate(base: FinSet,
                              predicate: Callable[[Subset, Subset], bool]) -> MeasurableRelationFin:
    """Build a measurable relation from an arbitrary pair predicate, validating the axioms"""
    witness = measurable_axiom_violation(base, predicate)
    if witness is not None:
        raise ValidationError("Pair predicate is not a measurable relation", witness=witness)
    pairs = {(x, y) for x in range(base.size) for y in range(base.size)
             if predicate(frozenset({x}), frozenset({y}))}
    return from_relation(FiniteRelation(base, frozenset(pairs)))


def filter_to_support(base: FinSet, family: Iterable[Iterable[int]]) -> Subset:
    """Projection p with q in F iff p meets q, for a family F with the join property"""
    members = {base.check_subset(s) for s in family}
    if frozenset() in members:
        raise ValidationError("A filter of nonzero projections cannot contain the empty set",
                              witness=[])
    for s in members:
        for t in base.subsets(nonempty=True):
            if s <= t and t not in members:
                raise ValidationError("Family is not upward closed",
                                      witness={'member': _show(s), 'missing': _show(t)})
    for s in base.subsets(nonempty=True):
        for t in base.subsets(nonempty=True):
            if (s | t) in members and s not in members and t not in members:
                raise ValidationError("Family violates the join axiom",
                                      witness={'join': _show(s | t),
                                               'parts': [_show(s), _show(t)]})
    outside = frozenset().union(*[s for s in base.subsets() if s not in members])
    support = base.everything - outside
    for q in base.subsets(nonempty=True):
        if (q in members) != bool(support & q):
            raise ValidationError("Support does not reproduce the family", witness=_show(q))
    return support


def phi_map(relation: MeasurableRelationFin, q: Iterable[int]) -> Subset:
    """Complement of the union of all p with (p, q) outside the relation"""
    q = relation.base.check_subset(q)
    outside = [p for p in relation.base.subsets(nonempty=True) if not relation.holds(p, q)]
    return relation.base.everything - frozenset().union(*outside)


def phi_table(relation: MeasurableRelationFin) -> Dict[Subset, Subset]:
    return {q: phi_map(relation, q) for q in relation.base.subsets()}


def relation_of_phi(base: FinSet, table: Dict[Subset, Subset]) -> MeasurableRelationFin:
    """Relation {(p, q) : p meets phi(q)} of a join-preserving map on subsets"""
    table = {base.check_subset(k): base.check_subset(v) for k, v in table.items()}
    for s in base.subsets():
        if s not in table:
            raise ValidationError("Map is not defined on every subset", witness=_show(s))
    if table[frozenset()]:
        raise ValidationError("Map must send the empty set to the empty set",
                              witness=_show(table[frozenset()]))
    for s in base.subsets():
        for t in base.subsets():
            if table[s | t] != table[s] | table[t]:
                raise ValidationError("Map does not preserve joins",
                                      witness={'left': _show(s), 'right': _show(t)})
    pairs = {(x, y) for y in range(base.size) for x in table[frozenset({y})]}
    return from_relation(FiniteRelation(base, frozenset(pairs)))


def diagonal(base: FinSet) -> MeasurableRelationFin:
    return from_relation(FiniteRelation(base, frozenset((x, x) for x in range(base.size))))


def full(base: FinSet) -> MeasurableRelationFin:
    n = base.size
    return from_relation(FiniteRelation(base, frozenset((x, y) for x in range(n) for y in range(n))))


def transpose(relation: MeasurableRelationFin) -> MeasurableRelationFin:
    return from_relation(FiniteRelation(relation.base,
                                        frozenset((y, x) for x, y in relation.pairs)))


def intersect(left: MeasurableRelationFin, right: MeasurableRelationFin) -> MeasurableRelationFin:
    _check_base(left, right)
    return from_relation(FiniteRelation(left.base, left.pairs & right.pairs))


def union(left: MeasurableRelationFin, right: MeasurableRelationFin) -> MeasurableRelationFin:
    _check_base(left, right)
    return from_relation(FiniteRelation(left.base, left.pairs | right.pairs))


def is_subrelation(left: MeasurableRelationFin, right: MeasurableRelationFin) -> bool:
    _check_base(left, right)
    return left.pairs <= right.pairs


def _classical_compose(left: FrozenSet[Pair], right: FrozenSet[Pair]) -> FrozenSet[Pair]:
    return frozenset((x, z) for x, y in left for y2, z in right if y == y2)


def product_conditions(left: MeasurableRelationFin, right: MeasurableRelationFin,
                       p: Subset, r: Subset) -> Tuple[bool, bool, bool]:
    """Evaluate membership of (p, r) in the product three ways.

    1. classically, through the composed atom relation
    2. for every q, (p, q) in left or (X - q, r) in right
    3. some nonempty q has (p, q') in left and (q', r) in right for all nonempty q' in q
    """
    base = left.base
    composed = _classical_compose(left.pairs, right.pairs)
    classical = any((x, z) in composed for x in p for z in r)
    every_split = all(left.holds(p, q) or right.holds(base.complement(q), r)
                      for q in base.subsets())
    witness_block = any(
        all(left.holds(p, q2) and right.holds(q2, r) for q2 in subsets_of(q))
        for q in base.subsets(nonempty=True)
    )
    return classical, every_split, witness_block


def subsets_of(subset: Subset) -> List[Subset]:
    """Nonempty subsets of a subset"""
    items = sorted(subset)
    return [frozenset(c) for c in chain.from_iterable(
        combinations(items, r) for r in range(1, len(items) + 1))]


def compose(left: MeasurableRelationFin, right: MeasurableRelationFin,
            cross_check: Optional[bool] = None) -> MeasurableRelationFin:
    """Product relation; for small X the two projection-level conditions are cross-checked"""
    _check_base(left, right)
    base = left.base
    result = from_relation(FiniteRelation(base, _classical_compose(left.pairs, right.pairs)))
    if cross_check is None:
        cross_check = base.size <= PRODUCT_CHECK_LIMIT
    if cross_check:
        for p in base.subsets(nonempty=True):
            for r in base.subsets(nonempty=True):
                verdicts = product_conditions(left, right, p, r)
                if len(set(verdicts)) != 1:
                    raise ValidationError("Product conditions disagree",
                                          witness={'p': _show(p), 'r': _show(r),
                                                   'verdicts': list(verdicts)})
    return result


def is_reflexive(relation: MeasurableRelationFin) -> bool:
    return all((x, x) in relation.pairs for x in range(relation.base.size))


def is_symmetric(relation: MeasurableRelationFin) -> bool:
    return all((y, x) in relation.pairs for x, y in relation.pairs)


def is_antisymmetric(relation: MeasurableRelationFin) -> bool:
    return all(x == y for x, y in relation.pairs if (y, x) in relation.pairs)


def is_transitive(relation: MeasurableRelationFin) -> bool:
    return _classical_compose(relation.pairs, relation.pairs) <= relation.pairs


def is_preorder(relation: MeasurableRelationFin) -> bool:
    return is_reflexive(relation) and is_transitive(relation)


def is_equivalence(relation: MeasurableRelationFin) -> bool:
    return is_preorder(relation) and is_symmetric(relation)


def classify(relation: MeasurableRelationFin) -> RelationKind:
    return classify_flags(is_reflexive(relation), is_symmetric(relation),
                          is_antisymmetric(relation), is_transitive(relation))


def pushforward(mapping: Sequence[int], relation: FiniteRelation, target: FinSet) -> FiniteRelation:
    """Image relation {(f x, f y)} of a total map f given as an index table"""
    _check_map(mapping, relation.base, target)
    return FiniteRelation(target, frozenset((mapping[x], mapping[y]) for x, y in relation.pairs))


def pullback(mapping: Sequence[int], relation: MeasurableRelationFin,
             source: FinSet) -> MeasurableRelationFin:
    """Preimage relation {(y, y') : (g y, g y') in R} on the source of g: Y -> X"""
    _check_map(mapping, source, relation.base)
    n = source.size
    pairs = {(y, y2) for y in range(n) for y2 in range(n)
             if (mapping[y], mapping[y2]) in relation.pairs}
    return from_relation(FiniteRelation(source, frozenset(pairs)))


def pullback_along_homomorphism(mapping: Sequence[int], relation: MeasurableRelationFin,
                                target: FinSet) -> MeasurableRelationFin:
    """Relation on X pulled back along f -> f o g from a relation on Y, g: Y -> X.

    (S, T) is a member iff (g^-1 S, g^-1 T) is a member of the relation on Y.
    """
    _check_map(mapping, relation.base, target)
    source = relation.base

    def predicate(s: Subset, t: Subset) -> bool:
        pre_s = frozenset(y for y in range(source.size) if mapping[y] in s)
        pre_t = frozenset(y for y in range(source.size) if mapping[y] in t)
        return relation.holds(pre_s, pre_t)

    pairs = {(x, z) for x in range(target.size) for z in range(target.size)
             if predicate(frozenset({x}), frozenset({z}))}
    return from_relation(FiniteRelation(target, frozenset(pairs)))


def _check_map(mapping: Sequence[int], source: FinSet, target: FinSet):
    if len(mapping) != source.size:
        raise ValidationError("Map must be total on its source",
                              witness={'expected': source.size, 'got': len(mapping)})
    for x, image in enumerate(mapping):
        if not 0 <= image < target.size:
            raise ValidationError("Map leaves its target", witness=[x, image])


@dataclass(frozen=True)
class SubsetLattice:
    """Complete 0,1-sublattice of the Boolean algebra of subsets of X"""

    base: FinSet
    members: FrozenSet[Subset] = frozenset()

    def __post_init__(self):
        members = frozenset(self.base.check_subset(s) for s in self.members)
        object.__setattr__(self, 'members', members)
        if frozenset() not in members or self.base.everything not in members:
            raise ValidationError("Lattice must contain the empty set and X")
        for s in members:
            for t in members:
                if s | t not in members:
                    raise ValidationError("Lattice is not closed under union",
                                          witness=[_show(s), _show(t)])
                if s & t not in members:
                    raise ValidationError("Lattice is not closed under intersection",
                                          witness=[_show(s), _show(t)])

    @property
    def is_boolean(self) -> bool:
        return all(self.base.complement(s) in self.members for s in self.members)

    def sorted_members(self) -> List[List[int]]:
        return sorted((_show(s) for s in self.members), key=lambda s: (len(s), s))


def lattice_of_preorder(relation: MeasurableRelationFin) -> SubsetLattice:
    """Lower sets: S with (X - S, S) outside the relation"""
    if not is_reflexive(relation):
        missing = next(x for x in range(relation.base.size) if (x, x) not in relation.pairs)
        raise ValidationError("Relation is not reflexive", witness=[missing, missing])
    if not is_transitive(relation):
        extra = sorted(_classical_compose(relation.pairs, relation.pairs) - relation.pairs)[0]
        raise ValidationError("Relation is not transitive", witness=list(extra))
    base = relation.base
    lower = frozenset(s for s in base.subsets() if not relation.holds(base.complement(s), s))
    return SubsetLattice(base, lower)


def preorder_of_lattice(lattice: SubsetLattice) -> MeasurableRelationFin:
    """(p, q) is a member iff p meets every lattice element containing q"""
    base = lattice.base

    def predicate(p: Subset, q: Subset) -> bool:
        return all(p & q2 for q2 in lattice.members if q <= q2)

    pairs = {(x, y) for x in range(base.size) for y in range(base.size)
             if predicate(frozenset({x}), frozenset({y}))}
    relation = from_relation(FiniteRelation(base, frozenset(pairs)))
    for p in base.subsets(nonempty=True):
        for q in base.subsets(nonempty=True):
            if relation.holds(p, q) != predicate(p, q):
                raise ValidationError("Lattice predicate is not measurable",
                                      witness=[_show(p), _show(q)])
    return relation


def reduce_pair(relation: MeasurableRelationFin, p: Iterable[int],
                q: Iterable[int]) -> Tuple[Subset, Subset]:
    """Shrink a member pair (p, q) to (p', q') whose every nonempty piece stays related.

    r collects the parts of p unrelated to q and s the parts of q unrelated to p;
    the result is (p - r, q - s).
    """
    p = relation.base.check_subset(p)
    q = relation.base.check_subset(q)
    if not relation.member(p, q):
        raise ValidationError("Pair is not a member of the relation",
                              witness=[_show(p), _show(q)])
    r = frozenset().union(*[a for a in subsets_of(p) if not relation.holds(a, q)])
    s = frozenset().union(*[b for b in subsets_of(q) if not relation.holds(p, b)])
    reduced = (p - r, q - s)
    logger.debug("reduced %s x %s to %s x %s", _show(p), _show(q),
                 _show(reduced[0]), _show(reduced[1]))
    return reduced


@dataclass(frozen=True)
class FinPseudometric:
    """Atom distances in [0, inf] defining rho(S, T) = min over S x T"""

    base: FinSet
    d: Tuple[Tuple[Distance, ...], ...] = field(default=())

    def __post_init__(self):
        n = self.base.size
        if len(self.d) != n or any(len(row) != n for row in self.d):
            raise ValidationError("Distance table must be |X| x |X|")
        rows = tuple(tuple(_distance(v) for v in row) for row in self.d)
        object.__setattr__(self, 'd', rows)
        for x in range(n):
            if rows[x][x] != 0:
                raise ValidationError("Distance from an atom to itself must be 0", witness=[x, x])
            for y in range(n):
                if rows[x][y] < 0:
                    raise ValidationError("Distances must be nonnegative", witness=[x, y])
                if rows[x][y] != rows[y][x]:
                    raise ValidationError("Distance table is not symmetric", witness=[x, y])
                for z in range(n):
                    if rows[x][z] > rows[x][y] + rows[y][z]:
                        raise ValidationError("Triangle inequality fails", witness=[x, y, z])


def _distance(value: Any) -> Distance:
    if isinstance(value, float) and math.isinf(value):
        return INF
    if value == 'inf':
        return INF
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10 ** 12)
    return Fraction(value)


def rho(metric: FinPseudometric, s: Iterable[int], t: Iterable[int]) -> Distance:
    s = metric.base.check_subset(s)
    t = metric.base.check_subset(t)
    if not s or not t:
        raise EmptySubsetError("Distance is defined between nonempty subsets",
                               witness=[_show(s), _show(t)])
    return min(metric.d[x][y] for x in s for y in t)


def relation_at(metric: FinPseudometric, t: Any) -> MeasurableRelationFin:
    """R_t = {(S, T) : rho(S, T) < t}"""
    t = _distance(t)
    if t <= 0:
        raise ValidationError("Threshold must be positive", witness=str(t))
    n = metric.base.size
    pairs = frozenset((x, y) for x in range(n) for y in range(n) if metric.d[x][y] < t)
    relation = from_relation(FiniteRelation(metric.base, pairs))
    if not (is_reflexive(relation) and is_symmetric(relation)):
        raise ValidationError("Threshold relation must be reflexive and symmetric")
    return relation


def modulus(value: Any) -> Union[Fraction, float]:
    """|z|, exact for real rational values"""
    if isinstance(value, GaussianRational):
        if value.im == 0:
            return abs(value.re)
        return math.hypot(float(value.re), float(value.im))
    if isinstance(value, (int, Fraction)):
        return abs(Fraction(value))
    return abs(value)


def lipschitz_ratio(numerator: Any, distance: Distance) -> Distance:
    """numerator / distance with 0/0 = 0"""
    if distance == INF:
        return Fraction(0)
    if distance == 0:
        return Fraction(0) if numerator == 0 else INF
    if isinstance(numerator, float):
        return numerator / float(distance)
    return Fraction(numerator) / distance


def lipschitz(metric: FinPseudometric, values: Sequence[Any]) -> Distance:
    """Lipschitz number of f: X -> C, maximized over atom pairs"""
    n = metric.base.size
    if len(values) != n:
        raise ValidationError("Function needs one value per atom",
                              witness={'expected': n, 'got': len(values)})
    best: Distance = Fraction(0)
    for x in range(n):
        for y in range(x + 1, n):
            ratio = lipschitz_ratio(modulus(values[x] - values[y]), metric.d[x][y])
            if ratio > best:
                best = ratio
    return best


def distance_function(metric: FinPseudometric, r: Iterable[int], cap: Any) -> Tuple[Distance, ...]:
    """x -> min(d(x, r), c)"""
    r = metric.base.check_subset(r)
    if not r:
        raise EmptySubsetError("Distance function needs a nonempty target set", witness=[])
    cap = _distance(cap)
    if cap <= 0 or cap == INF:
        raise ValidationError("Cap must be positive", witness=str(cap))
    return tuple(min(rho(metric, {x}, r), cap) for x in range(metric.base.size))
