from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core import finite_relations as fr
from core.errors import EmptySubsetError, ValidationError
from core.finite_relations import (INF, FinPseudometric, FinSet, FiniteRelation,
                                   RelationKind, SubsetLattice)
from tests.strategies import (mappings, pseudometrics, rational_values, relations,
                              sized_relations)


def relation(size, pairs):
    return fr.from_relation(FiniteRelation(FinSet.of_size(size), frozenset(pairs)))


def every_relation(size):
    cells = [(x, y) for x in range(size) for y in range(size)]
    for mask in range(1 << len(cells)):
        yield relation(size, [c for k, c in enumerate(cells) if mask >> k & 1])


def line_metric(*positions):
    n = len(positions)
    table = tuple(tuple(Fraction(abs(positions[x] - positions[y])) for y in range(n))
                  for x in range(n))
    return FinPseudometric(FinSet.of_size(n), table)


class TestFinSet:
    def test_labels_must_be_distinct(self):
        with pytest.raises(ValidationError):
            FinSet(('a', 'a'))

    def test_weights_must_be_positive(self):
        with pytest.raises(ValidationError):
            FinSet(('a', 'b'), (1, 0))

    def test_default_weights(self):
        assert FinSet.of_size(3).weights == (1, 1, 1)

    def test_subset_range(self):
        with pytest.raises(ValidationError):
            FinSet.of_size(2).check_subset({2})

    def test_pairs_must_lie_in_the_square(self):
        with pytest.raises(ValidationError):
            FiniteRelation(FinSet.of_size(2), frozenset({(0, 2)}))


class TestFilters:
    def test_all_nonempty_subsets(self):
        base = FinSet.of_size(2)
        assert fr.filter_to_support(base, base.subsets(nonempty=True)) == {0, 1}

    def test_principal_filter(self):
        assert fr.filter_to_support(FinSet.of_size(2), [{0}, {0, 1}]) == {0}

    def test_empty_family(self):
        assert fr.filter_to_support(FinSet.of_size(2), []) == frozenset()

    def test_join_violation(self):
        with pytest.raises(ValidationError) as info:
            fr.filter_to_support(FinSet.of_size(2), [{0, 1}])
        assert info.value.witness['join'] == [0, 1]

    def test_not_upward_closed(self):
        with pytest.raises(ValidationError):
            fr.filter_to_support(FinSet.of_size(2), [{0}])

    def test_empty_set_is_not_a_member(self):
        with pytest.raises(ValidationError):
            fr.filter_to_support(FinSet.of_size(2), [set(), {0}, {0, 1}])


class TestMembership:
    def test_single_pair(self):
        r = fr.from_relation(FiniteRelation(FinSet(('a', 'b')), frozenset({(0, 1)})))
        assert r.member({0}, {1})
        assert not r.member({1}, {0})
        assert r.member({0, 1}, {0, 1})

    def test_empty_arguments(self):
        r = relation(2, [(0, 1)])
        with pytest.raises(EmptySubsetError):
            r.member(set(), {1})
        assert not r.holds(frozenset(), frozenset({1}))

    @given(sized_relations(1, 4))
    def test_round_trip(self, r):
        assert fr.to_relation(fr.from_relation(r)) == r

    @given(sized_relations(1, 3))
    def test_axioms_hold(self, r):
        measurable = fr.from_relation(r)
        assert fr.measurable_axiom_violation(r.base, measurable.holds) is None

    @pytest.mark.slow
    def test_axioms_hold_for_every_relation_up_to_three_points(self):
        for size in (1, 2, 3):
            for r in every_relation(size):
                assert fr.measurable_axiom_violation(r.base, r.holds) is None

    @pytest.mark.slow
    @settings(max_examples=200)
    @given(relations(4))
    def test_axioms_hold_on_four_points(self, r):
        measurable = fr.from_relation(r)
        assert fr.measurable_axiom_violation(r.base, measurable.holds) is None


    def test_upward_closure_violation(self):
        base = FinSet.of_size(2)
        with pytest.raises(ValidationError) as info:
            fr.measurable_from_predicate(base, lambda s, t: s == t)
        assert info.value.witness['rule'] == 'upward_closure'

    def test_join_split_violation(self):
        base = FinSet.of_size(2)
        with pytest.raises(ValidationError) as info:
            fr.measurable_from_predicate(base, lambda s, t: len(s) == 2)
        assert info.value.witness['rule'] == 'join_split_left'

    def test_predicate_from_pairs(self):
        base = FinSet.of_size(3)
        r = relation(3, [(0, 1), (2, 2)])
        built = fr.measurable_from_predicate(base, r.holds)
        assert built.pairs == r.pairs


class TestPhi:
    def test_diagonal(self):
        r = fr.diagonal(FinSet.of_size(2))
        assert fr.phi_map(r, {0}) == {0}
        assert fr.phi_map(r, set()) == frozenset()

    def test_full(self):
        r = fr.full(FinSet.of_size(2))
        assert fr.phi_map(r, {0}) == {0, 1}

    @given(sized_relations(1, 3))
    def test_round_trip(self, r):
        measurable = fr.from_relation(r)
        again = fr.relation_of_phi(r.base, fr.phi_table(measurable))
        assert again.pairs == r.pairs

    @given(sized_relations(1, 3))
    def test_phi_preserves_unions(self, r):
        table = fr.phi_table(fr.from_relation(r))
        for s in r.base.subsets():
            for t in r.base.subsets():
                assert table[s | t] == table[s] | table[t]

    def test_nonempty_image_of_empty_set(self):
        base = FinSet.of_size(1)
        with pytest.raises(ValidationError):
            fr.relation_of_phi(base, {frozenset(): frozenset({0}), frozenset({0}): frozenset({0})})

    def test_missing_subsets(self):
        with pytest.raises(ValidationError):
            fr.relation_of_phi(FinSet.of_size(1), {frozenset(): frozenset()})


class TestComposition:
    def test_composition_needs_a_shared_point(self):
        # Y = {x, y1, y2, z} collapses onto X = {x, y, z}
        source = FinSet(('x', 'y1', 'y2', 'z'))
        target = FinSet(('x', 'y', 'z'))
        left = FiniteRelation(source, frozenset({(0, 1)}))
        right = FiniteRelation(source, frozenset({(2, 3)}))
        assert fr.compose(fr.from_relation(left), fr.from_relation(right)).pairs == frozenset()
        f = [0, 1, 1, 2]
        pushed = fr.compose(fr.from_relation(fr.pushforward(f, left, target)),
                            fr.from_relation(fr.pushforward(f, right, target)))
        assert pushed.pairs == {(0, 2)}

    @given(st.integers(1, 3).flatmap(lambda n: st.tuples(relations(n), relations(n))))
    def test_projection_conditions_agree(self, pair):
        left, right = (fr.from_relation(r) for r in pair)
        composed = fr.compose(left, right, cross_check=True)
        expected = {(x, z) for x, y in left.pairs for y2, z in right.pairs if y == y2}
        assert composed.pairs == expected

    @pytest.mark.slow
    def test_projection_conditions_agree_on_small_sets(self):
        for size in (1, 2):
            everything = list(every_relation(size))
            for left in everything:
                for right in everything:
                    composed = fr.compose(left, right, cross_check=True)
                    assert composed.pairs == {(x, z) for x, y in left.pairs
                                              for y2, z in right.pairs if y == y2}
        for r in every_relation(3):
            fr.compose(r, r, cross_check=True)
            fr.compose(r, fr.transpose(r), cross_check=True)
            fr.compose(fr.transpose(r), r, cross_check=True)

    @pytest.mark.slow
    @settings(max_examples=200)
    @given(st.tuples(relations(4), relations(4)))
    def test_projection_conditions_agree_on_four_points(self, pair):
        left, right = (fr.from_relation(r) for r in pair)
        composed = fr.compose(left, right, cross_check=True)
        assert composed.pairs == {(x, z) for x, y in left.pairs for y2, z in right.pairs if y == y2}


    @given(sized_relations(1, 3))
    def test_transpose_is_involutive(self, r):
        measurable = fr.from_relation(r)
        assert fr.transpose(fr.transpose(measurable)).pairs == r.pairs

    @given(st.integers(1, 3).flatmap(lambda n: st.tuples(relations(n), relations(n))))
    def test_transpose_reverses_products(self, pair):
        left, right = (fr.from_relation(r) for r in pair)
        assert (fr.transpose(fr.compose(left, right)).pairs
                == fr.compose(fr.transpose(right), fr.transpose(left)).pairs)

    def test_different_bases(self):
        with pytest.raises(ValidationError):
            fr.compose(relation(2, []), relation(3, []))

    def test_lattice_operations(self):
        a = relation(2, [(0, 1)])
        b = relation(2, [(1, 0), (0, 1)])
        assert fr.intersect(a, b).pairs == {(0, 1)}
        assert fr.union(a, b).pairs == {(0, 1), (1, 0)}
        assert fr.is_subrelation(a, b)
        assert not fr.is_subrelation(b, a)


class TestClassification:
    def test_examples(self):
        assert fr.classify(relation(2, [(0, 0), (1, 1), (0, 1)])) is RelationKind.PARTIAL_ORDER
        assert fr.classify(fr.full(FinSet.of_size(2))) is RelationKind.EQUIVALENCE
        assert fr.classify(relation(2, [])) is RelationKind.PLAIN
        assert fr.classify(relation(2, [(0, 0), (1, 1), (0, 1), (1, 0)])) is RelationKind.EQUIVALENCE
        graph = [(0, 0), (1, 1), (2, 2), (0, 1), (1, 0), (1, 2), (2, 1)]
        assert fr.classify(relation(3, graph)) is RelationKind.GRAPH

    def test_preorder(self):
        pairs = [(0, 0), (1, 1), (2, 2), (0, 1), (1, 0), (0, 2), (1, 2)]
        assert fr.classify(relation(3, pairs)) is RelationKind.PREORDER

    @pytest.mark.slow
    def test_counts_on_three_points(self):
        preorders = [r for r in every_relation(3) if fr.is_preorder(r)]
        assert len(preorders) == 29
        assert sum(1 for r in preorders if fr.is_equivalence(r)) == 5


class TestMaps:
    @given(st.integers(1, 3), st.integers(1, 3), st.data())
    def test_pullback_of_diagonal_is_reflexive(self, source_size, target_size, data):
        g = data.draw(mappings(source_size, target_size))
        pulled = fr.pullback(g, fr.diagonal(FinSet.of_size(target_size)),
                             FinSet.of_size(source_size))
        assert fr.is_equivalence(pulled)

    @given(st.integers(1, 3), st.data())
    def test_pushforward_preserves_pairs(self, size, data):
        r = data.draw(relations(size))
        f = data.draw(mappings(size, 2))
        pushed = fr.pushforward(f, r, FinSet.of_size(2))
        assert pushed.pairs == {(f[x], f[y]) for x, y in r.pairs}

    def test_pullback_along_swap(self):
        r = relation(2, [(0, 1)])
        pulled = fr.pullback_along_homomorphism([1, 0], r, FinSet.of_size(2))
        assert pulled.pairs == {(1, 0)}

    def test_pullback_along_collapse(self):
        r = relation(2, [(0, 1)])
        pulled = fr.pullback_along_homomorphism([0, 0], r, FinSet.of_size(1))
        assert pulled.pairs == {(0, 0)}

    def test_map_must_be_total(self):
        with pytest.raises(ValidationError):
            fr.pushforward([0], FiniteRelation(FinSet.of_size(2)), FinSet.of_size(2))
        with pytest.raises(ValidationError):
            fr.pushforward([0, 3], FiniteRelation(FinSet.of_size(2)), FinSet.of_size(2))


class TestLattices:
    def test_chain(self):
        lattice = fr.lattice_of_preorder(relation(2, [(0, 0), (1, 1), (0, 1)]))
        assert lattice.sorted_members() == [[], [0], [0, 1]]
        assert not lattice.is_boolean

    def test_discrete_and_indiscrete(self):
        base = FinSet.of_size(2)
        assert fr.lattice_of_preorder(fr.diagonal(base)).is_boolean
        indiscrete = SubsetLattice(base, frozenset({frozenset(), base.everything}))
        assert fr.preorder_of_lattice(indiscrete).pairs == fr.full(base).pairs

    def test_not_a_preorder(self):
        with pytest.raises(ValidationError) as info:
            fr.lattice_of_preorder(relation(2, [(0, 1)]))
        assert info.value.witness == [0, 0]

    def test_invalid_lattices(self):
        base = FinSet.of_size(3)
        with pytest.raises(ValidationError):
            SubsetLattice(base, frozenset({frozenset(), frozenset({0}), frozenset({1})}))
        with pytest.raises(ValidationError):
            SubsetLattice(base, frozenset({frozenset(), frozenset({0}), frozenset({1}),
                                           base.everything}))

    @pytest.mark.slow
    def test_every_preorder_on_three_points(self):
        for r in every_relation(3):
            if not fr.is_preorder(r):
                continue
            lattice = fr.lattice_of_preorder(r)
            assert fr.preorder_of_lattice(lattice).pairs == r.pairs
            assert lattice.is_boolean == fr.is_equivalence(r)
            again = fr.lattice_of_preorder(fr.preorder_of_lattice(lattice))
            assert again.members == lattice.members


class TestReducePair:
    @given(sized_relations(1, 3), st.data())
    def test_reduced_pieces_stay_related(self, r, data):
        measurable = fr.from_relation(r)
        members = [(p, q) for p in r.base.subsets(nonempty=True)
                   for q in r.base.subsets(nonempty=True) if measurable.member(p, q)]
        if not members:
            return
        p, q = data.draw(st.sampled_from(members))
        p2, q2 = fr.reduce_pair(measurable, p, q)
        assert p2 and q2 and p2 <= p and q2 <= q
        for a in fr.subsets_of(p2):
            assert measurable.holds(a, q2)
        for b in fr.subsets_of(q2):
            assert measurable.holds(p2, b)

    def test_non_member(self):
        with pytest.raises(ValidationError):
            fr.reduce_pair(relation(2, [(0, 1)]), {1}, {0})


class TestPseudometrics:
    def test_validation(self):
        base = FinSet.of_size(2)
        with pytest.raises(ValidationError):
            FinPseudometric(base, ((0, 1), (2, 0)))
        with pytest.raises(ValidationError):
            FinPseudometric(base, ((1, 1), (1, 0)))
        with pytest.raises(ValidationError):
            FinPseudometric(FinSet.of_size(3), ((0, 1, 5), (1, 0, 1), (5, 1, 0)))

    def test_infinite_distances(self):
        metric = FinPseudometric(FinSet.of_size(2), ((0, 'inf'), ('inf', 0)))
        assert metric.d[0][1] == INF
        assert fr.rho(metric, {0}, {1}) == INF
        assert fr.rho(metric, {0}, {0, 1}) == 0

    def test_rho_of_empty_set(self):
        with pytest.raises(EmptySubsetError):
            fr.rho(line_metric(0, 1), set(), {0})

    def test_lipschitz_examples(self):
        assert fr.lipschitz(line_metric(0, 1), [Fraction(0), Fraction(1)]) == 1
        assert fr.lipschitz(line_metric(0, 1), [Fraction(5), Fraction(5)]) == 0
        assert fr.lipschitz(line_metric(0, 1, 2), [Fraction(0), Fraction(2), Fraction(2)]) == 2

    def test_zero_distance_convention(self):
        metric = line_metric(0, 0)
        assert fr.lipschitz(metric, [Fraction(1), Fraction(1)]) == 0
        assert fr.lipschitz(metric, [Fraction(1), Fraction(2)]) == INF

    def test_one_value_per_atom(self):
        with pytest.raises(ValidationError):
            fr.lipschitz(line_metric(0, 1), [Fraction(0)])

    @staticmethod
    def brute_force_lipschitz(metric, values):
        best = Fraction(0)
        subsets = metric.base.subsets(nonempty=True)
        for s, t in product(subsets, subsets):
            gap = min(abs(values[x] - values[y]) for x in s for y in t)
            best = max(best, fr.lipschitz_ratio(gap, fr.rho(metric, s, t)))
        return best

    @given(st.integers(1, 3).flatmap(lambda n: st.tuples(pseudometrics(n), rational_values(n))))
    def test_atom_pairs_attain_the_maximum(self, case):
        metric, values = case
        assert fr.lipschitz(metric, values) == self.brute_force_lipschitz(metric, values)

    @settings(max_examples=100)
    @given(pseudometrics(4), rational_values(4))
    def test_atom_pairs_attain_the_maximum_on_four_points(self, metric, values):
        assert fr.lipschitz(metric, values) == self.brute_force_lipschitz(metric, values)


    @given(st.integers(1, 4).flatmap(pseudometrics),
           st.fractions(min_value=Fraction(1, 2), max_value=3, max_denominator=4),
           st.fractions(min_value=Fraction(1, 2), max_value=3, max_denominator=4))
    def test_threshold_relations_compose(self, metric, s, t):
        composed = fr.compose(fr.relation_at(metric, s), fr.relation_at(metric, t))
        assert fr.is_subrelation(composed, fr.relation_at(metric, s + t))

    def test_threshold_must_be_positive(self):
        with pytest.raises(ValidationError):
            fr.relation_at(line_metric(0, 1), 0)

    @given(st.integers(1, 4).flatmap(pseudometrics), st.data())
    def test_distance_functions_are_contractions(self, metric, data):
        r = data.draw(st.sampled_from(metric.base.subsets(nonempty=True)))
        cap = data.draw(st.integers(1, 5))
        values = fr.distance_function(metric, r, cap)
        assert all(v <= cap for v in values)
        assert all(values[x] == 0 for x in r)
        assert fr.lipschitz(metric, values) <= 1

    def test_distance_function_arguments(self):
        metric = line_metric(0, 1)
        with pytest.raises(EmptySubsetError):
            fr.distance_function(metric, set(), 1)
        with pytest.raises(ValidationError):
            fr.distance_function(metric, {0}, 0)
