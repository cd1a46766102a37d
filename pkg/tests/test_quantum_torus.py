import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from core import quantum_torus as qt
from core.errors import ValidationError
from core.quantum_torus import CoefficientFunction, Hbar, TorusOperator, TransInvSubspace
from tests.strategies import coefficient_functions, hbars, torus_operators

WINDOW = (-3, 3, -3, 3)
THIRD = Hbar(Fraction(1, 3))
PI = Hbar(Fraction(1))


# Independent model of the generators, one shift at a time

def angle_unit(hbar):
    return math.pi if hbar.times_pi else 1.0


def oracle_eval(f, hbar, m, n):
    total = f.table_map.get((m, n), 0j)
    for (x, y), value in f.waves:
        total += value * cmath.exp(1j * (m * float(x) + n * float(y)) * angle_unit(hbar))
    return total


def step_u(vector, s, h):
    return {(m + s, n): c * cmath.exp(-1j * s * h * n / 2) for (m, n), c in vector.items()}


def step_v(vector, s, h):
    return {(m, n + s): c * cmath.exp(1j * s * h * m / 2) for (m, n), c in vector.items()}


def oracle_monomial(vector, k, l, h):
    for _ in range(abs(l)):
        vector = step_v(vector, 1 if l > 0 else -1, h)
    for _ in range(abs(k)):
        vector = step_u(vector, 1 if k > 0 else -1, h)
    return vector


def oracle_apply(operator, vector):
    out = {}
    for (k, l), f in operator.diagonals:
        for point, c in oracle_monomial(vector, k, l, operator.hbar.radians).items():
            out[point] = out.get(point, 0j) + c * oracle_eval(f, operator.hbar, *point)
    return out


def oracle_window(apply, window=WINDOW):
    points = [(m, n) for m in range(window[0], window[1] + 1)
              for n in range(window[2], window[3] + 1)]
    out = np.zeros((len(points), len(points)), dtype=complex)
    for col, p in enumerate(points):
        image = apply({p: 1})
        for row, q in enumerate(points):
            out[row, col] = image.get(q, 0j)
    return out


def close(a, b, tol=1e-10):
    return np.allclose(a, b, rtol=0, atol=tol)


class TestHbar:
    def test_units(self):
        assert THIRD.radians == pytest.approx(math.pi / 3)
        assert Hbar(Fraction(1, 2), times_pi=False).radians == 0.5
        assert THIRD.negated().value == Fraction(-1, 3)

    def test_reduce(self):
        assert THIRD.reduce(Fraction(7, 3)) == Fraction(1, 3)
        assert THIRD.reduce(Fraction(-1, 3)) == Fraction(5, 3)
        assert Hbar(1, times_pi=False).reduce(Fraction(7)) == 7

    def test_phase(self):
        assert PI.phase(Fraction(1)) == pytest.approx(-1)
        assert Hbar(1, times_pi=False).phase(Fraction(1)) == pytest.approx(cmath.exp(1j))
        assert str(THIRD) == '1/3pi'


class TestCoefficientFunction:
    def test_build_drops_zeros(self):
        f = CoefficientFunction.build({(0, 0): 0}, {(1, 1): 0, (2, 2): 1})
        assert f.waves == ()
        assert f.table == (((2, 2), 1 + 0j),)
        assert f.is_finitely_supported()
        assert not f.is_constant()

    def test_constant(self):
        f = CoefficientFunction.constant(3)
        assert f.is_constant()
        assert f.constant_value() == 3
        assert f.evaluate(THIRD, 5, -4) == pytest.approx(3)

    @given(st.data())
    def test_evaluate(self, data):
        hbar = data.draw(hbars())
        f = data.draw(coefficient_functions(hbar))
        for m, n in [(0, 0), (1, -2), (3, 4), (-5, 2)]:
            assert f.evaluate(hbar, m, n) == pytest.approx(oracle_eval(f, hbar, m, n), abs=1e-10)

    @given(st.data())
    def test_pointwise_operations(self, data):
        hbar = data.draw(hbars())
        f = data.draw(coefficient_functions(hbar))
        g = data.draw(coefficient_functions(hbar))
        k, l = data.draw(st.tuples(st.integers(-2, 2), st.integers(-2, 2)))
        for m, n in [(0, 0), (1, -1), (-2, 2), (3, 0)]:
            fv, gv = oracle_eval(f, hbar, m, n), oracle_eval(g, hbar, m, n)
            assert f.add(g).evaluate(hbar, m, n) == pytest.approx(fv + gv, abs=1e-10)
            assert f.multiply(g, hbar).evaluate(hbar, m, n) == pytest.approx(fv * gv, abs=1e-9)
            assert f.conjugate(hbar).evaluate(hbar, m, n) == pytest.approx(fv.conjugate(), abs=1e-10)
            shifted = oracle_eval(f, hbar, m - k, n - l)
            assert f.shift(k, l, hbar).evaluate(hbar, m, n) == pytest.approx(shifted, abs=1e-10)

    def test_times_character(self):
        f = CoefficientFunction.character(Fraction(1, 3), 0).times_character(Fraction(5, 3), 0, THIRD)
        assert f.equals(CoefficientFunction.constant(1))

    def test_equals(self):
        f = CoefficientFunction.build({(0, 1): 2}, {(0, 0): 1j})
        assert f.equals(f.scale(1 + 1e-12))
        assert not f.equals(f.scale(2))


class TestOperators:
    @given(st.data())
    def test_entries_match_generators(self, data):
        hbar = data.draw(hbars())
        a = data.draw(torus_operators(hbar))
        assert close(a.window_matrix(WINDOW), oracle_window(lambda v: oracle_apply(a, v)))

    @given(st.data())
    def test_apply(self, data):
        hbar = data.draw(hbars())
        a = data.draw(torus_operators(hbar))
        vector = {(0, 0): 1, (1, -1): 2j}
        expected = oracle_apply(a, vector)
        got = a.apply(vector)
        for point in set(expected) | set(got):
            assert got.get(point, 0j) == pytest.approx(expected.get(point, 0j), abs=1e-10)

    @given(st.data())
    def test_multiply(self, data):
        hbar = data.draw(hbars())
        a = data.draw(torus_operators(hbar))
        b = data.draw(torus_operators(hbar))
        product = qt.multiply(a, b)
        expected = oracle_window(lambda v: oracle_apply(a, oracle_apply(b, v)))
        assert close(product.window_matrix(WINDOW), expected, 1e-9)

    @given(st.data())
    def test_adjoint(self, data):
        hbar = data.draw(hbars())
        a = data.draw(torus_operators(hbar))
        assert close(qt.adjoint(a).window_matrix(WINDOW), a.window_matrix(WINDOW).conj().T)
        assert qt.adjoint(qt.adjoint(a)).equals(a)

    def test_anticommuting_generators(self):
        u, v = TorusOperator.shift_u(PI), TorusOperator.shift_v(PI)
        assert qt.multiply(u, v).equals(qt.multiply(v, u).scale(-1))

    @given(hbars())
    def test_commutation_relation(self, hbar):
        u, v = TorusOperator.shift_u(hbar), TorusOperator.shift_v(hbar)
        twisted = qt.multiply(v, u).scale(hbar.phase(-hbar.value))
        assert qt.multiply(u, v).equals(twisted)

    @given(hbars())
    def test_generators_are_unitary(self, hbar):
        identity = TorusOperator.identity(hbar)
        for g in (TorusOperator.shift_u(hbar), TorusOperator.shift_v(hbar)):
            assert qt.multiply(g, qt.adjoint(g)).equals(identity)
            assert qt.multiply(qt.adjoint(g), g).equals(identity)

    def test_mixed_hbar(self):
        with pytest.raises(ValidationError):
            qt.multiply(TorusOperator.shift_u(PI), TorusOperator.shift_u(THIRD))

    def test_subtract_to_zero(self):
        a = TorusOperator.monomial(THIRD, 1, -1, 2j)
        assert a.subtract(a).diagonals == ()
        assert a.has_waves()
        assert not TorusOperator.multiplication(THIRD, CoefficientFunction.finite({(0, 0): 1})).has_waves()


class TestTheta:
    @given(st.data())
    def test_conjugation_by_character(self, data):
        hbar = data.draw(hbars())
        a = data.draw(torus_operators(hbar))
        x, y = 0.7, -1.3
        points = [(m, n) for m in range(-3, 4) for n in range(-3, 4)]
        chi = np.array([cmath.exp(1j * (m * x + n * y)) for m, n in points])
        expected = np.outer(chi, chi.conj()) * a.window_matrix(WINDOW)
        assert close(qt.theta(a, x, y).window_matrix(WINDOW), expected)

    @given(st.data())
    def test_automorphism(self, data):
        hbar = data.draw(hbars())
        a = data.draw(torus_operators(hbar))
        b = data.draw(torus_operators(hbar))
        x, y = 0.4, 2.1
        assert qt.theta(qt.multiply(a, b), x, y).equals(
            qt.multiply(qt.theta(a, x, y), qt.theta(b, x, y)))
        assert qt.theta(qt.theta(a, x, y), -x, -y).equals(a)
        assert qt.theta(a, 2 * math.pi, 0).equals(a)


class TestFourierAndCesaro:
    def sample_operator(self, hbar=THIRD):
        return TorusOperator.build(hbar, {
            (0, 0): CoefficientFunction.build({(Fraction(1, 3), 0): 1}, {(0, 0): 2}),
            (1, 0): CoefficientFunction.constant(1j),
            (-1, 1): CoefficientFunction.finite({(0, 1): 3, (-1, 1): -1}),
            (2, -2): CoefficientFunction.constant(0.5),
        })

    def test_fourier_term_by_quadrature(self):
        a = self.sample_operator()
        steps = 16
        grid = [2 * math.pi * (j + 0.5) / steps for j in range(steps)]
        rotated = [(x, y, qt.theta(a, x, y)) for x in grid for y in grid]
        for k, l in [(0, 0), (1, 0), (-1, 1), (0, 1)]:
            term = qt.fourier_term(a, k, l)
            for m, n in [(0, 0), (1, 0), (0, 1)]:
                for m2, n2 in [(m + k, n + l), (m, n), (m + 1, n)]:
                    average = sum(cmath.exp(-1j * (k * x + l * y)) * r.entry(m, n, m2, n2)
                                  for x, y, r in rotated) / steps ** 2
                    assert term.entry(m, n, m2, n2) == pytest.approx(average, abs=1e-10)

    def test_missing_term_is_zero(self):
        assert qt.fourier_term(self.sample_operator(), 5, 5).diagonals == ()

    def test_first_order_is_the_diagonal(self):
        a = self.sample_operator()
        assert qt.cesaro(a, 1).equals(qt.fourier_term(a, 0, 0))

    @pytest.mark.parametrize('order', [2, 3, 4])
    def test_average_of_partial_sums(self, order):
        a = self.sample_operator()
        total = TorusOperator.zero(a.hbar)
        for p in range(order):
            for q in range(order):
                for (k, l), _ in a.diagonals:
                    if abs(k) <= p and abs(l) <= q:
                        total = total.add(qt.fourier_term(a, k, l))
        assert qt.cesaro(a, order).equals(total.scale(1 / order ** 2))

    def test_weights(self):
        assert qt.fejer_weight(0, 0, 3) == 1
        assert qt.fejer_weight(1, 2, 3) == pytest.approx((2 / 3) * (1 / 3))
        assert qt.fejer_weight(3, 0, 3) == 0

    def test_order_must_be_positive(self):
        with pytest.raises(ValidationError):
            qt.cesaro(self.sample_operator(), 0)

    @settings(max_examples=50)
    @given(st.data())
    def test_cesaro_does_not_increase_norm(self, data):
        hbar = data.draw(hbars())
        a = data.draw(torus_operators(hbar, finite=True))
        box = qt.support_box(a)
        assume(box is not None)
        bound = np.linalg.norm(a.window_matrix(box), 2)
        for order in range(1, 7):
            assert np.linalg.norm(qt.cesaro(a, order).window_matrix(box), 2) <= bound + 1e-7


class TestWindowNorm:
    def test_weighted_shift(self):
        a = TorusOperator.build(THIRD, {(1, 0): CoefficientFunction.finite({(1, 0): 2, (2, 1): -1j})})
        assert qt.support_box(a) == (0, 2, 0, 1)
        assert qt.window_norm(a) == pytest.approx(2, rel=1e-6)

    @given(st.data())
    def test_agrees_with_singular_values(self, data):
        hbar = data.draw(hbars())
        a = data.draw(torus_operators(hbar, finite=True))
        box = qt.support_box(a)
        estimate = qt.window_norm(a)
        if box is None:
            assert estimate == 0.0
            return
        exact = np.linalg.norm(a.window_matrix(box), 2)
        assert estimate <= exact + 1e-7
        assert estimate == pytest.approx(exact, rel=1e-3, abs=1e-9)

    def test_close_singular_values(self):
        a = TorusOperator.multiplication(THIRD, CoefficientFunction.finite(
            {(0, 0): 0.998, (1, 0): 1, (0, 1): 0.5}))
        estimate = qt.window_norm(a)
        assert estimate <= 1 + 1e-12
        assert estimate == pytest.approx(1, abs=1e-9)

    def test_refuses_waves(self):
        with pytest.raises(ValidationError):
            qt.window_norm(TorusOperator.shift_u(THIRD))

    def test_zero(self):
        assert qt.window_norm(TorusOperator.zero(THIRD)) == 0.0


class TestConjugateAlgebra:
    @given(hbars(), st.integers(-2, 2), st.integers(-2, 2))
    def test_conjugate_monomial_uses_negated_hbar(self, hbar, k, l):
        c = 2 - 1j
        op = qt.conjugate_monomial(hbar, k, l, c)
        h = -hbar.radians
        expected = oracle_window(lambda v: {p: c * x for p, x in oracle_monomial(v, k, l, h).items()})
        assert close(op.window_matrix(WINDOW), expected)

    @given(hbars())
    def test_conjugates_commute_with_generators(self, hbar):
        zero = TorusOperator.zero(hbar)
        for g in (TorusOperator.shift_u(hbar), TorusOperator.shift_v(hbar)):
            for c in qt.conjugate_generators(hbar):
                assert qt.commutator(g, c).equals(zero)

    def test_membership(self):
        a = TorusOperator.monomial(THIRD, 1, 0, 2).add(TorusOperator.monomial(THIRD, 0, 2, 3))
        assert qt.in_torus_algebra(a)
        assert not qt.in_conjugate_algebra(a)
        c = qt.conjugate_monomial(THIRD, 2, -1, 3)
        assert qt.in_conjugate_algebra(c)
        assert not qt.in_torus_algebra(c)
        assert qt.rephased_coefficient(c, 2, -1).equals(CoefficientFunction.constant(3))

    @given(st.data())
    def test_shifted_term_law(self, data):
        hbar = data.draw(hbars())
        a = data.draw(torus_operators(hbar))
        m, n, k, l = data.draw(st.tuples(*[st.integers(-2, 2)] * 4))
        assert qt.shifted_term_law_holds(a, m, n, k, l)

    def test_commutant_coefficients(self):
        a = (TorusOperator.monomial(THIRD, 1, 0, 2)
             .add(TorusOperator.monomial(THIRD, 0, 2, 3))
             .add(TorusOperator.monomial(THIRD, 1, 1, -1j)))
        assert qt.commutes_with_conjugates(a)
        for k, l in [(1, 0), (0, 2), (1, 1), (0, 0)]:
            assert qt.commutant_coefficient_holds(a, k, l, (-2, 2, -2, 2))

    def test_commutant_coefficients_need_commutation(self):
        with pytest.raises(ValidationError):
            qt.commutant_coefficient_holds(qt.conjugate_monomial(THIRD, 1, 0), 1, 0, (0, 1, 0, 1))


class TestTranslationInvariance:
    difference = (((0, 0), 1 + 0j), ((1, 0), -1 + 0j))

    def test_everything_and_finite(self):
        wave = CoefficientFunction.character(Fraction(1, 3), 0)
        finite = CoefficientFunction.finite({(4, 4): 1})
        assert TransInvSubspace(everything=True).contains(wave)
        assert TransInvSubspace(all_finite=True).contains(finite)
        assert not TransInvSubspace(all_finite=True).contains(wave)

    def test_frequencies_reduce_with_hbar(self):
        space = TransInvSubspace(frequencies=frozenset({(Fraction(0), Fraction(-1, 3))}))
        u = TorusOperator.shift_u(THIRD)
        g = qt.rephased_coefficient(u, 1, 0)
        assert g.wave_map == {(Fraction(0), Fraction(5, 3)): pytest.approx(1)}
        assert space.contains(g, THIRD)
        assert not space.contains(g)
        assert qt.is_translation_invariant_relation([u], space).passed

    def test_difference_generator(self):
        space = TransInvSubspace(generators=(self.difference,))
        assert space.contains(CoefficientFunction.finite({(3, 2): 1, (4, 2): -1}))
        assert space.contains(CoefficientFunction.finite({(0, 0): 1, (2, 0): -1}))
        assert not space.contains(CoefficientFunction.finite({(0, 0): 1}))
        assert not space.contains(CoefficientFunction.finite({(0, 0): 1, (0, 1): -1}))

    def test_combinations_cancelling_outside_the_target(self):
        pair = (((0, 0), 1 + 0j), ((1, 0), 1 + 0j))
        weighted = (((0, 0), 1 + 0j), ((1, 0), 2 + 0j))
        space = TransInvSubspace(generators=(pair, weighted))
        assert space.contains(CoefficientFunction.finite({(1, 0): 1}))
        assert space.contains(CoefficientFunction.finite({(0, 0): 1}))
        assert space.contains(CoefficientFunction.finite({(-4, 3): 2j}))
        assert not TransInvSubspace(generators=(pair,)).contains(CoefficientFunction.finite({(1, 0): 1}))

        a = TorusOperator.build(THIRD, {(0, 0): CoefficientFunction.finite({(1, 0): 1})})
        assert qt.is_translation_invariant_relation([a], space).passed

    @given(st.data())
    def test_sums_of_translates_are_members(self, data):
        values = st.sampled_from([1, -1, 2, 1j, -2j])
        generators = tuple(
            (((0, 0), complex(data.draw(values))), ((1, 0), complex(data.draw(values))))
            for _ in range(2)
        )
        table = {}
        for _ in range(data.draw(st.integers(1, 4))):
            generator = data.draw(st.sampled_from(generators))
            a, b = data.draw(st.integers(-2, 2)), data.draw(st.integers(-1, 1))
            c = complex(data.draw(values))
            for (m, n), value in generator:
                table[(m + a, n + b)] = table.get((m + a, n + b), 0j) + c * value
        space = TransInvSubspace(generators=generators)
        assert space.contains(CoefficientFunction.finite(table))

    def test_report_lists_failures(self):
        space = TransInvSubspace(frequencies=frozenset({(Fraction(0), Fraction(5, 3))}))
        generators = [TorusOperator.shift_u(THIRD), TorusOperator.identity(THIRD)]
        report = qt.is_translation_invariant_relation(generators, space)
        assert not report.passed
        assert report.checked == 2
        assert report.to_dict() == {'passed': False, 'checked': 2,
                                    'failures': [{'generator': 1, 'k': 0, 'l': 0}]}

    def test_finitely_supported_terms(self):
        a = TorusOperator.build(THIRD, {(1, 0): CoefficientFunction.finite({(2, 0): 1, (3, 0): -1})})
        assert qt.is_translation_invariant_relation([a], TransInvSubspace(all_finite=True)).passed
        report = qt.is_translation_invariant_relation([a], TransInvSubspace(generators=(self.difference,)))
        assert report.checked == 1
        assert report.passed

    def test_empty_generator_list(self):
        report = qt.is_translation_invariant_relation([], TransInvSubspace())
        assert report.passed and report.checked == 0
