"""
Symbolic operators on l^2(Z^2) built from the quantum torus generators

U e_{m,n} = e^{-i hbar n/2} e_{m+1,n} and V e_{m,n} = e^{i hbar m/2} e_{m,n+1},
so that U V = e^{-i hbar} V U. An operator is a finite sum over diagonals
(k, l) of M_f U^k V^l, where each coefficient function f is a finite sum of
characters chi_{x,y}(m, n) = e^{i(mx + ny)} plus a finitely supported table.
A constant is the character at frequency (0, 0).

Frequencies are stored exactly, in units of pi when hbar is given as a
rational multiple of pi and in radians otherwise. Scalars are complex doubles.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from core.errors import ValidationError

logger = logging.getLogger(__name__)

Index = Tuple[int, int]
Frequency = Tuple[Fraction, Fraction]

PRUNE = 1e-14


@dataclass(frozen=True)
class Hbar:
    """Deformation parameter, a rational multiple of pi or a rational in radians"""

    value: Fraction
    times_pi: bool = True

    def __post_init__(self):
        object.__setattr__(self, 'value', Fraction(self.value))

    @property
    def radians(self) -> float:
        return float(self.value) * math.pi if self.times_pi else float(self.value)

    def negated(self) -> 'Hbar':
        return Hbar(-self.value, self.times_pi)

    def reduce(self, angle: Fraction) -> Fraction:
        """Canonical representative of an angle given in this parameter's unit"""
        return angle % 2 if self.times_pi else angle

    def phase(self, angle: Fraction) -> complex:
        """e^{i angle} for an angle in this parameter's unit"""
        angle = self.reduce(angle)
        if self.times_pi:
            return cmath.exp(1j * math.pi * float(angle))
        return cmath.exp(1j * float(angle))

    def __str__(self) -> str:
        return f"{self.value}pi" if self.times_pi else str(self.value)


def _prune(values: Dict[Any, complex]) -> Dict[Any, complex]:
    return {k: v for k, v in values.items() if abs(v) > PRUNE}


@dataclass(frozen=True)
class CoefficientFunction:
    """f = sum_s c_s chi_s + finitely supported table, on Z^2"""

    waves: Tuple[Tuple[Frequency, complex], ...] = ()
    table: Tuple[Tuple[Index, complex], ...] = ()

    @classmethod
    def build(cls, waves: Dict[Frequency, complex] = None,
              table: Dict[Index, complex] = None) -> 'CoefficientFunction':
        waves = _prune({(Fraction(x), Fraction(y)): complex(v)
                        for (x, y), v in (waves or {}).items()})
        table = _prune({(int(m), int(n)): complex(v) for (m, n), v in (table or {}).items()})
        return cls(tuple(sorted(waves.items())), tuple(sorted(table.items())))

    @classmethod
    def constant(cls, value: complex) -> 'CoefficientFunction':
        return cls.build({(Fraction(0), Fraction(0)): value})

    @classmethod
    def character(cls, x: Fraction, y: Fraction, value: complex = 1) -> 'CoefficientFunction':
        return cls.build({(Fraction(x), Fraction(y)): value})

    @classmethod
    def finite(cls, table: Dict[Index, complex]) -> 'CoefficientFunction':
        return cls.build(table=table)

    @property
    def wave_map(self) -> Dict[Frequency, complex]:
        return dict(self.waves)

    @property
    def table_map(self) -> Dict[Index, complex]:
        return dict(self.table)

    def is_zero(self) -> bool:
        return not self.waves and not self.table

    def is_constant(self) -> bool:
        return not self.table and all(freq == (0, 0) for freq, _ in self.waves)

    def is_finitely_supported(self) -> bool:
        return not self.waves

    def constant_value(self) -> complex:
        return self.wave_map.get((Fraction(0), Fraction(0)), 0j)

    def evaluate(self, hbar: Hbar, m: int, n: int) -> complex:
        total = self.table_map.get((m, n), 0j)
        for (x, y), value in self.waves:
            total += value * hbar.phase(m * x + n * y)
        return total

    def add(self, other: 'CoefficientFunction') -> 'CoefficientFunction':
        waves = self.wave_map
        for freq, value in other.waves:
            waves[freq] = waves.get(freq, 0j) + value
        table = self.table_map
        for index, value in other.table:
            table[index] = table.get(index, 0j) + value
        return CoefficientFunction.build(waves, table)

    def scale(self, scalar: complex) -> 'CoefficientFunction':
        return CoefficientFunction.build({f: scalar * v for f, v in self.waves},
                                         {i: scalar * v for i, v in self.table})

    def multiply(self, other: 'CoefficientFunction', hbar: Hbar) -> 'CoefficientFunction':
        """Pointwise product; wave-table cross terms are finitely supported"""
        waves: Dict[Frequency, complex] = {}
        for (x1, y1), v1 in self.waves:
            for (x2, y2), v2 in other.waves:
                freq = (hbar.reduce(x1 + x2), hbar.reduce(y1 + y2))
                waves[freq] = waves.get(freq, 0j) + v1 * v2
        table: Dict[Index, complex] = {}
        points = set(self.table_map) | set(other.table_map)
        own_waves = CoefficientFunction(self.waves)
        other_waves = CoefficientFunction(other.waves)
        own_table, other_table = self.table_map, other.table_map
        for m, n in points:
            a_table = own_table.get((m, n), 0j)
            b_table = other_table.get((m, n), 0j)
            a_wave = own_waves.evaluate(hbar, m, n)
            b_wave = other_waves.evaluate(hbar, m, n)
            table[(m, n)] = a_wave * b_table + a_table * b_wave + a_table * b_table
        return CoefficientFunction.build(waves, table)

    def shift(self, k: int, l: int, hbar: Hbar) -> 'CoefficientFunction':
        """tau_{k,l} f (m, n) = f(m - k, n - l)"""
        waves = {(x, y): v * hbar.phase(-(k * x + l * y)) for (x, y), v in self.waves}
        table = {(m + k, n + l): v for (m, n), v in self.table}
        return CoefficientFunction.build(waves, table)

    def conjugate(self, hbar: Hbar) -> 'CoefficientFunction':
        waves = {(hbar.reduce(-x), hbar.reduce(-y)): v.conjugate() for (x, y), v in self.waves}
        return CoefficientFunction.build(waves, {i: v.conjugate() for i, v in self.table})

    def times_character(self, x: Fraction, y: Fraction, hbar: Hbar) -> 'CoefficientFunction':
        return self.multiply(CoefficientFunction.character(hbar.reduce(Fraction(x)),
                                                           hbar.reduce(Fraction(y))), hbar)

    def equals(self, other: 'CoefficientFunction', tolerance: float = 1e-9) -> bool:
        return self.add(other.scale(-1)).norm_bound() <= tolerance

    def norm_bound(self) -> float:
        """Sum of coefficient moduli, an upper bound for the sup norm"""
        return sum(abs(v) for _, v in self.waves) + sum(abs(v) for _, v in self.table)


def monomial_phase(hbar: Hbar, k: int, l: int, m: int, n: int) -> complex:
    """Phase of U^k V^l e_{m,n} = phase * e_{m+k, n+l}"""
    return hbar.phase(hbar.value * Fraction(m * l - k * n - k * l, 2))


@dataclass(frozen=True)
class TorusOperator:
    """A = sum over diagonals (k, l) of M_{f_{k,l}} U^k V^l"""

    hbar: Hbar
    diagonals: Tuple[Tuple[Index, CoefficientFunction], ...] = ()

    @classmethod
    def build(cls, hbar: Hbar, diagonals: Dict[Index, CoefficientFunction]) -> 'TorusOperator':
        kept = {(int(k), int(l)): f for (k, l), f in diagonals.items() if not f.is_zero()}
        return cls(hbar, tuple(sorted(kept.items())))

    @classmethod
    def zero(cls, hbar: Hbar) -> 'TorusOperator':
        return cls(hbar, ())

    @classmethod
    def monomial(cls, hbar: Hbar, k: int, l: int, coefficient: Any = 1) -> 'TorusOperator':
        if not isinstance(coefficient, CoefficientFunction):
            coefficient = CoefficientFunction.constant(coefficient)
        return cls.build(hbar, {(k, l): coefficient})

    @classmethod
    def identity(cls, hbar: Hbar) -> 'TorusOperator':
        return cls.monomial(hbar, 0, 0)

    @classmethod
    def shift_u(cls, hbar: Hbar) -> 'TorusOperator':
        return cls.monomial(hbar, 1, 0)

    @classmethod
    def shift_v(cls, hbar: Hbar) -> 'TorusOperator':
        return cls.monomial(hbar, 0, 1)

    @classmethod
    def multiplication(cls, hbar: Hbar, f: CoefficientFunction) -> 'TorusOperator':
        return cls.build(hbar, {(0, 0): f})

    @property
    def diagonal_map(self) -> Dict[Index, CoefficientFunction]:
        return dict(self.diagonals)

    def coefficient(self, k: int, l: int) -> CoefficientFunction:
        return self.diagonal_map.get((k, l), CoefficientFunction())

    def entry(self, m: int, n: int, m2: int, n2: int) -> complex:
        """<A e_{m,n}, e_{m2,n2}>"""
        k, l = m2 - m, n2 - n
        f = self.diagonal_map.get((k, l))
        if f is None:
            return 0j
        return f.evaluate(self.hbar, m2, n2) * monomial_phase(self.hbar, k, l, m, n)

    def apply(self, vector: Dict[Index, complex]) -> Dict[Index, complex]:
        """Action on a finitely supported vector"""
        out: Dict[Index, complex] = {}
        for (m, n), value in vector.items():
            for (k, l), f in self.diagonals:
                target = (m + k, n + l)
                out[target] = out.get(target, 0j) + value * self.entry(m, n, *target)
        return _prune(out)

    def add(self, other: 'TorusOperator') -> 'TorusOperator':
        _check_hbar(self, other)
        diagonals = self.diagonal_map
        for index, f in other.diagonals:
            diagonals[index] = diagonals[index].add(f) if index in diagonals else f
        return TorusOperator.build(self.hbar, diagonals)

    def scale(self, scalar: complex) -> 'TorusOperator':
        return TorusOperator.build(self.hbar, {i: f.scale(scalar) for i, f in self.diagonals})

    def subtract(self, other: 'TorusOperator') -> 'TorusOperator':
        return self.add(other.scale(-1))

    def has_waves(self) -> bool:
        return any(not f.is_finitely_supported() for _, f in self.diagonals)

    def equals(self, other: 'TorusOperator', tolerance: float = 1e-9) -> bool:
        difference = self.subtract(other)
        return all(f.norm_bound() <= tolerance for _, f in difference.diagonals)

    def window_matrix(self, window: Sequence[int]) -> np.ndarray:
        """Matrix of entries over the box m in [m0, m1], n in [n0, n1], row-major indices"""
        points = _window_points(window)
        size = len(points)
        out = np.zeros((size, size), dtype=complex)
        for col, (m, n) in enumerate(points):
            for row, (m2, n2) in enumerate(points):
                out[row, col] = self.entry(m, n, m2, n2)
        return out


def _window_points(window: Sequence[int]) -> List[Index]:
    m0, m1, n0, n1 = window
    return [(m, n) for m in range(m0, m1 + 1) for n in range(n0, n1 + 1)]


def _check_hbar(*operators: TorusOperator):
    first = operators[0].hbar
    for other in operators[1:]:
        if other.hbar != first:
            raise ValidationError("Operators use different hbar values",
                                  witness=[str(first), str(other.hbar)])


def multiply(left: TorusOperator, right: TorusOperator) -> TorusOperator:
    """(M_f U^k V^l)(M_g U^p V^q) = e^{i hbar l p} M_{f tau_{k,l} g} U^{k+p} V^{l+q}"""
    _check_hbar(left, right)
    hbar = left.hbar
    diagonals: Dict[Index, CoefficientFunction] = {}
    for (k, l), f in left.diagonals:
        for (p, q), g in right.diagonals:
            term = f.multiply(g.shift(k, l, hbar), hbar).scale(hbar.phase(hbar.value * l * p))
            index = (k + p, l + q)
            diagonals[index] = diagonals[index].add(term) if index in diagonals else term
    return TorusOperator.build(hbar, diagonals)


def adjoint(operator: TorusOperator) -> TorusOperator:
    """(M_f U^k V^l)* = e^{i hbar k l} M_{tau_{-k,-l} conj f} U^{-k} V^{-l}"""
    hbar = operator.hbar
    diagonals: Dict[Index, CoefficientFunction] = {}
    for (k, l), f in operator.diagonals:
        term = f.conjugate(hbar).shift(-k, -l, hbar).scale(hbar.phase(hbar.value * k * l))
        diagonals[(-k, -l)] = term
    return TorusOperator.build(hbar, diagonals)


def commutator(left: TorusOperator, right: TorusOperator) -> TorusOperator:
    return multiply(left, right).subtract(multiply(right, left))


def theta(operator: TorusOperator, x: float, y: float) -> TorusOperator:
    """Conjugation by M_{e^{i(mx+ny)}}: diagonal (k, l) picks up e^{i(kx+ly)}"""
    return TorusOperator.build(operator.hbar, {
        (k, l): f.scale(cmath.exp(1j * (k * x + l * y))) for (k, l), f in operator.diagonals
    })


def fourier_term(operator: TorusOperator, k: int, l: int) -> TorusOperator:
    f = operator.diagonal_map.get((k, l))
    if f is None:
        return TorusOperator.zero(operator.hbar)
    return TorusOperator.build(operator.hbar, {(k, l): f})


def fejer_weight(k: int, l: int, order: int) -> float:
    if abs(k) >= order or abs(l) >= order:
        return 0.0
    return (1 - abs(k) / order) * (1 - abs(l) / order)


def cesaro(operator: TorusOperator, order: int) -> TorusOperator:
    """sigma_N: diagonal (k, l) scaled by (1 - |k|/N)(1 - |l|/N)"""
    if order < 1:
        raise ValidationError("Cesaro order must be positive", witness=order)
    return TorusOperator.build(operator.hbar, {
        (k, l): f.scale(fejer_weight(k, l, order)) for (k, l), f in operator.diagonals
    })


def support_box(operator: TorusOperator) -> Optional[Tuple[int, int, int, int]]:
    """Smallest box holding every source and target index of a nonzero entry"""
    points = []
    for (k, l), f in operator.diagonals:
        for (m2, n2), _ in f.table:
            points.extend([(m2, n2), (m2 - k, n2 - l)])
    if not points:
        return None
    ms = [p[0] for p in points]
    ns = [p[1] for p in points]
    return (min(ms), max(ms), min(ns), max(ns))


def window_norm(operator: TorusOperator, window: Optional[Sequence[int]] = None,
                tolerance: float = 1e-9, max_iterations: int = 10000, seed: int = 0) -> float:
    """Largest singular value of the finite matrix of a finitely supported operator"""
    if operator.has_waves():
        raise ValidationError("Operator norm needs finitely supported coefficients; "
                              "constant or character parts are present")
    if window is None:
        window = support_box(operator)
        if window is None:
            return 0.0
    matrix = operator.window_matrix(window)
    gram = matrix.conj().T @ matrix
    rng = np.random.default_rng(seed)
    vector = rng.standard_normal(gram.shape[0]) + 1j * rng.standard_normal(gram.shape[0])
    vector /= np.linalg.norm(vector)
    estimate = 0.0
    for _ in range(max_iterations):
        image = gram @ vector
        size = np.linalg.norm(image)
        if size == 0.0:
            return 0.0
        estimate = float(np.real(np.vdot(vector, image)))
        residual = np.linalg.norm(image - estimate * vector)
        vector = image / size
        if residual <= tolerance * max(1.0, estimate):
            break
    else:
        logger.warning("power iteration hit %d iterations without converging", max_iterations)
    return math.sqrt(max(estimate, 0.0))


def in_torus_algebra(operator: TorusOperator) -> bool:
    """Every Fourier term is a scalar multiple of U^k V^l"""
    return all(f.is_constant() for _, f in operator.diagonals)


def conjugate_monomial(hbar: Hbar, k: int, l: int, coefficient: complex = 1) -> TorusOperator:
    """c U_{-hbar}^k V_{-hbar}^l written over U_hbar, V_hbar.

    U_{-hbar}^k V_{-hbar}^l = e^{i hbar k l} M_{chi(-hbar l, hbar k)} U^k V^l
    """
    f = CoefficientFunction.character(hbar.reduce(-hbar.value * l), hbar.reduce(hbar.value * k),
                                      coefficient * hbar.phase(hbar.value * k * l))
    return TorusOperator.build(hbar, {(k, l): f})


def conjugate_generators(hbar: Hbar) -> Tuple[TorusOperator, TorusOperator]:
    return conjugate_monomial(hbar, 1, 0), conjugate_monomial(hbar, 0, 1)


def rephased_coefficient(operator: TorusOperator, k: int, l: int) -> CoefficientFunction:
    """g with A_{k,l} = M_g U_{-hbar}^k V_{-hbar}^l"""
    hbar = operator.hbar
    f = operator.coefficient(k, l)
    g = f.times_character(hbar.value * l, -hbar.value * k, hbar)
    return g.scale(hbar.phase(-hbar.value * k * l))


def in_conjugate_algebra(operator: TorusOperator) -> bool:
    """Every Fourier term is a scalar multiple of U_{-hbar}^k V_{-hbar}^l"""
    return all(rephased_coefficient(operator, k, l).is_constant() for (k, l), _ in operator.diagonals)


def shifted_term_law_holds(operator: TorusOperator, m: int, n: int, k: int, l: int,
                           tolerance: float = 1e-9) -> bool:
    """Fourier term (k, l) of A U_{-hbar}^m V_{-hbar}^n is A_{k-m, l-n} U_{-hbar}^m V_{-hbar}^n"""
    shift = conjugate_monomial(operator.hbar, m, n)
    left = fourier_term(multiply(operator, shift), k, l)
    right = multiply(fourier_term(operator, k - m, l - n), shift)
    return left.equals(right, tolerance)


def commutes_with_conjugates(operator: TorusOperator, tolerance: float = 1e-9) -> bool:
    zero = TorusOperator.zero(operator.hbar)
    return all(commutator(operator, g).equals(zero, tolerance)
               for g in conjugate_generators(operator.hbar))


def commutant_coefficient_holds(operator: TorusOperator, k: int, l: int, window: Sequence[int],
                                tolerance: float = 1e-9) -> bool:
    """<A_{k,l} e_{m,n}, e_{m+k,n+l}> = e^{i hbar (ml - nk)/2} <A e_{0,0}, e_{k,l}> on a window.

    Holds for every A commuting with U_{-hbar} and V_{-hbar}, which makes each
    Fourier term a scalar multiple of U^k V^l.
    """
    if not commutes_with_conjugates(operator, tolerance):
        raise ValidationError("Operator does not commute with U_{-hbar} and V_{-hbar}")
    hbar = operator.hbar
    term = fourier_term(operator, k, l)
    base = operator.entry(0, 0, k, l)
    for m, n in _window_points(window):
        expected = hbar.phase(hbar.value * Fraction(m * l - n * k, 2)) * base
        if abs(term.entry(m, n, m + k, n + l) - expected) > tolerance:
            return False
    return True


@dataclass(frozen=True)
class TransInvSubspace:
    """Translation-invariant space of coefficient functions.

    Spanned by the characters at the listed frequencies and by all translates
    of the generator tables; all_finite adds every finitely supported function
    and everything makes the space all of l^inf.
    """

    frequencies: frozenset = frozenset()
    generators: Tuple[Tuple[Tuple[Index, complex], ...], ...] = ()
    all_finite: bool = False
    everything: bool = False
    tolerance: float = 1e-9

    def contains(self, f: CoefficientFunction, hbar: Optional[Hbar] = None) -> bool:
        """Membership; frequencies are compared after reduction by hbar when given"""
        if self.everything:
            return True
        frequencies = self.frequencies
        if hbar is not None:
            frequencies = {(hbar.reduce(x), hbar.reduce(y)) for x, y in frequencies}
        for freq, _ in f.waves:
            if freq not in frequencies:
                return False
        if not f.table or self.all_finite:
            return True
        return self._table_member(f.table_map)

    def _table_member(self, table: Dict[Index, complex]) -> bool:
        """Least squares over the generator translates near the target.

        Translates count when their support meets the target's bounding box
        grown by the widest generator; the residual must vanish on every point
        they touch.
        """
        generators = [g for g in self.generators if g]
        width_m = max((_extent(g, 0) for g in generators), default=0)
        width_n = max((_extent(g, 1) for g in generators), default=0)
        m0 = min(p[0] for p in table) - width_m
        m1 = max(p[0] for p in table) + width_m
        n0 = min(p[1] for p in table) - width_n
        n1 = max(p[1] for p in table) + width_n
        translates = []
        for generator in generators:
            points = [p for p, _ in generator]
            gm0 = min(p[0] for p in points)
            gm1 = max(p[0] for p in points)
            gn0 = min(p[1] for p in points)
            gn1 = max(p[1] for p in points)
            for a in range(m0 - gm1, m1 - gm0 + 1):
                for b in range(n0 - gn1, n1 - gn0 + 1):
                    moved = [((m + a, n + b), value) for (m, n), value in generator]
                    if any(m0 <= m <= m1 and n0 <= n <= n1 for (m, n), _ in moved):
                        translates.append(moved)
        grid = sorted(set(table) | {p for moved in translates for p, _ in moved})
        position = {p: i for i, p in enumerate(grid)}
        target = np.zeros(len(grid), dtype=complex)
        for point, value in table.items():
            target[position[point]] = value
        if not translates:
            return bool(np.linalg.norm(target) <= self.tolerance)
        basis = np.zeros((len(grid), len(translates)), dtype=complex)
        for j, moved in enumerate(translates):
            for point, value in moved:
                basis[position[point], j] = value
        solution, *_ = np.linalg.lstsq(basis, target, rcond=None)
        return bool(np.linalg.norm(basis @ solution - target) <= self.tolerance)


def _extent(generator: Tuple[Tuple[Index, complex], ...], axis: int) -> int:
    coords = [p[axis] for p, _ in generator]
    return max(coords) - min(coords)


@dataclass(frozen=True)
class TranslationReport:
    passed: bool
    checked: int
    failures: List[Dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {'passed': self.passed, 'checked': self.checked, 'failures': self.failures}


def is_translation_invariant_relation(generators: Iterable[TorusOperator],
                                      space: TransInvSubspace) -> TranslationReport:
    """Check A_{k,l} in E U_{-hbar}^k V_{-hbar}^l for every generator and stored diagonal"""
    generators = list(generators)
    if generators:
        _check_hbar(*generators)
    failures = []
    checked = 0
    for index, operator in enumerate(generators):
        for (k, l), _ in operator.diagonals:
            checked += 1
            if not space.contains(rephased_coefficient(operator, k, l), operator.hbar):
                failures.append({'generator': index, 'k': k, 'l': l})
    logger.debug("translation invariance: %d terms checked, %d failures", checked, len(failures))
    return TranslationReport(not failures, checked, failures)
