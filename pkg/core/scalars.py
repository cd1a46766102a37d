"""
Scalar fields for exact and tolerance-governed complex arithmetic

Exact mode works over Gaussian rationals a + bi with a, b in Q, so zero tests
and subspace equality are decidable. Float mode uses Python complex numbers and
an absolute zero threshold.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, List, Union

from core.errors import ParseError, ScalarModeError

Rational = Union[int, Fraction]


def _as_fraction(value: Any) -> Fraction:
    if isinstance(value, bool):
        raise ScalarModeError(f"Boolean is not a scalar: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"Not a rational literal: {value!r}") from exc
    raise ScalarModeError(f"Exact mode cannot absorb {type(value).__name__} value {value!r}")


@dataclass(frozen=True, slots=True)
class GaussianRational:
    """Exact complex number re + im*i with rational parts"""

    re: Fraction
    im: Fraction = Fraction(0)

    @classmethod
    def of(cls, value: Any) -> 'GaussianRational':
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, complex):
            raise ScalarModeError(f"Exact mode cannot absorb complex value {value!r}")
        return cls(_as_fraction(value), Fraction(0))

    def __add__(self, other: Any) -> 'GaussianRational':
        other = _lift(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other: Any) -> 'GaussianRational':
        other = _lift(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other: Any) -> 'GaussianRational':
        other = _lift(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other: Any) -> 'GaussianRational':
        other = _lift(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> 'GaussianRational':
        other = _lift(other)
        if other is NotImplemented:
            return NotImplemented
        norm = other.abs2()
        if norm == 0:
            raise ZeroDivisionError("division by exact zero")
        num = self * other.conjugate()
        return GaussianRational(num.re / norm, num.im / norm)

    def __rtruediv__(self, other: Any) -> 'GaussianRational':
        other = _lift(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __neg__(self) -> 'GaussianRational':
        return GaussianRational(-self.re, -self.im)

    def __bool__(self) -> bool:
        return self.re != 0 or self.im != 0

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.im == 0 and self.re == other
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self) -> int:
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __repr__(self) -> str:
        if self.im == 0:
            return str(self.re)
        return f"({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i)"

    def conjugate(self) -> 'GaussianRational':
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im


def _lift(value: Any):
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return GaussianRational(Fraction(value), Fraction(0))
    return NotImplemented


I = GaussianRational(Fraction(0), Fraction(1))


class ScalarField(ABC):
    """Arithmetic context shared by every entry of a matrix"""

    mode: str = ''

    @property
    @abstractmethod
    def zero(self) -> Any: ...

    @property
    @abstractmethod
    def one(self) -> Any: ...

    @abstractmethod
    def coerce(self, value: Any) -> Any:
        """Bring a Python number into this field"""

    @abstractmethod
    def is_zero(self, value: Any) -> bool: ...

    @abstractmethod
    def encode(self, value: Any) -> List[Any]:
        """JSON pair [re, im]"""

    @abstractmethod
    def decode(self, pair: Any) -> Any: ...

    def conjugate(self, value: Any) -> Any:
        return value.conjugate()

    def imaginary_unit(self) -> Any:
        return self.coerce_complex(0, 1)

    @abstractmethod
    def coerce_complex(self, re: Any, im: Any) -> Any: ...

    def is_exact(self) -> bool:
        return self.mode == 'exact'

    def __eq__(self, other: Any) -> bool:
        return type(self) is type(other) and self.__dict__ == other.__dict__

    def __hash__(self) -> int:
        return hash((type(self).__name__, tuple(sorted(self.__dict__.items()))))


class ExactField(ScalarField):
    """Gaussian rationals; zero test is exact"""

    mode = 'exact'

    @property
    def zero(self) -> GaussianRational:
        return GaussianRational(Fraction(0), Fraction(0))

    @property
    def one(self) -> GaussianRational:
        return GaussianRational(Fraction(1), Fraction(0))

    def coerce(self, value: Any) -> GaussianRational:
        return GaussianRational.of(value)

    def coerce_complex(self, re: Any, im: Any) -> GaussianRational:
        return GaussianRational(_as_fraction(re), _as_fraction(im))

    def is_zero(self, value: GaussianRational) -> bool:
        return not value

    def encode(self, value: GaussianRational) -> List[str]:
        return [str(value.re), str(value.im)]

    def decode(self, pair: Any) -> GaussianRational:
        re, im = _split_pair(pair)
        if isinstance(re, float) or isinstance(im, float):
            raise ParseError(f"Exact mode expects 'p/q' strings, got {pair!r}")
        return GaussianRational(_as_fraction(re), _as_fraction(im))

    def __repr__(self) -> str:
        return 'ExactField()'


class FloatField(ScalarField):
    """Complex doubles with absolute zero threshold"""

    mode = 'float'

    def __init__(self, tolerance: float = 1e-9):
        if tolerance < 0 or math.isnan(tolerance):
            raise ScalarModeError(f"Tolerance must be nonnegative, got {tolerance}")
        self.tolerance = float(tolerance)

    @property
    def zero(self) -> complex:
        return 0j

    @property
    def one(self) -> complex:
        return 1 + 0j

    def coerce(self, value: Any) -> complex:
        if isinstance(value, GaussianRational):
            return complex(value)
        if isinstance(value, str):
            return complex(float(_as_fraction(value)))
        return complex(value)

    def coerce_complex(self, re: Any, im: Any) -> complex:
        return complex(float(_as_fraction(re) if isinstance(re, str) else re),
                       float(_as_fraction(im) if isinstance(im, str) else im))

    def is_zero(self, value: complex) -> bool:
        return abs(value) <= self.tolerance

    def encode(self, value: complex) -> List[float]:
        return [value.real, value.imag]

    def decode(self, pair: Any) -> complex:
        re, im = _split_pair(pair)
        return self.coerce_complex(re, im)

    def __repr__(self) -> str:
        return f'FloatField(tolerance={self.tolerance})'


def _split_pair(pair: Any):
    if isinstance(pair, (list, tuple)) and len(pair) == 2:
        return pair[0], pair[1]
    if isinstance(pair, (int, str)) and not isinstance(pair, bool):
        return pair, 0
    if isinstance(pair, float):
        return pair, 0.0
    raise ParseError(f"Scalar must be [re, im], got {pair!r}")


EXACT = ExactField()


def field_for(mode: str, tolerance: float = 1e-9) -> ScalarField:
    """Return the scalar field for a mode name ('exact' or 'float')"""
    if mode == 'exact':
        return EXACT
    if mode == 'float':
        return FloatField(tolerance)
    raise ScalarModeError(f"Unknown scalar mode: {mode!r}")
