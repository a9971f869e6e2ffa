"""Exact Gaussian-rational scalars: a + b*i with a, b rational."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

__all__ = ["GaussianRational", "as_gaussian", "format_rational"]


def _norm(x):
    # keep ints as ints (fast path), collapse integral fractions back to int
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, Rational):
        return _norm(Fraction(x.numerator, x.denominator))
    if isinstance(x, str):
        return _norm(Fraction(x))
    raise TypeError(f"not an exact rational: {x!r}")


class GaussianRational:
    """Element of Q(i). Immutable and hashable.

    Real and imaginary parts are kept as ``int`` when integral and
    ``Fraction`` otherwise, so lowest terms and a positive denominator are
    guaranteed by :class:`fractions.Fraction`.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _norm(re))
        object.__setattr__(self, "im", _norm(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def _raw(cls, re, im):
        obj = object.__new__(cls)
        object.__setattr__(obj, "re", re)
        object.__setattr__(obj, "im", im)
        return obj

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        other = as_gaussian(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational._raw(_norm(self.re + other.re), _norm(self.im + other.im))

    __radd__ = __add__

    def __sub__(self, other):
        other = as_gaussian(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational._raw(_norm(self.re - other.re), _norm(self.im - other.im))

    def __rsub__(self, other):
        other = as_gaussian(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __neg__(self):
        return GaussianRational._raw(-self.re, -self.im)

    def __pos__(self):
        return self

    def __mul__(self, other):
        other = as_gaussian(other)
        if other is NotImplemented:
            return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return GaussianRational._raw(_norm(a * c), 0)
        return GaussianRational._raw(_norm(a * c - b * d), _norm(a * d + b * c))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = as_gaussian(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = as_gaussian(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> GaussianRational:
        n = Fraction(self.re) ** 2 + Fraction(self.im) ** 2
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational(Fraction(self.re) / n, -Fraction(self.im) / n)

    def conjugate(self) -> GaussianRational:
        return GaussianRational._raw(self.re, -self.im)

    # -- predicates / conversion -------------------------------------------
    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_real(self) -> bool:
        return self.im == 0

    def __eq__(self, other):
        other = as_gaussian(other)
        if other is NotImplemented:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __float__(self):
        if self.im:
            raise TypeError(f"{self} is not real")
        return float(self.re)

    def __repr__(self):
        return f"GaussianRational({self.re!s}, {self.im!s})"

    def __str__(self):
        if not self.im:
            return format_rational(self.re)
        if not self.re:
            return f"{format_rational(self.im)}*i"
        sign = "-" if self.im < 0 else "+"
        return f"{format_rational(self.re)}{sign}{format_rational(abs(self.im))}*i"


def format_rational(x) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def as_gaussian(x):
    """Coerce ints, Fractions and Gaussian rationals; NotImplemented otherwise."""
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return GaussianRational._raw(_norm(x), 0)
    if isinstance(x, Rational):
        return GaussianRational(x)
    return NotImplemented


ZERO = GaussianRational._raw(0, 0)
ONE = GaussianRational._raw(1, 0)
I = GaussianRational._raw(0, 1)
