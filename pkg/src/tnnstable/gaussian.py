"""Exact complex scalars with rational real and imaginary parts."""

from __future__ import annotations

import numbers
from fractions import Fraction

from gmpy2 import mpq

_ZERO = mpq(0)


def rational(value) -> mpq:
    """Coerce ints, Fractions, mpq values and ``"p/q"`` strings to ``mpq``.

    Floats are converted exactly (their binary value), never rounded.
    """
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty rational literal")
        if "/" in text:
            p, q = text.split("/", 1)
            den = int(q)
            if den <= 0:
                raise ValueError(f"denominator must be positive in {value!r}")
            return mpq(int(p), den)
        return mpq(int(text))
    if isinstance(value, bool):
        return mpq(int(value))
    if isinstance(value, (int, Fraction)) or type(value) is type(_ZERO):
        return mpq(value)
    if isinstance(value, float):
        return mpq(value)
    if isinstance(value, numbers.Rational):
        return mpq(value.numerator, value.denominator)
    raise TypeError(f"cannot interpret {value!r} as a rational")


def format_rational(value) -> str:
    q = mpq(value)
    return f"{q.numerator}/{q.denominator}"


class GaussianRational:
    """An element ``re + i*im`` of Q(i), stored as two reduced ``mpq`` values."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", rational(re))
        object.__setattr__(self, "im", rational(im))

    @classmethod
    def _raw(cls, re, im) -> GaussianRational:
        obj = object.__new__(cls)
        object.__setattr__(obj, "re", re)
        object.__setattr__(obj, "im", im)
        return obj

    @classmethod
    def coerce(cls, value) -> GaussianRational:
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, complex):
            return cls(value.real, value.imag)
        return cls._raw(rational(value), _ZERO)

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return GaussianRational._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return GaussianRational._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return other - self

    def __neg__(self):
        return GaussianRational._raw(-self.re, -self.im)

    def __pos__(self):
        return self

    def __mul__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return GaussianRational._raw(a * c, _ZERO)
        return GaussianRational._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        c, d = other.re, other.im
        if not d:
            if not c:
                raise ZeroDivisionError("division by zero Gaussian rational")
            return GaussianRational._raw(self.re / c, self.im / c)
        den = c * c + d * d
        a, b = self.re, self.im
        return GaussianRational._raw((a * c + b * d) / den, (b * c - a * d) / den)

    def __rtruediv__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return other / self

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return (ONE / self) ** (-exponent)
        result, base = ONE, self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def conjugate(self) -> GaussianRational:
        return GaussianRational._raw(self.re, -self.im)

    def norm(self) -> mpq:
        """Squared modulus ``re**2 + im**2`` (exact)."""
        return self.re * self.re + self.im * self.im

    # predicates -----------------------------------------------------------

    @property
    def is_real(self) -> bool:
        return not self.im

    def is_nonneg_real(self) -> bool:
        return not self.im and self.re >= 0

    def is_pos_real(self) -> bool:
        return not self.im and self.re > 0

    def same_phase(self, other: GaussianRational) -> bool:
        """True iff ``other / self`` is a nonnegative rational (``self`` nonzero)."""
        prod = other * self.conjugate()
        return not prod.im and prod.re >= 0

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if not self.im:
            return f"GaussianRational({self.re})"
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}i)"

    def __reduce__(self):
        return (GaussianRational, (format_rational(self.re), format_rational(self.im)))


def _coerce_or_none(value):
    if isinstance(value, GaussianRational):
        return value
    try:
        return GaussianRational.coerce(value)
    except TypeError:
        return None


ZERO = GaussianRational._raw(_ZERO, _ZERO)
ONE = GaussianRational._raw(mpq(1), _ZERO)
I = GaussianRational._raw(_ZERO, mpq(1))


def gq(value, im=None) -> GaussianRational:
    """Shorthand constructor: ``gq(3)``, ``gq("1/2")``, ``gq(1, 2)`` for ``1+2i``."""
    if im is None:
        return GaussianRational.coerce(value)
    return GaussianRational(value, im)
