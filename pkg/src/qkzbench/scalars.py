"""Scalar domains: exact big rationals and tolerance-equipped complex doubles.

Exact values are `fractions.Fraction` instances (arbitrary precision, always
reduced, denominator positive), printed and parsed as ``p/q``.  The
trigonometric family of operators stays exactly computable because every
matrix entry is a rational function of the exponentials u_i = e^{x_i},
t = e^{eta}, h = e^{eta*hbar}; nothing transcendental is evaluated until
spectra are extracted in the floating-point layer.
"""
from __future__ import annotations

import math
from fractions import Fraction

from .errors import FloatOverflow, NonPositiveTolerance, ZeroDenominator

Rational = Fraction


def normalize(num: int, den: int) -> Fraction:
    """Reduced fraction with positive denominator; canonical zero is 0/1."""
    if den == 0:
        raise ZeroDenominator(f"{num}/0 is not a rational number")
    return Fraction(num, den)


def parse_rational(text: str) -> Fraction:
    """Parse ``p/q`` or ``p`` (ASCII, base 10)."""
    return Fraction(text.strip())


def format_rational(a: Fraction) -> str:
    return str(a)


def approx_eq(a: complex, b: complex, tol: float) -> bool:
    """|a - b| <= tol * max(1, |a|, |b|): relative with an absolute floor."""
    if tol <= 0:
        raise NonPositiveTolerance(f"tolerance must be positive, got {tol}")
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def to_float(a) -> complex:
    """Nearest double, as a complex number with zero imaginary part."""
    try:
        return complex(float(a))
    except OverflowError as exc:
        raise FloatOverflow(f"{a} exceeds double range") from exc


class RationalDomain:
    """Exact field of big rationals; equality is literal."""

    name = "exact"
    zero = Fraction(0)
    one = Fraction(1)
    threshold = Fraction(0)

    @staticmethod
    def coerce(x):
        return Fraction(x)

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def sub(a, b):
        return a - b

    @staticmethod
    def mul(a, b):
        return a * b

    @staticmethod
    def div(a, b):
        return a / b

    @staticmethod
    def neg(a):
        return -a

    @staticmethod
    def inverse(a):
        return 1 / a

    @staticmethod
    def eq(a, b):
        return a == b

    @staticmethod
    def residual(a, b):
        return abs(a - b)

    @staticmethod
    def magnitude(a):
        return abs(a)

    def __repr__(self):
        return "RationalDomain()"


class ComplexDomain:
    """Complex doubles; equality is relative with an absolute floor at 1."""

    name = "float"
    zero = complex(0)
    one = complex(1)

    def __init__(self, tol: float = 1e-10):
        if tol <= 0:
            raise NonPositiveTolerance(f"tolerance must be positive, got {tol}")
        self.tol = tol
        self.threshold = tol

    def coerce(self, x):
        z = complex(x)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise ValueError(f"non-finite scalar {x!r} not admitted")
        return z

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def sub(a, b):
        return a - b

    @staticmethod
    def mul(a, b):
        return a * b

    @staticmethod
    def div(a, b):
        return a / b

    @staticmethod
    def neg(a):
        return -a

    @staticmethod
    def inverse(a):
        return 1 / a

    def eq(self, a, b):
        return approx_eq(a, b, self.tol)

    @staticmethod
    def residual(a, b):
        return abs(a - b) / max(1.0, abs(a), abs(b))

    @staticmethod
    def magnitude(a):
        return abs(a)

    def __repr__(self):
        return f"ComplexDomain(tol={self.tol!r})"


EXACT = RationalDomain()
