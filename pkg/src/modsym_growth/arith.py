"""Exact PSL2(Z) matrices, the entry norm, and upper half plane metric formulas.

Matrices carry Python integers so products never overflow. Points of the
upper half plane are plain ``complex`` numbers with positive imaginary part.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from fractions import Fraction

LOG2 = math.log(2.0)


class TraceClass(enum.Enum):
    IDENTITY = "identity"
    PARABOLIC = "parabolic"
    ELLIPTIC = "elliptic"
    HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True)
class GroupElement:
    """Integer matrix (a b; c d) of determinant one, modulo sign.

    The constructor normalizes to c > 0, or c == 0 and a > 0, so equal
    elements of PSL2(Z) compare and hash equal.
    """

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        a, b, c, d = int(self.a), int(self.b), int(self.c), int(self.d)
        if a * d - b * c != 1:
            raise ValueError(f"determinant of ({a} {b}; {c} {d}) is not 1")
        if c < 0 or (c == 0 and a < 0):
            a, b, c, d = -a, -b, -c, -d
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    @classmethod
    def identity(cls) -> GroupElement:
        return cls(1, 0, 0, 1)

    @property
    def entries(self) -> tuple[int, int, int, int]:
        return self.a, self.b, self.c, self.d

    @property
    def trace(self) -> int:
        return self.a + self.d

    def __mul__(self, other: GroupElement) -> GroupElement:
        if not isinstance(other, GroupElement):
            return NotImplemented
        return GroupElement(*matmul(self.entries, other.entries))

    def __pow__(self, k: int) -> GroupElement:
        result = GroupElement.identity()
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> GroupElement:
        return GroupElement(self.d, -self.b, -self.c, self.a)

    def is_identity(self) -> bool:
        return self.entries == (1, 0, 0, 1)

    def __str__(self):
        return f"({self.a} {self.b}; {self.c} {self.d})"


S = GroupElement(0, -1, 1, 0)
T = GroupElement(1, 1, 0, 1)
IDENTITY = GroupElement.identity()


def matmul(m, n):
    """Product of two 2x2 integer matrices given as (a, b, c, d) tuples."""
    a, b, c, d = m
    e, f, g, h = n
    return a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h


def norm(g: GroupElement) -> int:
    return max(abs(g.a), abs(g.b), abs(g.c), abs(g.d))


def classify(g: GroupElement) -> TraceClass:
    if g.is_identity():
        return TraceClass.IDENTITY
    t = abs(g.trace)
    if t == 2:
        return TraceClass.PARABOLIC
    if t < 2:
        return TraceClass.ELLIPTIC
    return TraceClass.HYPERBOLIC


def point(x: float, y: float) -> complex:
    """Validated point of the upper half plane."""
    if not y > 0:
        raise ValueError(f"point must have positive imaginary part, got y={y}")
    return complex(x, y)


def mobius(g: GroupElement, z: complex) -> complex:
    """Image (az + b)/(cz + d) of ``z``, evaluated in floating point."""
    if g.c == 0:
        return (g.a * z + g.b) / g.d
    return (g.a * z + g.b) / (g.c * z + g.d)


def distance(z: complex, w: complex) -> float:
    """Hyperbolic distance from the |z - conj(w)| + |z - w| formula.

    With s = |z - conj(w)| + |z - w| the ratio (s + ...)/(... ) rewrites as
    s^2 / (4 Im z Im w), and s^2 - 4 Im z Im w = 2 |z - w| s exactly, which
    lets the logarithm be taken through log1p without cancellation.
    """
    if z == w:
        return 0.0
    near = abs(z - w)
    s = abs(z - w.conjugate()) + near
    return math.log1p(near * s / (2.0 * z.imag * w.imag))


def distance_gamma_i(g: GroupElement) -> float:
    """d(g i, i) in closed form from the integer entries of ``g``."""
    a, b, c, d = g.entries
    plus = (b - c) ** 2 + (a + d) ** 2
    minus = (b + c) ** 2 + (a - d) ** 2
    # plus - minus == 4 (determinant one); minus == 0 only for rotations about i
    s = math.sqrt(plus) + math.sqrt(minus)
    return max(0.0, 2.0 * math.log(s) - 2.0 * LOG2)


def log_norm_bound(g: GroupElement) -> float:
    return 2.0 * math.log(norm(g)) + 3.0 * LOG2


# ---------------------------------------------------------------------------
# exact orbit geometry for rational base points


@dataclass(frozen=True)
class BasePoint:
    """A point x + iy with x, y rational, stored as integers X/D + i Y/D.

    Orbit points g.z for integer matrices g are then rational, and the
    orbit distance d(z, g z) reduces to integer arithmetic.
    """

    X: int
    Y: int
    D: int

    @classmethod
    def from_complex(cls, z: complex) -> BasePoint:
        x, y = Fraction(z.real), Fraction(z.imag)
        if y <= 0:
            raise ValueError("base point must lie in the upper half plane")
        den = math.lcm(x.denominator, y.denominator)
        return cls(int(x * den), int(y * den), den)

    @property
    def z(self) -> complex:
        return complex(self.X / self.D, self.Y / self.D)

    def image_parts(self, m) -> tuple[int, int, int]:
        """Integers (re_num, im_num, den) with m.z = (re_num + i im_num)/den."""
        a, b, c, d = m
        X, Y, D = self.X, self.Y, self.D
        cz = c * X + d * D
        den = cz * cz + (c * Y) ** 2
        re_num = a * c * (X * X + Y * Y) + (a * d + b * c) * X * D + b * d * D * D
        im_num = Y * D
        return re_num, im_num, den

    def image(self, m) -> complex:
        re_num, im_num, den = self.image_parts(m)
        return complex(re_num / den, im_num / den)

    def orbit_cosh_numerator(self, m) -> int:
        """Integer K with 2 cosh d(z, m z) = K / (D^2 Y^2)."""
        a, b, c, d = m
        X, Y, D = self.X, self.Y, self.D
        e1 = a * D - c * X
        e2 = a * X * D + b * D * D - c * X * X - d * X * D
        e4 = c * X + d * D
        return Y * Y * (e1 * e1 + e4 * e4) + e2 * e2 + (c * Y * Y) ** 2

    def orbit_distance(self, m) -> float:
        return arccosh_ratio(self.orbit_cosh_numerator(m), 2 * (self.D * self.Y) ** 2)

    def cosh_threshold(self, radius: float) -> Fraction:
        """Bound on orbit_cosh_numerator equivalent to d(z, m z) <= radius."""
        return Fraction(2 * (self.D * self.Y) ** 2) * Fraction(math.cosh(radius))


def arccosh_ratio(num: int, den: int) -> float:
    """arccosh(num/den) for integers num >= den > 0, accurate near 1 and for huge ratios."""
    excess = num - den
    if excess <= 0:
        return 0.0
    if num.bit_length() - den.bit_length() > 900:
        return math.log(num) - math.log(den) + LOG2
    t = excess / den
    return math.log1p(t + math.sqrt(t * (t + 2.0)))


def orbit_distance(g: GroupElement, z0: complex) -> float:
    """d(z0, g z0) via exact rational arithmetic on the entries of ``g``."""
    return BasePoint.from_complex(z0).orbit_distance(g.entries)


def disk_coordinate(z: complex, center: complex) -> complex:
    """Poincare disk coordinate of ``z`` for the disk centered at ``center``."""
    return (z - center) / (z - center.conjugate())


def from_disk(w: complex, center: complex) -> complex:
    return (center - w * center.conjugate()) / (1 - w)


def ray_point(center: complex, theta: float, t: float) -> complex:
    """Point at hyperbolic distance t from ``center`` in disk direction theta."""
    return from_disk(math.tanh(t / 2.0) * cmath.exp(1j * theta), center)
