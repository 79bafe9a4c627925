"""Cusps of Gamma0(N): classes, widths, scaling matrices, horoballs and truncation.

Throughout, a cusp p/q comes with some g_c in SL2(Z) whose first column is
(p, q), so g_c sends infinity to p/q. For a cusp of width w the normalized
height is Im(g_c^-1 z) / w; it does not depend on which g_c is used, and it
equals Im(sigma_c^-1 z) for the Gamma-compatible scaling matrices built
from the class representatives. The T-horoball at the cusp is the set where
the normalized height exceeds T.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

from .arith import IDENTITY, BasePoint, GroupElement
from .errors import ResourceError

TRUNCATION_GRID = (1.5, 2.0, 3.0)
SAFETY_FACTOR = 2.0


@dataclass(frozen=True)
class Cusp:
    p: int
    q: int

    def __post_init__(self):
        p, q = int(self.p), int(self.q)
        if p == 0 and q == 0:
            raise ValueError("(0, 0) is not a cusp")
        g = math.gcd(p, q)
        p, q = p // g, q // g
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def is_infinity(self) -> bool:
        return self.q == 0

    def matrix(self) -> GroupElement:
        """Some g in SL2(Z) with g(oo) = p/q."""
        return cusp_matrix(self.p, self.q)

    def __str__(self):
        return "oo" if self.q == 0 else f"{self.p}/{self.q}"


INFINITY = Cusp(1, 0)


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        k, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - k * x1
        y0, y1 = y1, y0 - k * y1
    return a, x0, y0


def cusp_matrix(p: int, q: int) -> GroupElement:
    if q == 0:
        return IDENTITY
    g, x, y = _egcd(p, q)
    # p*x + q*y == 1, so (p -y; q x) has determinant one
    return GroupElement(p, -y, q, x)


def act_on_cusp(g: GroupElement, c: Cusp) -> Cusp:
    return Cusp(g.a * c.p + g.b * c.q, g.c * c.p + g.d * c.q)


def width(c: Cusp, level: int) -> int:
    if c.q == 0:
        return 1
    return level // math.gcd(c.q * c.q, level)


def width_by_search(c: Cusp, level: int) -> int:
    """Minimal h >= 1 with g_c T^h g_c^-1 in Gamma0(N), by direct multiplication."""
    g = c.matrix()
    h = 1
    while True:
        m = g * GroupElement(1, h, 0, 1) * g.inverse()
        if m.c % level == 0:
            return h
        h += 1


def stabilizer_power(p: int, q: int, wk: int) -> tuple[int, int, int, int]:
    """Entries of g_c T^wk g_c^-1 for the cusp p/q (closed form)."""
    return 1 - p * q * wk, p * p * wk, -q * q * wk, 1 + p * q * wk


@dataclass(frozen=True)
class CuspClass:
    rep: Cusp
    width: int
    g_rep: GroupElement
    p_stab: GroupElement

    @property
    def sigma(self) -> np.ndarray:
        """Real scaling matrix g_rep * diag(sqrt(w), 1/sqrt(w))."""
        r = math.sqrt(self.width)
        g = self.g_rep
        return np.array([[g.a * r, g.b / r], [g.c * r, g.d / r]], dtype=float)

    def height(self, z: complex) -> float:
        """Normalized height Im(sigma^-1 z)."""
        g = self.g_rep
        return z.imag / (abs(-g.c * z + g.a) ** 2 * self.width)


def make_class(rep: Cusp, level: int) -> CuspClass:
    w = width(rep, level)
    g = rep.matrix()
    return CuspClass(rep, w, g, GroupElement(*stabilizer_power(rep.p, rep.q, w)))


def equivalence_element(c1: Cusp, c2: Cusp, level: int) -> GroupElement | None:
    """Some gamma in Gamma0(N) with gamma(c1) = c2, or None when inequivalent.

    Every element of PSL2(Z) taking c1 to c2 has the form g2 T^j g1^-1, and its
    lower-left entry is affine in j, so j only matters modulo N.
    """
    g1, g2 = c1.matrix(), c2.matrix()
    g1inv = g1.inverse()
    for j in range(level):
        gamma = g2 * GroupElement(1, j, 0, 1) * g1inv
        if gamma.c % level == 0:
            return gamma
    return None


def equivalent_by_congruence(c1: Cusp, c2: Cusp, level: int) -> bool:
    """Unit criterion: q2 = s q1 (mod N) and s p2 = p1 (mod gcd(q1, N)) for a unit s, up to sign."""
    n = level
    g = math.gcd(c1.q, n)
    for s in range(1, max(n, 2)):
        if math.gcd(s, n) != 1 and n > 1:
            continue
        for eps in (1, -1):
            if (eps * c2.q - s * c1.q) % n == 0 and (eps * s * c2.p - c1.p) % g == 0:
                return True
    return False


def _phi(n: int) -> int:
    return sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)


def class_count(level: int) -> int:
    return sum(_phi(math.gcd(d, level // d)) for d in range(1, level + 1) if level % d == 0)


def cusp_classes(level: int) -> list[CuspClass]:
    """Pairwise inequivalent cusp representatives: oo first, then a/d by divisor d."""
    if level < 1:
        raise ValueError("level must be a positive integer")
    reps = [INFINITY]
    for d in range(1, level):
        if level % d:
            continue
        wanted = _phi(math.gcd(d, level // d))
        found = 0
        a = 0
        while found < wanted:
            if math.gcd(a, d) == 1:
                c = Cusp(a, d)
                if all(equivalence_element(r, c, level) is None for r in reps):
                    reps.append(c)
                    found += 1
            a += 1
            if a > d * level + 1:
                raise AssertionError(f"missing cusp classes with denominator {d}")
    return [make_class(r, level) for r in reps]


def classify_cusp(c: Cusp, level: int, classes: Sequence[CuspClass]) -> tuple[int, GroupElement]:
    """Index of the class of ``c`` and gamma in Gamma0(N) with gamma(rep) = c."""
    for i, cls in enumerate(classes):
        if cls.rep == c:
            return i, IDENTITY
    for i, cls in enumerate(classes):
        gamma = equivalence_element(cls.rep, c, level)
        if gamma is not None:
            return i, gamma
    raise AssertionError(f"cusp {c} matched no class of Gamma0({level})")


def scaling_for(c: Cusp, level: int, classes: Sequence[CuspClass]) -> np.ndarray:
    """Compatible scaling matrix gamma * sigma(rep) for an arbitrary cusp."""
    i, gamma = classify_cusp(c, level, classes)
    g = np.array([[gamma.a, gamma.b], [gamma.c, gamma.d]], dtype=float)
    return g @ classes[i].sigma


# ---------------------------------------------------------------------------
# geodesic segments and horoballs


Endpoint = tuple[tuple[int, int, int, int], BasePoint]


def endpoint(z: complex) -> Endpoint:
    return ((1, 0, 0, 1), BasePoint.from_complex(z))


def _apply(g, e: Endpoint) -> tuple[int, int, int]:
    m, base = e
    a, b, c, d = g
    A, B, C, D = m
    return base.image_parts((a * A + b * C, a * B + b * D, c * A + d * C, c * B + d * D))


def segment_max_height(g, e1: Endpoint, e2: Endpoint) -> float:
    """Largest imaginary part along the geodesic segment after applying the integer matrix g."""
    r1, i1, n1 = _apply(g, e1)
    r2, i2, n2 = _apply(g, e2)
    y1, y2 = i1 / n1, i2 / n2
    dx = (r2 * n1 - r1 * n2) / (n1 * n2)
    top = max(y1, y2)
    scale = max(abs(dx), top)
    if dx == 0 or scale == 0:
        return top
    u, v1, v2 = dx / scale, y1 / scale, y2 / scale
    if u * u <= abs(v2 * v2 - v1 * v1):
        return top
    s = u * u + v1 * v1 + v2 * v2
    rho2 = (s * s - 4.0 * v1 * v1 * v2 * v2) / (4.0 * u * u)
    return max(top, math.sqrt(max(rho2, 0.0)) * scale)


def _inverse(p: int, q: int, u: int, v: int) -> tuple[int, int, int, int]:
    # inverse of (p u; q v) with determinant one
    return v, -u, -q, p


def _under_arc(lo_p, lo_q, hi_p, hi_q, e: Endpoint) -> bool:
    """Whether the endpoint lies strictly inside the half-disk spanned by the Farey pair lo < hi."""
    # F = (hi_p lo_p; hi_q lo_q) maps 0 -> lo, oo -> hi, and the half-disk to Re > 0
    finv = (lo_q, -lo_p, -hi_q, hi_p)
    re_num, _, _ = _apply(finv, e)
    return re_num > 0


Threshold = Callable[[int], float]


def horoballs_on_segment(
    e1: Endpoint,
    e2: Endpoint,
    threshold: Threshold,
    budget: int = 200_000,
) -> Iterator[tuple[Cusp, GroupElement]]:
    """Cusps whose horoball {Im(g_c^-1 z) > threshold(q)} meets the segment e1-e2.

    Thresholds must be at least 1/2; such horoballs lie inside the Farey star
    of their cusp, so a Stern-Brocot subtree only needs visiting when an
    endpoint lies under its Farey arc. Cusps are produced ancestors first.
    """
    if threshold(0) < 0.5:
        raise ValueError("horoball thresholds below 1/2 are not supported")
    ident = (1, 0, 0, 1)
    if segment_max_height(ident, e1, e2) > threshold(0):
        yield INFINITY, IDENTITY
    points = []
    for e in (e1, e2):
        r, i, n = _apply(ident, e)
        points.append(complex(r / n, i / n))
    integers = set()
    intervals = set()
    for z in points:
        for n in range(math.floor(z.real) - 2, math.ceil(z.real) + 3):
            if abs(z - n) < 2.0:
                integers.add(n)
        n = math.floor(z.real)
        for k in (n - 1, n, n + 1):
            if _under_arc(k, 1, k + 1, 1, e1) or _under_arc(k, 1, k + 1, 1, e2):
                intervals.add(k)
    thr1 = threshold(1)
    for n in sorted(integers):
        if segment_max_height(_inverse(n, 1, -1, 0), e1, e2) > thr1:
            yield Cusp(n, 1), GroupElement(n, -1, 1, 0)
    visited = 0
    for n in sorted(intervals):
        stack = [(n, 1, n + 1, 1)]
        while stack:
            visited += 1
            if visited > budget:
                raise ResourceError(f"horoball search exceeded {budget} Farey nodes")
            a, b, c, d = stack.pop()
            p, q = a + c, b + d
            # g = (p a; q b) sends oo to the mediant
            if segment_max_height(_inverse(p, q, a, b), e1, e2) > threshold(q):
                yield Cusp(p, q), GroupElement(p, a, q, b)
            for child in ((p, q, c, d), (a, b, p, q)):
                if _under_arc(child[0], child[1], child[2], child[3], e1) or _under_arc(
                    child[0], child[1], child[2], child[3], e2
                ):
                    stack.append(child)


def max_cusp_height(z: complex, level: int) -> float:
    """Largest normalized height of z over all cusps of Gamma0(N)."""
    x, y = z.real, z.imag
    best = y
    q = 1
    while 1.0 / (q * q * y) > best:
        w = level // math.gcd(q * q, level)
        reach = math.sqrt(y / (w * best)) if best > 0 else math.inf
        for p in range(math.floor(q * x - reach) - 1, math.ceil(q * x + reach) + 2):
            if math.gcd(p, q) != 1:
                continue
            h = y / (w * ((q * x - p) ** 2 + (q * y) ** 2))
            best = max(best, h)
        q += 1
    return best


def horoballs_disjoint(c1: Cusp, w1: int, c2: Cusp, w2: int, T: float) -> bool:
    """Tangency test for the T-horoballs at two distinct cusps."""
    if c1 == c2:
        return False
    if c1.is_infinity or c2.is_infinity:
        other, w = (c2, w2) if c1.is_infinity else (c1, w1)
        return w * T * T * other.q * other.q >= 1.0
    cross = c1.p * c2.q - c2.p * c1.q
    return cross * cross * w1 * w2 * T * T >= 1.0


def enters_horoball(z: complex, w: complex, cls: CuspClass, T: float) -> bool:
    if not T > 1:
        raise ValueError("truncation height must exceed 1")
    g = cls.g_rep
    return segment_max_height(g.inverse().entries, endpoint(z), endpoint(w)) > cls.width * T


@dataclass(frozen=True)
class TruncationParams:
    T: float
    classes: tuple[CuspClass, ...]
    level: int

    def __post_init__(self):
        if not self.T > 1:
            raise ValueError("truncation height must exceed 1")

    def width(self, q: int) -> int:
        return 1 if q == 0 else self.level // math.gcd(q * q, self.level)

    def threshold(self, q: int) -> float:
        """Height in g_c^-1 coordinates above which a point lies in the T-horoball."""
        return self.width(q) * self.T


def truncation_grid() -> Iterator[float]:
    yield from TRUNCATION_GRID
    t = 4.0
    while True:
        yield t
        t += 1.0


def choose_truncation(level: int, z0: complex) -> TruncationParams:
    classes = tuple(cusp_classes(level))
    need = SAFETY_FACTOR * max_cusp_height(z0, level)
    for T in truncation_grid():
        if T <= need:
            continue
        ok = all(
            horoballs_disjoint(a.rep, a.width, b.rep, b.width, T)
            for i, a in enumerate(classes)
            for b in classes[i + 1:]
        )
        if ok:
            return TruncationParams(T, classes, level)
    raise AssertionError("unreachable")
