"""Numerical modular symbols of weight two cusp forms.

With F(z) = sum_n (a_n / n) exp(2 pi i n z) the symbol of gamma is
F(z0) - F(gamma z0) for any interior base point z0. For gamma = (a b; c d)
with c > 0 the base point (-d + i)/c is mapped to (a + i)/c, so both ends
sit at height 1/c and the truncated sums converge equally fast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .arith import GroupElement, mobius
from .errors import MembershipError, ParseError, PrecisionError
from .words import GeneratorTable, rewrite

TWO_PI = 2.0 * math.pi
DEFAULT_TOL = 1e-10
DEFAULT_ORDER = 100_000


@dataclass(frozen=True)
class CuspFormSeries:
    level: int
    coeffs: np.ndarray  # a_1 .. a_M, complex
    coeff_bound: float

    weight = 2

    @property
    def order(self) -> int:
        return len(self.coeffs)

    @classmethod
    def from_coefficients(cls, level: int, coeffs: Sequence[complex]) -> CuspFormSeries:
        arr = np.asarray(coeffs, dtype=complex)
        if arr.ndim != 1 or len(arr) < 1:
            raise ValueError("need at least one coefficient")
        n = np.arange(1, len(arr) + 1)
        kappa = float(np.max(np.abs(arr) / n))
        arr.setflags(write=False)
        return cls(int(level), arr, kappa)

    def tail_bound(self, y: float) -> float:
        """Bound on the neglected part of the Eichler sum at height y."""
        r = math.exp(-TWO_PI * y)
        return self.coeff_bound * math.exp(-TWO_PI * self.order * y) / (1.0 - r)


def eta_product_coefficients(order: int, level: int = 11) -> np.ndarray:
    """a_1..a_M of q * prod (1 - q^n)^2 (1 - q^(level n))^2 as int64."""
    size = order  # exponents 0 .. order-1 of the product, shifted by q
    pent = np.zeros(size, dtype=np.int64)
    k = 0
    while True:
        # Euler: prod (1 - q^n) = sum_k (-1)^k q^(k(3k-1)/2) over all integers k
        done = True
        for kk in ((k, -k) if k else (0,)):
            e = kk * (3 * kk - 1) // 2
            if e < size:
                pent[e] += -1 if kk % 2 else 1
                done = False
        if done:
            break
        k += 1
    stretched = np.zeros(size, dtype=np.int64)
    stretched[::level] = pent[: (size + level - 1) // level]
    result = pent.copy()
    for factor in (pent, stretched, stretched):
        nz = np.nonzero(factor)[0]
        acc = np.zeros(size, dtype=np.int64)
        for e in nz:
            acc[e:] += factor[e] * result[: size - e]
        result = acc
    return result


def builtin_level11(order: int = DEFAULT_ORDER) -> CuspFormSeries:
    return CuspFormSeries.from_coefficients(11, eta_product_coefficients(order, 11).astype(complex))


def zero_series(level: int = 1, order: int = 1) -> CuspFormSeries:
    return CuspFormSeries.from_coefficients(level, np.zeros(order, dtype=complex))


def load_series(path) -> CuspFormSeries:
    """Parse a coefficient file: header "N 2 M", then lines "n re" or "n re im" for n = 1..M."""
    lines = Path(path).read_text().splitlines()
    header = None
    coeffs: list[complex] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        try:
            if header is None:
                if len(fields) != 3:
                    raise ParseError(f"line {lineno}: header must be 'N 2 M'")
                header = tuple(int(f) for f in fields)
                if header[1] != 2:
                    raise ParseError(f"line {lineno}: weight {header[1]} is not supported, expected 2")
                if header[0] < 1 or header[2] < 1:
                    raise ParseError(f"line {lineno}: level and order must be positive")
                continue
            if len(fields) not in (2, 3):
                raise ParseError(f"line {lineno}: expected 'n re' or 'n re im'")
            n = int(fields[0])
            value = complex(float(fields[1]), float(fields[2]) if len(fields) == 3 else 0.0)
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"line {lineno}: {exc}") from None
        if n != len(coeffs) + 1:
            raise ParseError(f"line {lineno}: expected index {len(coeffs) + 1}, got {n}")
        if n > header[2]:
            raise ParseError(f"line {lineno}: index {n} exceeds declared order {header[2]}")
        coeffs.append(value)
    if header is None:
        raise ParseError("line 1: missing header")
    if len(coeffs) != header[2]:
        raise ParseError(f"line {len(lines)}: expected {header[2]} coefficients, found {len(coeffs)}")
    return CuspFormSeries.from_coefficients(header[0], coeffs)


def write_series(series: CuspFormSeries, path) -> None:
    out = [f"{series.level} 2 {series.order}"]
    for n, a in enumerate(series.coeffs, start=1):
        out.append(f"{n} {a.real:.17g}" if a.imag == 0 else f"{n} {a.real:.17g} {a.imag:.17g}")
    Path(path).write_text("\n".join(out) + "\n")


def _terms_needed(series: CuspFormSeries, y: float, tol: float) -> int:
    """Smallest n beyond which the remaining terms sum to less than tol."""
    if series.coeff_bound == 0:
        return 0
    r = math.exp(-TWO_PI * y)
    n = math.log(series.coeff_bound / (tol * (1.0 - r))) / (TWO_PI * y)
    return max(1, min(series.order, math.ceil(n)))


def eichler_F(z: complex, series: CuspFormSeries, tol: float = DEFAULT_TOL) -> tuple[complex, float]:
    """Truncated Eichler sum at ``z`` and its certified tail bound."""
    y = z.imag
    if not y > 0:
        raise ValueError("z must lie in the upper half plane")
    tail = series.tail_bound(y)
    if tail > tol:
        raise PrecisionError(
            f"Im z = {y:.3g} needs more than {series.order} coefficients for tolerance {tol:g}"
        )
    n_terms = _terms_needed(series, y, tol * 1e-3)
    if n_terms == 0:
        return 0j, tail
    x = z.real - math.floor(z.real)
    n = np.arange(1, n_terms + 1)
    phase = np.exp(TWO_PI * 1j * x * n - TWO_PI * y * n)
    terms = series.coeffs[:n_terms] / n * phase
    return complex(np.sum(terms[::-1])), tail


def _eichler_at_fraction(num: int, den: int, height_scale: int, series: CuspFormSeries, tol: float) -> complex:
    """F((num + i*height_scale) / den), with the real part reduced mod 1 exactly."""
    x = (num % den) / den
    return eichler_F(complex(x, height_scale / den), series, tol)[0]


def check_membership(gamma: GroupElement, level: int) -> None:
    if gamma.c % level:
        raise MembershipError(f"{gamma} is not in Gamma0({level})")


def modsym_direct(gamma: GroupElement, series: CuspFormSeries, tol: float = DEFAULT_TOL) -> complex:
    """Symbol of gamma from the balanced base point (-d + i)/c."""
    check_membership(gamma, series.level)
    a, _, c, d = gamma.entries
    if c == 0:
        return 0j
    return _eichler_at_fraction(-d, c, 1, series, tol) - _eichler_at_fraction(a, c, 1, series, tol)


def modsym_at(gamma: GroupElement, series: CuspFormSeries, z0: complex, tol: float = DEFAULT_TOL) -> complex:
    """Symbol of gamma from an arbitrary interior base point."""
    check_membership(gamma, series.level)
    return eichler_F(z0, series, tol)[0] - eichler_F(mobius(gamma, z0), series, tol)[0]


def modsym_scaled_base(gamma: GroupElement, series: CuspFormSeries, k: int, tol: float = DEFAULT_TOL) -> complex:
    """Symbol of gamma from the base point (-d + k i)/c, which maps to (a + i/k)/c."""
    check_membership(gamma, series.level)
    a, _, c, d = gamma.entries
    if c == 0:
        return 0j
    start = eichler_F(complex(((-d) % c) / c, k / c), series, tol)[0]
    end = eichler_F(complex((a % c) / c, 1.0 / (k * c)), series, tol)[0]
    return start - end


def max_direct_denominator(series: CuspFormSeries, tol: float) -> int:
    """Largest lower-left entry c for which modsym_direct stays within tolerance."""
    if series.coeff_bound == 0:
        return 1 << 62
    lo, hi = 1, 1
    while series.tail_bound(1.0 / hi) <= tol:
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if series.tail_bound(1.0 / mid) <= tol:
            lo = mid
        else:
            hi = mid
    return lo


@dataclass(frozen=True)
class SymbolMap:
    table: GeneratorTable
    values: np.ndarray
    tol: float

    def __call__(self, gamma: GroupElement) -> complex:
        return modsym_word(gamma, self)


def build_symbol_map(table: GeneratorTable, series: CuspFormSeries, tol: float = DEFAULT_TOL) -> SymbolMap:
    if table.level % series.level:
        raise MembershipError(f"a level {series.level} form does not live on Gamma0({table.level})")
    values = np.zeros(len(table.generators), dtype=complex)
    for j, g in enumerate(table.generators):
        try:
            values[j] = modsym_direct(g, series, tol)
        except PrecisionError as exc:
            raise PrecisionError(f"generator {j} = {g}: {exc}") from None
    for j, k in enumerate(table.inverse_index):
        if abs(values[j] + values[k]) > 2 * tol:
            raise AssertionError(f"generator values {j} and {k} are not antisymmetric")
    values.setflags(write=False)
    return SymbolMap(table, values, tol)


def word_value(word, smap: SymbolMap) -> complex:
    vals = smap.values
    inv = smap.table.inverse_index
    total = 0j
    for j, e in word:
        total += vals[j] if e > 0 else vals[inv[j]]
    return total


def modsym_word(gamma: GroupElement, smap: SymbolMap) -> complex:
    return word_value(rewrite(gamma, smap.table), smap)


def word_bound_constant(smap: SymbolMap) -> float:
    if len(smap.values) == 0:
        return 0.0
    return float(np.max(np.abs(smap.values)))


# ---------------------------------------------------------------------------
# period lattice


@dataclass(frozen=True)
class PeriodLattice:
    omega1: complex
    omega2: complex
    coefficients: np.ndarray  # integer pairs, one row per value
    residual: float


def period_lattice(values: Sequence[complex], max_denominator: int = 20, max_coeff: int = 20) -> PeriodLattice:
    """Fit values to a rank two lattice Z omega1 + Z omega2.

    Two independent values give real coordinates for all others; these are
    rationalized with a common denominator, and a Hermite reduction of the
    scaled integer coordinates yields a basis of the generated lattice.
    """
    vals = [complex(v) for v in values]
    nonzero = [v for v in vals if abs(v) > 1e-9]
    if not nonzero:
        return PeriodLattice(0j, 0j, np.zeros((len(vals), 2), dtype=int), 0.0)
    b1 = min(nonzero, key=abs)
    rest = [v for v in nonzero if abs((v / b1).imag) > 1e-6]
    if not rest:
        raise ValueError("values are collinear; no rank two lattice")
    b2 = min(rest, key=abs)
    basis = np.array([[b1.real, b2.real], [b1.imag, b2.imag]])
    coords = np.linalg.solve(basis, np.array([[v.real for v in vals], [v.imag for v in vals]])).T
    for den in range(1, max_denominator + 1):
        scaled = coords * den
        if np.max(np.abs(scaled - np.round(scaled))) < 1e-4:
            break
    else:
        raise ValueError(f"coordinates are not rational with denominator <= {max_denominator}")
    ints = np.round(coords * den).astype(np.int64)
    h = _hermite_basis(ints)
    # lattice basis vectors in the (b1, b2) frame, scaled back by den
    omega1 = complex(h[0][0] * b1 + h[0][1] * b2) / den
    omega2 = complex(h[1][0] * b1 + h[1][1] * b2) / den
    frame = np.array([[omega1.real, omega2.real], [omega1.imag, omega2.imag]])
    lat = np.linalg.solve(frame, np.array([[v.real for v in vals], [v.imag for v in vals]])).T
    coeffs = np.round(lat).astype(np.int64)
    if np.max(np.abs(coeffs)) > max_coeff:
        raise ValueError(f"lattice coefficients exceed {max_coeff}")
    fitted = coeffs[:, 0] * omega1 + coeffs[:, 1] * omega2
    residual = float(np.max(np.abs(fitted - np.array(vals))))
    return PeriodLattice(omega1, omega2, coeffs, residual)


def _hermite_basis(rows: np.ndarray) -> list[list[int]]:
    """Basis (two rows) of the integer row lattice spanned by ``rows``."""
    vecs = [[int(a), int(b)] for a, b in rows if a or b]
    # gcd on first column
    first = None
    others = []
    for v in vecs:
        if v[0] == 0:
            others.append(v)
            continue
        if first is None:
            first = v
            continue
        while v[0]:
            k = first[0] // v[0]
            first, v = v, [first[0] - k * v[0], first[1] - k * v[1]]
        others.append(v)
    g2 = 0
    for v in others:
        g2 = math.gcd(g2, v[1])
    if first is None or g2 == 0:
        raise ValueError("integer coordinates do not span rank two")
    return [first, [0, g2]]
