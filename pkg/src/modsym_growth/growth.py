"""Growth harness: sampling, scans of |psi| against log norm, and the explicit constants."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .arith import IDENTITY, LOG2, BasePoint, GroupElement, arccosh_ratio, disk_coordinate, norm, ray_point
from .cusps import TruncationParams, endpoint, horoballs_on_segment
from .errors import ReductionError, ResourceError
from .reduction import reduce
from .symbols import SymbolMap, modsym_word, word_value
from .words import GeneratorTable, rewrite

CSV_COLUMNS = ("norm", "log_norm", "word_len", "dist", "reduced_dist", "abs_psi")
DEFAULT_BALL_CAP = 2_000_000
SMALL_NORM = 2
REFINE_PEAKS = 4


def make_rng(seed: int) -> np.random.Generator:
    """The single random source for all sampling: numpy's PCG64 seeded by ``seed``."""
    return np.random.Generator(np.random.PCG64(seed))


def random_word(table: GeneratorTable, length: int, rng: np.random.Generator) -> GroupElement:
    """Product of ``length`` uniform generators, never following a letter by its inverse."""
    n = len(table.generators)
    g = IDENTITY
    prev = None
    for _ in range(length):
        while True:
            j = int(rng.integers(n))
            if prev is None or table.inverse_index[prev] != j:
                break
        g = g * table.generators[j]
        prev = j
    return g


def random_element(level: int, bound: int, rng: np.random.Generator) -> GroupElement:
    """Element of Gamma0(N) with norm <= bound, drawn by choosing a bottom row first."""
    if bound < 1:
        raise ValueError("bound must be positive")
    while True:
        c = level * int(rng.integers(0, bound // level + 1))
        d = int(rng.integers(-bound, bound + 1))
        if c == 0:
            return GroupElement(1, int(rng.integers(-bound, bound + 1)), 0, 1)
        if math.gcd(c, d) != 1:
            continue
        a0 = pow(d, -1, c)
        lo = -((bound + a0) // c)
        hi = (bound - a0) // c
        if lo > hi:
            continue
        a = a0 + c * int(rng.integers(lo, hi + 1))
        b, rem = divmod(a * d - 1, c)
        if rem or abs(b) > bound or abs(a) > bound:
            continue
        return GroupElement(a, b, c, d)


def norm_ball(level: int, bound: int, cap: int = DEFAULT_BALL_CAP) -> list[GroupElement]:
    """All elements of Gamma0(N) with norm <= bound, in canonical PSL2 form."""
    out = [GroupElement(1, b, 0, 1) for b in range(-bound, bound + 1)]
    for c in range(level, bound + 1, level):
        for d in range(-bound, bound + 1):
            if math.gcd(c, d) != 1:
                continue
            a = pow(d, -1, c) if c > 1 else 0
            a -= c * ((a + bound) // c)
            while a <= bound:
                if a >= -bound:
                    b = (a * d - 1) // c
                    if abs(b) <= bound:
                        out.append(GroupElement(a, b, c, d))
                        if len(out) > cap:
                            raise ResourceError(f"norm ball exceeds {cap} elements")
                a += c
    return out


def sample_elements(
    table: GeneratorTable,
    strategy: str,
    size: int,
    bound: int,
    seed: int = 0,
    cap: int = DEFAULT_BALL_CAP,
) -> list[GroupElement]:
    """Deterministic samples: random words of length up to ``bound``, or the full norm ball."""
    if size < 1:
        raise ValueError("size must be at least 1")
    if strategy == "random-word":
        rng = make_rng(seed)
        return [random_word(table, int(rng.integers(0, bound + 1)), rng) for _ in range(size)]
    if strategy == "norm-ball":
        ball = norm_ball(table.level, bound, cap)
        return ball[:size]
    raise ValueError(f"unknown sampling strategy {strategy!r}")


def holdout_sample(table, size, max_len, seed, exclude: Iterable[GroupElement]) -> list[GroupElement]:
    """Random-word sample of ``size`` elements none of which occur in ``exclude``."""
    seen = set(exclude)
    rng = make_rng(seed)
    out = []
    while len(out) < size:
        g = random_word(table, int(rng.integers(0, max_len + 1)), rng)
        if g not in seen:
            out.append(g)
            seen.add(g)
    return out


@dataclass(frozen=True)
class GrowthRecord:
    norm: int
    log_norm: float
    word_len: int
    dist: float
    abs_psi: float
    reduced_dist: float
    error: str | None = None


def scan(
    sample: Sequence[GroupElement],
    smap: SymbolMap,
    trunc: TruncationParams,
    z0: complex,
) -> list[GrowthRecord]:
    base = BasePoint.from_complex(z0)
    records = []
    for g in sample:
        word = rewrite(g, smap.table)
        psi = word_value(word, smap)
        dist = base.orbit_distance(g.entries)
        error = None
        try:
            reduced = reduce(g, trunc, z0).final_distance
        except ReductionError as exc:
            reduced, error = math.nan, str(exc)
        n = norm(g)
        records.append(GrowthRecord(n, math.log(n), len(word), dist, abs(psi), reduced, error))
    return records


def write_csv(records: Sequence[GrowthRecord], target) -> None:
    """Write records to a path or an open text stream."""
    if hasattr(target, "write"):
        _write_rows(records, target)
        return
    with open(target, "w", newline="") as fh:
        _write_rows(records, fh)


def _write_rows(records, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow(
            [
                str(r.norm),
                _fmt(r.log_norm),
                str(r.word_len),
                _fmt(r.dist),
                _fmt(r.reduced_dist),
                _fmt(r.abs_psi),
            ]
        )


def read_csv(path) -> list[GrowthRecord]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [
        GrowthRecord(
            int(r["norm"]),
            float(r["log_norm"]),
            int(r["word_len"]),
            float(r["dist"]),
            float(r["abs_psi"]),
            float(r["reduced_dist"]),
        )
        for r in rows
    ]


def _fmt(x: float) -> str:
    return f"{x + 0.0:.12g}"


@dataclass(frozen=True)
class GrowthFit:
    A: float
    B: float

    def bound(self, log_norm: float) -> float:
        return self.A * log_norm + self.B


def fit_log_bound(records: Sequence[GrowthRecord]) -> GrowthFit:
    """B from records of norm <= 2, then the smallest A covering every other record."""
    if not records:
        raise ValueError("records must be nonempty")
    return GrowthFit(*fit_log_arrays([r.norm for r in records], [r.abs_psi for r in records]))


def fit_log_arrays(norms, abs_psi) -> tuple[float, float]:
    B = max((p for n, p in zip(norms, abs_psi) if n <= SMALL_NORM), default=0.0)
    A = 0.0
    for n, p in zip(norms, abs_psi):
        if n > SMALL_NORM:
            A = max(A, (p - B) / math.log(n))
    return float(max(A, 0.0)), float(B)


def count_violations(records: Sequence[GrowthRecord], fit: GrowthFit, slack: float = 1e-9) -> int:
    return sum(1 for r in records if r.abs_psi > fit.bound(r.log_norm) + slack)


# ---------------------------------------------------------------------------
# explicit constants


@dataclass(frozen=True)
class ExplicitConstants:
    R: float
    ball_gens: tuple[GroupElement, ...]
    r_lower: float
    C_S: float
    boundary_samples: int

    def slope(self) -> float:
        return 2.0 * self.C_S / self.r_lower

    def intercept(self) -> float:
        return self.C_S * (3.0 * LOG2 / self.r_lower + 1.0)

    def bound(self, log_norm: float) -> float:
        return self.slope() * log_norm + self.intercept()


@dataclass(frozen=True)
class BoundReport:
    records: int
    violations: int
    max_slack: float
    min_slack: float


def orbit_ball(level: int, z0: complex, radius: float, cap: int = DEFAULT_BALL_CAP) -> list[tuple[GroupElement, float]]:
    """All gamma in Gamma0(N) with d(z0, gamma z0) <= radius, with their distances.

    Uses 2 cosh d = |A^-1 gamma A|_F^2 for A taking i to z0: each of the four
    entries (a - c x), c y, (c x + d) and ((a x + b) - x(c x + d))/y is bounded
    by sqrt(2 cosh radius).
    """
    base = BasePoint.from_complex(z0)
    x, y = z0.real, z0.imag
    bound2 = 2.0 * math.cosh(radius)
    lim = math.sqrt(bound2) * (1 + 1e-12) + 1e-9
    limit_num = base.cosh_threshold(radius) * (1 + 1e-12)
    denom = 2 * (base.D * base.Y) ** 2
    out = []

    def consider(g: GroupElement):
        k = base.orbit_cosh_numerator(g.entries)
        if k <= limit_num:
            out.append((g, arccosh_ratio(k, denom)))
            if len(out) > cap:
                raise ResourceError(f"orbit ball of radius {radius:g} exceeds {cap} elements")

    # c == 0: translations; entry (b)/y bounded
    bmax = math.floor(lim * y) + 1
    for b in range(-bmax, bmax + 1):
        consider(GroupElement(1, b, 0, 1))
    cmax = math.floor(lim / y)
    for c in range(level, cmax + 1, level):
        for d in range(math.ceil(-lim - c * x), math.floor(lim - c * x) + 1):
            if math.gcd(c, d) != 1:
                continue
            a0 = pow(d, -1, c) if c > 1 else 0
            lo = c * x - lim
            a = a0 + c * math.ceil((lo - a0) / c)
            while a <= c * x + lim:
                consider(GroupElement(a, (a * d - 1) // c, c, d))
                a += c
    out.sort(key=lambda t: (t[1], t[0].entries))
    return out


def check_base_point(level: int, z0: complex) -> None:
    """Reject base points fixed by a non-identity element (elliptic points)."""
    for g, _ in orbit_ball(level, z0, 1e-9):
        if not g.is_identity():
            raise ValueError(f"base point {z0} is fixed by {g}; choose a point with trivial stabilizer")


def _ray_exit(z0: complex, theta: float, faces, trunc: TruncationParams, t_cap: float) -> float:
    """Distance from z0 to the boundary of the truncated Dirichlet domain along one ray."""
    t_face = math.inf
    for r_disk, angle in faces:
        cosphi = math.cos(theta - angle)
        if cosphi > r_disk:
            t_face = min(t_face, math.atanh(r_disk / cosphi))
    t_hi = min(t_face, t_cap)
    start = endpoint(z0)

    def cut(t):
        e = endpoint(ray_point(z0, theta, t))
        for _ in horoballs_on_segment(start, e, trunc.threshold):
            return True
        return False

    if not cut(t_hi):
        return t_hi
    lo, hi = 0.0, t_hi
    for _ in range(48):
        mid = 0.5 * (lo + hi)
        if cut(mid):
            hi = mid
        else:
            lo = mid
    return lo


def fundamental_radius(level: int, z0: complex, trunc: TruncationParams, samples: int = 1000, t_cap: float = 25.0) -> float:
    """Estimate of max d(z0, z) over the boundary of the truncated Dirichlet domain.

    Rays from z0 in ``samples`` evenly spaced directions, refined near the
    longest few by golden-section search, stop at the first
    Dirichlet bisector or T-horoball. The bisector with gamma z0, at distance
    D from z0 in disk direction phi0, meets the ray of direction theta where
    tanh t = tanh(D/2) / cos(theta - phi0) (right triangle with legs D/2).
    """
    radius = 4.0
    while True:
        ball = [(g, dist) for g, dist in orbit_ball(level, z0, radius) if not g.is_identity()]
        faces = []
        for g, dist in ball:
            w = disk_coordinate(_image(g, z0), z0)
            faces.append((math.tanh(dist / 2.0), math.atan2(w.imag, w.real)))
        exit_at = lambda theta: _ray_exit(z0, theta, faces, trunc, t_cap)  # noqa: E731
        step = 2.0 * math.pi / samples
        coarse = sorted(((exit_at(j * step), j * step) for j in range(samples)), reverse=True)
        R = max(_refine_peak(exit_at, theta, step) for _, theta in coarse[:REFINE_PEAKS])
        if 2.0 * R <= radius:
            return R
        # missing faces only enlarge the region, so widen the ball in small steps
        radius = min(2.0 * R, radius + 2.0)


def _refine_peak(f, theta: float, step: float, iters: int = 40) -> float:
    """Golden-section search for a local maximum of f within one grid step of theta."""
    ratio = (math.sqrt(5.0) - 1.0) / 2.0
    lo, hi = theta - step, theta + step
    best = f(theta)
    x1, x2 = hi - ratio * (hi - lo), lo + ratio * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - ratio * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + ratio * (hi - lo)
            f2 = f(x2)
        best = max(best, f1, f2)
    return best


def _image(g: GroupElement, z0: complex) -> complex:
    return BasePoint.from_complex(z0).image(g.entries)


def explicit_constants(
    table: GeneratorTable,
    trunc: TruncationParams,
    z0: complex,
    smap: SymbolMap,
    samples: int = 1000,
    cap: int = DEFAULT_BALL_CAP,
) -> ExplicitConstants:
    R = fundamental_radius(table.level, z0, trunc, samples)
    ball = orbit_ball(table.level, z0, 2.0 * R, cap)
    gens = tuple(g for g, _ in ball)
    step = 0.5
    while True:
        outside = [dist for g, dist in orbit_ball(table.level, z0, 2.0 * R + step, cap) if dist > 2.0 * R]
        if outside:
            r_lower = min(outside) - 2.0 * R
            break
        step *= 2.0
    C_S = float(max((abs(modsym_word(g, smap)) for g in gens), default=0.0))
    return ExplicitConstants(R, gens, r_lower, C_S, samples)


def verify_lemma2(records: Sequence[GrowthRecord], consts: ExplicitConstants) -> BoundReport:
    slacks = [consts.bound(r.log_norm) - r.abs_psi for r in records]
    violations = sum(1 for s in slacks if s < 0)
    return BoundReport(
        len(records),
        violations,
        float(max(slacks, default=math.inf)),
        float(min(slacks, default=math.inf)),
    )
