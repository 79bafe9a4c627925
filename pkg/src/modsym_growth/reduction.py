"""Parabolic reduction of group elements toward the truncated plane.

Starting from gamma, repeatedly left-multiply by a parabolic element that
strictly shortens d(z0, gamma z0), until none of the tried parabolics does.
Parabolics are powers of cusp stabilizer generators p_c = g_c T^w g_c^-1.
The cusps tried are those whose horoball at height 1/2 (before width
normalization) meets the current geodesic segment, plus infinity.

In g_c^-1 coordinates p_c^k is the translation by w*k, so the squared
distance term is a convex quadratic in k; the best power is the rounding of
its real minimizer and only neighbours of that integer need exact checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .arith import BasePoint, GroupElement, TraceClass, arccosh_ratio, classify
from .cusps import (
    Endpoint,
    TruncationParams,
    _apply,
    endpoint,
    horoballs_on_segment,
    stabilizer_power,
)
from .errors import MembershipError, ReductionError, ResourceError

CANDIDATE_LEVEL = 0.5
DEFAULT_MAX_STEPS = 10_000
DEFAULT_SEARCH_BUDGET = 20_000


@dataclass(frozen=True)
class ReductionResult:
    gamma: GroupElement
    gamma_s: GroupElement
    parabolics: tuple[GroupElement, ...]
    distances: tuple[float, ...] = field(repr=False)

    @property
    def steps(self) -> int:
        return len(self.parabolics)

    @property
    def initial_distance(self) -> float:
        return self.distances[0]

    @property
    def final_distance(self) -> float:
        return self.distances[-1]


def _mul(m, n):
    a, b, c, d = m
    e, f, g, h = n
    return a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h


def _best_parabolic(current, base: BasePoint, width_of, budget: int):
    """Best (cosh numerator, matrix, parabolic) over candidate cusps, or None."""
    here = (current, base)
    start: Endpoint = ((1, 0, 0, 1), base)
    best = None
    found = horoballs_on_segment(start, here, lambda q: CANDIDATE_LEVEL, budget=budget)
    try:
        for cusp, g in found:
            p, q = cusp.p, cusp.q
            w = width_of(q)
            ginv = g.inverse().entries
            r1, _, n1 = _apply(ginv, start)
            r2, _, n2 = _apply(ginv, here)
            shift = (r1 * n2 - r2 * n1) / (n1 * n2 * w)
            if abs(shift) < 0.5 - 1e-9:
                continue
            k0 = round(shift)
            for k in {k0 - 1, k0, k0 + 1} - {0}:
                par = stabilizer_power(p, q, w * k)
                cand = _mul(par, current)
                value = base.orbit_cosh_numerator(cand)
                if best is None or value < best[0]:
                    best = (value, cand, par)
    except ResourceError:
        # the search is ordered ancestors first; keep what was collected
        pass
    return best


def geodesic_in_truncation(z, w, trunc: TruncationParams, budget: int = DEFAULT_SEARCH_BUDGET) -> bool:
    """True when the segment from z to w meets no T-horoball of any cusp."""
    e1 = z if isinstance(z, tuple) else endpoint(z)
    e2 = w if isinstance(w, tuple) else endpoint(w)
    for _ in horoballs_on_segment(e1, e2, trunc.threshold, budget=budget):
        return False
    return True


def reduce(
    gamma: GroupElement,
    trunc: TruncationParams,
    z0: complex,
    max_steps: int = DEFAULT_MAX_STEPS,
    budget: int = DEFAULT_SEARCH_BUDGET,
) -> ReductionResult:
    if gamma.c % trunc.level:
        raise MembershipError(f"{gamma} is not in Gamma0({trunc.level})")
    base = BasePoint.from_complex(z0)
    current = gamma.entries
    value = base.orbit_cosh_numerator(current)
    denom = 2 * (base.D * base.Y) ** 2
    distances = [arccosh_ratio(value, denom)]
    parabolics: list[GroupElement] = []
    while True:
        found = _best_parabolic(current, base, trunc.width, budget)
        if found is None or found[0] >= value:
            break
        if len(parabolics) >= max_steps:
            raise ReductionError(
                f"reduction exceeded {max_steps} steps", best=GroupElement(*current)
            )
        value, current, par = found
        parabolics.append(GroupElement(*par))
        distances.append(arccosh_ratio(value, denom))
    gamma_s = GroupElement(*current)
    try:
        inside = geodesic_in_truncation(((1, 0, 0, 1), base), (current, base), trunc, budget)
    except ResourceError as exc:
        raise ReductionError(f"could not certify the reduced geodesic: {exc}", best=gamma_s) from None
    if not inside:
        raise ReductionError(
            f"no parabolic shortens {gamma_s} but its geodesic still meets a T-horoball",
            best=gamma_s,
        )
    return ReductionResult(gamma, gamma_s, tuple(parabolics), tuple(distances))


def compose(parabolics: Sequence[GroupElement], gamma: GroupElement) -> GroupElement:
    """p_n ... p_1 gamma for parabolics listed in application order."""
    result = gamma
    for p in parabolics:
        result = p * result
    return result


def all_parabolic(parabolics: Sequence[GroupElement]) -> bool:
    return all(classify(p) is TraceClass.PARABOLIC for p in parabolics)
