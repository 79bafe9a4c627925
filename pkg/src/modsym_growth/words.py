"""Words over generators, coset tables of Gamma0(N), and Reidemeister-Schreier rewriting.

Cosets Gamma0(N) g are identified with bottom rows (c : d) of g in the
projective line over Z/N; PSL2(Z) acts on them from the right. A breadth
first spanning tree of the coset graph gives a Schreier transversal, and
every non-tree edge gives a Schreier generator.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .arith import IDENTITY, S, T, BasePoint, GroupElement
from .errors import MembershipError, ResourceError

Letter = tuple[int, int]
Word = tuple[Letter, ...]

# generator indices for words over the modular group itself
S_INDEX, T_INDEX = 0, 1
PSL2Z_GENERATORS = (S, T)

DEFAULT_INDEX_CAP = 200_000


def psl2z_reduce(word: Sequence[Letter]) -> Word:
    """Free reduction over {S, T}, with S treated as an involution."""
    out: list[Letter] = []
    for j, e in word:
        if j == S_INDEX:
            e = 1
        if out and out[-1][0] == j and (j == S_INDEX or out[-1][1] == -e):
            out.pop()
        else:
            out.append((j, e))
    return tuple(out)


def decompose_psl2z(g: GroupElement) -> Word:
    """Write ``g`` as a word in S and T by the nearest-integer Euclidean algorithm."""
    letters: list[Letter] = []
    a, b, c, d = g.entries
    while c != 0:
        q = (2 * a + c) // (2 * c)
        letters.extend([(T_INDEX, 1 if q > 0 else -1)] * abs(q))
        a, b = a - q * c, b - q * d
        # peel off S: (a b; c d) = S (c d; -a -b)
        letters.append((S_INDEX, 1))
        a, b, c, d = c, d, -a, -b
        if c < 0 or (c == 0 and a < 0):
            a, b, c, d = -a, -b, -c, -d
    letters.extend([(T_INDEX, 1 if b > 0 else -1)] * abs(b))
    return psl2z_reduce(letters)


def evaluate(word: Sequence[Letter], generators: Sequence[GroupElement]) -> GroupElement:
    result = IDENTITY
    for j, e in word:
        g = generators[j]
        result = result * (g if e > 0 else g.inverse())
    return result


def _units(n: int) -> list[int]:
    return [u for u in range(1, n) if math.gcd(u, n) == 1] if n > 1 else [0]


def index_formula(n: int) -> int:
    """N * prod over primes p | N of (1 + 1/p)."""
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            result = result // p * (p + 1)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        result = result // m * (m + 1)
    return result


@dataclass
class GeneratorTable:
    """Coset data and a symmetric Schreier generating set for Gamma0(N).

    ``generators`` is closed under inversion; ``inverse_index[j]`` points at
    the inverse of generator j. ``edge_letters[x][i]`` is the generator index
    produced by lifting the move x in {S, T, T^-1} out of coset i, or -1 on
    spanning tree edges.
    """

    level: int
    cosets: list[tuple[int, int]]
    transversal: list[GroupElement]
    generators: list[GroupElement]
    inverse_index: list[int]
    action: dict[str, list[int]]
    edge_letters: dict[str, list[int]] = field(repr=False)
    position: dict[GroupElement, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.position = {g: j for j, g in enumerate(self.generators)}

    @property
    def index(self) -> int:
        return len(self.cosets)

    def evaluate(self, word: Sequence[Letter]) -> GroupElement:
        return evaluate(word, self.generators)

    def reduce(self, word: Sequence[Letter]) -> Word:
        return reduce_word(word, self.inverse_index)

    def contains(self, g: GroupElement) -> bool:
        return g.c % self.level == 0


class _ProjectiveLine:
    def __init__(self, n: int):
        self.n = n
        self.units = _units(n)
        self._cache: dict[tuple[int, int], tuple[int, int]] = {}

    def canonical(self, c: int, d: int) -> tuple[int, int]:
        n = self.n
        if n == 1:
            return (0, 0)
        key = (c % n, d % n)
        hit = self._cache.get(key)
        if hit is None:
            hit = min(((u * key[0]) % n, (u * key[1]) % n) for u in self.units)
            self._cache[key] = hit
        return hit


def reduce_word(word: Sequence[Letter], inverse_index: Sequence[int]) -> Word:
    """Free reduction over a symmetric generating set, letters normalized to exponent +1."""
    out: list[Letter] = []
    for j, e in word:
        if e < 0:
            j = inverse_index[j]
        if out and inverse_index[out[-1][0]] == j:
            out.pop()
        else:
            out.append((j, 1))
    return tuple(out)


_MOVES = {"S": S, "T": T, "Ti": T.inverse()}


def coset_table(level: int, index_cap: int = DEFAULT_INDEX_CAP) -> GeneratorTable:
    if level < 1:
        raise ValueError("level must be a positive integer")
    expected = index_formula(level)
    if expected > index_cap:
        raise ResourceError(f"index {expected} of Gamma0({level}) exceeds cap {index_cap}")
    line = _ProjectiveLine(level)

    def act(row, move):
        c, d = row
        x = _MOVES[move]
        return line.canonical(c * x.a + d * x.c, c * x.b + d * x.d)

    start = line.canonical(0, 1)
    cosets = [start]
    position = {start: 0}
    transversal = [IDENTITY]
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for move in ("S", "T", "Ti"):
            row = act(cosets[i], move)
            if row not in position:
                position[row] = len(cosets)
                cosets.append(row)
                transversal.append(transversal[i] * _MOVES[move])
                queue.append(position[row])

    action = {
        move: [position[act(row, move)] for row in cosets] for move in ("S", "T", "Ti")
    }

    generators: list[GroupElement] = []
    lookup: dict[GroupElement, int] = {}
    inverse_index: list[int] = []

    def register(h: GroupElement) -> int:
        if h in lookup:
            return lookup[h]
        k = len(generators)
        generators.append(h)
        lookup[h] = k
        hinv = h.inverse()
        if hinv == h:
            inverse_index.append(k)
        else:
            generators.append(hinv)
            lookup[hinv] = k + 1
            inverse_index.extend([k + 1, k])
        return k

    edge_letters: dict[str, list[int]] = {move: [-1] * len(cosets) for move in _MOVES}
    for move in ("S", "T"):
        for i, r in enumerate(transversal):
            j = action[move][i]
            h = r * _MOVES[move] * transversal[j].inverse()
            if h.is_identity():
                continue
            edge_letters[move][i] = register(h)
    for i in range(len(cosets)):
        j = action["Ti"][i]
        k = edge_letters["T"][j]
        edge_letters["Ti"][i] = -1 if k < 0 else inverse_index[k]

    if len(cosets) != expected:
        raise AssertionError(f"enumerated {len(cosets)} cosets, index formula gives {expected}")
    return GeneratorTable(
        level=level,
        cosets=cosets,
        transversal=transversal,
        generators=generators,
        inverse_index=inverse_index,
        action=action,
        edge_letters=edge_letters,
    )


def table_from_data(level: int, transversal: Sequence[GroupElement], generators: Sequence[GroupElement]) -> GeneratorTable:
    """Rebuild a table around a stored transversal and generator order."""
    line = _ProjectiveLine(level)
    cosets = [line.canonical(r.c, r.d) for r in transversal]
    position = {row: i for i, row in enumerate(cosets)}
    action = {}
    for move, x in _MOVES.items():
        action[move] = [position[line.canonical((r * x).c, (r * x).d)] for r in transversal]
    lookup = {g: k for k, g in enumerate(generators)}
    inverse_index = [lookup[g.inverse()] for g in generators]
    edge_letters = {move: [-1] * len(cosets) for move in _MOVES}
    for move, x in _MOVES.items():
        for i, r in enumerate(transversal):
            h = r * x * transversal[action[move][i]].inverse()
            if not h.is_identity():
                edge_letters[move][i] = lookup[h]
    return GeneratorTable(level, cosets, list(transversal), list(generators), inverse_index, action, edge_letters)


def rewrite(g: GroupElement, table: GeneratorTable) -> Word:
    """Word over ``table.generators`` evaluating to ``g``.

    Generators map to their own letter. Otherwise the S/T word of ``g`` is
    lifted through the coset action; each step out of coset i contributes
    the Schreier generator of that edge.
    """
    if not table.contains(g):
        raise MembershipError(f"{g} is not in Gamma0({table.level})")
    if g in table.position:
        return ((table.position[g], 1),)
    letters: list[Letter] = []
    coset = 0
    for j, e in decompose_psl2z(g):
        move = "S" if j == S_INDEX else ("T" if e > 0 else "Ti")
        k = table.edge_letters[move][coset]
        if k >= 0:
            letters.append((k, 1))
        coset = table.action[move][coset]
    if coset != 0:
        raise AssertionError("rewriting did not return to the trivial coset")
    return table.reduce(letters)


def word_length(g: GroupElement, table: GeneratorTable) -> int:
    return len(rewrite(g, table))


# ---------------------------------------------------------------------------
# Svarc-Milnor constants


@dataclass(frozen=True)
class SvarcMilnorFit:
    lam: float
    cee: float
    sample_size: int
    base_point: complex

    def bound(self, dist: float) -> float:
        return self.lam * dist + self.cee


def fit_linear_envelope(dists, lengths, step: float = 0.1, cap: float = 50.0, max_lambda: float = 1000.0):
    """Smallest grid slope lam >= 1 (then smallest intercept) with lengths <= lam*dists + C, C <= cap."""
    pairs = list(zip(dists, lengths))
    if not pairs:
        raise ValueError("need at least one (distance, length) pair")
    k = 0
    while True:
        lam = 1.0 + k * step
        if lam > max_lambda:
            raise ValueError(f"no slope up to {max_lambda} keeps the intercept below {cap}")
        cee = max(0.0, max(l - lam * d for d, l in pairs))
        if cee <= cap:
            return lam, cee
        k += 1


def estimate_svarc_milnor(
    table: GeneratorTable,
    sample: Sequence[GroupElement],
    z0: complex,
    step: float = 0.1,
    cap: float = 50.0,
) -> SvarcMilnorFit:
    if not sample:
        raise ValueError("sample must be nonempty")
    base = BasePoint.from_complex(z0)
    dists = [base.orbit_distance(g.entries) for g in sample]
    lengths = [word_length(g, table) for g in sample]
    lam, cee = fit_linear_envelope(dists, lengths, step=step, cap=cap)
    return SvarcMilnorFit(lam, cee, len(sample), z0)
