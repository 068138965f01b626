"""Exact reference counters, distributions, and samplers.

Everything in this module is arbitrary-precision integer or Fraction
arithmetic; it exists to verify the approximate algorithms, not to compete
with them.  Counts use two independent routes (a one-side subset sweep for
bipartite inputs and a branching recursion for arbitrary graphs) so each can
check the other.
"""

from __future__ import annotations

import hashlib
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .errors import CapacityError, InvalidInputError
from .graphs import BipartiteGraph, Graph, iter_bits, neighborhood_bits


@dataclass(frozen=True)
class ExactCount:
    value: int | Fraction
    fingerprint: str
    elapsed: float


def _general_fingerprint(G: Graph) -> str:
    payload = ",".join(f"{v}:{G.rows[v]}" for v in range(G.n))
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


# -- bipartite sweep ----------------------------------------------------------

def _gray_sweep(G: BipartiteGraph, term):
    """Visit every S subseteq X in Gray-code order, keeping |N(S)| incremental.

    ``term(s_size, covered)`` is accumulated over all S; coverage counters per
    Y-vertex make each step O(d).
    """
    n_x = G.n_x
    counts = [0] * G.n_y
    covered = 0
    s_size = 0
    mask = 0
    total = term(0, 0)
    for idx in range(1, 1 << n_x):
        u = (idx & -idx).bit_length() - 1
        if (mask >> u) & 1:
            mask ^= 1 << u
            s_size -= 1
            for y in G.adj_x[u]:
                counts[y] -= 1
                if counts[y] == 0:
                    covered -= 1
        else:
            mask ^= 1 << u
            s_size += 1
            for y in G.adj_x[u]:
                if counts[y] == 0:
                    covered += 1
                counts[y] += 1
        total += term(s_size, covered)
    return total


def exact_count_bipartite(G: BipartiteGraph, size_cap: int = 30) -> ExactCount:
    """i(G) = sum over S subseteq X of 2^(nY - |N(S)|), exactly."""
    if G.n_x > size_cap:
        raise CapacityError(f"bipartite sweep capped at nX={size_cap}, got {G.n_x}")
    start = time.perf_counter()
    pow2 = [1 << k for k in range(G.n_y + 1)]
    value = _gray_sweep(G, lambda s, cov: pow2[G.n_y - cov])
    return ExactCount(value, G.fingerprint(), time.perf_counter() - start)


def exact_hardcore(G: BipartiteGraph, lam: Fraction, size_cap: int = 30) -> ExactCount:
    """Z_G(lam) = sum over S subseteq X of lam^|S| (1+lam)^(nY-|N(S)|).

    Scaled to a common denominator q^(nX+nY) so the sweep accumulates one big
    integer; a single Fraction is formed at the end.
    """
    lam = Fraction(lam)
    if lam <= 0:
        raise InvalidInputError("fugacity must be positive")
    if G.n_x > size_cap:
        raise CapacityError(f"bipartite sweep capped at nX={size_cap}, got {G.n_x}")
    start = time.perf_counter()
    p, q = lam.numerator, lam.denominator
    top = G.n_x + G.n_y
    pow_p = [p**k for k in range(G.n_x + 1)]
    pow_pq = [(p + q) ** k for k in range(G.n_y + 1)]
    pow_q = [q**k for k in range(top + 1)]

    def term(s: int, cov: int) -> int:
        m = G.n_y - cov
        return pow_p[s] * pow_pq[m] * pow_q[top - s - m]

    scaled = _gray_sweep(G, term)
    return ExactCount(Fraction(scaled, pow_q[top]), G.fingerprint(), time.perf_counter() - start)


# -- general branching counter ------------------------------------------------

def _count_mask(rows: list[int], mask: int, memo: dict[int, int]) -> int:
    if mask == 0:
        return 1
    cached = memo.get(mask)
    if cached is not None:
        return cached
    # split off the lowest connected component and recurse on the rest
    seed = mask & -mask
    comp = seed
    frontier = seed
    while frontier:
        grow = 0
        for v in iter_bits(frontier):
            grow |= rows[v]
        grow &= mask & ~comp
        comp |= grow
        frontier = grow
    rest = mask & ~comp
    if rest:
        result = _count_mask(rows, comp, memo) * _count_mask(rows, rest, memo)
    else:
        best_v, best_deg = -1, -1
        for v in iter_bits(mask):
            deg = (rows[v] & mask).bit_count()
            if deg > best_deg:
                best_v, best_deg = v, deg
        if best_deg == 0:
            result = 1 << mask.bit_count()
        else:
            without = _count_mask(rows, mask & ~(1 << best_v), memo)
            with_v = _count_mask(rows, mask & ~(rows[best_v] | (1 << best_v)), memo)
            result = without + with_v
    memo[mask] = result
    return result


def exact_count_general(G: Graph, size_cap: int = 40) -> ExactCount:
    """Branching recursion i(G) = i(G-v) + i(G-N[v]) on a max-degree vertex."""
    if G.n > size_cap:
        raise CapacityError(f"general counter capped at {size_cap} vertices, got {G.n}")
    start = time.perf_counter()
    value = _count_mask(G.rows, (1 << G.n) - 1, {})
    return ExactCount(value, _general_fingerprint(G), time.perf_counter() - start)


def count_independent_in(G: Graph, mask: int) -> int:
    """i(G[mask]) for an induced subgraph given as a vertex mask."""
    return _count_mask(G.rows, mask, {})


# -- full distributions and table sampling ------------------------------------

def iter_independent_sets(G: BipartiteGraph) -> Iterator[tuple[int, int]]:
    """All independent sets as (X-mask, Y-mask) pairs, cost O(1) per set."""
    full_y = G.full_mask("Y")
    for s in range(1 << G.n_x):
        free = full_y & ~neighborhood_bits(G, "X", s)
        t = free
        while True:
            yield (s, t)
            if t == 0:
                break
            t = (t - 1) & free


def exact_distribution(
    G: BipartiteGraph, lam: Fraction = Fraction(1), table_cap: int = 1 << 21
) -> dict[tuple[int, int], Fraction]:
    """The measure I -> lam^|I| / Z as an exact table keyed by (X-mask, Y-mask)."""
    lam = Fraction(lam)
    if lam <= 0:
        raise InvalidInputError("fugacity must be positive")
    total = exact_count_bipartite(G).value
    if total > table_cap:
        raise CapacityError(f"distribution table capped at {table_cap} sets, need {total}")
    z = exact_hardcore(G, lam).value
    table: dict[tuple[int, int], Fraction] = {}
    for s, t in iter_independent_sets(G):
        table[(s, t)] = lam ** (s.bit_count() + t.bit_count()) / z
    return table


class ExactSampler:
    """Draws from the hard-core measure by inversion on the exact table."""

    def __init__(self, G: BipartiteGraph, lam: Fraction = Fraction(1), seed: int = 0,
                 table_cap: int = 1 << 21):
        table = exact_distribution(G, lam, table_cap)
        self.keys = list(table)
        self.cumulative = []
        acc = 0.0
        for k in self.keys:
            acc += float(table[k])
            self.cumulative.append(acc)
        self.rng = random.Random(seed)

    def sample(self) -> tuple[int, int]:
        u = self.rng.random() * self.cumulative[-1]
        lo, hi = 0, len(self.cumulative) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if self.cumulative[mid] < u:
                lo = mid + 1
            else:
                hi = mid
        return self.keys[lo]
