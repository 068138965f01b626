"""Polymer models over 2-linked vertex sets.

A polymer lives on one side of the bipartition and is blamed for the
neighborhood it occupies: the unweighted model charges 2^{-|N(gamma)|}, the
hardcore model lambda^{|gamma|} (1+lambda)^{-|N(gamma)|}.  Two polymers are
compatible when their union is not 2-linked, which for same-side sets means
disjoint vertices and disjoint neighborhoods.  The partition function sums
weight products over compatible collections; clusters and the Ursell
function drive its log expansion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterator, Sequence

from .errors import CapacityError, InvalidInputError
from .graphs import (
    BipartiteGraph,
    ExpansionParams,
    SideSet,
    X_SIDE,
    connected_sets_containing,
    connected_sets_min_rooted,
    is_expanding,
    is_small,
    is_two_linked,
    iter_bits,
    neighborhood_bits,
)


@dataclass(frozen=True)
class Polymer:
    side: str
    bits: int
    nbhd: int

    @property
    def size(self) -> int:
        return self.bits.bit_count()

    @property
    def nbhd_size(self) -> int:
        return self.nbhd.bit_count()

    def as_side_set(self) -> SideSet:
        return SideSet(self.side, self.bits)


@dataclass(frozen=True)
class PolymerFamily:
    """Which 2-linked sets count as polymers: the expanding ones (unweighted
    route) or the small ones (hardcore route)."""

    membership: str = "expanding"
    side: str = X_SIDE
    params: ExpansionParams = ExpansionParams()

    def admits(self, G: BipartiteGraph, bits: int) -> bool:
        s = SideSet(self.side, bits)
        if not is_two_linked(G, s):
            return False
        if self.membership == "expanding":
            return is_expanding(G, s, self.params)
        if self.membership == "small":
            return is_small(G, s)
        raise InvalidInputError(f"unknown membership {self.membership!r}")


class WeightModel:
    """Polymer weight assignment with exact-rational and log evaluation.

    The tilde variant multiplies the unweighted weight by
    2^{|gamma| log2^2(d) / d}; its exponent is irrational in general, so only
    the log form is offered there.
    """

    def __init__(self, variant: str, lam: Fraction | None = None, d: int | None = None):
        if variant not in ("unweighted", "hardcore", "tilde"):
            raise InvalidInputError(f"unknown weight variant {variant!r}")
        if variant == "hardcore":
            if lam is None or lam <= 0:
                raise InvalidInputError("hardcore weights need lambda > 0")
            lam = Fraction(lam)
        if variant == "tilde" and (d is None or d < 2):
            raise InvalidInputError("tilde weights need the graph degree d >= 2")
        self.variant = variant
        self.lam = lam
        self.d = d

    @classmethod
    def unweighted(cls) -> "WeightModel":
        return cls("unweighted")

    @classmethod
    def hardcore(cls, lam: Fraction) -> "WeightModel":
        return cls("hardcore", lam=Fraction(lam))

    @classmethod
    def tilde(cls, d: int) -> "WeightModel":
        return cls("tilde", d=d)

    @property
    def exact_available(self) -> bool:
        return self.variant != "tilde"

    def weight(self, p: Polymer) -> Fraction:
        if self.variant == "unweighted":
            return Fraction(1, 1 << p.nbhd_size)
        if self.variant == "hardcore":
            return self.lam**p.size / (1 + self.lam) ** p.nbhd_size
        raise InvalidInputError("tilde weights have no exact rational form")

    def log_weight(self, p: Polymer) -> float:
        if self.variant == "unweighted":
            return -p.nbhd_size * math.log(2)
        if self.variant == "hardcore":
            return p.size * math.log(self.lam) - p.nbhd_size * math.log(1 + self.lam)
        boost = p.size * (math.log2(self.d) ** 2 / self.d)
        return (boost - p.nbhd_size) * math.log(2)

    def describe(self) -> str:
        if self.variant == "hardcore":
            return f"hardcore(lambda={self.lam})"
        if self.variant == "tilde":
            return f"tilde(d={self.d})"
        return "unweighted"


def are_compatible(g1: Polymer, g2: Polymer) -> bool:
    """True iff the union is not 2-linked: no shared vertices and no shared
    neighbors.  Every polymer is incompatible with itself."""
    if g1.side != g2.side:
        raise InvalidInputError("compatibility is defined for same-side polymers")
    return not (g1.bits & g2.bits or g1.nbhd & g2.nbhd)


def enumerate_polymers(
    G: BipartiteGraph,
    fam: PolymerFamily,
    size_cap: int,
    region: int | None = None,
    max_polymers: int = 1 << 20,
) -> list[Polymer]:
    """The polymer universe up to ``size_cap`` vertices, sorted by bit mask.

    ``region`` restricts the ground set (used for the residual graphs of the
    container assembly); membership predicates are always evaluated in the
    parent graph, so restricted universes are sub-universes of the full one.
    """
    if size_cap <= 0:
        return []
    side = fam.side
    n = G.side_size(side)
    allowed = region if region is not None else (1 << n) - 1
    out: list[Polymer] = []
    for bits in connected_sets_min_rooted(G.square_rows(side), min(size_cap, n), allowed):
        if fam.admits(G, bits):
            if len(out) >= max_polymers:
                raise CapacityError(
                    f"polymer universe exceeds {max_polymers} members (partial count)"
                )
            out.append(Polymer(side, bits, neighborhood_bits(G, side, bits)))
    out.sort(key=lambda p: p.bits)
    return out


def incompatibility_masks(universe: Sequence[Polymer]) -> list[int]:
    """mask[i] has bit j set when polymer j is incompatible with polymer i
    (the diagonal is always set)."""
    k = len(universe)
    masks = [0] * k
    for i in range(k):
        for j in range(i, k):
            if not are_compatible(universe[i], universe[j]):
                masks[i] |= 1 << j
                masks[j] |= 1 << i
    return masks


def ursell(adj: Sequence[int], cap: int = 10) -> int:
    """Raw Ursell value of an incompatibility graph H on k vertices:
    the alternating sum of (-1)^{|E'|} over spanning connected edge subsets.

    Computed by the deletion recursion: with A(S) = 1 iff H[S] is edgeless,
    C(S) = A(S) - sum over proper S1 containing min(S) of C(S1) * A(S - S1).
    """
    k = len(adj)
    if k == 0:
        raise InvalidInputError("the Ursell function needs at least one vertex")
    if k > cap:
        raise CapacityError(f"Ursell cap {cap} exceeded ({k} vertices)")
    full = (1 << k) - 1
    edgeless = [False] * (full + 1)
    edgeless[0] = True
    for mask in range(1, full + 1):
        v = (mask & -mask).bit_length() - 1
        rest = mask ^ (1 << v)
        edgeless[mask] = edgeless[rest] and not (adj[v] & mask)
    conn = [0] * (full + 1)
    for mask in range(1, full + 1):
        rbit = mask & -mask
        rest = mask ^ rbit
        total = 1 if edgeless[mask] else 0
        # proper subsets containing the root: root | sub for sub strictly
        # inside rest
        sub = rest
        while True:
            sub = (sub - 1) & rest
            if sub == rest:
                break
            total -= conn[rbit | sub] * (1 if edgeless[rest ^ sub] else 0)
            if sub == 0:
                break
        conn[mask] = total
    return conn[full]


@dataclass(frozen=True)
class ClusterTerm:
    """One cluster's contribution to ln Xi: a multiset of universe indices,
    its total vertex count, and the signed value phi(H) * prod(w) / prod(m!)."""

    indices: tuple[int, ...]
    size: int
    value: Fraction | float


def _multiset_ursell(
    support: Sequence[int], mult: Sequence[int], incompat: Sequence[int]
) -> int:
    # Expand the multiset into one vertex per copy; copies of one polymer
    # are pairwise incompatible, so H is determined by the support edges.
    owners = []
    for idx, m in zip(support, mult):
        owners.extend([idx] * m)
    k = len(owners)
    adj = [0] * k
    for i in range(k):
        for j in range(i + 1, k):
            if owners[i] == owners[j] or incompat[owners[i]] >> owners[j] & 1:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    return ursell(adj, cap=max(10, k))


def enumerate_clusters(
    universe: Sequence[Polymer],
    ell: int,
    m: WeightModel,
    max_clusters: int = 1 << 22,
) -> Iterator[ClusterTerm]:
    """Stream every cluster of total size <= ell with its signed term.

    Clusters are unordered multisets of polymers whose incompatibility graph
    is connected (copies of one polymer are always mutually incompatible, so
    connectivity is a support property).  Growth is rooted at the lowest
    universe index.  Terms use the symmetrized convention: raw Ursell value
    times the weight product divided by the product of multiplicity
    factorials; their sum over all sizes is ln Xi.
    """
    if ell < 1 or not universe:
        return
    k = len(universe)
    incompat = incompatibility_masks(universe)
    support_adj = [incompat[i] & ~(1 << i) for i in range(k)]
    sizes = [p.size for p in universe]
    exact = m.exact_available
    weights = [m.weight(p) if exact else math.exp(m.log_weight(p)) for p in universe]
    emitted = 0
    for root in range(k):
        if sizes[root] > ell:
            continue
        allowed = ((1 << k) - 1) & ~((1 << root) - 1)
        for support_bits in connected_sets_containing(support_adj, root, ell, allowed):
            support = list(iter_bits(support_bits))
            if sum(sizes[i] for i in support) > ell:
                continue
            mult = [1] * len(support)

            def rec(pos: int, total: int) -> Iterator[ClusterTerm]:
                nonlocal emitted
                if pos == len(support):
                    phi = _multiset_ursell(support, mult, incompat)
                    if phi:
                        val = Fraction(phi) if exact else float(phi)
                        idx_tuple: list[int] = []
                        for idx, mm in zip(support, mult):
                            val *= weights[idx] ** mm
                            val /= factorial(mm)
                            idx_tuple.extend([idx] * mm)
                        emitted += 1
                        if emitted > max_clusters:
                            raise CapacityError(
                                f"more than {max_clusters} clusters at ell={ell}"
                            )
                        yield ClusterTerm(tuple(idx_tuple), total, val)
                    return
                i = support[pos]
                mm = 1
                while total + sizes[i] * mm <= ell:
                    mult[pos] = mm
                    yield from rec(pos + 1, total + sizes[i] * mm)
                    mm += 1
                mult[pos] = 1

            yield from rec(0, 0)


def iter_compatible_configs(
    universe: Sequence[Polymer], max_configs: int = 1 << 22
) -> Iterator[tuple[int, ...]]:
    """Every collection of pairwise-compatible polymers as a tuple of
    ascending universe indices; the empty collection comes first."""
    k = len(universe)
    incompat = incompatibility_masks(universe)
    count = 0

    def rec(start: int, blocked: int, chosen: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
        nonlocal count
        count += 1
        if count > max_configs:
            raise CapacityError(f"more than {max_configs} polymer configurations")
        yield chosen
        for i in range(start, k):
            if not blocked >> i & 1:
                yield from rec(i + 1, blocked | incompat[i], chosen + (i,))

    yield from rec(0, 0, ())


def xi_size_polynomial(
    universe: Sequence[Polymer], m: WeightModel, max_configs: int = 1 << 22
) -> list[Fraction]:
    """Coefficients c_k = total weight of compatible configurations with
    combined polymer size k; c_0 = 1 and sum(c) = Xi."""
    if not m.exact_available:
        raise InvalidInputError("size polynomial needs an exact weight model")
    sizes = [p.size for p in universe]
    weights = [m.weight(p) for p in universe]
    top = sum(sizes)
    coeffs = [Fraction(0)] * (top + 1)
    for config in iter_compatible_configs(universe, max_configs):
        w = Fraction(1)
        s = 0
        for i in config:
            w *= weights[i]
            s += sizes[i]
        coeffs[s] += w
    return coeffs


def log_series_coefficients(coeffs: Sequence[Fraction], upto: int) -> list[Fraction]:
    """Taylor coefficients a_l of ln(sum c_k z^k) around z=0, l = 0..upto.

    The cluster expansion's grade-l terms must sum to exactly a_l; this
    recurrence is the independent route used to pin that convention.
    """
    if not coeffs or coeffs[0] != 1:
        raise InvalidInputError("series log needs c_0 = 1")
    c = [Fraction(coeffs[k]) if k < len(coeffs) else Fraction(0) for k in range(upto + 1)]
    a = [Fraction(0)] * (upto + 1)
    for ell in range(1, upto + 1):
        acc = c[ell]
        for j in range(1, ell):
            acc -= Fraction(j, ell) * a[j] * c[ell - j]
        a[ell] = acc
    return a
