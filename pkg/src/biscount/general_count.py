"""Counting without an expansion promise: container families plus local
cluster expansions.

Every independent set splits its X-side into 2-linked components; the
non-expanding components are remembered through their closures (a family of
pairwise far-apart container sets), the expanding ones through a polymer
partition function on the part of X the family does not dominate.  Summing
over families with exact multiplicities D(A) recovers i(G) exactly; the
approximate route replaces D by a Monte-Carlo estimate and the local
partition functions by truncated cluster expansions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterator

import numpy as np

from .cluster_expansion import (
    KP_FAILED,
    KP_VERIFIED,
    exact_xi,
    kp_unweighted,
    truncated_log_xi,
    verify_kp,
)
from .containers import distinct_nonexpanding_closed, small_generator
from .errors import CapacityError, InvalidInputError
from .expander import (
    LN2,
    METHOD_GENERAL,
    ApproxCount,
    SideTerm,
    _log_int,
    _logaddexp,
)
from .graphs import (
    BipartiteGraph,
    ExpansionParams,
    SideSet,
    closure_bits,
    is_expanding,
    is_two_linked,
    iter_bits,
    neighborhood_bits,
    opposite,
)
from .polymers import PolymerFamily, WeightModel, enumerate_polymers


@dataclass(frozen=True)
class NonExpandingFamily:
    """A set of closed, 2-linked, non-expanding container sets with pairwise
    disjoint neighborhoods (hence also pairwise disjoint and far apart)."""

    sets: tuple[SideSet, ...]

    @property
    def union_bits(self) -> int:
        out = 0
        for s in self.sets:
            out |= s.bits
        return out

    @property
    def anchors(self) -> tuple[int, ...]:
        return tuple((s.bits & -s.bits).bit_length() - 1 for s in self.sets)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(s.size for s in self.sets)

    def validate(self, G: BipartiteGraph, params: ExpansionParams) -> None:
        seen_nbhd = 0
        for s in self.sets:
            if not s.bits:
                raise InvalidInputError("family members must be nonempty")
            if closure_bits(G, s.side, s.bits) != s.bits:
                raise InvalidInputError("family member is not closed")
            if not is_two_linked(G, s):
                raise InvalidInputError("family member is not 2-linked")
            if is_expanding(G, s, params):
                raise InvalidInputError("family member is expanding")
            nb = neighborhood_bits(G, s.side, s.bits)
            if nb & seen_nbhd:
                raise InvalidInputError("family neighborhoods overlap")
            seen_nbhd |= nb
        # d-regularity gives |N(A_i)| >= d, so disjointness caps the length
        if self.sets and len(self.sets) * G.d > G.side_size(self.sets[0].side):
            raise InvalidInputError("family too large for disjoint neighborhoods")


def enumerate_families(
    G: BipartiteGraph,
    params: ExpansionParams | None = None,
    side: str = "X",
    max_families: int = 1 << 20,
) -> Iterator[NonExpandingFamily]:
    """All families over the distinct non-expanding closed sets of a side,
    the empty family first, then in ascending pool order."""
    p = params or ExpansionParams()
    pool = distinct_nonexpanding_closed(G, p, side)
    nbhds = [neighborhood_bits(G, side, s.bits) for s in pool]
    produced = 0

    def emit(fam: tuple[SideSet, ...]) -> NonExpandingFamily:
        nonlocal produced
        produced += 1
        if produced > max_families:
            raise CapacityError(f"family stream exceeds {max_families} members")
        return NonExpandingFamily(fam)

    # depth-first in pool order; each branch extends by a later set whose
    # neighborhood avoids everything already used
    def rec(
        fam: tuple[SideSet, ...], start: int, used: int
    ) -> Iterator[NonExpandingFamily]:
        for i in range(start, len(pool)):
            if nbhds[i] & used:
                continue
            new_fam = fam + (pool[i],)
            yield emit(new_fam)
            yield from rec(new_fam, i + 1, used | nbhds[i])

    yield emit(())
    yield from rec((), 0, 0)


def family_region(G: BipartiteGraph, side: str, union_bits: int) -> int:
    """The polymer ground set left to a family: the side minus the second
    neighborhood of the family union."""
    full = G.full_mask(side)
    if not union_bits:
        return full
    nb = neighborhood_bits(G, side, union_bits)
    return full & ~neighborhood_bits(G, opposite(side), nb)


# -- the container-set multiplicity D ------------------------------------------


def exhaustive_D(G: BipartiteGraph, A: SideSet) -> int:
    """|{B subseteq A : B 2-linked, N(B) = N(A)}| by direct scan."""
    if A.size > 24:
        raise CapacityError("exhaustive D capped at |A| <= 24")
    target = neighborhood_bits(G, A.side, A.bits)
    verts = A.vertices()
    count = 0
    for r in range(1, len(verts) + 1):
        for combo in combinations(verts, r):
            bits = 0
            for v in combo:
                bits |= 1 << v
            if neighborhood_bits(G, A.side, bits) != target:
                continue
            if is_two_linked(G, SideSet(A.side, bits)):
                count += 1
    return count


def _check_container_set(G: BipartiteGraph, A: SideSet, params: ExpansionParams) -> None:
    if not A.bits:
        raise InvalidInputError("container set must be nonempty")
    if closure_bits(G, A.side, A.bits) != A.bits:
        raise InvalidInputError("container set must be closed")
    if not is_two_linked(G, A):
        raise InvalidInputError("container set must be 2-linked")
    if is_expanding(G, A, params):
        raise InvalidInputError("container set must be non-expanding")


@dataclass(frozen=True)
class DEstimate:
    """Monte-Carlo estimate of D(A) with its sampling configuration.

    Sampling B uniformly from the subsets of A hits the target event with
    probability at least 2^{-|A''|} (every superset of the generator's A''
    qualifies), which sizes the sample count."""

    value: float
    epsilon: float
    delta: float
    samples_used: int
    hits: int
    p_lower: Fraction


def estimate_D(
    G: BipartiteGraph,
    A: SideSet,
    epsilon: float,
    delta: float,
    seed: int,
    params: ExpansionParams | None = None,
) -> DEstimate:
    """Relative-error Monte-Carlo estimate of the multiplicity D(A)."""
    p = params or ExpansionParams()
    _check_container_set(G, A, p)
    if epsilon <= 0:
        raise InvalidInputError("epsilon must be positive")
    if not 0 < delta < 1:
        raise InvalidInputError("delta must lie in (0, 1)")
    eps_eff = min(epsilon, 1.0)
    _, a2 = small_generator(G, A, p)
    m = math.ceil(3.0 * eps_eff**-2 * math.log(2.0 / delta) * 2**a2.size)

    target = neighborhood_bits(G, A.side, A.bits)
    verts = A.vertices()
    na = len(verts)
    rng = np.random.default_rng(seed)

    def is_hit(local: int) -> bool:
        bits = 0
        for j in range(na):
            if (local >> j) & 1:
                bits |= 1 << verts[j]
        if neighborhood_bits(G, A.side, bits) != target:
            return False
        return bits != 0 and is_two_linked(G, SideSet(A.side, bits))

    if na <= 18:
        table = np.zeros(1 << na, dtype=np.uint8)
        for local in range(1 << na):
            table[local] = is_hit(local)
        draws = rng.integers(0, 1 << na, size=m, dtype=np.uint64)
        hits = int(table[draws].sum())
    else:
        hits = 0
        for _ in range(m):
            hits += is_hit(int(rng.integers(0, 1 << na)))

    value = hits / m * 2.0**na
    return DEstimate(value, eps_eff, delta, m, hits, Fraction(1, 2**a2.size))


# -- exact assembly --------------------------------------------------------------


def assemble_exact(
    G: BipartiteGraph,
    params: ExpansionParams | None = None,
    side: str = "X",
    xi_cap: int = 24,
) -> int:
    """i(G) as the exact family sum: for each family, the product of exact
    multiplicities, a free factor for the untouched part of the other side,
    and the exact polymer partition function on the leftover region."""
    p = params or ExpansionParams()
    other = opposite(side)
    n_other = G.side_size(other)
    m = WeightModel.unweighted()
    fam_exp = PolymerFamily("expanding", side, p)
    total = Fraction(0)
    for family in enumerate_families(G, p, side):
        union = family.union_bits
        covered = neighborhood_bits(G, side, union).bit_count()
        region = family_region(G, side, union)
        xi = exact_xi(G, fam_exp, m, cap=xi_cap, region=region)
        prod = 1
        for s in family.sets:
            prod *= exhaustive_D(G, s)
        total += prod * Fraction(2) ** (n_other - covered) * Fraction(xi)
    if total.denominator != 1:
        raise InvalidInputError("family sum did not reduce to an integer")
    return int(total)


# -- approximate assembly ---------------------------------------------------------


def count_general(
    G: BipartiteGraph,
    epsilon: float,
    delta: float,
    seed: int,
    params: ExpansionParams | None = None,
    side: str = "X",
    verify_restriction: bool = False,
    max_families: int = 1 << 20,
) -> ApproxCount:
    """Approximate i(G) by the family sum with Monte-Carlo multiplicities
    and truncated local cluster expansions.

    Each distinct container set is estimated once at accuracy epsilon/(2n)
    and failure budget delta split over the nonempty families; when
    d > sqrt(n) the local partition functions are dropped (replaced by 1),
    as the defect structure is negligible in that regime."""
    if not 0.0 < epsilon < 1.0:
        raise InvalidInputError("epsilon must lie strictly between 0 and 1")
    if not 0 < delta < 1:
        raise InvalidInputError("delta must lie in (0, 1)")
    p = params or ExpansionParams()
    n, d = G.side_size(side), G.d
    other = opposite(side)
    n_other = G.side_size(other)
    q = math.log2(d) ** 2
    big_l = max(1, math.ceil(d / (2.0 * q) * math.log2(2.0 * n / epsilon)))
    drop_xi = d * d > n
    m = WeightModel.unweighted()
    fam_exp = PolymerFamily("expanding", side, p)

    families = list(enumerate_families(G, p, side, max_families))
    nonempty = sum(1 for f in families if f.sets)
    delta_prime = delta / max(1, nonempty)
    eps_d = min(epsilon, 1.0) / (2.0 * n)

    pool = distinct_nonexpanding_closed(G, p, side)
    seeds = np.random.SeedSequence(seed).generate_state(max(1, len(pool)))
    d_cache: dict[int, DEstimate] = {}
    for s, child in zip(pool, seeds):
        d_cache[s.bits] = estimate_D(G, s, eps_d, delta_prime, int(child), p)

    if drop_xi:
        kp_status = KP_VERIFIED  # nothing to converge; the factor is dropped
    else:
        report = verify_kp(G, fam_exp, m, kp_unweighted(d), min(big_l, n))
        kp_status = KP_VERIFIED if report.all_pass else KP_FAILED

    full_universe = None
    if verify_restriction:
        full_universe = {
            poly.bits for poly in enumerate_polymers(G, fam_exp, n)
        }

    term_logs: list[float] = []
    zero_estimates = 0
    cluster_total = 0
    for family in families:
        union = family.union_bits
        covered = neighborhood_bits(G, side, union).bit_count()
        log_term = (n_other - covered) * LN2
        dead = False
        for s in family.sets:
            est = d_cache[s.bits]
            if est.value <= 0.0:
                dead = True
                break
            log_term += math.log(est.value)
        if dead:
            zero_estimates += 1
            continue
        if not drop_xi:
            region = family_region(G, side, union)
            if verify_restriction:
                local = {
                    poly.bits for poly in enumerate_polymers(G, fam_exp, n, region)
                }
                if not local <= full_universe:
                    raise InvalidInputError("restricted universe escaped the full one")
            est_xi = truncated_log_xi(G, fam_exp, m, big_l, region=region)
            cluster_total += est_xi.cluster_count
            log_term += est_xi.log_value
        term_logs.append(log_term)

    if not term_logs:
        raise InvalidInputError("every family term vanished; nothing to report")
    log_value = term_logs[0]
    for t in term_logs[1:]:
        log_value = _logaddexp(log_value, t)

    flags = []
    if drop_xi:
        flags.append("xi-dropped (d > sqrt n)")
    if kp_status == KP_FAILED:
        flags.append("kp-failed-at-cap")
    if not flags:
        flags.append("certified")
    breakdown = (SideTerm(side, 0.0, big_l, kp_status, cluster_total),)
    notes = {
        "families": len(families),
        "nonempty_families": nonempty,
        "distinct_sets": len(pool),
        "ell": big_l,
        "epsilon_D": eps_d,
        "delta_prime": delta_prime,
        "zero_estimates": zero_estimates,
    }
    return ApproxCount(
        log_value=log_value,
        rel_error_bound=epsilon,
        method=METHOD_GENERAL,
        side_breakdown=breakdown,
        flags=tuple(flags),
        notes=notes,
    )


def count_general_exact(
    G: BipartiteGraph,
    params: ExpansionParams | None = None,
    side: str = "X",
    xi_cap: int = 24,
) -> ApproxCount:
    """The exact family assembly wrapped in the common result type."""
    value = assemble_exact(G, params, side, xi_cap)
    return ApproxCount(
        log_value=_log_int(value),
        rel_error_bound=0.5,
        method=METHOD_GENERAL,
        flags=("exact",),
        exact_value=value,
    )
