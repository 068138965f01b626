"""Truncated cluster-expansion evaluation of ln Xi with certified error.

The truncation keeps clusters of total size at most ell; under the
convergence condition the discarded tail is exponentially small in ell, and
the bound actually asserted depends on the weight model.  The condition
itself is checked numerically per polymer up to a size cap; the asymptotic
guarantee behind it only kicks in for large degree, so desk-scale failures
are reported rather than hidden.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import CapacityError, InvalidInputError
from .graphs import BipartiteGraph
from .polymers import (
    Polymer,
    PolymerFamily,
    WeightModel,
    enumerate_clusters,
    enumerate_polymers,
    iter_compatible_configs,
    xi_size_polynomial,
)

KP_VERIFIED = "verified-to-cap"
KP_FAILED = "failed-at-cap"
KP_ASSUMED = "assumed"


def _exact_log2(x: Fraction) -> int | None:
    # integer log2 when x is an exact power of two, else None
    if x <= 0:
        return None
    num, den = x.numerator, x.denominator
    if num == 1 and den & (den - 1) == 0:
        return -(den.bit_length() - 1)
    if den == 1 and num & (num - 1) == 0:
        return num.bit_length() - 1
    return None


def beta_weight(lam: Fraction, d: int, alpha: Fraction) -> Fraction | float:
    """The exponent weight beta(lambda) = log2^2(1+lambda) /
    (log2(1+lambda) + log2(2 d^5 / alpha)); exact rational whenever both
    logs are integers."""
    if d < 2:
        raise InvalidInputError("beta needs d >= 2")
    lam = Fraction(lam)
    alpha = Fraction(alpha)
    if lam <= 0 or alpha <= 0:
        raise InvalidInputError("beta needs lambda > 0 and alpha > 0")
    l1 = _exact_log2(1 + lam)
    l2 = _exact_log2(2 * Fraction(d) ** 5 / alpha)
    if l1 is not None and l2 is not None:
        return Fraction(l1 * l1, l1 + l2)
    x = math.log2(float(1 + lam))
    y = math.log2(2.0 * d**5 / float(alpha))
    return x * x / (x + y)


@dataclass(frozen=True)
class KPFunctions:
    """Per-polymer functions f, g entering the convergence condition
    sum over gamma' incompatible with gamma of w e^{f+g} <= f(gamma)."""

    f_per_vertex: float
    g_per_nbhd: float
    label: str

    def f(self, p: Polymer) -> float:
        return self.f_per_vertex * p.size

    def g(self, p: Polymer) -> float:
        return self.g_per_nbhd * p.nbhd_size


def kp_unweighted(d: int) -> KPFunctions:
    """f = ln2 |gamma| log2^2(d)/d, g = 2 ln2 |N(gamma)| log2^2(d)/d."""
    q = math.log2(d) ** 2 / d
    return KPFunctions(math.log(2) * q, 2 * math.log(2) * q, "unweighted")


def kp_hardcore(
    d: int, lam: Fraction, alpha: Fraction, c5: float = 1.0
) -> KPFunctions:
    """f = c5 alpha ln2 beta(lambda) |gamma| / 8 and the same rate on
    |N(gamma)| for g."""
    b = float(beta_weight(lam, d, alpha))
    rate = c5 * float(alpha) * math.log(2) * b / 8.0
    return KPFunctions(rate, rate, f"hardcore(lambda={lam})")


@dataclass(frozen=True)
class KPPolymerCheck:
    bits: int
    size: int
    nbhd_size: int
    lhs: float
    rhs: float
    passed: bool


@dataclass(frozen=True)
class KPReport:
    checks: tuple[KPPolymerCheck, ...]
    all_pass: bool
    size_cap: int
    # the sum on the left is restricted to polymers up to the cap, so a pass
    # is numerical evidence, not the asymptotic claim itself
    truncated_universe: bool = True


def verify_kp(
    G: BipartiteGraph,
    fam: PolymerFamily,
    m: WeightModel,
    kp: KPFunctions,
    size_cap: int,
    region: int | None = None,
) -> KPReport:
    """Check the convergence condition per polymer, universe truncated to
    the size cap.  Empty universe passes vacuously."""
    universe = enumerate_polymers(G, fam, size_cap, region)
    from .polymers import incompatibility_masks

    incompat = incompatibility_masks(universe)
    boosted = [
        math.exp(m.log_weight(p) + kp.f(p) + kp.g(p)) for p in universe
    ]
    checks = []
    for i, p in enumerate(universe):
        lhs = 0.0
        mask = incompat[i]
        while mask:
            low = mask & -mask
            mask ^= low
            lhs += boosted[low.bit_length() - 1]
        rhs = kp.f(p)
        checks.append(
            KPPolymerCheck(p.bits, p.size, p.nbhd_size, lhs, rhs, lhs <= rhs)
        )
    return KPReport(tuple(checks), all(c.passed for c in checks), size_cap)


def choose_ell(n: int, d: int, epsilon: float, model: str = "unweighted") -> int:
    """Truncation size meeting the additive log-error target epsilon."""
    if n < 1 or d < 2:
        raise InvalidInputError("choose_ell needs n >= 1 and d >= 2")
    if not 0 < epsilon:
        raise InvalidInputError("epsilon must be positive")
    q = math.log2(d) ** 2
    if model in ("unweighted", "tilde"):
        raw = d / (2.0 * q) * math.log2(n / epsilon)
    elif model == "hardcore":
        raw = d / (1000.0 * q) * math.log2(n / epsilon)
    else:
        raise InvalidInputError(f"unknown model {model!r}")
    return max(1, math.ceil(raw))


def truncation_bound(n: int, d: int, ell: int, model: str) -> float:
    """Certified tail bound for the truncation at ell (valid under the
    convergence condition)."""
    q = math.log2(d) ** 2
    if model in ("unweighted", "tilde"):
        return n * 2.0 ** (-2.0 * ell * q / d)
    if model == "hardcore":
        return n * 2.0 ** (-500.0 * q * ell / d)
    raise InvalidInputError(f"unknown model {model!r}")


@dataclass(frozen=True)
class LogPartitionEstimate:
    log_value: float
    ell_used: int
    certified_bound: float
    kp_status: str
    model: str
    cluster_count: int

    @property
    def certified(self) -> bool:
        return self.kp_status == KP_VERIFIED


def _kahan_add(total: float, comp: float, x: float) -> tuple[float, float]:
    y = x - comp
    t = total + y
    comp = (t - total) - y
    return t, comp


def truncated_log_xi(
    G: BipartiteGraph,
    fam: PolymerFamily,
    m: WeightModel,
    ell: int,
    region: int | None = None,
    kp_status: str = KP_ASSUMED,
) -> LogPartitionEstimate:
    """ln Xi(ell): sum of cluster terms with total size <= ell, accumulated
    in ascending size with compensated summation."""
    if ell < 0:
        raise InvalidInputError("ell must be nonnegative")
    side_n = G.side_size(fam.side)
    n_eff = region.bit_count() if region is not None else side_n
    model = "hardcore" if m.variant == "hardcore" else "unweighted"
    universe = enumerate_polymers(G, fam, min(ell, side_n), region)
    terms = sorted(
        enumerate_clusters(universe, ell, m), key=lambda t: (t.size, t.indices)
    )
    total = 0.0
    comp = 0.0
    for t in terms:
        total, comp = _kahan_add(total, comp, float(t.value))
    bound = truncation_bound(n_eff, G.d, ell, model) if n_eff else 0.0
    return LogPartitionEstimate(total, ell, bound, kp_status, model, len(terms))


def exact_xi(
    G: BipartiteGraph,
    fam: PolymerFamily,
    m: WeightModel,
    cap: int = 24,
    region: int | None = None,
) -> Fraction | float:
    """Xi by direct enumeration of compatible-polymer configurations."""
    n = G.side_size(fam.side)
    universe = enumerate_polymers(G, fam, n, region)
    if len(universe) > cap:
        raise CapacityError(f"{len(universe)} polymers exceed the exact cap {cap}")
    exact = m.exact_available
    weights = [m.weight(p) if exact else math.exp(m.log_weight(p)) for p in universe]
    total: Fraction | float = Fraction(1) if exact else 1.0
    first = True
    for config in iter_compatible_configs(universe):
        if first:
            # the empty configuration contributes the leading 1
            first = False
            continue
        w = weights[config[0]]
        for i in config[1:]:
            w = w * weights[i]
        total = total + w
    return total


def exact_log_xi(
    G: BipartiteGraph,
    fam: PolymerFamily,
    m: WeightModel,
    cap: int = 24,
    region: int | None = None,
) -> float:
    xi = exact_xi(G, fam, m, cap, region)
    if isinstance(xi, Fraction):
        return math.log(xi.numerator) - math.log(xi.denominator)
    return math.log(xi)


@dataclass(frozen=True)
class TailMass:
    """Exact P(total polymer size >= threshold) under the Gibbs measure,
    next to the exponential bound the analysis promises for large d."""

    probability: Fraction
    paper_bound: float
    threshold: int
    model: str


def tail_mass(
    G: BipartiteGraph,
    fam: PolymerFamily,
    m: WeightModel,
    delta: float,
    region: int | None = None,
    cap: int = 24,
) -> TailMass:
    if delta < 0:
        raise InvalidInputError("delta must be nonnegative")
    if not m.exact_available:
        raise InvalidInputError("tail mass needs an exact weight model")
    n = region.bit_count() if region is not None else G.side_size(fam.side)
    universe = enumerate_polymers(G, fam, G.side_size(fam.side), region)
    if len(universe) > cap:
        raise CapacityError(f"{len(universe)} polymers exceed the exact cap {cap}")
    coeffs = xi_size_polynomial(universe, m)
    threshold = math.ceil(delta * n)
    xi = sum(coeffs)
    heavy = sum(coeffs[threshold:]) if threshold < len(coeffs) else Fraction(0)
    q = math.log2(G.d) ** 2
    if m.variant == "hardcore":
        bound = 2.0 ** (-100.0 * q * delta * n / G.d)
    else:
        bound = 2.0 ** (-delta * n * q / (2.0 * G.d))
    return TailMass(heavy / xi, bound, threshold, m.describe())
