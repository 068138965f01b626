"""Approximate counting and sampling on regular bipartite expanders.

The count is assembled from both sides at once: i(G) is approximated by
2^n (Xi^X(ell) + Xi^Y(ell)) with truncated cluster expansions of the two
defect-polymer partition functions, and the weighted analogue replaces the
2^n prefactor by (1+lambda)^n with the small-set polymer family.  The
samplers realize the two-step measure behind that estimate: pick a side
proportional to its partition function, draw a defect configuration, fill
the opposite side independently.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from random import Random

from .cluster_expansion import (
    KP_FAILED,
    KP_VERIFIED,
    beta_weight,
    choose_ell,
    exact_xi,
    kp_hardcore,
    kp_unweighted,
    truncated_log_xi,
    verify_kp,
)
from .errors import CapacityError, InvalidInputError
from .graphs import (
    X_SIDE,
    Y_SIDE,
    BipartiteGraph,
    ExpansionParams,
    iter_bits,
    neighborhood_bits,
    opposite,
    two_linked_component_bits,
)
from .oracle import exact_count_bipartite, exact_hardcore
from .polymers import (
    PolymerFamily,
    WeightModel,
    enumerate_polymers,
    iter_compatible_configs,
)

LN2 = math.log(2)

METHOD_BRUTE = "brute"
METHOD_EXPANDER = "expander-CE"
METHOD_GENERAL = "general"
METHOD_ORACLE = "oracle"


def _log_int(v: int) -> float:
    """Natural log of a positive integer, safe beyond float range."""
    if v <= 0:
        raise InvalidInputError("log of a nonpositive integer")
    shift = v.bit_length() - 53
    if shift <= 0:
        return math.log(v)
    return math.log(v >> shift) + shift * LN2


def _log_fraction(fr: Fraction) -> float:
    return _log_int(fr.numerator) - _log_int(fr.denominator)


def _logaddexp(a: float, b: float) -> float:
    if a < b:
        a, b = b, a
    if b == -math.inf:
        return a
    return a + math.log1p(math.exp(b - a))


def epsilon_zero(n: int, d: int) -> float:
    """The small-n cutoff 2^{-n log2^2(d) / (60 d)} below which the
    two-sided estimate carries no useful guarantee."""
    if n < 1 or d < 2:
        raise InvalidInputError("epsilon_zero needs n >= 1 and d >= 2")
    return 2.0 ** (-n * math.log2(d) ** 2 / (60.0 * d))


def sampler_tv_bound(n: int, d: int, epsilon: float) -> float:
    """Asymptotic total-variation budget of the two-step sampler: the
    epsilon spent on the partition functions plus twice the small-n cutoff."""
    return epsilon + 2.0 * epsilon_zero(n, d)


# -- result type --------------------------------------------------------------


@dataclass(frozen=True)
class SideTerm:
    """One side's contribution to a two-sided estimate."""

    side: str
    log_xi: float
    ell: int
    kp_status: str
    cluster_count: int = 0
    certified_bound: float = 0.0


@dataclass(frozen=True)
class ApproxCount:
    """An approximate (or exact) count in natural-log space.

    ``exact_value`` is set only when the method produced an exact integer
    or rational; ``rel_error_bound`` is the relative accuracy the run was
    configured for, certified only when ``flags`` says so.
    """

    log_value: float
    rel_error_bound: float
    method: str
    side_breakdown: tuple[SideTerm, ...] = ()
    flags: tuple[str, ...] = ()
    notes: dict = field(default_factory=dict)
    exact_value: int | Fraction | None = None

    @property
    def kp_status(self) -> str | None:
        statuses = {t.kp_status for t in self.side_breakdown}
        if not statuses:
            return None
        if KP_FAILED in statuses:
            return KP_FAILED
        if statuses == {KP_VERIFIED}:
            return KP_VERIFIED
        return statuses.pop() if len(statuses) == 1 else "assumed"

    @property
    def certified(self) -> bool:
        return "certified" in self.flags


def _check_epsilon(epsilon: float) -> None:
    if not 0.0 < epsilon < 1.0:
        raise InvalidInputError("epsilon must lie strictly between 0 and 1")


# -- polymer census ------------------------------------------------------------


@dataclass(frozen=True)
class PolymerCensus:
    """How many independent sets have all their one-side 2-linked components
    inside the polymer family, on each side and on both at once."""

    in_x: int
    in_y: int
    both: int
    total: int


def _admitted_mask_table(G: BipartiteGraph, fam: PolymerFamily) -> list[bool]:
    # table over all side masks; component admissions are cached since
    # distinct masks share their 2-linked components
    n = G.side_size(fam.side)
    if n > 20:
        raise CapacityError(f"census table needs 2^{n} entries, side cap is 20")
    admit: dict[int, bool] = {}
    out = [False] * (1 << n)
    for s in range(1 << n):
        good = True
        for comp in two_linked_component_bits(G, fam.side, s):
            verdict = admit.get(comp)
            if verdict is None:
                verdict = fam.admits(G, comp)
                admit[comp] = verdict
            if not verdict:
                good = False
                break
        out[s] = good
    return out


def polymer_census(
    G: BipartiteGraph,
    params: ExpansionParams | None = None,
    membership: str = "expanding",
) -> PolymerCensus:
    """Exact counts behind the identity |I_X| = 2^n Xi^X and the
    inclusion-exclusion check |I_X| + |I_Y| - |I_X cap I_Y| <= i(G)."""
    p = params or ExpansionParams()
    ok_x = _admitted_mask_table(G, PolymerFamily(membership, X_SIDE, p))
    ok_y = _admitted_mask_table(G, PolymerFamily(membership, Y_SIDE, p))
    n_x, n_y = G.n_x, G.n_y
    full_x, full_y = G.full_mask(X_SIDE), G.full_mask(Y_SIDE)

    # F[M] = number of admitted Y-masks contained in M
    F = [1 if v else 0 for v in ok_y]
    for i in range(n_y):
        bit = 1 << i
        for m in range(1 << n_y):
            if m & bit:
                F[m] += F[m ^ bit]

    in_x = in_y = both = total = 0
    for s in range(1 << n_x):
        free = full_y & ~neighborhood_bits(G, X_SIDE, s)
        count = 1 << free.bit_count()
        total += count
        if ok_x[s]:
            in_x += count
            both += F[free]
    for t in range(1 << n_y):
        if ok_y[t]:
            free = full_x & ~neighborhood_bits(G, Y_SIDE, t)
            in_y += 1 << free.bit_count()
    return PolymerCensus(in_x, in_y, both, total)


# -- counting: unweighted -------------------------------------------------------


def _side_estimate(
    G: BipartiteGraph,
    fam: PolymerFamily,
    m: WeightModel,
    kp,
    ell: int,
) -> SideTerm:
    cap = min(ell, G.side_size(fam.side))
    report = verify_kp(G, fam, m, kp, cap)
    status = KP_VERIFIED if report.all_pass else KP_FAILED
    est = truncated_log_xi(G, fam, m, ell, kp_status=status)
    return SideTerm(
        fam.side, est.log_value, ell, status, est.cluster_count, est.certified_bound
    )


def count_expander(
    G: BipartiteGraph,
    epsilon: float,
    params: ExpansionParams | None = None,
    force_method: str | None = None,
    workers: int = 2,
) -> ApproxCount:
    """i(G) ~ 2^n (Xi^X(ell) + Xi^Y(ell)) over the expanding polymer family.

    Falls back to the exact oracle when epsilon is below twice the small-n
    cutoff, where the two-sided estimate promises nothing; the certified
    flag additionally requires the convergence condition to verify at the
    truncation cap on both sides.
    """
    _check_epsilon(epsilon)
    p = params or ExpansionParams()
    n, d = G.n_x, G.d
    eps0 = epsilon_zero(n, d)
    method = force_method or (METHOD_BRUTE if epsilon <= 2.0 * eps0 else METHOD_EXPANDER)
    notes = {"epsilon_zero": eps0}

    if method == METHOD_BRUTE:
        value = exact_count_bipartite(G).value
        return ApproxCount(
            log_value=_log_int(value),
            rel_error_bound=epsilon,
            method=METHOD_BRUTE,
            flags=("exact",),
            notes=notes,
            exact_value=value,
        )
    if method != METHOD_EXPANDER:
        raise InvalidInputError(f"unknown method {method!r}")

    ell = choose_ell(n, d, epsilon / 4.0)
    m = WeightModel.unweighted()
    kp = kp_unweighted(d)

    def job(side: str) -> SideTerm:
        return _side_estimate(G, PolymerFamily("expanding", side, p), m, kp, ell)

    with ThreadPoolExecutor(max_workers=max(1, min(workers, 2))) as pool:
        term_x, term_y = pool.map(job, (X_SIDE, Y_SIDE))

    log_value = n * LN2 + _logaddexp(term_x.log_xi, term_y.log_xi)
    flags: list[str] = []
    if eps0 >= 0.25:
        flags.append("uncertified (small-n regime)")
    if KP_FAILED in (term_x.kp_status, term_y.kp_status):
        flags.append("kp-failed-at-cap")
    if not flags:
        flags.append("certified")
    return ApproxCount(
        log_value=log_value,
        rel_error_bound=epsilon,
        method=METHOD_EXPANDER,
        side_breakdown=(term_x, term_y),
        flags=tuple(flags),
        notes=notes,
    )


# -- counting: hard-core ---------------------------------------------------------


@dataclass(frozen=True)
class HardCoreParams:
    """Fugacity and expansion constants for the weighted route.

    ``alpha`` is the expansion ratio the caller asserts for G (verifiable
    with check_alpha_expander); c4 and c5 scale the hypothesis the analysis
    places on beta(lambda); big_c2 scales the fugacity threshold."""

    lam: Fraction
    alpha: Fraction = Fraction(1, 2)
    c4: float = 1.0
    c5: float = 1.0
    big_c2: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "lam", Fraction(self.lam))
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        if self.lam <= 0:
            raise InvalidInputError("fugacity must be positive")
        if not 0 < self.alpha <= 1:
            raise InvalidInputError("alpha must lie in (0, 1]")

    def beta(self, d: int) -> Fraction | float:
        return beta_weight(self.lam, d, self.alpha)

    def condition_flags(self, d: int) -> dict[str, bool]:
        """Which hypotheses of the weighted-guarantee regime hold at this
        (d, lambda)."""
        beta = float(self.beta(d))
        q = math.log2(d) ** 2
        lam_threshold = self.big_c2 * math.log2(d) / d**0.25
        return {
            "lambda-above-threshold": float(self.lam) > lam_threshold,
            "beta-hypothesis": beta
            >= self.c4 * max(math.log2(d**5 / float(self.alpha)) / math.sqrt(d),
                             2.0 * q / (float(self.alpha) * d)),
            "alpha-beta-hypothesis": float(self.alpha) * beta
            >= (4000.0 / self.c5) * q / d,
        }


def count_hardcore_expander(
    G: BipartiteGraph,
    hp: HardCoreParams,
    epsilon: float,
    params: ExpansionParams | None = None,
    force_method: str | None = None,
    workers: int = 2,
) -> ApproxCount:
    """Z_G(lambda) ~ (1+lambda)^n (Xi^X(lambda,ell) + Xi^Y(lambda,ell)) over
    the small-set polymer family.

    At lambda = 1 the estimator coincides with count_expander's up to the
    family change (small versus expanding); the per-side log gap between the
    two families is reported in the notes in that case.
    """
    _check_epsilon(epsilon)
    p = params or ExpansionParams()
    n, d = G.n_x, G.d
    notes: dict = {"conditions": hp.condition_flags(d), "beta": float(hp.beta(d))}

    if force_method == METHOD_BRUTE:
        value = exact_hardcore(G, hp.lam).value
        return ApproxCount(
            log_value=_log_fraction(Fraction(value)),
            rel_error_bound=epsilon,
            method=METHOD_BRUTE,
            flags=("exact",),
            notes=notes,
            exact_value=value,
        )

    ell = choose_ell(n, d, epsilon / 4.0, model="hardcore")
    m = WeightModel.hardcore(hp.lam)
    kp = kp_hardcore(d, hp.lam, hp.alpha, hp.c5)

    def job(side: str) -> SideTerm:
        return _side_estimate(G, PolymerFamily("small", side, p), m, kp, ell)

    with ThreadPoolExecutor(max_workers=max(1, min(workers, 2))) as pool:
        term_x, term_y = pool.map(job, (X_SIDE, Y_SIDE))

    log_value = n * _log_fraction(1 + hp.lam) + _logaddexp(term_x.log_xi, term_y.log_xi)

    if hp.lam == 1:
        mu = WeightModel.unweighted()
        gaps = {}
        for term in (term_x, term_y):
            alt = truncated_log_xi(
                G, PolymerFamily("expanding", term.side, p), mu, term.ell
            )
            gaps[term.side] = term.log_xi - alt.log_value
        notes["family_log_gap"] = gaps

    flags: list[str] = [
        f"hypothesis-unmet:{name}"
        for name, ok in notes["conditions"].items()
        if not ok
    ]
    if KP_FAILED in (term_x.kp_status, term_y.kp_status):
        flags.append("kp-failed-at-cap")
    if not flags:
        flags.append("certified")
    return ApproxCount(
        log_value=log_value,
        rel_error_bound=epsilon,
        method=METHOD_EXPANDER,
        side_breakdown=(term_x, term_y),
        flags=tuple(flags),
        notes=notes,
    )


# -- sampling -------------------------------------------------------------------

# uniform draws are 96-bit integers compared against floor(p * 2^96)
# thresholds, so each decision's probability is exact to within 2^-96
DRAW_BITS = 96
DRAW_DEN = 1 << DRAW_BITS


def quantize(fr: Fraction) -> int:
    """floor(fr * 2^96), the integer threshold realizing probability fr."""
    return (fr.numerator << DRAW_BITS) // fr.denominator


@dataclass(frozen=True)
class SideTable:
    """All defect configurations of one side, with exact cumulative weights
    and their quantized inversion thresholds."""

    side: str
    config_bits: tuple[int, ...]
    cumulative: tuple[Fraction, ...]
    thresholds: tuple[int, ...]
    xi: Fraction

    def config_weight(self, i: int) -> Fraction:
        return self.cumulative[i] - (self.cumulative[i - 1] if i else Fraction(0))


@dataclass(frozen=True)
class SamplerTables:
    side_threshold: int
    x: SideTable
    y: SideTable
    fill_num: Fraction  # per-vertex inclusion probability for the free side

    def table(self, side: str) -> SideTable:
        return self.x if side == X_SIDE else self.y


def _build_side_table(
    G: BipartiteGraph, fam: PolymerFamily, m: WeightModel, max_configs: int
) -> SideTable:
    universe = enumerate_polymers(G, fam, G.side_size(fam.side))
    weights = [m.weight(p) for p in universe]
    bits_list: list[int] = []
    cum: list[Fraction] = []
    acc = Fraction(0)
    for config in iter_compatible_configs(universe, max_configs=max_configs):
        w = Fraction(1)
        bits = 0
        for i in config:
            w *= weights[i]
            bits |= universe[i].bits
        acc += w
        bits_list.append(bits)
        cum.append(acc)
    xi = acc
    thresholds = tuple(quantize(c / xi) for c in cum)
    return SideTable(fam.side, tuple(bits_list), tuple(cum), thresholds, xi)


def sampler_tables(
    G: BipartiteGraph,
    params: ExpansionParams | None = None,
    lam: Fraction | None = None,
    membership: str | None = None,
    max_configs: int = 1 << 22,
) -> SamplerTables:
    """Precomputed exact inversion tables for the two-step sampler."""
    p = params or ExpansionParams()
    if membership is None:
        membership = "expanding" if lam is None else "small"
    m = WeightModel.unweighted() if lam is None else WeightModel.hardcore(lam)
    tx = _build_side_table(G, PolymerFamily(membership, X_SIDE, p), m, max_configs)
    ty = _build_side_table(G, PolymerFamily(membership, Y_SIDE, p), m, max_configs)
    fill = Fraction(1, 2) if lam is None else Fraction(lam) / (1 + Fraction(lam))
    return SamplerTables(quantize(tx.xi / (tx.xi + ty.xi)), tx, ty, fill)


def exact_mu_hat(
    G: BipartiteGraph,
    params: ExpansionParams | None = None,
    lam: Fraction | None = None,
    membership: str | None = None,
) -> dict[tuple[int, int], Fraction]:
    """The two-step measure as an exact table keyed by (X-mask, Y-mask):
    side chosen proportional to Xi, defect configuration by its Gibbs
    weight, free side filled vertex-wise."""
    tables = sampler_tables(G, params, lam, membership)
    lam_f = Fraction(1) if lam is None else Fraction(lam)
    xi_total = tables.x.xi + tables.y.xi
    out: dict[tuple[int, int], Fraction] = {}
    for table in (tables.x, tables.y):
        p_side = table.xi / xi_total
        other = opposite(table.side)
        full = G.full_mask(other)
        for i, bits in enumerate(table.config_bits):
            w = table.config_weight(i)
            free = full & ~neighborhood_bits(G, table.side, bits)
            free_n = free.bit_count()
            free_verts = list(iter_bits(free))
            for sub in range(1 << free_n):
                t_bits = 0
                for j in range(free_n):
                    if (sub >> j) & 1:
                        t_bits |= 1 << free_verts[j]
                fill_p = lam_f ** t_bits.bit_count() / (1 + lam_f) ** free_n
                key = (bits, t_bits) if table.side == X_SIDE else (t_bits, bits)
                prob = p_side * (w / table.xi) * fill_p
                out[key] = out.get(key, Fraction(0)) + prob
    return out


def _draw_index(rng: Random, thresholds: tuple[int, ...]) -> int:
    u = rng.getrandbits(DRAW_BITS)
    return bisect_left(thresholds, u + 1)


def _fill_free(rng: Random, free: int, fill_threshold: int, fair: bool) -> int:
    out = 0
    for v in iter_bits(free):
        if fair:
            if rng.getrandbits(1):
                out |= 1 << v
        elif rng.getrandbits(DRAW_BITS) < fill_threshold:
            out |= 1 << v
    return out


def _sample_from_tables(
    G: BipartiteGraph, tables: SamplerTables, rng: Random
) -> tuple[int, int]:
    side = X_SIDE if rng.getrandbits(DRAW_BITS) < tables.side_threshold else Y_SIDE
    table = tables.table(side)
    bits = table.config_bits[_draw_index(rng, table.thresholds)]
    other = opposite(side)
    free = G.full_mask(other) & ~neighborhood_bits(G, side, bits)
    fair = tables.fill_num == Fraction(1, 2)
    fill = _fill_free(rng, free, quantize(tables.fill_num), fair)
    return (bits, fill) if side == X_SIDE else (fill, bits)


def _blocked_mask(G: BipartiteGraph, side: str, bits: int, nbhd: int) -> int:
    rows = G.rows(side)
    out = bits
    for v in range(G.side_size(side)):
        if rows[v] & nbhd:
            out |= 1 << v
    return out


def _sequential_defect(
    G: BipartiteGraph,
    fam: PolymerFamily,
    m: WeightModel,
    rng: Random,
    use_exact_xi: bool,
    ell: int,
    xi_cap: int,
) -> int:
    """Draw a defect configuration by per-vertex peeling: at each surviving
    vertex, either no polymer contains it (remove the vertex) or one does
    (remove the polymer's blocked set), with probabilities given by ratios
    of region partition functions."""
    side = fam.side
    n = G.side_size(side)

    def xi_of(region: int):
        if use_exact_xi:
            return exact_xi(G, fam, m, cap=xi_cap, region=region)
        return math.exp(truncated_log_xi(G, fam, m, ell, region=region).log_value)

    region = G.full_mask(side)
    chosen = 0
    for v in range(n):
        if not (region >> v) & 1:
            continue
        xi_r = xi_of(region)
        xi_without = xi_of(region & ~(1 << v))
        cands = [
            p
            for p in enumerate_polymers(G, fam, n, region)
            if (p.bits >> v) & 1
        ]
        branches = []
        for p in cands:
            blocked = _blocked_mask(G, side, p.bits, p.nbhd) & region
            weight = m.weight(p) if use_exact_xi else math.exp(m.log_weight(p))
            branches.append((p.bits, blocked, weight * xi_of(region & ~blocked)))
        if use_exact_xi:
            # the one-vertex peeling identity; exact arithmetic makes it a
            # hard invariant rather than a tolerance check
            assert xi_r == xi_without + sum(b[2] for b in branches)
        u = rng.getrandbits(DRAW_BITS)
        if use_exact_xi:
            threshold = quantize(Fraction(xi_without) / Fraction(xi_r))
        else:
            threshold = int((xi_without / xi_r) * DRAW_DEN)
        if u < threshold:
            region &= ~(1 << v)
            continue
        acc = Fraction(xi_without) if use_exact_xi else xi_without
        picked = None
        for bits, blocked, mass in branches:
            acc = acc + mass
            t = (
                quantize(Fraction(acc) / Fraction(xi_r))
                if use_exact_xi
                else int((acc / xi_r) * DRAW_DEN)
            )
            if u < t:
                picked = (bits, blocked)
                break
        if picked is None and branches:
            picked = (branches[-1][0], branches[-1][1])
        if picked is None:
            region &= ~(1 << v)
            continue
        chosen |= picked[0]
        region &= ~picked[1]
    return chosen


def _side_choice_threshold(
    G: BipartiteGraph,
    membership: str,
    p: ExpansionParams,
    m: WeightModel,
    use_exact_xi: bool,
    ell: int,
    xi_cap: int,
) -> int:
    fam_x = PolymerFamily(membership, X_SIDE, p)
    fam_y = PolymerFamily(membership, Y_SIDE, p)
    if use_exact_xi:
        xi_x = exact_xi(G, fam_x, m, cap=xi_cap)
        xi_y = exact_xi(G, fam_y, m, cap=xi_cap)
        return quantize(Fraction(xi_x) / (Fraction(xi_x) + Fraction(xi_y)))
    lx = truncated_log_xi(G, fam_x, m, ell).log_value
    ly = truncated_log_xi(G, fam_y, m, ell).log_value
    return int(DRAW_DEN / (1.0 + math.exp(ly - lx)))


def _sample_run(
    G: BipartiteGraph,
    membership: str,
    m: WeightModel,
    fill_num: Fraction,
    epsilon: float,
    p: ExpansionParams,
    seed: int,
    samples: int,
    mode: str,
    use_exact_xi: bool,
    xi_cap: int,
    model_name: str,
) -> list[tuple[int, int]]:
    _check_epsilon(epsilon)
    if samples < 1:
        raise InvalidInputError("samples must be positive")
    rng = Random(seed)
    lam = m.lam if m.variant == "hardcore" else None
    if mode == "table":
        tables = sampler_tables(G, p, lam=lam, membership=membership)
        return [_sample_from_tables(G, tables, rng) for _ in range(samples)]
    if mode != "sequential":
        raise InvalidInputError(f"unknown sampling mode {mode!r}")
    ell = choose_ell(G.n_x, G.d, epsilon / 8.0, model=model_name)
    side_threshold = _side_choice_threshold(
        G, membership, p, m, use_exact_xi, ell, xi_cap
    )
    fair = fill_num == Fraction(1, 2)
    fill_threshold = quantize(fill_num)
    out = []
    for _ in range(samples):
        side = X_SIDE if rng.getrandbits(DRAW_BITS) < side_threshold else Y_SIDE
        fam = PolymerFamily(membership, side, p)
        bits = _sequential_defect(G, fam, m, rng, use_exact_xi, ell, xi_cap)
        free = G.full_mask(opposite(side)) & ~neighborhood_bits(G, side, bits)
        fill = _fill_free(rng, free, fill_threshold, fair)
        out.append((bits, fill) if side == X_SIDE else (fill, bits))
    return out


def sample_expander(
    G: BipartiteGraph,
    epsilon: float,
    params: ExpansionParams | None = None,
    seed: int = 0,
    samples: int = 1,
    mode: str = "table",
    use_exact_xi: bool = True,
    xi_cap: int = 24,
) -> list[tuple[int, int]]:
    """Draw independent sets from the two-step measure over the expanding
    polymer family.  Table mode inverts exact configuration tables; the
    sequential mode peels one vertex at a time through partition-function
    ratios (exact ratios by default)."""
    return _sample_run(
        G,
        "expanding",
        WeightModel.unweighted(),
        Fraction(1, 2),
        epsilon,
        params or ExpansionParams(),
        seed,
        samples,
        mode,
        use_exact_xi,
        xi_cap,
        "unweighted",
    )


def sample_hardcore_expander(
    G: BipartiteGraph,
    hp: HardCoreParams,
    epsilon: float,
    params: ExpansionParams | None = None,
    seed: int = 0,
    samples: int = 1,
    mode: str = "table",
    use_exact_xi: bool = True,
    xi_cap: int = 24,
) -> list[tuple[int, int]]:
    """Hard-core analogue of sample_expander: small-set polymers, weighted
    defect configurations, free side filled at rate lambda/(1+lambda)."""
    lam = Fraction(hp.lam)
    return _sample_run(
        G,
        "small",
        WeightModel.hardcore(lam),
        lam / (1 + lam),
        epsilon,
        params or ExpansionParams(),
        seed,
        samples,
        mode,
        use_exact_xi,
        xi_cap,
        "hardcore",
    )
