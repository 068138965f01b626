"""Exact counting oracles: frozen anchors, dual-route agreement, sampling."""

import math
import random
from fractions import Fraction

import pytest

from biscount import (
    CapacityError,
    ExactSampler,
    exact_count_bipartite,
    exact_count_general,
    exact_distribution,
    exact_hardcore,
    is_expanding,
)
from biscount.graphs import SideSet, two_linked_component_bits
from biscount.instances import complete_bipartite, even_cycle, hypercube
from biscount.oracle import count_independent_in, iter_independent_sets

from util import P1, brute_i_general, cycle_transfer, random_instances, tv


def test_frozen_counts():
    assert exact_count_bipartite(even_cycle(8)).value == 47
    assert exact_count_bipartite(complete_bipartite(2)).value == 7
    assert exact_count_bipartite(hypercube(3)).value == 35
    assert exact_count_bipartite(hypercube(4)).value == 743


def test_frozen_hardcore_values():
    assert exact_hardcore(complete_bipartite(2), Fraction(1, 2)).value == Fraction(7, 2)
    assert exact_hardcore(even_cycle(8), Fraction(2)).value == 257
    # lambda = 1 reduces to plain counting
    assert exact_hardcore(even_cycle(8), Fraction(1)).value == 47


def test_bipartite_sweep_agrees_with_general_branching():
    for G in random_instances(30, seed=101, max_side=12):
        a = exact_count_bipartite(G).value
        b = exact_count_general(G.to_general()).value
        assert a == b


def test_transfer_matrix_agreement_on_cycles():
    for m in range(4, 21, 2):
        G = even_cycle(m)
        for lam in (Fraction(1, 2), Fraction(1), Fraction(2)):
            assert exact_hardcore(G, lam).value == cycle_transfer(m, lam)


def test_general_count_matches_brute():
    for G in random_instances(8, seed=7, max_side=7):
        H = G.to_general()
        assert exact_count_general(H).value == brute_i_general(H)


def test_count_independent_in_restricts_to_region():
    G = even_cycle(8).to_general()
    full = (1 << G.n) - 1
    assert count_independent_in(G, full) == 47
    assert count_independent_in(G, 0) == 1
    rng = random.Random(3)
    for _ in range(10):
        region = rng.randrange(1 << G.n)
        want = sum(
            1
            for mask in range(1 << G.n)
            if mask & ~region == 0 and G.is_independent(mask)
        )
        assert count_independent_in(G, region) == want


def test_iter_independent_sets_complete_and_valid():
    G = even_cycle(8)
    pairs = list(iter_independent_sets(G))
    assert len(pairs) == 47
    assert len(set(pairs)) == 47
    for xb, yb in pairs:
        for x in range(G.n_x):
            if xb >> x & 1:
                assert G.rows("X")[x] & yb == 0


def test_size_caps_raise():
    with pytest.raises(CapacityError):
        exact_count_bipartite(even_cycle(12), size_cap=4)
    with pytest.raises(CapacityError):
        exact_count_general(even_cycle(12).to_general(), size_cap=8)


def test_exact_distribution_normalizes_and_weights():
    G = even_cycle(8)
    for lam in (Fraction(1), Fraction(1, 2)):
        dist = exact_distribution(G, lam)
        assert sum(dist.values()) == 1
        base = dist[(0, 0)]
        for (xb, yb), p in dist.items():
            assert p == base * lam ** (xb.bit_count() + yb.bit_count())


def test_exact_distribution_expanding_component_census(c8, p1):
    # P(every 2-linked X-component of the drawn set is expanding) at
    # lambda = 1; the polymer census arrives at 42/47 by a different route
    dist = exact_distribution(c8, Fraction(1))
    good = Fraction(0)
    for (xb, _), p in dist.items():
        comps = two_linked_component_bits(c8, "X", xb)
        if all(is_expanding(c8, SideSet("X", c), p1) for c in comps):
            good += p
    assert good == Fraction(42, 47)


def test_exact_sampler_reproducible_and_valid(c8):
    a = ExactSampler(c8, Fraction(1), seed=42)
    b = ExactSampler(c8, Fraction(1), seed=42)
    draws_a = [a.sample() for _ in range(50)]
    draws_b = [b.sample() for _ in range(50)]
    assert draws_a == draws_b
    legal = set(iter_independent_sets(c8))
    assert set(draws_a) <= legal


def test_exact_sampler_empirical_distribution(c8):
    s = ExactSampler(c8, Fraction(1), seed=7)
    m = 20000
    counts: dict = {}
    for _ in range(m):
        k = s.sample()
        counts[k] = counts.get(k, 0) + 1
    emp = {k: Fraction(v, m) for k, v in counts.items()}
    dist = exact_distribution(c8, Fraction(1))
    assert tv(emp, dist) < Fraction(5, 100)
