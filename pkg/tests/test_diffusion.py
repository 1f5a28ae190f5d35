import math

import numpy as np
import pytest

from imin import fixtures
from imin.diffusion import (ic_spread_samples,
                            monte_carlo_spread, sample_realization,
                            simulate_ic, stopping_rule_spread)
from imin.graph import Graph, unify_seeds
from imin.oracle import ExactModel

from conftest import make_rng


def single_edge(p):
    return unify_seeds(Graph.from_edges(2, [0], [1], [p]), {0})


def spread_distribution(model):
    """Exact pmf of the non-seed spread from the enumeration oracle."""
    keep = ~model.ug.uncounted
    pmf = {}
    for _, _, prob, reach0 in model._chunks():
        sizes = (reach0 & keep).sum(axis=1)
        for size, pr in zip(sizes, prob):
            pmf[int(size)] = pmf.get(int(size), 0.0) + float(pr)
    return pmf


class TestSampleRealization:
    def test_certain_edges_all_live(self, rng):
        ug = fixtures.diamond(1.0)
        phi = sample_realization(ug, None, rng)
        assert phi.live.all()
        assert phi.reach.sum() == 5  # s plus all four nodes

    def test_zero_probability_edges_dead(self, rng):
        ug = single_edge(0.0)
        phi = sample_realization(ug, None, rng)
        # only the unification edge s->seed survives
        assert phi.reach.sum() == 2

    def test_worked_realization_is_reachable_draw(self):
        # The fixed worked-example draw must appear among sampled
        # realizations within a reasonable number of tries.
        ug = fixtures.worked_example_small()
        want = fixtures.worked_example_small_realization(ug)
        rng = make_rng(2024)
        for _ in range(2000):
            phi = sample_realization(ug, None, rng)
            if np.array_equal(phi.live, want.live):
                break
        else:
            pytest.fail("fixed realization never sampled")
        reached = sorted(int(v) for v in np.nonzero(want.reach)[0])
        assert reached == [0, 1, 2, 3, 5, 6, ug.s]

    def test_blocked_targets_never_live(self, rng):
        ug = fixtures.diamond(1.0)
        phi = sample_realization(ug, [3], rng)
        assert not phi.reach[3]


class TestSimulateIC:
    def test_deterministic_chain(self, rng):
        assert simulate_ic(fixtures.chain(), None, rng) == 2

    def test_isolated_seed(self, rng):
        g = unify_seeds(Graph.from_edges(2, [1], [0]), {0})
        assert simulate_ic(g, None, rng) == 0

    def test_diamond_fully_blocked(self, rng):
        assert simulate_ic(fixtures.diamond(1.0), [1, 2], rng) == 0

    def test_matches_batch_engine_distribution(self):
        ug = fixtures.diamond(0.6)
        rng = make_rng(5)
        singles = np.array([simulate_ic(ug, None, rng) for _ in range(4000)])
        batch = ic_spread_samples(ug, None, 4000, make_rng(6))
        for val in range(4):
            a = (singles == val).mean()
            b = (batch == val).mean()
            assert abs(a - b) < 5 * math.sqrt(0.25 / 4000) + 1e-12


class TestLiveEdgeEquivalence:
    def test_realization_sizes_match_exact_distribution(self):
        ug = fixtures.diamond(0.5)
        model = ExactModel(ug)
        pmf = spread_distribution(model)
        rng = make_rng(7)
        keep = ~ug.uncounted
        n = 6000
        counts = {}
        for _ in range(n):
            phi = sample_realization(ug, None, rng)
            size = int((phi.reach & keep).sum())
            counts[size] = counts.get(size, 0) + 1
        for size, p in pmf.items():
            freq = counts.get(size, 0) / n
            assert abs(freq - p) < 3 * math.sqrt(p * (1 - p) / n) + 1e-9

    def test_forward_cascade_matches_exact_distribution(self):
        ug = fixtures.diamond(0.5)
        pmf = spread_distribution(ExactModel(ug))
        samples = ic_spread_samples(ug, None, 6000, make_rng(8))
        for size, p in pmf.items():
            freq = (samples == size).mean()
            assert abs(freq - p) < 3 * math.sqrt(p * (1 - p) / 6000) + 1e-9


class TestMonteCarlo:
    def test_deterministic_chain_exact(self):
        assert monte_carlo_spread(fixtures.chain(), None, 50, make_rng(1)) \
            == 2.0

    def test_single_half_edge(self):
        est = monte_carlo_spread(single_edge(0.5), None, 100_000, make_rng(2))
        assert abs(est - 0.5) < 0.01

    def test_diamond_against_oracle(self):
        ug = fixtures.diamond(0.5)
        true = ExactModel(ug).spread()
        n = 40_000
        samples = ic_spread_samples(ug, None, n, make_rng(3))
        sigma = samples.std() / math.sqrt(n)
        assert abs(samples.mean() - true) < 3 * sigma + 1e-12


class TestCouplingMonotonicity:
    def test_blocker_never_increases_spread_on_shared_draws(self):
        ug = fixtures.worked_example_small()
        keep = ~ug.uncounted
        for i in range(200):
            phi_free = sample_realization(ug, None, make_rng(1000 + i))
            phi_blocked = sample_realization(ug, [3], make_rng(1000 + i))
            assert (phi_blocked.reach & keep).sum() \
                <= (phi_free.reach & keep).sum()


class TestStoppingRule:
    def test_zero_variance_chain(self):
        for i in range(20):
            est = stopping_rule_spread(fixtures.chain(), None, 0.1, 0.05,
                                       make_rng(i))
            assert 1.8 <= est.value <= 2.2

    def test_half_edge_coverage(self):
        gamma, delta = 0.1, 0.01
        ug = single_edge(0.5)
        hits = 0
        runs = 1000
        rng = make_rng(99)
        for _ in range(runs):
            est = stopping_rule_spread(ug, None, gamma, delta, rng)
            if 0.45 <= est.value <= 0.55:
                hits += 1
        assert hits >= 990

    def test_diamond_coverage_against_oracle(self):
        ug = fixtures.diamond(0.5)
        true = ExactModel(ug).spread()
        gamma, delta = 0.1, 0.05
        hits, runs = 0, 400
        rng = make_rng(123)
        for _ in range(runs):
            est = stopping_rule_spread(ug, None, gamma, delta, rng)
            if (1 - gamma) * true <= est.value <= (1 + gamma) * true:
                hits += 1
        slack = 3 * math.sqrt(delta * (1 - delta) / runs)
        assert hits / runs >= 1 - delta - slack

    def test_exact_zero_flag(self):
        g = unify_seeds(Graph.from_edges(2, [0], [1]), {1})
        est = stopping_rule_spread(g, None, 0.1, 0.1, make_rng(4))
        assert est.exact_zero and est.value == 0.0
        assert est.samples_used >= 1

    def test_zero_after_blocking(self):
        est = stopping_rule_spread(fixtures.chain(), [1], 0.1, 0.1,
                                   make_rng(5))
        assert est.exact_zero and est.value == 0.0

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            stopping_rule_spread(fixtures.chain(), None, 0.0, 0.1,
                                 make_rng(6))
        with pytest.raises(ValueError):
            stopping_rule_spread(fixtures.chain(), None, 0.1, 1.0,
                                 make_rng(6))


class TestDeterminism:
    def test_same_seed_same_samples(self):
        ug = fixtures.worked_example_small()
        a = ic_spread_samples(ug, None, 500, make_rng(77))
        b = ic_spread_samples(ug, None, 500, make_rng(77))
        assert np.array_equal(a, b)

    def test_streamed_identical_for_fixed_layout(self):
        from imin.diffusion import ic_spread_samples_streamed

        ug = fixtures.worked_example_small()
        a = ic_spread_samples_streamed(ug, None, 999, make_rng(78),
                                       streams=4)
        b = ic_spread_samples_streamed(ug, None, 999, make_rng(78),
                                       streams=4)
        assert np.array_equal(a, b)
        assert len(a) == 999

    def test_streamed_statistically_equivalent_across_layouts(self):
        from imin.diffusion import ic_spread_samples_streamed

        ug = fixtures.diamond(0.5)
        true = ExactModel(ug).spread()
        n = 20_000
        for streams in (1, 3, 8):
            samples = ic_spread_samples_streamed(ug, None, n, make_rng(79),
                                                 streams=streams)
            sigma = samples.std() / math.sqrt(n)
            assert abs(samples.mean() - true) < 3.5 * sigma + 1e-12
