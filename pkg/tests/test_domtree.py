import math

import networkx as nx
import numpy as np

from imin import fixtures
from imin.diffusion import Realization, sample_realization
from imin.domtree import build_dominator_tree, reachable_from, subtree_sizes
from imin.graph import Graph, unify_seeds
from imin.oracle import ExactModel

from conftest import make_rng


def brute_force_idom(ug, phi):
    """Immediate dominators by the removal definition (test oracle).

    u dominates v iff removing u disconnects the source from v; the
    immediate dominator is the dominator that is itself dominated by all
    the others (the one with the largest dominator set).
    """
    src = ug.s
    live_pairs = []
    srcs = np.repeat(np.arange(ug.n_total, dtype=np.int64),
                     np.diff(ug.out_ptr))
    for eid in np.nonzero(phi.live)[0]:
        live_pairs.append((int(srcs[eid]), int(ug.out_dst[eid])))

    def reach_without(banned):
        adj = {}
        for a, b in live_pairs:
            if a != banned and b != banned:
                adj.setdefault(a, []).append(b)
        seen = {src}
        stack = [src]
        while stack:
            u = stack.pop()
            for v in adj.get(u, ()):
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen

    reached = reach_without(None)
    doms = {v: {u for u in reached
                if u not in (v, src) and v not in reach_without(u)}
            for v in reached if v != src}
    idom = {}
    for v, ds in doms.items():
        if not ds:
            idom[v] = src
        else:
            idom[v] = max(ds, key=lambda u: len(doms[u]))
    return reached, idom


class TestReachableFrom:
    def test_worked_realization(self):
        ug = fixtures.worked_example_small()
        phi = fixtures.worked_example_small_realization(ug)
        reach = reachable_from(phi, ug.s)
        assert sorted(np.nonzero(reach)[0]) == [0, 1, 2, 3, 5, 6, ug.s]
        assert not reach[4]

    def test_no_edges(self):
        g = unify_seeds(Graph.from_edges(2, [0], [1], [1.0]), {0})
        phi = Realization(g, np.zeros(g.m_total, dtype=bool))
        phi.live[-0:] = False
        reach = reachable_from(phi, g.s)
        assert sorted(np.nonzero(reach)[0]) == [g.s]

    def test_cycle(self):
        g = unify_seeds(Graph.from_edges(2, [0, 1], [1, 0]), {0})
        phi = Realization(g, np.ones(g.m_total, dtype=bool))
        assert reachable_from(phi, g.s).sum() == 3


class TestBuildDominatorTree:
    def test_worked_realization_idoms(self):
        ug = fixtures.worked_example_small()
        phi = fixtures.worked_example_small_realization(ug)
        dt = build_dominator_tree(phi, ug.s)
        assert dt.idom[0] == ug.s
        assert dt.idom[1] == dt.idom[2] == dt.idom[3] == 0
        assert dt.idom[5] == dt.idom[6] == 3
        assert dt.idom[4] == -1  # unreached

    def test_chain(self):
        ug = fixtures.chain()
        phi = sample_realization(ug, None, make_rng(0))
        dt = build_dominator_tree(phi, ug.s)
        assert dt.idom[1] == 0 and dt.idom[2] == 1

    def test_diamond_join(self):
        ug = fixtures.diamond(1.0)
        phi = sample_realization(ug, None, make_rng(0))
        dt = build_dominator_tree(phi, ug.s)
        assert dt.idom[3] == 0  # two disjoint paths meet at the seed

    def test_matches_brute_force_on_random_realizations(self):
        for trial in range(60):
            ug = fixtures.random_tiny(make_rng(trial), 7, 8)
            phi = sample_realization(ug, None, make_rng(1000 + trial))
            dt = build_dominator_tree(phi, ug.s)
            reached, want = brute_force_idom(ug, phi)
            got = {v: int(dt.idom[v]) for v in reached if v != ug.s}
            assert got == want
            for v in range(ug.n_total):
                if v not in reached:
                    assert dt.idom[v] == -1

    def test_matches_networkx(self):
        for trial in range(40):
            ug = fixtures.random_tiny(make_rng(500 + trial), 9, 12)
            phi = sample_realization(ug, None, make_rng(2000 + trial))
            dt = build_dominator_tree(phi, ug.s)
            srcs = np.repeat(np.arange(ug.n_total, dtype=np.int64),
                             np.diff(ug.out_ptr))
            dg = nx.DiGraph()
            dg.add_node(ug.s)
            for eid in np.nonzero(phi.live)[0]:
                dg.add_edge(int(srcs[eid]), int(ug.out_dst[eid]))
            want = nx.immediate_dominators(dg, ug.s)
            for v, u in want.items():
                if v == ug.s:
                    continue
                assert dt.idom[v] == u


class TestSubtreeSizes:
    def test_worked_realization_sizes(self):
        ug = fixtures.worked_example_small()
        phi = fixtures.worked_example_small_realization(ug)
        sizes = subtree_sizes(build_dominator_tree(phi, ug.s))
        assert {v: int(sizes[v]) for v in range(7)} == {
            0: 6, 1: 1, 2: 1, 3: 3, 4: 0, 5: 1, 6: 1}

    def test_chain_sizes(self):
        ug = fixtures.chain()
        phi = sample_realization(ug, None, make_rng(0))
        sizes = subtree_sizes(build_dominator_tree(phi, ug.s))
        assert int(sizes[1]) == 2 and int(sizes[2]) == 1

    def test_star_leaves(self):
        g = unify_seeds(Graph.from_edges(4, [0, 0, 0], [1, 2, 3]), {0})
        phi = sample_realization(g, None, make_rng(0))
        sizes = subtree_sizes(build_dominator_tree(phi, g.s))
        assert [int(sizes[v]) for v in (1, 2, 3)] == [1, 1, 1]

    def test_sum_identity_equals_depth_sum(self):
        # Sum of non-root subtree sizes equals the sum of node depths.
        for trial in range(25):
            ug = fixtures.random_tiny(make_rng(700 + trial), 9, 12)
            phi = sample_realization(ug, None, make_rng(3000 + trial))
            dt = build_dominator_tree(phi, ug.s)
            depth = {ug.s: 0}
            for v in dt.order[1:]:
                depth[int(v)] = depth[int(dt.idom[v])] + 1
            assert sum(int(dt.subtree_size[v]) for v in dt.order[1:]) \
                == sum(depth[int(v)] for v in dt.order)

    def test_subtree_consistency_with_children(self):
        ug = fixtures.worked_example_small()
        phi = fixtures.worked_example_small_realization(ug)
        dt = build_dominator_tree(phi, ug.s)
        kids = dt.children()
        for v in dt.order:
            assert dt.subtree_size[v] == 1 + sum(
                dt.subtree_size[c] for c in kids[v])


class TestEstimationIdentity:
    def test_mean_subtree_size_matches_singleton_decrease(self):
        # The per-realization subtree size is an unbiased estimate of the
        # expected decrease from blocking that single node.
        ug = fixtures.worked_example_small()
        model = ExactModel(ug)
        n = 20_000
        rng = make_rng(42)
        totals = np.zeros(ug.n_total)
        sq = np.zeros(ug.n_total)
        for _ in range(n):
            phi = sample_realization(ug, None, rng)
            s = build_dominator_tree(phi, ug.s).subtree_size
            totals += s
            sq += s.astype(float) ** 2
        for v in range(1, 7):
            mean = totals[v] / n
            sigma = math.sqrt(max(sq[v] / n - mean ** 2, 1e-12) / n)
            assert abs(mean - model.decrease([v])) < 3 * sigma + 1e-9
