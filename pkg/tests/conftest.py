import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(np.random.SeedSequence(12345))


def make_rng(seed):
    return np.random.default_rng(np.random.SeedSequence(seed))


def base_spread_enumeration(g, seeds, blockers=()):
    """Independent exact spread of a *multi-seed base graph* (no unification).

    Enumerates every live-edge outcome of the base graph directly and runs
    a set-based BFS from the seed set; counts activated non-seeds.  Used to
    test that seed unification preserves spreads.
    """
    src, dst, p = g.edge_array()
    blocked = set(blockers)
    rand = [(int(s), int(d), float(q)) for s, d, q in zip(src, dst, p)
            if 0.0 < q < 1.0]
    sure = [(int(s), int(d)) for s, d, q in zip(src, dst, p) if q >= 1.0]
    total = 0.0
    for bits in range(1 << len(rand)):
        prob = 1.0
        edges = list(sure)
        for j, (s, d, q) in enumerate(rand):
            if bits >> j & 1:
                prob *= q
                edges.append((s, d))
            else:
                prob *= 1.0 - q
        adj = {}
        for s, d in edges:
            if d not in blocked:
                adj.setdefault(s, []).append(d)
        reached = set(v for v in seeds if v not in blocked)
        stack = list(reached)
        while stack:
            u = stack.pop()
            for v in adj.get(u, ()):
                if v not in reached:
                    reached.add(v)
                    stack.append(v)
        total += prob * len(reached - set(seeds))
    return total
