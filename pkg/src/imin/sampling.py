"""Sample generation and coverage counting for the two bound estimators.

Lower bound: one sample is a *common-path sequence* — per realization, for
every non-seed node v reached by the source, the set of nodes that sit on
every source-to-v live path.  Those sets are exactly the dominator-tree
root paths truncated below the seed layer, so a whole sequence costs one
dominator-tree build.  Sets are stored as parent pointers plus a preorder
interval per entry: the entries whose set contains node u are precisely
the contiguous block of u's dominator subtree, which makes coverage
marking a slice assignment.

Upper bound: one sample is a *local reverse-reachable set* — a target v
drawn uniformly from the positive-probability reach of the source, and the
nodes that can reach v inside the realization's receiver subgraph (reached
non-seeds only).  Empty sets (target unreached) stay in the collection as
a counter; they carry denominator weight.

Coverage of a blocker set B is the number of samples whose set intersects
B.  Cov/|collection| (times the population size for the upper side) is an
unbiased estimate of the corresponding bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diffusion import Realization, sample_realization
from .domtree import build_dominator_tree
from .graph import UnifiedGraph, as_blockers

_GEN_CHUNK = 256


def compute_population(g: UnifiedGraph) -> list:
    """Non-seed nodes reachable from the source over positive-prob edges."""
    seen = np.zeros(g.n_total, dtype=bool)
    seen[g.s] = True
    stack = [g.s]
    while stack:
        u = stack.pop()
        lo, hi = g.out_ptr[u], g.out_ptr[u + 1]
        for off in range(lo, hi):
            v = g.out_dst[off]
            if seen[v] or g.blocked[v] or g.out_p[off] <= 0.0:
                continue
            seen[v] = True
            stack.append(v)
    seen[g.s] = False
    seen[list(g.seeds)] = False
    return [int(v) for v in np.nonzero(seen)[0]]


@dataclass
class CPSequence:
    """All common-path sets of one realization (inspection-friendly form)."""

    realization: Realization
    nodes: np.ndarray      # entry -> node id, dominator-tree preorder
    parents: np.ndarray    # entry -> parent entry index or -1

    def sets(self):
        """{node: frozenset of its common-path set}, materialized."""
        out = {}
        chains = []
        for e in range(len(self.nodes)):
            p = self.parents[e]
            chain = (chains[p] if p >= 0 else []) + [int(self.nodes[e])]
            chains.append(chain)
            out[int(self.nodes[e])] = frozenset(chain)
        return out


def _sequence_entries(ug: UnifiedGraph, phi: Realization):
    """Entry arrays (nodes, parents, subtree sizes) for one realization.

    Entries are emitted in dominator-tree preorder so that the entries
    whose set contains a node form one contiguous block per sequence.
    """
    dt = build_dominator_tree(phi, ug.s)
    order = dt.order
    if len(order) <= 1:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty.copy(), empty.copy()
    children = [[] for _ in range(ug.n_total)]
    for v in order[1:]:
        children[dt.idom[v]].append(int(v))

    nodes, parents, sizes = [], [], []
    entry_of = {}
    stack = list(reversed(children[ug.s]))
    while stack:
        u = stack.pop()
        if not ug.seed_mask[u]:
            parent = dt.idom[u]
            if parent == ug.s or ug.seed_mask[parent]:
                pe = -1
            else:
                pe = entry_of[parent]
            entry_of[u] = len(nodes)
            nodes.append(u)
            parents.append(pe)
            sizes.append(int(dt.subtree_size[u]))
        stack.extend(reversed(children[u]))
    return (np.asarray(nodes, dtype=np.int64),
            np.asarray(parents, dtype=np.int64),
            np.asarray(sizes, dtype=np.int64))


def local_sampling(g: UnifiedGraph, rng: np.random.Generator) -> CPSequence:
    """Sample one realization and return its common-path sequence."""
    phi = sample_realization(g, None, rng)
    nodes, parents, _ = _sequence_entries(g, phi)
    return CPSequence(realization=phi, nodes=nodes, parents=parents)


@dataclass
class LRRSet:
    """One reverse-reachable sample: a target and who can reach it."""

    target: int
    members: frozenset


def _reverse_reach(ug: UnifiedGraph, phi: Realization, target: int,
                   inside: np.ndarray) -> list:
    members = np.zeros(ug.n_total, dtype=bool)
    members[target] = True
    stack = [target]
    out = [target]
    while stack:
        v = stack.pop()
        lo, hi = ug.in_ptr[v], ug.in_ptr[v + 1]
        for off in range(lo, hi):
            if not phi.live[ug.in_eid[off]]:
                continue
            u = ug.in_src[off]
            if members[u] or not inside[u]:
                continue
            members[u] = True
            out.append(int(u))
            stack.append(u)
    return out


def global_sampling(g: UnifiedGraph, population,
                    rng: np.random.Generator) -> LRRSet:
    """Sample one realization and the reverse-reachable set of a random target."""
    if not population:
        raise ValueError("seeds influence no one: sampling population is empty")
    phi = sample_realization(g, None, rng)
    target = int(population[int(rng.integers(0, len(population)))])
    reach = phi.reach
    if not reach[target]:
        return LRRSet(target=target, members=frozenset())
    inside = reach & ~g.uncounted
    members = _reverse_reach(g, phi, target, inside)
    return LRRSet(target=target, members=frozenset(members))


class CPCollection:
    """A growing set of common-path sequences with an inverted index."""

    def __init__(self, ug: UnifiedGraph, rng: np.random.Generator):
        self.ug = ug
        self.rng = rng
        self.n_sequences = 0
        self._nodes = []      # list of per-sequence entry-node arrays
        self._parents = []
        self._ends = []       # per-entry subtree interval ends (global)
        self._frozen = None

    @property
    def n_samples(self):
        return self.n_sequences

    def extend(self, count: int):
        """Generate `count` more sequences from the collection's stream."""
        offset = sum(len(a) for a in self._nodes)
        for _ in range(count):
            phi = sample_realization(self.ug, None, self.rng)
            nodes, parents, sizes = _sequence_entries(self.ug, phi)
            self._nodes.append(nodes)
            self._parents.append(parents)
            base = offset + np.arange(len(nodes), dtype=np.int64)
            self._ends.append(base + sizes)
            offset += len(nodes)
            self.n_sequences += 1
        self._frozen = None

    def _freeze(self):
        if self._frozen is None:
            nodes = (np.concatenate(self._nodes) if self._nodes
                     else np.empty(0, dtype=np.int64))
            ends = (np.concatenate(self._ends) if self._ends
                    else np.empty(0, dtype=np.int64))
            order = np.argsort(nodes, kind="stable")
            node_ptr = np.zeros(self.ug.n_total + 1, dtype=np.int64)
            np.add.at(node_ptr, nodes + 1, 1)
            np.cumsum(node_ptr, out=node_ptr)
            self._frozen = (nodes, ends, order, node_ptr)
        return self._frozen

    def state(self):
        return _CPState(self)


class _CPState:
    """Incremental coverage bookkeeping over a frozen CP collection."""

    def __init__(self, coll: CPCollection):
        nodes, ends, order, node_ptr = coll._freeze()
        self.nodes = nodes
        self.ends = ends
        self.order = order
        self.node_ptr = node_ptr
        self.n_entries = len(nodes)
        self.covered = np.zeros(self.n_entries, dtype=bool)
        self._prefix = None

    def _entries_of(self, u):
        return self.order[self.node_ptr[u]:self.node_ptr[u + 1]]

    def add(self, u):
        for e in self._entries_of(u):
            self.covered[e:self.ends[e]] = True
        self._prefix = None

    def coverage(self) -> int:
        return int(self.covered.sum())

    def _uncovered_prefix(self):
        if self._prefix is None:
            pre = np.zeros(self.n_entries + 1, dtype=np.int64)
            np.cumsum(~self.covered, out=pre[1:])
            self._prefix = pre
        return self._prefix

    def gain(self, u) -> int:
        pre = self._uncovered_prefix()
        es = self._entries_of(u)
        return int((pre[self.ends[es]] - pre[es]).sum())

    def gains_all(self, n_nodes) -> np.ndarray:
        pre = self._uncovered_prefix()
        per_entry = pre[self.ends] - pre[np.arange(self.n_entries)]
        out = np.zeros(n_nodes, dtype=np.int64)
        np.add.at(out, self.nodes, per_entry)
        return out


class LRRCollection:
    """A growing set of reverse-reachable samples (empty sets kept as a count)."""

    def __init__(self, ug: UnifiedGraph, rng: np.random.Generator,
                 population=None):
        self.ug = ug
        self.rng = rng
        self.population = (compute_population(ug) if population is None
                           else list(population))
        if not self.population:
            raise ValueError("seeds influence no one: sampling population "
                             "is empty")
        self._pop_arr = np.asarray(self.population, dtype=np.int64)
        self.n_empty = 0
        self._members = []   # per nonempty set, member node array
        self._targets = []
        self._frozen = None

    @classmethod
    def from_sets(cls, ug: UnifiedGraph, sets, population=None):
        """Build a collection from explicit member lists (tests/debugging).

        Empty member lists become counted empty sets, as in sampling.
        """
        coll = cls(ug, rng=None, population=population)
        for members in sets:
            members = list(members)
            if members:
                coll._members.append(np.asarray(members, dtype=np.int64))
                coll._targets.append(members[0])
            else:
                coll.n_empty += 1
        return coll

    @property
    def n_samples(self):
        return len(self._members) + self.n_empty

    def extend(self, count: int):
        ug = self.ug
        for _ in range(count):
            phi = sample_realization(ug, None, self.rng)
            target = int(self._pop_arr[int(self.rng.integers(
                0, len(self._pop_arr)))])
            reach = phi.reach
            if not reach[target]:
                self.n_empty += 1
                continue
            inside = reach & ~ug.uncounted
            members = _reverse_reach(ug, phi, target, inside)
            self._members.append(np.asarray(members, dtype=np.int64))
            self._targets.append(target)
        self._frozen = None

    def _freeze(self):
        if self._frozen is None:
            n_sets = len(self._members)
            flat = (np.concatenate(self._members) if self._members
                    else np.empty(0, dtype=np.int64))
            set_of = np.repeat(
                np.arange(n_sets, dtype=np.int64),
                [len(m) for m in self._members]) if n_sets else \
                np.empty(0, dtype=np.int64)
            order = np.argsort(flat, kind="stable")
            node_ptr = np.zeros(self.ug.n_total + 1, dtype=np.int64)
            np.add.at(node_ptr, flat + 1, 1)
            np.cumsum(node_ptr, out=node_ptr)
            self._frozen = (flat, set_of, order, node_ptr, n_sets)
        return self._frozen

    def state(self):
        return _LRRState(self)


class _LRRState:
    def __init__(self, coll: LRRCollection):
        flat, set_of, order, node_ptr, n_sets = coll._freeze()
        self.member_node = flat
        self.member_set = set_of
        self.order = order
        self.node_ptr = node_ptr
        self.covered = np.zeros(n_sets, dtype=bool)

    def _sets_of(self, u):
        return self.member_set[self.order[
            self.node_ptr[u]:self.node_ptr[u + 1]]]

    def add(self, u):
        self.covered[self._sets_of(u)] = True

    def coverage(self) -> int:
        return int(self.covered.sum())

    def gain(self, u) -> int:
        return int(np.count_nonzero(~self.covered[self._sets_of(u)]))

    def gains_all(self, n_nodes) -> np.ndarray:
        alive = ~self.covered[self.member_set]
        out = np.zeros(n_nodes, dtype=np.int64)
        np.add.at(out, self.member_node[alive], 1)
        return out


def coverage_cp(collection: CPCollection, blockers) -> int:
    """Number of common-path entries hit by the blocker set."""
    state = collection.state()
    for u in as_blockers(blockers):
        state.add(u)
    return state.coverage()


def coverage_lrr(collection: LRRCollection, blockers) -> int:
    """Number of reverse-reachable sets hit by the blocker set."""
    state = collection.state()
    for u in as_blockers(blockers):
        state.add(u)
    return state.coverage()


def marginal_coverage(collection, blockers, v) -> int:
    """Coverage gain of adding `v` on top of `blockers`."""
    state = collection.state()
    b = as_blockers(blockers)
    for u in b:
        state.add(u)
    if v in b:
        return 0
    return state.gain(int(v))


def dump_samples(collection, path):
    """One sample per line (node lists); debugging aid, not a stable format."""
    with open(path, "w", encoding="utf-8") as fh:
        if isinstance(collection, CPCollection):
            for nodes, parents in zip(collection._nodes, collection._parents):
                seq = CPSequence(None, nodes, parents)
                parts = [
                    f"{v}:" + ",".join(map(str, sorted(members)))
                    for v, members in sorted(seq.sets().items())]
                fh.write(" ".join(parts) + "\n")
        else:
            for target, members in zip(collection._targets,
                                       collection._members):
                fh.write(f"{target}:"
                         + ",".join(map(str, sorted(members))) + "\n")
            for _ in range(collection.n_empty):
                fh.write("-\n")
