"""Probabilistic directed graphs, seed unification and node blocking.

Graphs are stored in CSR form over dense integer node ids.  Original node
labels from an edge-list file are kept in a side array so results can be
reported in the input's vocabulary.  Graphs are immutable after
construction; blocking is expressed as a node mask rather than a rewritten
edge set, so repeated re-blocking (greedy baselines) never copies the
adjacency arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

CACHE_FORMAT_VERSION = 1


class EdgeListParseError(ValueError):
    """Raised when an edge-list file cannot be parsed."""


class GraphError(ValueError):
    """Raised on invalid graph construction or invalid blocker/seed input."""


def _build_csr(n, src, dst, values):
    """Group (src, dst, values) by source into CSR arrays, sorting targets."""
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    vals = [v[order] for v in values]
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(ptr, src + 1, 1)
    np.cumsum(ptr, out=ptr)
    return ptr, dst, vals


@dataclass
class Graph:
    """A directed graph with per-edge propagation probabilities.

    Attributes:
        n, m: node and directed-edge counts.
        out_ptr/out_dst/out_p: CSR adjacency by source node.  The position
            of an edge in ``out_dst`` is its edge id.
        in_ptr/in_src/in_p/in_eid: CSR adjacency by target node; ``in_eid``
            maps each reverse slot back to the forward edge id.
        labels: original node labels (``labels[i]`` is the label of node i).
    """

    n: int
    m: int
    out_ptr: np.ndarray
    out_dst: np.ndarray
    out_p: np.ndarray
    in_ptr: np.ndarray
    in_src: np.ndarray
    in_p: np.ndarray
    in_eid: np.ndarray
    labels: np.ndarray = field(repr=False, default=None)

    @classmethod
    def from_edges(cls, n, src, dst, p=None, labels=None, validate=True):
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        if p is None:
            p = np.ones(len(src), dtype=np.float64)
        p = np.asarray(p, dtype=np.float64)
        if validate:
            if n <= 0:
                raise GraphError("graph must have at least one node")
            if len(src) != len(dst) or len(src) != len(p):
                raise GraphError("edge arrays must have equal length")
            if len(src) and (src.min() < 0 or src.max() >= n
                             or dst.min() < 0 or dst.max() >= n):
                raise GraphError("edge endpoint out of range")
            if np.any(src == dst):
                raise GraphError("self-loops are not allowed")
            if np.any((p < 0.0) | (p > 1.0)):
                raise GraphError("edge probabilities must lie in [0, 1]")
            if len(src) > 1:
                key = src * n + dst
                if len(np.unique(key)) != len(key):
                    raise GraphError("duplicate edges are not allowed")
        out_ptr, out_dst, (out_p,) = _build_csr(n, src, dst, [p])
        # Edge id == position in the forward CSR arrays.
        fwd_src = np.repeat(np.arange(n, dtype=np.int64), np.diff(out_ptr))
        in_ptr, in_src, (in_p, in_eid) = _build_csr(
            n, out_dst, fwd_src, [out_p, np.arange(len(src), dtype=np.int64)])
        if labels is None:
            labels = np.arange(n, dtype=np.int64)
        else:
            labels = np.asarray(labels, dtype=np.int64)
        return cls(n=n, m=len(src), out_ptr=out_ptr, out_dst=out_dst,
                   out_p=out_p, in_ptr=in_ptr, in_src=in_src, in_p=in_p,
                   in_eid=in_eid, labels=labels)

    def out_edges(self, u):
        """(targets, probabilities, edge ids) of u's outgoing edges."""
        lo, hi = self.out_ptr[u], self.out_ptr[u + 1]
        return (self.out_dst[lo:hi], self.out_p[lo:hi],
                np.arange(lo, hi, dtype=np.int64))

    def in_degree(self):
        return np.diff(self.in_ptr)

    def out_degree(self):
        return np.diff(self.out_ptr)

    def edge_array(self):
        """Edges as (src, dst, p) arrays ordered by edge id."""
        src = np.repeat(np.arange(self.n, dtype=np.int64),
                        np.diff(self.out_ptr))
        return src, self.out_dst.copy(), self.out_p.copy()

    def save(self, path):
        """Write the normalized graph to a versioned binary cache file."""
        src, dst, p = self.edge_array()
        np.savez(path, format_version=np.int64(CACHE_FORMAT_VERSION),
                 n=np.int64(self.n), src=src, dst=dst, p=p, labels=self.labels)

    @classmethod
    def load(cls, path):
        with np.load(path) as data:
            version = int(data["format_version"])
            if version != CACHE_FORMAT_VERSION:
                raise GraphError(
                    f"unsupported graph cache version {version} "
                    f"(expected {CACHE_FORMAT_VERSION})")
            return cls.from_edges(int(data["n"]), data["src"], data["dst"],
                                  data["p"], labels=data["labels"],
                                  validate=False)


def load_edge_list(path, directed=True):
    """Load a SNAP-style edge list ("u v" per line, '#' comments).

    Node ids are compacted to 0..n-1 in first-appearance order, self-loops
    are dropped, duplicate (u, v) pairs are deduplicated, and undirected
    input is doubled into two directed edges.  All probabilities start at 1
    (see :func:`assign_wc_probabilities`).
    """
    id_of = {}
    labels = []
    src, dst = [], []

    def intern(label):
        node = id_of.get(label)
        if node is None:
            node = len(labels)
            id_of[label] = node
            labels.append(label)
        return node

    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise EdgeListParseError(
                    f"{path}: line {lineno}: expected 'u v', got {line!r}")
            try:
                a, b = int(parts[0]), int(parts[1])
            except ValueError:
                raise EdgeListParseError(
                    f"{path}: line {lineno}: non-integer node id in {line!r}"
                ) from None
            if a == b:
                continue
            u, v = intern(a), intern(b)
            src.append(u)
            dst.append(v)
            if not directed:
                src.append(v)
                dst.append(u)

    if not src:
        raise EdgeListParseError(f"{path}: empty graph (no usable edges)")
    n = len(labels)
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    key = src * n + dst
    _, keep = np.unique(key, return_index=True)
    keep.sort()
    return Graph.from_edges(n, src[keep], dst[keep],
                            labels=np.asarray(labels, dtype=np.int64))


def assign_wc_probabilities(g: Graph) -> Graph:
    """Weighted-cascade convention: p(u, v) = 1 / in-degree(v)."""
    indeg = g.in_degree().astype(np.float64)
    src, dst, _ = g.edge_array()
    p = 1.0 / indeg[dst]
    return Graph.from_edges(g.n, src, dst, p, labels=g.labels, validate=False)


def assign_constant_probability(g: Graph, p: float) -> Graph:
    src, dst, _ = g.edge_array()
    return Graph.from_edges(g.n, src, dst, np.full(g.m, p, dtype=np.float64),
                            labels=g.labels, validate=False)


class BlockerSet:
    """An ordered, duplicate-free set of blocked nodes (insertion order kept)."""

    __slots__ = ("nodes", "_member")

    def __init__(self, nodes: Iterable[int] = ()):
        ordered = []
        seen = set()
        for v in nodes:
            v = int(v)
            if v not in seen:
                seen.add(v)
                ordered.append(v)
        self.nodes = tuple(ordered)
        self._member = seen

    def __contains__(self, v):
        return v in self._member

    def __iter__(self):
        return iter(self.nodes)

    def __len__(self):
        return len(self.nodes)

    def __eq__(self, other):
        if isinstance(other, BlockerSet):
            return self._member == other._member
        return NotImplemented

    def __repr__(self):
        return f"BlockerSet({list(self.nodes)})"

    def as_set(self):
        return frozenset(self._member)


def as_blockers(b) -> BlockerSet:
    if b is None:
        return BlockerSet()
    if isinstance(b, BlockerSet):
        return b
    return BlockerSet(b)


class UnifiedGraph:
    """A graph extended with a virtual source ``s`` wired to every seed.

    ``s`` gets id ``base.n`` and a probability-1 edge to each seed, so the
    cascade started at {s} activates exactly the nodes the seed set would.
    Spread values reported anywhere in this package count activated
    non-seed nodes only (neither ``s`` nor seeds are counted), which makes
    the decrease after blocking an exact difference of two spreads.

    Instances are immutable; ``blocked`` is an optional boolean mask over
    node ids that traversals consult.
    """

    def __init__(self, base: Graph, seeds, blocked=None, _arrays=None):
        seeds = frozenset(int(v) for v in seeds)
        if not seeds:
            raise GraphError("seed set must be non-empty")
        if min(seeds) < 0 or max(seeds) >= base.n:
            raise GraphError("seed id out of range")
        self.base = base
        self.seeds = seeds
        self.s = base.n
        self.n_total = base.n + 1

        if _arrays is not None:
            (self.out_ptr, self.out_dst, self.out_p,
             self.in_ptr, self.in_src, self.in_p, self.in_eid) = _arrays
            self.m_total = len(self.out_dst)
        else:
            src, dst, p = base.edge_array()
            seed_arr = np.asarray(sorted(seeds), dtype=np.int64)
            src = np.concatenate([src, np.full(len(seed_arr), self.s)])
            dst = np.concatenate([dst, seed_arr])
            p = np.concatenate([p, np.ones(len(seed_arr))])
            ext = Graph.from_edges(self.n_total, src, dst, p, validate=False)
            self.out_ptr, self.out_dst, self.out_p = (
                ext.out_ptr, ext.out_dst, ext.out_p)
            self.in_ptr, self.in_src, self.in_p, self.in_eid = (
                ext.in_ptr, ext.in_src, ext.in_p, ext.in_eid)
            self.m_total = ext.m

        self.seed_mask = np.zeros(self.n_total, dtype=bool)
        self.seed_mask[list(seeds)] = True
        # Set for nodes excluded from spread counts (seeds and s itself).
        self.uncounted = self.seed_mask.copy()
        self.uncounted[self.s] = True

        if blocked is None:
            self.blocked = np.zeros(self.n_total, dtype=bool)
        else:
            self.blocked = np.asarray(blocked, dtype=bool).copy()
        self.blocked.setflags(write=False)
        self.seed_mask.setflags(write=False)
        self.uncounted.setflags(write=False)

    def seed_out_neighbors(self):
        """Nodes directly reachable from the seed set, excluding seeds."""
        targets = set()
        for u in self.seeds:
            lo, hi = self.base.out_ptr[u], self.base.out_ptr[u + 1]
            targets.update(int(v) for v in self.base.out_dst[lo:hi])
        return sorted(targets - self.seeds)

    def check_blockers(self, blockers) -> BlockerSet:
        """Validate a candidate blocker set against this graph."""
        b = as_blockers(blockers)
        for v in b:
            if v < 0 or v >= self.n_total:
                raise GraphError(f"blocker {v} out of range")
            if v == self.s:
                raise GraphError("the unified source cannot be blocked")
            if v in self.seeds:
                raise GraphError(f"seed node {v} cannot be blocked")
        return b

    def blocked_with(self, blockers) -> np.ndarray:
        """Combined blocked mask of the graph's own mask plus `blockers`."""
        b = self.check_blockers(blockers)
        mask = self.blocked.copy()
        for v in b:
            mask[v] = True
        return mask


def unify_seeds(g: Graph, seeds) -> UnifiedGraph:
    """Attach the virtual source to `seeds` with probability-1 edges."""
    return UnifiedGraph(g, seeds)


def block_nodes(g: UnifiedGraph, blockers) -> UnifiedGraph:
    """A view of `g` in which `blockers` can never be activated.

    Shares all adjacency arrays with `g`; only the node mask differs.
    """
    mask = g.blocked_with(blockers)
    return UnifiedGraph(
        g.base, g.seeds, blocked=mask,
        _arrays=(g.out_ptr, g.out_dst, g.out_p,
                 g.in_ptr, g.in_src, g.in_p, g.in_eid))
