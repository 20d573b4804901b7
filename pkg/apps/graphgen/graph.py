import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .exceptions import GraphError
from .seeding import make_rng

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected (multi)graph in compressed adjacency form.

    The neighbors of ``v`` are ``indices[indptr[v]:indptr[v + 1]]``. Every
    edge is stored in both directions; a self-loop on ``v`` therefore lists
    ``v`` twice in its own row and adds 2 to its degree.

    ``source_ids`` maps dense vertex ids back to the ids of the graph (or
    file) this one was derived from; ``None`` means they are the same.
    """

    indptr: np.ndarray
    indices: np.ndarray
    source_ids: np.ndarray | None = None

    def __post_init__(self):
        for name in ("indptr", "indices", "source_ids"):
            value = getattr(self, name)
            if value is not None:
                value = np.asarray(value, dtype=np.int64)
                value.setflags(write=False)
                object.__setattr__(self, name, value)

    @classmethod
    def from_edges(cls, n, heads, tails, source_ids=None):
        heads = np.asarray(heads, dtype=np.int64)
        tails = np.asarray(tails, dtype=np.int64)
        if heads.shape != tails.shape:
            raise GraphError("edge endpoint arrays differ in length")
        low = min(heads.min(), tails.min()) if heads.size else 0
        high = max(heads.max(), tails.max()) if heads.size else -1
        if low < 0 or high >= n:
            raise GraphError(f"edge endpoint outside [0, {n})")

        sources = np.concatenate([heads, tails])
        targets = np.concatenate([tails, heads])
        order = np.lexsort((targets, sources))
        counts = np.bincount(sources, minlength=n)
        indptr = np.concatenate([[0], np.cumsum(counts)])
        return cls(indptr=indptr, indices=targets[order], source_ids=source_ids)

    @property
    def n(self):
        return int(self.indptr.size - 1)

    @cached_property
    def degrees(self):
        degrees = np.diff(self.indptr)
        degrees.setflags(write=False)
        return degrees

    def degree(self, v):
        return int(self.indptr[v + 1] - self.indptr[v])

    def neighbors(self, v):
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    @cached_property
    def edges(self):
        """Edge list as an (m, 2) array with u <= v, multiplicity kept."""
        sources = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        forward = sources < self.indices
        loops = np.flatnonzero(sources == self.indices)[::2]
        heads = np.concatenate([sources[forward], sources[loops]])
        tails = np.concatenate([self.indices[forward], self.indices[loops]])
        order = np.lexsort((tails, heads))
        edges = np.column_stack([heads[order], tails[order]])
        edges.setflags(write=False)
        return edges

    @property
    def m(self):
        return int(self.edges.shape[0])

    @cached_property
    def simple(self):
        edges = self.edges
        if np.any(edges[:, 0] == edges[:, 1]):
            return False
        return bool(np.unique(edges, axis=0).shape[0] == edges.shape[0])

    @cached_property
    def component_labels(self):
        matrix = csr_matrix(
            (np.ones(self.indices.size), self.indices, self.indptr),
            shape=(self.n, self.n),
        )
        _, labels = connected_components(matrix, directed=False)
        return labels

    @property
    def connected(self):
        return self.n > 0 and np.unique(self.component_labels).size == 1

    def external_id(self, v):
        return int(v if self.source_ids is None else self.source_ids[v])

    def internal_id(self, external):
        if self.source_ids is None:
            return int(external)
        hits = np.flatnonzero(self.source_ids == external)
        if not hits.size:
            raise GraphError(f"vertex {external} is not in the graph")
        return int(hits[0])


def configuration_model(degrees, seed, simplify=True):
    """Realize ``degrees`` through a uniformly random matching of stubs.

    With ``simplify`` the self-loops and repeated edges are dropped after
    matching, so degrees can only go down; without it the result is a
    multigraph whose degrees equal the input exactly.
    """
    degrees = np.asarray(degrees, dtype=np.int64)
    if np.any(degrees < 0):
        raise GraphError("degrees must be nonnegative")
    if degrees.sum() % 2:
        raise GraphError(f"degree sum {int(degrees.sum())} is odd")

    rng = make_rng(seed)
    stubs = np.repeat(np.arange(degrees.size, dtype=np.int64), degrees)
    rng.shuffle(stubs)
    pairs = stubs.reshape(-1, 2)

    if simplify:
        pairs = np.sort(pairs[pairs[:, 0] != pairs[:, 1]], axis=1)
        before = pairs.shape[0]
        pairs = np.unique(pairs, axis=0)
        logger.debug(
            "simplified %d matched pairs: %d loops, %d repeats",
            stubs.size // 2,
            stubs.size // 2 - before,
            before - pairs.shape[0],
        )
    return Graph.from_edges(degrees.size, pairs[:, 0], pairs[:, 1])


def giant_component(g):
    """Induced subgraph on the largest connected component, relabeled 0..n'-1."""
    if g.n == 0:
        raise GraphError("graph has no vertices")

    labels = g.component_labels
    sizes = np.bincount(labels)
    keep = labels == int(np.argmax(sizes))
    new_ids = np.cumsum(keep) - 1

    edges = g.edges
    inside = keep[edges[:, 0]]
    kept_vertices = np.flatnonzero(keep)
    source_ids = kept_vertices if g.source_ids is None else g.source_ids[kept_vertices]

    giant = Graph.from_edges(
        int(keep.sum()),
        new_ids[edges[inside, 0]],
        new_ids[edges[inside, 1]],
        source_ids=source_ids,
    )
    logger.info(
        "giant component: %d of %d vertices (%.3f), %d components",
        giant.n,
        g.n,
        giant.n / g.n,
        sizes.size,
    )
    return giant
