"""Single-source BFS sampling of a graph.

A sampled tree keeps only first-discovery edges. The order in which a
vertex's neighbors are scanned is an independent uniform permutation per
vertex, drawn from the tree's seed.

The search doubles as a stub-matching exploration. Every edge is matched
once, from whichever endpoint reaches the head of the queue first, and
each match is one step of the exploration clock. Time starts at 1 and
falls with every step.
"""

import logging
from collections import deque
from dataclasses import dataclass

import numpy as np

from apps.graphgen.seeding import make_rng

from .exceptions import SamplingError

logger = logging.getLogger(__name__)

UNDISCOVERED = -1
TIME_KEY = 1


@dataclass(frozen=True, eq=False)
class SampledTree:
    """BFS tree over a graph's vertex ids.

    ``parent``, ``discovery_rank``, ``depth`` and ``discovery_step`` hold
    -1 where they have no value: the root's parent and discovery step, and
    every vertex off the root's component. ``tree_degree`` is 0 there.
    ``discovery_step`` numbers the match that discovered a vertex; ``steps``
    is the number of matches the search made.
    """

    root: int
    parent: np.ndarray
    tree_degree: np.ndarray
    discovery_rank: np.ndarray
    depth: np.ndarray
    covered: int
    discovery_step: np.ndarray
    steps: int

    @property
    def discovered(self):
        return self.discovery_rank != UNDISCOVERED

    def children(self):
        """Tree children per vertex: deg_T for the root, deg_T - 1 otherwise."""
        children = self.tree_degree.copy()
        non_root = self.discovered
        non_root[self.root] = False
        children[non_root] -= 1
        return children

    def edges(self):
        """Tree edges as an (covered - 1, 2) array of (parent, child)."""
        child = np.flatnonzero(self.parent != UNDISCOVERED)
        return np.column_stack([self.parent[child], child])

    def layer_sizes(self):
        return np.bincount(self.depth[self.discovered])


@dataclass(frozen=True)
class VisibilityRecord:
    vertex: int
    graph_degree: int
    time_index: float
    visible_children: int


def _shuffled_neighbors(g, rng):
    keys = rng.random(g.indices.size)
    rows = np.repeat(np.arange(g.n, dtype=np.int64), g.degrees)
    return g.indices[np.lexsort((keys, rows))]


def bfs_tree(g, root, seed):
    if not 0 <= root < g.n:
        raise SamplingError(f"root {root} is not a vertex of a {g.n}-vertex graph")

    neighbors = _shuffled_neighbors(g, make_rng(seed)).tolist()
    indptr = g.indptr.tolist()
    n = g.n
    parent = [UNDISCOVERED] * n
    rank = [UNDISCOVERED] * n
    depth = [UNDISCOVERED] * n
    found_at = [UNDISCOVERED] * n
    tree_degree = [0] * n

    rank[root] = 0
    depth[root] = 0
    covered = 1
    step = 0
    queue = deque([root])
    while queue:
        u = queue.popleft()
        own_rank = rank[u]
        loop_stubs = 0
        for w in neighbors[indptr[u] : indptr[u + 1]]:
            if rank[w] == UNDISCOVERED:
                rank[w] = covered
                covered += 1
                parent[w] = u
                depth[w] = depth[u] + 1
                found_at[w] = step
                tree_degree[u] += 1
                tree_degree[w] = 1
                queue.append(w)
                step += 1
            elif w == u:
                # a loop lists u twice in its own row but is one match
                loop_stubs += 1
                step += loop_stubs % 2
            elif rank[w] > own_rank:
                step += 1

    return SampledTree(
        root=int(root),
        parent=np.array(parent, dtype=np.int64),
        tree_degree=np.array(tree_degree, dtype=np.int64),
        discovery_rank=np.array(rank, dtype=np.int64),
        depth=np.array(depth, dtype=np.int64),
        covered=covered,
        discovery_step=np.array(found_at, dtype=np.int64),
        steps=step,
    )


def exploration_times(stubs, steps, seed):
    """Time of each of ``steps`` matches in a pool of ``stubs`` free copies.

    Free copies carry i.i.d. indices below the current Time. A match spends
    one copy of the head vertex and pairs it with the highest remaining
    index, which becomes the new Time, so with N free copies before the
    match the Time shrinks by a factor U ** (1 / (N - 1)).
    """
    if steps < 0 or 2 * steps > stubs:
        raise SamplingError(f"{steps} matches do not fit in {stubs} stubs")
    free = stubs - 2 * np.arange(steps, dtype=np.int64)
    uniforms = make_rng(seed, TIME_KEY).random(steps)
    return np.exp(np.cumsum(np.log1p(-uniforms) / (free - 1)))


def visibility_columns(g, tree, seed):
    """Column form of the visibility records of ``tree``.

    A discovered non-root vertex is discovered when its highest-index copy
    is matched, so its time_index is the Time of that match.
    """
    vertices = np.flatnonzero(tree.discovered)
    vertices = vertices[vertices != tree.root]
    times = exploration_times(int(g.indices.size), tree.steps, seed)
    return {
        "vertex": vertices,
        "graph_degree": g.degrees[vertices],
        "time_index": times[tree.discovery_step[vertices]],
        "visible_children": tree.tree_degree[vertices] - 1,
    }


def coupled_bfs(g, root, seed):
    """BFS tree plus one VisibilityRecord per discovered non-root vertex."""
    tree = bfs_tree(g, root, seed)
    columns = visibility_columns(g, tree, seed)
    records = [
        VisibilityRecord(int(v), int(i), float(t), int(c))
        for v, i, t, c in zip(
            columns["vertex"],
            columns["graph_degree"],
            columns["time_index"],
            columns["visible_children"],
        )
    ]
    return tree, records


def tree_degree_histogram(t):
    values, counts = np.unique(t.tree_degree[t.discovered], return_counts=True)
    return {int(k): int(c) for k, c in zip(values, counts)}
