"""Edge-list files: whitespace-separated ``u v`` pairs, ``#`` starts a comment.

Ids in a file may be sparse; they are remapped to dense ids in sorted
order and the mapping is kept on ``Graph.source_ids`` so that writing the
graph back, or exporting the id-map sidecar, uses the file's ids.
"""

import logging
from pathlib import Path

import numpy as np
import pandas as pd

from .exceptions import EdgeListError
from .graph import Graph

logger = logging.getLogger(__name__)


def parse_edge_list(lines):
    """Parse edge-list lines; returns ``(graph, dropped)``.

    ``dropped`` counts self-loops and repeated pairs that were discarded.
    """
    pairs = []
    for line_number, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        fields = text.split()
        if len(fields) != 2:
            raise EdgeListError(f"expected 2 fields, found {len(fields)}", line_number)
        try:
            u, v = int(fields[0]), int(fields[1])
        except ValueError:
            raise EdgeListError(
                f"non-integer vertex id in {text!r}", line_number
            ) from None
        if u < 0 or v < 0:
            raise EdgeListError(f"negative vertex id in {text!r}", line_number)
        pairs.append((u, v))

    raw_pairs = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    external = np.unique(raw_pairs)

    edges = np.sort(raw_pairs[raw_pairs[:, 0] != raw_pairs[:, 1]], axis=1)
    edges = np.unique(edges, axis=0)
    dropped = raw_pairs.shape[0] - edges.shape[0]

    dense = external.size == 0 or (
        external[0] == 0 and external[-1] == external.size - 1
    )
    source_ids = None if dense else external
    heads = np.searchsorted(external, edges[:, 0])
    tails = np.searchsorted(external, edges[:, 1])
    return Graph.from_edges(external.size, heads, tails, source_ids=source_ids), dropped


def read_edge_list(path):
    with Path(path).open() as handle:
        graph, dropped = parse_edge_list(handle)
    if dropped:
        logger.warning("%s: dropped %d self-loop or duplicate edges", path, dropped)
    logger.info("%s: read %d vertices, %d edges", path, graph.n, graph.m)
    return graph


def write_edge_list(g, path):
    """Write one ``u v`` line per edge (u <= v), sorted, in the graph's source ids."""
    edges = g.edges if g.source_ids is None else g.source_ids[g.edges]
    edges = np.sort(edges, axis=1)
    edges = edges[np.lexsort((edges[:, 1], edges[:, 0]))]
    with Path(path).open("w") as handle:
        handle.writelines(f"{u} {v}\n" for u, v in edges.tolist())


def write_id_map(g, path):
    """Sidecar CSV ``external_id,internal_id`` for a remapped graph."""
    external = (
        np.arange(g.n, dtype=np.int64) if g.source_ids is None else g.source_ids
    )
    frame = pd.DataFrame(
        {"external_id": external, "internal_id": np.arange(g.n, dtype=np.int64)}
    )
    frame.to_csv(path, index=False)
