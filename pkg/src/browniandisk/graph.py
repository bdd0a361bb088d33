"""Shortest-path closure of the direct-distance graph over sampled points.

Every pair of sampled contour entries is joined by an edge weighted by the
explicit two-point bound, and chain distances are the all-pairs shortest
paths of that complete graph.  Restricting chains to sampled points makes the
result an upper bound on the continuum chain infimum; distances from the root
are nonetheless exact (see the root-distance identity tests).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .contour import ContourSequence
from .errors import ParameterError, ResourceLimitError

__all__ = [
    "MetricApprox",
    "shortest_path_closure",
    "single_source_distances",
    "dijkstra_distances",
]

DEFAULT_POINT_CAP = 4096


@dataclass(frozen=True)
class MetricApprox:
    """All-pairs chain distances over a sampled point set.

    ``dist[i, j]`` approximates the metric between contour entries
    ``point_indices[i]`` and ``point_indices[j]``; it is a pseudo-metric by
    construction (zero diagonal, symmetric, triangle inequality exact).
    """

    point_indices: np.ndarray
    point_labels: np.ndarray
    dist: np.ndarray

    def index_of(self, entry: int) -> int:
        hits = np.flatnonzero(self.point_indices == entry)
        if hits.size == 0:
            raise ParameterError(f"entry {entry} is not a sampled point")
        return int(hits[0])


def direct_distance_rows(contour: ContourSequence, points: np.ndarray) -> np.ndarray:
    """Dense matrix of direct distances between the sampled entries."""
    return contour.direct_matrix(np.asarray(points, dtype=np.int64))


def shortest_path_closure(
    contour: ContourSequence,
    points: np.ndarray,
    cap: int = DEFAULT_POINT_CAP,
) -> MetricApprox:
    """All-pairs shortest paths on the complete direct-distance graph."""
    points = np.unique(np.asarray(points, dtype=np.int64))
    if np.any(points < 0) or np.any(points >= len(contour)):
        raise ParameterError("point index out of contour range")
    if points.size > cap:
        raise ResourceLimitError(
            f"{points.size} points exceed the cap of {cap}; the dense closure is "
            "quadratic in memory - subsample the points or raise the cap"
        )
    w = direct_distance_rows(contour, points)
    n = points.size
    # explicit-zero CSR: zero-weight edges (e.g. the two root entries) are
    # genuine edges, which a dense matrix cannot express for csgraph
    g = csr_matrix(
        (w.ravel(), np.tile(np.arange(n), n), np.arange(0, n * n + 1, n)),
        shape=(n, n),
    )
    dist = shortest_path(g, method="FW", directed=False)
    return MetricApprox(
        point_indices=points,
        point_labels=contour.labels[points].copy(),
        dist=dist,
    )


def single_source_distances(
    contour: ContourSequence, source: int, nodes: np.ndarray, dense_limit: int = 1024
) -> np.ndarray:
    """Single-source chain distances over the complete graph on ``nodes``.

    Small node sets use min-plus relaxation of the full direct-distance
    matrix (a handful of dense rounds); larger ones fall back to the lazy-row
    Dijkstra, whose memory stays linear.
    """
    nodes = np.asarray(nodes, dtype=np.int64)
    src = np.flatnonzero(nodes == source)
    if src.size == 0:
        raise ParameterError("source entry must be among the nodes")
    if nodes.size > dense_limit:
        return dijkstra_distances(contour, source, nodes)
    w = contour.direct_matrix(nodes)
    dist = w[src[0]].copy()
    for _ in range(nodes.size):
        relaxed = np.min(dist[:, None] + w, axis=0)
        if np.all(relaxed >= dist):
            break
        np.minimum(dist, relaxed, out=dist)
    return dist


def dijkstra_distances(
    contour: ContourSequence,
    source: int,
    nodes: np.ndarray,
    stop_frontier: float | None = None,
    settle: np.ndarray | None = None,
) -> np.ndarray:
    """Single-source shortest paths over the complete graph on ``nodes``.

    Rows of the direct-distance matrix are generated lazily, so memory stays
    linear in the node count.  ``nodes`` must contain the source entry.

    With ``stop_frontier`` the search halts once the settled frontier exceeds
    it and every entry listed in ``settle`` is settled; distances of nodes
    still unsettled then are upper bounds that provably exceed the frontier,
    which is all a ball indicator at a smaller radius needs.
    """
    nodes = np.asarray(nodes, dtype=np.int64)
    src = np.flatnonzero(nodes == source)
    if src.size == 0:
        raise ParameterError("source entry must be among the nodes")
    n = nodes.size
    dist = np.full(n, np.inf)
    dist[src[0]] = 0.0
    work = dist.copy()
    done = np.zeros(n, dtype=bool)
    must_settle = set()
    if settle is not None:
        must_settle = {int(np.flatnonzero(nodes == e)[0]) for e in np.atleast_1d(settle)}
    for _ in range(n):
        u = int(np.argmin(work))
        frontier = work[u]
        if not np.isfinite(frontier):
            break
        must_settle.discard(u)
        if stop_frontier is not None and frontier > stop_frontier and not must_settle:
            break
        done[u] = True
        row = contour.direct_row(int(nodes[u]), nodes)
        np.minimum(dist, dist[u] + row, out=dist)
        np.minimum(work, dist, out=work)
        work[done] = np.inf
    return dist
