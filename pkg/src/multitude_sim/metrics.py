"""Static graph analytics over topologies: hops, weighted paths, clustering.

Paths are always evaluated between processing-node pairs.  The hop count of a
path is the number of switch nodes on it, so two processing nodes sharing a
switch are 1 hop apart and lattice neighbors are (Manhattan distance + 1)
apart.  Means accumulate in node-id order for floating-point determinism.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .topology import Topology

__all__ = [
    "DisconnectedTopologyError",
    "MetricsReport",
    "METRICS_CSV_HEADER",
    "pn_hop_matrix",
    "pn_distance_matrix",
    "average_hops",
    "average_path_length",
    "clustering_coefficient",
    "degree_histogram",
    "compute_metrics",
]

METRICS_CSV_HEADER = "family,seed,N,S,alpha,ks,avg_hops,avg_path_length,clustering,unreachable"


class DisconnectedTopologyError(ValueError):
    """Raised when a metric needs a connected topology but finds none."""


@dataclass
class MetricsReport:
    """One topology's static metrics; avg_path_length is NaN when disconnected."""

    avg_hops: float
    avg_path_length: float
    clustering_coefficient: float
    degree_histogram: dict[int, int]
    unreachable_pairs: int

    def csv_row(self, topology: Topology) -> str:
        alpha = "" if topology.alpha is None else repr(float(topology.alpha))
        k_s = "" if topology.k_s is None else repr(float(topology.k_s))
        return ",".join(
            [
                topology.family,
                str(topology.seed),
                str(topology.n_processing),
                str(topology.n_switch),
                alpha,
                k_s,
                repr(float(self.avg_hops)),
                repr(float(self.avg_path_length)),
                repr(float(self.clustering_coefficient)),
                str(self.unreachable_pairs),
            ]
        )


def pn_hop_matrix(topology: Topology) -> np.ndarray:
    """Minimum hop counts between all processing-node pairs.

    Entry [i, j] is the number of switch nodes on a minimum-hop path between
    processing nodes i and j (indices into ``topology.processing_ids``),
    -1 when unreachable, 0 on the diagonal.  Computed by per-source BFS over
    the unweighted graph; hop count is BFS edge distance minus one (the two
    stub links bracket the switch chain).
    """
    n = topology.n_processing
    offset = topology.n_switch
    total = topology.n_nodes
    hops = np.full((n, n), -1, dtype=np.int32)
    for src in range(n):
        dist = np.full(total, -1, dtype=np.int32)
        start = offset + src
        dist[start] = 0
        queue = deque([start])
        while queue:
            node = queue.popleft()
            d = dist[node]
            for nb in topology.neighbors(node):
                if dist[nb] < 0:
                    dist[nb] = d + 1
                    queue.append(nb)
        for dst in range(n):
            d = dist[offset + dst]
            if d >= 0:
                hops[src, dst] = max(d - 1, 0)
    return hops


def average_hops(topology: Topology) -> tuple[float, int]:
    """Mean minimum hop count over reachable ordered PN pairs.

    Returns (mean, number of unreachable unordered pairs); unreachable pairs
    only appear after fault injection.  The mean is NaN if nothing is
    reachable.
    """
    n = topology.n_processing
    if n < 2:
        raise ValueError("average_hops needs at least 2 processing nodes")
    hops = pn_hop_matrix(topology)
    off_diag = ~np.eye(n, dtype=bool)
    reachable = (hops >= 0) & off_diag
    unreachable = int((~reachable & off_diag).sum()) // 2
    if not reachable.any():
        return float("nan"), unreachable
    return float(hops[reachable].mean()), unreachable


def pn_distance_matrix(topology: Topology) -> np.ndarray:
    """Euclidean-weighted shortest path lengths between all PN pairs (inf if unreachable)."""
    n = topology.n_processing
    offset = topology.n_switch
    total = topology.n_nodes
    out = np.full((n, n), np.inf)
    for src in range(n):
        dist = np.full(total, np.inf)
        start = offset + src
        dist[start] = 0.0
        heap = [(0.0, start)]
        while heap:
            d, node = heapq.heappop(heap)
            if d > dist[node]:
                continue
            for nb in topology.neighbors(node):
                nd = d + topology.link_length(node, nb)
                if nd < dist[nb]:
                    dist[nb] = nd
                    heapq.heappush(heap, (nd, nb))
        out[src] = dist[offset : offset + n]
    return out


def average_path_length(topology: Topology) -> float:
    """Mean weighted shortest path over unordered distinct PN pairs, stubs included."""
    n = topology.n_processing
    if n < 2:
        raise ValueError("average_path_length needs at least 2 processing nodes")
    dist = pn_distance_matrix(topology)
    total = 0.0
    pairs = 0
    for i in range(n):
        for j in range(i + 1, n):
            d = dist[i, j]
            if not math.isfinite(d):
                raise DisconnectedTopologyError(
                    f"processing nodes {i} and {j} have no connecting path"
                )
            total += d
            pairs += 1
    return total / pairs


def clustering_coefficient(topology: Topology) -> float:
    """Mean local clustering over switch nodes of degree >= 2.

    Local clustering of a switch is (links among its switch neighbors) /
    (k * (k - 1) / 2).  Degree-0/1 switches have no defined value and are
    excluded from the mean rather than counted as zero.
    """
    neighbor_sets = [set(topology.switch_neighbors(s)) for s in range(topology.n_switch)]
    total = 0.0
    counted = 0
    for s in range(topology.n_switch):
        nbrs = topology.switch_neighbors(s)
        k = len(nbrs)
        if k < 2:
            continue
        triangles = 0
        for i in range(k):
            set_i = neighbor_sets[nbrs[i]]
            for j in range(i + 1, k):
                if nbrs[j] in set_i:
                    triangles += 1
        total += triangles / (k * (k - 1) / 2)
        counted += 1
    if counted == 0:
        raise ValueError("no switch node has degree >= 2; clustering is undefined")
    return total / counted


def degree_histogram(topology: Topology) -> dict[int, int]:
    """Switch-to-switch degree -> switch-node count."""
    hist: dict[int, int] = {}
    for s in range(topology.n_switch):
        d = topology.switch_degree(s)
        hist[d] = hist.get(d, 0) + 1
    return dict(sorted(hist.items()))


def compute_metrics(topology: Topology) -> MetricsReport:
    """All static metrics at once; path length degrades to NaN after faults."""
    avg, unreachable = average_hops(topology)
    try:
        path_length = average_path_length(topology)
    except DisconnectedTopologyError:
        path_length = float("nan")
    try:
        clustering = clustering_coefficient(topology)
    except ValueError:
        clustering = float("nan")
    return MetricsReport(
        avg_hops=avg,
        avg_path_length=path_length,
        clustering_coefficient=clustering,
        degree_histogram=degree_histogram(topology),
        unreachable_pairs=unreachable,
    )
