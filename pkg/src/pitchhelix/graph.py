"""K-nearest-neighbor graph over subband vertices and all-pairs geodesics.

Adjacency follows the OR rule: the edge {u, v} exists when v is among the K
nearest neighbors of u or u is among the K nearest neighbors of v. Geodesics
are computed by Dijkstra from every source with a binary heap; a brute-force
Floyd-Warshall oracle is provided for testing.
"""

from __future__ import annotations

import heapq
import warnings

import numpy as np

__all__ = [
    "NeighborGraph",
    "DisconnectedGraphError",
    "InsufficientNeighborsError",
    "knn_graph",
    "connected_components",
    "geodesics",
    "floyd_warshall_oracle",
]


class DisconnectedGraphError(RuntimeError):
    """The neighbor graph splits into several components; geodesics are infinite."""

    def __init__(self, components):
        self.components = [sorted(c) for c in components]
        sizes = [len(c) for c in self.components]
        super().__init__(
            f"neighbor graph has {len(components)} connected components "
            f"(sizes {sizes}); geodesic distances are infinite across them"
        )


class InsufficientNeighborsError(ValueError):
    """A vertex has fewer finite-distance neighbors than the requested K."""

    def __init__(self, vertex, available, k):
        self.vertex = vertex
        super().__init__(
            f"vertex {vertex} has only {available} finite-distance neighbors, "
            f"fewer than K={k}"
        )


class NeighborGraph:
    """Undirected weighted graph on ``n_vertices`` vertices.

    ``edges`` is a sorted tuple of (u, v, weight) with u < v and finite
    nonnegative weights; the adjacency lists are built eagerly and the graph
    is immutable afterwards.
    """

    def __init__(self, n_vertices: int, edges):
        if n_vertices < 1:
            raise ValueError(f"n_vertices must be >= 1, got {n_vertices}")
        canonical = []
        seen = set()
        for u, v, w in edges:
            u, v, w = int(u), int(v), float(w)
            if u == v:
                raise ValueError(f"self-loop on vertex {u}")
            if u > v:
                u, v = v, u
            if not 0 <= u < v < n_vertices:
                raise ValueError(f"edge ({u}, {v}) outside vertex range")
            if (u, v) in seen:
                raise ValueError(f"duplicate edge ({u}, {v})")
            if not np.isfinite(w) or w < 0:
                raise ValueError(f"edge ({u}, {v}) has invalid weight {w}")
            seen.add((u, v))
            canonical.append((u, v, w))
        self.n_vertices = int(n_vertices)
        self.edges = tuple(sorted(canonical))
        self._neighbors = [[] for _ in range(self.n_vertices)]
        for u, v, w in self.edges:
            self._neighbors[u].append((v, w))
            self._neighbors[v].append((u, w))

    def neighbors(self, u: int):
        return self._neighbors[u]

    def degree(self, u: int) -> int:
        return len(self._neighbors[u])

    def adjacency_matrix(self) -> np.ndarray:
        """Dense adjacency: edge weights, +inf off-edges, zero diagonal."""
        a = np.full((self.n_vertices, self.n_vertices), np.inf)
        np.fill_diagonal(a, 0.0)
        for u, v, w in self.edges:
            a[u, v] = a[v, u] = w
        return a


def knn_graph(distances, k: int) -> NeighborGraph:
    """K-nearest-neighbor graph with OR-symmetrization.

    For each vertex, the K finite-distance neighbors with smallest distance
    are selected (ties break toward the lower index); the union over both
    directions forms the edge set. Infinite distances never become edges.
    """
    d = np.asarray(distances, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError(f"distance matrix must be square, got shape {d.shape}")
    n = d.shape[0]
    if not 1 <= k < n:
        raise ValueError(f"K must satisfy 1 <= K < {n}, got {k}")
    chosen = set()
    for u in range(n):
        row = d[u]
        candidates = [v for v in range(n) if v != u and np.isfinite(row[v])]
        if len(candidates) < k:
            raise InsufficientNeighborsError(u, len(candidates), k)
        candidates.sort(key=lambda v: (row[v], v))
        for v in candidates[:k]:
            chosen.add((min(u, v), max(u, v)))
    edges = [(u, v, d[u, v]) for u, v in sorted(chosen)]
    return NeighborGraph(n, edges)


def connected_components(g: NeighborGraph) -> list:
    """Partition of the vertices, ordered by each component's smallest member."""
    unvisited = set(range(g.n_vertices))
    components = []
    for seed in range(g.n_vertices):
        if seed not in unvisited:
            continue
        stack = [seed]
        unvisited.discard(seed)
        component = [seed]
        while stack:
            u = stack.pop()
            for v, _ in g.neighbors(u):
                if v in unvisited:
                    unvisited.discard(v)
                    component.append(v)
                    stack.append(v)
        components.append(sorted(component))
    return components


def _dijkstra_row(g: NeighborGraph, source: int) -> np.ndarray:
    dist = np.full(g.n_vertices, np.inf)
    dist[source] = 0.0
    done = np.zeros(g.n_vertices, dtype=bool)
    heap = [(0.0, source)]
    while heap:
        d_u, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v, w in g.neighbors(u):
            if done[v]:
                continue
            alt = d_u + w
            if alt < dist[v]:
                dist[v] = alt
                heapq.heappush(heap, (alt, v))
    return dist


def _dijkstra_all_pairs(g: NeighborGraph) -> np.ndarray:
    return np.array([_dijkstra_row(g, s) for s in range(g.n_vertices)])


def geodesics(g: NeighborGraph) -> np.ndarray:
    """All-pairs shortest-path matrix; +inf across disconnected components.

    Dijkstra runs from every source; the result is then symmetrized and swept
    to a relaxation fixpoint so the metric axioms (exact symmetry, exact
    triangle inequality) hold in floating point, not just up to rounding.
    """
    d = _dijkstra_all_pairs(g)
    d = np.minimum(d, d.T)
    while True:
        previous = d
        for k in range(g.n_vertices):
            d = np.minimum(d, d[:, k, None] + d[None, k, :])
        if np.array_equal(d, previous):
            break
    if np.isinf(d).any():
        components = connected_components(g)
        warnings.warn(
            f"neighbor graph is disconnected ({len(components)} components); "
            "geodesics contain +inf",
            RuntimeWarning,
            stacklevel=2,
        )
    return d


def floyd_warshall_oracle(g: NeighborGraph) -> np.ndarray:
    """Exact all-pairs shortest paths by dynamic programming; test oracle.

    Guarded to n <= 256 because of the cubic cost.
    """
    if g.n_vertices > 256:
        raise ValueError(f"oracle limited to n <= 256, got {g.n_vertices}")
    d = g.adjacency_matrix()
    for k in range(g.n_vertices):
        d = np.minimum(d, d[:, k, None] + d[None, k, :])
    return d
