"""Binary undirected graphs, Laplacians and the edge-count baselines."""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, InputError, StateError


class Graph:
    """Undirected simple graph on ``n`` positionally labeled nodes.

    The adjacency matrix is stored as a read-only ``uint8`` array; edits
    return new graphs.
    """

    __slots__ = ("_adj",)

    def __init__(self, adjacency):
        adj = np.asarray(adjacency)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise InputError(f"adjacency must be square, got shape {adj.shape}")
        if adj.shape[0] < 1:
            raise InputError("graph needs at least one node")
        if not np.isin(adj, (0, 1)).all():
            raise InputError("adjacency entries must be 0 or 1 (weighted graphs are not supported)")
        adj = adj.astype(np.uint8)
        if np.any(np.diag(adj)):
            raise InputError("self-loops are not allowed")
        if not np.array_equal(adj, adj.T):
            raise InputError("adjacency must be symmetric")
        adj.setflags(write=False)
        self._adj = adj

    @property
    def n(self) -> int:
        return self._adj.shape[0]

    @property
    def adjacency(self) -> np.ndarray:
        return self._adj

    @property
    def n_edges(self) -> int:
        return int(self._adj.sum()) // 2

    def edges(self) -> list[tuple[int, int]]:
        """Edges as ``(u, v)`` pairs with ``u < v``, in lexicographic order."""
        iu, iv = np.nonzero(np.triu(self._adj, 1))
        return [(int(u), int(v)) for u, v in zip(iu, iv)]

    def has_edge(self, u: int, v: int) -> bool:
        _check_pair(self.n, u, v)
        return bool(self._adj[u, v])

    def degrees(self) -> np.ndarray:
        return self._adj.sum(axis=1, dtype=np.int64)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return np.array_equal(self._adj, other._adj)

    def __hash__(self):
        return hash((self.n, self._adj.tobytes()))

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.n_edges})"


def _check_pair(n: int, u: int, v: int) -> None:
    if not (0 <= u < n and 0 <= v < n):
        raise InputError(f"node pair ({u}, {v}) out of range for n={n}")
    if u == v:
        raise InputError(f"self-loop ({u}, {v}) not allowed")


def from_edge_list(n: int, edges: Iterable[Sequence[int]]) -> Graph:
    """Build a graph from unordered node pairs; duplicates collapse."""
    if n < 1:
        raise InputError(f"node count must be positive, got {n}")
    adj = np.zeros((n, n), dtype=np.uint8)
    for pair in edges:
        u, v = (int(x) for x in pair)
        _check_pair(n, u, v)
        adj[u, v] = adj[v, u] = 1
    return Graph(adj)


def empty_graph(n: int) -> Graph:
    return Graph(np.zeros((n, n), dtype=np.uint8))


def complete_graph(n: int) -> Graph:
    return Graph(1 - np.eye(n, dtype=np.uint8))


def laplacian(g: Graph) -> np.ndarray:
    """Combinatorial Laplacian ``D - A`` as an int64 array (rows sum to exactly 0)."""
    adj = g.adjacency.astype(np.int64)
    lap = -adj
    lap[np.diag_indices(g.n)] = adj.sum(axis=1)
    lap.setflags(write=False)
    return lap


def _same_size(g1: Graph, g2: Graph) -> None:
    if g1.n != g2.n:
        raise DimensionError(f"node counts differ: {g1.n} vs {g2.n}")


def hamming_distance(g1: Graph, g2: Graph) -> int:
    """Number of unordered node pairs whose adjacency differs."""
    _same_size(g1, g2)
    diff = g1.adjacency != g2.adjacency
    return int(np.count_nonzero(np.triu(diff, 1)))


def frobenius_laplacian_distance(g1: Graph, g2: Graph) -> float:
    _same_size(g1, g2)
    delta = laplacian(g1) - laplacian(g2)
    # integer sum of squares keeps the single-edit values exact (sqrt(4) == 2)
    return float(np.sqrt(float(np.sum(delta * delta))))


def remove_edge(g: Graph, u: int, v: int) -> Graph:
    _check_pair(g.n, u, v)
    if not g.adjacency[u, v]:
        raise StateError(f"edge ({u}, {v}) is not present")
    adj = g.adjacency.copy()
    adj[u, v] = adj[v, u] = 0
    return Graph(adj)


def add_edge(g: Graph, u: int, v: int) -> Graph:
    _check_pair(g.n, u, v)
    if g.adjacency[u, v]:
        raise StateError(f"edge ({u}, {v}) already present")
    adj = g.adjacency.copy()
    adj[u, v] = adj[v, u] = 1
    return Graph(adj)


def connected_components(g: Graph) -> list[list[int]]:
    """Components as sorted node lists, ordered by smallest member."""
    seen = np.zeros(g.n, dtype=bool)
    comps = []
    for start in range(g.n):
        if seen[start]:
            continue
        stack = [start]
        seen[start] = True
        comp = []
        while stack:
            u = stack.pop()
            comp.append(u)
            for w in np.flatnonzero(g.adjacency[u]):
                if not seen[w]:
                    seen[w] = True
                    stack.append(int(w))
        comps.append(sorted(comp))
    return comps


def is_connected(g: Graph) -> bool:
    return len(connected_components(g)) == 1
