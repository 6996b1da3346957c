"""Seeded stochastic block model draws and the experiment scenarios.

All randomness comes from numpy's PCG64 bit generator keyed by a
``SeedSequence``; scenario graphs draw from spawned child sequences, so a
bundle is a pure function of its seed and its graphs are assembled in index
order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InputError, ScenarioError, StateError
from .graph import Graph, add_edge, connected_components, is_connected, remove_edge


@dataclass(frozen=True)
class SbmParams:
    block_sizes: tuple
    link_probs: np.ndarray

    def __post_init__(self):
        sizes = tuple(int(b) for b in self.block_sizes)
        if not sizes or any(b < 1 for b in sizes):
            raise InputError("block sizes must be a nonempty list of positive integers")
        P = np.array(self.link_probs, dtype=float)
        if P.shape != (len(sizes), len(sizes)):
            raise InputError(f"link_probs must be {len(sizes)}x{len(sizes)}, got {P.shape}")
        if np.any(P < 0) or np.any(P > 1):
            raise InputError("link probabilities must lie in [0, 1]")
        if not np.array_equal(P, P.T):
            raise InputError("link_probs must be symmetric")
        P.setflags(write=False)
        object.__setattr__(self, "block_sizes", sizes)
        object.__setattr__(self, "link_probs", P)

    @property
    def n(self) -> int:
        return sum(self.block_sizes)

    def block_of(self) -> np.ndarray:
        return np.repeat(np.arange(len(self.block_sizes)), self.block_sizes)


def two_block_params(p11: float, p22: float, p12: float, size: int = 10) -> SbmParams:
    return SbmParams((size, size), [[p11, p12], [p12, p22]])


BRIDGE_PARAMS = two_block_params(0.75, 0.6, 0.04)


@dataclass(frozen=True)
class ScenarioBundle:
    graphs: tuple
    labels: tuple
    ground_truth: tuple
    block_sizes: tuple = (10, 10)

    def __post_init__(self):
        graphs = tuple(self.graphs)
        labels = tuple(str(x) for x in self.labels)
        truth = tuple(int(x) for x in self.ground_truth)
        if not graphs:
            raise InputError("bundle needs at least one graph")
        if len({g.n for g in graphs}) != 1:
            raise InputError("bundle graphs must share node count")
        if len(set(labels)) != len(labels) or len(labels) != len(graphs):
            raise InputError("need one unique label per graph")
        if len(truth) != len(graphs):
            raise InputError("ground_truth length must match graph count")
        object.__setattr__(self, "graphs", graphs)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "ground_truth", truth)
        object.__setattr__(self, "block_sizes", tuple(int(b) for b in self.block_sizes))

    def __len__(self):
        return len(self.graphs)


def _rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _sample_with(params: SbmParams, rng: np.random.Generator) -> Graph:
    n = params.n
    blocks = params.block_of()
    iu, iv = np.triu_indices(n, 1)  # row-major over the upper triangle
    u = rng.random(iu.size)
    present = u < params.link_probs[blocks[iu], blocks[iv]]
    adj = np.zeros((n, n), dtype=np.uint8)
    adj[iu[present], iv[present]] = 1
    adj[iv[present], iu[present]] = 1
    return Graph(adj)


def sample_sbm(params: SbmParams, seed) -> Graph:
    """One SBM draw: a uniform variate per node pair, edge iff it falls below the block probability."""
    return _sample_with(params, _rng(seed))


def _children(seed, count: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(seed).spawn(count)


def inter_block_edges(g: Graph, block_sizes: Sequence[int]) -> list[tuple[int, int]]:
    blocks = np.repeat(np.arange(len(block_sizes)), block_sizes)
    return [(u, v) for u, v in g.edges() if blocks[u] != blocks[v]]


def _non_cut_intra_edges(g: Graph, block_sizes: Sequence[int]) -> list[tuple[int, int]]:
    """Intra-block edges whose removal keeps the block's induced subgraph as connected as before."""
    blocks = np.repeat(np.arange(len(block_sizes)), block_sizes)
    keep = []
    for u, v in g.edges():
        if blocks[u] != blocks[v]:
            continue
        members = np.flatnonzero(blocks == blocks[u])
        sub = Graph(g.adjacency[np.ix_(members, members)])
        before = len(connected_components(sub))
        iu, iv = int(np.searchsorted(members, u)), int(np.searchsorted(members, v))
        after = len(connected_components(remove_edge(sub, iu, iv)))
        if after == before:
            keep.append((u, v))
    return keep


def _disjoint_edits(g: Graph, block_sizes: Sequence[int], count: int = 4):
    """Both bridges plus the first ``count`` usable intra-block edges, all vertex-disjoint.

    Returns ``None`` when the parent cannot supply them. Disjointness keeps
    every pair of one-edge edits at Laplacian distance exactly 2*sqrt(2).
    """
    bridges = inter_block_edges(g, block_sizes)
    if len(bridges) != 2 or set(bridges[0]) & set(bridges[1]):
        return None
    used = set(bridges[0]) | set(bridges[1])
    chosen = []
    for u, v in _non_cut_intra_edges(g, block_sizes):
        if u in used or v in used:
            continue
        chosen.append((u, v))
        used.update((u, v))
        if len(chosen) == count:
            return bridges, chosen
    return None


def bridge_deletion_scenario(
    params: SbmParams = BRIDGE_PARAMS,
    seed: int = 0,
    max_attempts: int = 10_000,
) -> ScenarioBundle:
    """Parent with exactly two bridges plus six one-edge deletions.

    The parent is redrawn until it is connected and has exactly two
    vertex-disjoint bridges. G2 and G6 each lose one bridge; G3, G4, G5 and
    G7 each lose one of the lexicographically first intra-block edges that
    are not cut edges of their block and share no node with an earlier
    pick. Ground truth marks {G2, G6} as cluster 1.
    """
    if len(params.block_sizes) != 2:
        raise InputError("bridge deletion needs exactly two blocks")
    streams = np.random.SeedSequence(seed)
    for _ in range(max_attempts):
        g = _sample_with(params, _rng(streams.spawn(1)[0]))
        if len(inter_block_edges(g, params.block_sizes)) != 2 or not is_connected(g):
            continue
        edits = _disjoint_edits(g, params.block_sizes)
        if edits is not None:
            parent = g
            break
    else:
        raise ScenarioError(f"no usable parent with exactly 2 bridges after {max_attempts} draws (seed {seed})")

    (b1, b2), w = edits
    removals = [b1, w[0], w[1], w[2], b2, w[3]]
    graphs = [parent] + [remove_edge(parent, *e) for e in removals]
    labels = [f"G{k + 1}" for k in range(7)]
    truth = [0, 1, 0, 0, 0, 1, 0]
    return ScenarioBundle(graphs, labels, truth, params.block_sizes)


def add_bridges_variant(bundle: ScenarioBundle, new_bridges: Sequence[Sequence[int]]) -> ScenarioBundle:
    """Add the same cross-block edges to every graph of a bundle."""
    blocks = np.repeat(np.arange(len(bundle.block_sizes)), bundle.block_sizes)
    pairs = [tuple(int(x) for x in p) for p in new_bridges]
    for u, v in pairs:
        if blocks[u] == blocks[v]:
            raise InputError(f"({u}, {v}) does not cross blocks")
        for label, g in zip(bundle.labels, bundle.graphs):
            if g.has_edge(u, v):
                raise StateError(f"edge ({u}, {v}) already present in {label}")
    graphs = []
    for g in bundle.graphs:
        for u, v in pairs:
            g = add_edge(g, u, v)
        graphs.append(g)
    return ScenarioBundle(graphs, bundle.labels, bundle.ground_truth, bundle.block_sizes)


def absent_bridges(bundle: ScenarioBundle, count: int) -> list[tuple[int, int]]:
    """First ``count`` pairs ``(k, size + k)`` absent from every graph of a two-block bundle."""
    size = bundle.block_sizes[0]
    found = []
    for k in range(min(bundle.block_sizes)):
        pair = (k, size + k)
        if not any(g.has_edge(*pair) for g in bundle.graphs):
            found.append(pair)
        if len(found) == count:
            return found
    raise ScenarioError(f"fewer than {count} free bridge slots")


def fixed_bridge_scenario(p: float = 0.8, seed: int = 0, n_bridges=(5, 10), per_group: int = 10) -> ScenarioBundle:
    """Random within-block edges around fixed bridge sets, one set per group.

    Bridge ``k`` joins node ``k`` of block 1 to node ``k`` of block 2.
    """
    if not 0 <= p <= 1:
        raise InputError(f"p must lie in [0, 1], got {p}")
    size = 10
    if max(n_bridges) > size:
        raise InputError(f"at most {size} bridges fit the fixed pattern")
    params = two_block_params(p, p, 0.0, size)
    streams = _children(seed, per_group * len(n_bridges))
    graphs, truth = [], []
    for group, nb in enumerate(n_bridges):
        for r in range(per_group):
            g = _sample_with(params, _rng(streams[group * per_group + r]))
            adj = g.adjacency.copy()
            for k in range(nb):
                adj[k, size + k] = adj[size + k, k] = 1
            graphs.append(Graph(adj))
            truth.append(group)
    labels = [f"G{k + 1}" for k in range(len(graphs))]
    return ScenarioBundle(graphs, labels, truth, (size, size))


def two_sbm_scenario(seed: int = 0, p_in: float = 0.8, p_out: float = 0.05, per_group: int = 10) -> ScenarioBundle:
    """Two groups of SBM draws; the second doubles the between-block probability."""
    groups = [two_block_params(p_in, p_in, p_out), two_block_params(p_in, p_in, 2 * p_out)]
    streams = _children(seed, per_group * len(groups))
    graphs, truth = [], []
    for gi, params in enumerate(groups):
        for r in range(per_group):
            graphs.append(_sample_with(params, _rng(streams[gi * per_group + r])))
            truth.append(gi)
    labels = [f"G{k + 1}" for k in range(len(graphs))]
    return ScenarioBundle(graphs, labels, truth, (10, 10))
