"""Flow-based distances between graphs on a common node set.

The network flow distance compares, node by node, how the Laplacian flow
started from every other node's indicator evolves in the two graphs, and
accumulates the total variation in time of the difference. On a time grid
this is the sum over grid steps of the off-diagonal absolute increments of
``exp(-t L1) - exp(-t L2)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionError, InputError
from .graph import Graph, frobenius_laplacian_distance, hamming_distance, is_connected, laplacian
from .spectral import Spectrum, eigendecompose, heat_kernel, heat_kernel_derivatives, heat_kernels

DEFAULT_T_MAX = 40.0
DEFAULT_N_SAMPLES = 1200
METRICS = ("nld", "gdd", "hamming", "frobenius")
FLOW_METRICS = ("nld", "gdd")

# bounds the (steps, n, n) kernel blocks held in memory at once
_CHUNK_ENTRIES = 4_000_000


class DisconnectedGraphWarning(UserWarning):
    """Truncation accuracy depends on the spectral gap, which is zero here."""


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid ``0 = t_0 < t_1 < ... < t_N = t_max`` with ``N = n_samples`` steps."""

    t_max: float
    n_samples: int
    samples: np.ndarray = field(repr=False, compare=False)

    @property
    def step(self) -> float:
        return self.t_max / self.n_samples


def make_time_grid(t_max: float = DEFAULT_T_MAX, n_samples: int = DEFAULT_N_SAMPLES) -> TimeGrid:
    if not t_max > 0 or not math.isfinite(t_max):
        raise InputError(f"t_max must be positive, got {t_max}")
    if int(n_samples) != n_samples or n_samples < 2:
        raise InputError(f"n_samples must be an integer >= 2, got {n_samples}")
    n_samples = int(n_samples)
    samples = np.arange(n_samples + 1, dtype=float) * (t_max / n_samples)
    samples[-1] = t_max
    samples.setflags(write=False)
    return TimeGrid(float(t_max), n_samples, samples)


@dataclass(frozen=True)
class DistanceResult:
    total: float
    per_node: np.ndarray
    grid: TimeGrid


@dataclass(frozen=True)
class DistanceMatrix:
    labels: tuple
    entries: np.ndarray
    metric_name: str

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        m = len(self.labels)
        if entries.shape != (m, m):
            raise DimensionError(f"matrix shape {entries.shape} does not match {m} labels")
        if len(set(self.labels)) != m:
            raise InputError("labels must be unique")
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "entries", entries)

    @property
    def size(self) -> int:
        return len(self.labels)


def _check_pair(s1: Spectrum, s2: Spectrum) -> None:
    if s1.n != s2.n:
        raise DimensionError(f"node counts differ: {s1.n} vs {s2.n}")


def kernel_difference(s1: Spectrum, s2: Spectrum, t: float) -> np.ndarray:
    _check_pair(s1, s2)
    return heat_kernel(s1, t) - heat_kernel(s2, t)


def off_diagonal_abs_sum(M) -> float:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InputError(f"expected a square matrix, got shape {M.shape}")
    absM = np.abs(M)
    return float(absM.sum() - np.trace(absM))


def _chunks(n_points: int, n: int):
    size = max(2, _CHUNK_ENTRIES // max(1, n * n))
    start = 0
    while start < n_points - 1:
        stop = min(n_points, start + size)
        yield start, stop
        start = stop - 1


def _nld_per_node(s1: Spectrum, s2: Spectrum, times: np.ndarray) -> np.ndarray:
    n = s1.n
    per_node = np.zeros(n)
    offdiag = ~np.eye(n, dtype=bool)
    for start, stop in _chunks(len(times), n):
        ts = times[start:stop]
        diff = heat_kernels(s1, ts) - heat_kernels(s2, ts)
        steps = np.abs(np.diff(diff, axis=0)) * offdiag
        per_node += steps.sum(axis=(0, 2))
    return per_node


def _warn_if_disconnected(*graphs: Graph) -> None:
    if not all(is_connected(g) for g in graphs):
        warnings.warn(
            "disconnected graph: truncation error decays only with the smallest nonzero eigenvalue",
            DisconnectedGraphWarning,
            stacklevel=3,
        )


def nld_distance(g1: Graph, g2: Graph, grid: TimeGrid | None = None) -> DistanceResult:
    """Network flow distance on a time grid.

    ``per_node[i]`` is the total variation over the grid of row ``i`` of the
    kernel difference, excluding the diagonal; ``total`` is their sum.
    """
    if g1.n != g2.n:
        raise DimensionError(f"node counts differ: {g1.n} vs {g2.n}")
    grid = grid or make_time_grid()
    _warn_if_disconnected(g1, g2)
    s1 = eigendecompose(laplacian(g1))
    s2 = eigendecompose(laplacian(g2))
    return nld_from_spectra(s1, s2, grid)


def nld_from_spectra(s1: Spectrum, s2: Spectrum, grid: TimeGrid) -> DistanceResult:
    _check_pair(s1, s2)
    per_node = _nld_per_node(s1, s2, grid.samples)
    per_node.setflags(write=False)
    return DistanceResult(float(per_node.sum()), per_node, grid)


def nld_distance_oracle(
    g1: Graph,
    g2: Graph,
    t_max: float = DEFAULT_T_MAX,
    refinement: int = 10,
    base_samples: int = DEFAULT_N_SAMPLES,
) -> float:
    """Quadrature of ``sum_{i != j} |d/dt (exp(-tL1) - exp(-tL2))_ij|`` over ``[0, t_max]``.

    Uses the exact derivative ``-L exp(-tL)`` and composite Simpson's rule
    on ``refinement * base_samples`` intervals.
    """
    if g1.n != g2.n:
        raise DimensionError(f"node counts differ: {g1.n} vs {g2.n}")
    if not t_max > 0:
        raise InputError(f"t_max must be positive, got {t_max}")
    if refinement < 1:
        raise InputError(f"refinement must be >= 1, got {refinement}")
    intervals = int(refinement) * int(base_samples)
    intervals += intervals % 2
    s1 = eigendecompose(laplacian(g1))
    s2 = eigendecompose(laplacian(g2))
    times = np.linspace(0.0, t_max, intervals + 1)
    weights = np.ones(intervals + 1)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    weights *= (t_max / intervals) / 3.0

    n = g1.n
    offdiag = ~np.eye(n, dtype=bool)
    total = 0.0
    size = max(1, _CHUNK_ENTRIES // (n * n))
    for start in range(0, len(times), size):
        ts = times[start:start + size]
        rate = heat_kernel_derivatives(s1, ts) - heat_kernel_derivatives(s2, ts)
        integrand = (np.abs(rate) * offdiag).sum(axis=(1, 2))
        total += float(integrand @ weights[start:start + size])
    return total


def gdd_distance(g1: Graph, g2: Graph, grid: TimeGrid | None = None, return_time: bool = False):
    """Maximum over grid times of ``||exp(-tL1) - exp(-tL2)||_F``.

    With ``return_time=True`` returns ``(value, t_argmax)``.
    """
    if g1.n != g2.n:
        raise DimensionError(f"node counts differ: {g1.n} vs {g2.n}")
    grid = grid or make_time_grid()
    s1 = eigendecompose(laplacian(g1))
    s2 = eigendecompose(laplacian(g2))
    value, t_best = gdd_from_spectra(s1, s2, grid)
    return (value, t_best) if return_time else value


def _frobenius_trace(s1: Spectrum, s2: Spectrum, times: np.ndarray) -> np.ndarray:
    norms = np.empty(len(times))
    size = max(1, _CHUNK_ENTRIES // (s1.n * s1.n))
    for start in range(0, len(times), size):
        ts = times[start:start + size]
        diff = heat_kernels(s1, ts) - heat_kernels(s2, ts)
        norms[start:start + size] = np.sqrt((diff * diff).sum(axis=(1, 2)))
    return norms


def gdd_from_spectra(s1: Spectrum, s2: Spectrum, grid: TimeGrid) -> tuple[float, float]:
    _check_pair(s1, s2)
    norms = _frobenius_trace(s1, s2, grid.samples)
    k = int(np.argmax(norms))
    return float(norms[k]), float(grid.samples[k])


def suggest_t_max(g1: Graph, g2: Graph, precision: float = 1e-6) -> float:
    """Smallest ``t_max`` with ``exp(-lam2 * t_max) < precision``.

    ``lam2`` is the smaller Fiedler value of the pair; ``inf`` when either
    graph is disconnected. Diagnostic only.
    """
    if not 0 < precision < 1:
        raise InputError(f"precision must lie in (0, 1), got {precision}")
    lam = min(
        eigendecompose(laplacian(g1)).fiedler_value(),
        eigendecompose(laplacian(g2)).fiedler_value(),
    )
    if lam <= 0:
        return math.inf
    return -math.log(precision) / lam


class _KernelCache:
    """Per-graph heat-kernel stacks on a shared grid, computed once."""

    def __init__(self, graphs: Sequence[Graph], grid: TimeGrid):
        self.spectra = [eigendecompose(laplacian(g)) for g in graphs]
        n = graphs[0].n
        self.in_memory = len(graphs) * len(grid.samples) * n * n <= 8 * _CHUNK_ENTRIES
        self.grid = grid
        self.kernels = [heat_kernels(s, grid.samples) for s in self.spectra] if self.in_memory else None

    def nld(self, i: int, j: int) -> float:
        if not self.in_memory:
            return nld_from_spectra(self.spectra[i], self.spectra[j], self.grid).total
        diff = self.kernels[i] - self.kernels[j]
        steps = np.abs(np.diff(diff, axis=0))
        n = steps.shape[1]
        steps[:, np.arange(n), np.arange(n)] = 0.0
        return float(steps.sum(axis=(0, 2)).sum())

    def gdd(self, i: int, j: int) -> float:
        if not self.in_memory:
            return gdd_from_spectra(self.spectra[i], self.spectra[j], self.grid)[0]
        diff = self.kernels[i] - self.kernels[j]
        return float(np.sqrt((diff * diff).sum(axis=(1, 2))).max())


def pairwise_distance_matrix(
    graphs: Sequence[Graph],
    metric: str,
    grid: TimeGrid | None = None,
    labels: Sequence[str] | None = None,
) -> DistanceMatrix:
    """All pairwise distances under one of ``nld``, ``gdd``, ``hamming``, ``frobenius``.

    Each graph is eigendecomposed once. Pairs are filled in a fixed order so
    the result does not depend on evaluation order.
    """
    if metric not in METRICS:
        raise InputError(f"unknown metric {metric!r}; choose from {', '.join(METRICS)}")
    graphs = list(graphs)
    if not graphs:
        raise InputError("need at least one graph")
    if len({g.n for g in graphs}) != 1:
        raise DimensionError("all graphs must share the same node count")
    if metric in FLOW_METRICS and grid is None:
        raise InputError(f"metric {metric!r} needs a time grid")
    m = len(graphs)
    labels = list(labels) if labels is not None else [f"G{k + 1}" for k in range(m)]
    if len(labels) != m:
        raise InputError("one label per graph required")

    if metric == "hamming":
        pair = lambda i, j: float(hamming_distance(graphs[i], graphs[j]))  # noqa: E731
    elif metric == "frobenius":
        pair = lambda i, j: frobenius_laplacian_distance(graphs[i], graphs[j])  # noqa: E731
    else:
        _warn_if_disconnected(*graphs)
        cache = _KernelCache(graphs, grid)
        pair = cache.nld if metric == "nld" else cache.gdd

    D = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            D[i, j] = D[j, i] = pair(i, j)
    return DistanceMatrix(tuple(labels), D, metric)
