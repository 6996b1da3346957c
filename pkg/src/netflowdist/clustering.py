"""Clustering graphs from their distance matrices."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .distance import DistanceMatrix
from .errors import DegenerateInputError, InputError, NumericError

MAX_ITER = 300
DEFAULT_RESTARTS = 50


@dataclass(frozen=True)
class SimilarityMatrix:
    labels: tuple
    entries: np.ndarray
    sigma: float
    source_metric: str

    @property
    def size(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class ClusterAssignment:
    labels: np.ndarray
    k: int
    inertia: float = 0.0

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.ndim != 1:
            raise InputError("labels must be one-dimensional")
        if labels.size and (labels.min() < 0 or labels.max() >= self.k):
            raise InputError(f"labels must lie in [0, {self.k})")
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    def __len__(self):
        return self.labels.size


def _off_diagonal(D: np.ndarray) -> np.ndarray:
    return D[~np.eye(D.shape[0], dtype=bool)]


def similarity_matrix(d: DistanceMatrix) -> SimilarityMatrix:
    """Gaussian-type kernel ``exp(-d / sigma)``.

    ``sigma`` is the population standard deviation of the off-diagonal
    distances.
    """
    D = d.entries
    if D.shape[0] < 2:
        raise InputError("need at least two graphs for a similarity matrix")
    if not np.all(np.isfinite(D)):
        raise NumericError("distance matrix has non-finite entries")
    sigma = float(np.std(_off_diagonal(D)))
    if sigma == 0.0:
        raise DegenerateInputError("off-diagonal distances have zero spread; bandwidth undefined")
    S = np.exp(-D / sigma)
    np.fill_diagonal(S, 1.0)
    return SimilarityMatrix(d.labels, S, sigma, d.metric_name)


def replace_diagonal_with_average(d) -> np.ndarray:
    """Copy of the matrix with entry ``(i, i)`` set to the mean of row ``i``'s off-diagonals."""
    D = np.array(d.entries if isinstance(d, DistanceMatrix) else d, dtype=float)
    m = D.shape[0]
    if m < 2:
        raise InputError("need at least a 2x2 matrix")
    offdiag = ~np.eye(m, dtype=bool)
    means = np.array([D[i, offdiag[i]].mean() for i in range(m)])
    D[np.diag_indices(m)] = means
    return D


def _sq_dists(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    diff = X[:, None, :] - C[None, :, :]
    return np.einsum("ikd,ikd->ik", diff, diff)


def _plusplus_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    m = X.shape[0]
    centers = [X[rng.integers(m)]]
    for _ in range(1, k):
        d2 = _sq_dists(X, np.array(centers)).min(axis=1)
        total = d2.sum()
        if total == 0.0:
            idx = rng.integers(m)
        else:
            idx = int(rng.choice(m, p=d2 / total))
        centers.append(X[idx])
    return np.array(centers, dtype=float)


def _lloyd(X: np.ndarray, centers: np.ndarray) -> tuple[np.ndarray, float, list[float]]:
    k = centers.shape[0]
    labels = None
    history = []
    for _ in range(MAX_ITER):
        d2 = _sq_dists(X, centers)
        new = np.argmin(d2, axis=1)
        # empty clusters take the point farthest from its current center
        for c in range(k):
            if not np.any(new == c):
                own = d2[np.arange(len(X)), new]
                counts = np.bincount(new, minlength=k)
                own[counts[new] <= 1] = -1.0
                far = int(np.argmax(own))
                new[far] = c
                d2[far, c] = 0.0
        history.append(float(d2[np.arange(len(X)), new].sum()))
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        centers = np.array([X[labels == c].mean(axis=0) for c in range(k)])
    inertia = float(_sq_dists(X, centers)[np.arange(len(X)), labels].sum())
    return labels, inertia, history


def kmeans(points, k: int, seed: int = 0, restarts: int = DEFAULT_RESTARTS) -> ClusterAssignment:
    """Lloyd's algorithm from k-means++ seeds; keeps the lowest-inertia restart.

    Ties go to the earliest restart. Points may be 1-D (one value per point).
    """
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    m = X.shape[0]
    if not 1 <= k <= m:
        raise InputError(f"k must lie in [1, {m}], got {k}")
    if not np.all(np.isfinite(X)):
        raise NumericError("cannot cluster non-finite values")
    if restarts < 1:
        raise InputError(f"restarts must be >= 1, got {restarts}")
    best = None
    for stream in np.random.SeedSequence(seed).spawn(restarts):
        rng = np.random.Generator(np.random.PCG64(stream))
        labels, inertia, _ = _lloyd(X, _plusplus_init(X, k, rng))
        if best is None or inertia < best[1]:
            best = (labels, inertia)
    return ClusterAssignment(_relabel_by_first_seen(best[0]), k, best[1])


def _relabel_by_first_seen(labels: np.ndarray) -> np.ndarray:
    order = {}
    for x in labels:
        order.setdefault(int(x), len(order))
    return np.array([order[int(x)] for x in labels], dtype=np.int64)


def kmeans_row(d, row: int, k: int = 2, seed: int = 0, restarts: int = DEFAULT_RESTARTS) -> ClusterAssignment:
    """Cluster the graphs by the scalar entries of one row of a distance matrix."""
    D = np.asarray(d.entries if isinstance(d, DistanceMatrix) else d, dtype=float)
    if not 0 <= row < D.shape[0]:
        raise InputError(f"row {row} out of range")
    return kmeans(D[row], k, seed=seed, restarts=restarts)


def canonicalize_signs(V: np.ndarray) -> np.ndarray:
    """Flip each column so its largest-magnitude entry (first on ties) is positive."""
    V = np.array(V, dtype=float)
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def _canonical_basis(V: np.ndarray) -> np.ndarray:
    """Orthonormal basis of span(V) from projecting e_1, e_2, ... in order.

    Depends only on the subspace, not on the basis the eigensolver returned.
    """
    P = V @ V.T
    basis = []
    for i in range(P.shape[0]):
        v = P[:, i].copy()
        for b in basis:
            v -= (b @ v) * b
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            basis.append(v / norm)
        if len(basis) == V.shape[1]:
            break
    return np.column_stack(basis)


def top_eigenvectors(S, k: int, degeneracy_tol: float = 1e-9) -> np.ndarray:
    """Eigenvectors of the ``k`` largest eigenvalues, in a reproducible basis.

    Eigenvalues closer than ``degeneracy_tol`` (relative) form one
    eigenspace, which gets the canonical basis of `_canonical_basis`; then
    every column has its signs canonicalized.
    """
    S = np.asarray(S, dtype=float)
    try:
        w, V = np.linalg.eigh(S)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigensolver failed: {exc}") from exc
    w, V = w[::-1], V[:, ::-1]
    scale = max(1.0, float(np.abs(w).max()))
    groups, start = [], 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i - 1] - w[i] > degeneracy_tol * scale:
            groups.append((start, i))
            start = i
    out = V.copy()
    for lo, hi in groups:
        if lo >= k:
            break
        if hi - lo > 1:
            out[:, lo:hi] = _canonical_basis(V[:, lo:hi])
    return canonicalize_signs(out[:, :k])


def spectral_cluster(s: SimilarityMatrix, k: int = 2, seed: int = 0, restarts: int = DEFAULT_RESTARTS) -> ClusterAssignment:
    """k-means on the rows of the top-``k`` eigenvectors of the similarity matrix itself."""
    m = s.entries.shape[0]
    if not 1 <= k <= m:
        raise InputError(f"k must lie in [1, {m}], got {k}")
    return kmeans(top_eigenvectors(s.entries, k), k, seed=seed, restarts=restarts)


def adjusted_rand_index(a, b) -> float:
    """Chance-corrected pair-counting agreement between two partitions."""
    la = np.asarray(a.labels if isinstance(a, ClusterAssignment) else a)
    lb = np.asarray(b.labels if isinstance(b, ClusterAssignment) else b)
    if la.shape != lb.shape or la.ndim != 1:
        raise InputError("labelings must have equal length")
    n = la.size
    _, ia = np.unique(la, return_inverse=True)
    _, ib = np.unique(lb, return_inverse=True)
    table = np.zeros((ia.max() + 1, ib.max() + 1), dtype=np.int64)
    np.add.at(table, (ia, ib), 1)
    sum_cells = sum(comb(int(x), 2) for x in table.ravel())
    sum_rows = sum(comb(int(x), 2) for x in table.sum(axis=1))
    sum_cols = sum(comb(int(x), 2) for x in table.sum(axis=0))
    total = comb(n, 2)
    if total == 0:
        return 1.0
    expected = sum_rows * sum_cols / total
    max_index = (sum_rows + sum_cols) / 2
    if max_index == expected:
        # both partitions trivial in the same way (all singletons or one block)
        return 1.0 if sum_rows == sum_cols else 0.0
    return float((sum_cells - expected) / (max_index - expected))


def misclassified(labels, truth) -> int:
    """Minimum number of disagreements over all matchings of two 2-cluster labelings."""
    la = np.asarray(labels.labels if isinstance(labels, ClusterAssignment) else labels)
    lt = np.asarray(truth)
    if set(np.unique(la)) - {0, 1} or set(np.unique(lt)) - {0, 1}:
        raise InputError("misclassified() handles two-cluster labelings only")
    direct = int(np.count_nonzero(la != lt))
    return min(direct, la.size - direct)
