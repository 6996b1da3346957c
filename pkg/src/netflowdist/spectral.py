"""Laplacian spectra and heat kernels ``exp(-tL)``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericError

EIG_ZERO_TOL = 1e-10


@dataclass(frozen=True)
class Spectrum:
    """Eigenpairs of a symmetric matrix; column ``k`` of `eigenvectors` pairs with ``eigenvalues[k]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.T

    def fiedler_value(self) -> float:
        """Smallest eigenvalue above the zero tolerance, or 0.0 if none."""
        positive = self.eigenvalues[self.eigenvalues > EIG_ZERO_TOL]
        return float(positive[0]) if positive.size else 0.0


def eigendecompose(L, *, laplacian: bool = True) -> Spectrum:
    """Symmetric eigendecomposition with ascending eigenvalues.

    With ``laplacian=True`` eigenvalues within ``EIG_ZERO_TOL`` of zero (and
    any tiny negative ones) are snapped to exactly 0, so ``exp(-t*lam)``
    cannot grow for large ``t``.
    """
    M = np.asarray(L, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InputError(f"expected a square matrix, got shape {M.shape}")
    if not np.allclose(M, M.T, rtol=0.0, atol=1e-12):
        raise InputError("matrix is not symmetric")
    try:
        w, V = np.linalg.eigh(M)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigensolver failed: {exc}") from exc
    if laplacian:
        if w.size and w[0] < -EIG_ZERO_TOL * max(1.0, abs(w[-1])):
            raise NumericError(f"Laplacian has negative eigenvalue {w[0]:.3e}")
        w = np.where(w < EIG_ZERO_TOL, 0.0, w)
    w.setflags(write=False)
    V.setflags(write=False)
    return Spectrum(w, V)


def heat_kernel(s: Spectrum, t: float) -> np.ndarray:
    """``exp(-tL)`` from the spectrum; column ``j`` is the flow started at node ``j``."""
    if t < 0:
        raise InputError(f"time must be nonnegative, got {t}")
    V = s.eigenvectors
    K = (V * np.exp(-t * s.eigenvalues)) @ V.T
    return 0.5 * (K + K.T)


def heat_kernels(s: Spectrum, times) -> np.ndarray:
    """Stack of heat kernels, shape ``(len(times), n, n)``."""
    times = np.asarray(times, dtype=float)
    if np.any(times < 0):
        raise InputError("times must be nonnegative")
    V = s.eigenvectors
    decay = np.exp(-np.outer(times, s.eigenvalues))
    K = np.einsum("ik,tk,jk->tij", V, decay, V, optimize=True)
    return 0.5 * (K + np.swapaxes(K, 1, 2))


def heat_kernel_derivatives(s: Spectrum, times) -> np.ndarray:
    """Stack of ``d/dt exp(-tL) = -L exp(-tL)``, shape ``(len(times), n, n)``."""
    times = np.asarray(times, dtype=float)
    V = s.eigenvectors
    rate = -s.eigenvalues * np.exp(-np.outer(times, s.eigenvalues))
    D = np.einsum("ik,tk,jk->tij", V, rate, V, optimize=True)
    return 0.5 * (D + np.swapaxes(D, 1, 2))


def heat_kernel_series_oracle(L, t: float, tol: float = 1e-13) -> np.ndarray:
    """``exp(-tL)`` by scaling and squaring a truncated Taylor series.

    Independent of any eigensolver. The step matrix ``-tL / 2**s`` has
    infinity norm at most 1/2; its series stops once the next term's
    max-abs entry drops below ``tol / 2**s``, which keeps the error after
    ``s`` squarings at the order of ``tol``.
    """
    if t < 0:
        raise InputError(f"time must be nonnegative, got {t}")
    if tol <= 0:
        raise InputError(f"tol must be positive, got {tol}")
    M = -float(t) * np.asarray(L, dtype=float)
    n = M.shape[0]
    norm = np.abs(M).sum(axis=1).max() if n else 0.0
    squarings = 0
    while norm > 0.5:
        norm /= 2.0
        squarings += 1
    M = M / 2.0**squarings
    step_tol = tol / 2.0**squarings

    result = np.eye(n)
    term = np.eye(n)
    k = 1
    while True:
        term = term @ M / k
        result = result + term
        if np.abs(term).max() < step_tol:
            break
        k += 1
    for _ in range(squarings):
        result = result @ result
    return 0.5 * (result + result.T)
