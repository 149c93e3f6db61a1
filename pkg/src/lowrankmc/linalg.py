"""Dense linear-algebra primitives.

Matrices are plain float64 ``numpy.ndarray``s (row-major); observation masks
are boolean arrays with True marking an observed entry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NumericalError, ParameterError


@dataclass(frozen=True)
class LowRankFactors:
    """A (U, theta, V) triple with Z = U @ diag(theta) @ V.T.

    U is m x q and V is n x q, both column-orthonormal; theta is
    nonincreasing and nonnegative.
    """

    U: np.ndarray
    theta: np.ndarray
    V: np.ndarray

    @property
    def rank(self) -> int:
        return self.theta.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.U * self.theta) @ self.V.T


def _as_matrix(A, name="A") -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise DimensionError(f"{name} must be 2-dimensional, got ndim={A.ndim}")
    return A


def _check_same_shape(A: np.ndarray, mask: np.ndarray) -> None:
    if A.shape != mask.shape:
        raise DimensionError(f"shape mismatch: {A.shape} vs {mask.shape}")


def as_mask(mask) -> np.ndarray:
    mask = np.asarray(mask)
    if mask.ndim != 2:
        raise DimensionError(f"mask must be 2-dimensional, got ndim={mask.ndim}")
    if mask.dtype != np.bool_:
        mask = mask.astype(bool)
    return mask


def project_observed(A, mask) -> np.ndarray:
    """Zero every entry outside the observed set; observed entries pass through.

    Missing entries of A are never read, so they may hold NaN sentinels.
    """
    A = _as_matrix(A)
    mask = as_mask(mask)
    _check_same_shape(A, mask)
    return np.where(mask, A, 0.0)


def project_missing(A, mask) -> np.ndarray:
    """Complement of :func:`project_observed`: keep only the missing entries."""
    A = _as_matrix(A)
    mask = as_mask(mask)
    _check_same_shape(A, mask)
    return np.where(mask, 0.0, A)


def _fix_signs(U: np.ndarray, V: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Per column of U: the largest-|entry| element (first such row on ties)
    # is made nonnegative; V flips with U to preserve the product.
    if U.shape[1] == 0:
        return U, V
    lead = np.argmax(np.abs(U), axis=0)
    signs = np.where(U[lead, np.arange(U.shape[1])] < 0, -1.0, 1.0)
    return U * signs, V * signs


def thin_svd(A, k: int | None = None) -> LowRankFactors:
    """Thin SVD of a dense matrix, optionally truncated to rank k.

    The returned factors give the best rank-k Frobenius approximation; with
    k omitted the full thin factorization is returned. Deterministic sign
    convention: in each column of U the largest-magnitude entry is
    nonnegative (first such row on ties).
    """
    A = _as_matrix(A)
    if not np.all(np.isfinite(A)):
        raise NumericalError("thin_svd requires finite input")
    r = min(A.shape)
    if k is not None:
        if not 1 <= k <= r:
            raise ParameterError(f"rank cap k={k} outside [1, {r}]")
    try:
        U, s, Vt = np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD failed to converge: {exc}") from exc
    if k is not None:
        U, s, Vt = U[:, :k], s[:k], Vt[:k]
    U, V = _fix_signs(U, Vt.T)
    return LowRankFactors(U=U, theta=s, V=V)


def soft_threshold_spectrum(theta, lam: float) -> np.ndarray:
    """Shrink each singular value by lam, clipping at zero."""
    if lam < 0:
        raise ParameterError(f"threshold lambda={lam} must be nonnegative")
    theta = np.asarray(theta, dtype=np.float64)
    return np.maximum(theta - lam, 0.0)


def random_orthonormal(m: int, q: int, rng: np.random.Generator) -> np.ndarray:
    """Draw an m x q frame uniformly from the column-orthonormal matrices.

    QR of a standard-Gaussian matrix with the R diagonal forced positive,
    which makes the law invariant under left rotation.
    """
    if q < 1 or m < 1:
        raise ParameterError(f"need m >= 1 and q >= 1, got m={m}, q={q}")
    if q > m:
        raise ParameterError(f"cannot build {q} orthonormal columns in R^{m}")
    G = rng.standard_normal((m, q))
    Q, R = np.linalg.qr(G)
    signs = np.where(np.diag(R) < 0, -1.0, 1.0)
    return Q * signs
