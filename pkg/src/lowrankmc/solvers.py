"""Completion estimators.

* :func:`soft_impute` — proximal iteration for the nuclear-norm-penalized
  least-squares problem: each step soft-thresholds the singular values of the
  observed entries filled in with the current iterate.
* :func:`hard_impute` — alternating fill-and-truncate for the rank-constrained
  problem ("missing value SVD"); local optimum only, monotone by construction.
* :func:`select_lambda` — holdout selection of the penalty along a warm-started
  geometric grid.

Missing entries of the input Y may contain arbitrary sentinel values (NaN
included); every read goes through the observed projection.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, NumericalError, ParameterError
from .linalg import (
    LowRankFactors,
    _as_matrix,
    as_mask,
    project_observed,
    soft_threshold_spectrum,
    thin_svd,
)


class InitStrategy(enum.Enum):
    ZERO_FILL = "zero"
    COLMEAN_FILL = "colmean"


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-5
    max_iters: int = 500
    init: InitStrategy = InitStrategy.ZERO_FILL

    def __post_init__(self):
        if self.tol <= 0:
            raise ParameterError(f"tol={self.tol} must be positive")
        if self.max_iters < 1:
            raise ParameterError(f"max_iters={self.max_iters} must be >= 1")


@dataclass(frozen=True)
class SolveResult:
    """Final iterate with its factors and per-iteration objective trace.

    For soft_impute the trace records 0.5*||P_obs(Y - Z)||_F^2 + lam*||Z||_*,
    the Lyapunov function the proximal step descends; for hard_impute it is
    the plain squared error on the observed entries.
    """

    Z_hat: np.ndarray
    factors: LowRankFactors
    n_iters: int
    converged: bool
    objective_trace: np.ndarray
    lambda_or_rank: float


def _validated_inputs(Y, mask):
    Y = _as_matrix(Y, "Y")
    mask = as_mask(mask)
    if Y.shape != mask.shape:
        raise DimensionError(f"shape mismatch: Y {Y.shape} vs mask {mask.shape}")
    n_obs = int(mask.sum())
    if n_obs < 1:
        raise ParameterError("mask has no observed entries")
    Yobs = np.where(mask, Y, 0.0)
    if not np.all(np.isfinite(Yobs)):
        raise NumericalError("observed entries of Y must be finite")
    return Yobs, mask, n_obs


def _init_iterate(Yobs, mask, init: InitStrategy) -> np.ndarray:
    if init is InitStrategy.ZERO_FILL:
        return np.zeros_like(Yobs)
    n_obs_col = mask.sum(axis=0)
    with np.errstate(invalid="ignore"):
        col_means = np.where(n_obs_col > 0, Yobs.sum(axis=0) / np.maximum(n_obs_col, 1), 0.0)
    return np.where(mask, Yobs, col_means[np.newaxis, :])


def _rel_change(Z_new, Z_old) -> float:
    denom = max(float(np.linalg.norm(Z_old)), 1e-12)
    return float(np.linalg.norm(Z_new - Z_old)) / denom


def _soft_step(Yobs, mask, Z, lam):
    """One proximal step; returns (Z_new, truncated factors)."""
    X = Yobs + np.where(mask, 0.0, Z)
    f = thin_svd(X)
    theta = soft_threshold_spectrum(f.theta, lam)
    nnz = int(np.count_nonzero(theta))
    U, theta, V = f.U[:, :nnz], theta[:nnz], f.V[:, :nnz]
    Z_new = (U * theta) @ V.T
    return Z_new, LowRankFactors(U, theta, V)


def soft_impute(Y, mask, lam: float, cfg: SolverConfig | None = None,
                *, warm_start: np.ndarray | None = None) -> SolveResult:
    """Nuclear-norm-penalized completion by iterative spectral soft-thresholding.

    Iterates Z <- SVD-soft-threshold_lam(P_obs(Y) + P_miss(Z)) until the
    relative Frobenius change drops below cfg.tol or max_iters is reached.
    """
    cfg = cfg or SolverConfig()
    if lam < 0:
        raise ParameterError(f"lambda={lam} must be nonnegative")
    Yobs, mask, _ = _validated_inputs(Y, mask)
    if warm_start is not None:
        Z = np.array(warm_start, dtype=np.float64, copy=True)
        if Z.shape != Yobs.shape:
            raise DimensionError("warm_start shape does not match Y")
    else:
        Z = _init_iterate(Yobs, mask, cfg.init)

    def objective(Zc, nuclear):
        resid = Yobs - np.where(mask, Zc, 0.0)
        return 0.5 * float(np.sum(resid * resid)) + lam * nuclear

    nuc0 = 0.0 if not Z.any() else float(np.linalg.svd(Z, compute_uv=False).sum())
    trace = [objective(Z, nuc0)]
    factors = None
    converged = False
    n_iters = 0
    for _ in range(cfg.max_iters):
        Z_new, factors = _soft_step(Yobs, mask, Z, lam)
        n_iters += 1
        trace.append(objective(Z_new, float(factors.theta.sum())))
        rel = _rel_change(Z_new, Z)
        Z = Z_new
        if rel <= cfg.tol:
            converged = True
            break
    if factors is None:  # max_iters >= 1, never reached
        factors = thin_svd(Z) if Z.any() else LowRankFactors(
            np.zeros((Z.shape[0], 0)), np.zeros(0), np.zeros((Z.shape[1], 0)))
    return SolveResult(Z_hat=Z, factors=factors, n_iters=n_iters,
                       converged=converged, objective_trace=np.asarray(trace),
                       lambda_or_rank=float(lam))


def _hard_step(Yobs, mask, Z, q):
    X = Yobs + np.where(mask, 0.0, Z)
    f = thin_svd(X, k=q)
    return f.reconstruct(), f


def hard_impute(Y, mask, q: int, cfg: SolverConfig | None = None,
                *, warm_start: np.ndarray | None = None) -> SolveResult:
    """Rank-constrained completion by alternating fill and rank-q truncation."""
    cfg = cfg or SolverConfig()
    Yobs, mask, n_obs = _validated_inputs(Y, mask)
    m, n = Yobs.shape
    if not 1 <= q <= min(m, n):
        raise ParameterError(f"rank q={q} outside [1, {min(m, n)}]")
    dof = q * (m + n - q)
    if n_obs < dof:
        warnings.warn(
            f"only {n_obs} observed entries for {dof} rank-{q} degrees of freedom; "
            "the fit is underdetermined", stacklevel=2)
    if warm_start is not None:
        Z = np.array(warm_start, dtype=np.float64, copy=True)
        if Z.shape != Yobs.shape:
            raise DimensionError("warm_start shape does not match Y")
    else:
        Z = _init_iterate(Yobs, mask, cfg.init)

    def objective(Zc):
        resid = Yobs - np.where(mask, Zc, 0.0)
        return float(np.sum(resid * resid))

    trace = [objective(Z)]
    factors = None
    converged = False
    n_iters = 0
    for _ in range(cfg.max_iters):
        Z_new, factors = _hard_step(Yobs, mask, Z, q)
        n_iters += 1
        trace.append(objective(Z_new))
        rel = _rel_change(Z_new, Z)
        Z = Z_new
        if rel <= cfg.tol:
            converged = True
            break
    return SolveResult(Z_hat=Z, factors=factors, n_iters=n_iters,
                       converged=converged, objective_trace=np.asarray(trace),
                       lambda_or_rank=float(q))


def objective_value(Y, mask, Z, lam: float) -> float:
    """Penalized objective ||P_obs(Y) - P_obs(Z)||_F^2 + lam * ||Z||_*.

    With lam = 0 this is the rank-constrained problem's objective for any Z.
    """
    Y = _as_matrix(Y, "Y")
    Z = _as_matrix(Z, "Z")
    mask = as_mask(mask)
    if Y.shape != mask.shape or Z.shape != Y.shape:
        raise DimensionError(
            f"shape mismatch: Y {Y.shape}, Z {Z.shape}, mask {mask.shape}")
    if lam < 0:
        raise ParameterError(f"lambda={lam} must be nonnegative")
    resid = project_observed(Y, mask) - np.where(mask, Z, 0.0)
    val = float(np.sum(resid * resid))
    if lam > 0:
        val += lam * float(np.linalg.svd(Z, compute_uv=False).sum())
    return val


def stationarity_residual(Y, mask, Z, lam: float) -> float:
    """Relative distance of Z from one proximal step applied to itself.

    Zero exactly when Z is a stationary point of the penalized problem
    0.5*||P_obs(Y - Z)||_F^2 + lam*||Z||_* (prox fixed-point characterization).
    """
    Yobs, mask, _ = _validated_inputs(Y, mask)
    Z = _as_matrix(Z, "Z")
    if Z.shape != Yobs.shape:
        raise DimensionError("Z shape does not match Y")
    Z_next, _ = _soft_step(Yobs, mask, Z, lam)
    return float(np.linalg.norm(Z - Z_next)) / max(1.0, float(np.linalg.norm(Z)))


@dataclass(frozen=True)
class LambdaPath:
    """Diagnostics from holdout lambda selection.

    holdout_sse is NaN for grid points skipped by the early-rise cutoff.
    """

    lambdas: np.ndarray
    holdout_sse: np.ndarray
    best_index: int
    result: SolveResult = field(repr=False)


def select_lambda(Y, mask, grid_size: int = 20, holdout_frac: float = 0.1,
                  cfg: SolverConfig | None = None,
                  rng: np.random.Generator | None = None) -> tuple[float, LambdaPath]:
    """Pick the penalty by held-out squared error along a warm-started grid.

    Hides holdout_frac of the observed entries uniformly at random, fits
    soft_impute down a geometric grid from sigma_max(P_obs(Y)) to 1e-4 of it,
    picks the lambda with the smallest holdout error (largest lambda on ties),
    then refits on all observed entries. Grid fits run at a loosened tolerance
    (10x cfg.tol) since they only need to rank the candidates; the descent is
    cut short once the holdout error has risen on several consecutive grid
    points past the minimum, and the final refit uses cfg as given.
    """
    cfg = cfg or SolverConfig()
    if rng is None:
        rng = np.random.default_rng()
    if not 0.0 < holdout_frac <= 0.5:
        raise ParameterError(f"holdout_frac={holdout_frac} outside (0, 0.5]")
    if grid_size < 1:
        raise ParameterError(f"grid_size={grid_size} must be >= 1")
    Yobs, mask, n_obs = _validated_inputs(Y, mask)
    if n_obs < 2:
        raise ParameterError("need at least 2 observed entries")

    obs_flat = np.flatnonzero(mask.ravel())
    n_hold = max(1, int(round(holdout_frac * n_obs)))
    hold_flat = rng.choice(obs_flat, size=n_hold, replace=False)
    train_mask = mask.copy()
    train_mask.ravel()[hold_flat] = False
    hold_mask = np.zeros_like(mask)
    hold_mask.ravel()[hold_flat] = True

    smax = float(np.linalg.norm(np.where(train_mask, Yobs, 0.0), 2))
    if smax <= 0:
        raise ParameterError("training entries are all zero; no scale for the grid")
    grid = np.geomspace(smax, 1e-4 * smax, grid_size)

    # Selection fits only rank the candidates, so they run looser and
    # shorter than the final refit; warm starts down the grid make this a
    # continuation scheme rather than independent truncated solves.
    fit_cfg = SolverConfig(tol=10.0 * cfg.tol, max_iters=min(50, cfg.max_iters),
                           init=cfg.init)
    sse = np.full(grid_size, np.nan)
    Z_warm = None
    best_idx = 0
    best_warm = None
    rises = 0
    for i, lam in enumerate(grid):
        res = soft_impute(Yobs, train_mask, lam, fit_cfg, warm_start=Z_warm)
        Z_warm = res.Z_hat
        diff = np.where(hold_mask, Yobs - res.Z_hat, 0.0)
        sse[i] = float(np.sum(diff * diff))
        if i == 0 or sse[i] < sse[best_idx]:
            best_idx = i
            best_warm = res.Z_hat
            rises = 0
        else:
            rises += 1
            if rises >= 3:
                break
    lam_star = float(grid[best_idx])
    final = soft_impute(Yobs, mask, lam_star, cfg, warm_start=best_warm)
    return lam_star, LambdaPath(lambdas=grid, holdout_sse=sse,
                                best_index=best_idx, result=final)
