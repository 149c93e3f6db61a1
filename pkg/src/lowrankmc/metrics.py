"""Relative-error metric, Welch's t-test, and replication summaries."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc

from .errors import DimensionError, ParameterError
from .linalg import _as_matrix, as_mask


class ErrorScope(enum.Enum):
    OBSERVED = "observed"
    MISSING = "missing"
    ALL = "all"


def relative_error(Z, Z_hat, mask, scope: ErrorScope = ErrorScope.OBSERVED) -> float:
    """Scoped squared deviation between truth and estimate, as a percentage.

    100 * sum_{(i,j) in S} (Z_ij - Zhat_ij)^2 / ||Z||_F^2, where S is the
    observed set, its complement, or all indices depending on scope. The
    denominator is always the full Frobenius norm of Z, so the three scopes
    add up exactly.
    """
    Z = _as_matrix(Z, "Z")
    Z_hat = _as_matrix(Z_hat, "Z_hat")
    mask = as_mask(mask)
    if Z.shape != Z_hat.shape or Z.shape != mask.shape:
        raise DimensionError(
            f"shape mismatch: Z {Z.shape}, Z_hat {Z_hat.shape}, mask {mask.shape}")
    denom = float(np.sum(Z * Z))
    if denom == 0.0:
        raise ParameterError("relative_error undefined for Z = 0")
    sq = (Z - Z_hat) ** 2
    if scope is ErrorScope.OBSERVED:
        num = float(sq[mask].sum())
    elif scope is ErrorScope.MISSING:
        num = float(sq[~mask].sum())
    else:
        num = float(sq.sum())
    return 100.0 * num / denom


def _t_sf(t_abs: float, df: float) -> float:
    """Two-sided tail probability of Student's t via the regularized
    incomplete beta function."""
    if t_abs == 0.0:
        return 1.0
    x = df / (df + t_abs * t_abs)
    return float(betainc(df / 2.0, 0.5, x))


def welch_t_test(xs, ys) -> tuple[float, float, float]:
    """Welch's unequal-variance two-sample t-test.

    Returns (t, Welch-Satterthwaite df, two-sided p).
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.size < 2 or ys.size < 2:
        raise ParameterError("each sample needs at least 2 values")
    vx = float(np.var(xs, ddof=1))
    vy = float(np.var(ys, ddof=1))
    if vx == 0.0 or vy == 0.0:
        raise ParameterError("each sample needs nonzero variance")
    nx, ny = xs.size, ys.size
    ax, ay = vx / nx, vy / ny
    se = math.sqrt(ax + ay)
    t = (float(xs.mean()) - float(ys.mean())) / se
    df = (ax + ay) ** 2 / (ax * ax / (nx - 1) + ay * ay / (ny - 1))
    return t, df, _t_sf(abs(t), df)


def paired_t_test(xs, ys) -> tuple[float, float, float]:
    """One-sample t-test on paired differences; same return shape as
    :func:`welch_t_test`."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.size != ys.size:
        raise ParameterError("paired samples must have equal length")
    d = xs - ys
    if d.size < 2:
        raise ParameterError("need at least 2 pairs")
    sd = float(np.std(d, ddof=1))
    if sd == 0.0:
        raise ParameterError("paired differences have zero variance")
    n = d.size
    t = float(d.mean()) / (sd / math.sqrt(n))
    df = float(n - 1)
    return t, df, _t_sf(abs(t), df)


@dataclass(frozen=True)
class CellSummary:
    """Aggregates for one benchmark cell (mechanism x rank x proportion)."""

    mechanism: str
    rank: int
    missing_prop: float
    n_reps: int
    mean_rel_err: float
    sd_rel_err: float
    rep_errors: tuple[float, ...]
    sd_defined: bool = True


def summarize_cell(rep_errors, *, mechanism: str, rank: int,
                   missing_prop: float) -> CellSummary:
    """Mean and sample SD (n-1 denominator) of per-replication errors.

    A single replication gets SD 0 with sd_defined=False.
    """
    errs = tuple(float(e) for e in rep_errors)
    if not errs:
        raise ParameterError("need at least one replication")
    arr = np.asarray(errs)
    if arr.size == 1:
        sd, sd_defined = 0.0, False
    else:
        sd, sd_defined = float(np.std(arr, ddof=1)), True
    return CellSummary(mechanism=mechanism, rank=rank, missing_prop=missing_prop,
                       n_reps=arr.size, mean_rel_err=float(arr.mean()),
                       sd_rel_err=sd, rep_errors=errs, sd_defined=sd_defined)
