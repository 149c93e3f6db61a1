"""Executable missing-data mechanisms and mask diagnostics.

Masks are boolean matrices with True = observed. Three generators:

* MCAR: each entry missing independently with fixed probability; the
  generator never sees any data values.
* MAR (row permutation): a donor MCAR mask whose row patterns are reassigned
  to data rows according to a fully observed anchor column, so missingness
  depends only on observed values while the row-pattern multiset matches the
  donor's exactly.
* NMAR (logistic): each entry missing with probability
  sigmoid(alpha + beta * value), which depends on possibly-missing values.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ParameterError
from .linalg import _as_matrix, as_mask


class MechanismKind(enum.Enum):
    MCAR = "MCAR"
    MAR_ROWPERM = "MAR_ROWPERM"
    NMAR_LOGISTIC = "NMAR_LOGISTIC"


class Mechanism(enum.Enum):
    MCAR = "MCAR"
    MAR = "MAR"
    NMAR = "NMAR"


@dataclass(frozen=True)
class MechanismSpec:
    """Declarative description of a missingness generator."""

    kind: MechanismKind
    p: float | None = None
    anchor_col: int | None = None
    alpha: float | None = None
    beta: float | None = None


@dataclass(frozen=True)
class MaskStats:
    missing_fraction: float
    per_row_missing: np.ndarray
    anchor_missing: int | None = None


def _check_prob(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"missing proportion p={p} outside [0, 1]")


def gen_mcar(m: int, n: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Entries missing independently with probability p, blind to all data."""
    _check_prob(p)
    if m < 1 or n < 1:
        raise ParameterError(f"need m, n >= 1, got {m}x{n}")
    return rng.random((m, n)) >= p


def donor_mcar(
    m: int, n: int, p: float, anchor_col: int, rng: np.random.Generator
) -> np.ndarray:
    """MCAR at rate p over the non-anchor columns; the anchor stays observed."""
    _check_prob(p)
    if not 0 <= anchor_col < n:
        raise ParameterError(f"anchor_col={anchor_col} outside [0, {n})")
    mask = rng.random((m, n)) >= p
    mask[:, anchor_col] = True
    return mask


def mar_from_donor(Y, donor: np.ndarray, anchor_col: int) -> np.ndarray:
    """Reassign the donor's row patterns by anchor-column value.

    The k-th most-missing donor row pattern goes to the row with the k-th
    largest anchor value (ties broken by ascending row index in both sorts),
    so the mask is a deterministic function of always-observed values and the
    donor's randomness, and its row-pattern multiset equals the donor's.
    """
    Y = _as_matrix(Y, "Y")
    donor = as_mask(donor)
    m, n = donor.shape
    if Y.shape != donor.shape:
        raise ParameterError(f"shape mismatch: Y {Y.shape} vs donor {donor.shape}")
    if not 0 <= anchor_col < n:
        raise ParameterError(f"anchor_col={anchor_col} outside [0, {n})")
    if not donor[:, anchor_col].all():
        raise ParameterError("donor mask must leave the anchor column observed")
    missing_counts = (~donor).sum(axis=1)
    # lexsort's last key is primary; negate for descending order.
    donor_order = np.lexsort((np.arange(m), -missing_counts))
    anchor_order = np.lexsort((np.arange(m), -Y[:, anchor_col]))
    mask = np.empty_like(donor)
    mask[anchor_order] = donor[donor_order]
    return mask


def gen_mar_rowperm(
    Y, p: float, anchor_col: int, rng: np.random.Generator
) -> np.ndarray:
    """MAR mask: donor MCAR patterns permuted onto rows by anchor value."""
    Y = _as_matrix(Y, "Y")
    m, n = Y.shape
    donor = donor_mcar(m, n, p, anchor_col, rng)
    return mar_from_donor(Y, donor, anchor_col)


def gen_nmar_logistic(
    Y, alpha: float, beta: float, rng: np.random.Generator
) -> np.ndarray:
    """Entry (i, j) missing with probability sigmoid(alpha + beta * Y_ij)."""
    Y = _as_matrix(Y, "Y")
    if not (np.isfinite(alpha) and np.isfinite(beta)):
        raise ParameterError("alpha and beta must be finite")
    if not np.all(np.isfinite(Y)):
        raise NumericalError("gen_nmar_logistic requires finite Y")
    from scipy.special import expit

    p_miss = expit(alpha + beta * Y)
    return rng.random(Y.shape) >= p_miss


def mask_stats(mask, anchor_col: int | None = None) -> MaskStats:
    """Missing fraction, per-row missing counts, and anchor-column misses."""
    mask = as_mask(mask)
    missing = ~mask
    per_row = missing.sum(axis=1)
    anchor_missing = None
    if anchor_col is not None:
        if not 0 <= anchor_col < mask.shape[1]:
            raise ParameterError(f"anchor_col={anchor_col} outside [0, {mask.shape[1]})")
        anchor_missing = int(missing[:, anchor_col].sum())
    return MaskStats(
        missing_fraction=float(missing.sum()) / mask.size,
        per_row_missing=per_row,
        anchor_missing=anchor_missing,
    )


_CLASSIFICATION = {
    MechanismKind.MCAR: Mechanism.MCAR,
    MechanismKind.MAR_ROWPERM: Mechanism.MAR,
    MechanismKind.NMAR_LOGISTIC: Mechanism.NMAR,
}


def classify_mechanism(spec: MechanismSpec) -> Mechanism:
    """Map a generator spec to its MCAR/MAR/NMAR taxonomy class."""
    return _CLASSIFICATION[spec.kind]
