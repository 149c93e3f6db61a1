"""Generative models for the complete data matrix Y = Z + E.

Two samplers: a Gaussian-spectrum low-rank model and a Laplace-spectrum
(Bayesian) model. Both draw uniform orthonormal frames for U and V and add
i.i.d. Gaussian noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .linalg import LowRankFactors, random_orthonormal


@dataclass(frozen=True)
class GroundTruth:
    """A sampled instance: low-rank signal Z, noisy observation Y = Z + E."""

    Z: np.ndarray
    Y: np.ndarray
    factors: LowRankFactors
    sigma: float
    q: int


def _check_common(m: int, n: int, q: int, sigma: float) -> None:
    if m < 1 or n < 1:
        raise ParameterError(f"need m, n >= 1, got {m}x{n}")
    if not 1 <= q <= min(m, n):
        raise ParameterError(f"rank q={q} outside [1, {min(m, n)}]")
    if sigma < 0:
        raise ParameterError(f"noise SD sigma={sigma} must be nonnegative")


def _assemble(U, theta, V, sigma, rng, q) -> GroundTruth:
    Z = (U * theta) @ V.T
    if sigma > 0:
        Y = Z + sigma * rng.standard_normal(Z.shape)
    else:
        Y = Z.copy()
    return GroundTruth(Z=Z, Y=Y, factors=LowRankFactors(U, theta, V), sigma=sigma, q=q)


def sample_gaussian_model(
    m: int,
    n: int,
    q: int,
    signal_scale: float,
    sigma: float,
    rng: np.random.Generator,
) -> GroundTruth:
    """Rank-q signal with Gaussian-magnitude spectrum plus N(0, sigma^2) noise.

    theta_k = signal_scale * sqrt(m*n/q) * |N(0,1)| sorted nonincreasing, which
    gives Z unit entrywise variance on average when signal_scale = 1, so sigma
    reads directly as a noise-to-signal ratio.
    """
    _check_common(m, n, q, sigma)
    if signal_scale <= 0:
        raise ParameterError(f"signal_scale={signal_scale} must be positive")
    U = random_orthonormal(m, q, rng)
    V = random_orthonormal(n, q, rng)
    draws = np.abs(rng.standard_normal(q))
    theta = signal_scale * np.sqrt(m * n / q) * np.sort(draws)[::-1]
    return _assemble(U, theta, V, sigma, rng, q)


def sample_bayes_model(
    m: int,
    n: int,
    q: int,
    b: float,
    sigma: float,
    rng: np.random.Generator,
) -> GroundTruth:
    """Rank-q signal with |Laplace(0, b)| spectrum plus N(0, sigma^2) noise.

    The Laplace draws come from the inverse CDF of a single uniform per
    coordinate; negative draws are folded to their absolute value so theta
    stays a valid spectrum.
    """
    _check_common(m, n, q, sigma)
    if b <= 0:
        raise ParameterError(f"Laplace scale b={b} must be positive")
    U = random_orthonormal(m, q, rng)
    V = random_orthonormal(n, q, rng)
    u = rng.random(q) - 0.5
    laplace = -b * np.sign(u) * np.log1p(-2.0 * np.abs(u))
    theta = np.sort(np.abs(laplace))[::-1]
    return _assemble(U, theta, V, sigma, rng, q)
