"""Shared helpers for the test suite."""

from __future__ import annotations

import numpy as np

from treecascade import CorrelationSummary, correlation_from_covariance


def random_spd_covariance(d: int, rng: np.random.Generator) -> np.ndarray:
    """Random symmetric positive-definite covariance via a factor square."""
    factors = rng.standard_normal((d, d + 2))
    cov = factors @ factors.T + 0.1 * np.eye(d)
    return (cov + cov.T) / 2.0


def random_correlation(d: int, rng: np.random.Generator) -> CorrelationSummary:
    """Random valid correlation matrix (normalized SPD covariance)."""
    return correlation_from_covariance(random_spd_covariance(d, rng))
