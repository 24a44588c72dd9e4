"""Gaussian tree approximation via pairwise mutual information.

For a zero-mean Gaussian, the divergence between a pair's joint and the
product of its marginals has the closed form -1/2 log(1 - rho^2).  The
best tree-factoring approximation (minimum divergence) is the maximum
spanning tree under those pairwise weights.  Because that weight is a
strictly increasing function of the squared correlation, the tree agrees
with the one cascade regression selects; ``correspondence_check`` makes
the agreement observable edge by edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegeneracyError, InvalidInputError
from .regression import correlation_from_covariance, fit_cascade
from .trees import MstResult, Tree, WeightedGraph, maximum_spanning_tree


@dataclass(frozen=True)
class GaussianSummary:
    """Zero-mean Gaussian described by its positive-definite covariance.

    Input is symmetrized (averaging tiny numerical asymmetry) and positive
    definiteness is checked by attempting a Cholesky factorization.
    """

    covariance: np.ndarray

    def __post_init__(self) -> None:
        cov = np.array(self.covariance, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
            raise InvalidInputError(f"covariance must be square, got shape {cov.shape}")
        if not np.isfinite(cov).all():
            raise InvalidInputError("covariance contains non-finite entries")
        cov = (cov + cov.T) / 2.0
        if not (np.diag(cov) > 0.0).all():
            raise InvalidInputError("covariance diagonal must be strictly positive")
        try:
            np.linalg.cholesky(cov)
        except np.linalg.LinAlgError:
            raise InvalidInputError("covariance is not positive definite") from None
        cov.setflags(write=False)
        object.__setattr__(self, "covariance", cov)

    @property
    def d(self) -> int:
        return self.covariance.shape[0]


def pairwise_mi_weight(s: GaussianSummary, i: int, j: int) -> float:
    """Mutual information between components i and j: -1/2 log(1 - rho^2).

    Nonnegative, zero exactly when the pair is uncorrelated, and strictly
    increasing in the squared correlation.
    """
    if i == j:
        raise InvalidInputError(f"pairwise weight needs two distinct vertices, got {i}")
    cov = s.covariance
    if not (0 <= i < s.d and 0 <= j < s.d):
        raise InvalidInputError(f"vertex pair ({i}, {j}) out of range for d={s.d}")
    rho = float(cov[i, j]) / math.sqrt(float(cov[i, i]) * float(cov[j, j]))
    if abs(rho) >= 1.0:
        raise DegeneracyError(f"components {i} and {j} are perfectly correlated")
    return -0.5 * math.log1p(-rho * rho)


def chow_liu_tree(s: GaussianSummary) -> MstResult:
    """Optimal approximator tree: maximum spanning tree of pairwise MI weights."""
    weights = {
        (i, j): pairwise_mi_weight(s, i, j) for i in range(s.d) for j in range(i + 1, s.d)
    }
    return maximum_spanning_tree(WeightedGraph(s.d, weights))


@dataclass(frozen=True)
class CorrespondenceReport:
    """Side-by-side result of the two tree selections on one Gaussian.

    ``edge_pairs`` lists, per edge of the approximator tree, the squared
    correlation and its mutual-information image under the increasing map
    w -> -1/2 log(1 - w); equal trees with matching monotone weights are
    the expected outcome.
    """

    approximator_tree: Tree
    cascade_tree: Tree
    trees_equal: bool
    approximator_unique: bool
    cascade_unique: bool
    edge_pairs: tuple[tuple[tuple[int, int], float, float], ...]

    @property
    def tie_detected(self) -> bool:
        return not (self.approximator_unique and self.cascade_unique)


def correspondence_check(s: GaussianSummary) -> CorrespondenceReport:
    """Run both tree selections and report whether they coincide.

    Inequality is reported, not raised.  Non-unique maxima on either side
    are surfaced so callers can flag ties.
    """
    approx = chow_liu_tree(s)
    fit = fit_cascade(correlation_from_covariance(s.covariance))
    pairs = []
    for i, j in approx.tree.sorted_edges():
        rho = float(s.covariance[i, j]) / math.sqrt(
            float(s.covariance[i, i]) * float(s.covariance[j, j])
        )
        pairs.append(((i, j), rho * rho, pairwise_mi_weight(s, i, j)))
    return CorrespondenceReport(
        approximator_tree=approx.tree,
        cascade_tree=fit.tree,
        trees_equal=approx.tree.edges == fit.tree.edges,
        approximator_unique=approx.is_unique,
        cascade_unique=fit.tree_unique,
        edge_pairs=tuple(pairs),
    )
