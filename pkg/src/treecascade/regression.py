"""Simultaneous cascade regression.

Fits a rooted tree and per-edge coefficients to minimize the expected
squared residual of predicting every standardized component from its
parent.  The optimal coefficient on each edge is the pairwise correlation,
and the optimal tree is a maximum spanning tree of the complete graph
weighted by squared correlations; at the optimum the objective collapses
to d minus the sum of the chosen squared correlations.  A brute-force
enumerator over all labeled trees serves as the optimality oracle.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .dataio import Dataset, standardize
from .errors import InvalidInputError, SizeLimitError
from .trees import (
    RootedTree,
    Tree,
    WeightedGraph,
    canonical_edge,
    enumerate_spanning_trees,
    maximum_spanning_tree,
    root_tree,
)


@dataclass(frozen=True)
class CorrelationSummary:
    """Symmetric pairwise-correlation matrix with an exactly unit diagonal.

    ``source`` records provenance ("population" or "empirical(n=...)").
    Exact symmetry is required so downstream results are invariant to how
    vertex pairs are traversed; the builders below guarantee it.
    """

    corr: np.ndarray
    source: str = "population"

    def __post_init__(self) -> None:
        corr = np.array(self.corr, dtype=float)
        if corr.ndim != 2 or corr.shape[0] != corr.shape[1]:
            raise InvalidInputError(f"correlation matrix must be square, got shape {corr.shape}")
        if not np.isfinite(corr).all():
            raise InvalidInputError("correlation matrix contains non-finite entries")
        if not np.array_equal(corr, corr.T):
            raise InvalidInputError("correlation matrix must be exactly symmetric")
        if not (np.diag(corr) == 1.0).all():
            raise InvalidInputError("correlation matrix diagonal must be exactly 1")
        if np.abs(corr).max() > 1.0:
            raise InvalidInputError("correlations must lie in [-1, 1]")
        corr.setflags(write=False)
        object.__setattr__(self, "corr", corr)

    @property
    def d(self) -> int:
        return self.corr.shape[0]


def correlation_from_covariance(cov: np.ndarray, source: str = "population") -> CorrelationSummary:
    """Normalize a covariance matrix into a correlation summary.

    Each off-diagonal pair is normalized independently by the same scalar
    expression, so any other code computing a pairwise correlation from
    the identical covariance entries reproduces these values bit-exactly.
    """
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise InvalidInputError(f"covariance must be square, got shape {cov.shape}")
    d = cov.shape[0]
    corr = np.eye(d)
    for i in range(d):
        if not cov[i, i] > 0.0:
            raise InvalidInputError(f"covariance diagonal must be positive, got {cov[i, i]} at {i}")
    for i in range(d):
        for j in range(i + 1, d):
            rho = float(cov[i, j]) / math.sqrt(float(cov[i, i]) * float(cov[j, j]))
            rho = min(1.0, max(-1.0, rho))
            corr[i, j] = rho
            corr[j, i] = rho
    return CorrelationSummary(corr, source)


def correlation_from_dataset(ds: Dataset) -> CorrelationSummary:
    """Empirical correlations of a standardized dataset (n - 1 divisor)."""
    if not ds.standardized:
        raise InvalidInputError("correlation_from_dataset expects standardized data")
    raw = ds.values.T @ ds.values / (ds.n - 1)
    corr = (raw + raw.T) / 2.0
    np.fill_diagonal(corr, 1.0)
    corr = np.clip(corr, -1.0, 1.0)
    return CorrelationSummary(corr, f"empirical(n={ds.n})")


@dataclass(frozen=True)
class FitResult:
    """A fitted cascade: tree, root, coefficients, and diagnostics.

    ``coeffs[i]`` is the correlation between non-root vertex ``i`` and its
    parent; ``weights`` maps each tree edge to its squared correlation;
    ``objective`` is the expected squared residual, which at the optimum
    equals d minus the sum of the weights; ``tree_unique`` certifies that
    no other tree attains the optimum.
    """

    tree: Tree
    root: int
    coeffs: dict[int, float]
    objective: float
    weights: dict[tuple[int, int], float]
    tree_unique: bool
    root_hint_source: str = "default"
    names: tuple[str, ...] | None = None


def optimal_coefficients(rt: RootedTree, c: CorrelationSummary) -> dict[int, float]:
    """Objective-minimizing coefficients for a fixed rooted tree.

    The best predictor of a standardized component from its standardized
    parent has slope equal to their correlation.
    """
    if rt.d != c.d:
        raise InvalidInputError(f"tree on {rt.d} vertices vs correlations on {c.d}")
    return {i: float(c.corr[i, rt.parent[i]]) for i in rt.non_root_vertices()}


def objective_value(rt: RootedTree, coeffs: Mapping[int, float], c: CorrelationSummary) -> float:
    """Expected squared residual of the cascade predictor, from correlations only.

    Expands E(x_root^2) plus a per-edge quadratic in the coefficient.
    Terms accumulate in canonical edge order, making the value independent
    of the chosen root whenever the coefficients are the optimal ones.
    """
    if rt.d != c.d:
        raise InvalidInputError(f"tree on {rt.d} vertices vs correlations on {c.d}")
    if set(coeffs) != set(rt.non_root_vertices()):
        raise InvalidInputError("coefficients must cover exactly the non-root vertices")
    corr = c.corr
    order = sorted(rt.non_root_vertices(), key=lambda i: canonical_edge(i, rt.parent[i]))
    total = float(corr[rt.root, rt.root])
    for i in order:
        p = rt.parent[i]
        a = float(coeffs[i])
        total += a * a * float(corr[p, p]) - 2.0 * a * float(corr[i, p]) + float(corr[i, i])
    return total


def squared_correlation_graph(c: CorrelationSummary) -> WeightedGraph:
    """Complete graph weighted by squared pairwise correlations."""
    return WeightedGraph.from_matrix(c.corr * c.corr)


def fit_cascade(c: CorrelationSummary, root_hint: int | None = None) -> FitResult:
    """Optimal cascade for a correlation summary.

    Runs the deterministic maximum spanning tree on squared correlations,
    roots it (the objective does not depend on the root; the root is
    recorded for orientation only), and fills in optimal coefficients.
    """
    root = 0 if root_hint is None else root_hint
    if not (0 <= root < c.d):
        raise InvalidInputError(f"root {root} out of range for {c.d} vertices")
    graph = squared_correlation_graph(c)
    mst = maximum_spanning_tree(graph)
    rt = root_tree(mst.tree, root)
    coeffs = optimal_coefficients(rt, c)
    return FitResult(
        tree=mst.tree,
        root=root,
        coeffs=coeffs,
        objective=objective_value(rt, coeffs, c),
        weights={e: graph.weights[e] for e in mst.tree.sorted_edges()},
        tree_unique=mst.is_unique,
        root_hint_source="default" if root_hint is None else "user",
    )


def brute_force_fit(c: CorrelationSummary) -> FitResult:
    """Global minimizer over every labeled tree; the optimality oracle.

    Evaluates the optimal-coefficient objective for all d**(d-2) trees.
    Ties on the objective resolve to the lexicographically smallest sorted
    edge list, and ``tree_unique`` reports whether the minimum was
    attained by exactly one tree.
    """
    if c.d > 8:
        raise SizeLimitError(f"brute-force fit is limited to d <= 8, got {c.d}")
    corr = c.corr
    best: tuple[float, list[tuple[int, int]], Tree, dict[int, float]] | None = None
    tied = False
    for tree in enumerate_spanning_trees(c.d):
        rt = root_tree(tree, 0)
        coeffs = optimal_coefficients(rt, c)
        objective = objective_value(rt, coeffs, c)
        key = tree.sorted_edges()
        if best is None or objective < best[0]:
            best = (objective, key, tree, coeffs)
            tied = False
        elif objective == best[0]:
            tied = True
            if key < best[1]:
                best = (objective, key, tree, coeffs)
    assert best is not None
    objective, edges, tree, coeffs = best
    weights = {e: float(corr[e[0], e[1]]) ** 2 for e in edges}
    return FitResult(
        tree=tree,
        root=0,
        coeffs=coeffs,
        objective=objective,
        weights=weights,
        tree_unique=not tied,
        root_hint_source="default",
    )


def empirical_fit(data: Dataset, root_hint: int | None = None) -> FitResult:
    """Standardize a dataset, take empirical correlations, and fit.

    The reported objective uses the same correlation identity as the
    population fit, so empirical and population objectives share a scale.
    Column names carry through to the result.
    """
    if data.n < 2:
        raise InvalidInputError(f"empirical fit needs at least 2 rows, got {data.n}")
    z = data if data.standardized else standardize(data)
    fit = fit_cascade(correlation_from_dataset(z), root_hint)
    return dataclasses.replace(fit, names=data.names)
