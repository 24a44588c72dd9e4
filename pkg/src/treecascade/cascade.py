"""The tree linear cascade generative model.

A cascade couples a rooted tree with one coefficient per non-root vertex
(attached to the edge toward its parent) and a diagonal error covariance.
Each component of the modeled vector is a linear function of its parent
plus a zero-mean error term; the error components are uncorrelated but
need not be independent or Gaussian.  Coefficients are stored sparsely,
one per edge; dense matrices are an explicit conversion.

All closed-form algebra here exploits the tree structure: the inverse of
(I - A) is assembled from coefficient products along directed paths and
never via numerical matrix inversion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .dataio import Dataset
from .errors import InvalidInputError, UnsupportedModelError
from .trees import RootedTree, random_tree, root_tree


@dataclass(frozen=True)
class CascadeModel:
    """A rooted tree, per-edge coefficients, and positive error variances.

    ``coeffs[i]`` is the coefficient multiplying the parent of the non-root
    vertex ``i``; ``error_vars[i]`` is the error variance at vertex ``i``.
    ``unit_variance`` flags models whose induced covariance has an all-ones
    diagonal, in which case every coefficient magnitude is strictly below 1.
    Treat instances (including the mappings) as immutable.
    """

    rt: RootedTree
    coeffs: Mapping[int, float]
    error_vars: Mapping[int, float]
    unit_variance: bool = False

    def __post_init__(self) -> None:
        non_root = set(self.rt.non_root_vertices())
        if set(self.coeffs) != non_root:
            raise InvalidInputError(
                "coefficients must cover exactly the non-root vertices; "
                f"got {sorted(self.coeffs)}, expected {sorted(non_root)}"
            )
        if set(self.error_vars) != set(range(self.d)):
            raise InvalidInputError("error variances must cover every vertex")
        for i, a in self.coeffs.items():
            if not math.isfinite(a):
                raise InvalidInputError(f"coefficient at vertex {i} is not finite: {a!r}")
            if self.unit_variance and not abs(a) < 1.0:
                raise InvalidInputError(
                    f"unit-variance model requires |coefficient| < 1, got {a} at vertex {i}"
                )
        for i, v in self.error_vars.items():
            if not (math.isfinite(v) and v > 0.0):
                raise InvalidInputError(f"error variance at vertex {i} must be > 0, got {v!r}")

    @property
    def d(self) -> int:
        return self.rt.d

    @property
    def root(self) -> int:
        return self.rt.root

    def error_variance_vector(self) -> np.ndarray:
        return np.array([self.error_vars[i] for i in range(self.d)], dtype=float)


def coefficient_matrix(m: CascadeModel) -> np.ndarray:
    """Dense d-by-d coefficient matrix; entry (i, parent(i)) per non-root i."""
    a = np.zeros((m.d, m.d))
    for i, coeff in m.coeffs.items():
        a[i, m.rt.parent[i]] = coeff
    return a


def cascade_inverse(m: CascadeModel) -> np.ndarray:
    """Closed form of (I - A)^-1 for a cascade coefficient matrix A.

    Entry (i, j) is 1 when i = j, the product of edge coefficients along
    the directed path from j down to i when j is an ancestor of i, and 0
    otherwise.  Products accumulate in double precision walking from the
    vertex up toward the root; no numerical inversion is performed.
    """
    inv = np.eye(m.d)
    parent = m.rt.parent
    for i in range(m.d):
        acc = 1.0
        j = i
        while parent[j] != -1:
            acc *= m.coeffs[j]
            j = parent[j]
            inv[i, j] = acc
    return inv


def population_covariance(m: CascadeModel) -> np.ndarray:
    """Covariance induced by the model: (I - A)^-1 D (I - A)^-T, symmetrized."""
    inv = cascade_inverse(m)
    cov = (inv * m.error_variance_vector()) @ inv.T
    return (cov + cov.T) / 2.0


def make_unit_variance_model(
    rt: RootedTree, edge_correlations: Mapping[int, float]
) -> CascadeModel:
    """Cascade whose induced covariance has unit diagonal.

    ``edge_correlations[i]`` becomes both the coefficient at non-root
    vertex ``i`` and the correlation across the edge to its parent; error
    variances are set to 1 minus its square (1 at the root).  Correlations
    must lie strictly inside (-1, 1) and be nonzero: a zero would give the
    generating edge zero weight and forfeit uniqueness of the recovered
    tree.
    """
    non_root = set(rt.non_root_vertices())
    if set(edge_correlations) != non_root:
        raise InvalidInputError(
            "edge correlations must cover exactly the non-root vertices; "
            f"got {sorted(edge_correlations)}, expected {sorted(non_root)}"
        )
    coeffs = {}
    error_vars = {rt.root: 1.0}
    for i, rho in edge_correlations.items():
        rho = float(rho)
        if not (math.isfinite(rho) and abs(rho) < 1.0):
            raise InvalidInputError(f"edge correlation at vertex {i} must be in (-1, 1), got {rho!r}")
        if rho == 0.0:
            raise InvalidInputError(f"edge correlation at vertex {i} must be nonzero")
        coeffs[i] = rho
        error_vars[i] = 1.0 - rho * rho
    model = CascadeModel(rt, coeffs, error_vars, unit_variance=True)
    diag = np.diag(population_covariance(model))
    assert np.max(np.abs(diag - 1.0)) <= 1e-12, "unit-variance construction failed"
    return model


def random_unit_variance_model(
    d: int,
    rng: np.random.Generator,
    magnitude_range: tuple[float, float] = (0.2, 0.9),
) -> CascadeModel:
    """Random tree, random root, signed edge correlations of bounded magnitude."""
    lo, hi = magnitude_range
    if not (0.0 < lo <= hi < 1.0):
        raise InvalidInputError(f"magnitude range must satisfy 0 < lo <= hi < 1, got {magnitude_range}")
    tree = random_tree(d, rng)
    rt = root_tree(tree, int(rng.integers(d)))
    correlations = {}
    for i in rt.non_root_vertices():
        sign = 1.0 if rng.integers(2) == 1 else -1.0
        correlations[i] = sign * float(rng.uniform(lo, hi))
    if not correlations:
        return CascadeModel(rt, {}, {rt.root: 1.0}, unit_variance=True)
    return make_unit_variance_model(rt, correlations)


class ErrorSampler:
    """Named rule that draws uncorrelated zero-mean errors.

    ``draw(rng, n, variances)`` returns an (n, d) array whose columns have
    population mean zero, the requested variances, and zero pairwise
    correlation.  Columns need not be independent (see the "dependent"
    built-in).
    """

    def __init__(
        self,
        name: str,
        draw: Callable[[np.random.Generator, int, np.ndarray], np.ndarray],
        description: str,
    ) -> None:
        self.name = name
        self.description = description
        self._draw = draw

    def draw(self, rng: np.random.Generator, n: int, variances: np.ndarray) -> np.ndarray:
        return self._draw(rng, n, variances)

    def __repr__(self) -> str:
        return f"ErrorSampler({self.name!r})"


def _draw_gaussian(rng, n, variances):
    return rng.standard_normal((n, variances.size)) * np.sqrt(variances)


def _draw_laplace(rng, n, variances):
    # Laplace(scale b) has variance 2 b^2.
    return rng.laplace(0.0, 1.0, (n, variances.size)) * np.sqrt(variances / 2.0)


def _draw_uniform(rng, n, variances):
    # Uniform on [-a, a] has variance a^2 / 3.
    return rng.uniform(-1.0, 1.0, (n, variances.size)) * np.sqrt(3.0 * variances)


def _draw_rademacher(rng, n, variances):
    signs = rng.integers(0, 2, (n, variances.size)) * 2 - 1
    return signs * np.sqrt(variances)


def _draw_dependent(rng, n, variances):
    # One shared magnitude per draw, independent signs per coordinate:
    # pairwise correlations vanish, yet the components share |magnitude|.
    magnitude = np.abs(rng.standard_normal((n, 1)))
    signs = rng.integers(0, 2, (n, variances.size)) * 2 - 1
    return signs * magnitude * np.sqrt(variances)


BUILTIN_SAMPLERS: dict[str, ErrorSampler] = {
    s.name: s
    for s in (
        ErrorSampler("gaussian", _draw_gaussian, "independent normal errors"),
        ErrorSampler("laplace", _draw_laplace, "independent double-exponential errors"),
        ErrorSampler("uniform", _draw_uniform, "independent uniform errors"),
        ErrorSampler("rademacher", _draw_rademacher, "independent symmetric two-point errors"),
        ErrorSampler(
            "dependent",
            _draw_dependent,
            "shared magnitude with independent signs: uncorrelated but not independent",
        ),
    )
}


def get_sampler(name: str) -> ErrorSampler:
    try:
        return BUILTIN_SAMPLERS[name]
    except KeyError:
        known = ", ".join(sorted(BUILTIN_SAMPLERS))
        raise InvalidInputError(f"unknown sampler {name!r}; available: {known}") from None


def simulate(m: CascadeModel, sampler: ErrorSampler, n: int, seed: int, names=None) -> Dataset:
    """Draw ``n`` independent realizations of the cascade.

    Each draw is the closed-form inverse applied to a fresh error draw, so
    the output is a pure function of (model, sampler, n, seed).  Columns
    follow vertex order.  The generator is numpy's seeded PCG64.
    """
    if n < 1:
        raise InvalidInputError(f"sample count must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    errors = sampler.draw(rng, n, m.error_variance_vector())
    values = errors @ cascade_inverse(m).T
    if names is None:
        names = tuple(f"x{i}" for i in range(m.d))
    return Dataset(values=values, names=tuple(names))


def reroot(m: CascadeModel, new_root: int) -> CascadeModel:
    """Equivalent unit-variance cascade rooted at ``new_root``.

    The undirected tree is unchanged; each re-oriented edge takes as its
    coefficient the covariance between its endpoints, and error variances
    are rebuilt as 1 minus the squared coefficient.  The induced covariance
    is preserved.  Only unit-variance models can be re-rooted this way.
    """
    if not m.unit_variance:
        raise UnsupportedModelError("reroot requires a unit-variance model")
    if not (0 <= new_root < m.d):
        raise InvalidInputError(f"root {new_root} out of range for {m.d} vertices")
    if new_root == m.root:
        return m
    cov = population_covariance(m)
    rt2 = root_tree(m.rt.tree, new_root)
    correlations = {i: float(cov[i, rt2.parent[i]]) for i in rt2.non_root_vertices()}
    return make_unit_variance_model(rt2, correlations)


@dataclass(frozen=True)
class LemmaCheck:
    """Outcome of one structural check; ``worst`` is explained by ``measure``."""

    name: str
    passed: bool
    worst: float
    measure: str
    pairs_checked: int


@dataclass(frozen=True)
class LemmaReport:
    checks: tuple[LemmaCheck, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)


def verify_covariance_lemmas(m: CascadeModel, tol: float = 1e-12) -> LemmaReport:
    """Check the closed-form covariance structure of a unit-variance cascade.

    Three checks over the induced covariance C and closed-form inverse B:

    - ancestor pairs: C[i, j] equals B[j, i] when i is an ancestor of j;
    - branching pairs: C[i, j] equals B[i, m] * B[j, m] at the deepest
      common ancestor m when neither vertex is an ancestor of the other;
    - strict dominance: |C[i, j]| < min(|C[i, k]|, |C[k, j]|) for every
      nonadjacent pair, with k the first vertex on the tree path.

    Failures are reported, never raised.
    """
    if not m.unit_variance:
        raise UnsupportedModelError("verify_covariance_lemmas requires a unit-variance model")
    inv = cascade_inverse(m)
    cov = population_covariance(m)
    rt = m.rt

    ancestor_dev = 0.0
    ancestor_pairs = 0
    branch_dev = 0.0
    branch_pairs = 0
    for i in range(m.d):
        for j in range(m.d):
            if i == j:
                continue
            if rt.is_ancestor(i, j):
                ancestor_dev = max(ancestor_dev, float(abs(cov[i, j] - inv[j, i])))
                ancestor_pairs += 1
            elif i < j and not rt.is_ancestor(j, i):
                meet = rt.lca(i, j)
                branch_dev = max(branch_dev, float(abs(cov[i, j] - inv[i, meet] * inv[j, meet])))
                branch_pairs += 1

    margin = math.inf
    bound_pairs = 0
    bound_ok = True
    for i in range(m.d):
        for j in range(m.d):
            if i == j or rt.tree.has_edge(i, j):
                continue
            k = rt.path_vertices(i, j)[1]
            gap = float(min(abs(cov[i, k]), abs(cov[k, j])) - abs(cov[i, j]))
            margin = min(margin, gap)
            bound_ok = bound_ok and gap > 0.0
            bound_pairs += 1

    return LemmaReport(
        (
            LemmaCheck(
                "ancestor-covariance",
                ancestor_dev <= tol,
                ancestor_dev,
                "max |C_ij - B_ji|",
                ancestor_pairs,
            ),
            LemmaCheck(
                "branching-covariance",
                branch_dev <= tol,
                branch_dev,
                "max |C_ij - B_im B_jm|",
                branch_pairs,
            ),
            LemmaCheck(
                "strict-dominance",
                bound_ok,
                margin,
                "min margin min(|C_ik|, |C_kj|) - |C_ij|",
                bound_pairs,
            ),
        )
    )
