"""Trees, rooted trees, and deterministic maximum spanning trees.

Vertices are always the integers ``0..d-1``.  Undirected edges are stored
canonically as ``(i, j)`` tuples with ``i < j``.  The maximum spanning tree
uses a fixed total edge order -- weight descending, then ``(min, max)``
vertex pair ascending -- so equal inputs yield identical trees on every
platform.  Uniqueness of the maximum is certified exactly (no tolerance)
through the strict cycle property.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

import numpy as np

from .errors import InvalidInputError, SizeLimitError

#: Description of the deterministic edge order used by Kruskal's construction.
CANONICAL_EDGE_ORDER = "weight descending, then (min vertex, max vertex) ascending"

#: Guard for exhaustive spanning-tree enumeration (8**6 = 262144 trees).
MAX_ENUMERATION_VERTICES = 8


def canonical_edge(i: int, j: int) -> tuple[int, int]:
    """Return the undirected edge ``{i, j}`` in canonical ``(min, max)`` form."""
    if i == j:
        raise InvalidInputError(f"self-loop ({i}, {j}) is not a valid edge")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class Tree:
    """An undirected tree on vertices ``0..d-1``.

    Invariants checked at construction: exactly ``d - 1`` canonical edges,
    valid endpoints, connected (which with the edge count implies acyclic).
    A single-vertex tree has no edges.
    """

    d: int
    edges: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self) -> None:
        if self.d < 1:
            raise InvalidInputError(f"vertex count must be >= 1, got {self.d}")
        if len(self.edges) != self.d - 1:
            raise InvalidInputError(
                f"a tree on {self.d} vertices needs {self.d - 1} edges, "
                f"got {len(self.edges)}"
            )
        for i, j in self.edges:
            if not (0 <= i < j < self.d):
                raise InvalidInputError(f"edge ({i}, {j}) is not canonical on {self.d} vertices")
        if self.d > 1 and len(self._components()) != 1:
            raise InvalidInputError("edge set is not connected")

    @staticmethod
    def from_edges(d: int, edges: Sequence[tuple[int, int]]) -> "Tree":
        """Build a tree from any iterable of (possibly unordered) vertex pairs."""
        return Tree(d, frozenset(canonical_edge(i, j) for i, j in edges))

    def sorted_edges(self) -> list[tuple[int, int]]:
        """Edges in ascending canonical order; the deterministic iteration order."""
        return sorted(self.edges)

    def adjacency(self) -> list[list[int]]:
        """Neighbor lists, each sorted ascending."""
        adj: list[list[int]] = [[] for _ in range(self.d)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        for lst in adj:
            lst.sort()
        return adj

    def has_edge(self, i: int, j: int) -> bool:
        return canonical_edge(i, j) in self.edges

    def _components(self) -> list[list[int]]:
        return connected_components(self.d, self.edges)


@dataclass(frozen=True)
class RootedTree:
    """A tree plus a distinguished root, with every edge oriented root-ward.

    ``parent[i]`` is the parent of vertex ``i`` and ``-1`` at the root;
    ``depth[i]`` is the number of edges from ``i`` up to the root.  Build
    via :func:`root_tree`.
    """

    tree: Tree
    root: int
    parent: tuple[int, ...]
    depth: tuple[int, ...]

    def __post_init__(self) -> None:
        d = self.tree.d
        if not (0 <= self.root < d):
            raise InvalidInputError(f"root {self.root} out of range for {d} vertices")
        if len(self.parent) != d or len(self.depth) != d:
            raise InvalidInputError("parent/depth maps must cover every vertex")
        if self.parent[self.root] != -1 or self.depth[self.root] != 0:
            raise InvalidInputError("root must have no parent and depth 0")
        for i in range(d):
            if i == self.root:
                continue
            p = self.parent[i]
            if not self.tree.has_edge(i, p):
                raise InvalidInputError(f"parent map entry {i} -> {p} is not a tree edge")
            if self.depth[i] != self.depth[p] + 1:
                raise InvalidInputError(f"depth of {i} inconsistent with its parent")

    @property
    def d(self) -> int:
        return self.tree.d

    def parent_of(self, i: int) -> int | None:
        """Parent of ``i``, or None at the root."""
        p = self.parent[i]
        return None if p == -1 else p

    def non_root_vertices(self) -> list[int]:
        return [i for i in range(self.d) if i != self.root]

    def ancestors(self, i: int) -> list[int]:
        """Proper ancestors of ``i``, nearest first, ending at the root."""
        out = []
        p = self.parent[i]
        while p != -1:
            out.append(p)
            p = self.parent[p]
        return out

    def is_ancestor(self, a: int, b: int) -> bool:
        """True iff ``a`` is a proper ancestor of ``b``."""
        if a == b:
            return False
        p = self.parent[b]
        while p != -1:
            if p == a:
                return True
            p = self.parent[p]
        return False

    def lca(self, i: int, j: int) -> int:
        """Deepest common ancestor of ``i`` and ``j``; a vertex is its own ancestor here."""
        self._check_vertex(i)
        self._check_vertex(j)
        a, b = i, j
        while self.depth[a] > self.depth[b]:
            a = self.parent[a]
        while self.depth[b] > self.depth[a]:
            b = self.parent[b]
        while a != b:
            a = self.parent[a]
            b = self.parent[b]
        return a

    def path_vertices(self, i: int, j: int) -> list[int]:
        """Vertices on the unique tree path from ``i`` to ``j``, inclusive."""
        m = self.lca(i, j)
        up = [i]
        a = i
        while a != m:
            a = self.parent[a]
            up.append(a)
        down = []
        b = j
        while b != m:
            down.append(b)
            b = self.parent[b]
        return up + down[::-1]

    def path_edges(self, i: int, j: int) -> list[tuple[int, int]]:
        """Canonical edges along the tree path from ``i`` to ``j``."""
        verts = self.path_vertices(i, j)
        return [canonical_edge(a, b) for a, b in zip(verts, verts[1:])]

    def directed_path(self, ancestor: int, descendant: int) -> list[tuple[int, int]]:
        """Directed edges ``(parent, child)`` from ``ancestor`` down to ``descendant``.

        Empty when ``ancestor`` is not a proper ancestor of ``descendant``.
        """
        if not self.is_ancestor(ancestor, descendant):
            return []
        hops = []
        b = descendant
        while b != ancestor:
            hops.append((self.parent[b], b))
            b = self.parent[b]
        return hops[::-1]

    def _check_vertex(self, i: int) -> None:
        if not (0 <= i < self.d):
            raise InvalidInputError(f"vertex {i} out of range for {self.d} vertices")


@dataclass(frozen=True)
class WeightedGraph:
    """An undirected graph on ``0..d-1`` with finite real edge weights.

    Weights are stored once per canonical edge.  Construction accepts any
    subset of edges; operations that require the complete graph (the
    maximum spanning tree) validate completeness themselves.
    """

    d: int
    weights: Mapping[tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.d < 1:
            raise InvalidInputError(f"vertex count must be >= 1, got {self.d}")
        for (i, j), w in self.weights.items():
            if not (0 <= i < j < self.d):
                raise InvalidInputError(f"edge ({i}, {j}) is not canonical on {self.d} vertices")
            if not math.isfinite(w):
                raise InvalidInputError(f"weight of edge ({i}, {j}) is not finite: {w!r}")

    @staticmethod
    def from_matrix(matrix: np.ndarray) -> "WeightedGraph":
        """Complete graph from a symmetric matrix; the diagonal is ignored."""
        m = np.asarray(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidInputError(f"weight matrix must be square, got shape {m.shape}")
        d = m.shape[0]
        weights = {}
        for i in range(d):
            for j in range(i + 1, d):
                if m[i, j] != m[j, i]:
                    raise InvalidInputError(f"weight matrix not symmetric at ({i}, {j})")
                weights[(i, j)] = float(m[i, j])
        return WeightedGraph(d, weights)

    def weight(self, i: int, j: int) -> float:
        e = canonical_edge(i, j)
        try:
            return self.weights[e]
        except KeyError:
            raise InvalidInputError(f"no weight defined for edge {e}") from None

    def is_complete(self) -> bool:
        return len(self.weights) == self.d * (self.d - 1) // 2

    def sorted_edges(self) -> list[tuple[float, int, int]]:
        """All weighted edges in the canonical Kruskal order."""
        return sorted(
            ((w, i, j) for (i, j), w in self.weights.items()),
            key=lambda t: (-t[0], t[1], t[2]),
        )


@dataclass(frozen=True)
class MstResult:
    """A maximum spanning tree with its weight and an exact uniqueness flag."""

    tree: Tree
    total_weight: float
    is_unique: bool
    edge_order_used: str = CANONICAL_EDGE_ORDER


class _UnionFind:
    __slots__ = ("parent", "rank")

    def __init__(self, n: int) -> None:
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


def connected_components(d: int, edges) -> list[list[int]]:
    """Connected components as sorted vertex lists, ordered by smallest member."""
    uf = _UnionFind(d)
    for i, j in edges:
        uf.union(i, j)
    groups: dict[int, list[int]] = {}
    for v in range(d):
        groups.setdefault(uf.find(v), []).append(v)
    return sorted(groups.values(), key=lambda g: g[0])


def maximum_spanning_tree(g: WeightedGraph) -> MstResult:
    """Maximum-weight spanning tree of a complete weighted graph.

    Kruskal's greedy construction over the canonical edge order, so the
    result (including tie resolution) is identical across runs and
    platforms.  ``is_unique`` certifies via :func:`mst_is_unique` that no
    other spanning tree attains the same total weight.
    """
    if not g.is_complete():
        raise InvalidInputError(
            f"maximum_spanning_tree requires a complete graph on {g.d} vertices"
        )
    uf = _UnionFind(g.d)
    chosen: list[tuple[int, int]] = []
    total = 0.0
    for w, i, j in g.sorted_edges():
        if uf.union(i, j):
            chosen.append((i, j))
            total += w
            if len(chosen) == g.d - 1:
                break
    tree = Tree(g.d, frozenset(chosen))
    return MstResult(tree, total, mst_is_unique(g, tree))


def mst_is_unique(g: WeightedGraph, t: Tree) -> bool:
    """Exact uniqueness certificate for a maximum spanning tree.

    ``t`` is the unique maximum iff every non-tree edge ``{i, j}`` weighs
    strictly less than every edge on the tree path between ``i`` and ``j``.
    Equality anywhere yields an equal-weight exchange, hence a tie.  Raises
    if ``t`` does not span ``g`` or is not maximal (some non-tree edge
    outweighs a path edge).
    """
    if t.d != g.d:
        raise InvalidInputError(f"tree on {t.d} vertices does not span graph on {g.d}")
    rt = root_tree(t, 0)
    unique = True
    for i in range(g.d):
        for j in range(i + 1, g.d):
            if t.has_edge(i, j):
                continue
            bound = min(g.weight(a, b) for a, b in rt.path_edges(i, j))
            w = g.weight(i, j)
            if w > bound:
                raise InvalidInputError(
                    f"tree is not a maximum spanning tree: non-tree edge ({i}, {j}) "
                    f"outweighs a tree edge on its path"
                )
            if w == bound:
                unique = False
    return unique


def check_strict_triangle_condition(g: WeightedGraph, t: Tree) -> bool:
    """Strict path-neighbor dominance check, sufficient for a unique maximum.

    For every ordered pair of distinct nonadjacent vertices ``i, j`` with
    ``k`` the first vertex on the tree path from ``i`` to ``j``, requires
    ``W_ij < min(W_ik, W_kj)`` strictly.  When true, ``t`` is certified to
    be the unique maximum spanning tree of ``g``.
    """
    if t.d != g.d:
        raise InvalidInputError(f"tree on {t.d} vertices does not span graph on {g.d}")
    rt = root_tree(t, 0)
    for i in range(g.d):
        for j in range(g.d):
            if i == j or t.has_edge(i, j):
                continue
            k = rt.path_vertices(i, j)[1]
            if not g.weight(i, j) < min(g.weight(i, k), g.weight(k, j)):
                return False
    return True


def enumerate_spanning_trees(d: int) -> Iterator[Tree]:
    """Yield every labeled tree on ``d`` vertices exactly once.

    Decodes all length-``d-2`` vertex sequences (the bijection with labeled
    trees), so the count is ``d**(d-2)`` for ``d >= 2`` and 1 for ``d <= 2``.
    Guarded at ``d <= 8`` against combinatorial blowup; this exists as the
    exhaustive oracle for spanning-tree optimizers.
    """
    if d < 1:
        raise InvalidInputError(f"vertex count must be >= 1, got {d}")
    if d > MAX_ENUMERATION_VERTICES:
        raise SizeLimitError(
            f"refusing to enumerate {d}**{d - 2} spanning trees (limit d <= "
            f"{MAX_ENUMERATION_VERTICES})"
        )
    if d == 1:
        yield Tree(1)
        return
    if d == 2:
        yield Tree(2, frozenset({(0, 1)}))
        return
    seq = [0] * (d - 2)
    while True:
        yield _tree_from_pruefer(seq, d)
        pos = d - 3
        while pos >= 0 and seq[pos] == d - 1:
            seq[pos] = 0
            pos -= 1
        if pos < 0:
            return
        seq[pos] += 1


def _tree_from_pruefer(seq: Sequence[int], d: int) -> Tree:
    """Decode a length-``d-2`` sequence over ``0..d-1`` into its labeled tree."""
    degree = [1] * d
    for s in seq:
        degree[s] += 1
    leaves = [v for v in range(d) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for s in seq:
        leaf = heapq.heappop(leaves)
        edges.append(canonical_edge(leaf, s))
        degree[s] -= 1
        if degree[s] == 1:
            heapq.heappush(leaves, s)
    u = heapq.heappop(leaves)
    v = heapq.heappop(leaves)
    edges.append(canonical_edge(u, v))
    return Tree(d, frozenset(edges))


def random_tree(d: int, rng: np.random.Generator) -> Tree:
    """Uniformly random labeled tree on ``d`` vertices."""
    if d < 1:
        raise InvalidInputError(f"vertex count must be >= 1, got {d}")
    if d <= 2:
        return Tree(d, frozenset({(0, 1)}) if d == 2 else frozenset())
    seq = [int(s) for s in rng.integers(0, d, size=d - 2)]
    return _tree_from_pruefer(seq, d)


def root_tree(t: Tree, r: int) -> RootedTree:
    """Orient every edge of ``t`` toward the root ``r`` (breadth-first)."""
    if not (0 <= r < t.d):
        raise InvalidInputError(f"root {r} out of range for {t.d} vertices")
    adj = t.adjacency()
    parent = [-1] * t.d
    depth = [0] * t.d
    seen = [False] * t.d
    seen[r] = True
    queue = [r]
    for v in queue:
        for w in adj[v]:
            if not seen[w]:
                seen[w] = True
                parent[w] = v
                depth[w] = depth[v] + 1
                queue.append(w)
    return RootedTree(t, r, tuple(parent), tuple(depth))


def cluster_by_edge_deletion(g: WeightedGraph, t: Tree, k: int) -> list[list[int]]:
    """Partition vertices by deleting the ``k - 1`` lightest tree edges.

    Ties resolve by ascending canonical vertex pair, mirroring the fixed
    order of :func:`maximum_spanning_tree`.  Each cluster is sorted and the
    clusters are ordered by their smallest vertex.
    """
    if t.d != g.d:
        raise InvalidInputError(f"tree on {t.d} vertices does not span graph on {g.d}")
    if not (1 <= k <= t.d):
        raise InvalidInputError(f"cluster count {k} out of range 1..{t.d}")
    by_lightness = sorted(t.edges, key=lambda e: (g.weight(*e), e[0], e[1]))
    kept = by_lightness[k - 1 :]
    return connected_components(t.d, kept)
