"""Plant-observer graphs, the reduced observer graph and its Laplacian.

Node 0 is always the plant; observers are labelled ``1..N``. Matrices built
here are indexed by ``node - 1``.
"""
from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import (
    DisconnectedGraphError,
    GraphError,
    NonpositiveWeightError,
    SelfLoopError,
)

Edge = tuple[int, int]


def _edge_key(i: int, j: int) -> Edge:
    i, j = int(i), int(j)
    return (i, j) if i <= j else (j, i)


@dataclass(frozen=True)
class ObserverGraph:
    """Undirected weighted graph on the plant node 0 and observers ``1..N``.

    Edges are stored under the canonical key ``(min, max)`` so the coupling
    weights are symmetric by construction. Use :func:`validate_graph` to check
    connectivity, positivity and the absence of self-loops.
    """

    n_observers: int
    weights: Mapping[Edge, float]

    def __post_init__(self):
        n = int(self.n_observers)
        if n < 1:
            raise GraphError(f"need at least one observer node, got N={n}")
        canonical: dict[Edge, float] = {}
        for (i, j), mu in dict(self.weights).items():
            key = _edge_key(i, j)
            if not (0 <= key[0] <= n and 0 <= key[1] <= n):
                raise GraphError(f"edge {key} references a node outside 0..{n}")
            mu = float(mu)
            if key in canonical and canonical[key] != mu:
                raise GraphError(f"edge {key} given twice with different weights")
            canonical[key] = mu
        object.__setattr__(self, "n_observers", n)
        object.__setattr__(self, "weights", dict(sorted(canonical.items())))

    @classmethod
    def from_edges(cls, n_observers: int, edges) -> "ObserverGraph":
        """Build from ``(i, j, mu)`` triples."""
        return cls(n_observers, {(i, j): mu for i, j, mu in edges})

    @property
    def edges(self) -> list[Edge]:
        return list(self.weights)

    def edge_list(self) -> list[tuple[int, int, float]]:
        return [(i, j, mu) for (i, j), mu in self.weights.items()]

    def neighbors(self, node: int) -> dict[int, float]:
        out = {}
        for (i, j), mu in self.weights.items():
            if i == node and j != node:
                out[j] = mu
            elif j == node and i != node:
                out[i] = mu
        return out

    def scaled(self, factor: float) -> "ObserverGraph":
        return ObserverGraph(
            self.n_observers, {e: factor * mu for e, mu in self.weights.items()}
        )


@dataclass(frozen=True)
class ReducedGraph:
    """Observer-only graph with weights ``mu * |alpha1|^2``.

    ``plant_weights`` maps each observer attached to the plant to its scaled
    plant-edge weight.
    """

    n_observers: int
    weights: Mapping[Edge, float]
    plant_weights: Mapping[int, float]

    @property
    def plant_attached(self) -> frozenset[int]:
        return frozenset(self.plant_weights)


@dataclass(frozen=True)
class Components:
    """Connected components of a reduced graph.

    ``indicators[k]`` is the 0/1 vector of component ``k`` over nodes ``1..N``.
    """

    groups: list[tuple[int, ...]]
    indicators: np.ndarray

    @property
    def count(self) -> int:
        return len(self.groups)


def _bfs_reach(n_nodes: int, adjacency: dict[int, set[int]], start: int) -> set[int]:
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in adjacency.get(u, ()):
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def validate_graph(g: ObserverGraph) -> None:
    """Raise unless ``g`` has no self-loops, positive weights and is connected."""
    for (i, j), mu in g.weights.items():
        if i == j:
            raise SelfLoopError(f"self-loop on node {i}")
        if not np.isfinite(mu) or mu <= 0:
            raise NonpositiveWeightError(f"edge ({i}, {j}) has weight {mu}; must be > 0")
    adjacency: dict[int, set[int]] = {}
    for i, j in g.weights:
        adjacency.setdefault(i, set()).add(j)
        adjacency.setdefault(j, set()).add(i)
    reached = _bfs_reach(g.n_observers + 1, adjacency, 0)
    missing = sorted(set(range(g.n_observers + 1)) - reached)
    if missing:
        raise DisconnectedGraphError(
            f"nodes {missing} are not connected to the plant node 0"
        )


def reduce(g: ObserverGraph, alpha1_norm_sq: float) -> ReducedGraph:
    """Drop node 0 and scale every weight by ``alpha1_norm_sq``."""
    validate_graph(g)
    if not alpha1_norm_sq > 0:
        raise ValueError("alpha1_norm_sq must be positive")
    weights = {}
    plant = {}
    for (i, j), mu in g.weights.items():
        if i == 0:
            plant[j] = mu * alpha1_norm_sq
        else:
            weights[(i, j)] = mu * alpha1_norm_sq
    return ReducedGraph(g.n_observers, weights, dict(sorted(plant.items())))


def weighted_laplacian(rg: ReducedGraph) -> np.ndarray:
    n = rg.n_observers
    L = np.zeros((n, n))
    for (i, j), w in rg.weights.items():
        a, b = i - 1, j - 1
        L[a, b] -= w
        L[b, a] -= w
        L[a, a] += w
        L[b, b] += w
    return L


def plant_attachment_diag(rg: ReducedGraph) -> np.ndarray:
    d = np.zeros(rg.n_observers)
    for j, w in rg.plant_weights.items():
        d[j - 1] = w
    return np.diag(d)


def comparison_matrix(rg: ReducedGraph) -> np.ndarray:
    """Laplacian plus plant attachments; its diagonal is the frequency vector."""
    return weighted_laplacian(rg) + plant_attachment_diag(rg)


def connected_components(rg: ReducedGraph) -> Components:
    adjacency: dict[int, set[int]] = {}
    for i, j in rg.weights:
        adjacency.setdefault(i, set()).add(j)
        adjacency.setdefault(j, set()).add(i)
    remaining = set(range(1, rg.n_observers + 1))
    groups = []
    while remaining:
        start = min(remaining)
        comp = _bfs_reach(rg.n_observers, adjacency, start)
        groups.append(tuple(sorted(comp)))
        remaining -= comp
    F = np.zeros((len(groups), rg.n_observers))
    for k, comp in enumerate(groups):
        F[k, [v - 1 for v in comp]] = 1.0
    return Components(groups, F)


def laplacian_nullity(L: np.ndarray, rtol: float = 1e-9) -> int:
    """Number of eigenvalues below ``rtol * max(diag(L))``."""
    scale = float(np.max(np.diag(L), initial=0.0))
    eigs = np.linalg.eigvalsh(L)
    if scale == 0.0:
        return len(eigs)
    return int(np.sum(eigs < rtol * scale))


# --- generators -------------------------------------------------------------

def complete_graph(n_observers: int, weight: float = 1.0) -> ObserverGraph:
    n = n_observers
    return ObserverGraph(
        n, {(i, j): weight for i in range(n + 1) for j in range(i + 1, n + 1)}
    )


def path_graph(n_observers: int, weight: float = 1.0) -> ObserverGraph:
    """Path ``0 - 1 - ... - N``."""
    return ObserverGraph(n_observers, {(i, i + 1): weight for i in range(n_observers)})


def star_graph(n_observers: int, weight: float = 1.0) -> ObserverGraph:
    """Every observer attached to the plant only."""
    return ObserverGraph(
        n_observers, {(0, j): weight for j in range(1, n_observers + 1)}
    )


def _prufer_decode(seq: list[int], n_nodes: int) -> list[Edge]:
    degree = [1] * n_nodes
    for v in seq:
        degree[v] += 1
    leaves = [v for v in range(n_nodes) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for v in seq:
        leaf = heapq.heappop(leaves)
        edges.append(_edge_key(leaf, v))
        degree[v] -= 1
        if degree[v] == 1:
            heapq.heappush(leaves, v)
    u, w = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append(_edge_key(u, w))
    return edges


def random_connected_graph(
    n_observers: int,
    rng: np.random.Generator | int | None = None,
    weight_range: tuple[float, float] = (0.1, 2.0),
    extra_edge_prob: float = 0.3,
) -> ObserverGraph:
    """Uniform random spanning tree on ``0..N`` plus random extra edges.

    The tree comes from a uniformly drawn Pruefer sequence, so the result is
    always connected. Each pair not in the tree is then added with probability
    ``extra_edge_prob``. Weights are uniform on ``weight_range``.
    """
    rng = np.random.default_rng(rng)
    n_nodes = n_observers + 1
    if n_nodes == 2:
        tree = [(0, 1)]
    else:
        seq = [int(v) for v in rng.integers(0, n_nodes, size=n_nodes - 2)]
        tree = _prufer_decode(seq, n_nodes)
    edges = set(tree)
    for i in range(n_nodes):
        for j in range(i + 1, n_nodes):
            if (i, j) not in edges and rng.random() < extra_edge_prob:
                edges.add((i, j))
    lo, hi = weight_range
    ordered = sorted(edges)
    mus = rng.uniform(lo, hi, size=len(ordered))
    return ObserverGraph(n_observers, {e: float(m) for e, m in zip(ordered, mus)})
