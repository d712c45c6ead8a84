"""
Undirected simple graphs with dense vertex ids, connectivity, k-hop vicinities
and the stochastic block model generator.

Random source
-------------
``sbm_generate`` draws from numpy's ``PCG64`` bit generator seeded with the
64-bit ``SbmConfig.seed``. One uniform double is drawn per vertex pair, in the
row-major order of ``numpy.triu_indices(n, 1)``; the pair is kept when the draw
is below its block probability. Clusters are contiguous id blocks whose sizes
differ by at most one (``numpy.array_split``).
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .errors import DataFormatError, UsageError


@dataclass(frozen=True, eq=False)
class Graph:
    """
    Immutable undirected simple graph.

    Arguments
    ---------
    num_vertices : vertex count; vertices are 0..num_vertices-1
    edges : int64 array of shape (m, 2), rows (u, v) with u < v, sorted
        lexicographically, no duplicates. The row index is the edge id.
    adjacency : tuple of sorted int64 arrays, one neighbor list per vertex
    """
    num_vertices: int
    edges: np.ndarray
    adjacency: Tuple[np.ndarray, ...]

    @property
    def num_edges(self):
        return len(self.edges)

    def degrees(self):
        return np.array([len(nbrs) for nbrs in self.adjacency], dtype=np.int64)

    @cached_property
    def matrix(self):
        """Symmetric CSR adjacency matrix."""
        n = self.num_vertices
        if self.num_edges == 0:
            return sparse.csr_matrix((n, n), dtype=np.float64)
        u, v = self.edges[:, 0], self.edges[:, 1]
        rows = np.concatenate([u, v])
        cols = np.concatenate([v, u])
        data = np.ones(len(rows), dtype=np.float64)
        return sparse.csr_matrix((data, (rows, cols)), shape=(n, n))

    def edge_index(self):
        """Map (u, v) with u < v to its edge id."""
        return {(int(u), int(v)): i for i, (u, v) in enumerate(self.edges)}

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.num_vertices == other.num_vertices
                and np.array_equal(self.edges, other.edges))

    __hash__ = None


def build_graph(num_vertices: int, raw_edges: Iterable[Sequence[int]]) -> Graph:
    """
    Canonicalize an edge list into a Graph: self-loops dropped, duplicates
    merged, endpoints ordered.

    Raises DataFormatError naming the offending edge when an id is out of range.
    """
    if num_vertices < 0:
        raise DataFormatError(f"negative vertex count {num_vertices}")
    canonical = set()
    for raw in raw_edges:
        u, v = int(raw[0]), int(raw[1])
        if not (0 <= u < num_vertices and 0 <= v < num_vertices):
            raise DataFormatError(f"edge ({u}, {v}) has a vertex id outside [0, {num_vertices})")
        if u == v:
            continue
        canonical.add((min(u, v), max(u, v)))
    edges = np.array(sorted(canonical), dtype=np.int64).reshape(-1, 2)
    neighbors = [[] for _ in range(num_vertices)]
    for u, v in edges:
        neighbors[u].append(v)
        neighbors[v].append(u)
    adjacency = tuple(np.array(sorted(nbrs), dtype=np.int64) for nbrs in neighbors)
    return Graph(num_vertices=num_vertices, edges=edges, adjacency=adjacency)


def connected_components(g: Graph):
    """Return (component count, label per vertex); labels are 0..count-1."""
    if g.num_vertices == 0:
        return 0, np.zeros(0, dtype=np.int64)
    count, labels = csgraph.connected_components(g.matrix, directed=False)
    return int(count), labels.astype(np.int64)


def cycle_rank(g: Graph):
    """|E| - |V| + component count, the number of independent loops."""
    count, _ = connected_components(g)
    return g.num_edges - g.num_vertices + count


def induced_subgraph(g: Graph, vertices: Sequence[int]):
    """
    Subgraph induced by ``vertices``; local id i is ``vertices[i]``.

    Returns (Graph, remap) where remap is the array of original ids.
    """
    remap = np.asarray(vertices, dtype=np.int64)
    local = np.full(g.num_vertices, -1, dtype=np.int64)
    local[remap] = np.arange(len(remap))
    if g.num_edges:
        lu, lv = local[g.edges[:, 0]], local[g.edges[:, 1]]
        keep = (lu >= 0) & (lv >= 0)
        sub_edges = np.stack([lu[keep], lv[keep]], axis=1)
    else:
        sub_edges = np.zeros((0, 2), dtype=np.int64)
    return build_graph(len(remap), sub_edges), remap


def hop_distances(g: Graph, center: int):
    """Unweighted hop distance from center; inf for unreachable vertices."""
    return csgraph.shortest_path(g.matrix, directed=False, unweighted=True, indices=center)


def khop_vicinity(g: Graph, center: int, k: int):
    """
    Induced subgraph on all vertices within k hops of center.

    The center gets local id 0, the other vertices follow in ascending original
    id. Returns (Graph, remap) with remap[local] = original id.
    """
    if not 0 <= center < g.num_vertices:
        raise UsageError(f"center {center} is not a vertex of a graph with {g.num_vertices} vertices")
    if k < 0:
        raise UsageError(f"hop count must be nonnegative, got {k}")
    dist = hop_distances(g, center)
    inside = np.flatnonzero(dist <= k)
    others = inside[inside != center]
    return induced_subgraph(g, np.concatenate([[center], others]))


def largest_connected_subgraph(g: Graph):
    """
    Induced subgraph of the largest component, ties broken by the smallest
    minimum original vertex id. Returns (Graph, remap).
    """
    if g.num_vertices == 0:
        return g, np.zeros(0, dtype=np.int64)
    count, labels = connected_components(g)
    sizes = np.bincount(labels, minlength=count)
    first_vertex = np.array([np.flatnonzero(labels == c)[0] for c in range(count)])
    best = min(range(count), key=lambda c: (-sizes[c], first_vertex[c]))
    return induced_subgraph(g, np.flatnonzero(labels == best))


@dataclass(frozen=True)
class SbmConfig:
    num_vertices: int
    num_clusters: int
    p_intra: float
    p_inter: float
    seed: int = 0

    def __post_init__(self):
        if self.num_vertices < 0:
            raise UsageError(f"num_vertices must be nonnegative, got {self.num_vertices}")
        if self.num_clusters < 1:
            raise UsageError(f"num_clusters must be at least 1, got {self.num_clusters}")
        if not 0.0 <= self.p_inter <= self.p_intra <= 1.0:
            raise UsageError(
                f"probabilities must satisfy 0 <= p_inter <= p_intra <= 1, got p_inter={self.p_inter}, p_intra={self.p_intra}")

    def cluster_labels(self):
        labels = np.empty(self.num_vertices, dtype=np.int64)
        for c, block in enumerate(np.array_split(np.arange(self.num_vertices), self.num_clusters)):
            labels[block] = c
        return labels


def sbm_generate(cfg: SbmConfig) -> Graph:
    """Sample a stochastic block model graph (see module docstring for the random source)."""
    n = cfg.num_vertices
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    rows, cols = np.triu_indices(n, k=1)
    labels = cfg.cluster_labels()
    prob = np.where(labels[rows] == labels[cols], cfg.p_intra, cfg.p_inter)
    keep = rng.random(len(rows)) < prob
    return build_graph(n, np.stack([rows[keep], cols[keep]], axis=1))


def sbm_expected_edges(cfg: SbmConfig):
    """Expected edge count and its standard deviation."""
    labels = cfg.cluster_labels()
    sizes = np.bincount(labels, minlength=cfg.num_clusters)
    intra = int(sum(s * (s - 1) // 2 for s in sizes))
    inter = cfg.num_vertices * (cfg.num_vertices - 1) // 2 - intra
    mean = cfg.p_intra * intra + cfg.p_inter * inter
    var = intra * cfg.p_intra * (1 - cfg.p_intra) + inter * cfg.p_inter * (1 - cfg.p_inter)
    return mean, float(np.sqrt(var))
