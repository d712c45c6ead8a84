"""
Vertex filter functions and the filtered graph they induce.

A filter assigns one real value per vertex. Edges take the maximum of their
endpoint values in the ascending filtration and the minimum in the descending
one. Ties are broken by vertex id, so every engine sees the same strict order:
vertices sort by (value, id), ascending edges by (rank of the later endpoint,
edge id) and descending edges by (rank of the earlier endpoint descending,
edge id). Reported persistence coordinates always use the raw values.

Filter specs
------------
``degree``, ``hks:<t>``, ``ricci-dist[:<alpha>]``, ``clustering``,
``centrality``; ``standard`` expands to ``hks:10,hks:0.1,ricci-dist:0.5,degree``.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np
from scipy import optimize, sparse
from scipy.linalg import eigh
from scipy.sparse import csgraph

from .errors import DataFormatError, InvariantViolation, UsageError
from .graph import Graph

log = logging.getLogger(__name__)

FILTER_NAMES = ("degree", "hks", "ricci-dist", "clustering", "centrality")
STANDARD_FILTERS = ("hks:10", "hks:0.1", "ricci-dist:0.5", "degree")
DEFAULT_RICCI_ALPHA = 0.5


@dataclass(frozen=True, eq=False)
class FilteredGraph:
    graph: Graph
    vertex_values: np.ndarray
    vertex_order: np.ndarray
    vertex_rank: np.ndarray
    edge_values_asc: np.ndarray
    edge_values_desc: np.ndarray
    edge_order_asc: np.ndarray
    edge_order_desc: np.ndarray
    edge_later: np.ndarray
    edge_earlier: np.ndarray

    @property
    def num_vertices(self):
        return self.graph.num_vertices

    @property
    def num_edges(self):
        return self.graph.num_edges


def build_filtration(g: Graph, vertex_values) -> FilteredGraph:
    values = np.asarray(vertex_values, dtype=np.float64).reshape(-1)
    if len(values) != g.num_vertices:
        raise DataFormatError(f"expected {g.num_vertices} filter values, got {len(values)}")
    bad = np.flatnonzero(~np.isfinite(values))
    if len(bad):
        raise DataFormatError(f"filter value of vertex {bad[0]} is not finite ({values[bad[0]]})")

    ids = np.arange(g.num_vertices)
    order = np.lexsort((ids, values))
    rank = np.empty(g.num_vertices, dtype=np.int64)
    rank[order] = ids

    u, v = g.edges[:, 0], g.edges[:, 1]
    u_first = rank[u] < rank[v]
    later = np.where(u_first, v, u)
    earlier = np.where(u_first, u, v)
    edge_ids = np.arange(g.num_edges)
    return FilteredGraph(
        graph=g,
        vertex_values=values,
        vertex_order=order,
        vertex_rank=rank,
        edge_values_asc=np.maximum(values[u], values[v]),
        edge_values_desc=np.minimum(values[u], values[v]),
        edge_order_asc=np.lexsort((edge_ids, rank[later])),
        edge_order_desc=np.lexsort((edge_ids, -rank[earlier])),
        edge_later=later,
        edge_earlier=earlier,
    )


###########
# FILTERS #
###########

def degree_filter(g: Graph):
    return g.degrees().astype(np.float64)


def centrality_filter(g: Graph):
    if g.num_vertices < 2:
        return np.zeros(g.num_vertices)
    return g.degrees() / (g.num_vertices - 1)


def clustering_filter(g: Graph):
    """Local clustering coefficient; 0 when the degree is below 2."""
    a = g.matrix
    triangles = np.asarray((a @ a).multiply(a).sum(axis=1)).reshape(-1) / 2
    deg = g.degrees().astype(np.float64)
    pairs = deg * (deg - 1) / 2
    out = np.zeros(g.num_vertices)
    np.divide(triangles, pairs, out=out, where=deg >= 2)
    return out


def hks_filter(g: Graph, t: float):
    """
    Heat kernel signature sum_k exp(-lambda_k t) phi_k(v)^2 on the unnormalized
    Laplacian L = D - A, by dense symmetric eigendecomposition.
    """
    if t <= 0:
        raise UsageError(f"heat kernel temperature must be positive, got {t}")
    if g.num_vertices == 0:
        return np.zeros(0)
    lap = csgraph.laplacian(g.matrix).toarray()
    eigenvalues, eigenvectors = eigh(lap)
    return np.square(eigenvectors) @ np.exp(-t * eigenvalues)


def _lazy_measure(g: Graph, x: int, alpha: float):
    nbrs = g.adjacency[x]
    support = np.concatenate([[x], nbrs]).astype(np.int64)
    mass = np.concatenate([[alpha], np.full(len(nbrs), (1.0 - alpha) / len(nbrs))])
    return support, mass


def transport_cost(mu, nu, cost):
    """Exact 1-Wasserstein cost between two discrete measures (LP over plans)."""
    a, b = len(mu), len(nu)
    a_eq = np.zeros((a + b, a * b))
    for i in range(a):
        a_eq[i, i * b:(i + 1) * b] = 1.0
    for j in range(b):
        a_eq[a + j, j::b] = 1.0
    b_eq = np.concatenate([mu, nu])
    # one marginal constraint is implied by the others
    result = optimize.linprog(np.asarray(cost, dtype=np.float64).reshape(-1),
                              A_eq=a_eq[:-1], b_eq=b_eq[:-1], bounds=(0, None), method="highs")
    if not result.success:
        raise InvariantViolation(f"transport problem failed: {result.message}")
    return float(result.fun)


def ricci_curvature(g: Graph, alpha: float = DEFAULT_RICCI_ALPHA):
    """
    Ollivier-Ricci curvature of every edge, kappa = 1 - W1(m_u, m_v), where m_x
    keeps mass alpha at x and spreads 1 - alpha uniformly on its neighbors.
    The ground metric is the unweighted shortest-path distance.
    """
    if not 0.0 <= alpha <= 1.0:
        raise UsageError(f"laziness alpha must lie in [0, 1], got {alpha}")
    if g.num_edges == 0:
        return np.zeros(0)
    hops = csgraph.shortest_path(g.matrix, directed=False, unweighted=True)
    kappa = np.empty(g.num_edges)
    for e, (u, v) in enumerate(g.edges):
        su, mu = _lazy_measure(g, u, alpha)
        sv, mv = _lazy_measure(g, v, alpha)
        cost = hops[np.ix_(su, sv)]
        if not np.all(np.isfinite(cost)):
            raise InvariantViolation(f"supports of edge ({u}, {v}) are disconnected")
        kappa[e] = 1.0 - transport_cost(mu, mv, cost)
    return kappa


def ricci_edge_lengths(kappa):
    return 1.0 + np.maximum(0.0, -np.asarray(kappa))


def ricci_distance_filter(g: Graph, centers: Iterable[int], alpha: float = DEFAULT_RICCI_ALPHA):
    """Weighted distance to the nearest center with edge length 1 + max(0, -kappa)."""
    centers = sorted({int(c) for c in centers})
    if not centers:
        raise UsageError("ricci-dist needs at least one center")
    for c in centers:
        if not 0 <= c < g.num_vertices:
            raise UsageError(f"center {c} is not a vertex of a graph with {g.num_vertices} vertices")
    n = g.num_vertices
    if g.num_edges:
        lengths = ricci_edge_lengths(ricci_curvature(g, alpha))
        weights = sparse.csr_matrix((lengths, (g.edges[:, 0], g.edges[:, 1])), shape=(n, n))
    else:
        weights = sparse.csr_matrix((n, n))
    dist = csgraph.dijkstra(weights, directed=False, indices=centers, min_only=True)
    unreachable = np.flatnonzero(~np.isfinite(dist))
    if len(unreachable):
        raise DataFormatError(f"vertex {unreachable[0]} is unreachable from every center")
    return dist


###############
# FILTER SPEC #
###############

@dataclass(frozen=True)
class FilterSpec:
    name: str
    param: Optional[float] = None

    def __str__(self):
        if self.param is None:
            return self.name
        return f"{self.name}:{self.param:g}"

    @property
    def tag(self):
        return str(self).replace(':', '-')


def parse_filter_spec(text: str) -> FilterSpec:
    text = text.strip()
    name, _, param = text.partition(':')
    if name not in FILTER_NAMES:
        raise UsageError(f"unknown filter '{text}' (expected one of: {', '.join(FILTER_NAMES)}, standard)")
    if name in ("degree", "clustering", "centrality"):
        if param:
            raise UsageError(f"filter '{name}' takes no parameter")
        return FilterSpec(name)
    if not param:
        if name == "hks":
            raise UsageError("filter 'hks' needs a temperature, e.g. hks:10")
        return FilterSpec(name, DEFAULT_RICCI_ALPHA)
    try:
        value = float(param)
    except ValueError:
        raise UsageError(f"invalid parameter in filter '{text}'") from None
    return FilterSpec(name, value)


def expand_filter_specs(text: str):
    """Split a comma-separated filter list; ``standard`` expands in place."""
    specs = []
    for item in text.split(','):
        item = item.strip()
        if not item:
            continue
        if item == "standard":
            specs.extend(parse_filter_spec(s) for s in STANDARD_FILTERS)
        else:
            specs.append(parse_filter_spec(item))
    if not specs:
        raise UsageError("empty filter list")
    return specs


def filter_values(g: Graph, spec, centers=(0,)):
    """Evaluate a filter spec (FilterSpec or its string form) on g."""
    if isinstance(spec, str):
        spec = parse_filter_spec(spec)
    log.debug("filter %s on %d vertices", spec, g.num_vertices)
    if spec.name == "degree":
        return degree_filter(g)
    if spec.name == "hks":
        return hks_filter(g, spec.param)
    if spec.name == "ricci-dist":
        return ricci_distance_filter(g, centers, spec.param)
    if spec.name == "clustering":
        return clustering_filter(g)
    return centrality_filter(g)
