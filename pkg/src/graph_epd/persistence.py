"""
Diagram types and the decomposed Union-Find engine.

``pd0_union_find`` is the elder-rule sweep over the ascending filtration.
``epd1_decomposed`` finds the extended 1D points one vertex at a time: for a
center i every upper edge (i, j) is rerouted to its own clone of i, and a
union-find sweep over the vertices after i records a point
(f(later endpoint of the merging edge), f(i)) each time two clone-rooted
components meet. The per-center sweeps are independent.
"""

import logging
import multiprocessing
from dataclasses import dataclass, field, replace
from typing import Dict, List, NamedTuple, Optional

import numpy as np

from .errors import DataFormatError, InvariantViolation
from .filtration import FilteredGraph
from .union_find import OpStats, UnionFind

log = logging.getLogger(__name__)

NEGATIVE = "negative"
POSITIVE = "positive"


class Simplex(NamedTuple):
    """Vertex (dim 0) or edge (dim 1) of the graph, by id."""
    dim: int
    index: int

    def __str__(self):
        return f"{'v' if self.dim == 0 else 'e'}{self.index}"

    @classmethod
    def parse(cls, text):
        if len(text) < 2 or text[0] not in "ve" or not text[1:].isdigit():
            raise DataFormatError(f"invalid simplex reference '{text}'")
        return cls(0 if text[0] == 'v' else 1, int(text[1:]))


@dataclass(frozen=True)
class PersistencePair:
    birth: float
    death: float
    dim: int
    creator: Optional[Simplex] = None
    destroyer: Optional[Simplex] = None

    @property
    def persistence(self):
        return abs(self.death - self.birth)

    def sort_key(self):
        creator = (self.creator.dim, self.creator.index) if self.creator else (-1, -1)
        return (self.birth, self.death, creator)


@dataclass
class PersistenceDiagram:
    dim0: List[PersistencePair] = field(default_factory=list)
    dim1: List[PersistencePair] = field(default_factory=list)
    include_zero_persistence: bool = True

    def __len__(self):
        return len(self.dim0) + len(self.dim1)

    def pairs(self, dim=None):
        if dim == 0:
            return list(self.dim0)
        if dim == 1:
            return list(self.dim1)
        return list(self.dim0) + list(self.dim1)

    def points(self, dim=None):
        """(k, 2) float array of (birth, death)."""
        pts = [(p.birth, p.death) for p in self.pairs(dim)]
        return np.array(pts, dtype=np.float64).reshape(-1, 2)

    def sorted(self):
        return replace(self, dim0=sorted(self.dim0, key=PersistencePair.sort_key),
                       dim1=sorted(self.dim1, key=PersistencePair.sort_key))

    def without_zero_persistence(self):
        return PersistenceDiagram([p for p in self.dim0 if p.birth != p.death],
                                  [p for p in self.dim1 if p.birth != p.death],
                                  include_zero_persistence=False)


@dataclass(frozen=True)
class EdgePairing:
    edge: int
    role: str
    pair: PersistencePair

    @property
    def partner(self):
        """The simplex the edge is paired with."""
        return self.pair.creator if self.role == NEGATIVE else self.pair.destroyer


@dataclass
class EdgePairingMap:
    entries: Dict[int, EdgePairing]

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, edge):
        return self.entries[edge]

    def edges(self, role=None):
        return [e for e in sorted(self.entries) if role is None or self.entries[e].role == role]

    def targets(self):
        """(m, 2) array of the (birth, death) pair of every edge, by edge id."""
        return np.array([(self.entries[e].pair.birth, self.entries[e].pair.death)
                         for e in sorted(self.entries)], dtype=np.float64).reshape(-1, 2)


#########################
# 0D UNION-FIND (SWEEP) #
#########################

def pd0_union_find(fg: FilteredGraph, stats: Optional[OpStats] = None):
    """
    Elder-rule 0D diagram. The ascending edge order is the pop order of the
    later endpoints, so walking it relaxes every edge when its later endpoint
    pops. The essential component of each connected component is not reported.
    """
    uf = UnionFind(fg.vertex_rank, stats)
    values = fg.vertex_values
    pairs = []
    for e in fg.edge_order_asc:
        u, v = fg.graph.edges[e]
        merged = uf.union(u, v)
        if merged is None:
            continue
        _, loser = merged
        pairs.append(PersistencePair(float(values[loser]), float(fg.edge_values_asc[e]), 0,
                                     Simplex(0, int(loser)), Simplex(1, int(e))))
    return pairs


#######################
# 1D DECOMPOSED (EPD) #
#######################

def upper_edges(fg: FilteredGraph):
    """Upper edge ids of every vertex (edges to later vertices), by edge id."""
    upper = [[] for _ in range(fg.num_vertices)]
    for e, earlier in enumerate(fg.edge_earlier):
        upper[earlier].append(e)
    return upper


def union_find_step(fg: FilteredGraph, center: int, clones=None, stats: Optional[OpStats] = None):
    """
    One center of the decomposed engine.

    Arguments
    ---------
    fg : filtered graph
    center : vertex id
    clones : upper edge ids of center, one clone each (computed when None)
    stats : optional OpStats accumulating find/union counts

    Returns
    -------
    list of dim1 PersistencePair, in the order they are recorded. The creator
    is the merging edge, the destroyer the upper edge of the younger clone.
    """
    rank = fg.vertex_rank
    r0 = rank[center]
    if clones is None:
        clones = [e for e in range(fg.num_edges) if fg.edge_earlier[e] == center]
    clones = sorted(int(c) for c in clones)
    k = len(clones)
    if k < 2:
        return []
    clone_of = {e: c for c, e in enumerate(clones)}

    # elements: clones first, then the vertices after center in vertex order
    size = k + fg.num_vertices - r0 - 1
    uf = UnionFind(np.arange(size), stats)
    death = float(fg.vertex_values[center])
    pairs = []
    for e in fg.edge_order_asc:
        earlier = fg.edge_earlier[e]
        if rank[earlier] < r0:
            continue
        if earlier == center:
            if e not in clone_of:
                continue
            a = clone_of[e]
        else:
            a = k + rank[earlier] - r0 - 1
        b = k + rank[fg.edge_later[e]] - r0 - 1
        ra, rb = uf.find(a), uf.find(b)
        if ra == rb:
            continue
        _, loser = uf.union_roots(ra, rb)
        if ra < k and rb < k:
            pairs.append(PersistencePair(float(fg.edge_values_asc[e]), death, 1,
                                         Simplex(1, int(e)), Simplex(1, clones[loser])))
    return pairs


_worker_fg = None


def _init_worker(fg):
    global _worker_fg
    _worker_fg = fg


def _step_in_worker(center, clones):
    stats = OpStats()
    return union_find_step(_worker_fg, center, clones, stats), stats


def epd1_decomposed(fg: FilteredGraph, n_jobs: int = 1, stats: Optional[OpStats] = None):
    """Extended 1D diagram, concatenated in ascending center order."""
    upper = upper_edges(fg)
    tasks = [(int(i), upper[i]) for i in fg.vertex_order if len(upper[i]) >= 2]
    log.debug("decomposed engine: %d centers with at least two upper edges", len(tasks))
    if n_jobs > 1 and len(tasks) > 1:
        with multiprocessing.Pool(n_jobs, initializer=_init_worker, initargs=(fg,)) as pool:
            results = pool.starmap(_step_in_worker, tasks)
        pairs = []
        for step_pairs, step_stats in results:
            pairs.extend(step_pairs)
            if stats is not None:
                stats.add(step_stats)
        return pairs
    pairs = []
    for center, clones in tasks:
        pairs.extend(union_find_step(fg, center, clones, stats))
    return pairs


def pairings_from_diagram(fg: FilteredGraph, diagram: PersistenceDiagram):
    """
    Edge-wise view of a diagram: dim0 destroyers are negative edges, dim1
    creators are positive edges. Every edge must appear exactly once.
    """
    entries = {}
    for role, pairs, attr in ((NEGATIVE, diagram.dim0, "destroyer"), (POSITIVE, diagram.dim1, "creator")):
        for pair in pairs:
            ref = getattr(pair, attr)
            if ref is None or ref.dim != 1:
                raise InvariantViolation(f"pair {pair} has no edge to attach to")
            if ref.index in entries:
                raise InvariantViolation(
                    f"edge e{ref.index} is both {entries[ref.index].role} and {role}")
            entries[ref.index] = EdgePairing(ref.index, role, pair)
    missing = sorted(set(range(fg.num_edges)) - set(entries))
    if missing:
        raise InvariantViolation(f"edges left unpaired: {', '.join(f'e{e}' for e in missing[:10])}")
    return EdgePairingMap(entries)


def edge_pairings(fg: FilteredGraph):
    """Merge pd0_union_find and epd1_decomposed into one record per edge."""
    diagram = PersistenceDiagram(pd0_union_find(fg), epd1_decomposed(fg))
    return pairings_from_diagram(fg, diagram)
