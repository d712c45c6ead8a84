"""
Standard extended-persistence computation by boundary-matrix reduction over GF(2).

The extended filtration lists the ascending simplices (vertex v at
(rank v, 0), edge e at (rank of its later endpoint, 1, e)) followed by the
descending cone copies (vertex v at (-rank v, 0), edge e at (-rank of its
earlier endpoint, 1, e)). Boundaries: an ascending edge has its two
endpoints, a descending vertex has its ascending copy, and a descending edge
has its ascending copy plus the descending copies of its endpoints. Columns
are sparse sets reduced left to right with symmetric differences.

Pairs (ascending vertex, ascending edge) are the 0D points and (ascending
edge, descending edge) the extended 1D points. Essential components and
descending-descending pairs are not reported.
"""

from dataclasses import dataclass

from .filtration import FilteredGraph
from .persistence import PersistenceDiagram, PersistencePair, Simplex


@dataclass
class ReductionStats:
    columns: int = 0
    additions: int = 0


def extended_filtration(fg: FilteredGraph):
    """
    Column list of the extended filtration.

    Returns (columns, boundaries): columns[j] = (part, Simplex) with part
    'asc' or 'desc'; boundaries[j] is the set of row indices of column j.
    """
    g = fg.graph
    rank = fg.vertex_rank
    asc = sorted([((int(rank[v]), 0, v), Simplex(0, v)) for v in range(g.num_vertices)]
                 + [((int(rank[fg.edge_later[e]]), 1, e), Simplex(1, e)) for e in range(g.num_edges)])
    desc = sorted([((-int(rank[v]), 0, v), Simplex(0, v)) for v in range(g.num_vertices)]
                  + [((-int(rank[fg.edge_earlier[e]]), 1, e), Simplex(1, e)) for e in range(g.num_edges)])
    columns = [("asc", s) for _, s in asc] + [("desc", s) for _, s in desc]
    index = {col: j for j, col in enumerate(columns)}

    boundaries = []
    for part, s in columns:
        if s.dim == 0:
            boundaries.append(set() if part == "asc" else {index[("asc", s)]})
            continue
        u, v = (int(x) for x in g.edges[s.index])
        if part == "asc":
            boundaries.append({index[("asc", Simplex(0, u))], index[("asc", Simplex(0, v))]})
        else:
            boundaries.append({index[("asc", s)], index[("desc", Simplex(0, u))],
                               index[("desc", Simplex(0, v))]})
    return columns, boundaries


def reduce_columns(boundaries, stats=None):
    """Left-to-right reduction; returns the (low row, column) pairs."""
    pivot_of = {}
    reduced = []
    pairs = []
    for j, boundary in enumerate(boundaries):
        col = set(boundary)
        while col:
            low = max(col)
            if low not in pivot_of:
                break
            col ^= reduced[pivot_of[low]]
            if stats is not None:
                stats.additions += 1
        reduced.append(col)
        if col:
            low = max(col)
            pivot_of[low] = j
            pairs.append((low, j))
    if stats is not None:
        stats.columns += len(boundaries)
    return pairs


def epd_matrix_reduction(fg: FilteredGraph, stats=None) -> PersistenceDiagram:
    columns, boundaries = extended_filtration(fg)
    f = fg.vertex_values
    dim0, dim1 = [], []
    for low, j in reduce_columns(boundaries, stats):
        (low_part, low_s), (col_part, col_s) = columns[low], columns[j]
        if low_part == "asc" and col_part == "asc" and low_s.dim == 0:
            dim0.append(PersistencePair(float(f[low_s.index]), float(fg.edge_values_asc[col_s.index]),
                                        0, low_s, col_s))
        elif low_part == "asc" and col_part == "desc" and low_s.dim == 1 and col_s.dim == 1:
            dim1.append(PersistencePair(float(fg.edge_values_asc[low_s.index]),
                                        float(fg.edge_values_desc[col_s.index]), 1, low_s, col_s))
    return PersistenceDiagram(dim0, dim1)
