"""Engine dispatch for exact extended persistence diagrams."""

from .errors import InvariantViolation, UsageError
from .graph import connected_components
from .persistence import (PersistenceDiagram, epd1_decomposed, pairings_from_diagram,
                          pd0_union_find)
from .reduction import ReductionStats, epd_matrix_reduction
from .union_find import OpStats

ENGINES = ("unionfind", "reduction")


def compute_epd(fg, engine="unionfind", n_jobs=1, stats=None):
    """
    Exact diagram and edge-pairing map of a filtered graph.

    Arguments
    ---------
    fg : FilteredGraph
    engine : 'unionfind' (decomposed Union-Find) or 'reduction' (matrix reduction)
    n_jobs : worker processes for the per-center steps of the decomposed engine
    stats : OpStats (unionfind) or ReductionStats (reduction) to accumulate
        operation counts, optional

    Returns
    -------
    (PersistenceDiagram, EdgePairingMap)
    """
    if engine == "unionfind":
        diagram = PersistenceDiagram(pd0_union_find(fg, stats), epd1_decomposed(fg, n_jobs, stats))
    elif engine == "reduction":
        diagram = epd_matrix_reduction(fg, stats)
    else:
        raise UsageError(f"unknown engine '{engine}' (expected one of: {', '.join(ENGINES)})")
    check_counts(fg, diagram)
    return diagram, pairings_from_diagram(fg, diagram)


def check_counts(fg, diagram):
    """|dim0| = |V| - components and |dim1| = |E| - |V| + components."""
    components, _ = connected_components(fg.graph)
    expected0 = fg.num_vertices - components
    expected1 = fg.num_edges - fg.num_vertices + components
    if len(diagram.dim0) != expected0 or len(diagram.dim1) != expected1:
        raise InvariantViolation(f"diagram has {len(diagram.dim0)} 0D and {len(diagram.dim1)} 1D points, "
                                 f"expected {expected0} and {expected1}")


def new_stats(engine):
    return ReductionStats() if engine == "reduction" else OpStats()


def stats_count(stats):
    """Single operation count: union-find operations or column additions."""
    if isinstance(stats, ReductionStats):
        return stats.additions
    return stats.total
