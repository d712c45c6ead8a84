import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_graph
from graph_epd.errors import DataFormatError, InvariantViolation
from graph_epd.filtration import build_filtration
from graph_epd.graph import build_graph, cycle_rank
from graph_epd.persistence import (NEGATIVE, POSITIVE, PersistenceDiagram, PersistencePair, Simplex,
                                   edge_pairings, epd1_decomposed, pairings_from_diagram, pd0_union_find,
                                   union_find_step, upper_edges)
from graph_epd.union_find import OpStats


def values(pairs):
    return sorted((p.birth, p.death) for p in pairs)


def test_simplex_text():
    assert str(Simplex(0, 3)) == "v3"
    assert Simplex.parse("e12") == Simplex(1, 12)
    with pytest.raises(DataFormatError):
        Simplex.parse("x1")


def test_diagram_points_and_zero_persistence():
    d = PersistenceDiagram([PersistencePair(1.0, 1.0, 0), PersistencePair(1.0, 2.0, 0)],
                           [PersistencePair(4.0, 1.0, 1)])
    assert d.points().tolist() == [[1.0, 1.0], [1.0, 2.0], [4.0, 1.0]]
    assert d.points(1).tolist() == [[4.0, 1.0]]
    trimmed = d.without_zero_persistence()
    assert len(trimmed) == 2
    assert not trimmed.include_zero_persistence


class TestZeroDimensional:

    def test_elder_rule(self):
        fg = build_filtration(build_graph(3, [(0, 2), (1, 2)]), [0.0, 1.0, 2.0])
        assert values(pd0_union_find(fg)) == [(1.0, 2.0), (2.0, 2.0)]

    def test_path_is_all_zero_persistence(self, path3):
        fg = build_filtration(path3, [1.0, 2.0, 3.0])
        assert values(pd0_union_find(fg)) == [(2.0, 2.0), (3.0, 3.0)]

    def test_single_vertex(self):
        assert pd0_union_find(build_filtration(build_graph(1, []), [0.0])) == []

    def test_example(self, example_fg):
        assert values(pd0_union_find(example_fg)) == [(2, 3), (3, 3), (4, 4), (5, 5), (6, 6)]


class TestUnionFindStep:

    def test_first_merge_of_example_center(self, example_fg):
        pairs = union_find_step(example_fg, 0)
        assert [(p.birth, p.death) for p in pairs] == [(4.0, 1.0), (5.0, 1.0)]
        # merging edges (2,3) and (3,4), younger clones (0,3) and (0,4)
        assert [p.creator for p in pairs] == [Simplex(1, 5), Simplex(1, 6)]
        assert [p.destroyer for p in pairs] == [Simplex(1, 1), Simplex(1, 2)]

    def test_single_upper_edge(self, example_fg):
        assert union_find_step(example_fg, 3) == []

    def test_cycle_minimum_center(self, cycle4_fg):
        assert [(p.birth, p.death) for p in union_find_step(cycle4_fg, 0)] == [(4.0, 1.0)]

    def test_clones_match_upper_edges(self, example_fg):
        upper = upper_edges(example_fg)
        assert upper[0] == [0, 1, 2]
        assert union_find_step(example_fg, 0, upper[0]) == union_find_step(example_fg, 0)

    def test_counts_operations(self, example_fg):
        stats = OpStats()
        union_find_step(example_fg, 0, stats=stats)
        assert stats.unions == 7
        assert stats.finds > 0


class TestExtendedOneDimensional:

    def test_example(self, example_fg):
        assert values(epd1_decomposed(example_fg)) == [(4.0, 1.0), (5.0, 1.0)]

    def test_cycle(self, cycle4_fg):
        assert values(epd1_decomposed(cycle4_fg)) == [(4.0, 1.0)]

    def test_tree(self):
        fg = build_filtration(build_graph(5, [(0, 1), (1, 2), (1, 3), (3, 4)]), [3.0, 0.0, 4.0, 1.0, 2.0])
        assert epd1_decomposed(fg) == []

    @settings(derandomize=True, max_examples=40, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1))
    def test_point_count_is_cycle_rank(self, seed):
        rng = np.random.default_rng(seed)
        g = random_graph(rng)
        fg = build_filtration(g, rng.integers(0, 4, g.num_vertices).astype(float))
        dim1 = epd1_decomposed(fg)
        assert len(dim1) == cycle_rank(g)
        assert all(p.birth >= p.death for p in dim1)

    def test_thinnest_pair_over_all_cycles(self):
        rng = np.random.default_rng(12)
        checked = 0
        while checked < 200:
            g = random_graph(rng, max_vertices=7)
            if g.num_edges > 12:
                continue
            fg = build_filtration(g, rng.permutation(g.num_vertices).astype(float))
            position = np.empty(g.num_edges, dtype=np.int64)
            position[fg.edge_order_asc] = np.arange(g.num_edges)
            index = g.edge_index()
            cycles = [([index[tuple(sorted((c[i - 1], c[i])))] for i in range(len(c))],
                       min(fg.vertex_values[c]))
                      for c in nx.simple_cycles(nx.Graph(g.edges.tolist()))]
            for p in epd1_decomposed(fg):
                e = p.creator.index
                assert p.birth == fg.edge_values_asc[e]
                # cycles closed by e: every other edge comes earlier in the filtration
                closed = [lowest for edges, lowest in cycles
                          if e in edges and max(position[edges]) == position[e]]
                assert closed
                assert p.death == max(closed)
            checked += 1

    def test_parallel_equals_sequential(self):
        rng = np.random.default_rng(9)
        g = random_graph(rng, max_vertices=30, p=0.3)
        fg = build_filtration(g, rng.random(g.num_vertices))
        assert epd1_decomposed(fg, n_jobs=2) == epd1_decomposed(fg, n_jobs=1)


class TestPairings:

    def test_cycle(self, cycle4_fg):
        pairing = edge_pairings(cycle4_fg)
        assert len(pairing.edges(NEGATIVE)) == 3
        assert pairing.edges(POSITIVE) == [3]
        assert (pairing[3].pair.birth, pairing[3].pair.death) == (4.0, 1.0)
        assert pairing.targets().shape == (4, 2)

    def test_tree_is_all_negative(self, path3):
        pairing = edge_pairings(build_filtration(path3, [2.0, 0.0, 1.0]))
        assert pairing.edges(POSITIVE) == []
        assert pairing[0].partner == Simplex(0, 0)

    def test_edge_paired_twice(self, cycle4_fg):
        dim0 = pd0_union_find(cycle4_fg)
        bogus = PersistencePair(4.0, 1.0, 1, dim0[0].destroyer, Simplex(1, 1))
        with pytest.raises(InvariantViolation, match="both"):
            pairings_from_diagram(cycle4_fg, PersistenceDiagram(dim0, [bogus]))

    def test_edge_left_unpaired(self, cycle4_fg):
        with pytest.raises(InvariantViolation, match="unpaired"):
            pairings_from_diagram(cycle4_fg, PersistenceDiagram(pd0_union_find(cycle4_fg), []))
