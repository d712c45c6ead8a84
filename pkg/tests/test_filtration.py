import itertools
import math

import networkx as nx
import numpy as np
import pytest
from scipy.linalg import expm

from conftest import random_graph
from graph_epd.errors import DataFormatError, UsageError
from graph_epd.filtration import (FilterSpec, build_filtration, centrality_filter, clustering_filter,
                                  degree_filter, expand_filter_specs, filter_values, hks_filter,
                                  parse_filter_spec, ricci_curvature, ricci_distance_filter,
                                  ricci_edge_lengths)
from graph_epd.graph import build_graph


class TestBuildFiltration:

    def test_edge_values_take_max_and_min(self, path3):
        fg = build_filtration(path3, [1.0, 2.0, 3.0])
        assert fg.edge_values_asc.tolist() == [2.0, 3.0]
        assert fg.edge_values_desc.tolist() == [1.0, 2.0]

    def test_ties_broken_by_id(self, cycle4):
        fg = build_filtration(cycle4, np.zeros(4))
        assert fg.vertex_order.tolist() == [0, 1, 2, 3]
        # edges (0,1) (0,3) (1,2) (2,3): later endpoints 1 3 2 3
        assert fg.edge_order_asc.tolist() == [0, 2, 1, 3]
        # earlier endpoints 0 0 1 2, taken from the end
        assert fg.edge_order_desc.tolist() == [3, 2, 0, 1]

    def test_example_vertex_order(self, example_fg):
        assert example_fg.vertex_order.tolist() == [0, 1, 2, 3, 4, 5]
        assert example_fg.num_vertices == 6
        assert example_fg.num_edges == 7

    def test_rejects_wrong_length(self, path3):
        with pytest.raises(DataFormatError, match="expected 3"):
            build_filtration(path3, [1.0, 2.0])

    @pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
    def test_rejects_non_finite(self, path3, bad):
        with pytest.raises(DataFormatError, match="vertex 1"):
            build_filtration(path3, [0.0, bad, 1.0])


class TestFilters:

    def test_degree(self, cycle4, star3):
        assert degree_filter(cycle4).tolist() == [2, 2, 2, 2]
        assert degree_filter(star3).tolist() == [3, 1, 1, 1]

    def test_degree_matches_adjacency(self, sbm_small):
        assert degree_filter(sbm_small).tolist() == [len(nbrs) for nbrs in sbm_small.adjacency]

    def test_hks_single_edge(self):
        g = build_graph(2, [(0, 1)])
        expected = 0.5 + 0.5 * math.exp(-0.2)
        assert hks_filter(g, 0.1) == pytest.approx([expected, expected], abs=1e-12)
        assert hks_filter(g, 1e4) == pytest.approx([0.5, 0.5], abs=1e-12)

    def test_hks_vertex_transitive(self, triangle):
        values = hks_filter(triangle, 10)
        assert values == pytest.approx(np.full(3, values[0]))

    @pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
    def test_hks_is_the_heat_kernel_diagonal(self, t):
        rng = np.random.default_rng(17)
        for _ in range(20):
            g = random_graph(rng, max_vertices=12)
            nxg = nx.Graph()
            nxg.add_nodes_from(range(g.num_vertices))
            nxg.add_edges_from(g.edges.tolist())
            values = hks_filter(g, t)
            assert values.sum() == pytest.approx(np.exp(-t * nx.laplacian_spectrum(nxg)).sum(), rel=1e-10)
            kernel = expm(-t * nx.laplacian_matrix(nxg, nodelist=range(g.num_vertices)).toarray())
            assert values == pytest.approx(np.diag(kernel), abs=1e-10)

    def test_hks_rejects_nonpositive_temperature(self, triangle):
        with pytest.raises(UsageError):
            hks_filter(triangle, 0)

    def test_clustering(self, triangle, star3):
        assert clustering_filter(triangle).tolist() == [1.0, 1.0, 1.0]
        assert clustering_filter(star3).tolist() == [0.0, 0.0, 0.0, 0.0]

    def test_clustering_counts_triangles(self):
        g = build_graph(4, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)])
        h = nx.Graph(list(map(tuple, g.edges.tolist())))
        expected = [nx.clustering(h, v) for v in range(4)]
        assert clustering_filter(g) == pytest.approx(expected)

    def test_centrality(self, star3, sbm_small):
        assert centrality_filter(build_graph(2, [(0, 1)])).tolist() == [1.0, 1.0]
        assert centrality_filter(star3) == pytest.approx([1.0, 1 / 3, 1 / 3, 1 / 3])
        assert centrality_filter(sbm_small) == pytest.approx(degree_filter(sbm_small) / 19)


class TestRicci:

    def test_single_edge(self):
        assert ricci_curvature(build_graph(2, [(0, 1)])) == pytest.approx([1.0])

    def test_triangle(self, triangle):
        assert ricci_curvature(triangle) == pytest.approx([0.75, 0.75, 0.75])

    def test_path_by_exhaustive_plans(self, path3):
        # m_0 = (1/2, 1/2, 0) and m_1 = (1/4, 1/2, 1/4); plans on a 0.25 grid
        mu, nu = [0.5, 0.5, 0.0], [0.25, 0.5, 0.25]
        dist = [[0, 1, 2], [1, 0, 1], [2, 1, 0]]
        best = math.inf
        grid = [i * 0.25 for i in range(3)]
        for plan in itertools.product(grid, repeat=9):
            p = np.reshape(plan, (3, 3))
            if np.allclose(p.sum(axis=1), mu) and np.allclose(p.sum(axis=0), nu):
                best = min(best, float(np.sum(p * dist)))
        assert ricci_curvature(path3)[0] == pytest.approx(1 - best)
        assert ricci_curvature(path3) == pytest.approx([0.5, 0.5])

    def test_edge_lengths(self):
        assert ricci_edge_lengths([1.0, 0.0, -0.5]).tolist() == [1.0, 1.0, 1.5]

    def test_distance_filter_single_edge(self):
        assert ricci_distance_filter(build_graph(2, [(0, 1)]), [0]).tolist() == [0.0, 1.0]

    def test_distance_filter_path(self, path3):
        lengths = ricci_edge_lengths(ricci_curvature(path3))
        values = ricci_distance_filter(path3, [0])
        assert values[2] == pytest.approx(lengths[0] + lengths[1])

    def test_distance_filter_centers_are_zero(self, cycle4):
        values = ricci_distance_filter(cycle4, [0, 2])
        assert values[[0, 2]].tolist() == [0.0, 0.0]
        assert np.all(values[[1, 3]] >= 1.0)

    def test_distance_filter_unreachable(self):
        with pytest.raises(DataFormatError, match="vertex 2"):
            ricci_distance_filter(build_graph(3, [(0, 1)]), [0])

    def test_distance_filter_bad_center(self, path3):
        with pytest.raises(UsageError):
            ricci_distance_filter(path3, [7])


class TestFilterSpecs:

    def test_standard_expansion(self):
        specs = expand_filter_specs("standard")
        assert [str(s) for s in specs] == ["hks:10", "hks:0.1", "ricci-dist:0.5", "degree"]
        assert [s.tag for s in specs] == ["hks-10", "hks-0.1", "ricci-dist-0.5", "degree"]

    def test_list_with_standard_in_place(self):
        specs = expand_filter_specs("clustering, standard")
        assert specs[0] == FilterSpec("clustering")
        assert len(specs) == 5

    def test_ricci_default_alpha(self):
        assert parse_filter_spec("ricci-dist") == FilterSpec("ricci-dist", 0.5)

    @pytest.mark.parametrize("text", ["hks", "degree:2", "pagerank", "hks:abc"])
    def test_invalid_specs(self, text):
        with pytest.raises(UsageError):
            parse_filter_spec(text)

    def test_empty_list(self):
        with pytest.raises(UsageError):
            expand_filter_specs(" , ")

    def test_filter_values_accepts_strings(self, cycle4):
        assert filter_values(cycle4, "degree").tolist() == [2, 2, 2, 2]
        assert filter_values(cycle4, "ricci-dist:0.5", centers=[1])[1] == 0.0
