import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, stats

from graph_epd.diagrams import (DIAGONAL, PersistenceImage, default_image_params, forced_matching_loss,
                                image_coordinates, persistence_image, pie, wasserstein2)
from graph_epd.engines import compute_epd
from graph_epd.errors import DataFormatError, UsageError
from graph_epd.persistence import PersistenceDiagram, PersistencePair

coordinate = st.floats(min_value=-5, max_value=5, allow_nan=False)
small_diagrams = st.lists(st.tuples(coordinate, coordinate), max_size=3)


def brute_force_w2(p, q):
    """Every assignment of the diagonal-augmented problem, enumerated."""
    p, q = np.reshape(p, (-1, 2)), np.reshape(q, (-1, 2))
    n1, n2 = len(p), len(q)
    size = n1 + n2
    if size == 0:
        return 0.0

    def cost(i, j):
        if i < n1 and j < n2:
            return float(np.sum((p[i] - q[j]) ** 2))
        if i < n1 and j == n2 + i:
            return (p[i, 1] - p[i, 0]) ** 2 / 2
        if j < n2 and i == n1 + j:
            return (q[j, 1] - q[j, 0]) ** 2 / 2
        if i >= n1 and j >= n2:
            return 0.0
        return math.inf

    best = min(sum(cost(i, j) for i, j in enumerate(perm)) for perm in itertools.permutations(range(size)))
    return math.sqrt(best)


class TestWasserstein:

    def test_empty(self):
        assert wasserstein2([], [])[0] == 0.0

    def test_single_point_against_empty(self):
        distance, matching = wasserstein2([(0.0, 1.0)], [])
        assert distance == 0.7071067811865476
        assert matching.assignment == [(0, DIAGONAL)]

    def test_direct_match_beats_diagonal(self):
        assert wasserstein2([(0.0, 2.0)], [(0.0, 1.0)])[0] == pytest.approx(1.0)

    def test_identical(self, cycle4_fg):
        diagram, _ = compute_epd(cycle4_fg)
        assert wasserstein2(diagram, diagram)[0] == 0.0

    def test_sup_norm(self):
        assert wasserstein2([(0.0, 2.0)], [(1.0, 2.0)], internal_p="inf")[0] == pytest.approx(1.0)

    def test_rejects_unknown_norm(self):
        with pytest.raises(UsageError):
            wasserstein2([], [], internal_p="1")

    def test_rejects_non_finite(self):
        with pytest.raises(DataFormatError):
            wasserstein2([(0.0, math.inf)], [])

    def test_accepts_diagrams(self):
        d = PersistenceDiagram([PersistencePair(0.0, 1.0, 0)], [])
        assert wasserstein2(d, [])[0] == pytest.approx(math.sqrt(0.5))

    @settings(derandomize=True, max_examples=150, deadline=None)
    @given(small_diagrams, small_diagrams)
    def test_matches_enumeration(self, p, q):
        assert wasserstein2(p, q)[0] == pytest.approx(brute_force_w2(p, q), abs=1e-9)

    @settings(derandomize=True, max_examples=100, deadline=None)
    @given(small_diagrams, small_diagrams, small_diagrams)
    def test_metric_axioms(self, p, q, r):
        d_pq = wasserstein2(p, q)[0]
        assert d_pq == pytest.approx(wasserstein2(q, p)[0], abs=1e-9)
        assert wasserstein2(p, p)[0] == pytest.approx(0.0, abs=1e-9)
        assert d_pq <= wasserstein2(p, r)[0] + wasserstein2(r, q)[0] + 1e-9


class TestForcedMatching:

    def test_permutation_found(self):
        assert forced_matching_loss([(0, 0), (1, 1)], [(1, 1), (0, 0)])[0] == 0.0

    def test_best_bijection(self):
        assert forced_matching_loss([(0, 0), (2, 2)], [(0, 1), (2, 3)])[0] == pytest.approx(2.0)

    def test_rejects_size_mismatch(self):
        with pytest.raises(DataFormatError):
            forced_matching_loss([(0, 0)], [])


class TestPersistenceImage:

    def test_coordinates(self):
        assert image_coordinates([(1.0, 3.0), (4.0, 1.0)]).tolist() == [[1.0, 2.0], [4.0, -3.0]]

    def test_empty_diagram(self):
        img = persistence_image([], 5)
        assert img.values.shape == (5, 5)
        assert not img.values.any()

    def test_zero_persistence_point(self):
        assert not persistence_image([(1.0, 1.0)], 5).values.any()

    def test_cells_integrate_the_gaussian(self):
        sigma, r = 0.2, 5
        img = persistence_image([(0.0, 2.0)], r, sigma=sigma, bounds=(0.0, 2.0))
        gx, gy = stats.norm(0.0, sigma), stats.norm(2.0, sigma)
        edges = np.linspace(0.0, 2.0, r + 1)
        for i in range(r):
            for j in range(r):
                expected, _ = integrate.dblquad(lambda y, x: gx.pdf(x) * gy.pdf(y),
                                                edges[j], edges[j + 1], edges[i], edges[i + 1],
                                                epsabs=1e-12, epsrel=1e-10)
                assert img.values[i, j] == pytest.approx(expected, abs=1e-8)

    def test_default_params(self):
        (lo, hi), sigma = default_image_params([(0.0, 1.0)])
        assert (lo, hi) == pytest.approx((-0.1, 1.1))
        assert sigma == pytest.approx(0.24)
        assert default_image_params([]) == ((0.0, 1.0), pytest.approx(0.2))

    def test_additive_with_shared_normalizer(self):
        a, b = [(0.0, 1.0), (2.0, 0.5)], [(1.0, 3.0)]
        params = dict(resolution=4, sigma=0.3, bounds=(-3.0, 3.0), max_persistence=2.0)
        whole = persistence_image(a + b, **params)
        np.testing.assert_allclose(whole.values, persistence_image(a, **params).values
                                   + persistence_image(b, **params).values, atol=1e-15)

    @pytest.mark.parametrize("kwargs", [dict(resolution=0), dict(weight_mode="constant"),
                                        dict(bounds=(1.0, 1.0)), dict(sigma=-1.0)])
    def test_rejects_bad_parameters(self, kwargs):
        with pytest.raises(UsageError):
            persistence_image([(0.0, 1.0)], **kwargs)


class TestPie:

    def test_identical(self):
        img = persistence_image([(0.0, 1.0)], 5)
        assert pie(img, img) == 0.0

    def test_constant_images(self):
        zeros = PersistenceImage(np.zeros((5, 5)), (0.0, 1.0), 0.2)
        tenths = PersistenceImage(np.full((5, 5), 0.1), (0.0, 1.0), 0.2)
        assert pie(zeros, tenths) == pytest.approx(0.25)

    def test_two_point_images(self):
        params = dict(resolution=5, sigma=0.3, bounds=(0.0, 2.0))
        a, b = persistence_image([(0.0, 1.0)], **params), persistence_image([(0.5, 2.0)], **params)
        expected = sum((x - y) ** 2 for x, y in zip(a.values.ravel(), b.values.ravel()))
        assert pie(a, b) == pytest.approx(expected)

    def test_rejects_shape_mismatch(self):
        with pytest.raises(DataFormatError):
            pie(persistence_image([], 5), persistence_image([], 4))
