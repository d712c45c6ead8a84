"""
Distances between diagrams and persistence-image vectorization.

``wasserstein2`` solves the diagonal-augmented assignment problem exactly with
``scipy.optimize.linear_sum_assignment``: the (n1 + n2) square cost matrix
holds point-to-point costs in its upper-left block, each point's cost to its
own diagonal projection on the diagonals of the two off-diagonal blocks
(other entries forbidden) and zeros in the lower-right block.

Persistence images map (b, d) to (b, d - b), so 0D points sit above the
horizontal axis and extended 1D points below it, and integrate a weighted
Gaussian of every point over each grid cell. Image rows run along the
persistence axis from its lower bound, columns along the birth axis.
"""

from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
from scipy import optimize
from scipy.special import ndtr

from .errors import DataFormatError, UsageError

DIAGONAL = -1
NORMS = ("2", "inf")
WEIGHT_MODES = ("linear",)
DEFAULT_RESOLUTION = 5
BOUNDS_PADDING = 0.1
SIGMA_FRACTION = 0.2


def as_points(diagram):
    """(k, 2) float array from a PersistenceDiagram or any point sequence."""
    if hasattr(diagram, "points"):
        return diagram.points()
    return np.asarray(diagram, dtype=np.float64).reshape(-1, 2)


@dataclass
class MatchingResult:
    cost: float
    assignment: List[Tuple[int, int]] = field(default_factory=list)


def _point_cost(p, q, internal_p):
    diff = np.abs(p[:, None, :] - q[None, :, :])
    if internal_p == "inf":
        return np.max(diff, axis=2) ** 2
    return np.sum(diff ** 2, axis=2)


def _diagonal_cost(p, internal_p):
    half = (p[:, 1] - p[:, 0]) / 2
    if internal_p == "inf":
        return half ** 2
    return 2 * half ** 2


def wasserstein2(d1, d2, internal_p="2"):
    """
    2-Wasserstein distance with diagonal matching.

    Arguments
    ---------
    d1, d2 : PersistenceDiagram or (k, 2) arrays of (birth, death)
    internal_p : ground norm in the plane, '2' (Euclidean) or 'inf'

    Returns
    -------
    (distance, MatchingResult) where the assignment lists (i, j), (i, DIAGONAL)
    and (DIAGONAL, j) pairs and the cost is the squared distance.
    """
    internal_p = str(internal_p)
    if internal_p not in NORMS:
        raise UsageError(f"unknown ground norm '{internal_p}' (expected 2 or inf)")
    p, q = as_points(d1), as_points(d2)
    if not (np.all(np.isfinite(p)) and np.all(np.isfinite(q))):
        raise DataFormatError("diagram points must be finite")
    n1, n2 = len(p), len(q)
    if n1 + n2 == 0:
        return 0.0, MatchingResult(0.0, [])

    cost = np.zeros((n1 + n2, n1 + n2))
    cost[:n1, :n2] = _point_cost(p, q, internal_p)
    upper_right = np.full((n1, n1), np.inf)
    np.fill_diagonal(upper_right, _diagonal_cost(p, internal_p))
    lower_left = np.full((n2, n2), np.inf)
    np.fill_diagonal(lower_left, _diagonal_cost(q, internal_p))
    cost[:n1, n2:] = upper_right
    cost[n1:, :n2] = lower_left

    rows, cols = optimize.linear_sum_assignment(cost)
    assignment = []
    total = 0.0
    for i, j in zip(rows, cols):
        if i < n1 and j < n2:
            assignment.append((int(i), int(j)))
        elif i < n1:
            assignment.append((int(i), DIAGONAL))
        elif j < n2:
            assignment.append((DIAGONAL, int(j)))
        else:
            continue
        total += cost[i, j]
    assignment.sort(key=lambda ij: (ij[0] == DIAGONAL, ij[0], ij[1]))
    return float(np.sqrt(total)), MatchingResult(float(total), assignment)


def forced_matching_loss(pred, target):
    """
    Minimum over perfect bijections (no diagonal) of the summed squared
    Euclidean distances. Both inputs must have the same number of points.
    """
    p, q = as_points(pred), as_points(target)
    if len(p) != len(q):
        raise DataFormatError(f"forced matching needs equal sizes, got {len(p)} and {len(q)}")
    if len(p) == 0:
        return 0.0, MatchingResult(0.0, [])
    cost = _point_cost(p, q, "2")
    rows, cols = optimize.linear_sum_assignment(cost)
    total = float(cost[rows, cols].sum())
    return total, MatchingResult(total, [(int(i), int(j)) for i, j in zip(rows, cols)])


#####################
# PERSISTENCE IMAGE #
#####################

@dataclass
class PersistenceImage:
    values: np.ndarray
    bounds: Tuple[float, float]
    sigma: float
    weight_mode: str = "linear"

    @property
    def resolution(self):
        return self.values.shape[0]


def image_coordinates(points):
    """(birth, death) -> (birth, death - birth)."""
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    return np.stack([points[:, 0], points[:, 1] - points[:, 0]], axis=1)


def default_image_params(diagram):
    """
    Tight bounding square of the transformed points padded by 10% on each
    side, and sigma = 0.2 x side. An empty diagram gets bounds (0, 1).
    """
    pts = image_coordinates(as_points(diagram))
    if len(pts) == 0:
        lo, hi = 0.0, 1.0
    else:
        lo, hi = float(pts.min()), float(pts.max())
        side = hi - lo if hi > lo else 1.0
        lo, hi = lo - BOUNDS_PADDING * side, hi + BOUNDS_PADDING * side
    return (lo, hi), SIGMA_FRACTION * (hi - lo)


def persistence_image(diagram, resolution=DEFAULT_RESOLUTION, sigma=None, bounds=None, weight_mode="linear",
                      max_persistence=None):
    """
    Arguments
    ---------
    diagram : PersistenceDiagram or (k, 2) array of (birth, death)
    resolution : grid side r (r x r cells)
    sigma : Gaussian bandwidth, default from ``default_image_params``
    bounds : (min, max) of the square on both axes, default from ``default_image_params``
    weight_mode : 'linear', w = |d - b| / max persistence
    max_persistence : weight normalizer, default the largest |d - b| of the
        diagram; a shared value makes images additive over diagram unions

    Returns
    -------
    PersistenceImage
    """
    if resolution < 1:
        raise UsageError(f"image resolution must be at least 1, got {resolution}")
    if weight_mode not in WEIGHT_MODES:
        raise UsageError(f"unknown weight mode '{weight_mode}'")
    points = as_points(diagram)
    if bounds is None or sigma is None:
        default_bounds, default_sigma = default_image_params(points)
        bounds = default_bounds if bounds is None else bounds
        sigma = default_sigma if sigma is None else sigma
    lo, hi = float(bounds[0]), float(bounds[1])
    if not hi > lo:
        raise UsageError(f"image bounds must satisfy min < max, got ({lo}, {hi})")
    if sigma <= 0:
        raise UsageError(f"sigma must be positive, got {sigma}")

    values = np.zeros((resolution, resolution))
    pts = image_coordinates(points)
    persistence = np.abs(pts[:, 1])
    if max_persistence is None:
        max_persistence = persistence.max() if len(pts) else 0.0
    if len(pts) and max_persistence > 0:
        weights = persistence / max_persistence
        edges = np.linspace(lo, hi, resolution + 1)
        # per point mass of each cell along one axis, shape (k, r)
        cell_x = ndtr((edges[None, 1:] - pts[:, :1]) / sigma) - ndtr((edges[None, :-1] - pts[:, :1]) / sigma)
        cell_y = ndtr((edges[None, 1:] - pts[:, 1:]) / sigma) - ndtr((edges[None, :-1] - pts[:, 1:]) / sigma)
        values = np.einsum("k,ki,kj->ij", weights, cell_y, cell_x)
    return PersistenceImage(values, (lo, hi), float(sigma), weight_mode)


def pie(img1: PersistenceImage, img2: PersistenceImage):
    """Total squared difference between two images on the same grid."""
    if img1.values.shape != img2.values.shape:
        raise DataFormatError(f"image shapes differ: {img1.values.shape} and {img2.values.shape}")
    if not np.allclose(img1.bounds, img2.bounds, rtol=0, atol=1e-12):
        raise DataFormatError(f"image bounds differ: {img1.bounds} and {img2.bounds}")
    return float(np.sum((img1.values - img2.values) ** 2))
