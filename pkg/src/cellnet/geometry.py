"""Ray-bisector crossings and per-cell relative weights.

The Voronoi diagram is never constructed. For a query point p and cell i the
boundary is probed only along the ray x(t) = c_i + t (p - c_i): each other
seed j contributes a candidate crossing where the ray meets the bisecting
hyperplane of (c_i, c_j), and the nearest valid crossing bounds the cell.
The relative weight is 1 on and inside the cell and decays linearly with the
distance ratio ||p - q|| / ||c_i - q||, vanishing where the ratio reaches the
cell's blending parameter.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .kernels import COINCIDENT_SQ, COINCIDENT_TOL


class DegenerateRayError(ValueError):
    """The query point coincides with the cell's seed (zero-length ray)."""


@dataclass
class BoundaryCrossing:
    """Where the ray from c_i through p first leaves cell i.

    t_star is the ray parameter of the crossing, in (0, +inf]; +inf means no
    bisector is crossed in the positive direction (e.g. a single-cell
    network). active_neighbor is the seed whose bisector realizes t_star,
    None when t_star is +inf.
    """

    t_star: float
    active_neighbor: int | None


def boundary_crossing(net, cell: int, point) -> BoundaryCrossing:
    """Find the first bisector crossing along the ray from net.centers[cell] through point.

    Candidates with the crossing behind or at the seed (non-positive
    denominator) are discarded, as are neighbors coincident with the seed.
    Raises DegenerateRayError when point equals the seed; callers treat that
    point as interior (weight 1).
    """
    p = np.asarray(point, dtype=np.float64)
    centers = net.centers
    c = centers[cell]
    u = p - c
    if math.sqrt(float(u @ u)) < COINCIDENT_TOL:
        raise DegenerateRayError(f"degenerate ray: point coincides with center {cell}")
    best_t = math.inf
    best_j = None
    for j in range(net.cells):
        if j == cell:
            continue
        w = centers[j] - c
        n2 = float(w @ w)
        if n2 < COINCIDENT_SQ:
            continue
        den = 2.0 * float(w @ u)
        if den <= 0.0:
            continue
        t = n2 / den
        if t < best_t:
            best_t = t
            best_j = j
    return BoundaryCrossing(best_t, best_j)


def relative_weight(net, cell: int, point) -> float:
    """Unnormalized influence of cell `cell` at `point`, in [0, 1].

    Exactly 1 when the point lies on or inside the cell's closed Voronoi
    region (t_star >= 1, including the degenerate point-on-seed case), and
    max(0, 1 - ratio/alpha) outside, where ratio = (1 - t_star) / t_star is
    the boundary distance ratio along the ray.
    """
    try:
        crossing = boundary_crossing(net, cell, point)
    except DegenerateRayError:
        return 1.0
    t = crossing.t_star
    if t >= 1.0:
        return 1.0
    ratio = (1.0 - t) / t
    return max(0.0, 1.0 - ratio / net.alphas[cell])


def raw_weights(net, points, deterministic=False):
    """Relative weights for every cell at each of `points`; shape (n, k)."""
    X = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if X.shape[1] != net.dimensions:
        raise ValueError(f"points must have dimension {net.dimensions}")
    wrel, _, _ = kernels.forward(net.centers, net.alphas, X, deterministic=deterministic)
    return wrel
