"""Qubit state space as the unit sphere: embedding, hulls, retracts.

The projective qubit space embeds onto the sphere in R^3; great-circle
distance there is exactly twice the projective distance. On top of that live
the convex-geometry tools used to study fixed-point arguments numerically:
hulls of sampled state clouds, the radial homeomorphism onto the unit ball,
the closed-form retract of the ball onto the upper hemisphere, and a
statistical check for the one obstruction to that construction, namely a
sample set that already fills the whole boundary of its hull.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull as _QHull
from scipy.spatial import QhullError, cKDTree

from .linalg import PureState, as_rng, _as_vector

__all__ = [
    "bloch_embedding",
    "great_circle_distance",
    "IsometryReport",
    "isometry_check",
    "ConvexHull3D",
    "convex_hull",
    "ExtremePointsReport",
    "extreme_points",
    "support_radius",
    "ball_homeomorphism",
    "ball_homeomorphism_inverse",
    "hemisphere_retract",
    "CoincidenceReport",
    "boundary_coincidence_check",
    "sample_hull_boundary",
]


def bloch_embedding(state) -> np.ndarray:
    """Unit-sphere image (2 Re(a* b), 2 Im(a* b), |a|^2 - |b|^2) of a qubit state."""
    v = state.amplitudes if isinstance(state, PureState) else _as_vector(state)
    if v.size != 2:
        raise ValueError(f"the sphere embedding takes qubit states, got dimension {v.size}")
    a, b = v[0], v[1]
    cross = a.conjugate() * b
    return np.array([2.0 * cross.real, 2.0 * cross.imag, abs(a) ** 2 - abs(b) ** 2])


def great_circle_distance(u: np.ndarray, v: np.ndarray) -> float:
    """Arc length between unit vectors in R^3."""
    dot = float(np.clip(np.dot(u, v), -1.0, 1.0))
    return float(np.arccos(dot))


@dataclass(frozen=True)
class IsometryReport:
    """Worst observed gap between sphere distance and twice projective distance."""

    pairs_checked: int
    max_deviation: float


def isometry_check(pairs) -> IsometryReport:
    """Compare great-circle distance of embedded images with 2x projective distance."""
    from .linalg import fubini_study_distance

    worst = 0.0
    count = 0
    for p, q in pairs:
        gc = great_circle_distance(bloch_embedding(p), bloch_embedding(q))
        fs = fubini_study_distance(p, q)
        worst = max(worst, abs(gc - 2.0 * fs))
        count += 1
    return IsometryReport(pairs_checked=count, max_deviation=worst)


@dataclass(frozen=True, eq=False)
class ConvexHull3D:
    """Triangulated hull: vertex coordinates, facet vertex triples, outward planes.

    ``normals[k] . x == offsets[k]`` on facet ``k``; every input point sits on
    the inner side of every facet plane within the containment tolerance.
    """

    vertices: np.ndarray
    facets: np.ndarray
    normals: np.ndarray
    offsets: np.ndarray
    centroid: np.ndarray

    CONTAINMENT_TOL = 1e-9

    def contains(self, point: np.ndarray, *, tol: float | None = None) -> bool:
        t = self.CONTAINMENT_TOL if tol is None else tol
        return bool(np.all(self.normals @ np.asarray(point, float) - self.offsets <= t))


def convex_hull(points) -> ConvexHull3D:
    """Hull of a 3-d point cloud (quickhull); raises on degenerate input.

    Exact duplicates are merged before the hull is built, so coincident
    samples yield a single vertex.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError(f"expected an (n, 3) point array, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("point cloud has non-finite entries")
    pts = np.unique(pts, axis=0)
    if pts.shape[0] < 4:
        raise ValueError("a 3-d hull needs at least four distinct points")
    try:
        hull = _QHull(pts)
    except QhullError as exc:
        raise ValueError(f"degenerate point cloud (coplanar or collinear): {exc}") from exc
    vertex_ids = hull.vertices
    vertices = pts[vertex_ids]
    relabel = {old: new for new, old in enumerate(vertex_ids)}
    facets = np.array([[relabel[v] for v in simplex] for simplex in hull.simplices])
    centroid = vertices.mean(axis=0)
    normals = np.empty((facets.shape[0], 3))
    offsets = np.empty(facets.shape[0])
    for k, tri in enumerate(facets):
        a, b, c = vertices[tri]
        n = np.cross(b - a, c - a)
        norm = np.linalg.norm(n)
        if norm < 1e-14:
            raise ValueError("hull facet is degenerate")
        n /= norm
        if np.dot(n, a - centroid) < 0:      # orient away from the centroid
            n = -n
        normals[k] = n
        offsets[k] = np.dot(n, a)
    out = ConvexHull3D(
        vertices=vertices,
        facets=facets,
        normals=normals,
        offsets=offsets,
        centroid=centroid,
    )
    inside = pts @ out.normals.T - out.offsets[None, :]
    if inside.max() > ConvexHull3D.CONTAINMENT_TOL:
        raise ValueError(f"hull fails containment validation by {inside.max():.3e}")
    return out


@dataclass(frozen=True, eq=False)
class ExtremePointsReport:
    """Which input points survive as hull vertices."""

    is_extreme: np.ndarray
    extreme_count: int
    fraction: float


def extreme_points(hull: ConvexHull3D, originals, *, tol: float = 1e-9) -> ExtremePointsReport:
    """Flag each original point that coincides with a hull vertex."""
    pts = np.asarray(originals, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError(f"expected an (n, 3) point array, got shape {pts.shape}")
    tree = cKDTree(hull.vertices)
    dists, _ = tree.query(pts)
    flags = dists <= tol
    return ExtremePointsReport(
        is_extreme=flags,
        extreme_count=int(flags.sum()),
        fraction=float(flags.mean()),
    )


def support_radius(hull: ConvexHull3D, direction: np.ndarray) -> float:
    """Distance from the hull centroid to the boundary along a unit direction."""
    d = np.asarray(direction, dtype=np.float64)
    heights = hull.offsets - hull.normals @ hull.centroid   # all > 0: centroid is interior
    rates = hull.normals @ d
    ahead = rates > 1e-14
    if not np.any(ahead):
        raise ValueError("direction escapes every facet plane; hull is degenerate")
    return float(np.min(heights[ahead] / rates[ahead]))


def ball_homeomorphism(hull: ConvexHull3D, point) -> np.ndarray:
    """Centroid-anchored radial rescaling of a hull point into the unit ball.

    The hull boundary lands exactly on the unit sphere; the centroid goes to
    the origin. Raises when the point lies outside the hull.
    """
    p = np.asarray(point, dtype=np.float64)
    u = p - hull.centroid
    r = np.linalg.norm(u)
    if r < 1e-15:
        return np.zeros(3)
    direction = u / r
    rho = support_radius(hull, direction)
    if r > rho * (1.0 + 1e-9):
        raise ValueError("point lies outside the hull")
    return u / rho


def ball_homeomorphism_inverse(hull: ConvexHull3D, point) -> np.ndarray:
    """Inverse radial rescaling: unit-ball point back into the hull."""
    y = np.asarray(point, dtype=np.float64)
    r = np.linalg.norm(y)
    if r > 1.0 + 1e-9:
        raise ValueError("point lies outside the closed unit ball")
    if r < 1e-15:
        return hull.centroid.copy()
    rho = support_radius(hull, y / r)
    return hull.centroid + y * rho


def hemisphere_retract(point) -> np.ndarray:
    """Retract the closed unit ball onto the upper hemisphere of its boundary.

    Keeps all but the last coordinate and lifts the last to put the point on
    the unit sphere: (x_1, ..., x_{m-1}) |-> sqrt(1 - sum of squares). Fixes
    the upper hemisphere pointwise and is idempotent. Raises when the input
    leaves the closed ball.
    """
    x = np.asarray(point, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("expected a point in R^m with m >= 2")
    if np.linalg.norm(x) > 1.0 + 1e-9:
        raise ValueError("point lies outside the closed unit ball")
    head = x[:-1]
    slack = 1.0 - float(head @ head)
    out = np.empty_like(x)
    out[:-1] = head
    out[-1] = np.sqrt(max(slack, 0.0))
    return out


@dataclass(frozen=True)
class CoincidenceReport:
    """Fraction of the hull boundary lying within ``delta`` of the sample set.

    A fraction at or above the threshold means the samples already fill their
    hull's boundary, which is exactly the situation where no proper boundary
    piece is available as a retract target.
    """

    fraction: float
    delta: float
    num_boundary_samples: int
    threshold: float
    coincident: bool
    status: str


def sample_hull_boundary(
    hull: ConvexHull3D, count: int, rng: np.random.Generator
) -> np.ndarray:
    """Uniform boundary samples: facets weighted by area, uniform per triangle."""
    a = hull.vertices[hull.facets[:, 0]]
    b = hull.vertices[hull.facets[:, 1]]
    c = hull.vertices[hull.facets[:, 2]]
    areas = 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)
    weights = areas / areas.sum()
    chosen = rng.choice(len(areas), size=count, p=weights)
    # sqrt trick: uniform point in a triangle
    r1 = np.sqrt(rng.uniform(size=count))[:, None]
    r2 = rng.uniform(size=count)[:, None]
    return (
        (1.0 - r1) * a[chosen]
        + r1 * (1.0 - r2) * b[chosen]
        + r1 * r2 * c[chosen]
    )


def boundary_coincidence_check(
    samples,
    *,
    num_boundary_samples: int = 2000,
    delta: float = 0.05,
    threshold: float = 0.95,
    seed: int | np.random.Generator | None = 0,
) -> CoincidenceReport:
    """Estimate how much of the hull boundary the sample set itself covers.

    Builds the hull of ``samples``, draws area-weighted boundary points, and
    reports the fraction lying within ``delta`` of the nearest sample. A
    covered boundary (fraction >= threshold) is flagged: the retract
    construction needs a boundary piece free of the set, and none is left.
    """
    pts = np.asarray(samples, dtype=np.float64)
    hull = convex_hull(pts)
    rng = as_rng(seed)
    boundary = sample_hull_boundary(hull, num_boundary_samples, rng)
    dists, _ = cKDTree(pts).query(boundary)
    fraction = float((dists <= delta).mean())
    coincident = fraction >= threshold
    status = (
        "retract construction unavailable: samples cover their hull boundary"
        if coincident
        else "proper boundary piece available for a retract target"
    )
    return CoincidenceReport(
        fraction=fraction,
        delta=float(delta),
        num_boundary_samples=int(num_boundary_samples),
        threshold=float(threshold),
        coincident=coincident,
        status=status,
    )
