"""Convex polygon kernel: construction, classical metrics, support function.

Polygons model bounded, open, convex planar bodies. They are stored as
counter-clockwise vertex arrays with strictly convex corners; collinear and
duplicate vertices are merged at construction time. All operations are pure
functions over immutable values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import Degenerate, NonConvex, NonPositiveScale, ZeroDirection

# Normalized cross products below this are treated as collinear.
MERGE_EPS = 1e-12
# Vertices closer than this are duplicates.
MIN_VERTEX_SEP = 1e-12
# Polygons with area below this are rejected as degenerate.
MIN_AREA = 1e-9

# Vertex count below which the diameter is found by brute-force pairs.
_DIAMETER_BRUTE_LIMIT = 64


def _shoelace(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


@dataclass(frozen=True)
class ConvexPolygon:
    """Counter-clockwise, strictly convex planar polygon.

    Use :func:`polygon_from_vertices` to build one from raw points; the
    constructor itself only validates an already canonical vertex array.
    """

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise Degenerate("need an (k, 2) array with k >= 3")
        if not np.all(np.isfinite(v)):
            raise Degenerate("non-finite vertex coordinates")
        v = np.array(v, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        area = _shoelace(v)
        if area <= 0.0:
            raise NonConvex("vertices are not in counter-clockwise order")
        # strict convexity at every corner
        a = np.roll(v, 1, axis=0)
        c = np.roll(v, -1, axis=0)
        e1 = v - a
        e2 = c - v
        cross = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
        norm = np.linalg.norm(e1, axis=1) * np.linalg.norm(e2, axis=1)
        if np.any(norm < MIN_VERTEX_SEP**2):
            raise Degenerate("duplicate vertices")
        if np.any(cross / norm <= 0.0):
            raise NonConvex("reflex or flat corner in canonical polygon")

    # -- cached derived data -------------------------------------------------

    def _edge_data(self):
        """Inward unit normals n_i and offsets b_i with n_i . x >= b_i on the body."""
        cached = self.__dict__.get("_edges")
        if cached is None:
            v = self.vertices
            e = np.roll(v, -1, axis=0) - v
            length = np.linalg.norm(e, axis=1)
            # inward normal of a CCW edge is the left-rotated edge direction
            n = np.column_stack((-e[:, 1], e[:, 0])) / length[:, None]
            b = np.einsum("ij,ij->i", n, v)
            cached = (n, b, length)
            object.__setattr__(self, "_edges", cached)
        return cached

    @property
    def edge_normals(self) -> np.ndarray:
        return self._edge_data()[0]

    @property
    def edge_offsets(self) -> np.ndarray:
        return self._edge_data()[1]

    @property
    def edge_lengths(self) -> np.ndarray:
        return self._edge_data()[2]

    def signed_distance(self, points: np.ndarray) -> np.ndarray:
        """Distance to the boundary, positive inside (exact for convex polygons)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        n, b, _ = self._edge_data()
        out = np.full(len(pts), np.inf)
        for i in range(len(b)):
            np.minimum(out, pts @ n[i] - b[i], out=out)
        return out

    def contains(self, points: np.ndarray, tol: float = 0.0) -> np.ndarray:
        return self.signed_distance(points) >= -tol


@dataclass(frozen=True)
class BodyMetrics:
    """Classical metrics of a convex body."""

    area: float
    perimeter: float
    diameter: float
    width: float
    width_direction: tuple[float, float]
    inradius: float
    incenter: tuple[float, float]


def _canonicalize(points: np.ndarray) -> np.ndarray:
    """Drop duplicate and collinear vertices, keeping the traversal order."""
    pts = [tuple(p) for p in points]
    changed = True
    while changed and len(pts) >= 3:
        changed = False
        # duplicates first
        kept = []
        for p in pts:
            if kept and math.hypot(p[0] - kept[-1][0], p[1] - kept[-1][1]) < MIN_VERTEX_SEP:
                changed = True
                continue
            kept.append(p)
        if len(kept) >= 2 and math.hypot(
            kept[0][0] - kept[-1][0], kept[0][1] - kept[-1][1]
        ) < MIN_VERTEX_SEP:
            kept.pop()
            changed = True
        pts = kept
        if len(pts) < 3:
            break
        # collinear corners next
        kept = []
        m = len(pts)
        for j in range(m):
            a = pts[j - 1]
            p = pts[j]
            c = pts[(j + 1) % m]
            ux, uy = p[0] - a[0], p[1] - a[1]
            wx, wy = c[0] - p[0], c[1] - p[1]
            cross = ux * wy - uy * wx
            norm = math.hypot(ux, uy) * math.hypot(wx, wy)
            if norm > 0 and cross / norm <= -MERGE_EPS:
                raise NonConvex(f"reflex turn at vertex {j}: {p}")
            if norm == 0 or abs(cross) / norm < MERGE_EPS:
                changed = True
                continue
            kept.append(p)
        pts = kept
    return np.asarray(pts, dtype=float)


def polygon_from_vertices(points) -> ConvexPolygon:
    """Build a canonical convex polygon from an ordered point list.

    The points must trace the boundary once (either orientation); clockwise
    input is reversed. Collinear vertices are merged, duplicates dropped.

    Raises
    ------
    NonConvex
        If a reflex turn is found, or the boundary winds more than once.
    Degenerate
        If fewer than 3 usable points remain or the area is below 1e-9.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise Degenerate("expected an (k, 2) array of points")
    if pts.shape[0] < 3:
        raise Degenerate("need at least 3 points")
    if not np.all(np.isfinite(pts)):
        raise Degenerate("non-finite input coordinates")
    area = _shoelace(pts)
    if area < 0:
        pts = pts[::-1]
    merged = _canonicalize(pts)
    if merged.shape[0] < 3:
        raise Degenerate("fewer than 3 vertices after merging")
    if _shoelace(merged) < MIN_AREA:
        raise Degenerate(f"area {_shoelace(merged):.3e} below {MIN_AREA:.0e}")
    # guard against boundaries winding more than once (star polygons pass the
    # local turn test but sum their exterior angles to a multiple of 2 pi)
    v = merged
    e = np.roll(v, -1, axis=0) - v
    ang = np.arctan2(e[:, 1], e[:, 0])
    turn = np.diff(np.concatenate([ang, ang[:1]]))
    turn = (turn + np.pi) % (2 * np.pi) - np.pi
    if abs(float(np.sum(turn)) - 2 * np.pi) > 1e-6:
        raise NonConvex("boundary winds more than once")
    return ConvexPolygon(merged)


def support_function(polygon: ConvexPolygon, y) -> float:
    """max over the body of x . y (the support value in direction y)."""
    y = np.asarray(y, dtype=float)
    if y.shape != (2,):
        raise ZeroDirection("direction must be a planar vector")
    if math.hypot(y[0], y[1]) < MIN_VERTEX_SEP:
        raise ZeroDirection("zero direction")
    return float(np.max(polygon.vertices @ y))


def scale(polygon: ConvexPolygon, t: float) -> ConvexPolygon:
    """Dilate the body by t > 0 about the origin."""
    if not (t > 0.0):
        raise NonPositiveScale(f"scale factor {t!r} must be positive")
    return polygon_from_vertices(polygon.vertices * t)


def _diameter_brute(v: np.ndarray) -> float:
    d2 = np.sum((v[:, None, :] - v[None, :, :]) ** 2, axis=2)
    return float(np.sqrt(d2.max()))


def _diameter_calipers(v: np.ndarray) -> float:
    """Antipodal-pair sweep over a strictly convex CCW polygon."""
    k = len(v)

    def cross_area(i, j, l):
        return (v[j, 0] - v[i, 0]) * (v[l, 1] - v[i, 1]) - (v[j, 1] - v[i, 1]) * (
            v[l, 0] - v[i, 0]
        )

    best = 0.0
    j = 1
    for i in range(k):
        i1 = (i + 1) % k
        while cross_area(i, i1, (j + 1) % k) > cross_area(i, i1, j):
            j = (j + 1) % k
        for cand in (j, (j + 1) % k):
            d = float(np.hypot(*(v[cand] - v[i])))
            if d > best:
                best = d
            d = float(np.hypot(*(v[cand] - v[i1])))
            if d > best:
                best = d
    return best


def _width_over_edge_normals(polygon: ConvexPolygon):
    """Minimal width and its achieving unit direction (an edge normal)."""
    v = polygon.vertices
    n = polygon.edge_normals
    best = math.inf
    best_dir = (0.0, 1.0)
    for i in range(len(n)):
        proj = v @ n[i]
        w = float(proj.max() - proj.min())
        if w < best:
            best = w
            best_dir = (float(n[i, 0]), float(n[i, 1]))
    return best, best_dir


def _chebyshev_center(polygon: ConvexPolygon):
    """Largest inscribed disk: maximize r with r <= n_i . x - b_i for all edges.

    Solved as a linear program, then polished by re-solving the active
    constraint set in least squares; the returned radius is recomputed as the
    exact minimal edge distance of the polished center, so it is feasible by
    construction.
    """
    n, b, _ = polygon._edge_data()
    k = len(b)
    a_ub = np.column_stack((-n, np.ones(k)))
    res = linprog(
        c=np.array([0.0, 0.0, -1.0]),
        A_ub=a_ub,
        b_ub=-b,
        bounds=[(None, None), (None, None), (0.0, None)],
        method="highs",
    )
    if not res.success:  # pragma: no cover - cannot happen for valid polygons
        raise Degenerate(f"inradius LP failed: {res.message}")
    x, y, r = res.x
    center = np.array([x, y])
    scale_len = float(np.max(np.abs(polygon.vertices))) + 1.0
    # polish: solve the tight constraints n_i . c - r = b_i in least squares
    dist = n @ center - b
    active = np.where(dist - r < 1e-7 * scale_len)[0]
    if len(active) >= 3:
        rows = np.column_stack((n[active], -np.ones(len(active))))
        sol, *_ = np.linalg.lstsq(rows, b[active], rcond=None)
        cand = sol[:2]
        cand_r = float(np.min(n @ cand - b))
        if cand_r >= r - 1e-9 * scale_len:
            center, r = cand, max(cand_r, r)
    r = float(np.min(n @ center - b))
    return float(r), (float(center[0]), float(center[1]))


def metrics(polygon: ConvexPolygon) -> BodyMetrics:
    """Area, perimeter, diameter, minimal width and inradius of the body.

    Results are cached on the polygon, which is safe because polygons are
    immutable.
    """
    cached = polygon.__dict__.get("_metrics")
    if cached is not None:
        return cached
    v = polygon.vertices
    area = _shoelace(v)
    perimeter = float(np.sum(polygon.edge_lengths))
    if len(v) < _DIAMETER_BRUTE_LIMIT:
        diameter = _diameter_brute(v)
    else:
        diameter = _diameter_calipers(v)
    width, width_dir = _width_over_edge_normals(polygon)
    inradius, incenter = _chebyshev_center(polygon)
    m = BodyMetrics(
        area=area,
        perimeter=perimeter,
        diameter=diameter,
        width=width,
        width_direction=width_dir,
        inradius=inradius,
        incenter=incenter,
    )
    object.__setattr__(polygon, "_metrics", m)
    return m
